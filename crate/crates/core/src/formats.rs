//! JSON file formats for instances, menus, counting inputs and hard instances.
//!
//! Rationals are written as `"p/q"` strings (`"p"` when `q = 1`); readers
//! also accept integers, decimal strings and plain JSON integers.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hardness::{build_hard_instance_unchecked, CompInstance, HardInstance};
use crate::market::{Bundle, ItemDistribution, Menu, MenuEntry, ProductDistribution, SupportPoint};
use crate::scalar::{format_rational, parse_rational};
use crate::Rational;

/// A number given either as a JSON integer or as text.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NumText {
    Int(i64),
    Text(String),
}

impl NumText {
    pub fn rational(&self) -> Result<Rational> {
        match self {
            NumText::Int(i) => Ok(Rational::from_integer((*i).into())),
            NumText::Text(s) => parse_rational(s),
        }
    }

    pub fn integer(&self) -> Result<BigInt> {
        match self {
            NumText::Int(i) => Ok((*i).into()),
            NumText::Text(s) => s
                .trim()
                .parse::<BigInt>()
                .map_err(|e| Error::invalid(format!("cannot parse integer {s:?}: {e}"))),
        }
    }

    pub fn of_rational(r: &Rational) -> NumText {
        NumText::Text(format_rational(r))
    }

    pub fn of_integer(i: &BigInt) -> NumText {
        match i64::try_from(i) {
            Ok(small) => NumText::Int(small),
            Err(_) => NumText::Text(i.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointFile {
    pub value: NumText,
    pub prob: NumText,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ItemFile {
    pub support: Vec<PointFile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub items: Vec<ItemFile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntryFile {
    pub bundle: Vec<usize>,
    pub price: NumText,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MenuFile {
    pub entries: Vec<EntryFile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompFile {
    #[serde(rename = "B")]
    pub b: Vec<NumText>,
    /// 1-based.
    #[serde(rename = "W")]
    pub w: Vec<usize>,
    pub t: NumText,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HardInstanceFile {
    pub source: CompFile,
    pub t: NumText,
    pub conditions_hold: bool,
    pub parameters: BTreeMap<String, NumText>,
    pub instance: InstanceFile,
}

fn from_json<'a, T: Deserialize<'a>>(text: &'a str, what: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::invalid(format!("malformed {what} file: {e}")))
}

impl InstanceFile {
    pub fn parse(text: &str) -> Result<Self> {
        from_json(text, "instance")
    }

    pub fn to_distribution(&self) -> Result<ProductDistribution<Rational>> {
        let items = self
            .items
            .iter()
            .map(|it| {
                let support = it
                    .support
                    .iter()
                    .map(|pt| Ok(SupportPoint { value: pt.value.rational()?, prob: pt.prob.rational()? }))
                    .collect::<Result<Vec<_>>>()?;
                ItemDistribution::new(support)
            })
            .collect::<Result<Vec<_>>>()?;
        ProductDistribution::new(items)
    }

    pub fn of_distribution(dist: &ProductDistribution<Rational>) -> Self {
        InstanceFile {
            items: dist
                .items()
                .iter()
                .map(|it| ItemFile {
                    support: it
                        .support()
                        .iter()
                        .map(|pt| PointFile { value: NumText::of_rational(&pt.value), prob: NumText::of_rational(&pt.prob) })
                        .collect(),
                })
                .collect(),
        }
    }
}

impl MenuFile {
    pub fn parse(text: &str) -> Result<Self> {
        from_json(text, "menu")
    }

    pub fn to_menu(&self) -> Result<Menu<Rational>> {
        let entries = self
            .entries
            .iter()
            .map(|e| Ok(MenuEntry { bundle: Bundle::from_one_based(&e.bundle)?, price: e.price.rational()? }))
            .collect::<Result<Vec<_>>>()?;
        Menu::new(entries)
    }

    pub fn of_menu(menu: &Menu<Rational>) -> Self {
        MenuFile {
            entries: menu
                .entries()
                .iter()
                .map(|e| EntryFile { bundle: e.bundle.to_one_based(), price: NumText::of_rational(&e.price) })
                .collect(),
        }
    }
}

impl CompFile {
    pub fn parse(text: &str) -> Result<Self> {
        from_json(text, "COMP")
    }

    pub fn to_instance(&self) -> Result<CompInstance> {
        let b = self.b.iter().map(NumText::integer).collect::<Result<Vec<_>>>()?;
        if let Some(&bad) = self.w.iter().find(|&&i| i == 0) {
            return Err(Error::invalid(format!("W index {bad} is not 1-based")));
        }
        CompInstance::new(b, self.w.iter().map(|i| i - 1).collect(), self.t.integer()?)
    }

    pub fn of_instance(inst: &CompInstance) -> Self {
        CompFile {
            b: inst.b().iter().map(NumText::of_integer).collect(),
            w: inst.w_set().iter().map(|i| i + 1).collect(),
            t: NumText::of_integer(inst.t()),
        }
    }
}

impl HardInstanceFile {
    pub fn parse(text: &str) -> Result<Self> {
        from_json(text, "hard instance")
    }

    pub fn of_instance(hi: &HardInstance) -> Result<Self> {
        let r = NumText::of_rational;
        let mut parameters = BTreeMap::new();
        for (name, value) in [
            ("h", &hi.h),
            ("p", &hi.p),
            ("delta", &hi.delta),
            ("c", &hi.c),
            ("alpha", &hi.alpha),
            ("sigma", &hi.sigma),
            ("tau", &hi.tau),
            ("epsilon", &hi.epsilon),
            ("a_prime", &hi.a_prime),
            ("rev_b_term", &hi.rev_b_term),
            ("c_prime", &hi.c_prime),
        ] {
            parameters.insert(name.to_string(), r(value));
        }
        for (i, (a, h)) in hi.a.iter().zip(&hi.h_items).enumerate() {
            parameters.insert(format!("a_{}", i + 1), r(a));
            parameters.insert(format!("h_{}", i + 1), r(h));
        }
        Ok(HardInstanceFile {
            source: CompFile::of_instance(&hi.source),
            t: NumText::of_integer(&hi.t),
            conditions_hold: hi.conditions_hold,
            parameters,
            instance: InstanceFile::of_distribution(&hi.distribution()?),
        })
    }

    /// Rebuilds the instance from its source and checks the stored data.
    pub fn to_instance(&self) -> Result<HardInstance> {
        let source = self.source.to_instance()?;
        let hi = build_hard_instance_unchecked(&source, &self.t.integer()?)?;
        let rebuilt = HardInstanceFile::of_instance(&hi)?;
        if rebuilt.instance.to_distribution()? != self.instance.to_distribution()? {
            return Err(Error::invalid("stored distribution does not match its source"));
        }
        if rebuilt.conditions_hold != self.conditions_hold {
            return Err(Error::invalid("stored condition flag does not match its source"));
        }
        for (name, value) in &self.parameters {
            match rebuilt.parameters.get(name) {
                Some(v) if v.rational()? == value.rational()? => {}
                _ => return Err(Error::invalid(format!("stored parameter {name} does not match its source"))),
            }
        }
        Ok(hi)
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("file types serialize")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::limits::Limits;
    use crate::market::expected_revenue;

    #[test]
    fn instance_round_trip() {
        let text = r#"{"items":[{"support":[{"value":"3/2","prob":"1/4"},{"value":2,"prob":"0.75"}]}]}"#;
        let d = InstanceFile::parse(text).unwrap().to_distribution().unwrap();
        let again = InstanceFile::parse(&to_json(&InstanceFile::of_distribution(&d))).unwrap().to_distribution().unwrap();
        assert_eq!(d, again);
    }

    #[test]
    fn bad_probability_sum_rejected() {
        let text = r#"{"items":[{"support":[{"value":"1","prob":"5/8"},{"value":"2","prob":"1/2"}]}]}"#;
        assert!(InstanceFile::parse(text).unwrap().to_distribution().is_err());
    }

    #[test]
    fn menu_round_trip() {
        let text = r#"{"entries":[{"bundle":[1,2],"price":"7/2"},{"bundle":[2],"price":"2"}]}"#;
        let m = MenuFile::parse(text).unwrap().to_menu().unwrap();
        assert_eq!(m.entries()[0].bundle, Bundle(3));
        let again = MenuFile::parse(&to_json(&MenuFile::of_menu(&m))).unwrap().to_menu().unwrap();
        assert_eq!(m, again);
        let d = InstanceFile::parse(r#"{"items":[{"support":[{"value":"4","prob":"1"}]},{"support":[{"value":"2","prob":"1"}]}]}"#)
            .unwrap()
            .to_distribution()
            .unwrap();
        assert_eq!(expected_revenue(&m, &d, &Limits::default()).unwrap(), Rational::new(7.into(), 2.into()));
    }

    #[test]
    fn comp_and_hard_round_trip() {
        let comp = CompFile::parse(r#"{"B":[1,"2"],"W":[2],"t":1}"#).unwrap().to_instance().unwrap();
        assert_eq!(comp.target(), BigInt::from(2));
        let hi = build_hard_instance_unchecked(&comp, &BigInt::from(1)).unwrap();
        let file = HardInstanceFile::of_instance(&hi).unwrap();
        let back = HardInstanceFile::parse(&to_json(&file)).unwrap().to_instance().unwrap();
        assert_eq!(back, hi);

        let mut tampered = file.clone();
        tampered.parameters.insert("sigma".into(), NumText::Int(7));
        assert!(tampered.to_instance().is_err());
    }

    #[test]
    fn unknown_fields_rejected() {
        assert!(MenuFile::parse(r#"{"entries":[],"extra":1}"#).is_err());
        assert!(CompFile::parse(r#"{"B":[1,2],"W":[0],"t":1}"#).unwrap().to_instance().is_err());
    }
}
