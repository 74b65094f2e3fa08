//! Optimal pricing for i.i.d. items with two support values.
//!
//! With values normalized to `{1, b}`, let `P_i` be the probability of exactly
//! `i` high items. The optimum sells each item at `b` and the grand bundle at
//! `k·b + n - k`, where `k` is the first level at which
//! `(n - i)·P_i - (b - 1)·Σ_{j>i} P_j` turns nonnegative.

use crate::error::{Error, Result};
use crate::market::{discounted_item_pricing_menu, ItemDistribution, Menu, ProductDistribution};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct Iid2Instance<S> {
    pub n: usize,
    pub a: S,
    pub b: S,
    /// Probability of the high value `b`.
    pub p: S,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Iid2Solution<S> {
    pub k: usize,
    pub bundle_price: S,
    pub item_price: S,
    pub revenue: S,
    pub level_probs: Vec<S>,
}

impl<S: Scalar> Iid2Instance<S> {
    pub fn new(n: usize, a: S, b: S, p: S) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("at least one item is required"));
        }
        if a.is_negative() || a >= b {
            return Err(Error::invalid(format!("values must satisfy 0 <= a < b, got a={a}, b={b}")));
        }
        check_prob(&p)?;
        Ok(Iid2Instance { n, a, b, p })
    }

    pub fn distribution(&self) -> Result<ProductDistribution<S>> {
        let item = ItemDistribution::two_point(self.a.clone(), self.b.clone(), self.p.clone())?;
        ProductDistribution::iid(self.n, item)
    }
}

impl<S: Scalar> Iid2Solution<S> {
    /// Every item at `item_price`, the grand bundle at `bundle_price`.
    pub fn menu(&self, n: usize) -> Result<Menu<S>> {
        discounted_item_pricing_menu(&vec![self.item_price.clone(); n], self.bundle_price.clone())
    }
}

fn check_prob<S: Scalar>(p: &S) -> Result<()> {
    if !p.is_positive() || *p >= S::one() {
        return Err(Error::invalid(format!("probability {p} must lie strictly between 0 and 1")));
    }
    Ok(())
}

/// `P_i = C(n,i) p^i (1-p)^{n-i}` for `i = 0..=n`.
pub fn level_probabilities<S: Scalar>(n: usize, p: &S) -> Result<Vec<S>> {
    check_prob(p)?;
    let q = S::one() - p.clone();
    let mut binom = S::one();
    let mut out = Vec::with_capacity(n + 1);
    for i in 0..=n {
        out.push(binom.clone() * p.pow_u(i as u32) * q.pow_u((n - i) as u32));
        binom = binom * S::from_count(n - i) / S::from_count(i + 1);
    }
    Ok(out)
}

/// `Σ_{j>i} P_j` for every `i`; the last entry is 0.
fn upper_tails<S: Scalar>(probs: &[S]) -> Vec<S> {
    let mut tails = vec![S::zero(); probs.len()];
    for i in (0..probs.len().saturating_sub(1)).rev() {
        tails[i] = tails[i + 1].clone() + probs[i + 1].clone();
    }
    tails
}

/// `(n - i)·P_i - (b - 1)·Σ_{j>i} P_j` for `i = 0..=n`.
pub fn threshold_expressions<S: Scalar>(n: usize, b: &S, p: &S) -> Result<Vec<S>> {
    let probs = level_probabilities(n, p)?;
    let tails = upper_tails(&probs);
    let step = b.clone() - S::one();
    Ok((0..=n)
        .map(|i| S::from_count(n - i) * probs[i].clone() - step.clone() * tails[i].clone())
        .collect())
}

/// Smallest level whose threshold expression is nonnegative.
///
/// The expression is negative below the threshold and nonnegative from it on;
/// a second sign change is reported as a consistency failure.
pub fn find_k<S: Scalar>(n: usize, b: &S, p: &S) -> Result<usize> {
    if *b <= S::one() {
        return Err(Error::invalid(format!("normalized high value {b} must exceed 1")));
    }
    let exprs = threshold_expressions(n, b, p)?;
    let k = exprs.iter().position(|e| !e.is_negative()).ok_or_else(|| {
        Error::Consistency("threshold expression is negative at level n".into())
    })?;
    if let Some(i) = exprs[k..].iter().position(|e| e.is_negative()) {
        return Err(Error::Consistency(format!(
            "threshold expression turns negative again at level {} after k={k}",
            k + i
        )));
    }
    Ok(k)
}

/// `P_i (n - i) + Σ_{j≥i+1} P_j (n - i/p)` for `i = 0..=n`.
pub fn lemma2_terms<S: Scalar>(n: usize, p: &S) -> Result<Vec<S>> {
    let probs = level_probabilities(n, p)?;
    let tails = upper_tails(&probs);
    Ok((0..=n)
        .map(|i| {
            let ni = S::from_count(n);
            let ii = S::from_count(i);
            probs[i].clone() * (ni.clone() - ii.clone()) + tails[i].clone() * (ni - ii / p.clone())
        })
        .collect())
}

/// `(n - i)·P_i / Σ_{j>i} P_j` for `i = 0..n`.
pub fn threshold_ratios<S: Scalar>(n: usize, p: &S) -> Result<Vec<S>> {
    let probs = level_probabilities(n, p)?;
    let tails = upper_tails(&probs);
    Ok((0..n).map(|i| S::from_count(n - i) * probs[i].clone() / tails[i].clone()).collect())
}

pub fn solve_iid2<S: Scalar>(inst: &Iid2Instance<S>) -> Result<Iid2Solution<S>> {
    let n = inst.n;
    let level_probs = level_probabilities(n, &inst.p)?;
    if inst.a.is_zero() {
        // Low buyers pay nothing anyway; each item sells alone at b.
        return Ok(Iid2Solution {
            k: n,
            bundle_price: S::from_count(n) * inst.b.clone(),
            item_price: inst.b.clone(),
            revenue: S::from_count(n) * inst.b.clone() * inst.p.clone(),
            level_probs,
        });
    }
    let b = inst.b.clone() / inst.a.clone();
    let k = find_k(n, &b, &inst.p)?;
    let kk = S::from_count(k);
    let bundle = kk.clone() * b.clone() + S::from_count(n - k);
    let mut revenue = S::zero();
    for (i, pi) in level_probs.iter().enumerate() {
        if i < k {
            revenue = revenue + b.clone() * S::from_count(i) * pi.clone();
        } else {
            revenue = revenue + bundle.clone() * pi.clone();
        }
    }
    Ok(Iid2Solution {
        k,
        bundle_price: bundle * inst.a.clone(),
        item_price: inst.b.clone(),
        revenue: revenue * inst.a.clone(),
        level_probs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::limits::Limits;
    use crate::market::{buyer_choice, enumerate_valuations, expected_revenue, Bundle};
    use crate::Rational;
    use num_traits::{One, Signed, Zero};
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn int(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    #[test]
    fn level_probability_examples() {
        assert_eq!(level_probabilities(1, &q(1, 2)).unwrap(), vec![q(1, 2), q(1, 2)]);
        assert_eq!(level_probabilities(2, &q(1, 2)).unwrap(), vec![q(1, 4), q(1, 2), q(1, 4)]);
        assert_eq!(
            level_probabilities(3, &q(1, 3)).unwrap(),
            vec![q(8, 27), q(12, 27), q(6, 27), q(1, 27)]
        );
    }

    #[test]
    fn find_k_examples() {
        assert_eq!(find_k(1, &int(2), &q(1, 2)).unwrap(), 0);
        assert_eq!(find_k(2, &int(2), &q(1, 2)).unwrap(), 1);
        assert_eq!(find_k(1, &int(3), &q(1, 2)).unwrap(), 1);
        assert_eq!(threshold_expressions(2, &int(2), &q(1, 2)).unwrap()[..2], [q(-1, 4), q(1, 4)]);
    }

    #[test]
    fn solve_examples() {
        let s = solve_iid2(&Iid2Instance::new(2, int(1), int(2), q(1, 2)).unwrap()).unwrap();
        assert_eq!((s.k, s.bundle_price.clone(), s.item_price.clone(), s.revenue.clone()), (1, int(3), int(2), q(9, 4)));

        let s = solve_iid2(&Iid2Instance::new(1, int(0), int(5), q(1, 3)).unwrap()).unwrap();
        assert_eq!((s.item_price, s.revenue), (int(5), q(5, 3)));

        let s = solve_iid2(&Iid2Instance::new(2, int(2), int(4), q(1, 2)).unwrap()).unwrap();
        assert_eq!((s.k, s.bundle_price, s.item_price, s.revenue), (1, int(6), int(4), q(9, 2)));
    }

    #[test]
    fn rejects_bad_instances() {
        assert!(Iid2Instance::new(2, int(2), int(2), q(1, 2)).is_err());
        assert!(Iid2Instance::new(2, int(1), int(2), int(1)).is_err());
        assert!(Iid2Instance::new(0, int(1), int(2), q(1, 2)).is_err());
    }

    fn instance() -> impl Strategy<Value = Iid2Instance<Rational>> {
        (1usize..=6, 0i64..4, 1i64..8, 1i64..4, 1i64..12).prop_map(|(n, a, gap, den, pn)| {
            let a = int(a);
            let b = a.clone() + q(gap, den);
            let p = q(pn, 13);
            Iid2Instance::new(n, a, b, p).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn menu_revenue_matches_closed_form(inst in instance()) {
            let s = solve_iid2(&inst).unwrap();
            let menu = s.menu(inst.n).unwrap();
            let dist = inst.distribution().unwrap();
            prop_assert_eq!(expected_revenue(&menu, &dist, &Limits::default()).unwrap(), s.revenue);
        }

        #[test]
        fn level_probabilities_sum_to_one(n in 1usize..=12, pn in 1i64..20) {
            let probs = level_probabilities(n, &q(pn, 20)).unwrap();
            prop_assert!(probs.iter().fold(Rational::zero(), |a, b| a + b).is_one());
        }

        #[test]
        fn lemma2_is_positive(n in 2usize..=12, pn in 1i64..20) {
            let terms = lemma2_terms(n, &q(pn, 20)).unwrap();
            for i in 1..n {
                prop_assert!(terms[i].is_positive(), "i={} value={}", i, terms[i]);
            }
        }

        #[test]
        fn ratio_strictly_increases(n in 2usize..=12, pn in 1i64..20) {
            let r = threshold_ratios(n, &q(pn, 20)).unwrap();
            for w in r.windows(2) {
                prop_assert!(w[0] < w[1]);
            }
        }

        #[test]
        fn grand_bundle_bought_from_level_k(inst in instance()) {
            prop_assume!(inst.a.is_positive());
            let s = solve_iid2(&inst).unwrap();
            let menu = s.menu(inst.n).unwrap();
            let grand = Bundle::grand(inst.n);
            for (v, _) in enumerate_valuations(&inst.distribution().unwrap(), &Limits::default()).unwrap() {
                let highs = v.0.iter().filter(|x| **x == inst.b).count();
                let choice = buyer_choice(&menu, &v);
                let bought_grand = choice.chosen.is_some_and(|c| menu.entries()[c].bundle == grand);
                prop_assert_eq!(bought_grand, highs >= s.k, "highs={} k={}", highs, s.k);
            }
        }
    }
}
