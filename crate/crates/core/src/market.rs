//! Product distributions, menus and the deterministic buyer.
//!
//! The buyer is additive: a bundle is worth the sum of its item values. Given
//! a menu the buyer takes an entry of maximal nonnegative utility; ties go to
//! the higher price, then to the smaller entry index. Buying nothing is the
//! absence of a choice, never a menu entry.

use std::collections::HashMap;
use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::scalar::Scalar;

/// Items are stored as bits of a `u32`, so at most this many items.
pub const MAX_ITEMS: usize = 31;

/// A subset of items, bit `i` standing for item `i` (0-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Bundle(pub u32);

impl Bundle {
    pub const EMPTY: Bundle = Bundle(0);

    pub fn grand(n: usize) -> Bundle {
        assert!(n <= MAX_ITEMS);
        Bundle(((1u64 << n) - 1) as u32)
    }

    pub fn single(item: usize) -> Bundle {
        Bundle(1 << item)
    }

    pub fn contains(self, item: usize) -> bool {
        self.0 >> item & 1 == 1
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn items(self) -> impl Iterator<Item = usize> {
        (0..32).filter(move |&i| self.contains(i))
    }

    /// Index one past the highest item, 0 for the empty bundle.
    pub fn span(self) -> usize {
        32 - self.0.leading_zeros() as usize
    }

    pub fn union(self, other: Bundle) -> Bundle {
        Bundle(self.0 | other.0)
    }

    /// Item list in the 1-based convention of the file formats.
    pub fn to_one_based(self) -> Vec<usize> {
        self.items().map(|i| i + 1).collect()
    }

    pub fn from_one_based(items: &[usize]) -> Result<Bundle> {
        let mut mask = 0u32;
        for &i in items {
            if i == 0 || i > MAX_ITEMS {
                return Err(Error::invalid(format!("item index {i} outside 1..={MAX_ITEMS}")));
            }
            mask |= 1 << (i - 1);
        }
        Ok(Bundle(mask))
    }

    /// All nonempty subsets of `n` items in increasing mask order.
    pub fn all_nonempty(n: usize) -> impl Iterator<Item = Bundle> {
        (1..=Bundle::grand(n).0).map(Bundle)
    }
}

impl fmt::Display for Bundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.to_one_based().iter().map(|i| i.to_string()).collect();
        write!(f, "{{{}}}", items.join(","))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SupportPoint<S> {
    pub value: S,
    pub prob: S,
}

/// A discrete distribution of one item's value.
#[derive(Debug, Clone, PartialEq)]
pub struct ItemDistribution<S> {
    support: Vec<SupportPoint<S>>,
}

impl<S: Scalar> ItemDistribution<S> {
    /// Values must be nonnegative and strictly increasing; probabilities in
    /// `(0, 1]` and summing to exactly one.
    pub fn new(support: Vec<SupportPoint<S>>) -> Result<Self> {
        if support.is_empty() {
            return Err(Error::invalid("item distribution with empty support"));
        }
        let mut total = S::zero();
        for (i, pt) in support.iter().enumerate() {
            if pt.value.is_negative() {
                return Err(Error::invalid(format!("negative support value {}", pt.value)));
            }
            if !pt.prob.is_positive() || pt.prob > S::one() {
                return Err(Error::invalid(format!("probability {} outside (0,1]", pt.prob)));
            }
            if i > 0 && support[i - 1].value >= pt.value {
                return Err(Error::invalid(format!(
                    "support values not strictly increasing at {}",
                    pt.value
                )));
            }
            total = total + pt.prob.clone();
        }
        if total != S::one() {
            return Err(Error::invalid(format!("probabilities sum to {total}, not 1")));
        }
        Ok(ItemDistribution { support })
    }

    pub fn from_pairs(pairs: Vec<(S, S)>) -> Result<Self> {
        Self::new(pairs.into_iter().map(|(value, prob)| SupportPoint { value, prob }).collect())
    }

    /// Two-point distribution: `low` with probability `1 - p_high`, `high` with `p_high`.
    pub fn two_point(low: S, high: S, p_high: S) -> Result<Self> {
        Self::from_pairs(vec![(low, S::one() - p_high.clone()), (high, p_high)])
    }

    pub fn support(&self) -> &[SupportPoint<S>] {
        &self.support
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    /// `Pr[value >= threshold]`.
    pub fn tail(&self, threshold: &S) -> S {
        self.support
            .iter()
            .filter(|pt| pt.value >= *threshold)
            .fold(S::zero(), |acc, pt| acc + pt.prob.clone())
    }
}

/// Independent item distributions `F_1 x ... x F_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductDistribution<S> {
    items: Vec<ItemDistribution<S>>,
}

impl<S: Scalar> ProductDistribution<S> {
    pub fn new(items: Vec<ItemDistribution<S>>) -> Result<Self> {
        if items.is_empty() {
            return Err(Error::invalid("a distribution needs at least one item"));
        }
        if items.len() > MAX_ITEMS {
            return Err(Error::invalid(format!("{} items exceed the limit {MAX_ITEMS}", items.len())));
        }
        Ok(ProductDistribution { items })
    }

    pub fn iid(n: usize, item: ItemDistribution<S>) -> Result<Self> {
        Self::new(vec![item; n])
    }

    pub fn num_items(&self) -> usize {
        self.items.len()
    }

    pub fn items(&self) -> &[ItemDistribution<S>] {
        &self.items
    }

    /// Number of valuation vectors, `None` on overflow.
    pub fn grid_size(&self) -> Option<usize> {
        self.items.iter().try_fold(1usize, |acc, it| acc.checked_mul(it.len()))
    }

    pub fn check_grid(&self, limits: &Limits) -> Result<usize> {
        match self.grid_size() {
            Some(g) if g <= limits.max_grid => Ok(g),
            Some(g) => Err(Error::budget("valuation grid", g, limits.max_grid)),
            None => Err(Error::budget("valuation grid", "more than usize::MAX", limits.max_grid)),
        }
    }

    /// Multiplies every support value by `factor`.
    pub fn scaled(&self, factor: &S) -> Result<Self> {
        let items = self
            .items
            .iter()
            .map(|it| {
                ItemDistribution::new(
                    it.support
                        .iter()
                        .map(|pt| SupportPoint {
                            value: pt.value.clone() * factor.clone(),
                            prob: pt.prob.clone(),
                        })
                        .collect(),
                )
            })
            .collect::<Result<_>>()?;
        Self::new(items)
    }
}

/// One value per item.
#[derive(Debug, Clone, PartialEq)]
pub struct Valuation<S>(pub Vec<S>);

impl<S: Scalar> Valuation<S> {
    pub fn values(&self) -> &[S] {
        &self.0
    }

    pub fn bundle_value(&self, bundle: Bundle) -> S {
        bundle.items().fold(S::zero(), |acc, i| acc + self.0[i].clone())
    }

    pub fn total(&self) -> S {
        self.0.iter().fold(S::zero(), |acc, v| acc + v.clone())
    }
}

/// Every valuation vector with its probability, last item varying fastest.
pub fn enumerate_valuations<S: Scalar>(
    dist: &ProductDistribution<S>,
    limits: &Limits,
) -> Result<Vec<(Valuation<S>, S)>> {
    let size = dist.check_grid(limits)?;
    let n = dist.num_items();
    let mut out = Vec::with_capacity(size);
    let mut idx = vec![0usize; n];
    loop {
        let mut values = Vec::with_capacity(n);
        let mut prob = S::one();
        for (item, &k) in dist.items.iter().zip(&idx) {
            let pt = &item.support[k];
            values.push(pt.value.clone());
            prob = prob * pt.prob.clone();
        }
        out.push((Valuation(values), prob));

        let mut pos = n;
        loop {
            if pos == 0 {
                return Ok(out);
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < dist.items[pos].len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MenuEntry<S> {
    pub bundle: Bundle,
    pub price: S,
}

/// An explicit list of (bundle, price) offers.
#[derive(Debug, Clone, PartialEq)]
pub struct Menu<S> {
    entries: Vec<MenuEntry<S>>,
}

impl<S: Scalar> Menu<S> {
    pub fn empty() -> Self {
        Menu { entries: Vec::new() }
    }

    /// Rejects empty bundles and negative prices; drops repeated
    /// (bundle, price) pairs, keeping the first occurrence.
    pub fn new(entries: Vec<MenuEntry<S>>) -> Result<Self> {
        let mut by_bundle: HashMap<Bundle, Vec<usize>> = HashMap::new();
        let mut kept: Vec<MenuEntry<S>> = Vec::with_capacity(entries.len());
        for e in entries {
            if e.bundle.is_empty() {
                return Err(Error::invalid("menu entry with an empty bundle"));
            }
            if e.price.is_negative() {
                return Err(Error::invalid(format!("negative price {} for {}", e.price, e.bundle)));
            }
            let slot = by_bundle.entry(e.bundle).or_default();
            if slot.iter().any(|&k| kept[k].price == e.price) {
                continue;
            }
            slot.push(kept.len());
            kept.push(e);
        }
        Ok(Menu { entries: kept })
    }

    pub fn from_pairs(pairs: Vec<(Bundle, S)>) -> Result<Self> {
        Self::new(pairs.into_iter().map(|(bundle, price)| MenuEntry { bundle, price }).collect())
    }

    pub fn entries(&self) -> &[MenuEntry<S>] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Smallest item count covering every bundle on the menu.
    pub fn min_items(&self) -> usize {
        self.entries.iter().map(|e| e.bundle.span()).max().unwrap_or(0)
    }

    pub fn check_items(&self, n: usize) -> Result<()> {
        let need = self.min_items();
        if need > n {
            return Err(Error::invalid(format!(
                "menu refers to item {need} but the distribution has {n} items"
            )));
        }
        Ok(())
    }

    /// Multiplies every price by `factor`.
    pub fn scaled(&self, factor: &S) -> Result<Self> {
        Self::new(
            self.entries
                .iter()
                .map(|e| MenuEntry { bundle: e.bundle, price: e.price.clone() * factor.clone() })
                .collect(),
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BuyerChoice<S> {
    /// Index into the menu entries, `None` when nothing is bought.
    pub chosen: Option<usize>,
    pub utility: S,
    pub price_paid: S,
}

/// The buyer's pick for valuation `v`. Every bundle must lie within `v`'s items.
pub fn buyer_choice<S: Scalar>(menu: &Menu<S>, v: &Valuation<S>) -> BuyerChoice<S> {
    let mut best: Option<(usize, S)> = None;
    for (k, e) in menu.entries.iter().enumerate() {
        let u = v.bundle_value(e.bundle) - e.price.clone();
        if u.is_negative() {
            continue;
        }
        let better = match &best {
            None => true,
            Some((bk, bu)) => u > *bu || (u == *bu && e.price > menu.entries[*bk].price),
        };
        if better {
            best = Some((k, u));
        }
    }
    match best {
        Some((k, utility)) => BuyerChoice {
            chosen: Some(k),
            utility,
            price_paid: menu.entries[k].price.clone(),
        },
        None => BuyerChoice { chosen: None, utility: S::zero(), price_paid: S::zero() },
    }
}

/// `Σ_v Pr[v] · price paid at v`, exactly.
pub fn expected_revenue<S: Scalar>(
    menu: &Menu<S>,
    dist: &ProductDistribution<S>,
    limits: &Limits,
) -> Result<S> {
    menu.check_items(dist.num_items())?;
    let grid = enumerate_valuations(dist, limits)?;
    Ok(grid
        .par_iter()
        .map(|(v, pr)| buyer_choice(menu, v).price_paid * pr.clone())
        .reduce(S::zero, |a, b| a + b))
}

/// Every nonempty subset at the sum of its item prices.
pub fn item_pricing_menu<S: Scalar>(item_prices: &[S]) -> Result<Menu<S>> {
    let n = item_prices.len();
    if n == 0 || n > MAX_ITEMS {
        return Err(Error::invalid(format!("item pricing needs 1..={MAX_ITEMS} items, got {n}")));
    }
    Menu::new(
        Bundle::all_nonempty(n)
            .map(|b| MenuEntry {
                bundle: b,
                price: b.items().fold(S::zero(), |acc, i| acc + item_prices[i].clone()),
            })
            .collect(),
    )
}

/// Item pricing plus one extra offer of the grand bundle at `bundle_price`.
pub fn discounted_item_pricing_menu<S: Scalar>(item_prices: &[S], bundle_price: S) -> Result<Menu<S>> {
    let mut entries = item_pricing_menu(item_prices)?.entries;
    entries.push(MenuEntry { bundle: Bundle::grand(item_prices.len()), price: bundle_price });
    Menu::new(entries)
}

pub fn grand_bundle_menu<S: Scalar>(n: usize, price: S) -> Result<Menu<S>> {
    if n == 0 || n > MAX_ITEMS {
        return Err(Error::invalid(format!("grand bundle needs 1..={MAX_ITEMS} items, got {n}")));
    }
    Menu::from_pairs(vec![(Bundle::grand(n), price)])
}
