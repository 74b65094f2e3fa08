//! Optimal separate item pricing and optimal grand-bundle pricing.

use std::cmp::Ordering;

use crate::error::Result;
use crate::limits::Limits;
use crate::market::{grand_bundle_menu, item_pricing_menu, Menu, ProductDistribution};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct PricingResult<S> {
    pub revenue: S,
    /// One price per item for SRev, a single bundle price for BRev.
    pub prices: Vec<S>,
}

/// Best posted price over a finite list of candidates against the sorted
/// `(value, prob)` pairs. The smallest maximizing candidate wins.
fn best_posted_price<S: Scalar>(points: &[(S, S)]) -> (S, S) {
    // π · Pr[X >= π] is increasing between attainable values, so only those are tried.
    let mut tail = points.iter().fold(S::zero(), |acc, (_, p)| acc + p.clone());
    let mut best: Option<(S, S)> = None;
    for (value, prob) in points {
        let revenue = value.clone() * tail.clone();
        if best.as_ref().is_none_or(|(_, r)| revenue > *r) {
            best = Some((value.clone(), revenue));
        }
        tail = tail - prob.clone();
    }
    best.expect("nonempty support")
}

pub fn srev<S: Scalar>(dist: &ProductDistribution<S>) -> PricingResult<S> {
    let mut prices = Vec::with_capacity(dist.num_items());
    let mut revenue = S::zero();
    for item in dist.items() {
        let points: Vec<(S, S)> =
            item.support().iter().map(|pt| (pt.value.clone(), pt.prob.clone())).collect();
        let (price, rev) = best_posted_price(&points);
        prices.push(price);
        revenue = revenue + rev;
    }
    PricingResult { revenue, prices }
}

/// Distribution of the total value as sorted, merged `(sum, prob)` pairs.
pub fn total_value_distribution<S: Scalar>(dist: &ProductDistribution<S>) -> Vec<(S, S)> {
    let mut acc: Vec<(S, S)> = vec![(S::zero(), S::one())];
    for item in dist.items() {
        let mut next: Vec<(S, S)> = Vec::with_capacity(acc.len() * item.len());
        for (s, p) in &acc {
            for pt in item.support() {
                next.push((s.clone() + pt.value.clone(), p.clone() * pt.prob.clone()));
            }
        }
        next.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal));
        let mut merged: Vec<(S, S)> = Vec::with_capacity(next.len());
        for (s, p) in next {
            match merged.last_mut() {
                Some((ls, lp)) if *ls == s => *lp = lp.clone() + p,
                _ => merged.push((s, p)),
            }
        }
        acc = merged;
    }
    acc
}

pub fn brev<S: Scalar>(dist: &ProductDistribution<S>, limits: &Limits) -> Result<PricingResult<S>> {
    dist.check_grid(limits)?;
    let sums = total_value_distribution(dist);
    let (price, revenue) = best_posted_price(&sums);
    Ok(PricingResult { revenue, prices: vec![price] })
}

/// The menu realizing an SRev result.
pub fn srev_menu<S: Scalar>(result: &PricingResult<S>) -> Result<Menu<S>> {
    item_pricing_menu(&result.prices)
}

/// The menu realizing a BRev result over `n` items.
pub fn brev_menu<S: Scalar>(n: usize, result: &PricingResult<S>) -> Result<Menu<S>> {
    grand_bundle_menu(n, result.prices[0].clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market::{expected_revenue, ItemDistribution};
    use crate::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn int(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    fn dist(items: Vec<Vec<(Rational, Rational)>>) -> ProductDistribution<Rational> {
        ProductDistribution::new(items.into_iter().map(|s| ItemDistribution::from_pairs(s).unwrap()).collect())
            .unwrap()
    }

    #[test]
    fn srev_examples() {
        let r = srev(&dist(vec![vec![(int(1), int(1))]]));
        assert_eq!((r.revenue, r.prices), (int(1), vec![int(1)]));

        // 1·1 = 2·(1/2): tie, the smaller price is reported.
        let r = srev(&dist(vec![vec![(int(1), q(1, 2)), (int(2), q(1, 2))]]));
        assert_eq!((r.revenue, r.prices), (int(1), vec![int(1)]));

        let r = srev(&dist(vec![vec![(int(1), q(1, 2)), (int(3), q(1, 2))]]));
        assert_eq!((r.revenue, r.prices), (q(3, 2), vec![int(3)]));
    }

    #[test]
    fn brev_examples() {
        let lim = Limits::default();
        let r = brev(&dist(vec![vec![(int(1), int(1))]]), &lim).unwrap();
        assert_eq!((r.revenue, r.prices), (int(1), vec![int(1)]));

        // Sums {2,3,4} with probabilities {1/4,1/2,1/4}: revenues 2, 9/4, 1.
        let u = vec![(int(1), q(1, 2)), (int(2), q(1, 2))];
        let r = brev(&dist(vec![u.clone(), u]), &lim).unwrap();
        assert_eq!((r.revenue, r.prices), (q(9, 4), vec![int(3)]));

        let r = brev(&dist(vec![vec![(int(0), int(1))], vec![(int(5), int(1))]]), &lim).unwrap();
        assert_eq!((r.revenue, r.prices), (int(5), vec![int(5)]));
    }

    #[test]
    fn results_match_induced_menus() {
        let lim = Limits::default();
        let d = dist(vec![
            vec![(int(1), q(1, 4)), (int(3), q(3, 4))],
            vec![(int(0), q(1, 2)), (int(2), q(1, 4)), (int(5), q(1, 4))],
        ]);
        let s = srev(&d);
        assert_eq!(expected_revenue(&srev_menu(&s).unwrap(), &d, &lim).unwrap(), s.revenue);
        let b = brev(&d, &lim).unwrap();
        assert_eq!(expected_revenue(&brev_menu(2, &b).unwrap(), &d, &lim).unwrap(), b.revenue);
    }

    #[test]
    fn brev_candidates_suffice_on_finer_grid() {
        let lim = Limits::default();
        let d = dist(vec![
            vec![(int(1), q(1, 4)), (int(3), q(3, 4))],
            vec![(int(1), q(1, 2)), (int(2), q(1, 2))],
        ]);
        let best = brev(&d, &lim).unwrap().revenue;
        // Prices on a 1/8 grid from 0 to the maximal total value.
        for k in 0..=40 {
            let price = q(k, 8);
            let rev = expected_revenue(&grand_bundle_menu(2, price).unwrap(), &d, &lim).unwrap();
            assert!(rev <= best, "price {k}/8 beats the candidate optimum");
        }
    }
}
