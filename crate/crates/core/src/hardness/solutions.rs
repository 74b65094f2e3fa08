//! The two candidate menus for a hard instance and their exact revenues.

use num_bigint::BigInt;
use num_integer::binomial;
use num_traits::{One, Zero};

use super::comp::count_with;
use super::instance::HardInstance;
use crate::error::Result;
use crate::limits::Limits;
use crate::market::{discounted_item_pricing_menu, grand_bundle_menu, Menu};
use crate::Rational;

#[derive(Debug, Clone, PartialEq)]
pub struct SolutionPair {
    pub rev1: Rational,
    pub rev2: Rational,
    /// Grand bundle at `σ + n`.
    pub sol1_menu: Menu<Rational>,
    /// Items at their high values, grand bundle at `σ + α + n`.
    pub sol2_menu: Menu<Rational>,
    pub t_star: u128,
    pub a_prime: Rational,
    pub rev_b_term: Rational,
    pub c_prime: Rational,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Winner {
    Solution1,
    Solution2,
    /// Both revenues coincide exactly.
    Tie,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub winner: Winner,
    /// `rev2 - rev1 - C'(t* - t + 1/2)`.
    pub residual: Rational,
    /// Whether `|residual| < C'/2`.
    pub residual_within_bound: bool,
}

pub fn build_solutions(hi: &HardInstance, limits: &Limits) -> Result<SolutionPair> {
    let n = hi.n;
    let half = n / 2;
    let one = Rational::one();
    let nn = Rational::from_integer(n.into());

    let sol1_menu = grand_bundle_menu(n + 1, hi.sigma.clone() + nn.clone())?;
    let mut prices: Vec<Rational> = hi.h_items.iter().map(|x| x.clone() + one.clone()).collect();
    prices.push(hi.sigma.clone() + hi.alpha.clone());
    let sol2_menu = discounted_item_pricing_menu(&prices, hi.sigma.clone() + hi.alpha.clone() + nn.clone())?;

    let high_values: Vec<Rational> = prices[..n].to_vec();
    let (t_star, short_sums) = count_with(&hi.source, limits, |mask| {
        (0..n).filter(|i| mask >> i & 1 == 1).map(|i| high_values[i].clone()).sum::<Rational>()
    })?;

    let p = &hi.p;
    let q = one.clone() - p.clone();
    let set_prob = |l: usize| num_traits::pow(p.clone(), l) * num_traits::pow(q.clone(), n - l);
    let total_high: Rational = high_values.iter().cloned().sum();
    // Below level n/2 every set falls short; each item lies in C(n-1, l-1) of them.
    let mut r_sum = Rational::zero();
    for l in 1..half {
        let sets = Rational::from_integer(BigInt::from(binomial(n as u128 - 1, l as u128 - 1)));
        r_sum += set_prob(l) * sets * total_high.clone();
    }
    r_sum += set_prob(half) * short_sums.into_iter().sum::<Rational>();

    let above_half: Rational = (half + 1..=n)
        .map(|l| Rational::from_integer(BigInt::from(binomial(n as u128, l as u128))) * set_prob(l))
        .sum();
    let low = one.clone() - hi.tau.clone() + hi.epsilon.clone();
    let scale = nn.clone() + hi.sigma.clone() + hi.alpha.clone();
    let grand_share = hi.special_high_prob()
        + low.clone() * (above_half + Rational::from_integer(BigInt::from(t_star)) * set_prob(half));
    let rev2 = scale * grand_share + low * r_sum;

    Ok(SolutionPair {
        rev1: nn + hi.sigma.clone(),
        rev2,
        sol1_menu,
        sol2_menu,
        t_star,
        a_prime: hi.a_prime.clone(),
        rev_b_term: hi.rev_b_term.clone(),
        c_prime: hi.c_prime.clone(),
    })
}

pub fn decide_winner(sp: &SolutionPair, t: &BigInt) -> Verdict {
    let winner = if sp.rev2 > sp.rev1 {
        Winner::Solution2
    } else if sp.rev2 < sp.rev1 {
        Winner::Solution1
    } else {
        Winner::Tie
    };
    let gap = Rational::from_integer(BigInt::from(sp.t_star) - t) + Rational::new(1.into(), 2.into());
    let residual = sp.rev2.clone() - sp.rev1.clone() - sp.c_prime.clone() * gap;
    let bound = sp.c_prime.clone() / Rational::from_integer(2.into());
    let residual_within_bound = num_traits::Signed::abs(&residual) < bound;
    Verdict { winner, residual, residual_within_bound }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hardness::{build_hard_instance_unchecked, CompInstance};
    use crate::market::expected_revenue;

    fn hard(b: &[i64], w: &[usize], t: i64) -> HardInstance {
        let src = CompInstance::new(b.iter().map(|&x| x.into()).collect(), w.to_vec(), t.into()).unwrap();
        build_hard_instance_unchecked(&src, &t.into()).unwrap()
    }

    #[test]
    fn rev1_for_two_items() {
        let sp = build_solutions(&hard(&[1, 2], &[1], 1), &Limits::default()).unwrap();
        assert_eq!(sp.rev1, Rational::from_integer(1158.into()));
        assert_eq!(sp.t_star, 1);
    }

    #[test]
    fn closed_forms_match_menus() {
        let lim = Limits::default();
        for (b, w, t) in [(&[1, 2][..], &[1][..], 1), (&[0, 3], &[0], 2), (&[1, 2, 3, 4], &[0, 3], 4), (&[0, 5, 9, 16], &[1, 2], 3)] {
            let hi = hard(b, w, t);
            let sp = build_solutions(&hi, &lim).unwrap();
            let d = hi.distribution().unwrap();
            assert_eq!(expected_revenue(&sp.sol1_menu, &d, &lim).unwrap(), sp.rev1);
            assert_eq!(expected_revenue(&sp.sol2_menu, &d, &lim).unwrap(), sp.rev2);
        }
    }

    #[test]
    fn winner_follows_revenues() {
        let hi = hard(&[1, 2, 3, 4], &[0, 3], 4);
        let sp = build_solutions(&hi, &Limits::default()).unwrap();
        let v = decide_winner(&sp, &hi.t);
        assert_eq!(v.winner == Winner::Solution2, sp.rev2 > sp.rev1);
    }
}
