//! The pricing instance built from a counting instance.
//!
//! Items `0..n` take values `{1, h_i + 1}` with high probability `p`; the
//! special last item takes `{σ, σ + α}` with high probability `τ - ε`.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::comp::{CompInstance, CompStarInstance};
use crate::error::{Error, Result};
use crate::iid2::level_probabilities;
use crate::market::{ItemDistribution, ProductDistribution};
use crate::scalar::two_pow;
use crate::Rational;

#[derive(Debug, Clone, PartialEq)]
pub struct HardInstance {
    pub source: CompInstance,
    /// Threshold used to choose `ε`.
    pub t: BigInt,
    /// Whether `source` satisfies both structural conditions.
    pub conditions_hold: bool,
    pub n: usize,
    /// `2^{2n}`.
    pub h: Rational,
    /// `1 / (2(h + 1))`.
    pub p: Rational,
    /// `2^{-3n}`.
    pub delta: Rational,
    /// `b_i · δ`.
    pub a: Vec<Rational>,
    /// `h + a_i`.
    pub h_items: Vec<Rational>,
    /// `w · δ`.
    pub c: Rational,
    /// `(n/2) h + c`.
    pub alpha: Rational,
    /// `p^{-n}`.
    pub sigma: Rational,
    /// `σ / (σ + α)`.
    pub tau: Rational,
    pub epsilon: Rational,
    /// `(n+σ+α)(1 - Pr[more than n/2 high]) - Σ_i (h_i+1) p`.
    pub a_prime: Rational,
    /// `(n+σ+α) τ + (1-τ) Σ_i (h_i+1) p`.
    pub rev_b_term: Rational,
    /// `(n+σ+α)(1-τ) p^{n/2} (1-p)^{n/2}`.
    pub c_prime: Rational,
}

fn rat(x: &BigInt) -> Rational {
    Rational::from_integer(x.clone())
}

/// Builds the instance for an input satisfying the structural conditions.
pub fn build_hard_instance(inst: &CompStarInstance, t: &BigInt) -> Result<HardInstance> {
    build_hard_instance_unchecked(inst.inner(), t)
}

/// Builds the instance for any valid counting input. The structural
/// conditions are only reported in [`HardInstance::conditions_hold`].
pub fn build_hard_instance_unchecked(inst: &CompInstance, t: &BigInt) -> Result<HardInstance> {
    let n = inst.n();
    if *t < BigInt::one() || *t > BigInt::one() << n {
        return Err(Error::invalid(format!("t = {t} must lie in [1, 2^{n}]")));
    }
    let (c1, c2) = inst.conditions();
    let one = Rational::one();
    let nn = Rational::from_integer(n.into());
    let half = n / 2;

    let h = two_pow(2 * n as u32);
    let p = one.clone() / (Rational::from_integer(2.into()) * (h.clone() + one.clone()));
    let delta = one.clone() / two_pow(3 * n as u32);
    let a: Vec<Rational> = inst.b().iter().map(|b| rat(b) * delta.clone()).collect();
    let h_items: Vec<Rational> = a.iter().map(|ai| h.clone() + ai.clone()).collect();
    let c = rat(&inst.target()) * delta.clone();
    let alpha = Rational::from_integer(half.into()) * h.clone() + c.clone();
    let sigma = one.clone() / num_traits::pow(p.clone(), n);
    let tau = sigma.clone() / (sigma.clone() + alpha.clone());

    let levels = level_probabilities(n, &p)?;
    let above_half: Rational = levels[half + 1..].iter().cloned().sum();
    let high_sum: Rational = h_items.iter().map(|hi| (hi.clone() + one.clone()) * p.clone()).sum();
    let scale = nn.clone() + sigma.clone() + alpha.clone();
    let half_point = num_traits::pow(p.clone(), half) * num_traits::pow(one.clone() - p.clone(), half);

    let a_prime = scale.clone() * (one.clone() - above_half) - high_sum.clone();
    let rev_b_term = scale.clone() * tau.clone() + (one.clone() - tau.clone()) * high_sum;
    let c_prime = scale * (one.clone() - tau.clone()) * half_point;
    let a_sum: Rational = a.iter().cloned().sum();
    let epsilon = (c_prime.clone() * (rat(t) - Rational::new(1.into(), 2.into()))
        - alpha.clone() * nn / (Rational::from_integer(2.into()) * (sigma.clone() + alpha.clone()))
        + (one.clone() - tau.clone()) * p.clone() * a_sum)
        / a_prime.clone();

    let high = tau.clone() - epsilon.clone();
    if !high.is_positive() || high >= one {
        return Err(Error::Infeasible(format!("special-item probability {high} is outside (0, 1)")));
    }
    if a_prime.is_zero() {
        return Err(Error::Consistency("A' vanished".into()));
    }
    Ok(HardInstance {
        source: inst.clone(),
        t: t.clone(),
        conditions_hold: c1 && c2,
        n,
        h,
        p,
        delta,
        a,
        h_items,
        c,
        alpha,
        sigma,
        tau,
        epsilon,
        a_prime,
        rev_b_term,
        c_prime,
    })
}

impl HardInstance {
    /// Probability of the special item's high value, `τ - ε`.
    pub fn special_high_prob(&self) -> Rational {
        self.tau.clone() - self.epsilon.clone()
    }

    /// The `n + 1` item product distribution.
    pub fn distribution(&self) -> Result<ProductDistribution<Rational>> {
        let one = Rational::one();
        let mut items: Vec<ItemDistribution<Rational>> = self
            .h_items
            .iter()
            .map(|hi| ItemDistribution::two_point(one.clone(), hi.clone() + one.clone(), self.p.clone()))
            .collect::<Result<_>>()?;
        items.push(ItemDistribution::two_point(
            self.sigma.clone(),
            self.sigma.clone() + self.alpha.clone(),
            self.special_high_prob(),
        )?);
        ProductDistribution::new(items)
    }
}
