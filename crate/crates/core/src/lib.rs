//! Exact revenue-optimal bundle pricing for one additive buyer over discrete
//! product distributions.
//!
//! Every solver is generic over a [`Scalar`] ordered field; the aliases below
//! fix it to arbitrary-precision rationals, which is how the oracles and the
//! command line use it.

pub mod baselines;
pub mod constk;
mod error;
pub mod formats;
pub mod hardness;
pub mod iid2;
mod limits;
pub mod linsys;
pub mod lp;
pub mod market;
pub mod oracles;
pub mod scalar;

pub use error::{Error, Result};
pub use limits::Limits;
pub use scalar::Scalar;

pub type Rational = num_rational::BigRational;

pub type ExactItemDistribution = market::ItemDistribution<Rational>;
pub type ExactDistribution = market::ProductDistribution<Rational>;
pub type ExactValuation = market::Valuation<Rational>;
pub type ExactMenu = market::Menu<Rational>;
pub type ExactLp = lp::LinearProgram<Rational>;
pub type ExactPricing = baselines::PricingResult<Rational>;
pub type ExactIid2Instance = iid2::Iid2Instance<Rational>;
pub type ExactIid2Solution = iid2::Iid2Solution<Rational>;
pub type ExactConstkResult = constk::ConstkResult<Rational>;
pub type ExactDrevResult = oracles::DrevResult<Rational>;
