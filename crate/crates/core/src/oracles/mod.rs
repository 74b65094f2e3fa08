//! Ground-truth optima on tiny instances.
//!
//! A deterministic mechanism is an allocation map (one bundle per valuation)
//! together with utilities. For a fixed allocation map the revenue-maximizing
//! utilities are the pointwise-least solution of the difference constraints
//!
//! ```text
//! u_w >= u_v + Σ_i (w_i - v_i) · x_{v,i}      (w does not envy v)
//! u_v >= 0                                      (individual rationality)
//! ```
//!
//! i.e. longest paths from a virtual zero-utility source. A positive cycle
//! means the allocation map cannot be implemented.

mod drev;
mod standard_lp;
mod symmetric;

pub use drev::{drev_bruteforce, DrevResult};
pub use standard_lp::rev_lp;
pub use symmetric::{symmetric_rev_lp, SymmetricLpSolution};

use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::market::{enumerate_valuations, Bundle, Menu, MenuEntry, ProductDistribution, Valuation};
use crate::scalar::Scalar;

/// The bundle allocated at each valuation, in the order of
/// [`enumerate_valuations`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AllocationMap(pub Vec<Bundle>);

/// One utility per valuation, in grid order.
#[derive(Debug, Clone, PartialEq)]
pub struct UtilityAssignment<S>(pub Vec<S>);

#[derive(Debug, Clone, PartialEq)]
pub enum MinUtilities<S> {
    Feasible(UtilityAssignment<S>),
    Infeasible,
}

/// Weight of the edge `from -> to`: what `to` gains by taking `from`'s bundle.
pub(crate) fn envy_weight<S: Scalar>(from: &Valuation<S>, to: &Valuation<S>, bundle: Bundle) -> S {
    bundle
        .items()
        .fold(S::zero(), |acc, i| acc + to.0[i].clone() - from.0[i].clone())
}

/// Least feasible utilities over an explicit grid, `None` on a positive cycle.
pub fn least_utilities<S: Scalar>(grid: &[Valuation<S>], alloc: &[Bundle]) -> Option<Vec<S>> {
    let d = grid.len();
    assert_eq!(d, alloc.len(), "allocation map must cover the grid");
    let weights: Vec<Vec<S>> = (0..d)
        .map(|v| (0..d).map(|w| envy_weight(&grid[v], &grid[w], alloc[v])).collect())
        .collect();
    let mut u = vec![S::zero(); d];
    // With the zero source folded into the start values, d - 1 rounds settle
    // every simple path; a change in round d exposes a positive cycle.
    for _round in 0..d {
        let mut changed = false;
        for v in 0..d {
            for w in 0..d {
                if v == w {
                    continue;
                }
                let candidate = u[v].clone() + weights[v][w].clone();
                if candidate > u[w] {
                    u[w] = candidate;
                    changed = true;
                }
            }
        }
        if !changed {
            return Some(u);
        }
    }
    None
}

pub fn min_utilities<S: Scalar>(
    dist: &ProductDistribution<S>,
    alloc: &AllocationMap,
    limits: &Limits,
) -> Result<MinUtilities<S>> {
    let grid: Vec<Valuation<S>> = enumerate_valuations(dist, limits)?.into_iter().map(|(v, _)| v).collect();
    if alloc.0.len() != grid.len() {
        return Err(Error::invalid(format!(
            "allocation map has {} entries for a grid of {}",
            alloc.0.len(),
            grid.len()
        )));
    }
    let n = dist.num_items();
    if let Some(b) = alloc.0.iter().find(|b| b.span() > n) {
        return Err(Error::invalid(format!("bundle {b} exceeds {n} items")));
    }
    Ok(match least_utilities(&grid, &alloc.0) {
        Some(u) => MinUtilities::Feasible(UtilityAssignment(u)),
        None => MinUtilities::Infeasible,
    })
}

/// `π_v = Σ_{i ∈ x_v} v_i - u_v` for each valuation.
pub fn mechanism_prices<S: Scalar>(grid: &[Valuation<S>], alloc: &AllocationMap, utilities: &UtilityAssignment<S>) -> Vec<S> {
    grid.iter()
        .zip(&alloc.0)
        .zip(&utilities.0)
        .map(|((v, &b), u)| v.bundle_value(b) - u.clone())
        .collect()
}

/// The menu of offered (bundle, price) pairs, if every nonempty allocation
/// charges a nonnegative price and every empty allocation charges zero.
pub fn mechanism_menu<S: Scalar>(
    grid: &[Valuation<S>],
    alloc: &AllocationMap,
    utilities: &UtilityAssignment<S>,
) -> Option<Menu<S>> {
    let prices = mechanism_prices(grid, alloc, utilities);
    let mut entries = Vec::new();
    for (&bundle, price) in alloc.0.iter().zip(prices) {
        if bundle.is_empty() {
            if !price.is_zero() {
                return None;
            }
            continue;
        }
        if price.is_negative() {
            return None;
        }
        entries.push(MenuEntry { bundle, price });
    }
    Menu::new(entries).ok()
}
