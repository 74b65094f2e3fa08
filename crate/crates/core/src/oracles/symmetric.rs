//! The symmetric LP for i.i.d. items on `{1, b}`.
//!
//! A symmetric lottery depends only on the level `ℓ` (number of high items).
//! At level `ℓ` each high item is allocated with probability `x_ℓ`, each low
//! item with probability `y_ℓ`, and the price is `π_ℓ`. Non-envy between a
//! level-`ℓ` and a level-`ℓ'` valuation only depends on how many high
//! positions they share, so one row per overlap size covers every pair.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::iid2::level_probabilities;
use crate::lp::{lp_solve, LinearProgram, LpBudget, LpOutcome, Relation, VarBounds};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricLpSolution<S> {
    pub value: S,
    /// `x[ℓ]` for `ℓ ∈ 0..=n`; `x[0]` has no high item to allocate and is 0.
    pub x: Vec<S>,
    /// `y[ℓ]` for `ℓ ∈ 0..=n`; `y[n]` has no low item to allocate and is 0.
    pub y: Vec<S>,
    pub pi: Vec<S>,
}

struct Layout {
    n: usize,
}

impl Layout {
    fn vars(&self) -> usize {
        3 * self.n + 1
    }
    /// `x_ℓ`, `ℓ ∈ 1..=n`.
    fn x(&self, l: usize) -> Option<usize> {
        (l >= 1).then(|| l - 1)
    }
    /// `y_ℓ`, `ℓ ∈ 0..n`.
    fn y(&self, l: usize) -> Option<usize> {
        (l < self.n).then(|| self.n + l)
    }
    fn pi(&self, l: usize) -> usize {
        2 * self.n + l
    }
}

/// Coefficients of the utility a level-`l` valuation gets from level `m`'s
/// lottery when they share `j` high positions.
fn cross_utility<S: Scalar>(lay: &Layout, b: &S, l: usize, m: usize, j: usize, row: &mut [S], sign: &S) {
    let n = lay.n;
    if let Some(c) = lay.x(m) {
        let coef = b.clone() * S::from_count(j) + S::from_count(m - j);
        row[c] = row[c].clone() + sign.clone() * coef;
    }
    if let Some(c) = lay.y(m) {
        let coef = b.clone() * S::from_count(l - j) + S::from_count(n + j - l - m);
        row[c] = row[c].clone() + sign.clone() * coef;
    }
    let c = lay.pi(m);
    row[c] = row[c].clone() - sign.clone();
}

pub fn symmetric_rev_lp<S: Scalar>(n: usize, b: &S, p: &S, budget: &LpBudget) -> Result<SymmetricLpSolution<S>> {
    if n == 0 {
        return Err(Error::invalid("the symmetric LP needs at least one item"));
    }
    if *b <= S::one() {
        return Err(Error::invalid(format!("high value {b} must exceed 1")));
    }
    let probs = level_probabilities(n, p)?;
    let lay = Layout { n };
    let vars = lay.vars();

    let mut objective = vec![S::zero(); vars];
    for (l, pl) in probs.iter().enumerate() {
        objective[lay.pi(l)] = pl.clone();
    }
    let mut lp = LinearProgram::new(objective);
    for l in 1..=n {
        lp.set_bounds(lay.x(l).unwrap(), VarBounds::between(S::zero(), S::one()));
    }
    for l in 0..n {
        lp.set_bounds(lay.y(l).unwrap(), VarBounds::between(S::zero(), S::one()));
    }
    for l in 0..=n {
        lp.set_bounds(lay.pi(l), VarBounds::free());
    }

    let mut seen: HashSet<Vec<String>> = HashSet::new();
    let mut push = |lp: &mut LinearProgram<S>, row: Vec<S>| {
        if row.iter().all(|c| c.is_zero()) {
            return;
        }
        let key: Vec<String> = row.iter().map(|c| c.to_string()).collect();
        if seen.insert(key) {
            lp.add_constraint(row, Relation::Ge, S::zero());
        }
    };
    let one = S::one();
    for l in 0..=n {
        // IR: own utility at level l is nonnegative.
        let mut row = vec![S::zero(); vars];
        cross_utility(&lay, b, l, l, l, &mut row, &one);
        push(&mut lp, row);
    }
    for l in 0..=n {
        for m in 0..=n {
            let lo = (l + m).saturating_sub(n);
            for j in lo..=l.min(m) {
                if l == m && j == l {
                    continue;
                }
                let mut row = vec![S::zero(); vars];
                cross_utility(&lay, b, l, l, l, &mut row, &one);
                cross_utility(&lay, b, l, m, j, &mut row, &-S::one());
                push(&mut lp, row);
            }
        }
    }
    if lp.constraints.len() > budget.max_constraints || vars > budget.max_vars {
        return Err(Error::budget("symmetric LP rows", lp.constraints.len(), budget.max_constraints));
    }

    let (value, point) = match lp_solve(&lp, budget)? {
        LpOutcome::Optimal { value, point } => (value, point),
        other => return Err(Error::Consistency(format!("symmetric LP is bounded and feasible, got {other:?}"))),
    };
    let x = (0..=n).map(|l| lay.x(l).map_or_else(S::zero, |c| point[c].clone())).collect();
    let y = (0..=n).map(|l| lay.y(l).map_or_else(S::zero, |c| point[c].clone())).collect();
    let pi = (0..=n).map(|l| point[lay.pi(l)].clone()).collect();
    Ok(SymmetricLpSolution { value, x, y, pi })
}
