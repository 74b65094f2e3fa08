//! The lottery optimum Rev as a linear program in utility form.
//!
//! Per valuation `v`: allocation probabilities `x_{v,i} ∈ [0,1]` and a
//! utility `u_v ≥ 0`; the price is implied as `Σ_i v_i x_{v,i} - u_v`.

use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::lp::{lp_solve, LinearProgram, LpOutcome, Relation, VarBounds};
use crate::market::{enumerate_valuations, ProductDistribution};
use crate::scalar::Scalar;

pub fn rev_lp<S: Scalar>(dist: &ProductDistribution<S>, limits: &Limits) -> Result<S> {
    let grid = enumerate_valuations(dist, limits)?;
    let n = dist.num_items();
    let d = grid.len();
    let vars = d * n + d;
    let rows = d * d.saturating_sub(1);
    if vars > limits.lp.max_vars {
        return Err(Error::budget("standard LP variables", vars, limits.lp.max_vars));
    }
    if rows > limits.lp.max_constraints {
        return Err(Error::budget("standard LP constraints", rows, limits.lp.max_constraints));
    }
    let x = |v: usize, i: usize| v * n + i;
    let u = |v: usize| d * n + v;

    let mut objective = vec![S::zero(); vars];
    for (v, (val, prob)) in grid.iter().enumerate() {
        for i in 0..n {
            objective[x(v, i)] = prob.clone() * val.0[i].clone();
        }
        objective[u(v)] = -prob.clone();
    }
    let mut lp = LinearProgram::new(objective);
    for v in 0..d {
        for i in 0..n {
            lp.set_bounds(x(v, i), VarBounds::between(S::zero(), S::one()));
        }
    }
    // w does not prefer v's lottery: u_w - u_v - Σ_i (w_i - v_i) x_{v,i} ≥ 0.
    for (w, (wv, _)) in grid.iter().enumerate() {
        for (v, (vv, _)) in grid.iter().enumerate() {
            if v == w {
                continue;
            }
            let mut row = vec![S::zero(); vars];
            row[u(w)] = S::one();
            row[u(v)] = -S::one();
            for i in 0..n {
                row[x(v, i)] = vv.0[i].clone() - wv.0[i].clone();
            }
            lp.add_constraint(row, Relation::Ge, S::zero());
        }
    }
    match lp_solve(&lp, &limits.lp)? {
        LpOutcome::Optimal { value, .. } => Ok(value),
        other => Err(Error::Consistency(format!("standard LP is bounded and feasible, got {other:?}"))),
    }
}
