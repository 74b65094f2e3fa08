//! Exact DRev by depth-first search over allocation maps.
//!
//! Valuations are assigned bundles in grid order, trying masks from the grand
//! bundle down to the empty bundle. Each partial assignment keeps the least
//! utilities of its assigned valuations, which only grow as more valuations
//! are assigned, so a subtree is cut when it is infeasible or cannot beat the
//! incumbent. The reported witness is the first optimal map in search order.

use std::sync::Mutex;

use rayon::prelude::*;

use super::{envy_weight, AllocationMap, UtilityAssignment};
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::market::{enumerate_valuations, Bundle, ProductDistribution};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct DrevResult<S> {
    pub revenue: S,
    pub alloc: AllocationMap,
    pub utilities: UtilityAssignment<S>,
}

struct Problem<S> {
    probs: Vec<S>,
    /// `value[v][mask]`: worth of bundle `mask` at valuation `v`.
    value: Vec<Vec<S>>,
    /// `weight[v][w][mask]`: gain of `w` when taking `v`'s bundle `mask`.
    weight: Vec<Vec<Vec<S>>>,
    /// `Pr[v] · (value of the grand bundle at v)`.
    optimistic: Vec<S>,
    masks: Vec<u32>,
}

#[derive(Clone)]
struct Partial<S> {
    alloc: Vec<u32>,
    utils: Vec<S>,
}

struct Best<S> {
    revenue: S,
    alloc: Vec<u32>,
    utils: Vec<S>,
}

pub fn drev_bruteforce<S: Scalar>(dist: &ProductDistribution<S>, limits: &Limits) -> Result<DrevResult<S>> {
    let grid = enumerate_valuations(dist, limits)?;
    let n = dist.num_items();
    let d = grid.len();
    let choices = 1u128 << n;
    let space = (0..d).try_fold(1u128, |acc, _| acc.checked_mul(choices));
    match space {
        Some(s) if s <= limits.max_allocation_maps => {}
        Some(s) => return Err(Error::budget("allocation maps", s, limits.max_allocation_maps)),
        None => return Err(Error::budget("allocation maps", "more than 2^128", limits.max_allocation_maps)),
    }

    let masks: Vec<u32> = (0..(1u32 << n)).rev().collect();
    let value: Vec<Vec<S>> = grid
        .iter()
        .map(|(v, _)| (0..(1u32 << n)).map(|m| v.bundle_value(Bundle(m))).collect())
        .collect();
    let weight: Vec<Vec<Vec<S>>> = grid
        .iter()
        .map(|(v, _)| {
            grid.iter()
                .map(|(w, _)| (0..(1u32 << n)).map(|m| envy_weight(v, w, Bundle(m))).collect())
                .collect()
        })
        .collect();
    let probs: Vec<S> = grid.iter().map(|(_, p)| p.clone()).collect();
    let full = ((1u64 << n) - 1) as usize;
    let optimistic = (0..d).map(|v| probs[v].clone() * value[v][full].clone()).collect();
    let problem = Problem { probs, value, weight, optimistic, masks };

    // Split the top of the tree into independent branches for the workers.
    let mut depth = 0;
    let mut branches = 1usize;
    while depth < d && branches < 256 {
        depth += 1;
        branches *= problem.masks.len();
    }
    let prefixes: Vec<Vec<u32>> = (0..branches)
        .map(|mut k| {
            let mut prefix = vec![0u32; depth];
            for slot in prefix.iter_mut().rev() {
                *slot = problem.masks[k % problem.masks.len()];
                k /= problem.masks.len();
            }
            prefix
        })
        .collect();

    let incumbent: Mutex<Option<S>> = Mutex::new(None);
    let results: Vec<Option<Best<S>>> = prefixes
        .par_iter()
        .map(|prefix| {
            let mut partial = Partial { alloc: Vec::with_capacity(d), utils: Vec::with_capacity(d) };
            for &m in prefix {
                if !problem.extend(&mut partial, m) {
                    return None;
                }
            }
            let mut best: Option<Best<S>> = None;
            problem.search(&partial, &mut best, &incumbent);
            best
        })
        .collect();

    // First branch in search order holding the maximum.
    let mut winner: Option<Best<S>> = None;
    for b in results.into_iter().flatten() {
        if winner.as_ref().is_none_or(|w| b.revenue > w.revenue) {
            winner = Some(b);
        }
    }
    let best = winner.ok_or_else(|| Error::Consistency("the empty allocation map is always feasible".into()))?;
    Ok(DrevResult {
        revenue: best.revenue,
        alloc: AllocationMap(best.alloc.into_iter().map(Bundle).collect()),
        utilities: UtilityAssignment(best.utils),
    })
}

impl<S: Scalar> Problem<S> {
    /// Appends a valuation with bundle `mask`, restoring least utilities.
    /// Returns false when the extended map has a positive cycle.
    fn extend(&self, p: &mut Partial<S>, mask: u32) -> bool {
        let t = p.alloc.len();
        let start = self.lower_bound(p, t);
        p.alloc.push(mask);
        p.utils.push(start);
        // Only edges touching the new vertex can be violated; relax until stable.
        for _round in 0..=t {
            let mut changed = false;
            for v in 0..=t {
                let mv = p.alloc[v] as usize;
                for w in 0..=t {
                    if v == w {
                        continue;
                    }
                    let candidate = p.utils[v].clone() + self.weight[v][w][mv].clone();
                    if candidate > p.utils[w] {
                        p.utils[w] = candidate;
                        changed = true;
                    }
                }
            }
            if !changed {
                return true;
            }
        }
        false
    }

    /// Utility that valuation `v` is owed by the assigned prefix alone.
    fn lower_bound(&self, p: &Partial<S>, v: usize) -> S {
        let mut lb = S::zero();
        for (w, (&m, u)) in p.alloc.iter().zip(&p.utils).enumerate() {
            let c = u.clone() + self.weight[w][v][m as usize].clone();
            if c > lb {
                lb = c;
            }
        }
        lb
    }

    fn revenue(&self, p: &Partial<S>) -> S {
        p.alloc
            .iter()
            .zip(&p.utils)
            .enumerate()
            .fold(S::zero(), |acc, (v, (&m, u))| {
                acc + self.probs[v].clone() * (self.value[v][m as usize].clone() - u.clone())
            })
    }

    fn search(&self, p: &Partial<S>, best: &mut Option<Best<S>>, incumbent: &Mutex<Option<S>>) {
        let t = p.alloc.len();
        let assigned = self.revenue(p);
        if t == self.probs.len() {
            if best.as_ref().is_none_or(|b| assigned > b.revenue) {
                let mut global = incumbent.lock().unwrap();
                if global.as_ref().is_none_or(|g| assigned > *g) {
                    *global = Some(assigned.clone());
                }
                *best = Some(Best { revenue: assigned, alloc: p.alloc.clone(), utils: p.utils.clone() });
            }
            return;
        }
        let mut bound = assigned;
        for v in t..self.probs.len() {
            bound = bound + self.optimistic[v].clone() - self.probs[v].clone() * self.lower_bound(p, v);
        }
        if best.as_ref().is_some_and(|b| bound <= b.revenue) {
            return;
        }
        // Other branches may hold a strictly better map; ties must survive.
        if incumbent.lock().unwrap().as_ref().is_some_and(|g| bound < *g) {
            return;
        }
        for &m in &self.masks {
            let mut child = p.clone();
            if self.extend(&mut child, m) {
                self.search(&child, best, incumbent);
            }
        }
    }
}
