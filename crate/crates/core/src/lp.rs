//! Dense two-phase simplex over an exact ordered field.
//!
//! Entering and leaving variables follow Bland's rule (smallest index), so the
//! method terminates on degenerate programs and the returned vertex depends
//! only on the input.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint<S> {
    pub coeffs: Vec<S>,
    pub relation: Relation,
    pub rhs: S,
}

/// Optional bounds on one variable; `None` means unbounded in that direction.
#[derive(Debug, Clone, PartialEq)]
pub struct VarBounds<S> {
    pub lower: Option<S>,
    pub upper: Option<S>,
}

impl<S: Scalar> VarBounds<S> {
    pub fn free() -> Self {
        VarBounds { lower: None, upper: None }
    }

    pub fn nonnegative() -> Self {
        VarBounds { lower: Some(S::zero()), upper: None }
    }

    pub fn between(lower: S, upper: S) -> Self {
        VarBounds { lower: Some(lower), upper: Some(upper) }
    }
}

/// `maximize objective·x` subject to the rows and per-variable bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram<S> {
    pub objective: Vec<S>,
    pub constraints: Vec<Constraint<S>>,
    pub bounds: Vec<VarBounds<S>>,
}

impl<S: Scalar> LinearProgram<S> {
    /// A program with no rows; every variable starts out nonnegative.
    pub fn new(objective: Vec<S>) -> Self {
        let bounds = (0..objective.len()).map(|_| VarBounds::nonnegative()).collect();
        LinearProgram { objective, constraints: Vec::new(), bounds }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add_constraint(&mut self, coeffs: Vec<S>, relation: Relation, rhs: S) {
        self.constraints.push(Constraint { coeffs, relation, rhs });
    }

    pub fn set_bounds(&mut self, var: usize, bounds: VarBounds<S>) {
        self.bounds[var] = bounds;
    }

    pub fn objective_value(&self, point: &[S]) -> S {
        dot(&self.objective, point)
    }

    /// Exact feasibility test of a point against rows and bounds.
    pub fn satisfies(&self, point: &[S]) -> bool {
        if point.len() != self.num_vars() {
            return false;
        }
        let rows_ok = self.constraints.iter().all(|c| {
            let lhs = dot(&c.coeffs, point);
            match c.relation {
                Relation::Le => lhs <= c.rhs,
                Relation::Eq => lhs == c.rhs,
                Relation::Ge => lhs >= c.rhs,
            }
        });
        let bounds_ok = self.bounds.iter().zip(point).all(|(b, x)| {
            b.lower.as_ref().is_none_or(|l| x >= l) && b.upper.as_ref().is_none_or(|u| x <= u)
        });
        rows_ok && bounds_ok
    }

    fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        if self.bounds.len() != n {
            return Err(Error::invalid(format!(
                "{} bounds for {} variables",
                self.bounds.len(),
                n
            )));
        }
        if let Some((i, c)) = self.constraints.iter().enumerate().find(|(_, c)| c.coeffs.len() != n) {
            return Err(Error::invalid(format!(
                "constraint {i} has width {} but the objective has width {n}",
                c.coeffs.len()
            )));
        }
        Ok(())
    }
}

fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter()
        .zip(b)
        .filter(|(x, _)| !x.is_zero())
        .fold(S::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome<S> {
    Optimal { value: S, point: Vec<S> },
    Infeasible,
    Unbounded,
}

impl<S> LpOutcome<S> {
    pub fn value(&self) -> Option<&S> {
        match self {
            LpOutcome::Optimal { value, .. } => Some(value),
            _ => None,
        }
    }
}

/// Size guard for [`lp_solve`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LpBudget {
    pub max_vars: usize,
    pub max_constraints: usize,
}

impl Default for LpBudget {
    fn default() -> Self {
        LpBudget { max_vars: 512, max_constraints: 4096 }
    }
}

/// How an original variable is expressed through nonnegative tableau columns.
enum VarMap<S> {
    /// `x = offset + col`
    Shifted { col: usize, offset: S },
    /// `x = offset - col`
    Mirrored { col: usize, offset: S },
    /// `x = pos - neg`
    Split { pos: usize, neg: usize },
}

pub fn lp_solve<S: Scalar>(lp: &LinearProgram<S>, budget: &LpBudget) -> Result<LpOutcome<S>> {
    lp.validate()?;
    if lp.num_vars() > budget.max_vars {
        return Err(Error::budget("LP variables", lp.num_vars(), budget.max_vars));
    }
    if lp.constraints.len() > budget.max_constraints {
        return Err(Error::budget("LP constraints", lp.constraints.len(), budget.max_constraints));
    }

    // Standard form: columns are nonnegative.
    let mut maps = Vec::with_capacity(lp.num_vars());
    let mut ncols = 0usize;
    let mut extra_rows: Vec<(usize, S)> = Vec::new();
    for b in &lp.bounds {
        let map = match (&b.lower, &b.upper) {
            (Some(l), upper) => {
                if let Some(u) = upper {
                    extra_rows.push((ncols, u.clone() - l.clone()));
                }
                VarMap::Shifted { col: ncols, offset: l.clone() }
            }
            (None, Some(u)) => VarMap::Mirrored { col: ncols, offset: u.clone() },
            (None, None) => {
                ncols += 1;
                VarMap::Split { pos: ncols - 1, neg: ncols }
            }
        };
        ncols += 1;
        maps.push(map);
    }

    let translate = |coeffs: &[S]| -> (Vec<S>, S) {
        let mut row = vec![S::zero(); ncols];
        let mut shift = S::zero();
        for (a, map) in coeffs.iter().zip(&maps) {
            if a.is_zero() {
                continue;
            }
            match map {
                VarMap::Shifted { col, offset } => {
                    row[*col] = a.clone();
                    shift = shift + a.clone() * offset.clone();
                }
                VarMap::Mirrored { col, offset } => {
                    row[*col] = -a.clone();
                    shift = shift + a.clone() * offset.clone();
                }
                VarMap::Split { pos, neg } => {
                    row[*pos] = a.clone();
                    row[*neg] = -a.clone();
                }
            }
        }
        (row, shift)
    };

    let mut rows: Vec<(Vec<S>, Relation, S)> = Vec::new();
    for c in &lp.constraints {
        let (row, shift) = translate(&c.coeffs);
        rows.push((row, c.relation, c.rhs.clone() - shift));
    }
    for (col, width) in extra_rows {
        let mut row = vec![S::zero(); ncols];
        row[col] = S::one();
        rows.push((row, Relation::Le, width));
    }
    let (cost, cost_shift) = translate(&lp.objective);

    let mut tableau = Tableau::build(ncols, rows);
    if !tableau.phase_one() {
        return Ok(LpOutcome::Infeasible);
    }
    if !tableau.phase_two(&cost) {
        return Ok(LpOutcome::Unbounded);
    }

    let columns = tableau.column_values();
    let point: Vec<S> = maps
        .iter()
        .map(|m| match m {
            VarMap::Shifted { col, offset } => offset.clone() + columns[*col].clone(),
            VarMap::Mirrored { col, offset } => offset.clone() - columns[*col].clone(),
            VarMap::Split { pos, neg } => columns[*pos].clone() - columns[*neg].clone(),
        })
        .collect();
    let value = tableau.value() + cost_shift;
    debug_assert!(lp.objective_value(&point) == value);
    Ok(LpOutcome::Optimal { value, point })
}

struct Tableau<S> {
    /// Each row holds the column coefficients followed by the right-hand side.
    rows: Vec<Vec<S>>,
    basis: Vec<usize>,
    /// Reduced costs; the last entry is minus the current objective value.
    z: Vec<S>,
    ncols: usize,
    first_artificial: usize,
}

impl<S: Scalar> Tableau<S> {
    fn build(structural: usize, rows: Vec<(Vec<S>, Relation, S)>) -> Self {
        let normalized: Vec<(Vec<S>, Relation, S)> = rows
            .into_iter()
            .map(|(row, rel, rhs)| {
                if rhs.is_negative() {
                    let flipped = match rel {
                        Relation::Le => Relation::Ge,
                        Relation::Ge => Relation::Le,
                        Relation::Eq => Relation::Eq,
                    };
                    (row.into_iter().map(|a| -a).collect(), flipped, -rhs)
                } else {
                    (row, rel, rhs)
                }
            })
            .collect();

        let slacks = normalized.iter().filter(|(_, r, _)| *r != Relation::Eq).count();
        let artificials = normalized.iter().filter(|(_, r, _)| *r != Relation::Le).count();
        let first_artificial = structural + slacks;
        let ncols = first_artificial + artificials;

        let mut tab_rows = Vec::with_capacity(normalized.len());
        let mut basis = Vec::with_capacity(normalized.len());
        let (mut next_slack, mut next_art) = (structural, first_artificial);
        for (coeffs, rel, rhs) in normalized {
            let mut row = coeffs;
            row.resize(ncols + 1, S::zero());
            row[ncols] = rhs;
            match rel {
                Relation::Le => {
                    row[next_slack] = S::one();
                    basis.push(next_slack);
                    next_slack += 1;
                }
                Relation::Ge => {
                    row[next_slack] = -S::one();
                    next_slack += 1;
                    row[next_art] = S::one();
                    basis.push(next_art);
                    next_art += 1;
                }
                Relation::Eq => {
                    row[next_art] = S::one();
                    basis.push(next_art);
                    next_art += 1;
                }
            }
            tab_rows.push(row);
        }
        Tableau { rows: tab_rows, basis, z: vec![S::zero(); ncols + 1], ncols, first_artificial }
    }

    fn value(&self) -> S {
        -self.z[self.ncols].clone()
    }

    /// Recomputes the reduced-cost row for `cost` (zero beyond its length).
    fn load_cost(&mut self, cost: &[S]) {
        let c = |j: usize| cost.get(j).cloned().unwrap_or_else(S::zero);
        let mut z: Vec<S> = (0..self.ncols).map(c).collect();
        z.push(S::zero());
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            let cb = c(b);
            if cb.is_zero() {
                continue;
            }
            for (zj, a) in z.iter_mut().zip(row) {
                if !a.is_zero() {
                    *zj = zj.clone() - cb.clone() * a.clone();
                }
            }
        }
        self.z = z;
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let inv = S::one() / self.rows[pr][pc].clone();
        for a in self.rows[pr].iter_mut() {
            if !a.is_zero() {
                *a = a.clone() * inv.clone();
            }
        }
        let pivot_row = self.rows[pr].clone();
        let eliminate = |row: &mut Vec<S>| {
            let factor = row[pc].clone();
            if factor.is_zero() {
                return;
            }
            for (a, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *a = a.clone() - factor.clone() * p.clone();
                }
            }
        };
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != pr {
                eliminate(row);
            }
        }
        eliminate(&mut self.z);
        self.basis[pr] = pc;
    }

    /// Runs Bland-rule simplex over columns `< limit`. Returns false if unbounded.
    fn run(&mut self, limit: usize) -> bool {
        loop {
            let Some(enter) = (0..limit).find(|&j| self.z[j].is_positive()) else {
                return true;
            };
            let mut leave: Option<(usize, S)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if !row[enter].is_positive() {
                    continue;
                }
                let ratio = row[self.ncols].clone() / row[enter].clone();
                let better = match &leave {
                    None => true,
                    Some((li, best)) => {
                        ratio < *best || (ratio == *best && self.basis[i] < self.basis[*li])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                Some((pr, _)) => self.pivot(pr, enter),
                None => return false,
            }
        }
    }

    /// Drives artificial variables to zero. Returns false if the rows are infeasible.
    fn phase_one(&mut self) -> bool {
        if self.first_artificial == self.ncols {
            return true;
        }
        let cost: Vec<S> = (0..self.ncols)
            .map(|j| if j >= self.first_artificial { -S::one() } else { S::zero() })
            .collect();
        self.load_cost(&cost);
        let bounded = self.run(self.ncols);
        debug_assert!(bounded, "phase one objective is bounded above by zero");
        if self.value().is_negative() {
            return false;
        }
        // Pivot remaining zero-level artificials out of the basis, dropping redundant rows.
        let mut i = 0;
        while i < self.rows.len() {
            if self.basis[i] >= self.first_artificial {
                match (0..self.first_artificial).find(|&j| !self.rows[i][j].is_zero()) {
                    Some(j) => self.pivot(i, j),
                    None => {
                        self.rows.remove(i);
                        self.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
        true
    }

    fn phase_two(&mut self, cost: &[S]) -> bool {
        self.load_cost(cost);
        self.run(self.first_artificial)
    }

    fn column_values(&self) -> Vec<S> {
        let mut values = vec![S::zero(); self.ncols];
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            values[b] = row[self.ncols].clone();
        }
        values
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;
    use num_traits::{One, Zero};

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn int(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    fn solve(lp: &LinearProgram<Rational>) -> LpOutcome<Rational> {
        lp_solve(lp, &LpBudget::default()).unwrap()
    }

    #[test]
    fn single_upper_bound() {
        let mut lp = LinearProgram::new(vec![int(1)]);
        lp.add_constraint(vec![int(1)], Relation::Le, int(3));
        lp.add_constraint(vec![int(1)], Relation::Ge, int(0));
        assert_eq!(solve(&lp), LpOutcome::Optimal { value: int(3), point: vec![int(3)] });
    }

    #[test]
    fn two_dimensional_vertex() {
        // Vertices of {x+2y<=4, x<=2, x,y>=0}: (0,0),(2,0),(2,1),(0,2); x+y peaks at (2,1).
        let mut lp = LinearProgram::new(vec![int(1), int(1)]);
        lp.add_constraint(vec![int(1), int(2)], Relation::Le, int(4));
        lp.add_constraint(vec![int(1), int(0)], Relation::Le, int(2));
        assert_eq!(
            solve(&lp),
            LpOutcome::Optimal { value: int(3), point: vec![int(2), int(1)] }
        );
    }

    #[test]
    fn empty_polytope() {
        let mut lp = LinearProgram::new(vec![int(1)]);
        lp.set_bounds(0, VarBounds::free());
        lp.add_constraint(vec![int(1)], Relation::Le, int(-1));
        lp.add_constraint(vec![int(1)], Relation::Ge, int(0));
        assert_eq!(solve(&lp), LpOutcome::Infeasible);
    }

    #[test]
    fn unbounded_ray() {
        let mut lp = LinearProgram::new(vec![int(1), int(-1)]);
        lp.add_constraint(vec![int(1), int(-1)], Relation::Ge, int(-2));
        assert_eq!(solve(&lp), LpOutcome::Unbounded);
    }

    #[test]
    fn free_and_mirrored_variables() {
        // max -x + y, x free but >= -5 through a row, y bounded above only.
        let mut lp = LinearProgram::new(vec![int(-1), int(1)]);
        lp.set_bounds(0, VarBounds::free());
        lp.set_bounds(1, VarBounds { lower: None, upper: Some(int(2)) });
        lp.add_constraint(vec![int(1), int(0)], Relation::Ge, int(-5));
        assert_eq!(
            solve(&lp),
            LpOutcome::Optimal { value: int(7), point: vec![int(-5), int(2)] }
        );
    }

    #[test]
    fn equality_rows_and_redundancy() {
        // x + y = 1 listed twice, maximize 2x + y with 0 <= x <= 1/2.
        let mut lp = LinearProgram::new(vec![int(2), int(1)]);
        lp.set_bounds(0, VarBounds::between(Rational::zero(), r(1, 2)));
        lp.add_constraint(vec![int(1), int(1)], Relation::Eq, int(1));
        lp.add_constraint(vec![int(2), int(2)], Relation::Eq, int(2));
        assert_eq!(
            solve(&lp),
            LpOutcome::Optimal { value: r(3, 2), point: vec![r(1, 2), r(1, 2)] }
        );
    }

    #[test]
    fn beale_cycling_example_terminates() {
        // Cycles under the textbook largest-coefficient rule; optimum 1/20 at (1/25, 0, 1, 0).
        let mut lp = LinearProgram::new(vec![r(3, 4), int(-150), r(1, 50), int(-6)]);
        lp.add_constraint(vec![r(1, 4), int(-60), r(-1, 25), int(9)], Relation::Le, int(0));
        lp.add_constraint(vec![r(1, 2), int(-90), r(-1, 50), int(3)], Relation::Le, int(0));
        lp.add_constraint(vec![int(0), int(0), int(1), int(0)], Relation::Le, int(1));
        let out = solve(&lp);
        assert_eq!(out.value(), Some(&r(1, 20)));
        if let LpOutcome::Optimal { point, .. } = out {
            assert_eq!(point, vec![r(1, 25), int(0), int(1), int(0)]);
        }
    }

    #[test]
    fn width_mismatch_is_rejected() {
        let mut lp = LinearProgram::new(vec![int(1), int(1)]);
        lp.add_constraint(vec![int(1)], Relation::Le, int(1));
        assert!(matches!(lp_solve(&lp, &LpBudget::default()), Err(Error::Invalid(_))));
    }

    #[test]
    fn budget_guard() {
        let lp = LinearProgram::new(vec![Rational::one(); 10]);
        let budget = LpBudget { max_vars: 4, max_constraints: 10 };
        assert!(matches!(lp_solve(&lp, &budget), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn generic_over_small_ratios() {
        use num_rational::Ratio;
        let mut lp = LinearProgram::new(vec![Ratio::<i64>::from_integer(1); 2]);
        lp.add_constraint(vec![Ratio::from_integer(1), Ratio::from_integer(2)], Relation::Le, Ratio::from_integer(4));
        lp.add_constraint(vec![Ratio::from_integer(1), Ratio::from_integer(0)], Relation::Le, Ratio::from_integer(2));
        let out = lp_solve(&lp, &LpBudget::default()).unwrap();
        assert_eq!(out.value(), Some(&Ratio::from_integer(3)));
    }
}
