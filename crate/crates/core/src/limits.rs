use crate::lp::LpBudget;

/// Size guards shared by the enumeration-based operations.
///
/// Every oracle here is exponential in some parameter; these limits turn an
/// accidental large request into a [`BudgetExceeded`](crate::Error::BudgetExceeded)
/// error instead of an unbounded run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Maximum number of valuation vectors in an enumerated grid.
    pub max_grid: usize,
    /// Maximum size of the allocation-map search space, `(2^n)^|D|`.
    pub max_allocation_maps: u128,
    pub lp: LpBudget,
    /// Maximum number of hyperplane subsets examined during vertex enumeration.
    pub max_vertex_subsets: u128,
    /// Largest item count accepted by the constant-items solver.
    pub max_constk_items: usize,
    /// Maximum number of half-size subsets enumerated when counting.
    pub max_subsets: u128,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_grid: 1 << 16,
            max_allocation_maps: 1 << 20,
            lp: LpBudget::default(),
            max_vertex_subsets: 2_000_000,
            max_constk_items: 3,
            max_subsets: 1 << 20,
        }
    }
}
