//! Exact optimal bundle pricing for a constant number of items.
//!
//! A price vector assigns one price to each nonempty bundle. The buyer's
//! choice at every valuation is constant on each cell of the arrangement of
//! the planes below, so an optimum sits at a vertex of that arrangement:
//!
//! - `p_j = v(B_j)` for every valuation and bundle,
//! - `p_j - p_j' = v(B_j) - v(B_j')` for every valuation and bundle pair,
//! - `p_j = p_j'` for every bundle pair.
//!
//! Vertices come from every `d`-subset of planes with a unique intersection.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::linsys::{linear_system_solve, LinearSolution};
use crate::market::{enumerate_valuations, expected_revenue, Bundle, Menu, MenuEntry, ProductDistribution};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum HyperplaneKind {
    ValuePrice,
    BundleVsBundle,
    PriceVsPrice,
}

/// `coeffs · p = rhs` over the bundle prices.
#[derive(Debug, Clone, PartialEq)]
pub struct Hyperplane<S> {
    pub coeffs: Vec<S>,
    pub rhs: S,
    pub kind: HyperplaneKind,
}

impl<S: Scalar> Hyperplane<S> {
    /// Scaled so the first nonzero coefficient is 1.
    fn normalized(&self) -> (Vec<S>, S) {
        let lead = self.coeffs.iter().find(|c| !c.is_zero()).expect("nonzero plane").clone();
        (self.coeffs.iter().map(|c| c.clone() / lead.clone()).collect(), self.rhs.clone() / lead)
    }

    fn key(&self) -> String {
        let (c, r) = self.normalized();
        let mut s: Vec<String> = c.iter().map(|x| x.to_string()).collect();
        s.push(r.to_string());
        s.join(" ")
    }

    /// `-1`, `0` or `1` as `coeffs · p` is below, on or above `rhs`.
    pub fn side(&self, prices: &[S]) -> i8 {
        let lhs = self.coeffs.iter().zip(prices).fold(S::zero(), |acc, (c, p)| acc + c.clone() * p.clone());
        if lhs < self.rhs {
            -1
        } else if lhs > self.rhs {
            1
        } else {
            0
        }
    }
}

/// One price per nonempty bundle, indexed by `mask - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceVector<S>(pub Vec<S>);

impl<S: Scalar> PriceVector<S> {
    pub fn menu(&self) -> Result<Menu<S>> {
        Menu::new(
            self.0
                .iter()
                .enumerate()
                .map(|(j, p)| MenuEntry { bundle: Bundle(j as u32 + 1), price: p.clone() })
                .collect(),
        )
    }

    fn key(&self) -> String {
        self.0.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstkResult<S> {
    pub best_prices: PriceVector<S>,
    pub revenue: S,
    /// Distinct nonnegative vertices evaluated.
    pub candidates_examined: usize,
    /// Plane subsets tried.
    pub subsets_examined: u128,
}

fn check_items<S: Scalar>(dist: &ProductDistribution<S>, limits: &Limits) -> Result<usize> {
    let k = dist.num_items();
    if k > limits.max_constk_items {
        return Err(Error::budget("constant-items solver items", k, limits.max_constk_items));
    }
    Ok(k)
}

/// Every plane of the three families, repeats included.
pub fn raw_hyperplanes<S: Scalar>(dist: &ProductDistribution<S>, limits: &Limits) -> Result<Vec<Hyperplane<S>>> {
    let k = check_items(dist, limits)?;
    let grid = enumerate_valuations(dist, limits)?;
    let d = (1usize << k) - 1;
    let bundles: Vec<Bundle> = Bundle::all_nonempty(k).collect();
    let mut out = Vec::new();
    let unit = |j: usize| {
        let mut c = vec![S::zero(); d];
        c[j] = S::one();
        c
    };
    for (v, _) in &grid {
        for (j, &b) in bundles.iter().enumerate() {
            out.push(Hyperplane { coeffs: unit(j), rhs: v.bundle_value(b), kind: HyperplaneKind::ValuePrice });
        }
    }
    for (v, _) in &grid {
        for j in 0..d {
            for jj in j + 1..d {
                let mut c = unit(j);
                c[jj] = -S::one();
                let rhs = v.bundle_value(bundles[j]) - v.bundle_value(bundles[jj]);
                out.push(Hyperplane { coeffs: c, rhs, kind: HyperplaneKind::BundleVsBundle });
            }
        }
    }
    for j in 0..d {
        for jj in j + 1..d {
            let mut c = unit(j);
            c[jj] = -S::one();
            out.push(Hyperplane { coeffs: c, rhs: S::zero(), kind: HyperplaneKind::PriceVsPrice });
        }
    }
    Ok(out)
}

/// The three plane families with geometric repeats removed, first kept.
pub fn build_hyperplanes<S: Scalar>(dist: &ProductDistribution<S>, limits: &Limits) -> Result<Vec<Hyperplane<S>>> {
    let mut seen = std::collections::HashSet::new();
    Ok(raw_hyperplanes(dist, limits)?.into_iter().filter(|h| seen.insert(h.key())).collect())
}

fn binomial(n: usize, r: usize) -> Option<u128> {
    if r > n {
        return Some(0);
    }
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 0..r {
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}

/// Advances `idx` to the next `r`-combination of `0..n` in lexicographic order.
fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let r = idx.len();
    let mut i = r;
    while i > 0 {
        i -= 1;
        if idx[i] < n - r + i {
            idx[i] += 1;
            for j in i + 1..r {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Nonnegative unique intersections of `d`-subsets of `planes`, deduplicated
/// and sorted lexicographically.
pub fn enumerate_vertices<S: Scalar>(planes: &[Hyperplane<S>], d: usize, limits: &Limits) -> Result<Vec<PriceVector<S>>> {
    Ok(vertices_counted(planes, d, limits)?.0)
}

fn vertices_counted<S: Scalar>(
    planes: &[Hyperplane<S>],
    d: usize,
    limits: &Limits,
) -> Result<(Vec<PriceVector<S>>, u128)> {
    if d == 0 {
        return Err(Error::invalid("vertex enumeration needs a positive dimension"));
    }
    if let Some(h) = planes.iter().find(|h| h.coeffs.len() != d) {
        return Err(Error::invalid(format!("plane of width {} in dimension {d}", h.coeffs.len())));
    }
    let m = planes.len();
    let subsets = binomial(m, d);
    match subsets {
        Some(s) if s <= limits.max_vertex_subsets => {}
        Some(s) => return Err(Error::budget("hyperplane subsets", s, limits.max_vertex_subsets)),
        None => return Err(Error::budget("hyperplane subsets", "more than 2^128", limits.max_vertex_subsets)),
    }
    let subsets = subsets.unwrap();
    if m < d {
        return Ok((Vec::new(), 0));
    }

    // Partition on the first plane of each subset.
    let found: Vec<Vec<PriceVector<S>>> = (0..=m - d)
        .into_par_iter()
        .map(|first| {
            let mut out = Vec::new();
            let mut rest: Vec<usize> = (first + 1..first + d).collect();
            loop {
                let rows: Vec<Vec<S>> = std::iter::once(first)
                    .chain(rest.iter().copied())
                    .map(|i| planes[i].coeffs.clone())
                    .collect();
                let rhs: Vec<S> = std::iter::once(first).chain(rest.iter().copied()).map(|i| planes[i].rhs.clone()).collect();
                if let LinearSolution::Unique(x) = linear_system_solve(&rows, &rhs) {
                    if x.iter().all(|p| !p.is_negative()) {
                        out.push(PriceVector(x));
                    }
                }
                // Combinations of the remaining d - 1 planes from first+1..m.
                if rest.is_empty() {
                    break;
                }
                let mut shifted: Vec<usize> = rest.iter().map(|i| i - first - 1).collect();
                if !next_combination(&mut shifted, m - first - 1) {
                    break;
                }
                rest = shifted.iter().map(|i| i + first + 1).collect();
            }
            out
        })
        .collect();

    let mut unique: BTreeMap<String, PriceVector<S>> = BTreeMap::new();
    for v in found.into_iter().flatten() {
        unique.entry(v.key()).or_insert(v);
    }
    let mut vertices: Vec<PriceVector<S>> = unique.into_values().collect();
    vertices.sort_by(|a, b| lex_cmp(&a.0, &b.0));
    Ok((vertices, subsets))
}

fn lex_cmp<S: Scalar>(a: &[S], b: &[S]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.partial_cmp(y) {
            Some(std::cmp::Ordering::Equal) | None => continue,
            Some(o) => return o,
        }
    }
    a.len().cmp(&b.len())
}

/// Expected revenue of each candidate's menu, in input order.
pub fn evaluate_candidates<S: Scalar>(
    dist: &ProductDistribution<S>,
    candidates: &[PriceVector<S>],
    limits: &Limits,
) -> Result<Vec<S>> {
    candidates
        .par_iter()
        .map(|c| expected_revenue(&c.menu()?, dist, limits))
        .collect()
}

pub fn solve_constk<S: Scalar>(dist: &ProductDistribution<S>, limits: &Limits) -> Result<ConstkResult<S>> {
    let k = check_items(dist, limits)?;
    let d = (1usize << k) - 1;
    let planes = build_hyperplanes(dist, limits)?;
    let (vertices, subsets) = vertices_counted(&planes, d, limits)?;
    let revenues = evaluate_candidates(dist, &vertices, limits)?;
    let mut best: Option<usize> = None;
    for (i, r) in revenues.iter().enumerate() {
        if best.is_none_or(|b| *r > revenues[b]) {
            best = Some(i);
        }
    }
    let best = best.ok_or_else(|| Error::Consistency("no nonnegative vertex in the arrangement".into()))?;
    Ok(ConstkResult {
        candidates_examined: vertices.len(),
        subsets_examined: subsets,
        revenue: revenues[best].clone(),
        best_prices: vertices[best].clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market::{buyer_choice, ItemDistribution};
    use crate::Rational;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn int(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    fn one_item(pairs: Vec<(Rational, Rational)>) -> ProductDistribution<Rational> {
        ProductDistribution::new(vec![ItemDistribution::from_pairs(pairs).unwrap()]).unwrap()
    }

    fn uniform12() -> ItemDistribution<Rational> {
        ItemDistribution::from_pairs(vec![(int(1), q(1, 2)), (int(2), q(1, 2))]).unwrap()
    }

    fn plane(coeffs: Vec<Rational>, rhs: Rational) -> Hyperplane<Rational> {
        Hyperplane { coeffs, rhs, kind: HyperplaneKind::ValuePrice }
    }

    #[test]
    fn hyperplane_counts() {
        let lim = Limits::default();
        let d = one_item(vec![(int(1), q(1, 2)), (int(2), q(1, 2))]);
        let h = build_hyperplanes(&d, &lim).unwrap();
        assert_eq!(h.iter().map(|p| p.rhs.clone()).collect::<Vec<_>>(), vec![int(1), int(2)]);
        assert_eq!(build_hyperplanes(&one_item(vec![(int(1), int(1))]), &lim).unwrap().len(), 1);

        let two = ProductDistribution::iid(2, uniform12()).unwrap();
        let raw = raw_hyperplanes(&two, &lim).unwrap();
        assert_eq!(raw.len(), 4 * 3 + 4 * 3 + 3);
        assert!(build_hyperplanes(&two, &lim).unwrap().len() < raw.len());
    }

    #[test]
    fn vertex_examples() {
        let lim = Limits::default();
        let v = enumerate_vertices(&[plane(vec![int(1)], int(1)), plane(vec![int(1)], int(2))], 1, &lim).unwrap();
        assert_eq!(v, vec![PriceVector(vec![int(1)]), PriceVector(vec![int(2)])]);

        let parallel = [plane(vec![int(1), int(1)], int(3)), plane(vec![int(1), int(1)], int(4))];
        assert!(enumerate_vertices(&parallel, 2, &lim).unwrap().is_empty());

        let negative = [plane(vec![int(1), int(0)], int(2)), plane(vec![int(1), int(-1)], int(3))];
        assert_eq!(
            linear_system_solve(&[negative[0].coeffs.clone(), negative[1].coeffs.clone()], &[int(2), int(3)]),
            LinearSolution::Unique(vec![int(2), int(-1)])
        );
        assert!(enumerate_vertices(&negative, 2, &lim).unwrap().is_empty());
    }

    #[test]
    fn solve_examples() {
        let lim = Limits::default();
        let r = solve_constk(&one_item(vec![(int(1), int(1))]), &lim).unwrap();
        assert_eq!((r.best_prices.0, r.revenue), (vec![int(1)], int(1)));

        let r = solve_constk(&one_item(vec![(int(1), q(1, 2)), (int(2), q(1, 2))]), &lim).unwrap();
        assert_eq!((r.best_prices.0, r.revenue), (vec![int(1)], int(1)));

        let r = solve_constk(&ProductDistribution::iid(2, uniform12()).unwrap(), &lim).unwrap();
        assert_eq!(r.revenue, q(9, 4));
    }

    #[test]
    fn three_items_hit_the_subset_budget() {
        let d = ProductDistribution::iid(3, uniform12()).unwrap();
        assert!(matches!(solve_constk(&d, &Limits::default()), Err(Error::BudgetExceeded { .. })));
        let d = ProductDistribution::iid(4, uniform12()).unwrap();
        assert!(matches!(solve_constk(&d, &Limits::default()), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn combinations_in_order() {
        let mut idx = vec![0, 1];
        let mut all = vec![idx.clone()];
        while next_combination(&mut idx, 4) {
            all.push(idx.clone());
        }
        assert_eq!(all, vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]);
        assert_eq!(binomial(57, 3), Some(29260));
    }

    #[test]
    fn buyer_behavior_is_constant_on_cells() {
        let lim = Limits::default();
        let dist = ProductDistribution::new(vec![
            ItemDistribution::from_pairs(vec![(int(1), q(1, 4)), (int(3), q(3, 4))]).unwrap(),
            ItemDistribution::from_pairs(vec![(int(2), q(1, 2)), (int(4), q(1, 2))]).unwrap(),
        ])
        .unwrap();
        let planes = build_hyperplanes(&dist, &lim).unwrap();
        let grid = enumerate_valuations(&dist, &lim).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut cells: BTreeMap<Vec<i8>, Vec<Option<usize>>> = BTreeMap::new();
        let mut repeats = 0;
        for _ in 0..4000 {
            let prices: Vec<Rational> = (0..3).map(|_| q(rng.gen_range(0..64), 8)).collect();
            let pattern: Vec<i8> = planes.iter().map(|h| h.side(&prices)).collect();
            if pattern.contains(&0) {
                continue;
            }
            let menu = PriceVector(prices).menu().unwrap();
            let choices: Vec<Option<usize>> = grid.iter().map(|(v, _)| buyer_choice(&menu, v).chosen).collect();
            match cells.get(&pattern) {
                Some(seen) => {
                    repeats += 1;
                    assert_eq!(seen, &choices);
                }
                None => {
                    cells.insert(pattern, choices);
                }
            }
        }
        assert!(repeats > 100);
    }
}
