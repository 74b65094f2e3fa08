//! Exact Gaussian elimination for square systems.

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub enum LinearSolution<S> {
    Unique(Vec<S>),
    Singular,
}

/// Solves `rows · x = rhs` for a square matrix.
///
/// Returns `Singular` when the determinant is zero, including the case where
/// the dimensions do not form a square system.
pub fn linear_system_solve<S: Scalar>(rows: &[Vec<S>], rhs: &[S]) -> LinearSolution<S> {
    let d = rows.len();
    if rhs.len() != d || rows.iter().any(|r| r.len() != d) {
        return LinearSolution::Singular;
    }
    let mut m: Vec<Vec<S>> = rows
        .iter()
        .zip(rhs)
        .map(|(r, b)| {
            let mut row = r.clone();
            row.push(b.clone());
            row
        })
        .collect();

    for col in 0..d {
        let Some(p) = (col..d).find(|&i| !m[i][col].is_zero()) else {
            return LinearSolution::Singular;
        };
        m.swap(col, p);
        let inv = S::one() / m[col][col].clone();
        for a in m[col][col..].iter_mut() {
            *a = a.clone() * inv.clone();
        }
        let pivot = m[col].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == col || row[col].is_zero() {
                continue;
            }
            let factor = row[col].clone();
            for (a, p) in row[col..].iter_mut().zip(&pivot[col..]) {
                if !p.is_zero() {
                    *a = a.clone() - factor.clone() * p.clone();
                }
            }
        }
    }
    LinearSolution::Unique(m.into_iter().map(|mut row| row.pop().unwrap()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn v(xs: &[i64]) -> Vec<Rational> {
        xs.iter().map(|&x| Rational::from_integer(x.into())).collect()
    }

    #[test]
    fn identity() {
        let a = vec![v(&[1, 0]), v(&[0, 1])];
        assert_eq!(linear_system_solve(&a, &v(&[2, 3])), LinearSolution::Unique(v(&[2, 3])));
    }

    #[test]
    fn dependent_rows() {
        let a = vec![v(&[1, 1]), v(&[2, 2])];
        assert_eq!(linear_system_solve(&a, &v(&[1, 2])), LinearSolution::Singular);
    }

    #[test]
    fn substitution_example() {
        // x = 2 and x - y = 0.
        let a = vec![v(&[1, 0]), v(&[1, -1])];
        assert_eq!(linear_system_solve(&a, &v(&[2, 0])), LinearSolution::Unique(v(&[2, 2])));
    }

    #[test]
    fn needs_row_swap() {
        let a = vec![v(&[0, 1]), v(&[1, 0])];
        assert_eq!(linear_system_solve(&a, &v(&[5, 7])), LinearSolution::Unique(v(&[7, 5])));
    }

    #[test]
    fn non_square_is_singular() {
        let a = vec![v(&[1, 0, 0]), v(&[0, 1, 0])];
        assert_eq!(linear_system_solve(&a, &v(&[1, 1])), LinearSolution::Singular);
    }

    #[test]
    fn float_instantiation() {
        let a = vec![vec![2.0f64, 0.0], vec![0.0, 4.0]];
        assert_eq!(linear_system_solve(&a, &[1.0, 1.0]), LinearSolution::Unique(vec![0.5, 0.25]));
    }
}
