//! Sparse direct LU behind a small interface, single-threaded for
//! reproducible runs.

use std::sync::Once;

use faer::prelude::*;
use faer::sparse::SparseColMat;
use thiserror::Error;

use crate::sparse::SparseMatrix;

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("matrix must be square, got {0}x{1}")]
    NotSquare(usize, usize),
    #[error("LU factorization failed (singular or structurally deficient matrix)")]
    Factorization,
    #[error("solution contains non-finite values")]
    NonFinite,
}

static INIT: Once = Once::new();

fn init_faer() {
    INIT.call_once(|| {
        faer::set_global_parallelism(faer::Parallelism::None);
    });
}

/// LU factorization of a sparse square matrix.
pub struct SparseLu {
    lu: faer::sparse::linalg::solvers::Lu<usize, f64>,
    n: usize,
}

impl SparseLu {
    pub fn factor(m: &SparseMatrix) -> Result<Self, SolveError> {
        init_faer();
        if m.nrows() != m.ncols() {
            return Err(SolveError::NotSquare(m.nrows(), m.ncols()));
        }
        let triplets: Vec<(usize, usize, f64)> = m.iter().collect();
        let mat = SparseColMat::<usize, f64>::try_new_from_triplets(m.nrows(), m.ncols(), &triplets)
            .map_err(|_| SolveError::Factorization)?;
        let lu = mat.sp_lu().map_err(|_| SolveError::Factorization)?;
        Ok(Self { lu, n: m.nrows() })
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        assert_eq!(rhs.len(), self.n, "rhs length mismatch");
        let b = faer::mat::Mat::from_fn(self.n, 1, |i, _| rhs[i]);
        let x = self.lu.solve(&b);
        (0..self.n).map(|i| x[(i, 0)]).collect()
    }

    pub fn solve_checked(&self, rhs: &[f64]) -> Result<Vec<f64>, SolveError> {
        let x = self.solve(rhs);
        if x.iter().all(|v| v.is_finite()) {
            Ok(x)
        } else {
            Err(SolveError::NonFinite)
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }
}

impl std::fmt::Debug for SparseLu {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "SparseLu(n = {})", self.n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_system() {
        let m = SparseMatrix::from_triplets(2, 2, &[(0, 0, 4.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, 3.0)])
            .unwrap();
        let lu = SparseLu::factor(&m).unwrap();
        let x = lu.solve(&[1.0, 2.0]);
        assert!((x[0] - 1.0 / 11.0).abs() < 1e-14);
        assert!((x[1] - 7.0 / 11.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_non_square() {
        let m = SparseMatrix::zeros(2, 3);
        assert!(matches!(SparseLu::factor(&m), Err(SolveError::NotSquare(2, 3))));
    }

    #[test]
    fn laplacian_poisson_solve() {
        // 1D Dirichlet Laplacian, u'' = -1 on 5 interior nodes
        let n = 5;
        let mut trip = Vec::new();
        for i in 0..n {
            trip.push((i, i, 2.0));
            if i > 0 {
                trip.push((i, i - 1, -1.0));
            }
            if i + 1 < n {
                trip.push((i, i + 1, -1.0));
            }
        }
        let m = SparseMatrix::from_triplets(n, n, &trip).unwrap();
        let lu = SparseLu::factor(&m).unwrap();
        let h = 1.0 / (n as f64 + 1.0);
        let x = lu.solve(&vec![h * h; n]);
        for (i, &xi) in x.iter().enumerate() {
            let t = (i as f64 + 1.0) * h;
            let exact = 0.5 * t * (1.0 - t);
            assert!((xi - exact).abs() < 1e-12);
        }
    }
}
