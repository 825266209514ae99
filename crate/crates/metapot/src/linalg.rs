//! Sparse direct solves shared by every module.
//!
//! Systems are assembled as coordinate triplets, factored once with a sparse
//! LU (row pivoting) and refined with one step of iterative refinement.

use faer::linalg::solvers::SolveCore;
use faer::sparse::{SparseColMat, Triplet};
use faer::{Conj, Mat};

use crate::error::{Error, Result};

/// A square sparse matrix in compressed rows, kept for residual evaluation.
#[derive(Debug, Clone)]
pub struct SparseMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl SparseMatrix {
    /// Duplicate entries are summed.
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut sorted: Vec<(usize, usize, f64)> = triplets.to_vec();
        sorted.sort_by_key(|e| (e.0, e.1));
        let mut row_ptr = vec![0usize; n + 1];
        let mut cols = Vec::with_capacity(sorted.len());
        let mut vals: Vec<f64> = Vec::with_capacity(sorted.len());
        let mut last: Option<(usize, usize)> = None;
        for (i, j, v) in sorted {
            if last == Some((i, j)) {
                *vals.last_mut().expect("entry exists") += v;
                continue;
            }
            last = Some((i, j));
            row_ptr[i + 1] += 1;
            cols.push(j);
            vals.push(v);
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self { n, row_ptr, cols, vals }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                (self.row_ptr[i]..self.row_ptr[i + 1])
                    .map(|k| self.vals[k] * x[self.cols[k]])
                    .sum()
            })
            .collect()
    }

    /// Largest absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| {
                self.vals[self.row_ptr[i]..self.row_ptr[i + 1]]
                    .iter()
                    .map(|v| v.abs())
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    fn triplets(&self) -> Vec<Triplet<usize, usize, f64>> {
        let mut out = Vec::with_capacity(self.vals.len());
        for i in 0..self.n {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                out.push(Triplet::new(i, self.cols[k], self.vals[k]));
            }
        }
        out
    }
}

/// A factored sparse system ready for repeated solves.
pub struct Factored {
    matrix: SparseMatrix,
    lu: faer::sparse::linalg::solvers::Lu<usize, f64>,
}

impl std::fmt::Debug for Factored {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Factored").field("n", &self.matrix.n).finish()
    }
}

impl Factored {
    pub fn new(matrix: SparseMatrix) -> Result<Self> {
        let n = matrix.n;
        let csc = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &matrix.triplets())
            .map_err(|e| Error::SolveFailure(format!("assembly: {e:?}")))?;
        let lu = csc
            .sp_lu()
            .map_err(|e| Error::SolveFailure(format!("factorization: {e:?}")))?;
        Ok(Self { matrix, lu })
    }

    pub fn matrix(&self) -> &SparseMatrix {
        &self.matrix
    }

    fn raw_solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.matrix.n;
        let mut m = Mat::<f64>::from_fn(n, 1, |i, _| rhs[i]);
        self.lu.solve_in_place_with_conj(Conj::No, m.as_mut());
        (0..n).map(|i| m[(i, 0)]).collect()
    }

    /// Solve with one refinement step; fails on non-finite output.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let mut x = self.raw_solve(rhs);
        let ax = self.matrix.mul_vec(&x);
        let r: Vec<f64> = rhs.iter().zip(&ax).map(|(b, a)| b - a).collect();
        let d = self.raw_solve(&r);
        for (xi, di) in x.iter_mut().zip(&d) {
            *xi += di;
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::SolveFailure("non-finite solution".into()));
        }
        Ok(x)
    }

    /// Solve `A^T x = rhs` with one refinement step.
    pub fn solve_transpose(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.matrix.n;
        let run = |b: &[f64]| {
            let mut m = Mat::<f64>::from_fn(n, 1, |i, _| b[i]);
            self.lu.solve_transpose_in_place_with_conj(Conj::No, m.as_mut());
            (0..n).map(|i| m[(i, 0)]).collect::<Vec<f64>>()
        };
        let mut x = run(rhs);
        let mut atx = vec![0.0; n];
        for (i, &xi) in x.iter().enumerate() {
            for k in self.matrix.row_ptr[i]..self.matrix.row_ptr[i + 1] {
                atx[self.matrix.cols[k]] += self.matrix.vals[k] * xi;
            }
        }
        let r: Vec<f64> = rhs.iter().zip(&atx).map(|(b, a)| b - a).collect();
        for (xi, di) in x.iter_mut().zip(run(&r)) {
            *xi += di;
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::SolveFailure("non-finite solution".into()));
        }
        Ok(x)
    }

    /// Max-norm residual of `A x − b`.
    pub fn residual(&self, x: &[f64], rhs: &[f64]) -> f64 {
        self.matrix
            .mul_vec(x)
            .iter()
            .zip(rhs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

pub fn solve(n: usize, triplets: &[(usize, usize, f64)], rhs: &[f64]) -> Result<Vec<f64>> {
    Factored::new(SparseMatrix::from_triplets(n, triplets))?.solve(rhs)
}
