//! Symmetric positive-definite solvers for network Laplacians.

// `!(x > 0.0)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Compressed sparse row storage of a symmetric matrix (both triangles).
#[derive(Debug, Clone)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl CsrMatrix {
    /// Builds from `(row, col, value)` triplets; duplicates are summed.
    pub fn from_triplets(n: usize, mut triplets: Vec<(usize, usize, f64)>) -> Self {
        triplets.sort_by_key(|t| (t.0, t.1));
        let mut row_ptr = vec![0usize; n + 1];
        let mut cols = Vec::with_capacity(triplets.len());
        let mut vals: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            if last == Some((r, c)) {
                *vals.last_mut().expect("previous entry") += v;
                continue;
            }
            cols.push(c);
            vals.push(v);
            row_ptr[r + 1] += 1;
            last = Some((r, c));
        }
        for r in 0..n {
            row_ptr[r + 1] += row_ptr[r];
        }
        Self {
            n,
            row_ptr,
            cols,
            vals,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn mul_vec(&self, x: &[f64], y: &mut [f64]) {
        for (r, out) in y.iter_mut().enumerate().take(self.n) {
            let mut acc = 0.0;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            *out = acc;
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n)
            .map(|r| {
                (self.row_ptr[r]..self.row_ptr[r + 1])
                    .find(|&k| self.cols[k] == r)
                    .map_or(0.0, |k| self.vals[k])
            })
            .collect()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for r in 0..self.n {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                m[(r, self.cols[k])] += self.vals[k];
            }
        }
        m
    }
}

/// Outcome of a linear solve.
#[derive(Debug, Clone)]
pub struct Solution {
    pub x: Vec<f64>,
    /// `||b - A x|| / ||b||`.
    pub relative_residual: f64,
    pub iterations: usize,
    pub method: &'static str,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn relative_residual(a: &CsrMatrix, x: &[f64], b: &[f64]) -> f64 {
    let mut ax = vec![0.0; a.dim()];
    a.mul_vec(x, &mut ax);
    let r: Vec<f64> = b.iter().zip(&ax).map(|(b, a)| b - a).collect();
    let nb = norm(b);
    if nb == 0.0 {
        norm(&r)
    } else {
        norm(&r) / nb
    }
}

/// Jacobi-preconditioned conjugate gradients.
pub fn conjugate_gradient(a: &CsrMatrix, b: &[f64], tol: f64, max_iter: usize) -> Result<Solution> {
    let n = a.dim();
    let diag = a.diagonal();
    if diag.iter().any(|&d| !(d > 0.0)) {
        return Err(Error::Numerical("non-positive diagonal entry".into()));
    }
    let inv: Vec<f64> = diag.iter().map(|d| 1.0 / d).collect();
    let nb = norm(b);
    let mut x = vec![0.0; n];
    if nb == 0.0 {
        return Ok(Solution {
            x,
            relative_residual: 0.0,
            iterations: 0,
            method: "cg",
        });
    }
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&inv).map(|(r, d)| r * d).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    for it in 1..=max_iter {
        a.mul_vec(&p, &mut ap);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            return Err(Error::Numerical("matrix is not positive definite".into()));
        }
        let step = rz / pap;
        for k in 0..n {
            x[k] += step * p[k];
            r[k] -= step * ap[k];
        }
        if norm(&r) <= tol * nb {
            // Recompute the true residual to guard against drift.
            let rel = relative_residual(a, &x, b);
            if rel <= tol {
                return Ok(Solution {
                    x,
                    relative_residual: rel,
                    iterations: it,
                    method: "cg",
                });
            }
            r = {
                let mut ax = vec![0.0; n];
                a.mul_vec(&x, &mut ax);
                b.iter().zip(&ax).map(|(b, a)| b - a).collect()
            };
        }
        for k in 0..n {
            z[k] = r[k] * inv[k];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for k in 0..n {
            p[k] = z[k] + beta * p[k];
        }
    }
    let rel = relative_residual(a, &x, b);
    Err(Error::Numerical(format!(
        "conjugate gradients did not converge in {max_iter} iterations (residual {rel:e})"
    )))
}

/// Dense Cholesky solve followed by one step of iterative refinement.
pub fn dense_cholesky(a: &CsrMatrix, b: &[f64]) -> Result<Solution> {
    let dense = a.to_dense();
    let chol = dense
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Numerical("matrix is not positive definite".into()))?;
    let rhs = DVector::from_column_slice(b);
    let mut x = chol.solve(&rhs);
    let r = &rhs - &dense * &x;
    x += chol.solve(&r);
    let x: Vec<f64> = x.iter().copied().collect();
    let rel = relative_residual(a, &x, b);
    Ok(Solution {
        x,
        relative_residual: rel,
        iterations: 1,
        method: "cholesky",
    })
}

/// Unknown count below which the dense factorization is used.
pub const DENSE_LIMIT: usize = 1000;

/// Dense factorization for small systems, conjugate gradients otherwise.
pub fn solve_spd(a: &CsrMatrix, b: &[f64], tol: f64) -> Result<Solution> {
    if a.dim() <= DENSE_LIMIT {
        let s = dense_cholesky(a, b)?;
        if s.relative_residual <= tol.max(1e-13) {
            return Ok(s);
        }
    }
    conjugate_gradient(a, b, tol, 20 * a.dim() + 1000)
}
