// Copyright 2026 The Decohere Authors
// SPDX-License-Identifier: Apache-2.0

//! Rank decisions, nullspaces and subspace geometry.
//!
//! Every rank decision uses the same rule: a singular value counts as zero when
//! it is below `rel_tol * s_max`.

use nalgebra::{DVector, SVD};

use crate::error::{Error, Result};
use crate::operators::{devectorize_slice, real, vectorize, ComplexMatrix, C64};

/// Relative singular-value threshold for nullspaces and spans.
pub const RANK_TOL: f64 = 1e-9;
/// Principal-angle tolerance for subspace comparisons.
pub const ANGLE_TOL: f64 = 1e-7;

/// Full SVD of a (possibly wide) matrix. Returns singular values sorted
/// descending together with the matching right singular vectors as columns
/// of an `ncols x ncols` unitary.
fn right_svd(m: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    let (rows, cols) = m.shape();
    // Reduce tall systems to an upright square triangle first.
    let square = if rows > cols {
        m.clone().qr().r()
    } else if rows < cols {
        let mut padded = ComplexMatrix::zeros(cols, cols);
        padded.view_mut((0, 0), (rows, cols)).copy_from(m);
        padded
    } else {
        m.clone()
    };
    let svd = SVD::try_new(square, false, true, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Numerical("SVD did not converge".into()))?;
    let v_t = svd.v_t.expect("requested V^T");
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let values = order.iter().map(|&k| svd.singular_values[k]).collect();
    let v = ComplexMatrix::from_fn(cols, cols, |r, k| v_t[(order[k], r)].conj());
    Ok((values, v))
}

/// Orthonormal basis (as columns) of `{x : M x = 0}`.
pub fn nullspace(m: &ComplexMatrix, rel_tol: f64) -> Result<ComplexMatrix> {
    let cols = m.ncols();
    if cols == 0 {
        return Ok(ComplexMatrix::zeros(0, 0));
    }
    if m.nrows() == 0 {
        return Ok(ComplexMatrix::identity(cols, cols));
    }
    let (values, v) = right_svd(m)?;
    let s_max = values[0];
    if s_max == 0.0 {
        return Ok(ComplexMatrix::identity(cols, cols));
    }
    let rank = values.iter().filter(|&&s| s >= rel_tol * s_max).count();
    Ok(v.columns(rank, cols - rank).into_owned())
}

/// Singular values, descending.
pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Unitary polar factor `U` of `M = U |M|`.
pub fn polar_unitary(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let svd = SVD::try_new(m.clone(), true, true, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Numerical("SVD did not converge".into()))?;
    Ok(svd.u.expect("requested U") * svd.v_t.expect("requested V^T"))
}

/// Matrix exponential (Padé approximant with scaling and squaring).
pub fn expm(m: &ComplexMatrix) -> ComplexMatrix {
    m.clone().exp()
}

/// Stacks matrices vertically; all must share the column count.
pub fn vstack(blocks: &[ComplexMatrix]) -> ComplexMatrix {
    let cols = blocks.first().map_or(0, |b| b.ncols());
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = ComplexMatrix::zeros(rows, cols);
    let mut r = 0;
    for b in blocks {
        out.view_mut((r, 0), (b.nrows(), cols)).copy_from(b);
        r += b.nrows();
    }
    out
}

pub fn hstack(blocks: &[ComplexMatrix], rows: usize) -> ComplexMatrix {
    let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = ComplexMatrix::zeros(rows, cols);
    let mut c = 0;
    for b in blocks {
        out.view_mut((0, c), (rows, b.ncols())).copy_from(b);
        c += b.ncols();
    }
    out
}

/// A linear subspace of `C^d` held as an orthonormal column basis.
#[derive(Clone, Debug)]
pub struct Subspace {
    ambient: usize,
    basis: ComplexMatrix,
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Self {
            ambient,
            basis: ComplexMatrix::zeros(ambient, 0),
        }
    }

    pub fn full(ambient: usize) -> Self {
        Self {
            ambient,
            basis: ComplexMatrix::identity(ambient, ambient),
        }
    }

    /// Wraps columns that are already orthonormal.
    pub fn from_orthonormal(basis: ComplexMatrix) -> Self {
        Self {
            ambient: basis.nrows(),
            basis,
        }
    }

    /// Span of the columns of `vectors`.
    pub fn span_columns(vectors: &ComplexMatrix, rel_tol: f64) -> Result<Self> {
        let ambient = vectors.nrows();
        if vectors.ncols() == 0 {
            return Ok(Self::zero(ambient));
        }
        let svd = SVD::try_new(vectors.clone(), true, false, f64::EPSILON, 10_000)
            .ok_or_else(|| Error::Numerical("SVD did not converge".into()))?;
        let u = svd.u.expect("requested U");
        let s_max = svd.singular_values.iter().fold(0.0f64, |m, s| m.max(*s));
        if s_max == 0.0 {
            return Ok(Self::zero(ambient));
        }
        let keep: Vec<usize> = (0..svd.singular_values.len())
            .filter(|&k| svd.singular_values[k] >= rel_tol * s_max)
            .collect();
        let basis = ComplexMatrix::from_fn(ambient, keep.len(), |r, k| u[(r, keep[k])]);
        Ok(Self { ambient, basis })
    }

    /// Span of a list of `n x n` matrices, vectorized.
    pub fn span_matrices(mats: &[ComplexMatrix], n: usize, rel_tol: f64) -> Result<Self> {
        let cols: Vec<ComplexMatrix> = mats
            .iter()
            .map(|m| ComplexMatrix::from_column_slice(n * n, 1, m.as_slice()))
            .collect();
        Self::span_columns(&hstack(&cols, n * n), rel_tol)
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> &ComplexMatrix {
        &self.basis
    }

    pub fn basis_vector(&self, k: usize) -> DVector<C64> {
        self.basis.column(k).into_owned()
    }

    /// Basis vectors reshaped to `n x n` matrices (column stacking).
    pub fn basis_matrices(&self, n: usize) -> Vec<ComplexMatrix> {
        (0..self.dim())
            .map(|k| devectorize_slice(self.basis.column(k).as_slice(), n))
            .collect()
    }

    pub fn projector(&self) -> ComplexMatrix {
        &self.basis * self.basis.adjoint()
    }

    /// `|| (1 - P) v ||`.
    pub fn residual(&self, v: &DVector<C64>) -> f64 {
        let coeffs = self.basis.adjoint() * v;
        (v - &self.basis * coeffs).norm()
    }

    pub fn residual_matrix(&self, m: &ComplexMatrix) -> f64 {
        self.residual(&vectorize(m))
    }

    /// Sine of the largest principal angle between `self` and its projection
    /// into `other`; zero iff `self` is contained in `other`.
    pub fn containment_residual(&self, other: &Subspace) -> f64 {
        if self.dim() == 0 {
            return 0.0;
        }
        let out = &self.basis - &other.basis * (other.basis.adjoint() * &self.basis);
        out.singular_values().iter().fold(0.0f64, |m, s| m.max(*s))
    }

    pub fn is_contained_in(&self, other: &Subspace, tol: f64) -> bool {
        self.containment_residual(other) < tol
    }

    /// Largest principal-angle sine in either direction; `f64::INFINITY` for
    /// subspaces of different dimension.
    pub fn distance(&self, other: &Subspace) -> f64 {
        if self.dim() != other.dim() {
            return f64::INFINITY;
        }
        self.containment_residual(other)
            .max(other.containment_residual(self))
    }

    pub fn equals(&self, other: &Subspace, tol: f64) -> bool {
        self.distance(other) < tol
    }

    pub fn intersect(&self, other: &Subspace, rel_tol: f64) -> Result<Subspace> {
        if self.dim() == 0 || other.dim() == 0 {
            return Ok(Self::zero(self.ambient));
        }
        let stacked = hstack(&[self.basis.clone(), -other.basis.clone()], self.ambient);
        let null = nullspace(&stacked, rel_tol)?;
        let coeffs = null.rows(0, self.dim()).into_owned();
        let vectors = &self.basis * coeffs;
        Subspace::span_columns(&vectors, rel_tol)
    }

    pub fn sum(&self, other: &Subspace, rel_tol: f64) -> Result<Subspace> {
        Subspace::span_columns(&hstack(&[self.basis.clone(), other.basis.clone()], self.ambient), rel_tol)
    }

    /// Adds `v` unless its component orthogonal to the span is below
    /// `rel_tol * |v|`. Returns whether the dimension grew.
    pub fn try_extend(&mut self, v: &DVector<C64>, rel_tol: f64) -> bool {
        let norm = v.norm();
        if norm == 0.0 {
            return false;
        }
        let mut w = v.clone();
        // Two passes of classical Gram-Schmidt.
        for _ in 0..2 {
            let coeffs = self.basis.adjoint() * &w;
            w -= &self.basis * coeffs;
        }
        let res = w.norm();
        if res <= rel_tol * norm {
            return false;
        }
        w /= real(res);
        let mut basis = ComplexMatrix::zeros(self.ambient, self.dim() + 1);
        basis.view_mut((0, 0), (self.ambient, self.dim())).copy_from(&self.basis);
        basis.column_mut(self.dim()).copy_from(&w);
        self.basis = basis;
        true
    }
}
