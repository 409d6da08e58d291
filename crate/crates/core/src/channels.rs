// Copyright 2026 The Decohere Authors
// SPDX-License-Identifier: Apache-2.0

//! Unital completely positive maps in Heisenberg-picture Kraus form,
//! `Gamma(A) = sum_a W_a^* A W_a`.
//!
//! Only completely positive maps are representable as [`KrausMap`]; anything
//! else must stay a raw [`Superoperator`].

use crate::error::{Error, Result};
use crate::operators::{
    devectorize_slice, ensure_dim, ensure_square, frobenius_norm, hermitian_eigen, identity, real,
    superop_from_sandwich, unitarity_residual, ComplexMatrix, Superoperator, DEFAULT_TOL,
};

/// Choi eigenvalues below this fraction of the largest are dropped when
/// canonicalizing a Kraus list.
pub const KRAUS_RANK_TOL: f64 = 1e-11;

#[derive(Clone, Debug)]
pub struct KrausMap {
    dim: usize,
    kraus: Vec<ComplexMatrix>,
}

/// The Schrödinger-picture dual `rho -> sum_a W_a rho W_a^*`.
#[derive(Clone, Debug)]
pub struct DualMap<'a> {
    kraus: &'a [ComplexMatrix],
    dim: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChoiMatrix(pub ComplexMatrix);

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CpReport {
    pub completely_positive: bool,
    pub min_eigenvalue: f64,
}

fn check_kraus_dims(kraus: &[ComplexMatrix]) -> Result<usize> {
    let first = kraus
        .first()
        .ok_or_else(|| Error::Invalid("empty Kraus list".into()))?;
    let n = ensure_square(first)?;
    if n == 0 {
        return Err(Error::Invalid("zero-dimensional Kraus operator".into()));
    }
    for w in kraus {
        ensure_dim(w, n)?;
    }
    Ok(n)
}

fn unitality_defect_of(kraus: &[ComplexMatrix], n: usize) -> f64 {
    let sum = kraus
        .iter()
        .fold(ComplexMatrix::zeros(n, n), |acc, w| acc + w.adjoint() * w);
    frobenius_norm(&(sum - identity(n)))
}

impl KrausMap {
    /// Validates unitality `sum W^* W = 1` within `tol` (Frobenius norm).
    pub fn new(kraus: Vec<ComplexMatrix>, tol: f64) -> Result<Self> {
        let dim = check_kraus_dims(&kraus)?;
        let defect = unitality_defect_of(&kraus, dim);
        if !(defect <= tol) {
            return Err(Error::NotUnital { defect });
        }
        Ok(Self { dim, kraus })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            kraus: vec![identity(dim)],
        }
    }

    /// `A -> U^* A U`.
    pub fn unitary(u: ComplexMatrix) -> Result<Self> {
        let n = ensure_square(&u)?;
        let res = unitarity_residual(&u);
        if res > DEFAULT_TOL {
            return Err(Error::NotUnital { defect: res });
        }
        Ok(Self {
            dim: n,
            kraus: vec![u],
        })
    }

    /// Kraus form of a completely positive Heisenberg-picture superoperator.
    pub fn from_superoperator(s: &Superoperator, tol: f64) -> Result<Self> {
        let choi = s.dual().choi();
        let kraus = kraus_from_choi(&choi, s.dim(), tol)?;
        Self::new(kraus, tol.max(1e-8))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn rank(&self) -> usize {
        self.kraus.len()
    }

    pub fn unitality_defect(&self) -> f64 {
        unitality_defect_of(&self.kraus, self.dim)
    }

    pub fn apply(&self, a: &ComplexMatrix) -> Result<ComplexMatrix> {
        ensure_dim(a, self.dim)?;
        Ok(self
            .kraus
            .iter()
            .fold(ComplexMatrix::zeros(self.dim, self.dim), |acc, w| {
                acc + w.adjoint() * a * w
            }))
    }

    pub fn dual(&self) -> DualMap<'_> {
        DualMap {
            kraus: &self.kraus,
            dim: self.dim,
        }
    }

    /// Heisenberg-picture superoperator.
    pub fn superoperator(&self) -> Superoperator {
        self.kraus
            .iter()
            .map(|w| superop_from_sandwich(&w.adjoint(), w).expect("validated dims"))
            .reduce(|a, b| a.add(&b).expect("same dim"))
            .expect("non-empty Kraus list")
    }

    /// Schrödinger-picture superoperator.
    pub fn dual_superoperator(&self) -> Superoperator {
        self.dual().superoperator()
    }

    /// Choi matrix of the Schrödinger-picture map.
    pub fn choi(&self) -> ChoiMatrix {
        ChoiMatrix(self.dual_superoperator().choi())
    }

    pub fn cp_check(&self, tol: f64) -> CpReport {
        cp_check_superop(&self.dual_superoperator(), tol)
    }

    /// `Gamma(A^* A) - Gamma(A^*) Gamma(A)`, positive semidefinite by the Kadison inequality.
    pub fn kadison_defect(&self, a: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.dissipation_function(a, a)
    }

    /// `D(A, B) = Gamma(A^* B) - Gamma(A^*) Gamma(B)`.
    pub fn dissipation_function(&self, a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
        ensure_dim(b, self.dim)?;
        let ad = a.adjoint();
        Ok(self.apply(&(&ad * b))? - self.apply(&ad)? * self.apply(b)?)
    }

    /// Heisenberg composition: `compose(g1, g2)(A) = g1(g2(A))`, Kraus list
    /// `{W2_b W1_a}`.
    pub fn compose(&self, inner: &KrausMap) -> Result<KrausMap> {
        if self.dim != inner.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: inner.dim,
            });
        }
        let kraus = self
            .kraus
            .iter()
            .flat_map(|w1| inner.kraus.iter().map(move |w2| w2 * w1))
            .collect();
        Ok(KrausMap {
            dim: self.dim,
            kraus,
        })
    }

    /// `Gamma^k` with the Kraus list canonicalized after every product.
    pub fn power(&self, k: u32) -> KrausMap {
        let mut result = KrausMap::identity(self.dim);
        let mut base = self.reduced();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                result = result.compose(&base).expect("same dim").reduced();
            }
            e >>= 1;
            if e > 0 {
                base = base.compose(&base).expect("same dim").reduced();
            }
        }
        result
    }

    /// Minimal Kraus list from the eigendecomposition of the Choi matrix.
    pub fn reduced(&self) -> KrausMap {
        if self.kraus.len() == 1 {
            return self.clone();
        }
        match kraus_from_choi(&self.choi().0, self.dim, f64::INFINITY) {
            Ok(kraus) if !kraus.is_empty() => KrausMap {
                dim: self.dim,
                kraus,
            },
            _ => self.clone(),
        }
    }

    /// The implementing unitary when the map is a unitary conjugation within `tol`.
    pub fn as_unitary(&self, tol: f64) -> Option<ComplexMatrix> {
        let reduced = self.reduced();
        match reduced.kraus() {
            [w] if unitarity_residual(w) <= tol => Some(w.clone()),
            _ => None,
        }
    }
}

impl DualMap<'_> {
    pub fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        ensure_dim(rho, self.dim)?;
        Ok(self
            .kraus
            .iter()
            .fold(ComplexMatrix::zeros(self.dim, self.dim), |acc, w| {
                acc + w * rho * w.adjoint()
            }))
    }

    pub fn superoperator(&self) -> Superoperator {
        self.kraus
            .iter()
            .map(|w| superop_from_sandwich(w, &w.adjoint()).expect("validated dims"))
            .reduce(|a, b| a.add(&b).expect("same dim"))
            .expect("non-empty Kraus list")
    }
}

/// Complete-positivity test of a Schrödinger-picture superoperator through
/// its Choi matrix.
pub fn cp_check_superop(s: &Superoperator, tol: f64) -> CpReport {
    let (values, _) = hermitian_eigen(&s.choi());
    let min = values.first().copied().unwrap_or(0.0);
    CpReport {
        completely_positive: min >= -tol,
        min_eigenvalue: min,
    }
}

/// Kraus operators `K` with `S(X) = sum K X K^*` from the Choi matrix of `S`.
/// Fails when an eigenvalue is below `-neg_tol`.
fn kraus_from_choi(choi: &ComplexMatrix, n: usize, neg_tol: f64) -> Result<Vec<ComplexMatrix>> {
    let (values, vectors) = hermitian_eigen(choi);
    let max = values.last().copied().unwrap_or(0.0);
    let min = values.first().copied().unwrap_or(0.0);
    if min < -neg_tol {
        return Err(Error::NotCompletelyPositive { min_eigenvalue: min });
    }
    let cut = KRAUS_RANK_TOL * max.max(0.0);
    let mut kraus = Vec::new();
    for (k, &lambda) in values.iter().enumerate().rev() {
        if lambda <= cut || lambda <= 0.0 {
            continue;
        }
        let v = vectors.column(k).into_owned();
        kraus.push(devectorize_slice(v.as_slice(), n) * real(lambda.sqrt()));
    }
    Ok(kraus)
}
