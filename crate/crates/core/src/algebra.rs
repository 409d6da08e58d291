// Copyright 2026 The Decohere Authors
// SPDX-License-Identifier: Apache-2.0

//! Finite-dimensional C*-algebras of operators: commutants, generated
//! algebras, block structure, and the decoherence-free subalgebras of
//! channels and semigroups.

use std::fmt;

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channels::KrausMap;
use crate::error::{Error, Result};
use crate::lindblad::GKLSGenerator;
use crate::linalg::{nullspace, polar_unitary, singular_values, vstack, Subspace, ANGLE_TOL, RANK_TOL};
use crate::operators::{
    commutator, commutator_superop, devectorize_slice, ensure_dim, ensure_square, frobenius_norm,
    hermitian_eigen, hermitian_part, identity, real, tensor_product, unitarity_residual, vectorize,
    c, ComplexMatrix, DensityMatrix, LiouvilleMetric, Superoperator, C64, FAITHFUL_TOL,
};

/// Seed used when callers do not supply one.
pub const DEFAULT_SEED: u64 = 0x0dec_0be5;

const NEGLIGIBLE: f64 = 1e-12;

/// Relative threshold for growing a span by a new product.
const SPAN_TOL: f64 = 1e-8;
/// Minimum separation of eigenvalue clusters in the randomized steps.
const GAP_TOL: f64 = 1e-6;
const MAX_DRAWS: usize = 32;

/// A unital *-subalgebra of `M_n`, stored as a Frobenius-orthonormal basis.
#[derive(Clone, Debug)]
pub struct MatrixAlgebra {
    n: usize,
    space: Subspace,
}

/// Largest closure defects of a candidate algebra.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClosureReport {
    pub unit: f64,
    pub adjoint: f64,
    pub product: f64,
}

impl ClosureReport {
    pub fn max(&self) -> f64 {
        self.unit.max(self.adjoint).max(self.product)
    }
}

impl MatrixAlgebra {
    pub fn full(n: usize) -> Self {
        Self {
            n,
            space: Subspace::full(n * n),
        }
    }

    /// `C 1`.
    pub fn scalars(n: usize) -> Self {
        let unit = identity(n) / real((n as f64).sqrt());
        Self {
            n,
            space: Subspace::from_orthonormal(ComplexMatrix::from_column_slice(n * n, 1, unit.as_slice())),
        }
    }

    /// Wraps a subspace of vectorized `n x n` matrices without checking closure.
    pub fn from_subspace(n: usize, space: Subspace) -> Result<Self> {
        if space.ambient() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: space.ambient(),
            });
        }
        Ok(Self { n, space })
    }

    /// Span of `mats`, required to be a unital *-algebra within `tol`.
    pub fn from_matrices(mats: &[ComplexMatrix], n: usize, tol: f64) -> Result<Self> {
        for m in mats {
            ensure_dim(m, n)?;
        }
        let alg = Self {
            n,
            space: Subspace::span_matrices(mats, n, RANK_TOL)?,
        };
        alg.validate(tol)?;
        Ok(alg)
    }

    /// Matrix size `n`.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Dimension as a linear space.
    pub fn dimension(&self) -> usize {
        self.space.dim()
    }

    pub fn space(&self) -> &Subspace {
        &self.space
    }

    pub fn basis(&self) -> Vec<ComplexMatrix> {
        self.space.basis_matrices(self.n)
    }

    pub fn is_full(&self) -> bool {
        self.dimension() == self.n * self.n
    }

    /// Distance of `a` from the algebra relative to `max(1, |a|)`.
    pub fn residual(&self, a: &ComplexMatrix) -> f64 {
        self.space.residual_matrix(a) / 1.0f64.max(frobenius_norm(a))
    }

    pub fn contains(&self, a: &ComplexMatrix, tol: f64) -> bool {
        self.residual(a) <= tol
    }

    pub fn containment_residual(&self, other: &MatrixAlgebra) -> f64 {
        self.space.containment_residual(&other.space)
    }

    pub fn is_contained_in(&self, other: &MatrixAlgebra, tol: f64) -> bool {
        self.containment_residual(other) < tol
    }

    pub fn equals(&self, other: &MatrixAlgebra, tol: f64) -> bool {
        self.space.equals(&other.space, tol)
    }

    pub fn closure_report(&self) -> ClosureReport {
        let basis = self.basis();
        let unit = self.residual(&identity(self.n));
        let adjoint = basis
            .iter()
            .map(|b| self.residual(&b.adjoint()))
            .fold(0.0, f64::max);
        let mut product = 0.0f64;
        for a in &basis {
            for b in &basis {
                product = product.max(self.residual(&(a * b)));
            }
        }
        ClosureReport {
            unit,
            adjoint,
            product,
        }
    }

    pub fn validate(&self, tol: f64) -> Result<()> {
        let report = self.closure_report();
        if report.max() > tol {
            return Err(Error::Precondition(format!(
                "not a unital *-algebra: unit {:e}, adjoint {:e}, product {:e}",
                report.unit, report.adjoint, report.product
            )));
        }
        Ok(())
    }

    pub fn intersect(&self, other: &MatrixAlgebra) -> Result<MatrixAlgebra> {
        ensure_same_n(self.n, other.n)?;
        Ok(Self {
            n: self.n,
            space: self.space.intersect(&other.space, RANK_TOL)?,
        })
    }

    /// The commutant `A'`.
    pub fn commutant(&self) -> Result<MatrixAlgebra> {
        if self.is_full() {
            return Ok(Self::scalars(self.n));
        }
        let basis = self.basis();
        let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED);
        let mut generators = Vec::new();
        // Two generic elements generate the algebra; extra draws and the full
        // basis are fallbacks confirmed by a direct commutation test.
        for draws in [2usize, 4, 8] {
            while generators.len() < draws {
                generators.push(random_element(&basis, &mut rng));
            }
            let candidate = commutant(&generators, self.n)?;
            if commutes_with_all(&candidate.basis(), &basis) {
                return Ok(candidate);
            }
        }
        commutant(&basis, self.n)
    }

    /// `Z = A ∩ A'`.
    pub fn center(&self) -> Result<MatrixAlgebra> {
        self.intersect(&self.commutant()?)
    }

    pub fn is_abelian(&self) -> bool {
        let basis = self.basis();
        commutes_with_all(&basis, &basis)
    }

    /// Orthogonal (Frobenius) projection of `a` into the algebra.
    pub fn project(&self, a: &ComplexMatrix) -> Result<ComplexMatrix> {
        ensure_dim(a, self.n)?;
        let v = vectorize(a);
        let q = self.space.basis();
        let p = q * (q.adjoint() * v);
        Ok(devectorize_slice(p.as_slice(), self.n))
    }
}

impl fmt::Display for MatrixAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "*-subalgebra of M_{} of dimension {}", self.n, self.dimension())
    }
}

fn ensure_same_n(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch { expected: a, found: b });
    }
    Ok(())
}

fn commutes_with_all(xs: &[ComplexMatrix], ys: &[ComplexMatrix]) -> bool {
    xs.iter().all(|x| {
        ys.iter()
            .all(|y| frobenius_norm(&commutator(x, y)) <= 1e-8 * (1.0f64.max(frobenius_norm(x) * frobenius_norm(y))))
    })
}

fn random_element(basis: &[ComplexMatrix], rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let n = basis.first().map_or(0, |b| b.nrows());
    basis.iter().fold(ComplexMatrix::zeros(n, n), |acc, b| {
        acc + b * c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
}

fn random_hermitian(basis: &[ComplexMatrix], rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let n = basis.first().map_or(0, |b| b.nrows());
    basis.iter().fold(ComplexMatrix::zeros(n, n), |acc, b| {
        let h1 = hermitian_part(b);
        let h2 = hermitian_part(&(b * C64::i()));
        acc + h1 * real(rng.random_range(-1.0..1.0)) + h2 * real(rng.random_range(-1.0..1.0))
    })
}

/// Unit-norm copies, dropping operators that are round-off relative to the largest.
fn normalized(ops: &[ComplexMatrix]) -> Vec<ComplexMatrix> {
    let largest = ops.iter().map(frobenius_norm).fold(0.0, f64::max);
    ops.iter()
        .filter_map(|a| {
            let norm = frobenius_norm(a);
            (norm > NEGLIGIBLE * largest && norm > 0.0).then(|| a / real(norm))
        })
        .collect()
}

/// `{ops, ops^*}'`: all `X` commuting with every operator and its adjoint.
pub fn commutant(ops: &[ComplexMatrix], n: usize) -> Result<MatrixAlgebra> {
    for a in ops {
        ensure_dim(a, n)?;
    }
    let ops = normalized(ops);
    if ops.is_empty() {
        return Ok(MatrixAlgebra::full(n));
    }
    let mut rows = Vec::with_capacity(2 * ops.len());
    for a in &ops {
        rows.push(commutator_superop(a)?.into_matrix());
        let ad = a.adjoint();
        if frobenius_norm(&(&ad - a)) > 1e-14 {
            rows.push(commutator_superop(&ad)?.into_matrix());
        }
    }
    let null = nullspace(&vstack(&rows), RANK_TOL)?;
    Ok(MatrixAlgebra {
        n,
        space: Subspace::from_orthonormal(null),
    })
}

/// `Alg(ops)`: the smallest unital *-algebra containing `ops`.
pub fn generated_algebra(ops: &[ComplexMatrix], n: usize) -> Result<MatrixAlgebra> {
    for a in ops {
        ensure_dim(a, n)?;
    }
    let mut generators = normalized(ops);
    let adjoints: Vec<ComplexMatrix> = generators.iter().map(|a| a.adjoint()).collect();
    generators.extend(adjoints);

    let mut space = MatrixAlgebra::scalars(n).space;
    let mut queue: Vec<ComplexMatrix> = vec![identity(n) / real((n as f64).sqrt())];
    while let Some(x) = queue.pop() {
        for g in &generators {
            let y = g * &x;
            let before = space.dim();
            if space.try_extend(&vectorize(&y), SPAN_TOL) {
                queue.push(devectorize_slice(space.basis().column(before).as_slice(), n));
            }
            if space.dim() == n * n {
                return Ok(MatrixAlgebra::full(n));
            }
        }
    }
    Ok(MatrixAlgebra { n, space })
}

/// Wedderburn form `U^* A U = ⊕_j M_{n_j} ⊗ 1_{d_j}`.
#[derive(Clone, Debug)]
pub struct BlockDecomposition {
    blocks: Vec<(usize, usize)>,
    conjugator: ComplexMatrix,
}

impl BlockDecomposition {
    /// `(n_j, d_j)` pairs, largest blocks first.
    pub fn blocks(&self) -> &[(usize, usize)] {
        &self.blocks
    }

    /// Unitary whose columns are the adapted basis; block `j` occupies a
    /// contiguous column range with index `k d_j + m`.
    pub fn conjugator(&self) -> &ComplexMatrix {
        &self.conjugator
    }

    pub fn algebra_dimension(&self) -> usize {
        self.blocks.iter().map(|(nj, _)| nj * nj).sum()
    }

    pub fn commutant_dimension(&self) -> usize {
        self.blocks.iter().map(|(_, dj)| dj * dj).sum()
    }

    /// `U^* a U` with its block-tensor part removed, in Frobenius norm.
    pub fn off_pattern_residual(&self, a: &ComplexMatrix) -> f64 {
        let u = &self.conjugator;
        let conj = u.adjoint() * a * u;
        let mut pattern = ComplexMatrix::zeros(conj.nrows(), conj.ncols());
        let mut offset = 0;
        for &(nj, dj) in &self.blocks {
            let mut core = ComplexMatrix::zeros(nj, nj);
            for k in 0..nj {
                for l in 0..nj {
                    let s: C64 = (0..dj).map(|m| conj[(offset + k * dj + m, offset + l * dj + m)]).sum();
                    core[(k, l)] = s / real(dj as f64);
                }
            }
            let block = tensor_product(&core, &identity(dj));
            pattern
                .view_mut((offset, offset), (nj * dj, nj * dj))
                .copy_from(&block);
            offset += nj * dj;
        }
        frobenius_norm(&(conj - pattern))
    }

    /// Largest off-pattern residual over an algebra's basis.
    pub fn max_off_pattern_residual(&self, alg: &MatrixAlgebra) -> f64 {
        alg.basis()
            .iter()
            .map(|b| self.off_pattern_residual(b))
            .fold(0.0, f64::max)
    }
}

/// Eigenvalue clusters of a hermitian matrix, as eigenvector column groups.
/// `None` when clusters are closer than the gap tolerance.
fn spectral_clusters(h: &ComplexMatrix) -> Option<Vec<ComplexMatrix>> {
    let (values, vectors) = hermitian_eigen(h);
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
    let mut groups: Vec<Vec<usize>> = vec![vec![0]];
    for k in 1..values.len() {
        let gap = (values[k] - values[k - 1]) / scale;
        if gap > 1e-7 {
            if gap < GAP_TOL {
                return None;
            }
            groups.push(vec![k]);
        } else {
            groups.last_mut().expect("non-empty").push(k);
        }
    }
    Some(
        groups
            .into_iter()
            .map(|g| ComplexMatrix::from_fn(vectors.nrows(), g.len(), |r, c| vectors[(r, g[c])]))
            .collect(),
    )
}

/// Block decomposition by the randomized central-element method; the result
/// depends only on `alg` and `seed`.
pub fn block_decompose(alg: &MatrixAlgebra, seed: u64) -> Result<BlockDecomposition> {
    let n = alg.n;
    alg.validate(1e-7)?;
    if alg.is_full() {
        return Ok(BlockDecomposition {
            blocks: vec![(n, 1)],
            conjugator: identity(n),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let center = alg.center()?;
    let central_basis = center.basis();

    let mut central = None;
    for _ in 0..MAX_DRAWS {
        let z = random_hermitian(&central_basis, &mut rng);
        if let Some(groups) = spectral_clusters(&z) {
            if groups.len() == center.dimension() {
                central = Some(groups);
                break;
            }
        }
    }
    let central = central.ok_or_else(|| {
        Error::Numerical("could not separate the central projections".into())
    })?;

    let basis = alg.basis();
    let mut parts: Vec<((usize, usize), ComplexMatrix)> = Vec::with_capacity(central.len());
    for e in central {
        let r = e.ncols();
        let compressed: Vec<ComplexMatrix> = basis.iter().map(|b| e.adjoint() * b * &e).collect();
        let factor = Subspace::span_matrices(&compressed, r, SPAN_TOL)?;
        let factor_dim = factor.dim();
        let nj = (factor_dim as f64).sqrt().round() as usize;
        if nj == 0 || nj * nj != factor_dim || r % nj != 0 {
            return Err(Error::Numerical(format!(
                "central block of rank {r} carries a factor of dimension {factor_dim}"
            )));
        }
        let dj = r / nj;
        let factor_basis = factor.basis_matrices(r);
        let local = if nj == 1 {
            identity(r)
        } else {
            matrix_units(&factor_basis, nj, dj, &mut rng)?
        };
        parts.push(((nj, dj), e * local));
    }

    parts.sort_by(|a, b| {
        let (na, da) = a.0;
        let (nb, db) = b.0;
        (nb * db).cmp(&(na * da)).then(nb.cmp(&na))
    });
    let blocks: Vec<(usize, usize)> = parts.iter().map(|p| p.0).collect();
    let columns: Vec<ComplexMatrix> = parts.into_iter().map(|p| p.1).collect();
    let conjugator = crate::linalg::hstack(&columns, n);

    let unitarity = unitarity_residual(&conjugator);
    if unitarity > 1e-8 {
        return Err(Error::Numerical(format!("conjugator not unitary (residual {unitarity:e})")));
    }
    let decomposition = BlockDecomposition { blocks, conjugator };
    let off = decomposition.max_off_pattern_residual(alg);
    if off > 1e-6 {
        return Err(Error::Numerical(format!("block pattern residual {off:e}")));
    }
    Ok(decomposition)
}

/// Columns `V_k f_m` (index `k d + m`) built from a maximal family of
/// matrix units of a factor `M_nj ⊗ 1_dj` given in local coordinates.
fn matrix_units(
    factor_basis: &[ComplexMatrix],
    nj: usize,
    dj: usize,
    rng: &mut ChaCha8Rng,
) -> Result<ComplexMatrix> {
    let r = nj * dj;
    for _ in 0..MAX_DRAWS {
        let h = random_hermitian(factor_basis, rng);
        let groups = match spectral_clusters(&h) {
            Some(g) if g.len() == nj && g.iter().all(|q| q.ncols() == dj) => g,
            _ => continue,
        };
        let first = &groups[0];
        let mut out = ComplexMatrix::zeros(r, r);
        out.view_mut((0, 0), (r, dj)).copy_from(first);
        for (k, ek) in groups.iter().enumerate().skip(1) {
            let link = factor_basis
                .iter()
                .map(|b| ek.adjoint() * b * first)
                .max_by(|a, b| frobenius_norm(a).total_cmp(&frobenius_norm(b)))
                .expect("non-empty factor");
            let w = polar_unitary(&link)?;
            out.view_mut((0, k * dj), (r, dj)).copy_from(&(ek * w));
        }
        // Column order k d + m.
        return Ok(out);
    }
    Err(Error::Numerical("could not split the factor into minimal projections".into()))
}

/// How much a computed decoherence-free algebra can be trusted.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Certificate {
    /// The algebra is the exact answer up to rank decisions.
    Exact,
    /// A proven subalgebra of the exact answer.
    LowerBound,
    /// Produced by a stopping rule or an unproven containment.
    Heuristic,
}

impl Certificate {
    pub fn as_str(&self) -> &'static str {
        match self {
            Certificate::Exact => "exact",
            Certificate::LowerBound => "lower-bound",
            Certificate::Heuristic => "heuristic",
        }
    }
}

#[derive(Clone, Debug)]
pub struct DfAlgebra {
    pub algebra: MatrixAlgebra,
    pub certificate: Certificate,
    /// Iterations performed (powers of the map, or 0 for direct methods).
    pub steps: usize,
}

/// `N(Γ)`, the multiplicative domain of a unital CP map.
pub fn multiplicative_domain(gamma: &KrausMap, tol: f64) -> Result<MatrixAlgebra> {
    let n = gamma.dim();
    let defect = gamma.unitality_defect();
    if !(defect <= tol) {
        return Err(Error::NotUnital { defect });
    }
    if gamma.as_unitary(1e-12).is_some() {
        return Ok(MatrixAlgebra::full(n));
    }
    let m = gamma.superoperator().into_matrix();
    let id = identity(n);
    let rows: Vec<ComplexMatrix> = gamma
        .reduced()
        .kraus()
        .iter()
        .map(|w| tensor_product(&w.transpose(), &id) - tensor_product(&id, w) * &m)
        .collect();
    let right = Subspace::from_orthonormal(nullspace(&vstack(&rows), RANK_TOL)?);
    let adjoints: Vec<ComplexMatrix> = right.basis_matrices(n).iter().map(|a| a.adjoint()).collect();
    let left = Subspace::span_matrices(&adjoints, n, RANK_TOL)?;
    Ok(MatrixAlgebra {
        n,
        space: right.intersect(&left, RANK_TOL)?,
    })
}

/// A unitary `U` with `Γ(A) = U^* A U` on `alg`, if one exists.
pub fn intertwining_unitary(gamma: &KrausMap, alg: &MatrixAlgebra, seed: u64) -> Result<ComplexMatrix> {
    let n = gamma.dim();
    ensure_same_n(n, alg.n)?;
    let basis = alg.basis();
    let images: Vec<ComplexMatrix> = basis.iter().map(|b| gamma.apply(b)).collect::<Result<_>>()?;
    let id = identity(n);
    let rows: Vec<ComplexMatrix> = basis
        .iter()
        .zip(&images)
        .map(|(b, g)| tensor_product(&g.transpose(), &id) - tensor_product(&id, b))
        .collect();
    let null = nullspace(&vstack(&rows), RANK_TOL)?;
    let residual = |u: &ComplexMatrix| {
        basis
            .iter()
            .zip(&images)
            .map(|(b, g)| frobenius_norm(&(b * u - u * g)))
            .fold(0.0, f64::max)
    };
    if null.ncols() > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..8 {
            let coeffs = DVector::from_fn(null.ncols(), |_, _| {
                c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
            });
            let x = devectorize_slice((&null * coeffs).as_slice(), n);
            let u = polar_unitary(&x)?;
            if residual(&u) <= 1e-8 {
                return Ok(u);
            }
        }
    }
    Err(Error::Precondition(
        "the map is not implemented by a unitary on this algebra".into(),
    ))
}

/// `N(Γ^(·)) = ∩_k N(Γ^k)`, computed as the largest `Γ`-invariant subspace
/// of `N(Γ)`: `A` lies in every `N(Γ^k)` exactly when every `Γ^j(A)` lies in
/// `N(Γ)`. Each step shrinks the candidate subspace, so at most `n^2` steps
/// are needed; hitting `max_k` first yields a heuristic certificate.
pub fn global_df_discrete(gamma: &KrausMap, max_k: usize, tol: f64) -> Result<DfAlgebra> {
    if max_k == 0 {
        return Err(Error::Invalid("max_k must be at least 1".into()));
    }
    let n = gamma.dim();
    let domain = multiplicative_domain(gamma, tol)?;
    if domain.is_full() {
        return Ok(DfAlgebra {
            algebra: domain,
            certificate: Certificate::Exact,
            steps: 1,
        });
    }
    let m = gamma.superoperator().into_matrix();
    let threshold = tol.max(1e-10) * 1.0f64.max(m.norm());
    let mut basis = domain.space().basis().clone();
    let mut steps = 1;
    let mut certificate = Certificate::Exact;
    while basis.ncols() > 1 {
        let image = &m * &basis;
        let outside = &image - &basis * (basis.adjoint() * &image);
        let s_max = singular_values(&outside).first().copied().unwrap_or(0.0);
        if s_max <= threshold {
            break;
        }
        if steps >= max_k {
            certificate = Certificate::Heuristic;
            break;
        }
        steps += 1;
        let kept = nullspace(&outside, threshold / s_max)?;
        basis = &basis * kept;
    }
    let algebra = MatrixAlgebra::from_subspace(n, Subspace::from_orthonormal(basis))?;
    Ok(DfAlgebra {
        algebra,
        certificate,
        steps,
    })
}

/// `N(T_(·))` for a semigroup generator.
///
/// With a detailed-balance metric the answer is `Ker(L_D)`. Otherwise the
/// commutant `{V_j, V_j^*}'` is returned, a lower bound when the Hamiltonian
/// and dissipative parts commute.
pub fn df_semigroup(l: &GKLSGenerator, metric: Option<&LiouvilleMetric>, tol: f64) -> Result<DfAlgebra> {
    let n = l.dim();
    let ops = normalized(l.lindblad_ops());
    if ops.is_empty() {
        return Ok(DfAlgebra {
            algebra: MatrixAlgebra::full(n),
            certificate: Certificate::Exact,
            steps: 0,
        });
    }
    if let Some(metric) = metric {
        let report = l.detailed_balance_check(metric, tol)?;
        if !report.holds() {
            return Err(Error::Precondition(format!(
                "detailed balance fails: stationary {:e}, commuting {:e}/{:e}, hermitian {:e}",
                report.stationary_residual,
                report.state_commutator,
                report.parts_commutator,
                report.hermiticity_residual
            )));
        }
        let kernel = nullspace(l.dissipator_superoperator().matrix(), RANK_TOL)?;
        return Ok(DfAlgebra {
            algebra: MatrixAlgebra {
                n,
                space: Subspace::from_orthonormal(kernel),
            },
            certificate: Certificate::Exact,
            steps: 0,
        });
    }
    let lh = l.hamiltonian_superoperator();
    let ld = l.dissipator_superoperator();
    let parts = (lh.compose(&ld)?.into_matrix() - ld.compose(&lh)?.into_matrix()).norm();
    let scale = 1.0f64.max(lh.norm() * ld.norm());
    let certificate = if parts <= tol * scale {
        Certificate::LowerBound
    } else {
        Certificate::Heuristic
    };
    Ok(DfAlgebra {
        algebra: commutant(&ops, n)?,
        certificate,
        steps: 0,
    })
}

/// The fixed-point space `F(Γ)` and, when present, a faithful stationary state.
#[derive(Clone, Debug)]
pub struct FixedPoints {
    n: usize,
    space: Subspace,
    stationary: Option<DensityMatrix>,
    faithful: bool,
}

impl FixedPoints {
    pub fn dimension(&self) -> usize {
        self.space.dim()
    }

    pub fn space(&self) -> &Subspace {
        &self.space
    }

    pub fn basis(&self) -> Vec<ComplexMatrix> {
        self.space.basis_matrices(self.n)
    }

    /// Stationary state of maximal support.
    pub fn stationary_state(&self) -> Option<&DensityMatrix> {
        self.stationary.as_ref()
    }

    pub fn has_faithful_state(&self) -> bool {
        self.faithful
    }

    /// The fixed points as an algebra; certified only with a faithful state.
    pub fn as_algebra(&self) -> Option<MatrixAlgebra> {
        self.faithful.then(|| MatrixAlgebra {
            n: self.n,
            space: self.space.clone(),
        })
    }
}

/// `F(Γ) = {A : Γ(A) = A}`.
pub fn fixed_points(gamma: &KrausMap) -> Result<FixedPoints> {
    let n = gamma.dim();
    let id = identity(n * n);
    let heis = gamma.superoperator().into_matrix() - &id;
    let space = Subspace::from_orthonormal(nullspace(&heis, RANK_TOL)?);

    let schr = gamma.dual_superoperator().into_matrix() - &id;
    let right = nullspace(&schr, RANK_TOL)?;
    let left = nullspace(&schr.adjoint(), RANK_TOL)?;
    let stationary = if right.ncols() > 0 && right.ncols() == left.ncols() {
        let overlap = left.adjoint() * &right;
        overlap.try_inverse().and_then(|inv| {
            let projector = &right * inv * left.adjoint();
            let mixed = vectorize(&(identity(n) / real(n as f64)));
            let rho = hermitian_part(&devectorize_slice((projector * mixed).as_slice(), n));
            let tr = rho.trace();
            DensityMatrix::new(rho / tr, 1e-8).ok()
        })
    } else {
        None
    };
    let faithful = stationary
        .as_ref()
        .is_some_and(|s| crate::operators::min_eigenvalue(s.matrix()) > FAITHFUL_TOL);
    Ok(FixedPoints {
        n,
        space,
        stationary,
        faithful,
    })
}

/// The commutants `W1 ⊆ W2` and, when `U` commutes with `Γ_D`, `W3`.
#[derive(Clone, Debug)]
pub struct ContainmentCommutants {
    pub w1: MatrixAlgebra,
    pub w2: MatrixAlgebra,
    w3: Option<MatrixAlgebra>,
    /// `|| 𝒰Γ_D - Γ_D𝒰 ||` in superoperator norm.
    pub commutation_residual: f64,
}

/// Containment residuals (largest principal-angle sines).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContainmentReport {
    pub w1_in_w2: f64,
    pub w2_in_n: f64,
    pub w1_in_w3: Option<f64>,
    pub w3_in_n_discrete: Option<f64>,
}

impl ContainmentReport {
    pub fn max(&self) -> f64 {
        [Some(self.w1_in_w2), Some(self.w2_in_n), self.w1_in_w3, self.w3_in_n_discrete]
            .into_iter()
            .flatten()
            .fold(0.0, f64::max)
    }
}

impl ContainmentCommutants {
    pub fn w3(&self) -> Result<&MatrixAlgebra> {
        self.w3.as_ref().ok_or_else(|| {
            Error::Precondition(format!(
                "unitary and dissipative parts do not commute (residual {:e})",
                self.commutation_residual
            ))
        })
    }

    pub fn has_w3(&self) -> bool {
        self.w3.is_some()
    }

    /// Checks `W1 ⊆ W2 ⊆ N(Γ)` and `W1 ⊆ W3 ⊆ N(Γ^(·))` for the full map `gamma`.
    pub fn containments(&self, gamma: &KrausMap, max_k: usize, tol: f64) -> Result<ContainmentReport> {
        let n_gamma = multiplicative_domain(gamma, tol)?;
        let (w1_in_w3, w3_in_n_discrete) = match &self.w3 {
            Some(w3) => {
                let discrete = global_df_discrete(gamma, max_k, tol)?;
                (
                    Some(self.w1.containment_residual(w3)),
                    Some(w3.containment_residual(&discrete.algebra)),
                )
            }
            None => (None, None),
        };
        Ok(ContainmentReport {
            w1_in_w2: self.w1.containment_residual(&self.w2),
            w2_in_n: self.w2.containment_residual(&n_gamma),
            w1_in_w3,
            w3_in_n_discrete,
        })
    }
}

/// `Γ = 𝒰 Γ_D` with `𝒰(X) = U^* X U`.
pub fn compose_unitary(u: &ComplexMatrix, gamma_d: &KrausMap) -> Result<KrausMap> {
    KrausMap::unitary(u.clone())?.compose(gamma_d)
}

fn unitary_superop(u: &ComplexMatrix) -> Superoperator {
    crate::operators::superop_from_sandwich(&u.adjoint(), u).expect("square")
}

pub fn containment_commutants(u: &ComplexMatrix, gamma_d: &KrausMap, tol: f64) -> Result<ContainmentCommutants> {
    let n = gamma_d.dim();
    ensure_dim(u, n)?;
    let unitarity = unitarity_residual(u);
    if unitarity > tol.max(1e-12) {
        return Err(Error::Precondition(format!("U is not unitary (residual {unitarity:e})")));
    }
    let reduced = gamma_d.reduced();
    let w = reduced.kraus();
    let mut pairs_mixed = Vec::new();
    let mut pairs_all = Vec::new();
    for a in w {
        for b in w {
            pairs_mixed.push(a * b.adjoint());
            pairs_all.push(a * b);
            pairs_all.push(a * b.adjoint());
            pairs_all.push(a.adjoint() * b.adjoint());
        }
    }
    let mu = unitary_superop(u);
    let md = reduced.superoperator();
    let commutation_residual = (mu.compose(&md)?.into_matrix() - md.compose(&mu)?.into_matrix()).norm();
    let w3 = if commutation_residual <= tol.max(1e-12) * 1.0f64.max(md.norm()) {
        Some(commutant(&pairs_all, n)?)
    } else {
        None
    };
    Ok(ContainmentCommutants {
        w1: commutant(w, n)?,
        w2: commutant(&pairs_mixed, n)?,
        w3,
        commutation_residual,
    })
}

/// Decay of `|| Γ^k(A) - 𝒰^k(P_Γ A) ||_σ` under detailed balance.
#[derive(Clone, Debug)]
pub struct RelaxationTrace {
    /// `e_k` for `k = 0..=k_max`, in the Liouville norm.
    pub errors: Vec<f64>,
    /// `P_Γ(A)`, the σ-orthogonal projection onto `F(Γ_D)`.
    pub projected: ComplexMatrix,
    /// Largest Liouville-metric singular value of `Γ_D` off its fixed space.
    pub rate_bound: f64,
    pub fixed_dimension: usize,
}

impl RelaxationTrace {
    /// Non-increasing within `slack`.
    pub fn is_monotone(&self, slack: f64) -> bool {
        self.errors.windows(2).all(|w| w[1] <= w[0] + slack)
    }

    /// Mean geometric decay factor `(e_K / e_0)^(1/K)`.
    pub fn observed_rate(&self) -> f64 {
        let k = self.errors.len().saturating_sub(1);
        match (self.errors.first(), self.errors.last()) {
            (Some(&e0), Some(&ek)) if k > 0 && e0 > 0.0 => (ek / e0).powf(1.0 / k as f64),
            _ => 0.0,
        }
    }
}

/// Limited relaxation of `Γ = 𝒰 Γ_D` with respect to a faithful state σ.
pub fn limited_relaxation(
    u: &ComplexMatrix,
    gamma_d: &KrausMap,
    metric: &LiouvilleMetric,
    a: &ComplexMatrix,
    k_max: usize,
    tol: f64,
) -> Result<RelaxationTrace> {
    let n = gamma_d.dim();
    ensure_square(u)?;
    ensure_dim(u, n)?;
    ensure_dim(a, n)?;
    if metric.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: metric.dim(),
        });
    }
    let sigma = metric.sigma().matrix();
    let unitarity = unitarity_residual(u);
    let invariant = frobenius_norm(&commutator(u, sigma));
    let stationary = frobenius_norm(&(gamma_d.dual().apply(sigma)? - sigma));
    let md = gamma_d.superoperator().into_matrix();
    let g = metric.gram();
    let hermitian = (&g * &md - md.adjoint() * &g).norm();
    let mu = unitary_superop(u).into_matrix();
    let commuting = (&mu * &md - &md * &mu).norm();
    for (name, value) in [
        ("U unitary", unitarity),
        ("U sigma U^* = sigma", invariant),
        ("sigma stationary", stationary),
        ("Gamma_D hermitian", hermitian),
        ("U Gamma_D = Gamma_D U", commuting),
    ] {
        if !(value <= tol) {
            return Err(Error::Precondition(format!("{name} fails (residual {value:e})")));
        }
    }

    let id = identity(n * n);
    let q = nullspace(&(&md - &id), RANK_TOL)?;
    let fixed_dimension = q.ncols();
    let projector = if fixed_dimension == 0 {
        ComplexMatrix::zeros(n * n, n * n)
    } else {
        let gram_q = q.adjoint() * &g * &q;
        let inv = gram_q
            .try_inverse()
            .ok_or_else(|| Error::Numerical("singular fixed-space Gram matrix".into()))?;
        &q * inv * q.adjoint() * &g
    };
    let projected = devectorize_slice((&projector * vectorize(a)).as_slice(), n);

    let (sq, isq) = metric.gram_sqrt_pair();
    let values = singular_values(&(sq * &md * isq));
    let rate_bound = values.get(fixed_dimension).copied().unwrap_or(0.0);

    let full = compose_unitary(u, gamma_d)?;
    let mut x = a.clone();
    let mut target = projected.clone();
    let mut errors = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        if k > 0 {
            x = full.apply(&x)?;
            target = u.adjoint() * target * u;
        }
        errors.push(metric.norm(&(&x - &target))?);
    }
    Ok(RelaxationTrace {
        errors,
        projected,
        rate_bound,
        fixed_dimension,
    })
}

/// Principal-angle tolerance used by the containment checks of this module.
pub const CONTAINMENT_TOL: f64 = ANGLE_TOL;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lindblad::build_gibbs_generator;
    use crate::operators::pauli::*;
    use crate::operators::{diag_real, unitary_evolution, zeros};

    fn dephasing(p: f64) -> KrausMap {
        KrausMap::new(
            vec![identity(2) * real((1.0 - p).sqrt()), sigma_z() * real(p.sqrt())],
            1e-12,
        )
        .unwrap()
    }

    fn diagonal_algebra() -> MatrixAlgebra {
        MatrixAlgebra::from_matrices(&[diag_real(&[1.0, 0.0]), diag_real(&[0.0, 1.0])], 2, 1e-12).unwrap()
    }

    fn collective(n_sites: usize, op: &ComplexMatrix) -> ComplexMatrix {
        let d = op.nrows();
        let mut total = zeros(d.pow(n_sites as u32));
        for site in 0..n_sites {
            let factors: Vec<ComplexMatrix> = (0..n_sites)
                .map(|m| if m == site { op.clone() } else { identity(d) })
                .collect();
            total += crate::operators::tensor_all(&factors);
        }
        total
    }

    fn gibbs_channel() -> (KrausMap, ComplexMatrix, KrausMap, LiouvilleMetric) {
        let h = sigma_z() * real(0.5);
        let gibbs = build_gibbs_generator(h.clone(), 1.0, vec![sigma_minus()], 1e-12).unwrap();
        let metric = gibbs.metric().unwrap();
        let full = gibbs.generator().semigroup(1.0).unwrap();
        let gamma = KrausMap::from_superoperator(&full, 1e-9).unwrap();
        let ld = gibbs.generator().dissipative_part().semigroup(1.0).unwrap();
        let gamma_d = KrausMap::from_superoperator(&ld, 1e-9).unwrap();
        (gamma, unitary_evolution(&h, 1.0), gamma_d, metric)
    }

    #[test]
    fn commutant_examples() {
        assert_eq!(commutant(&[identity(3)], 3).unwrap().dimension(), 9);
        assert_eq!(commutant(&[], 2).unwrap().dimension(), 4);
        let z = commutant(&[sigma_z()], 2).unwrap();
        assert!(z.equals(&diagonal_algebra(), 1e-10));
        let j: Vec<ComplexMatrix> = [sigma_x(), sigma_y(), sigma_z()].iter().map(|s| collective(3, s)).collect();
        assert_eq!(commutant(&j, 8).unwrap().dimension(), 5);
    }

    #[test]
    fn generated_algebra_examples() {
        assert_eq!(generated_algebra(&[identity(2)], 2).unwrap().dimension(), 1);
        let x = generated_algebra(&[sigma_x()], 2).unwrap();
        assert_eq!(x.dimension(), 2);
        assert!(x.contains(&sigma_x(), 1e-12));
        assert!(x.contains(&identity(2), 1e-12));
        assert_eq!(generated_algebra(&[sigma_x(), sigma_z()], 2).unwrap().dimension(), 4);
    }

    #[test]
    fn swap_algebra_blocks() {
        let swap = crate::operators::from_rows(&[
            &[real(1.0), real(0.0), real(0.0), real(0.0)],
            &[real(0.0), real(0.0), real(1.0), real(0.0)],
            &[real(0.0), real(1.0), real(0.0), real(0.0)],
            &[real(0.0), real(0.0), real(0.0), real(1.0)],
        ]);
        let alg = generated_algebra(&[swap], 4).unwrap();
        assert_eq!(alg.dimension(), 2);
        let bd = block_decompose(&alg, DEFAULT_SEED).unwrap();
        assert_eq!(bd.blocks(), &[(1, 3), (1, 1)]);
        let comm = block_decompose(&alg.commutant().unwrap(), DEFAULT_SEED).unwrap();
        assert_eq!(comm.blocks(), &[(3, 1), (1, 1)]);
    }

    #[test]
    fn block_examples() {
        let full = block_decompose(&MatrixAlgebra::full(3), 1).unwrap();
        assert_eq!(full.blocks(), &[(3, 1)]);
        assert_eq!(full.conjugator(), &identity(3));
        assert_eq!(block_decompose(&diagonal_algebra(), 1).unwrap().blocks(), &[(1, 1), (1, 1)]);
        let j: Vec<ComplexMatrix> = [sigma_x(), sigma_y(), sigma_z()].iter().map(|s| collective(2, s)).collect();
        let alg = generated_algebra(&j, 4).unwrap();
        let bd = block_decompose(&alg, 7).unwrap();
        assert_eq!(bd.blocks(), &[(3, 1), (1, 1)]);
        assert!(bd.max_off_pattern_residual(&alg) < 1e-8);
    }

    #[test]
    fn block_decomposition_with_multiplicity() {
        let j: Vec<ComplexMatrix> = [sigma_x(), sigma_y(), sigma_z()].iter().map(|s| collective(3, s)).collect();
        let alg = generated_algebra(&j, 8).unwrap();
        let bd = block_decompose(&alg, 3).unwrap();
        assert_eq!(bd.blocks(), &[(4, 1), (2, 2)]);
        let sum: usize = bd.blocks().iter().map(|(a, b)| a * b).sum();
        assert_eq!(sum, 8);
        assert_eq!(bd.algebra_dimension(), alg.dimension());
        assert!(bd.max_off_pattern_residual(&alg) < 1e-8);
        let again = block_decompose(&alg, 3).unwrap();
        assert_eq!(again.conjugator(), bd.conjugator());
    }

    #[test]
    fn multiplicative_domain_examples() {
        let u = unitary_evolution(&sigma_x(), 0.3);
        assert!(multiplicative_domain(&KrausMap::unitary(u).unwrap(), 1e-9).unwrap().is_full());
        let n = multiplicative_domain(&dephasing(0.25), 1e-9).unwrap();
        assert!(n.equals(&diagonal_algebra(), 1e-9));
        let half = real(0.5);
        let pauli = KrausMap::new(
            vec![identity(2) * half, sigma_x() * half, sigma_y() * half, sigma_z() * half],
            1e-12,
        )
        .unwrap();
        assert_eq!(multiplicative_domain(&pauli, 1e-9).unwrap().dimension(), 1);
    }

    #[test]
    fn multiplicative_domain_rejects_non_unital() {
        let gamma = KrausMap::new(vec![sigma_minus()], f64::INFINITY).unwrap();
        assert!(matches!(multiplicative_domain(&gamma, 1e-9), Err(Error::NotUnital { .. })));
    }

    #[test]
    fn gamma_is_multiplicative_on_its_domain() {
        let gamma = dephasing(0.25);
        let n = multiplicative_domain(&gamma, 1e-9).unwrap();
        for a in n.basis() {
            for b in n.basis() {
                let lhs = gamma.apply(&(&a * &b)).unwrap();
                let rhs = gamma.apply(&a).unwrap() * gamma.apply(&b).unwrap();
                assert!(frobenius_norm(&(lhs - rhs)) < 1e-12);
            }
        }
    }

    #[test]
    fn intertwiner_exists_for_unitary_times_dephasing() {
        let u = unitary_evolution(&sigma_z(), 0.4);
        let gamma = compose_unitary(&u, &dephasing(0.3)).unwrap();
        let n = multiplicative_domain(&gamma, 1e-9).unwrap();
        let w = intertwining_unitary(&gamma, &n, 1).unwrap();
        for a in n.basis() {
            let lhs = gamma.apply(&a).unwrap();
            assert!(frobenius_norm(&(lhs - w.adjoint() * &a * &w)) < 1e-8);
        }
    }

    #[test]
    fn intertwiner_missing_for_state_preparation() {
        let k0 = crate::operators::matrix_unit(2, 0, 0);
        let k1 = crate::operators::matrix_unit(2, 0, 1);
        let gamma = KrausMap::new(vec![k0, k1], 1e-12).unwrap();
        let n = multiplicative_domain(&gamma, 1e-9).unwrap();
        assert!(n.equals(&diagonal_algebra(), 1e-9));
        assert!(intertwining_unitary(&gamma, &n, 1).is_err());
    }

    #[test]
    fn global_df_examples() {
        let u = KrausMap::unitary(unitary_evolution(&sigma_y(), 0.9)).unwrap();
        let r = global_df_discrete(&u, 5, 1e-9).unwrap();
        assert!(r.algebra.is_full());
        assert_eq!(r.certificate, Certificate::Exact);

        let r = global_df_discrete(&dephasing(0.25), 8, 1e-9).unwrap();
        assert!(r.algebra.equals(&diagonal_algebra(), 1e-9));
        assert_eq!(r.certificate, Certificate::Exact);

        let (gamma, ..) = gibbs_channel();
        let r = global_df_discrete(&gamma, 10, 1e-8).unwrap();
        assert_eq!(r.algebra.dimension(), 1);
        assert_eq!(r.certificate, Certificate::Exact);
    }

    #[test]
    fn df_semigroup_examples() {
        let l = GKLSGenerator::new(sigma_x(), vec![], 1e-12).unwrap();
        assert!(df_semigroup(&l, None, 1e-9).unwrap().algebra.is_full());

        let gibbs = build_gibbs_generator(sigma_z() * real(0.5), 1.0, vec![sigma_minus()], 1e-12).unwrap();
        let metric = gibbs.metric().unwrap();
        let exact = df_semigroup(gibbs.generator(), Some(&metric), 1e-9).unwrap();
        assert_eq!(exact.algebra.dimension(), 1);
        assert_eq!(exact.certificate, Certificate::Exact);
        let bound = df_semigroup(gibbs.generator(), None, 1e-9).unwrap();
        assert_eq!(bound.algebra.dimension(), 1);
        assert_eq!(bound.certificate, Certificate::LowerBound);
    }

    #[test]
    fn df_semigroup_rejects_wrong_metric() {
        let gibbs = build_gibbs_generator(sigma_z() * real(0.5), 1.0, vec![sigma_minus()], 1e-12).unwrap();
        let wrong = LiouvilleMetric::new(DensityMatrix::maximally_mixed(2)).unwrap();
        assert!(df_semigroup(gibbs.generator(), Some(&wrong), 1e-9).is_err());
    }

    #[test]
    fn fixed_point_examples() {
        let id = fixed_points(&KrausMap::identity(2)).unwrap();
        assert_eq!(id.dimension(), 4);
        assert!(id.has_faithful_state());

        let u = KrausMap::unitary(unitary_evolution(&sigma_z(), -0.7)).unwrap();
        let f = fixed_points(&u).unwrap();
        assert!(f.as_algebra().unwrap().equals(&diagonal_algebra(), 1e-9));

        let (gamma, ..) = gibbs_channel();
        let f = fixed_points(&gamma).unwrap();
        assert_eq!(f.dimension(), 1);
        let sigma = f.stationary_state().unwrap().matrix();
        let e = std::f64::consts::E;
        assert!((sigma[(0, 0)].re - e / (1.0 + e)).abs() < 1e-9);
    }

    #[test]
    fn containment_examples() {
        let t = containment_commutants(&identity(2), &KrausMap::identity(2), 1e-9).unwrap();
        assert!(t.w1.is_full() && t.w2.is_full() && t.w3().unwrap().is_full());

        let gamma_d = dephasing(0.2);
        let t = containment_commutants(&identity(2), &gamma_d, 1e-9).unwrap();
        assert!(t.w1.equals(&diagonal_algebra(), 1e-9));
        let report = t.containments(&gamma_d, 6, 1e-9).unwrap();
        assert!(report.max() < 1e-7);
    }

    #[test]
    fn w3_requires_commutation() {
        let u = unitary_evolution(&sigma_x(), 0.5);
        let t = containment_commutants(&u, &dephasing(0.2), 1e-9).unwrap();
        assert!(!t.has_w3());
        assert!(t.w3().is_err());
    }

    #[test]
    fn limited_relaxation_gibbs_qubit() {
        let (_, u, gamma_d, metric) = gibbs_channel();
        let trace = limited_relaxation(&u, &gamma_d, &metric, &sigma_x(), 20, 1e-8).unwrap();
        assert!(trace.is_monotone(1e-12));
        assert!(trace.errors[20] / trace.errors[0] <= 1e-4);
        let expected = (-(1.0 + (-1.0f64).exp()) / 2.0).exp();
        assert!((trace.rate_bound - expected).abs() < 1e-9);
        assert!((trace.observed_rate() - expected).abs() < 1e-8);

        let fixed = limited_relaxation(&u, &gamma_d, &metric, &identity(2), 5, 1e-8).unwrap();
        assert!(fixed.errors.iter().all(|&e| e < 1e-12));
    }

    #[test]
    fn limited_relaxation_rejects_non_stationary_metric() {
        let (_, u, gamma_d, _) = gibbs_channel();
        let wrong = LiouvilleMetric::new(DensityMatrix::maximally_mixed(2)).unwrap();
        assert!(limited_relaxation(&u, &gamma_d, &wrong, &sigma_x(), 5, 1e-8).is_err());
    }
}
