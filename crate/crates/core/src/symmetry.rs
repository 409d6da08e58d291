// Copyright 2026 The Decohere Authors
// SPDX-License-Identifier: Apache-2.0

//! Permutation symmetry of `N`-particle systems: the tensor-factor
//! permutation representation, collective operators, private- and
//! common-bath generators, and global/local invariance checks.

use crate::algebra::{commutant, generated_algebra, MatrixAlgebra};
use crate::channels::KrausMap;
use crate::error::{Error, Result};
use crate::lindblad::GKLSGenerator;
use crate::operators::{
    ensure_dim, ensure_square, frobenius_norm, identity, pauli, real, superop_from_sandwich,
    tensor_all, ComplexMatrix, Superoperator,
};

/// Default bound on `d^N`.
pub const DEFAULT_SIZE_CAP: usize = 64;

fn checked_size(n_sites: usize, d: usize, cap: usize) -> Result<usize> {
    if n_sites == 0 {
        return Err(Error::Invalid("at least one site is required".into()));
    }
    let mut size: usize = 1;
    for _ in 0..n_sites {
        size = size.checked_mul(d).filter(|&s| s <= cap).ok_or(Error::SizeCap {
            size: d.saturating_pow(n_sites.min(u32::MAX as usize) as u32),
            cap,
        })?;
    }
    Ok(size)
}

/// `R(π)` on `(C^d)^⊗N`, held through its adjacent transpositions.
#[derive(Clone, Debug)]
pub struct PermutationRep {
    n_sites: usize,
    d: usize,
    generators: Vec<ComplexMatrix>,
}

impl PermutationRep {
    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn site_dim(&self) -> usize {
        self.d
    }

    pub fn dim(&self) -> usize {
        self.d.pow(self.n_sites as u32)
    }

    /// `R((i, i+1))` for `i = 0..N-1`.
    pub fn generators(&self) -> &[ComplexMatrix] {
        &self.generators
    }

    /// `R(π)` with `π[m]` the new position of the factor at site `m`.
    pub fn permutation(&self, pi: &[usize]) -> Result<ComplexMatrix> {
        permutation_matrix(self.n_sites, self.d, pi)
    }

    /// `R((i, j))`.
    pub fn transposition(&self, i: usize, j: usize) -> Result<ComplexMatrix> {
        let mut pi: Vec<usize> = (0..self.n_sites).collect();
        if i >= self.n_sites || j >= self.n_sites {
            return Err(Error::Invalid(format!("site out of range for N = {}", self.n_sites)));
        }
        pi.swap(i, j);
        self.permutation(&pi)
    }

    /// `Alg(R(S_N))`.
    pub fn algebra(&self) -> Result<MatrixAlgebra> {
        generated_algebra(&self.generators, self.dim())
    }
}

fn permutation_matrix(n_sites: usize, d: usize, pi: &[usize]) -> Result<ComplexMatrix> {
    let mut seen = vec![false; n_sites];
    if pi.len() != n_sites || pi.iter().any(|&p| p >= n_sites || std::mem::replace(&mut seen[p], true)) {
        return Err(Error::Invalid(format!("not a permutation of {n_sites} sites: {pi:?}")));
    }
    let size = d.pow(n_sites as u32);
    let mut r = ComplexMatrix::zeros(size, size);
    let mut digits = vec![0usize; n_sites];
    let mut moved = vec![0usize; n_sites];
    for index in 0..size {
        let mut rest = index;
        for m in (0..n_sites).rev() {
            digits[m] = rest % d;
            rest /= d;
        }
        for m in 0..n_sites {
            moved[pi[m]] = digits[m];
        }
        let target = moved.iter().fold(0, |acc, &j| acc * d + j);
        r[(target, index)] = real(1.0);
    }
    Ok(r)
}

pub fn build_permutation_rep(n_sites: usize, d: usize) -> Result<PermutationRep> {
    build_permutation_rep_with_cap(n_sites, d, DEFAULT_SIZE_CAP)
}

pub fn build_permutation_rep_with_cap(n_sites: usize, d: usize, cap: usize) -> Result<PermutationRep> {
    if d < 2 {
        return Err(Error::Invalid(format!("site dimension must be at least 2, got {d}")));
    }
    checked_size(n_sites, d, cap)?;
    let generators = (0..n_sites.saturating_sub(1))
        .map(|i| {
            let mut pi: Vec<usize> = (0..n_sites).collect();
            pi.swap(i, i + 1);
            permutation_matrix(n_sites, d, &pi)
        })
        .collect::<Result<_>>()?;
    Ok(PermutationRep {
        n_sites,
        d,
        generators,
    })
}

/// `op` acting on `site` of `N` sites, identity elsewhere.
pub fn site_operator(op: &ComplexMatrix, site: usize, n_sites: usize) -> Result<ComplexMatrix> {
    let d = ensure_square(op)?;
    if site >= n_sites {
        return Err(Error::Invalid(format!("site {site} out of range for N = {n_sites}")));
    }
    let factors: Vec<ComplexMatrix> = (0..n_sites)
        .map(|m| if m == site { op.clone() } else { identity(d) })
        .collect();
    Ok(tensor_all(&factors))
}

/// `V_α = Σ_m v_α^(m)`.
#[derive(Clone, Debug)]
pub struct CollectiveOps {
    n_sites: usize,
    single_site: Vec<ComplexMatrix>,
    collective: Vec<ComplexMatrix>,
}

impl CollectiveOps {
    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn single_site_ops(&self) -> &[ComplexMatrix] {
        &self.single_site
    }

    pub fn collective_ops(&self) -> &[ComplexMatrix] {
        &self.collective
    }
}

pub fn build_collective_ops(n_sites: usize, single_site_ops: &[ComplexMatrix]) -> Result<CollectiveOps> {
    build_collective_ops_with_cap(n_sites, single_site_ops, DEFAULT_SIZE_CAP)
}

pub fn build_collective_ops_with_cap(
    n_sites: usize,
    single_site_ops: &[ComplexMatrix],
    cap: usize,
) -> Result<CollectiveOps> {
    let d = match single_site_ops.first() {
        Some(op) => ensure_square(op)?,
        None => 2,
    };
    for op in single_site_ops {
        ensure_dim(op, d)?;
    }
    let size = checked_size(n_sites, d, cap)?;
    let collective = single_site_ops
        .iter()
        .map(|v| {
            (0..n_sites).try_fold(ComplexMatrix::zeros(size, size), |acc, m| {
                Ok(acc + site_operator(v, m, n_sites)?)
            })
        })
        .collect::<Result<_>>()?;
    Ok(CollectiveOps {
        n_sites,
        single_site: single_site_ops.to_vec(),
        collective,
    })
}

/// Collective spin components `(Σσ_x, Σσ_y, Σσ_z)` on `N` qubits.
pub fn collective_spin(n_sites: usize) -> Result<Vec<ComplexMatrix>> {
    Ok(build_collective_ops(n_sites, &[pauli::sigma_x(), pauli::sigma_y(), pauli::sigma_z()])?
        .collective)
}

/// `max_g || R_g^* H R_g - H ||`.
fn conjugation_residual(ops: &[ComplexMatrix], unitaries: &[ComplexMatrix]) -> f64 {
    let mut worst = 0.0f64;
    for r in unitaries {
        for x in ops {
            worst = worst.max(frobenius_norm(&(r.adjoint() * x * r - x)));
        }
    }
    worst
}

/// Identical copies of a single-site generator at every site, plus a
/// permutation-invariant interaction Hamiltonian `H`.
pub fn build_private_bath_generator(
    n_sites: usize,
    hamiltonian: &ComplexMatrix,
    single_site: &GKLSGenerator,
    tol: f64,
) -> Result<GKLSGenerator> {
    let d = single_site.dim();
    let rep = build_permutation_rep(n_sites, d)?;
    ensure_dim(hamiltonian, rep.dim())?;
    let residual = conjugation_residual(std::slice::from_ref(hamiltonian), rep.generators());
    if residual > tol {
        return Err(Error::Precondition(format!(
            "Hamiltonian is not permutation invariant (residual {residual:e})"
        )));
    }
    let mut total_h = hamiltonian.clone();
    let mut lindblad = Vec::with_capacity(n_sites * single_site.lindblad_ops().len());
    for m in 0..n_sites {
        total_h += site_operator(single_site.hamiltonian(), m, n_sites)?;
    }
    for v in single_site.lindblad_ops() {
        for m in 0..n_sites {
            lindblad.push(site_operator(v, m, n_sites)?);
        }
    }
    GKLSGenerator::new(total_h, lindblad, tol)
}

/// `H = (ω/2) Σ σ_z^(m)`, single jump operator `V = √γ Σ σ^-(m)`.
pub fn build_superradiance_generator(n_sites: usize, omega: f64, gamma_rate: f64) -> Result<GKLSGenerator> {
    if !omega.is_finite() {
        return Err(Error::Invalid(format!("omega must be finite, got {omega}")));
    }
    if !(gamma_rate > 0.0) || !gamma_rate.is_finite() {
        return Err(Error::Invalid(format!("gamma must be positive, got {gamma_rate}")));
    }
    let ops = build_collective_ops(n_sites, &[pauli::sigma_z(), pauli::sigma_minus()])?;
    let h = &ops.collective[0] * real(omega / 2.0);
    let v = &ops.collective[1] * real(gamma_rate.sqrt());
    GKLSGenerator::new(h, vec![v], 0.0)
}

/// Something with a Heisenberg-picture superoperator.
#[derive(Clone, Copy, Debug)]
pub enum Dynamics<'a> {
    Channel(&'a KrausMap),
    Generator(&'a GKLSGenerator),
}

impl Dynamics<'_> {
    pub fn superoperator(&self) -> Superoperator {
        match self {
            Dynamics::Channel(g) => g.superoperator(),
            Dynamics::Generator(l) => l.superoperator(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct InvarianceReport {
    /// Largest residual over the group generators.
    pub residual: f64,
    pub per_generator: Vec<f64>,
}

impl InvarianceReport {
    pub fn is_invariant(&self, tol: f64) -> bool {
        self.residual <= tol
    }
}

/// `max_g || 𝓡_g Γ 𝓡_g^{-1} - Γ ||` with `𝓡_g(X) = R(g)^* X R(g)`.
pub fn global_invariance_check(dynamics: Dynamics<'_>, unitaries: &[ComplexMatrix]) -> Result<InvarianceReport> {
    let s = dynamics.superoperator();
    let n = s.dim();
    let mut per_generator = Vec::with_capacity(unitaries.len());
    for r in unitaries {
        ensure_dim(r, n)?;
        let fwd = superop_from_sandwich(&r.adjoint(), r)?;
        let back = superop_from_sandwich(r, &r.adjoint())?;
        let conj = fwd.compose(&s)?.compose(&back)?;
        per_generator.push(conj.sub(&s)?.norm());
    }
    Ok(InvarianceReport {
        residual: per_generator.iter().copied().fold(0.0, f64::max),
        per_generator,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct LocalInvarianceReport {
    /// `max_(g, α) || R(g)^* X_α R(g) - X_α ||`.
    pub residual: f64,
    /// When locally invariant: containment residual of `Alg(R(G))` in `{X_α, X_α^*}'`.
    pub containment: Option<f64>,
}

/// Local invariance of Kraus or Lindblad operators under a unitary group given
/// by generators; when invariant, confirms `Alg(R(G)) ⊆ {X_α, X_α^*}'`.
pub fn local_invariance_check(
    ops: &[ComplexMatrix],
    unitaries: &[ComplexMatrix],
    tol: f64,
) -> Result<LocalInvarianceReport> {
    let n = match ops.first().or(unitaries.first()) {
        Some(a) => ensure_square(a)?,
        None => {
            return Ok(LocalInvarianceReport {
                residual: 0.0,
                containment: Some(0.0),
            })
        }
    };
    for x in ops.iter().chain(unitaries) {
        ensure_dim(x, n)?;
    }
    let residual = conjugation_residual(ops, unitaries);
    let containment = if residual <= tol {
        let group = generated_algebra(unitaries, n)?;
        Some(group.containment_residual(&commutant(ops, n)?))
    } else {
        None
    };
    Ok(LocalInvarianceReport {
        residual,
        containment,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::df_semigroup;
    use crate::operators::pauli::*;
    use crate::operators::{diag_real, zeros};
    use nalgebra::DVector;

    fn basis_vector(size: usize, k: usize) -> DVector<crate::operators::C64> {
        DVector::from_fn(size, |i, _| real(if i == k { 1.0 } else { 0.0 }))
    }

    fn singlet() -> DVector<crate::operators::C64> {
        (basis_vector(4, 1) - basis_vector(4, 2)) * real(std::f64::consts::FRAC_1_SQRT_2)
    }

    #[test]
    fn permutation_examples() {
        let rep = build_permutation_rep(2, 2).unwrap();
        let swap = &rep.generators()[0];
        assert_eq!(swap * basis_vector(4, 1), basis_vector(4, 2));
        assert_eq!(swap * swap, identity(4));

        let rep3 = build_permutation_rep(3, 2).unwrap();
        let cycle = &rep3.generators()[0] * &rep3.generators()[1];
        assert_ne!(&cycle, &identity(8));
        assert_ne!(&cycle * &cycle, identity(8));
        assert_eq!(&cycle * &cycle * &cycle, identity(8));
    }

    #[test]
    fn permutation_size_cap() {
        assert!(matches!(build_permutation_rep(7, 2), Err(Error::SizeCap { .. })));
        assert!(build_permutation_rep(6, 2).is_ok());
        assert!(build_permutation_rep(2, 1).is_err());
    }

    #[test]
    fn collective_examples() {
        let one = build_collective_ops(1, &[sigma_y()]).unwrap();
        assert_eq!(one.collective_ops()[0], sigma_y());
        let z = build_collective_ops(2, &[sigma_z()]).unwrap();
        assert_eq!(z.collective_ops()[0], diag_real(&[2.0, 0.0, 0.0, -2.0]));
        let m = build_collective_ops(2, &[sigma_minus()]).unwrap();
        assert!((&m.collective_ops()[0] * singlet()).norm() < 1e-15);
    }

    #[test]
    fn private_bath_examples() {
        let single = GKLSGenerator::new(zeros(2), vec![sigma_minus()], 0.0).unwrap();
        let l = build_private_bath_generator(2, &zeros(4), &single, 1e-12).unwrap();
        assert_eq!(l.lindblad_ops()[0], site_operator(&sigma_minus(), 0, 2).unwrap());
        assert_eq!(l.lindblad_ops()[1], site_operator(&sigma_minus(), 1, 2).unwrap());
        let rep = build_permutation_rep(2, 2).unwrap();
        let global = global_invariance_check(Dynamics::Generator(&l), rep.generators()).unwrap();
        assert!(global.residual <= 1e-10);
        let local = local_invariance_check(l.lindblad_ops(), rep.generators(), 1e-12).unwrap();
        assert!(local.residual > 1.0);
        assert!(local.containment.is_none());
    }

    #[test]
    fn private_bath_rejects_asymmetric_hamiltonian() {
        let single = GKLSGenerator::new(zeros(2), vec![sigma_minus()], 0.0).unwrap();
        let h = site_operator(&sigma_z(), 0, 2).unwrap();
        assert!(build_private_bath_generator(2, &h, &single, 1e-12).is_err());
    }

    #[test]
    fn private_bath_is_ergodic() {
        let single = GKLSGenerator::new(zeros(2), vec![sigma_minus(), sigma_plus() * real(0.5)], 0.0).unwrap();
        let l = build_private_bath_generator(2, &zeros(4), &single, 1e-12).unwrap();
        assert_eq!(df_semigroup(&l, None, 1e-9).unwrap().algebra.dimension(), 1);
    }

    #[test]
    fn superradiance_examples() {
        let one = build_superradiance_generator(1, 1.0, 0.49).unwrap();
        assert!(frobenius_norm(&(&one.lindblad_ops()[0] - sigma_minus() * real(0.7))) < 1e-15);

        let two = build_superradiance_generator(2, 1.3, 1.0).unwrap();
        let s = singlet();
        assert!((&two.lindblad_ops()[0] * &s).norm() <= 1e-12);
        assert!((two.hamiltonian() * &s).norm() <= 1e-12);
        let rho = &s * s.adjoint();
        assert!(frobenius_norm(&two.apply_dual(&rho).unwrap()) <= 1e-12);

        let rep = build_permutation_rep(2, 2).unwrap();
        let local = local_invariance_check(two.lindblad_ops(), rep.generators(), 1e-12).unwrap();
        assert!(local.residual <= 1e-12);
    }

    #[test]
    fn superradiance_three_sites_local_invariance() {
        let l = build_superradiance_generator(3, 1.0, 1.0).unwrap();
        let rep = build_permutation_rep(3, 2).unwrap();
        let report = local_invariance_check(l.lindblad_ops(), rep.generators(), 1e-12).unwrap();
        assert!(report.residual <= 1e-12);
        assert!(report.containment.unwrap() < 1e-7);
        let global = global_invariance_check(Dynamics::Generator(&l), rep.generators()).unwrap();
        assert!(global.residual <= 1e-10);
    }

    #[test]
    fn biased_generator_breaks_global_invariance() {
        let v = site_operator(&sigma_minus(), 0, 2).unwrap();
        let l = GKLSGenerator::new(zeros(4), vec![v], 0.0).unwrap();
        let rep = build_permutation_rep(2, 2).unwrap();
        assert!(global_invariance_check(Dynamics::Generator(&l), rep.generators()).unwrap().residual >= 0.1);
    }

    #[test]
    fn trivial_group_is_always_local() {
        let report = local_invariance_check(&[sigma_x()], &[], 1e-12).unwrap();
        assert_eq!(report.residual, 0.0);
    }
}
