// Copyright 2026 The Decohere Authors
// SPDX-License-Identifier: Apache-2.0

//! Generators of quantum dynamical semigroups in GKLS form,
//!
//! ```text
//! L(A) = i[H, A] + sum_j V_j^* A V_j - 1/2 { sum_j V_j^* V_j, A }
//! ```
//!
//! acting in the Heisenberg picture, together with their semigroups
//! `T_t = exp(t L)` and the detailed-balance machinery.

use crate::error::{Error, Result};
use crate::linalg::expm;
use crate::operators::{
    anticommutator, commutator, commutator_superop, ensure_dim, ensure_square, frobenius_norm,
    hermitian_function, hermitian_residual, identity, max_abs, real, superop_from_sandwich, trace,
    ComplexMatrix, DensityMatrix, LiouvilleMetric, Superoperator, C64, DEFAULT_TOL,
};

#[derive(Clone, Debug)]
pub struct GKLSGenerator {
    dim: usize,
    hamiltonian: ComplexMatrix,
    lindblad: Vec<ComplexMatrix>,
}

impl GKLSGenerator {
    pub fn new(hamiltonian: ComplexMatrix, lindblad: Vec<ComplexMatrix>, tol: f64) -> Result<Self> {
        let dim = ensure_square(&hamiltonian)?;
        if dim == 0 {
            return Err(Error::Invalid("zero-dimensional Hamiltonian".into()));
        }
        let residual = hermitian_residual(&hamiltonian);
        if !(residual <= tol) {
            return Err(Error::NotHermitian { residual });
        }
        for v in &lindblad {
            ensure_dim(v, dim)?;
        }
        Ok(Self {
            dim,
            hamiltonian,
            lindblad,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn hamiltonian(&self) -> &ComplexMatrix {
        &self.hamiltonian
    }

    pub fn lindblad_ops(&self) -> &[ComplexMatrix] {
        &self.lindblad
    }

    /// The same dissipator with `H = 0`.
    pub fn dissipative_part(&self) -> GKLSGenerator {
        GKLSGenerator {
            dim: self.dim,
            hamiltonian: ComplexMatrix::zeros(self.dim, self.dim),
            lindblad: self.lindblad.clone(),
        }
    }

    fn jump_sum(&self) -> ComplexMatrix {
        self.lindblad
            .iter()
            .fold(ComplexMatrix::zeros(self.dim, self.dim), |acc, v| acc + v.adjoint() * v)
    }

    pub fn apply(&self, a: &ComplexMatrix) -> Result<ComplexMatrix> {
        ensure_dim(a, self.dim)?;
        let mut out = commutator(&self.hamiltonian, a) * C64::i();
        for v in &self.lindblad {
            out += v.adjoint() * a * v;
        }
        out -= anticommutator(&self.jump_sum(), a) * real(0.5);
        Ok(out)
    }

    /// Schrödinger-picture generator `L^*`.
    pub fn apply_dual(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        ensure_dim(rho, self.dim)?;
        let mut out = commutator(&self.hamiltonian, rho) * (-C64::i());
        for v in &self.lindblad {
            out += v * rho * v.adjoint();
        }
        out -= anticommutator(&self.jump_sum(), rho) * real(0.5);
        Ok(out)
    }

    /// `L_H = i[H, .]`.
    pub fn hamiltonian_superoperator(&self) -> Superoperator {
        commutator_superop(&self.hamiltonian)
            .expect("square")
            .scale(C64::i())
    }

    /// `L_D`, the dissipative part alone.
    pub fn dissipator_superoperator(&self) -> Superoperator {
        let n = self.dim;
        let k = self.jump_sum() * real(-0.5);
        let mut s = superop_from_sandwich(&k, &identity(n))
            .expect("square")
            .add(&superop_from_sandwich(&identity(n), &k).expect("square"))
            .expect("same dim");
        for v in &self.lindblad {
            s = s
                .add(&superop_from_sandwich(&v.adjoint(), v).expect("square"))
                .expect("same dim");
        }
        s
    }

    /// Heisenberg-picture superoperator of `L`.
    pub fn superoperator(&self) -> Superoperator {
        self.hamiltonian_superoperator()
            .add(&self.dissipator_superoperator())
            .expect("same dim")
    }

    /// `T_t = exp(t L)`.
    pub fn semigroup(&self, t: f64) -> Result<Superoperator> {
        if !(t >= 0.0) {
            return Err(Error::NegativeTime(t));
        }
        if t == 0.0 {
            return Ok(Superoperator::identity(self.dim));
        }
        let m = self.superoperator().into_matrix() * real(t);
        Superoperator::from_matrix(self.dim, expm(&m))
    }

    /// `L(A^* A) - L(A^*) A - A^* L(A)`; equals `sum_j [V_j, A]^* [V_j, A]`.
    pub fn dissipativity_defect(&self, a: &ComplexMatrix) -> Result<ComplexMatrix> {
        let ad = a.adjoint();
        Ok(self.apply(&(&ad * a))? - self.apply(&ad)? * a - &ad * self.apply(a)?)
    }

    /// `|| L(1) ||`.
    pub fn unitality_residual(&self) -> f64 {
        frobenius_norm(&self.apply(&identity(self.dim)).expect("square"))
    }

    pub fn detailed_balance_check(&self, metric: &LiouvilleMetric, tol: f64) -> Result<DetailedBalanceReport> {
        if metric.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: metric.dim(),
            });
        }
        let sigma = metric.sigma().matrix();
        let stationary_residual = frobenius_norm(&self.apply_dual(sigma)?);
        let state_commutator = frobenius_norm(&commutator(&self.hamiltonian, sigma));

        let lh = self.hamiltonian_superoperator();
        let ld = self.dissipator_superoperator();
        let parts_commutator =
            (lh.compose(&ld)?.into_matrix() - ld.compose(&lh)?.into_matrix()).norm();

        let g = metric.gram();
        let m = ld.matrix();
        let hermiticity_residual = max_abs(&(&g * m - m.adjoint() * &g));

        let scale = 1.0f64.max(ld.norm());
        Ok(DetailedBalanceReport {
            stationary: stationary_residual <= tol * scale,
            commuting_parts: state_commutator <= tol * scale && parts_commutator <= tol * scale * scale,
            hermitian_dissipator: hermiticity_residual <= tol * scale,
            stationary_residual,
            state_commutator,
            parts_commutator,
            hermiticity_residual,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DetailedBalanceReport {
    /// `L^*(sigma) = 0`.
    pub stationary: bool,
    /// `[H, sigma] = 0` and `L_H L_D = L_D L_H`.
    pub commuting_parts: bool,
    /// `L_D` hermitian on `(M_n, <.,.>_sigma)`.
    pub hermitian_dissipator: bool,
    pub stationary_residual: f64,
    pub state_commutator: f64,
    pub parts_commutator: f64,
    pub hermiticity_residual: f64,
}

impl DetailedBalanceReport {
    pub fn holds(&self) -> bool {
        self.stationary && self.commuting_parts && self.hermitian_dissipator
    }
}

/// A detailed-balance generator built from eigenoperators of `H`.
///
/// Each jump operator `V_j` satisfies `[H, V_j] = w_j V_j` with `w_j >= 0` and
/// enters with its partner `exp(-w_j / 2T) V_j^*`. In the Schrödinger picture
/// `V_j` moves population up the spectrum of `H` at unit rate and `V_j^*`
/// moves it down at rate `exp(-w_j / T)`, so the stationary state is
/// `Z^{-1} exp(H / T)`.
#[derive(Clone, Debug)]
pub struct GibbsGenerator {
    generator: GKLSGenerator,
    temperature: f64,
    eigen_ops: Vec<(ComplexMatrix, f64)>,
}

impl GibbsGenerator {
    pub fn generator(&self) -> &GKLSGenerator {
        &self.generator
    }

    pub fn into_generator(self) -> GKLSGenerator {
        self.generator
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    pub fn eigen_ops(&self) -> &[(ComplexMatrix, f64)] {
        &self.eigen_ops
    }

    pub fn stationary_state(&self) -> DensityMatrix {
        let t = self.temperature;
        let h = self.generator.hamiltonian();
        let shift = crate::operators::hermitian_eigen(h).0.last().copied().unwrap_or(0.0);
        let w = hermitian_function(h, |e| real(((e - shift) / t).exp()));
        let z = trace(&w);
        DensityMatrix::new(w / z, 1e-8).expect("exponential of a hermitian matrix is a state")
    }

    pub fn metric(&self) -> Result<LiouvilleMetric> {
        LiouvilleMetric::new(self.stationary_state())
    }

    /// `-<A, L_D(A)>_sigma` in the stationary-state metric.
    pub fn dirichlet_form(&self, a: &ComplexMatrix) -> Result<f64> {
        let metric = self.metric()?;
        let ld = self.generator.dissipative_part().apply(a)?;
        Ok(-metric.inner(a, &ld)?.re)
    }

    /// `sum_j <[V_j, A], [V_j, A]>_sigma + exp(-w_j/T) <[V_j^*, A], [V_j^*, A]>_sigma`.
    pub fn commutator_energy(&self, a: &ComplexMatrix) -> Result<f64> {
        ensure_dim(a, self.generator.dim())?;
        let metric = self.metric()?;
        let mut total = 0.0;
        for (v, w) in &self.eigen_ops {
            let up = commutator(v, a);
            let down = commutator(&v.adjoint(), a);
            total += metric.norm(&up)?.powi(2)
                + (-w / self.temperature).exp() * metric.norm(&down)?.powi(2);
        }
        Ok(total)
    }
}

/// `w = Tr(V^* [H, V]) / Tr(V^* V)` and the residual `|| [H, V] - w V ||`.
pub fn eigenoperator_frequency(h: &ComplexMatrix, v: &ComplexMatrix) -> Result<(f64, f64)> {
    let n = ensure_square(h)?;
    ensure_dim(v, n)?;
    let norm2 = trace(&(v.adjoint() * v)).re;
    if norm2 == 0.0 {
        return Err(Error::Invalid("zero eigenoperator".into()));
    }
    let comm = commutator(h, v);
    let w = trace(&(v.adjoint() * &comm)).re / norm2;
    Ok((w, frobenius_norm(&(comm - v * real(w)))))
}

pub fn build_gibbs_generator(
    hamiltonian: ComplexMatrix,
    temperature: f64,
    eigen_ops: Vec<ComplexMatrix>,
    tol: f64,
) -> Result<GibbsGenerator> {
    if !(temperature > 0.0) || !temperature.is_finite() {
        return Err(Error::Invalid(format!("temperature must be positive, got {temperature}")));
    }
    let residual = hermitian_residual(&hamiltonian);
    if !(residual <= tol) {
        return Err(Error::NotHermitian { residual });
    }
    let mut with_freq = Vec::with_capacity(eigen_ops.len());
    let mut lindblad = Vec::with_capacity(2 * eigen_ops.len());
    for v in eigen_ops {
        let (w, res) = eigenoperator_frequency(&hamiltonian, &v)?;
        let scale = 1.0f64.max(frobenius_norm(&v));
        if res > tol * scale {
            return Err(Error::Precondition(format!(
                "[H, V] != w V (residual {res:e})"
            )));
        }
        if w < -tol {
            return Err(Error::Precondition(format!("negative Bohr frequency {w}")));
        }
        let w = w.max(0.0);
        lindblad.push(v.clone());
        lindblad.push(v.adjoint() * real((-w / (2.0 * temperature)).exp()));
        with_freq.push((v, w));
    }
    let generator = GKLSGenerator::new(hamiltonian, lindblad, tol)?;
    Ok(GibbsGenerator {
        generator,
        temperature,
        eigen_ops: with_freq,
    })
}

/// Default tolerance wrapper for examples and the CLI.
pub fn build_gibbs_generator_default(
    hamiltonian: ComplexMatrix,
    temperature: f64,
    eigen_ops: Vec<ComplexMatrix>,
) -> Result<GibbsGenerator> {
    build_gibbs_generator(hamiltonian, temperature, eigen_ops, DEFAULT_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::pauli::*;
    use crate::operators::{c, min_eigenvalue, zeros};

    fn close(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> bool {
        max_abs(&(a - b)) <= tol
    }

    fn gibbs_qubit() -> GibbsGenerator {
        build_gibbs_generator_default(sigma_z() * real(0.5), 1.0, vec![sigma_minus()]).unwrap()
    }

    #[test]
    fn zero_generator() {
        let l = GKLSGenerator::new(zeros(2), vec![], 1e-12).unwrap();
        assert_eq!(l.apply(&sigma_x()).unwrap(), zeros(2));
    }

    #[test]
    fn hamiltonian_precession_sign() {
        let w = 1.7;
        let l = GKLSGenerator::new(sigma_z() * real(w / 2.0), vec![], 1e-12).unwrap();
        assert!(close(&l.apply(&sigma_x()).unwrap(), &(sigma_y() * real(-w)), 1e-14));
    }

    #[test]
    fn damping_of_sigma_z() {
        let g: f64 = 0.3;
        let l = GKLSGenerator::new(zeros(2), vec![sigma_minus() * real(g.sqrt())], 1e-12).unwrap();
        let expected = (identity(2) - sigma_z()) * real(g);
        assert!(close(&l.apply(&sigma_z()).unwrap(), &expected, 1e-14));
    }

    #[test]
    fn non_hermitian_hamiltonian_rejected() {
        assert!(matches!(
            GKLSGenerator::new(sigma_minus(), vec![], 1e-9),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn semigroup_dephasing_closed_form() {
        let gamma: f64 = 0.4;
        let l = GKLSGenerator::new(zeros(2), vec![sigma_z() * real(gamma.sqrt())], 1e-12).unwrap();
        assert_eq!(l.semigroup(0.0).unwrap(), Superoperator::identity(2));
        for t in [0.1, 1.0, 3.0] {
            let out = l.semigroup(t).unwrap().apply(&sigma_x()).unwrap();
            assert!(close(&out, &(sigma_x() * real((-2.0 * gamma * t).exp())), 1e-12));
        }
        assert!(matches!(l.semigroup(-1.0), Err(Error::NegativeTime(_))));
    }

    #[test]
    fn semigroup_law() {
        let l = gibbs_qubit().into_generator();
        let a = l.semigroup(0.3).unwrap();
        let b = l.semigroup(0.7).unwrap();
        let ab = a.compose(&b).unwrap();
        assert!((ab.into_matrix() - l.semigroup(1.0).unwrap().into_matrix()).norm() <= 1e-9);
    }

    #[test]
    fn dissipativity_examples() {
        let h = sigma_x() + sigma_z() * real(0.2);
        let l = GKLSGenerator::new(h, vec![], 1e-12).unwrap();
        assert!(max_abs(&l.dissipativity_defect(&(sigma_minus() + sigma_y())).unwrap()) < 1e-14);

        let g: f64 = 0.6;
        let l = GKLSGenerator::new(zeros(2), vec![sigma_z() * real(g.sqrt())], 1e-12).unwrap();
        let d = l.dissipativity_defect(&sigma_x()).unwrap();
        assert!(close(&d, &(identity(2) * real(4.0 * g)), 1e-14));
    }

    #[test]
    fn gibbs_qubit_detailed_balance() {
        let gg = gibbs_qubit();
        let sigma = gg.stationary_state();
        assert!((sigma.matrix()[(0, 0)].re - 0.7310585786300049).abs() < 1e-12);
        assert!((sigma.matrix()[(1, 1)].re - 0.2689414213699951).abs() < 1e-12);
        let report = gg
            .generator()
            .detailed_balance_check(&gg.metric().unwrap(), 1e-9)
            .unwrap();
        assert!(report.holds(), "{report:?}");
        assert_eq!(gg.eigen_ops()[0].1, 1.0);
    }

    #[test]
    fn maximally_mixed_dephasing_balance() {
        let l = GKLSGenerator::new(zeros(2), vec![sigma_z()], 1e-12).unwrap();
        let m = LiouvilleMetric::new(DensityMatrix::maximally_mixed(2)).unwrap();
        assert!(l.detailed_balance_check(&m, 1e-9).unwrap().holds());
    }

    #[test]
    fn non_eigenoperator_breaks_stationarity() {
        let gg = gibbs_qubit();
        let l = GKLSGenerator::new(sigma_z() * real(0.5), vec![sigma_x()], 1e-12).unwrap();
        let report = l.detailed_balance_check(&gg.metric().unwrap(), 1e-9).unwrap();
        assert!(!report.stationary);
        assert!(!report.holds());
    }

    #[test]
    fn gibbs_rejects_non_eigenoperator() {
        let err = build_gibbs_generator_default(sigma_z() * real(0.5), 1.0, vec![sigma_x()]);
        assert!(matches!(err, Err(Error::Precondition(_))));
        assert!(build_gibbs_generator_default(sigma_z(), 0.0, vec![sigma_minus()]).is_err());
    }

    #[test]
    fn high_temperature_rates_balance() {
        let gg = build_gibbs_generator_default(sigma_z() * real(0.5), 1e6, vec![sigma_minus()]).unwrap();
        let ops = gg.generator().lindblad_ops();
        let up = frobenius_norm(&ops[0]).powi(2);
        let down = frobenius_norm(&ops[1]).powi(2);
        assert!((up - down).abs() < 1e-5);
    }

    #[test]
    fn semigroup_preserves_states() {
        let l = gibbs_qubit().into_generator();
        let rho = DensityMatrix::new(
            ComplexMatrix::from_row_slice(2, 2, &[c(0.4, 0.0), c(0.1, 0.45), c(0.1, -0.45), c(0.6, 0.0)]),
            1e-9,
        )
        .unwrap();
        for t in [0.1, 1.0, 10.0] {
            let dual = l.semigroup(t).unwrap().dual();
            let out = dual.apply(rho.matrix()).unwrap();
            assert!(min_eigenvalue(&out) >= -1e-9);
            assert!((trace(&out) - real(1.0)).norm() <= 1e-9);
        }
    }
}
