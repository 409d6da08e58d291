// Copyright 2026 The Decohere Authors
// SPDX-License-Identifier: Apache-2.0

//! Born-approximation error budgets for a system driven by a
//! piecewise-constant control Hamiltonian on the window `[-τ, τ]`.
//!
//! The bath enters through its correlation functions
//! `C_αβ(t) = ∫ R_αβ(ω) e^{-iωt} dω` or directly through the spectral
//! densities `R_αβ(ω)`.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::operators::{
    anticommutator, ensure_dim, ensure_square, hermitian_eigen, hermitian_residual, identity,
    min_eigenvalue, real, tensor_product, ComplexMatrix, Superoperator, C64, DEFAULT_TOL,
};

/// Default number of time nodes across the whole window.
pub const DEFAULT_TIME_POINTS: usize = 401;
/// Default number of frequency nodes.
pub const DEFAULT_OMEGA_POINTS: usize = 4001;
/// Default frequency cutoff in units of `1/τ`.
pub const DEFAULT_OMEGA_MAX_TAU: f64 = 40.0;

const WINDOW_SLACK: f64 = 1e-12;

/// Piecewise-constant `H_S(t)` covering `[-τ, τ]`.
#[derive(Clone, Debug)]
pub struct ControlTrajectory {
    tau: f64,
    dim: usize,
    segments: Vec<(f64, ComplexMatrix)>,
    starts: Vec<f64>,
    spectra: Vec<(Vec<f64>, ComplexMatrix)>,
    /// `U_S(t_k, -τ)` at every segment start.
    prefix: Vec<ComplexMatrix>,
}

impl ControlTrajectory {
    pub fn new(tau: f64, segments: Vec<(f64, ComplexMatrix)>, tol: f64) -> Result<Self> {
        if !(tau > 0.0) || !tau.is_finite() {
            return Err(Error::Invalid(format!("tau must be positive, got {tau}")));
        }
        let first = segments
            .first()
            .ok_or_else(|| Error::Invalid("trajectory has no segments".into()))?;
        let dim = ensure_square(&first.1)?;
        let mut total = 0.0;
        for (dt, h) in &segments {
            if !(*dt > 0.0) || !dt.is_finite() {
                return Err(Error::Invalid(format!("segment duration must be positive, got {dt}")));
            }
            ensure_dim(h, dim)?;
            let residual = hermitian_residual(h);
            if !(residual <= tol) {
                return Err(Error::NotHermitian { residual });
            }
            total += dt;
        }
        if (total - 2.0 * tau).abs() > 1e-12 * (2.0 * tau).max(1.0) {
            return Err(Error::Invalid(format!(
                "segment durations sum to {total}, expected 2 tau = {}",
                2.0 * tau
            )));
        }
        let spectra: Vec<(Vec<f64>, ComplexMatrix)> = segments.iter().map(|(_, h)| hermitian_eigen(h)).collect();
        let mut starts = Vec::with_capacity(segments.len());
        let mut prefix = Vec::with_capacity(segments.len());
        let mut t = -tau;
        let mut u = identity(dim);
        for (k, (dt, _)) in segments.iter().enumerate() {
            starts.push(t);
            prefix.push(u.clone());
            u = segment_exponential(&spectra[k], *dt) * u;
            t += dt;
        }
        Ok(Self {
            tau,
            dim,
            segments,
            starts,
            spectra,
            prefix,
        })
    }

    /// A single segment `H` over the whole window.
    pub fn constant(h: ComplexMatrix, tau: f64) -> Result<Self> {
        Self::new(tau, vec![(2.0 * tau, h)], DEFAULT_TOL)
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn segments(&self) -> &[(f64, ComplexMatrix)] {
        &self.segments
    }

    fn check_window(&self, t: f64) -> Result<()> {
        if !(t >= -self.tau - WINDOW_SLACK && t <= self.tau + WINDOW_SLACK) {
            return Err(Error::OutOfWindow { t, tau: self.tau });
        }
        Ok(())
    }

    /// `U_S(t, -τ)` for `t` in the window.
    fn from_start(&self, t: f64) -> ComplexMatrix {
        let k = match self.starts.iter().rposition(|&s| s <= t) {
            Some(k) => k,
            None => return identity(self.dim),
        };
        let elapsed = (t - self.starts[k]).min(self.segments[k].0).max(0.0);
        segment_exponential(&self.spectra[k], elapsed) * &self.prefix[k]
    }

    /// `U_S(t, s)`, the time-ordered propagator from `s` to `t`.
    pub fn propagator(&self, s: f64, t: f64) -> Result<ComplexMatrix> {
        self.check_window(s)?;
        self.check_window(t)?;
        if s == t {
            return Ok(identity(self.dim));
        }
        Ok(self.from_start(t) * self.from_start(s).adjoint())
    }

    /// `U_S(τ, -τ)`.
    pub fn total_unitary(&self) -> ComplexMatrix {
        self.from_start(self.tau)
    }

    /// Same gate played `λ` times slower: segments `(λ dt, H / λ)` on `[-λτ, λτ]`.
    pub fn rescaled(&self, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::Invalid(format!("lambda must be positive, got {lambda}")));
        }
        let segments = self
            .segments
            .iter()
            .map(|(dt, h)| (dt * lambda, h / real(lambda)))
            .collect();
        Self::new(self.tau * lambda, segments, f64::INFINITY)
    }

    /// Composite Simpson nodes and weights, at least two intervals per
    /// segment and about `points` nodes in total.
    pub fn time_grid(&self, points: usize) -> TimeGrid {
        let total_intervals = points.saturating_sub(1).max(2) as f64;
        let mut nodes = Vec::new();
        let mut weights: Vec<f64> = Vec::new();
        for (k, (dt, _)) in self.segments.iter().enumerate() {
            let share = (total_intervals * dt / (2.0 * self.tau)).round() as usize;
            let m = (share.max(2) + 1) / 2 * 2;
            let h = dt / m as f64;
            let start = self.starts[k];
            for j in 0..=m {
                let w = h / 3.0
                    * if j == 0 || j == m {
                        1.0
                    } else if j % 2 == 1 {
                        4.0
                    } else {
                        2.0
                    };
                if j == 0 && !nodes.is_empty() {
                    *weights.last_mut().expect("non-empty") += w;
                    continue;
                }
                nodes.push(if j == m { start + dt } else { start + h * j as f64 });
                weights.push(w);
            }
        }
        TimeGrid { nodes, weights }
    }
}

fn segment_exponential(spectrum: &(Vec<f64>, ComplexMatrix), t: f64) -> ComplexMatrix {
    let (values, vectors) = spectrum;
    let n = values.len();
    let phases = ComplexMatrix::from_fn(n, n, |r, c| {
        if r == c {
            C64::from_polar(1.0, -values[r] * t)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    vectors * phases * vectors.adjoint()
}

/// Quadrature nodes and weights on `[-τ, τ]`.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeGrid {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// `S(s, -τ) = U_S(s, -τ)^* S U_S(s, -τ)`.
pub fn interaction_op(traj: &ControlTrajectory, op: &ComplexMatrix, s: f64) -> Result<ComplexMatrix> {
    ensure_dim(op, traj.dim)?;
    traj.check_window(s)?;
    let u = traj.from_start(s);
    Ok(u.adjoint() * op * u)
}

/// Analytic bath families and tabulated spectra, all for a single scalar
/// profile shared by every channel pair through a mixing matrix.
#[derive(Clone, Debug, PartialEq)]
pub enum BathProfile {
    /// `C(t) = g² e^{-iω₀t} e^{-w²t²/2}`.
    Gaussian { center: f64, width: f64, coupling: f64 },
    /// `C(t) = g² e^{-|t|/t_c}`, a Lorentzian spectrum.
    Exponential { correlation_time: f64, coupling: f64 },
    /// `R(ω) = R₀` for `|ω| ≤ Ω`, zero outside.
    Flat { level: f64, cutoff: f64 },
    /// `R(ω) = g² ω^κ / ω_c^{κ+1} e^{-ω/ω_c}` for `ω ≥ 0`.
    Ohmic { kappa: f64, cutoff: f64, coupling: f64 },
    /// Piecewise-linear `R_αβ(ω)` on an increasing grid, zero outside.
    Tabulated { omega: Vec<f64>, values: Vec<ComplexMatrix> },
}

impl BathProfile {
    fn validate(&self) -> Result<()> {
        let positive = |name: &str, x: f64| {
            if x > 0.0 && x.is_finite() {
                Ok(())
            } else {
                Err(Error::Invalid(format!("{name} must be positive and finite, got {x}")))
            }
        };
        let finite = |name: &str, x: f64| {
            if x.is_finite() {
                Ok(())
            } else {
                Err(Error::Invalid(format!("{name} must be finite, got {x}")))
            }
        };
        match self {
            BathProfile::Gaussian { center, width, coupling } => {
                finite("center", *center)?;
                positive("width", *width)?;
                finite("coupling", *coupling)
            }
            BathProfile::Exponential { correlation_time, coupling } => {
                positive("correlation time", *correlation_time)?;
                finite("coupling", *coupling)
            }
            BathProfile::Flat { level, cutoff } => {
                positive("cutoff", *cutoff)?;
                if *level >= 0.0 && level.is_finite() {
                    Ok(())
                } else {
                    Err(Error::Invalid(format!("flat level must be non-negative, got {level}")))
                }
            }
            BathProfile::Ohmic { kappa, cutoff, coupling } => {
                if !(*kappa >= 0.0) || !kappa.is_finite() {
                    return Err(Error::Invalid(format!("kappa must be non-negative, got {kappa}")));
                }
                positive("cutoff", *cutoff)?;
                finite("coupling", *coupling)
            }
            BathProfile::Tabulated { omega, values } => {
                if omega.len() < 2 || omega.len() != values.len() {
                    return Err(Error::Invalid(
                        "tabulated bath needs at least two points and one value per point".into(),
                    ));
                }
                if omega.iter().any(|w| !w.is_finite()) || omega.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(Error::Invalid("tabulated frequencies must increase strictly".into()));
                }
                Ok(())
            }
        }
    }

    /// Scalar correlation function, when the family has one in closed form.
    pub fn correlation(&self, t: f64) -> Option<C64> {
        match *self {
            BathProfile::Gaussian { center, width, coupling } => Some(
                C64::from_polar(coupling * coupling * (-0.5 * width * width * t * t).exp(), -center * t),
            ),
            BathProfile::Exponential { correlation_time, coupling } => {
                Some(real(coupling * coupling * (-t.abs() / correlation_time).exp()))
            }
            BathProfile::Flat { level, cutoff } => {
                let x = cutoff * t;
                let sinc = if x.abs() < 1e-4 { 1.0 - x * x / 6.0 } else { x.sin() / x };
                Some(real(2.0 * level * cutoff * sinc))
            }
            BathProfile::Ohmic { kappa, cutoff, coupling } => {
                let base = C64::new(1.0, cutoff * t);
                Some(base.powf(-(kappa + 1.0)) * (coupling * coupling * libm::tgamma(kappa + 1.0)))
            }
            BathProfile::Tabulated { .. } => None,
        }
    }

    /// Scalar spectral density; `None` for tabulated matrix data.
    pub fn density(&self, omega: f64) -> Option<f64> {
        Some(match *self {
            BathProfile::Gaussian { center, width, coupling } => {
                let z = (omega - center) / width;
                coupling * coupling / ((2.0 * std::f64::consts::PI).sqrt() * width) * (-0.5 * z * z).exp()
            }
            BathProfile::Exponential { correlation_time, coupling } => {
                let x = omega * correlation_time;
                coupling * coupling * correlation_time / (std::f64::consts::PI * (1.0 + x * x))
            }
            BathProfile::Flat { level, cutoff } => {
                if omega.abs() <= cutoff {
                    level
                } else {
                    0.0
                }
            }
            BathProfile::Ohmic { kappa, cutoff, coupling } => {
                if omega < 0.0 {
                    0.0
                } else {
                    coupling * coupling * omega.powf(kappa) / cutoff.powf(kappa + 1.0) * (-omega / cutoff).exp()
                }
            }
            BathProfile::Tabulated { .. } => return None,
        })
    }

    /// Closed interval outside which the spectral density vanishes (or is
    /// negligible, for the Gaussian).
    pub fn support(&self) -> (f64, f64) {
        match self {
            BathProfile::Gaussian { center, width, .. } => (center - 12.0 * width, center + 12.0 * width),
            BathProfile::Exponential { .. } => (f64::NEG_INFINITY, f64::INFINITY),
            BathProfile::Flat { cutoff, .. } => (-cutoff, *cutoff),
            BathProfile::Ohmic { .. } => (0.0, f64::INFINITY),
            BathProfile::Tabulated { omega, .. } => (omega[0], omega[omega.len() - 1]),
        }
    }
}

/// `H_int = Σ_α S_α ⊗ R_α` with `C_αβ(t) = mix_αβ C(t)`.
#[derive(Clone, Debug)]
pub struct Coupling {
    ops: Vec<ComplexMatrix>,
    profile: BathProfile,
    mix: ComplexMatrix,
}

impl Coupling {
    /// Identical, uncorrelated baths on every channel.
    pub fn uncorrelated(ops: Vec<ComplexMatrix>, profile: BathProfile, tol: f64) -> Result<Self> {
        let k = ops.len();
        Self::new(ops, profile, identity(k), tol)
    }

    pub fn new(ops: Vec<ComplexMatrix>, profile: BathProfile, mix: ComplexMatrix, tol: f64) -> Result<Self> {
        let first = ops
            .first()
            .ok_or_else(|| Error::Invalid("coupling needs at least one system operator".into()))?;
        let n = ensure_square(first)?;
        for s in &ops {
            ensure_dim(s, n)?;
            let residual = hermitian_residual(s);
            if !(residual <= tol) {
                return Err(Error::NotHermitian { residual });
            }
        }
        profile.validate()?;
        let k = ops.len();
        ensure_dim(&mix, k)?;
        let mix_residual = hermitian_residual(&mix);
        if !(mix_residual <= tol) {
            return Err(Error::Precondition(format!(
                "non-hermitian correlation matrix (residual {mix_residual:e})"
            )));
        }
        let mix_min = min_eigenvalue(&mix);
        if mix_min < -tol {
            return Err(Error::NotCompletelyPositive { min_eigenvalue: mix_min });
        }
        if let BathProfile::Tabulated { values, .. } = &profile {
            for v in values {
                ensure_dim(v, k)?;
                let residual = hermitian_residual(v);
                if !(residual <= tol) {
                    return Err(Error::Precondition(format!(
                        "non-hermitian tabulated spectral density (residual {residual:e})"
                    )));
                }
                let low = min_eigenvalue(v);
                if low < -tol {
                    return Err(Error::Precondition(format!(
                        "tabulated spectral density is not positive (min eigenvalue {low:e})"
                    )));
                }
            }
        }
        for t in [0.3, 1.0, 2.7] {
            if let (Some(a), Some(b)) = (profile.correlation(-t), profile.correlation(t)) {
                if (a - b.conj()).norm() > tol * 1.0f64.max(b.norm()) {
                    return Err(Error::Precondition(format!(
                        "correlation function violates C(-t) = conj C(t) at t = {t}"
                    )));
                }
            }
        }
        Ok(Self { ops, profile, mix })
    }

    pub fn ops(&self) -> &[ComplexMatrix] {
        &self.ops
    }

    pub fn profile(&self) -> &BathProfile {
        &self.profile
    }

    pub fn mix(&self) -> &ComplexMatrix {
        &self.mix
    }

    pub fn dim(&self) -> usize {
        self.ops[0].nrows()
    }

    pub fn has_correlation(&self) -> bool {
        self.profile.correlation(0.0).is_some()
    }

    /// `[C_αβ(t)]`.
    pub fn correlation(&self, t: f64) -> Option<ComplexMatrix> {
        self.profile.correlation(t).map(|c| &self.mix * c)
    }

    /// `[R_αβ(ω)]`.
    pub fn spectral_density(&self, omega: f64) -> ComplexMatrix {
        match &self.profile {
            BathProfile::Tabulated { omega: grid, values } => {
                let k = self.ops.len();
                if omega < grid[0] || omega > grid[grid.len() - 1] {
                    return ComplexMatrix::zeros(k, k);
                }
                let j = grid.partition_point(|&w| w <= omega).clamp(1, grid.len() - 1);
                let (w0, w1) = (grid[j - 1], grid[j]);
                let x = (omega - w0) / (w1 - w0);
                &values[j - 1] * real(1.0 - x) + &values[j] * real(x)
            }
            profile => &self.mix * real(profile.density(omega).expect("analytic family")),
        }
    }
}

/// Quadrature settings shared by the time and frequency routes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quadrature {
    pub time_points: usize,
    /// Frequency cutoff; `None` means `40 / τ` for the trajectory at hand.
    pub omega_max: Option<f64>,
    pub omega_points: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        Self {
            time_points: DEFAULT_TIME_POINTS,
            omega_max: None,
            omega_points: DEFAULT_OMEGA_POINTS,
        }
    }
}

/// Uniform frequency nodes on `[-Ω_max, Ω_max]` intersected with a support interval.
#[derive(Clone, Debug, PartialEq)]
pub struct FrequencyGrid {
    pub omega_max: f64,
    pub n_points: usize,
    pub nodes: Vec<f64>,
    /// Whether the grid ends are cut by `Ω_max` rather than by the support.
    pub truncated: (bool, bool),
}

impl FrequencyGrid {
    pub fn new(omega_max: f64, n_points: usize, support: (f64, f64)) -> Result<Self> {
        if !(omega_max > 0.0) || !omega_max.is_finite() {
            return Err(Error::Invalid(format!("omega_max must be positive, got {omega_max}")));
        }
        if n_points < 2 {
            return Err(Error::Invalid("frequency grid needs at least two points".into()));
        }
        let lo = support.0.max(-omega_max);
        let hi = support.1.min(omega_max);
        let nodes = if hi > lo {
            let h = (hi - lo) / (n_points - 1) as f64;
            (0..n_points).map(|k| if k + 1 == n_points { hi } else { lo + h * k as f64 }).collect()
        } else {
            Vec::new()
        };
        Ok(Self {
            omega_max,
            n_points,
            nodes,
            truncated: (support.0 < -omega_max, support.1 > omega_max),
        })
    }

    fn for_coupling(traj: &ControlTrajectory, coupling: &Coupling, quad: &Quadrature) -> Result<Self> {
        let omega_max = quad.omega_max.unwrap_or(DEFAULT_OMEGA_MAX_TAU / traj.tau);
        Self::new(omega_max, quad.omega_points, coupling.profile.support())
    }
}

fn trapezoid(nodes: &[f64], values: &[f64]) -> f64 {
    nodes
        .windows(2)
        .zip(values.windows(2))
        .map(|(w, f)| 0.5 * (w[1] - w[0]) * (f[0] + f[1]))
        .sum()
}

fn check_coupling(traj: &ControlTrajectory, coupling: &Coupling) -> Result<()> {
    if coupling.dim() != traj.dim {
        return Err(Error::DimensionMismatch {
            expected: traj.dim,
            found: coupling.dim(),
        });
    }
    Ok(())
}

fn check_state(psi: &DVector<C64>, n: usize) -> Result<()> {
    if psi.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: psi.len(),
        });
    }
    let norm = psi.norm();
    if !((norm - 1.0).abs() <= 1e-9) {
        return Err(Error::NotNormalized { norm });
    }
    Ok(())
}

/// Interaction-picture coupling operators sampled on a time grid.
struct Sampled {
    grid: TimeGrid,
    /// `ops[α][i] = S_α(s_i, -τ)`.
    ops: Vec<Vec<ComplexMatrix>>,
}

impl Sampled {
    fn new(traj: &ControlTrajectory, ops: &[ComplexMatrix], points: usize) -> Self {
        let grid = traj.time_grid(points);
        let unitaries: Vec<ComplexMatrix> = grid.nodes.iter().map(|&s| traj.from_start(s)).collect();
        let ops = ops
            .iter()
            .map(|op| unitaries.iter().map(|u| u.adjoint() * op * u).collect())
            .collect();
        Self { grid, ops }
    }
}

/// The error map `Φ^*` and `K = Φ(1)`.
#[derive(Clone, Debug)]
pub struct ErrorMap {
    pub phi_star: Superoperator,
    pub k: ComplexMatrix,
}

impl ErrorMap {
    /// `Φ(A) = Σ ∬ C_αβ(s-u) S_α(u) A S_β(s)`, the trace dual of `Φ^*`.
    pub fn phi(&self) -> Superoperator {
        self.phi_star.dual()
    }
}

/// `Φ^*(ρ) = Σ_αβ ∬ C_αβ(s-u) S_β(s) ρ S_α(u) ds du` over `[-τ, τ]²`.
pub fn error_map(traj: &ControlTrajectory, coupling: &Coupling, quad: &Quadrature) -> Result<ErrorMap> {
    check_coupling(traj, coupling)?;
    if !coupling.has_correlation() {
        return Err(Error::Precondition(
            "the time-domain route needs a bath with a correlation function".into(),
        ));
    }
    let n = traj.dim;
    let sampled = Sampled::new(traj, coupling.ops(), quad.time_points);
    let nodes = &sampled.grid.nodes;
    let weights = &sampled.grid.weights;
    let m = nodes.len();
    let kernel: Vec<C64> = (0..m * m)
        .map(|idx| {
            let (i, j) = (idx / m, idx % m);
            coupling.profile.correlation(nodes[i] - nodes[j]).expect("checked") * (weights[i] * weights[j])
        })
        .collect();
    let alphas = coupling.ops.len();
    let mut phi = ComplexMatrix::zeros(n * n, n * n);
    let mut k = ComplexMatrix::zeros(n, n);
    for beta in 0..alphas {
        // B_β(u_j) = Σ_i w_i w_j C(s_i - u_j) S_β(s_i)
        let smeared: Vec<ComplexMatrix> = (0..m)
            .map(|j| {
                (0..m).fold(ComplexMatrix::zeros(n, n), |acc, i| acc + &sampled.ops[beta][i] * kernel[i * m + j])
            })
            .collect();
        for alpha in 0..alphas {
            let mix = coupling.mix[(alpha, beta)];
            if mix == C64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..m {
                let s_alpha = &sampled.ops[alpha][j];
                phi += tensor_product(&s_alpha.transpose(), &smeared[j]) * mix;
                k += s_alpha * &smeared[j] * mix;
            }
        }
    }
    Ok(ErrorMap {
        phi_star: Superoperator::from_matrix(n, phi)?,
        k,
    })
}

/// Output of the Born map, trace preserving but only approximately positive.
#[derive(Clone, Debug)]
pub struct BornState {
    pub matrix: ComplexMatrix,
    pub trace_residual: f64,
    pub min_eigenvalue: f64,
}

/// `Γ^*(ρ) = Û_S(ρ + Φ^*(ρ) - {K, ρ}/2)`.
pub fn born_state(
    traj: &ControlTrajectory,
    coupling: &Coupling,
    rho: &crate::operators::DensityMatrix,
    quad: &Quadrature,
) -> Result<BornState> {
    let map = error_map(traj, coupling, quad)?;
    Ok(apply_born(traj, &map, rho.matrix()))
}

fn apply_born(traj: &ControlTrajectory, map: &ErrorMap, rho: &ComplexMatrix) -> BornState {
    let inner = rho + map.phi_star.apply(rho).expect("dimension checked") - anticommutator(&map.k, rho) * real(0.5);
    let u = traj.total_unitary();
    let out = &u * inner * u.adjoint();
    let out = (&out + out.adjoint()) * real(0.5);
    BornState {
        trace_residual: (out.trace() - real(1.0)).norm(),
        min_eigenvalue: min_eigenvalue(&out),
        matrix: out,
    }
}

/// `ε = <ψ, K ψ> - <ψ, Φ^*(|ψ><ψ|) ψ>`.
pub fn error_time_domain(
    traj: &ControlTrajectory,
    coupling: &Coupling,
    psi: &DVector<C64>,
    quad: &Quadrature,
) -> Result<f64> {
    check_state(psi, traj.dim)?;
    let map = error_map(traj, coupling, quad)?;
    Ok(epsilon_from_map(&map, psi))
}

fn epsilon_from_map(map: &ErrorMap, psi: &DVector<C64>) -> f64 {
    let projector = psi * psi.adjoint();
    let k_term = psi.dotc(&(&map.k * psi));
    let phi_term = psi.dotc(&(map.phi_star.apply(&projector).expect("dimension checked") * psi));
    (k_term - phi_term).re
}

/// `1 - <U_S ψ, Γ^*(|ψ><ψ|) U_S ψ>`, the error read off the Born state.
pub fn error_from_born_state(
    traj: &ControlTrajectory,
    coupling: &Coupling,
    psi: &DVector<C64>,
    quad: &Quadrature,
) -> Result<f64> {
    check_state(psi, traj.dim)?;
    let map = error_map(traj, coupling, quad)?;
    let state = apply_born(traj, &map, &(psi * psi.adjoint()));
    let target = traj.total_unitary() * psi;
    Ok(1.0 - target.dotc(&(&state.matrix * &target)).re)
}

/// Filter operators `Y_α(ω) = ∫ S_α(s, -τ) e^{-iωs} ds`.
pub struct FilterBank {
    sampled: Sampled,
}

impl FilterBank {
    pub fn new(traj: &ControlTrajectory, ops: &[ComplexMatrix], time_points: usize) -> Result<Self> {
        for op in ops {
            ensure_dim(op, traj.dim)?;
        }
        Ok(Self {
            sampled: Sampled::new(traj, ops, time_points),
        })
    }

    pub fn len(&self) -> usize {
        self.sampled.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sampled.ops.is_empty()
    }

    /// `Y_α(ω)`.
    pub fn filter(&self, alpha: usize, omega: f64) -> ComplexMatrix {
        self.transform(alpha, -omega)
    }

    /// `∫ S_α(s) e^{+iωs} ds`, which equals `Y_α(ω)^*` for hermitian `S_α`.
    pub fn filter_conjugate(&self, alpha: usize, omega: f64) -> ComplexMatrix {
        self.transform(alpha, omega)
    }

    fn transform(&self, alpha: usize, freq: f64) -> ComplexMatrix {
        let grid = &self.sampled.grid;
        let ops = &self.sampled.ops[alpha];
        let n = ops[0].nrows();
        grid.nodes
            .iter()
            .zip(&grid.weights)
            .zip(ops)
            .fold(ComplexMatrix::zeros(n, n), |acc, ((&s, &w), op)| {
                acc + op * C64::from_polar(w, freq * s)
            })
    }
}

/// `Y_α(ω)` for a single operator.
pub fn filter_operator(
    traj: &ControlTrajectory,
    op: &ComplexMatrix,
    omega: f64,
    time_points: usize,
) -> Result<ComplexMatrix> {
    Ok(FilterBank::new(traj, std::slice::from_ref(op), time_points)?.filter(0, omega))
}

/// State-resolved filter vectors `Y_α(ω)ψ` for many frequencies.
struct StateFilters {
    tau: f64,
    psi: DVector<C64>,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    /// `vectors[α][i] = S_α(s_i) ψ`.
    vectors: Vec<Vec<DVector<C64>>>,
}

impl StateFilters {
    fn new(traj: &ControlTrajectory, ops: &[ComplexMatrix], psi: &DVector<C64>, points: usize) -> Self {
        let sampled = Sampled::new(traj, ops, points);
        let vectors = sampled
            .ops
            .iter()
            .map(|series| series.iter().map(|s| s * psi).collect())
            .collect();
        Self {
            tau: traj.tau,
            psi: psi.clone(),
            nodes: sampled.grid.nodes,
            weights: sampled.grid.weights,
            vectors,
        }
    }

    fn applied(&self, alpha: usize, omega: f64) -> DVector<C64> {
        let n = self.psi.len();
        self.nodes
            .iter()
            .zip(&self.weights)
            .zip(&self.vectors[alpha])
            .fold(DVector::zeros(n), |acc, ((&s, &w), v)| acc + v * C64::from_polar(w, -omega * s))
    }

    /// `[S_αβ(ω)]`.
    fn correlator(&self, omega: f64) -> ComplexMatrix {
        let k = self.vectors.len();
        let applied: Vec<DVector<C64>> = (0..k).map(|a| self.applied(a, omega)).collect();
        let means: Vec<C64> = applied.iter().map(|y| self.psi.dotc(y)).collect();
        ComplexMatrix::from_fn(k, k, |a, b| {
            (applied[a].dotc(&applied[b]) - means[a].conj() * means[b]) / (2.0 * self.tau)
        })
    }

    /// `|| Y_α ψ - <ψ, Y_α ψ> ψ ||`.
    fn eigen_residual(&self, alpha: usize, omega: f64) -> f64 {
        let y = self.applied(alpha, omega);
        let mean = self.psi.dotc(&y);
        (y - &self.psi * mean).norm()
    }
}

/// The device correlator `S_αβ(ω)` on a frequency grid.
#[derive(Clone, Debug)]
pub struct DeviceCorrelator {
    pub omegas: Vec<f64>,
    pub values: Vec<ComplexMatrix>,
}

pub fn device_correlator(
    traj: &ControlTrajectory,
    ops: &[ComplexMatrix],
    psi: &DVector<C64>,
    omegas: &[f64],
    time_points: usize,
) -> Result<DeviceCorrelator> {
    check_state(psi, traj.dim)?;
    for op in ops {
        ensure_dim(op, traj.dim)?;
    }
    let filters = StateFilters::new(traj, ops, psi, time_points);
    Ok(DeviceCorrelator {
        omegas: omegas.to_vec(),
        values: omegas.iter().map(|&w| filters.correlator(w)).collect(),
    })
}

/// `ε = 2τ ∫ Σ_αβ R_αβ(ω) S_αβ(ω) dω` with the integrand trace.
#[derive(Clone, Debug)]
pub struct FrequencyBudget {
    pub epsilon: f64,
    pub omegas: Vec<f64>,
    /// `Σ_αβ R_αβ(ω) S_αβ(ω)` at each node.
    pub overlap: Vec<f64>,
    /// Share of `ε` carried by the outer 2% of the grid at ends cut by `Ω_max`.
    pub boundary_fraction: f64,
    pub omega_max: f64,
    pub omega_points: usize,
    pub time_points: usize,
}

impl FrequencyBudget {
    /// Whether the cutoff visibly truncates the integrand.
    pub fn support_warning(&self) -> bool {
        self.boundary_fraction > 0.01
    }
}

fn overlap_at(coupling: &Coupling, filters: &StateFilters, omega: f64) -> f64 {
    let r = coupling.spectral_density(omega);
    if r.iter().all(|x| *x == C64::new(0.0, 0.0)) {
        return 0.0;
    }
    let s = filters.correlator(omega);
    r.iter().zip(s.iter()).map(|(a, b)| a * b).sum::<C64>().re
}

pub fn error_frequency_domain(
    traj: &ControlTrajectory,
    coupling: &Coupling,
    psi: &DVector<C64>,
    quad: &Quadrature,
) -> Result<FrequencyBudget> {
    let grid = FrequencyGrid::for_coupling(traj, coupling, quad)?;
    frequency_budget_on(traj, coupling, psi, &grid, quad.time_points)
}

fn frequency_budget_on(
    traj: &ControlTrajectory,
    coupling: &Coupling,
    psi: &DVector<C64>,
    grid: &FrequencyGrid,
    time_points: usize,
) -> Result<FrequencyBudget> {
    check_state(psi, traj.dim)?;
    check_coupling(traj, coupling)?;
    let filters = StateFilters::new(traj, coupling.ops(), psi, time_points);
    let overlap: Vec<f64> = grid.nodes.iter().map(|&w| overlap_at(coupling, &filters, w)).collect();
    let scale = 2.0 * traj.tau;
    let epsilon = scale * trapezoid(&grid.nodes, &overlap);

    let m = grid.nodes.len();
    let edge = (m / 50).max(1).min(m.saturating_sub(1));
    let mut boundary = 0.0;
    if m > 1 {
        if grid.truncated.0 {
            boundary += scale * trapezoid(&grid.nodes[..=edge], &overlap[..=edge]).abs();
        }
        if grid.truncated.1 {
            boundary += scale * trapezoid(&grid.nodes[m - 1 - edge..], &overlap[m - 1 - edge..]).abs();
        }
    }
    let boundary_fraction = if epsilon.abs() > 0.0 { boundary / epsilon.abs() } else { 0.0 };
    Ok(FrequencyBudget {
        epsilon,
        omegas: grid.nodes.clone(),
        overlap,
        boundary_fraction,
        omega_max: grid.omega_max,
        omega_points: grid.n_points,
        time_points,
    })
}

/// Error budget from both routes where available.
#[derive(Clone, Debug)]
pub struct ErrorBudget {
    /// Time-domain `ε`, present when the bath has a correlation function.
    pub epsilon_time: Option<f64>,
    pub error_map: Option<ErrorMap>,
    pub spectral: FrequencyBudget,
}

impl ErrorBudget {
    /// The time-domain value when available, else the frequency-domain one.
    pub fn epsilon(&self) -> f64 {
        self.epsilon_time.unwrap_or(self.spectral.epsilon)
    }
}

pub fn error_budget(
    traj: &ControlTrajectory,
    coupling: &Coupling,
    psi: &DVector<C64>,
    quad: &Quadrature,
) -> Result<ErrorBudget> {
    let spectral = error_frequency_domain(traj, coupling, psi, quad)?;
    let (epsilon_time, error_map) = if coupling.has_correlation() {
        let map = error_map(traj, coupling, quad)?;
        (Some(epsilon_from_map(&map, psi)), Some(map))
    } else {
        (None, None)
    };
    Ok(ErrorBudget {
        epsilon_time,
        error_map,
        spectral,
    })
}

/// Outcome of the eigenvector criterion on a frequency region.
#[derive(Clone, Debug)]
pub struct DfCriterion {
    /// `max_(α, ω) || Y_α(ω)ψ - λ_α(ω)ψ ||` over the sampled region.
    pub max_residual: f64,
    /// Frequency-route error restricted to the region.
    pub epsilon_on_support: f64,
    pub points: usize,
}

impl DfCriterion {
    pub fn is_eigenvector(&self, tol: f64) -> bool {
        self.max_residual <= tol
    }
}

pub fn df_criterion(
    traj: &ControlTrajectory,
    coupling: &Coupling,
    psi: &DVector<C64>,
    support: (f64, f64),
    quad: &Quadrature,
) -> Result<DfCriterion> {
    check_state(psi, traj.dim)?;
    check_coupling(traj, coupling)?;
    if !(support.1 > support.0) {
        return Err(Error::Invalid(format!("empty frequency region {support:?}")));
    }
    let omega_max = quad.omega_max.unwrap_or(DEFAULT_OMEGA_MAX_TAU / traj.tau);
    let grid = FrequencyGrid::new(omega_max, quad.omega_points, support)?;
    let filters = StateFilters::new(traj, coupling.ops(), psi, quad.time_points);
    let mut max_residual = 0.0f64;
    for &w in &grid.nodes {
        for alpha in 0..coupling.ops.len() {
            max_residual = max_residual.max(filters.eigen_residual(alpha, w));
        }
    }
    let restricted = FrequencyGrid {
        truncated: (false, false),
        ..grid.clone()
    };
    let budget = frequency_budget_on(traj, coupling, psi, &restricted, quad.time_points)?;
    Ok(DfCriterion {
        max_residual,
        epsilon_on_support: budget.epsilon,
        points: grid.nodes.len(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Trend {
    Increasing,
    Decreasing,
    Constant,
    Mixed,
}

impl Trend {
    pub fn as_str(&self) -> &'static str {
        match self {
            Trend::Increasing => "increasing",
            Trend::Decreasing => "decreasing",
            Trend::Constant => "constant",
            Trend::Mixed => "mixed",
        }
    }
}

#[derive(Clone, Debug)]
pub struct SpeedScan {
    /// `(λ, ε(λ))` in input order.
    pub rows: Vec<(f64, f64)>,
    pub trend: Trend,
}

/// `ε` for the family of trajectories `(λ dt, H/λ)`. Without an explicit
/// cutoff the frequency grid follows each rescaled window.
pub fn gate_speed_scan(
    traj: &ControlTrajectory,
    coupling: &Coupling,
    psi: &DVector<C64>,
    lambdas: &[f64],
    quad: &Quadrature,
) -> Result<SpeedScan> {
    let mut rows = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas {
        let scaled = traj.rescaled(lambda)?;
        let budget = error_frequency_domain(&scaled, coupling, psi, quad)?;
        rows.push((lambda, budget.epsilon));
    }
    let mut sorted = rows.clone();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let diffs: Vec<f64> = sorted.windows(2).map(|w| w[1].1 - w[0].1).collect();
    let trend = if diffs.is_empty() || diffs.iter().all(|d| *d == 0.0) {
        Trend::Constant
    } else if diffs.iter().all(|d| *d > 0.0) {
        Trend::Increasing
    } else if diffs.iter().all(|d| *d < 0.0) {
        Trend::Decreasing
    } else {
        Trend::Mixed
    };
    Ok(SpeedScan { rows, trend })
}

/// Diagnostic estimate of the device correlator from the time-averaged
/// two-point function
/// `g(t) = (1/2τ) ∫ <S_α(t+s) S_β(s)> - <S_α(t+s)><S_β(s)> ds`,
/// transformed as `F(ω) = (1/2π) ∫ g(t) e^{iωt} dt` over `|t| ≤ max_lag`.
pub fn time_average_spectrum(
    traj: &ControlTrajectory,
    ops: (&ComplexMatrix, &ComplexMatrix),
    psi: &DVector<C64>,
    omegas: &[f64],
    max_lag: f64,
    points: usize,
) -> Result<Vec<C64>> {
    check_state(psi, traj.dim)?;
    ensure_dim(ops.0, traj.dim)?;
    ensure_dim(ops.1, traj.dim)?;
    if !(max_lag > 0.0 && max_lag < 2.0 * traj.tau) {
        return Err(Error::Invalid(format!("max_lag must lie in (0, 2 tau), got {max_lag}")));
    }
    let points = points.max(3) | 1;
    let h = 2.0 * traj.tau / (points - 1) as f64;
    let times: Vec<f64> = (0..points).map(|i| -traj.tau + h * i as f64).collect();
    let states: Vec<ComplexMatrix> = times.iter().map(|&s| traj.from_start(s)).collect();
    let a_psi: Vec<DVector<C64>> = states.iter().map(|u| u.adjoint() * ops.0 * u * psi).collect();
    let b_psi: Vec<DVector<C64>> = states.iter().map(|u| u.adjoint() * ops.1 * u * psi).collect();
    let max_shift = (max_lag / h).floor() as isize;
    let mut lags = Vec::new();
    let mut g = Vec::new();
    for shift in -max_shift..=max_shift {
        let mut total = C64::new(0.0, 0.0);
        let mut count = 0usize;
        for i in 0..points as isize {
            let j = i + shift;
            if j < 0 || j >= points as isize {
                continue;
            }
            let (i, j) = (i as usize, j as usize);
            // <ψ| S_α(t+s) S_β(s) |ψ> = <S_α(t+s) ψ, S_β(s) ψ>
            total += a_psi[j].dotc(&b_psi[i]) - psi.dotc(&a_psi[j]) * psi.dotc(&b_psi[i]);
            count += 1;
        }
        lags.push(shift as f64 * h);
        g.push(total / count as f64);
    }
    Ok(omegas
        .iter()
        .map(|&w| {
            let values: Vec<C64> = lags.iter().zip(&g).map(|(&t, &v)| v * C64::from_polar(1.0, w * t)).collect();
            let re: Vec<f64> = values.iter().map(|v| v.re).collect();
            let im: Vec<f64> = values.iter().map(|v| v.im).collect();
            C64::new(trapezoid(&lags, &re), trapezoid(&lags, &im)) / (2.0 * std::f64::consts::PI)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::pauli::*;
    use crate::operators::{frobenius_norm, unitary_evolution, zeros};

    fn ket(amps: &[C64]) -> DVector<C64> {
        DVector::from_column_slice(amps)
    }

    fn plus() -> DVector<C64> {
        let a = real(std::f64::consts::FRAC_1_SQRT_2);
        ket(&[a, a])
    }

    fn zero_ket() -> DVector<C64> {
        ket(&[real(1.0), real(0.0)])
    }

    fn dephasing(g: f64, tc: f64) -> Coupling {
        Coupling::uncorrelated(
            vec![sigma_z()],
            BathProfile::Exponential {
                correlation_time: tc,
                coupling: g,
            },
            1e-12,
        )
        .unwrap()
    }

    #[test]
    fn propagator_examples() {
        let h = sigma_x() * real(0.3) + sigma_z() * real(0.8);
        let traj = ControlTrajectory::constant(h.clone(), 0.7).unwrap();
        assert_eq!(traj.propagator(0.1, 0.1).unwrap(), identity(2));
        let total = traj.propagator(-0.7, 0.7).unwrap();
        assert!(frobenius_norm(&(total - unitary_evolution(&h, 1.4))) < 1e-12);
        assert!(matches!(traj.propagator(0.0, 0.8), Err(Error::OutOfWindow { .. })));
    }

    #[test]
    fn two_segment_propagator_orders_factors() {
        let traj = ControlTrajectory::new(1.0, vec![(1.0, sigma_x()), (1.0, sigma_z())], 1e-12).unwrap();
        let expected = unitary_evolution(&sigma_z(), 1.0) * unitary_evolution(&sigma_x(), 1.0);
        assert!(frobenius_norm(&(traj.total_unitary() - &expected)) < 1e-12);
        let wrong = unitary_evolution(&sigma_x(), 1.0) * unitary_evolution(&sigma_z(), 1.0);
        assert!(frobenius_norm(&(traj.total_unitary() - wrong)) > 0.1);
    }

    #[test]
    fn trajectory_validation() {
        assert!(ControlTrajectory::new(1.0, vec![(1.5, sigma_x())], 1e-12).is_err());
        assert!(ControlTrajectory::new(1.0, vec![(2.0, sigma_minus())], 1e-12).is_err());
        assert!(ControlTrajectory::new(1.0, vec![], 1e-12).is_err());
        assert!(ControlTrajectory::new(1.0, vec![(-1.0, sigma_x()), (3.0, sigma_x())], 1e-12).is_err());
    }

    #[test]
    fn simpson_grid_integrates_cubics_exactly() {
        let traj = ControlTrajectory::new(1.0, vec![(0.5, zeros(2)), (1.5, zeros(2))], 1e-12).unwrap();
        let grid = traj.time_grid(11);
        let integral: f64 = grid.nodes.iter().zip(&grid.weights).map(|(s, w)| w * s * s * s + w * s * s).sum();
        assert!((integral - 2.0 / 3.0).abs() < 1e-14);
        assert_eq!(grid.nodes.first(), Some(&-1.0));
        assert_eq!(grid.nodes.last(), Some(&1.0));
    }

    #[test]
    fn interaction_op_examples() {
        let traj = ControlTrajectory::constant(zeros(2), 1.0).unwrap();
        assert_eq!(interaction_op(&traj, &sigma_x(), 0.3).unwrap(), sigma_x());

        let w = 1.7;
        let traj = ControlTrajectory::constant(sigma_z() * real(w / 2.0), 1.0).unwrap();
        let s = 0.4;
        let phase = w * (s + 1.0);
        let expected = sigma_x() * real(phase.cos()) - sigma_y() * real(phase.sin());
        assert!(frobenius_norm(&(interaction_op(&traj, &sigma_x(), s).unwrap() - expected)) < 1e-12);
        assert!(frobenius_norm(&(interaction_op(&traj, &sigma_z(), s).unwrap() - sigma_z())) < 1e-12);
    }

    #[test]
    fn zero_coupling_gives_zero_error() {
        let traj = ControlTrajectory::constant(sigma_x(), 1.0).unwrap();
        let coupling = dephasing(0.0, 1.0);
        let map = error_map(&traj, &coupling, &Quadrature::default()).unwrap();
        assert_eq!(frobenius_norm(&map.k), 0.0);
        assert_eq!(map.phi_star.norm(), 0.0);
        assert_eq!(error_time_domain(&traj, &coupling, &plus(), &Quadrature::default()).unwrap(), 0.0);
    }

    #[test]
    fn dephasing_closed_form() {
        let (g, tc, tau) = (0.1f64, 0.5f64, 1.0f64);
        let c = 2.0 * g * g * tc * (2.0 * tau - tc * (1.0 - (-2.0 * tau / tc).exp()));
        let traj = ControlTrajectory::constant(zeros(2), tau).unwrap();
        let coupling = dephasing(g, tc);
        let quad = Quadrature {
            time_points: 801,
            ..Quadrature::default()
        };
        let map = error_map(&traj, &coupling, &quad).unwrap();
        assert!(frobenius_norm(&(&map.k - identity(2) * real(c))) < 1e-5 * c);
        let rho = plus() * plus().adjoint();
        let phi = map.phi_star.apply(&rho).unwrap();
        assert!(frobenius_norm(&(phi - sigma_z() * &rho * sigma_z() * real(c))) < 1e-5 * c);

        let eps = error_time_domain(&traj, &coupling, &plus(), &quad).unwrap();
        assert!((eps - c).abs() < 1e-5 * c);
        let state = born_state(&traj, &coupling, &crate::operators::DensityMatrix::pure(&plus()).unwrap(), &quad).unwrap();
        assert!((state.matrix[(0, 1)].re - 0.5 * (1.0 - 2.0 * c)).abs() < 1e-5 * c);
        assert!(error_time_domain(&traj, &coupling, &zero_ket(), &quad).unwrap().abs() < 1e-15);
    }

    #[test]
    fn born_trace_and_consistency() {
        let traj = ControlTrajectory::new(
            0.8,
            vec![(0.6, sigma_x() * real(0.9)), (1.0, sigma_y() * real(-0.4) + sigma_z())],
            1e-12,
        )
        .unwrap();
        let coupling = Coupling::uncorrelated(
            vec![sigma_z(), sigma_x()],
            BathProfile::Gaussian {
                center: 0.5,
                width: 1.5,
                coupling: 0.2,
            },
            1e-12,
        )
        .unwrap();
        let quad = Quadrature::default();
        let psi = ket(&[c(0.6, 0.0), c(0.0, 0.8)]);
        let state = born_state(&traj, &coupling, &crate::operators::DensityMatrix::pure(&psi).unwrap(), &quad).unwrap();
        assert!(state.trace_residual <= 1e-9);
        let e53 = error_time_domain(&traj, &coupling, &psi, &quad).unwrap();
        let e52 = error_from_born_state(&traj, &coupling, &psi, &quad).unwrap();
        assert!((e53 - e52).abs() <= 1e-10);
        assert!(e53 > 0.0);
    }

    use crate::operators::c;

    #[test]
    fn error_map_duality_and_positivity() {
        let traj = ControlTrajectory::new(1.0, vec![(1.2, sigma_x()), (0.8, sigma_z() * real(0.5))], 1e-12).unwrap();
        let coupling = dephasing(0.3, 0.7);
        let map = error_map(&traj, &coupling, &Quadrature::default()).unwrap();
        let a = crate::operators::from_rows(&[&[c(0.3, 0.0), c(1.0, -2.0)], &[c(0.5, 0.5), c(-1.0, 0.0)]]);
        let rho = crate::operators::from_rows(&[&[c(0.7, 0.0), c(0.1, 0.2)], &[c(0.1, -0.2), c(0.3, 0.0)]]);
        let lhs = (&a * map.phi_star.apply(&rho).unwrap()).trace();
        let rhs = (map.phi().apply(&a).unwrap() * &rho).trace();
        assert!((lhs - rhs).norm() < 1e-9);
        assert!(frobenius_norm(&(map.phi().apply(&identity(2)).unwrap() - &map.k)) < 1e-12);
        assert!(min_eigenvalue(&map.k) >= -1e-12);
        assert!(min_eigenvalue(&map.phi_star.choi()) >= -1e-9);
    }

    #[test]
    fn filter_examples() {
        let tau = 1.3;
        let traj = ControlTrajectory::constant(zeros(2), tau).unwrap();
        let bank = FilterBank::new(&traj, &[sigma_z()], 401).unwrap();
        assert!(frobenius_norm(&(bank.filter(0, 0.0) - sigma_z() * real(2.0 * tau))) < 1e-12);
        for w in [0.5, 2.0, 7.0] {
            let expected = 2.0 * tau * (w * tau).sin() / (w * tau);
            assert!(frobenius_norm(&(bank.filter(0, w) - sigma_z() * real(expected))) < 1e-7);
        }
        let rotating = ControlTrajectory::constant(sigma_z() * real(0.9), tau).unwrap();
        let y = filter_operator(&rotating, &sigma_z(), 2.0, 401).unwrap();
        let expected = 2.0 * tau * (2.0 * tau).sin() / (2.0 * tau);
        assert!(frobenius_norm(&(y - sigma_z() * real(expected))) < 1e-7);
    }

    #[test]
    fn filter_conjugate_identity() {
        let traj = ControlTrajectory::new(1.0, vec![(0.7, sigma_x()), (1.3, sigma_y() + sigma_z())], 1e-12).unwrap();
        let bank = FilterBank::new(&traj, &[sigma_x() * real(0.5) + sigma_z()], 401).unwrap();
        for w in [-3.0, 0.4, 5.0] {
            assert!(frobenius_norm(&(bank.filter(0, w).adjoint() - bank.filter_conjugate(0, w))) < 1e-12);
        }
    }

    #[test]
    fn device_correlator_examples() {
        let tau = 1.0;
        let traj = ControlTrajectory::constant(zeros(2), tau).unwrap();
        let omegas = [0.0, 0.8, 3.0];
        let corr = device_correlator(&traj, &[sigma_z()], &plus(), &omegas, 401).unwrap();
        for (w, s) in omegas.iter().zip(&corr.values) {
            let sinc = if *w == 0.0 { 1.0 } else { (w * tau).sin() / (w * tau) };
            assert!((s[(0, 0)].re - 2.0 * tau * sinc * sinc).abs() < 1e-7);
        }
        let zero = device_correlator(&traj, &[sigma_z()], &zero_ket(), &omegas, 401).unwrap();
        assert!(zero.values.iter().all(|s| s[(0, 0)].norm() < 1e-14));
    }

    #[test]
    fn flat_bath_parseval() {
        let tau = 1.0;
        let level = 0.01;
        let traj = ControlTrajectory::constant(zeros(2), tau).unwrap();
        let coupling = Coupling::uncorrelated(vec![sigma_z()], BathProfile::Flat { level, cutoff: 400.0 }, 1e-12).unwrap();
        let quad = Quadrature {
            time_points: 2001,
            omega_max: Some(400.0),
            omega_points: 40001,
        };
        let budget = error_frequency_domain(&traj, &coupling, &plus(), &quad).unwrap();
        let expected = 4.0 * std::f64::consts::PI * level * tau;
        assert!((budget.epsilon - expected).abs() < 2e-3 * expected);
        assert!(!budget.support_warning());
    }

    #[test]
    fn zero_density_gives_zero() {
        let traj = ControlTrajectory::constant(sigma_x(), 1.0).unwrap();
        let coupling = Coupling::uncorrelated(vec![sigma_z()], BathProfile::Flat { level: 0.0, cutoff: 3.0 }, 1e-12).unwrap();
        let budget = error_frequency_domain(&traj, &coupling, &plus(), &Quadrature::default()).unwrap();
        assert_eq!(budget.epsilon, 0.0);
    }

    #[test]
    fn gaussian_routes_agree() {
        let traj = ControlTrajectory::new(1.0, vec![(0.9, sigma_x() * real(1.3)), (1.1, sigma_z() * real(-0.6))], 1e-12).unwrap();
        let coupling = Coupling::uncorrelated(
            vec![sigma_z()],
            BathProfile::Gaussian {
                center: 0.8,
                width: 1.2,
                coupling: 0.15,
            },
            1e-12,
        )
        .unwrap();
        let psi = plus();
        let quad = Quadrature::default();
        let t = error_time_domain(&traj, &coupling, &psi, &quad).unwrap();
        let f = error_frequency_domain(&traj, &coupling, &psi, &quad).unwrap().epsilon;
        assert!((t - f).abs() <= 1e-6f64.max(1e-3 * t), "{t} vs {f}");
    }

    #[test]
    fn ohmic_routes_agree() {
        let traj = ControlTrajectory::constant(sigma_z() * real(0.5), 1.0).unwrap();
        let coupling = Coupling::uncorrelated(
            vec![sigma_x()],
            BathProfile::Ohmic {
                kappa: 3.0,
                cutoff: 2.0,
                coupling: 0.1,
            },
            1e-12,
        )
        .unwrap();
        let quad = Quadrature {
            time_points: 801,
            omega_max: Some(80.0),
            omega_points: 16001,
        };
        let t = error_time_domain(&traj, &coupling, &plus(), &quad).unwrap();
        let f = error_frequency_domain(&traj, &coupling, &plus(), &quad).unwrap().epsilon;
        assert!((t - f).abs() <= 1e-4 * t, "{t} vs {f}");
    }

    #[test]
    fn df_criterion_examples() {
        let traj = ControlTrajectory::constant(zeros(2), 1.0).unwrap();
        let coupling = dephasing(0.2, 1.0);
        let quad = Quadrature::default();
        let good = df_criterion(&traj, &coupling, &zero_ket(), (-5.0, 5.0), &quad).unwrap();
        assert!(good.is_eigenvector(1e-12));
        assert!(good.epsilon_on_support.abs() <= 1e-12);
        let bad = df_criterion(&traj, &coupling, &plus(), (-5.0, 5.0), &quad).unwrap();
        assert!(bad.max_residual > 0.1);
        assert!(bad.epsilon_on_support > 0.0);
    }

    #[test]
    fn speed_scan_flat_scales_linearly() {
        let traj = ControlTrajectory::constant(zeros(2), 1.0).unwrap();
        let coupling = Coupling::uncorrelated(vec![sigma_z()], BathProfile::Flat { level: 0.01, cutoff: 1000.0 }, 1e-12).unwrap();
        let scan = gate_speed_scan(&traj, &coupling, &plus(), &[1.0, 2.0, 4.0], &Quadrature::default()).unwrap();
        for w in scan.rows.windows(2) {
            assert!((w[1].1 / w[0].1 - 2.0).abs() < 0.1);
        }
        assert_eq!(scan.trend, Trend::Increasing);
    }

    #[test]
    fn speed_scan_super_ohmic_decreases() {
        let traj = ControlTrajectory::constant(sigma_z() * real(2.0), 5.0).unwrap();
        let coupling = Coupling::uncorrelated(
            vec![sigma_x()],
            BathProfile::Ohmic {
                kappa: 3.0,
                cutoff: 40.0,
                coupling: 0.1,
            },
            1e-12,
        )
        .unwrap();
        let excited = ket(&[real(0.0), real(1.0)]);
        let scan = gate_speed_scan(&traj, &coupling, &excited, &[1.0, 2.0, 4.0], &Quadrature::default()).unwrap();
        assert_eq!(scan.trend, Trend::Decreasing);
        for w in scan.rows.windows(2) {
            let slope = (w[1].1 / w[0].1).ln() / (w[1].0 / w[0].0).ln();
            assert!((slope + 2.0).abs() < 0.15, "slope {slope}");
        }
    }

    #[test]
    fn speed_scan_zero_coupling() {
        let traj = ControlTrajectory::constant(sigma_x(), 1.0).unwrap();
        let coupling = dephasing(0.0, 1.0);
        let scan = gate_speed_scan(&traj, &coupling, &plus(), &[0.5, 1.0], &Quadrature::default()).unwrap();
        assert!(scan.rows.iter().all(|r| r.1 == 0.0));
    }

    #[test]
    fn tabulated_density_interpolates() {
        let profile = BathProfile::Tabulated {
            omega: vec![-1.0, 0.0, 2.0],
            values: vec![identity(1) * real(0.0), identity(1) * real(1.0), identity(1) * real(3.0)],
        };
        let coupling = Coupling::uncorrelated(vec![sigma_z()], profile, 1e-12).unwrap();
        assert!(!coupling.has_correlation());
        assert!((coupling.spectral_density(1.0)[(0, 0)].re - 2.0).abs() < 1e-15);
        assert_eq!(coupling.spectral_density(2.5)[(0, 0)].re, 0.0);
        let traj = ControlTrajectory::constant(zeros(2), 1.0).unwrap();
        assert!(error_map(&traj, &coupling, &Quadrature::default()).is_err());
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(Coupling::uncorrelated(vec![sigma_minus()], BathProfile::Flat { level: 1.0, cutoff: 1.0 }, 1e-12).is_err());
        let mix = crate::operators::from_rows(&[&[real(1.0), real(2.0)], &[real(2.0), real(1.0)]]);
        assert!(Coupling::new(vec![sigma_x(), sigma_z()], BathProfile::Flat { level: 1.0, cutoff: 1.0 }, mix, 1e-12).is_err());
        let traj = ControlTrajectory::constant(zeros(2), 1.0).unwrap();
        let unnormalized = ket(&[real(1.0), real(1.0)]);
        assert!(matches!(
            error_time_domain(&traj, &dephasing(0.1, 1.0), &unnormalized, &Quadrature::default()),
            Err(Error::NotNormalized { .. })
        ));
    }

    #[test]
    fn time_average_spectrum_peaks_at_transition() {
        let w0 = 3.0;
        let traj = ControlTrajectory::constant(sigma_z() * real(w0 / 2.0), 20.0).unwrap();
        let omegas: Vec<f64> = (0..121).map(|k| -6.0 + 0.1 * k as f64).collect();
        let spectrum = time_average_spectrum(&traj, (&sigma_x(), &sigma_x()), &zero_ket(), &omegas, 10.0, 2001).unwrap();
        let corr = device_correlator(&traj, &[sigma_x()], &zero_ket(), &omegas, 2001).unwrap();
        let argmax = |v: &[f64]| v.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap().0;
        let f: Vec<f64> = spectrum.iter().map(|z| z.re).collect();
        let s: Vec<f64> = corr.values.iter().map(|m| m[(0, 0)].re).collect();
        assert!((argmax(&f) as isize - argmax(&s) as isize).abs() <= 1);
        assert!((omegas[argmax(&s)].abs() - w0).abs() <= 0.1);
    }
}
