// Copyright 2026 The Decohere Authors
// SPDX-License-Identifier: Apache-2.0

//! JSON formats for matrices, channels, generators, trajectories, baths,
//! states and registered models.
//!
//! A matrix is `{"dim": n, "rows": [[[re, im], ...], ...]}` in row-major
//! order. Every parser rejects inputs whose dimension exceeds a cap before
//! allocating anything proportional to it.

use nalgebra::DVector;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::born::{BathProfile, ControlTrajectory, Coupling};
use crate::channels::KrausMap;
use crate::error::{Error, Result};
use crate::lindblad::{build_gibbs_generator, GKLSGenerator, GibbsGenerator};
use crate::operators::{identity, real, ComplexMatrix, C64};
use crate::symmetry::{build_private_bath_generator, build_superradiance_generator};

/// Largest accepted matrix dimension.
pub const DEFAULT_DIM_CAP: usize = 256;
/// Largest accepted operator or segment list.
pub const MAX_LIST_LEN: usize = 4096;
/// Largest number of sites for registered models.
pub const MAX_SITES: usize = 6;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixJson {
    dim: usize,
    rows: Vec<Vec<[f64; 2]>>,
}

fn check_dim(dim: usize, cap: usize) -> Result<()> {
    if dim == 0 {
        return Err(Error::Invalid("dimension must be positive".into()));
    }
    if dim > cap {
        return Err(Error::SizeCap { size: dim, cap });
    }
    Ok(())
}

fn check_len(what: &str, len: usize) -> Result<()> {
    if len > MAX_LIST_LEN {
        return Err(Error::Invalid(format!("{what} has {len} entries, at most {MAX_LIST_LEN} allowed")));
    }
    Ok(())
}

fn finite(what: &str, x: f64) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::Invalid(format!("{what} must be finite")))
    }
}

impl MatrixJson {
    fn into_matrix(self, cap: usize) -> Result<ComplexMatrix> {
        check_dim(self.dim, cap)?;
        let n = self.dim;
        if self.rows.len() != n || self.rows.iter().any(|r| r.len() != n) {
            return Err(Error::Invalid(format!("matrix rows do not form a {n}x{n} array")));
        }
        let mut m = ComplexMatrix::zeros(n, n);
        for (i, row) in self.rows.iter().enumerate() {
            for (j, [re, im]) in row.iter().enumerate() {
                m[(i, j)] = C64::new(finite("matrix entry", *re)?, finite("matrix entry", *im)?);
            }
        }
        Ok(m)
    }
}

fn matrix_of(raw: MatrixJson, dim: usize, cap: usize) -> Result<ComplexMatrix> {
    if raw.dim != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: raw.dim,
        });
    }
    raw.into_matrix(cap)
}

/// Serializes a square matrix in the literal format.
pub fn matrix_to_json(m: &ComplexMatrix) -> Value {
    let rows: Vec<Value> = (0..m.nrows())
        .map(|i| Value::Array((0..m.ncols()).map(|j| json!([m[(i, j)].re, m[(i, j)].im])).collect()))
        .collect();
    json!({"dim": m.nrows(), "rows": rows})
}

pub fn parse_matrix(input: &str) -> Result<ComplexMatrix> {
    parse_matrix_with_cap(input, DEFAULT_DIM_CAP)
}

pub fn parse_matrix_with_cap(input: &str, cap: usize) -> Result<ComplexMatrix> {
    serde_json::from_str::<MatrixJson>(input)?.into_matrix(cap)
}

/// A Kraus list as read from disk, before the unitality check.
#[derive(Clone, Debug)]
pub struct ChannelSpec {
    pub dim: usize,
    pub kraus: Vec<ComplexMatrix>,
}

impl ChannelSpec {
    /// Validates unitality; the error carries the defect norm.
    pub fn build(self, tol: f64) -> Result<KrausMap> {
        KrausMap::new(self.kraus, tol)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ChannelJson {
    dim: usize,
    kraus: Vec<MatrixJson>,
}

pub fn parse_channel(input: &str) -> Result<ChannelSpec> {
    parse_channel_with_cap(input, DEFAULT_DIM_CAP)
}

pub fn parse_channel_with_cap(input: &str, cap: usize) -> Result<ChannelSpec> {
    let raw: ChannelJson = serde_json::from_str(input)?;
    check_dim(raw.dim, cap)?;
    check_len("kraus", raw.kraus.len())?;
    if raw.kraus.is_empty() {
        return Err(Error::Invalid("kraus list is empty".into()));
    }
    let kraus = raw
        .kraus
        .into_iter()
        .map(|m| matrix_of(m, raw.dim, cap))
        .collect::<Result<Vec<_>>>()?;
    Ok(ChannelSpec { dim: raw.dim, kraus })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct OperatorListJson {
    dim: usize,
    ops: Vec<MatrixJson>,
}

/// `{"dim": n, "ops": [<matrix>, ...]}`, e.g. generators of an algebra.
pub fn parse_operator_list(input: &str) -> Result<Vec<ComplexMatrix>> {
    parse_operator_list_with_cap(input, DEFAULT_DIM_CAP)
}

pub fn parse_operator_list_with_cap(input: &str, cap: usize) -> Result<Vec<ComplexMatrix>> {
    let raw: OperatorListJson = serde_json::from_str(input)?;
    check_dim(raw.dim, cap)?;
    check_len("ops", raw.ops.len())?;
    raw.ops.into_iter().map(|m| matrix_of(m, raw.dim, cap)).collect()
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GeneratorJson {
    dim: usize,
    #[serde(rename = "H")]
    h: MatrixJson,
    #[serde(rename = "V", default)]
    v: Vec<MatrixJson>,
    #[serde(rename = "T", default)]
    temperature: Option<f64>,
    #[serde(default)]
    omega: Option<Vec<f64>>,
}

/// A GKLS generator, or a Gibbs generator when a temperature is given.
#[derive(Clone, Debug)]
pub struct GeneratorSpec {
    pub dim: usize,
    pub hamiltonian: ComplexMatrix,
    pub lindblad: Vec<ComplexMatrix>,
    pub temperature: Option<f64>,
    pub omega: Option<Vec<f64>>,
}

/// Parsed generator with its Gibbs structure kept when present.
#[derive(Clone, Debug)]
pub enum LoadedGenerator {
    Plain(GKLSGenerator),
    Gibbs(GibbsGenerator),
}

impl LoadedGenerator {
    pub fn generator(&self) -> &GKLSGenerator {
        match self {
            LoadedGenerator::Plain(g) => g,
            LoadedGenerator::Gibbs(g) => g.generator(),
        }
    }

    pub fn gibbs(&self) -> Option<&GibbsGenerator> {
        match self {
            LoadedGenerator::Plain(_) => None,
            LoadedGenerator::Gibbs(g) => Some(g),
        }
    }
}

impl GeneratorSpec {
    /// For a Gibbs spec, `V` lists the eigenoperators and `omega` (when given)
    /// must match their Bohr frequencies within `tol`.
    pub fn build(self, tol: f64) -> Result<LoadedGenerator> {
        let Some(t) = self.temperature else {
            if self.omega.is_some() {
                return Err(Error::Invalid("\"omega\" requires a temperature \"T\"".into()));
            }
            return Ok(LoadedGenerator::Plain(GKLSGenerator::new(self.hamiltonian, self.lindblad, tol)?));
        };
        let gibbs = build_gibbs_generator(self.hamiltonian, t, self.lindblad, tol)?;
        if let Some(omega) = self.omega {
            if omega.len() != gibbs.eigen_ops().len() {
                return Err(Error::Invalid(format!(
                    "{} frequencies given for {} eigenoperators",
                    omega.len(),
                    gibbs.eigen_ops().len()
                )));
            }
            for (given, (_, actual)) in omega.iter().zip(gibbs.eigen_ops()) {
                if !((given - actual).abs() <= tol.max(1e-12) * 1.0f64.max(actual.abs())) {
                    return Err(Error::Precondition(format!(
                        "declared Bohr frequency {given} differs from [H, V] = w V with w = {actual}"
                    )));
                }
            }
        }
        Ok(LoadedGenerator::Gibbs(gibbs))
    }
}

pub fn parse_generator(input: &str) -> Result<GeneratorSpec> {
    parse_generator_with_cap(input, DEFAULT_DIM_CAP)
}

pub fn parse_generator_with_cap(input: &str, cap: usize) -> Result<GeneratorSpec> {
    let raw: GeneratorJson = serde_json::from_str(input)?;
    check_dim(raw.dim, cap)?;
    check_len("V", raw.v.len())?;
    let hamiltonian = matrix_of(raw.h, raw.dim, cap)?;
    let lindblad = raw
        .v
        .into_iter()
        .map(|m| matrix_of(m, raw.dim, cap))
        .collect::<Result<Vec<_>>>()?;
    if let Some(t) = raw.temperature {
        finite("T", t)?;
    }
    if let Some(omega) = &raw.omega {
        check_len("omega", omega.len())?;
        for w in omega {
            finite("omega", *w)?;
        }
    }
    Ok(GeneratorSpec {
        dim: raw.dim,
        hamiltonian,
        lindblad,
        temperature: raw.temperature,
        omega: raw.omega,
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SegmentJson {
    dt: f64,
    #[serde(rename = "H")]
    h: MatrixJson,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TrajectoryJson {
    tau: f64,
    segments: Vec<SegmentJson>,
}

pub fn parse_trajectory(input: &str, tol: f64) -> Result<ControlTrajectory> {
    parse_trajectory_with_cap(input, tol, DEFAULT_DIM_CAP)
}

pub fn parse_trajectory_with_cap(input: &str, tol: f64, cap: usize) -> Result<ControlTrajectory> {
    let raw: TrajectoryJson = serde_json::from_str(input)?;
    check_len("segments", raw.segments.len())?;
    let dim = raw
        .segments
        .first()
        .map(|s| s.h.dim)
        .ok_or_else(|| Error::Invalid("trajectory has no segments".into()))?;
    check_dim(dim, cap)?;
    let segments = raw
        .segments
        .into_iter()
        .map(|s| Ok((s.dt, matrix_of(s.h, dim, cap)?)))
        .collect::<Result<Vec<_>>>()?;
    ControlTrajectory::new(raw.tau, segments, tol)
}

#[derive(Deserialize)]
#[serde(untagged)]
enum TableEntry {
    Scalar(f64),
    Matrix(Vec<Vec<f64>>),
}

#[derive(Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
enum ProfileJson {
    Gaussian {
        center: f64,
        width: f64,
        coupling: f64,
    },
    Exponential {
        correlation_time: f64,
        coupling: f64,
    },
    Flat {
        level: f64,
        cutoff: f64,
    },
    Ohmic {
        kappa: f64,
        cutoff: f64,
        coupling: f64,
    },
    Tabulated {
        omega: Vec<f64>,
        #[serde(rename = "R")]
        r: Vec<TableEntry>,
    },
}

#[derive(Deserialize)]
struct BathJson {
    #[serde(rename = "S")]
    s: Vec<MatrixJson>,
    #[serde(default)]
    mix: Option<Vec<Vec<[f64; 2]>>>,
    #[serde(flatten)]
    profile: Value,
}

/// A bath spectrum together with the system coupling operators.
///
/// ```json
/// {"type": "ohmic", "kappa": 3, "cutoff": 2, "coupling": 0.1,
///  "S": [<matrix>, ...], "mix": [[[1,0]]]}
/// ```
///
/// A `"type"` of `"tabulated"` may be omitted when `"omega"` and `"R"` are
/// present. Entries of `"R"` are numbers (scaled by `"mix"`) or real
/// channel-by-channel matrices.
pub fn parse_bath(input: &str, tol: f64) -> Result<Coupling> {
    parse_bath_with_cap(input, tol, DEFAULT_DIM_CAP)
}

pub fn parse_bath_with_cap(input: &str, tol: f64, cap: usize) -> Result<Coupling> {
    let raw: BathJson = serde_json::from_str(input)?;
    check_len("S", raw.s.len())?;
    let dim = raw
        .s
        .first()
        .map(|s| s.dim)
        .ok_or_else(|| Error::Invalid("bath needs at least one coupling operator in \"S\"".into()))?;
    check_dim(dim, cap)?;
    let ops = raw
        .s
        .into_iter()
        .map(|m| matrix_of(m, dim, cap))
        .collect::<Result<Vec<_>>>()?;
    let k = ops.len();
    let mix = match raw.mix {
        None => identity(k),
        Some(rows) => MatrixJson { dim: k, rows }.into_matrix(MAX_LIST_LEN)?,
    };
    let mut profile_value = raw.profile;
    if let Value::Object(map) = &mut profile_value {
        if !map.contains_key("type") && map.contains_key("omega") && map.contains_key("R") {
            map.insert("type".into(), Value::String("tabulated".into()));
        }
    }
    let profile = match serde_json::from_value::<ProfileJson>(profile_value)? {
        ProfileJson::Gaussian { center, width, coupling } => BathProfile::Gaussian { center, width, coupling },
        ProfileJson::Exponential {
            correlation_time,
            coupling,
        } => BathProfile::Exponential {
            correlation_time,
            coupling,
        },
        ProfileJson::Flat { level, cutoff } => BathProfile::Flat { level, cutoff },
        ProfileJson::Ohmic { kappa, cutoff, coupling } => BathProfile::Ohmic { kappa, cutoff, coupling },
        ProfileJson::Tabulated { omega, r } => {
            check_len("omega", omega.len())?;
            if omega.len() != r.len() {
                return Err(Error::Invalid(format!(
                    "tabulated bath has {} frequencies but {} values",
                    omega.len(),
                    r.len()
                )));
            }
            let values = r
                .into_iter()
                .map(|entry| match entry {
                    TableEntry::Scalar(x) => Ok(&mix * real(finite("R", x)?)),
                    TableEntry::Matrix(rows) => {
                        if rows.len() != k || rows.iter().any(|row| row.len() != k) {
                            return Err(Error::Invalid(format!("tabulated R entries must be {k}x{k}")));
                        }
                        let mut m = ComplexMatrix::zeros(k, k);
                        for (i, row) in rows.iter().enumerate() {
                            for (j, x) in row.iter().enumerate() {
                                m[(i, j)] = real(finite("R", *x)?);
                            }
                        }
                        Ok(m)
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            BathProfile::Tabulated { omega, values }
        }
    };
    Coupling::new(ops, profile, mix, tol)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StateJson {
    dim: usize,
    amplitudes: Vec<[f64; 2]>,
}

/// A normalized pure state `{"dim": n, "amplitudes": [[re, im], ...]}`.
pub fn parse_state(input: &str) -> Result<DVector<C64>> {
    parse_state_with_cap(input, DEFAULT_DIM_CAP)
}

pub fn parse_state_with_cap(input: &str, cap: usize) -> Result<DVector<C64>> {
    let raw: StateJson = serde_json::from_str(input)?;
    check_dim(raw.dim, cap)?;
    if raw.amplitudes.len() != raw.dim {
        return Err(Error::DimensionMismatch {
            expected: raw.dim,
            found: raw.amplitudes.len(),
        });
    }
    let psi = DVector::from_iterator(
        raw.dim,
        raw.amplitudes
            .iter()
            .map(|[re, im]| Ok(C64::new(finite("amplitude", *re)?, finite("amplitude", *im)?)))
            .collect::<Result<Vec<_>>>()?,
    );
    let norm = psi.norm();
    if !((norm - 1.0).abs() <= 1e-9) {
        return Err(Error::NotNormalized { norm });
    }
    Ok(psi)
}

#[derive(Deserialize)]
#[serde(tag = "model", rename_all = "snake_case", deny_unknown_fields)]
enum ModelJson {
    Superradiance {
        #[serde(rename = "N")]
        n: usize,
        omega: f64,
        gamma: f64,
    },
    PrivateBath {
        #[serde(rename = "N")]
        n: usize,
        #[serde(rename = "H", default)]
        h: Option<MatrixJson>,
        single_site: GeneratorJson,
    },
}

/// A registered model and the generator it builds.
#[derive(Clone, Debug)]
pub struct ModelSpec {
    pub name: &'static str,
    pub n_sites: usize,
    pub site_dim: usize,
    pub generator: GKLSGenerator,
}

/// `{"model": "superradiance", "N": 3, "omega": 1, "gamma": 0.5}` or
/// `{"model": "private_bath", "N": 2, "H": <matrix>, "single_site": <generator>}`.
pub fn parse_model(input: &str, tol: f64) -> Result<ModelSpec> {
    let raw: ModelJson = serde_json::from_str(input)?;
    match raw {
        ModelJson::Superradiance { n, omega, gamma } => {
            check_sites(n)?;
            Ok(ModelSpec {
                name: "superradiance",
                n_sites: n,
                site_dim: 2,
                generator: build_superradiance_generator(n, omega, gamma)?,
            })
        }
        ModelJson::PrivateBath { n, h, single_site } => {
            check_sites(n)?;
            check_dim(single_site.dim, 16)?;
            check_len("V", single_site.v.len())?;
            let d = single_site.dim;
            let single = GeneratorSpec {
                dim: d,
                hamiltonian: matrix_of(single_site.h, d, 16)?,
                lindblad: single_site
                    .v
                    .into_iter()
                    .map(|m| matrix_of(m, d, 16))
                    .collect::<Result<Vec<_>>>()?,
                temperature: single_site.temperature,
                omega: single_site.omega,
            }
            .build(tol)?;
            let total = crate::symmetry::build_permutation_rep(n, d)?.dim();
            let interaction = match h {
                Some(m) => matrix_of(m, total, DEFAULT_DIM_CAP)?,
                None => ComplexMatrix::zeros(total, total),
            };
            Ok(ModelSpec {
                name: "private_bath",
                n_sites: n,
                site_dim: d,
                generator: build_private_bath_generator(n, &interaction, single.generator(), tol)?,
            })
        }
    }
}

fn check_sites(n: usize) -> Result<()> {
    if n == 0 || n > MAX_SITES {
        return Err(Error::Invalid(format!("number of sites must lie in 1..={MAX_SITES}, got {n}")));
    }
    Ok(())
}
