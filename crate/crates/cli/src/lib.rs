// Copyright 2026 The Decohere Authors
// SPDX-License-Identifier: Apache-2.0

//! Argument parsing and report generation for the `decohere` binary.
//!
//! Every command produces a JSON report whose keys are sorted and whose
//! floats use shortest round-trip formatting, so output depends only on the
//! input files and flags.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use decohere_core::algebra::{
    block_decompose, df_semigroup, fixed_points, generated_algebra, global_df_discrete, multiplicative_domain,
    Certificate, DfAlgebra, MatrixAlgebra, DEFAULT_SEED,
};
use decohere_core::born::{error_budget, gate_speed_scan, Quadrature, DEFAULT_OMEGA_POINTS, DEFAULT_TIME_POINTS};
use decohere_core::channels::KrausMap;
use decohere_core::io::{self, LoadedGenerator};
use decohere_core::lindblad::GKLSGenerator;
use decohere_core::operators::{min_eigenvalue, unitary_evolution, ComplexMatrix, DEFAULT_TOL};
use decohere_core::symmetry::{
    build_permutation_rep, collective_spin, global_invariance_check, local_invariance_check, Dynamics,
};
use decohere_core::Error;
use serde_json::{json, Map, Value};

/// Environment variable read for the default `--tol`.
pub const TOL_ENV: &str = "DECOHERE_TOL";

#[derive(Debug, Parser)]
#[command(name = "decohere", version, about = "Decoherence-free algebras and Born error budgets")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalOpts {
    /// Numerical tolerance for validation and rank decisions.
    #[arg(long, global = true, env = TOL_ENV, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    /// Seed for randomized steps (block decomposition).
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Frequency cutoff for Born integrals [default: 40/tau].
    #[arg(long, global = true)]
    pub grid_omega_max: Option<f64>,
    /// Number of frequency nodes for Born integrals.
    #[arg(long, global = true, default_value_t = DEFAULT_OMEGA_POINTS)]
    pub grid_points: usize,
    /// Number of time nodes for Born integrals.
    #[arg(long, global = true, default_value_t = DEFAULT_TIME_POINTS)]
    pub time_points: usize,
    /// Step limit for the discrete decoherence-free algebra search.
    #[arg(long, global = true, default_value_t = 64)]
    pub max_k: usize,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
#[group(required = true, multiple = false)]
pub struct DynamicsInput {
    /// Kraus channel `{"dim", "kraus"}`.
    #[arg(long)]
    pub channel: Option<PathBuf>,
    /// GKLS generator `{"dim", "H", "V"}`, optionally with `"T"` and `"omega"`.
    #[arg(long)]
    pub generator: Option<PathBuf>,
    /// Registered model, e.g. `{"model": "superradiance", "N", "omega", "gamma"}`.
    #[arg(long)]
    pub model: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct BornInput {
    /// Control trajectory `{"tau", "segments": [{"dt", "H"}]}`.
    #[arg(long)]
    pub traj: PathBuf,
    /// Bath spectrum with coupling operators `"S"`.
    #[arg(long)]
    pub bath: PathBuf,
    /// Initial pure state `{"dim", "amplitudes"}`.
    #[arg(long)]
    pub psi: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Group {
    /// Site permutations, generated by adjacent transpositions.
    Permutations,
    /// Collective rotations `exp(-i J_k)` of qubits.
    Su2,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a channel and report its multiplicative domain and fixed points.
    AnalyzeChannel {
        #[arg(long)]
        channel: PathBuf,
    },
    /// Validate a generator and report detailed balance and its DF algebra.
    AnalyzeSemigroup {
        #[command(flatten)]
        input: SemigroupInput,
    },
    /// Decoherence-free algebra of a channel, generator or model.
    Df {
        #[command(flatten)]
        input: DynamicsInput,
    },
    /// Block structure of N(Γ) for a channel, or of the algebra generated by a list of operators.
    Blocks {
        #[arg(long, conflicts_with = "ops", required_unless_present = "ops")]
        channel: Option<PathBuf>,
        /// Operator list `{"dim", "ops": [...]}`.
        #[arg(long)]
        ops: Option<PathBuf>,
        /// Decompose the commutant of the generated algebra instead.
        #[arg(long, requires = "ops")]
        commutant: bool,
    },
    /// Global and local invariance under site permutations or collective rotations.
    Invariance {
        #[command(flatten)]
        input: DynamicsInput,
        #[arg(long, value_enum, default_value_t = Group::Permutations)]
        group: Group,
        /// Number of sites when the input is not a registered model.
        #[arg(long)]
        sites: Option<usize>,
    },
    /// Born-approximation error for one trajectory, bath and state.
    BornError {
        #[command(flatten)]
        input: BornInput,
    },
    /// Error of the rescaled trajectories (λ dt, H/λ).
    Scan {
        #[command(flatten)]
        input: BornInput,
        /// Comma-separated stretch factors.
        #[arg(long, value_delimiter = ',', default_value = "1,2,4")]
        lambdas: Vec<f64>,
    },
    /// Heisenberg-picture evolution of an observable.
    Evolve {
        #[command(flatten)]
        input: DynamicsInput,
        /// Observable as a matrix literal.
        #[arg(long)]
        op: PathBuf,
        /// Number of channel steps, or of time samples for a generator.
        #[arg(long, default_value_t = 1)]
        steps: usize,
        /// Total time for a generator.
        #[arg(long, default_value_t = 1.0)]
        time: f64,
    },
}

#[derive(Debug, Clone, Args)]
#[group(required = true, multiple = false)]
pub struct SemigroupInput {
    #[arg(long)]
    pub generator: Option<PathBuf>,
    #[arg(long)]
    pub model: Option<PathBuf>,
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    /// Report (code 0) or machine-readable diagnostic, as pretty JSON.
    pub body: String,
}

enum Failure {
    Core(Error),
    Io { path: PathBuf, message: String },
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn diagnostic(failure: &Failure) -> (i32, Value) {
    match failure {
        Failure::Io { path, message } => (
            2,
            json!({"error": {"kind": "io", "path": path.display().to_string(), "message": message}}),
        ),
        Failure::Core(e) => {
            let mut detail = Map::new();
            let kind = match e {
                Error::DimensionMismatch { expected, found } => {
                    detail.insert("expected".into(), json!(expected));
                    detail.insert("found".into(), json!(found));
                    "dimension_mismatch"
                }
                Error::NotHermitian { residual } => {
                    detail.insert("hermiticity_residual".into(), json!(residual));
                    "not_hermitian"
                }
                Error::NotUnital { defect } => {
                    detail.insert("unitality_defect".into(), json!(defect));
                    "not_unital"
                }
                Error::NotCompletelyPositive { min_eigenvalue } => {
                    detail.insert("min_eigenvalue".into(), json!(min_eigenvalue));
                    "not_completely_positive"
                }
                Error::NotFaithful { min_eigenvalue } => {
                    detail.insert("min_eigenvalue".into(), json!(min_eigenvalue));
                    "not_faithful"
                }
                Error::InvalidState(_) => "invalid_state",
                Error::NegativeTime(_) => "negative_time",
                Error::OutOfWindow { .. } => "out_of_window",
                Error::NotNormalized { norm } => {
                    detail.insert("norm".into(), json!(norm));
                    "not_normalized"
                }
                Error::Precondition(_) => "precondition",
                Error::SizeCap { size, cap } => {
                    detail.insert("size".into(), json!(size));
                    detail.insert("cap".into(), json!(cap));
                    "size_cap"
                }
                Error::Numerical(_) => "numerical",
                Error::Invalid(_) => "invalid",
                Error::Parse(_) => "parse",
            };
            detail.insert("kind".into(), json!(kind));
            detail.insert("message".into(), json!(e.to_string()));
            let code = if matches!(e, Error::Numerical(_)) { 1 } else { 2 };
            (code, json!({ "error": detail }))
        }
    }
}

fn render(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("JSON values always serialize");
    s.push('\n');
    s
}

/// Parses `args` (including the program name) and runs the request.
pub fn run_from_args<I, T>(args: I) -> std::result::Result<(Outcome, Option<PathBuf>), clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args)?;
    let out = cli.global.out.clone();
    Ok((run(&cli), out))
}

pub fn run(cli: &Cli) -> Outcome {
    match dispatch(cli) {
        Ok(report) => Outcome {
            code: 0,
            body: render(&report),
        },
        Err(failure) => {
            let (code, value) = diagnostic(&failure);
            Outcome {
                code,
                body: render(&value),
            }
        }
    }
}

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| Failure::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

fn load_channel(path: &Path, tol: f64) -> CliResult<KrausMap> {
    Ok(io::parse_channel(&read(path)?)?.build(tol)?)
}

fn load_generator(path: &Path, tol: f64) -> CliResult<LoadedGenerator> {
    Ok(io::parse_generator(&read(path)?)?.build(tol)?)
}

fn load_model(path: &Path, tol: f64) -> CliResult<io::ModelSpec> {
    Ok(io::parse_model(&read(path)?, tol)?)
}

enum Loaded {
    Channel(KrausMap),
    Generator(LoadedGenerator),
    Model(io::ModelSpec),
}

impl Loaded {
    fn dynamics(&self) -> Dynamics<'_> {
        match self {
            Loaded::Channel(g) => Dynamics::Channel(g),
            Loaded::Generator(g) => Dynamics::Generator(g.generator()),
            Loaded::Model(m) => Dynamics::Generator(&m.generator),
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            Loaded::Channel(_) => "channel",
            Loaded::Generator(_) => "generator",
            Loaded::Model(m) => m.name,
        }
    }

    fn dim(&self) -> usize {
        match self.dynamics() {
            Dynamics::Channel(g) => g.dim(),
            Dynamics::Generator(l) => l.dim(),
        }
    }

    /// Kraus or Lindblad operators.
    fn noise_ops(&self) -> Vec<ComplexMatrix> {
        match self.dynamics() {
            Dynamics::Channel(g) => g.kraus().to_vec(),
            Dynamics::Generator(l) => l.lindblad_ops().to_vec(),
        }
    }
}

fn load_dynamics(input: &DynamicsInput, tol: f64) -> CliResult<Loaded> {
    if let Some(p) = &input.channel {
        Ok(Loaded::Channel(load_channel(p, tol)?))
    } else if let Some(p) = &input.generator {
        Ok(Loaded::Generator(load_generator(p, tol)?))
    } else if let Some(p) = &input.model {
        Ok(Loaded::Model(load_model(p, tol)?))
    } else {
        Err(Error::Invalid("one of --channel, --generator, --model is required".into()).into())
    }
}

fn tolerances(g: &GlobalOpts) -> Value {
    json!({"tol": g.tol, "seed": g.seed})
}

fn blocks_json(blocks: &[(usize, usize)]) -> Value {
    Value::Array(blocks.iter().map(|(n, d)| json!([n, d])).collect())
}

fn algebra_report(alg: &MatrixAlgebra, seed: u64) -> CliResult<Map<String, Value>> {
    let decomposition = block_decompose(alg, seed)?;
    let mut m = Map::new();
    m.insert("dimension".into(), json!(alg.dimension()));
    m.insert("blocks".into(), blocks_json(decomposition.blocks()));
    m.insert(
        "basis".into(),
        Value::Array(alg.basis().iter().map(io::matrix_to_json).collect()),
    );
    m.insert(
        "off_pattern_residual".into(),
        json!(decomposition.max_off_pattern_residual(alg)),
    );
    Ok(m)
}

fn df_report(df: &DfAlgebra, seed: u64) -> CliResult<Map<String, Value>> {
    let mut m = algebra_report(&df.algebra, seed)?;
    let certificate = match df.certificate {
        Certificate::Exact => "exact",
        Certificate::LowerBound | Certificate::Heuristic => "heuristic",
    };
    m.insert("certificate".into(), json!(certificate));
    m.insert("kind".into(), json!(df.certificate.as_str()));
    m.insert("steps".into(), json!(df.steps));
    Ok(m)
}

fn semigroup_df(generator: &LoadedGenerator, tol: f64) -> CliResult<DfAlgebra> {
    let metric = match generator.gibbs() {
        Some(g) => Some(g.metric()?),
        None => None,
    };
    Ok(df_semigroup(generator.generator(), metric.as_ref(), tol)?)
}

fn generator_df(l: &GKLSGenerator, tol: f64) -> CliResult<DfAlgebra> {
    Ok(df_semigroup(l, None, tol)?)
}

fn dispatch(cli: &Cli) -> CliResult<Value> {
    let g = &cli.global;
    let tol = g.tol;
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(Error::Invalid(format!("--tol must be positive, got {tol}")).into());
    }
    let mut report = Map::new();
    report.insert("tolerances".into(), tolerances(g));
    match &cli.command {
        Command::AnalyzeChannel { channel } => {
            report.insert("command".into(), json!("analyze-channel"));
            let gamma = load_channel(channel, tol)?;
            let cp = gamma.cp_check(tol);
            let domain = multiplicative_domain(&gamma, tol)?;
            let fixed = fixed_points(&gamma)?;
            report.insert("dim".into(), json!(gamma.dim()));
            report.insert("kraus_count".into(), json!(gamma.kraus().len()));
            report.insert("kraus_rank".into(), json!(gamma.rank()));
            report.insert("unitality_defect".into(), json!(gamma.unitality_defect()));
            report.insert("choi_min_eigenvalue".into(), json!(cp.min_eigenvalue));
            report.insert("completely_positive".into(), json!(cp.completely_positive));
            report.insert("unitary".into(), json!(gamma.as_unitary(tol).is_some()));
            report.insert(
                "multiplicative_domain".into(),
                Value::Object(algebra_report(&domain, g.seed)?),
            );
            let mut fp = Map::new();
            fp.insert("dimension".into(), json!(fixed.dimension()));
            fp.insert("faithful_state".into(), json!(fixed.has_faithful_state()));
            if let Some(state) = fixed.stationary_state() {
                fp.insert("stationary_state".into(), io::matrix_to_json(state.matrix()));
            }
            report.insert("fixed_points".into(), Value::Object(fp));
        }
        Command::AnalyzeSemigroup { input } => {
            report.insert("command".into(), json!("analyze-semigroup"));
            let (generator, name) = match (&input.generator, &input.model) {
                (Some(p), _) => (load_generator(p, tol)?, "generator"),
                (None, Some(p)) => {
                    let model = load_model(p, tol)?;
                    (LoadedGenerator::Plain(model.generator), model.name)
                }
                (None, None) => return Err(Error::Invalid("--generator or --model is required".into()).into()),
            };
            let l = generator.generator();
            let lh = l.hamiltonian_superoperator();
            let ld = l.dissipator_superoperator();
            let parts = lh.compose(&ld)?.sub(&ld.compose(&lh)?)?.norm();
            report.insert("input".into(), json!(name));
            report.insert("dim".into(), json!(l.dim()));
            report.insert("lindblad_count".into(), json!(l.lindblad_ops().len()));
            report.insert("unitality_residual".into(), json!(l.unitality_residual()));
            report.insert("parts_commutator".into(), json!(parts));
            if let Some(gibbs) = generator.gibbs() {
                let metric = gibbs.metric()?;
                let db = l.detailed_balance_check(&metric, tol)?;
                report.insert("temperature".into(), json!(gibbs.temperature()));
                report.insert(
                    "bohr_frequencies".into(),
                    Value::Array(gibbs.eigen_ops().iter().map(|(_, w)| json!(w)).collect()),
                );
                report.insert("stationary_state".into(), io::matrix_to_json(gibbs.stationary_state().matrix()));
                report.insert(
                    "detailed_balance".into(),
                    json!({
                        "holds": db.holds(),
                        "stationary": db.stationary,
                        "commuting_parts": db.commuting_parts,
                        "hermitian_dissipator": db.hermitian_dissipator,
                        "stationary_residual": db.stationary_residual,
                        "state_commutator": db.state_commutator,
                        "parts_commutator": db.parts_commutator,
                        "hermiticity_residual": db.hermiticity_residual,
                    }),
                );
            }
            report.insert("df".into(), Value::Object(df_report(&semigroup_df(&generator, tol)?, g.seed)?));
        }
        Command::Df { input } => {
            report.insert("command".into(), json!("df"));
            let loaded = load_dynamics(input, tol)?;
            report.insert("input".into(), json!(loaded.kind()));
            let df = match &loaded {
                Loaded::Channel(gamma) => global_df_discrete(gamma, g.max_k, tol)?,
                Loaded::Generator(l) => semigroup_df(l, tol)?,
                Loaded::Model(m) => generator_df(&m.generator, tol)?,
            };
            report.insert("max_k".into(), json!(g.max_k));
            report.extend(df_report(&df, g.seed)?);
        }
        Command::Blocks { channel, ops, commutant } => {
            report.insert("command".into(), json!("blocks"));
            let alg = match (channel, ops) {
                (Some(p), _) => {
                    report.insert("algebra".into(), json!("multiplicative_domain"));
                    multiplicative_domain(&load_channel(p, tol)?, tol)?
                }
                (None, Some(p)) => {
                    let ops = io::parse_operator_list(&read(p)?)?;
                    let n = ops
                        .first()
                        .map(|a| a.nrows())
                        .ok_or_else(|| Error::Invalid("operator list is empty".into()))?;
                    let generated = generated_algebra(&ops, n)?;
                    if *commutant {
                        report.insert("algebra".into(), json!("commutant"));
                        generated.commutant()?
                    } else {
                        report.insert("algebra".into(), json!("generated"));
                        generated
                    }
                }
                (None, None) => return Err(Error::Invalid("--channel or --ops is required".into()).into()),
            };
            let decomposition = block_decompose(&alg, g.seed)?;
            report.extend(algebra_report(&alg, g.seed)?);
            report.insert("commutant_dimension".into(), json!(decomposition.commutant_dimension()));
            report.insert("conjugator".into(), io::matrix_to_json(decomposition.conjugator()));
        }
        Command::Invariance { input, group, sites } => {
            report.insert("command".into(), json!("invariance"));
            let loaded = load_dynamics(input, tol)?;
            let dim = loaded.dim();
            let (n_sites, site_dim) = match (&loaded, sites) {
                (Loaded::Model(m), _) => (m.n_sites, m.site_dim),
                (_, Some(n)) => (*n, site_dimension(dim, *n)?),
                (_, None) => return Err(Error::Invalid("--sites is required unless --model is given".into()).into()),
            };
            let unitaries = match group {
                Group::Permutations => build_permutation_rep(n_sites, site_dim)?.generators().to_vec(),
                Group::Su2 => {
                    if site_dim != 2 {
                        return Err(Error::Invalid("su2 invariance needs qubit sites".into()).into());
                    }
                    collective_spin(n_sites)?.iter().map(|j| unitary_evolution(j, 1.0)).collect()
                }
            };
            let global = global_invariance_check(loaded.dynamics(), &unitaries)?;
            let local = local_invariance_check(&loaded.noise_ops(), &unitaries, tol)?;
            report.insert("input".into(), json!(loaded.kind()));
            report.insert("group".into(), json!(match group {
                Group::Permutations => "permutations",
                Group::Su2 => "su2",
            }));
            report.insert("sites".into(), json!(n_sites));
            report.insert("site_dim".into(), json!(site_dim));
            report.insert(
                "global".into(),
                json!({"invariant": global.is_invariant(tol), "residual": global.residual, "per_generator": global.per_generator}),
            );
            report.insert(
                "local".into(),
                json!({"invariant": local.residual <= tol, "residual": local.residual, "containment_residual": local.containment}),
            );
        }
        Command::BornError { input } => {
            report.insert("command".into(), json!("born-error"));
            let (traj, coupling, psi) = load_born(input, tol)?;
            let quad = quadrature(g)?;
            let budget = error_budget(&traj, &coupling, &psi, &quad)?;
            report.insert("epsilon".into(), json!(budget.epsilon()));
            report.insert("epsilon_time".into(), json!(budget.epsilon_time));
            report.insert("epsilon_frequency".into(), json!(budget.spectral.epsilon));
            report.insert("boundary_fraction".into(), json!(budget.spectral.boundary_fraction));
            report.insert("support_warning".into(), json!(budget.spectral.support_warning()));
            if let Some(map) = &budget.error_map {
                report.insert("k_min_eigenvalue".into(), json!(min_eigenvalue(&map.k)));
            }
            report.insert("grid".into(), grid_json(&quad, budget.spectral.omega_max));
        }
        Command::Scan { input, lambdas } => {
            report.insert("command".into(), json!("scan"));
            let (traj, coupling, psi) = load_born(input, tol)?;
            let quad = quadrature(g)?;
            let scan = gate_speed_scan(&traj, &coupling, &psi, lambdas, &quad)?;
            report.insert(
                "rows".into(),
                Value::Array(scan.rows.iter().map(|(l, e)| json!({"lambda": l, "epsilon": e})).collect()),
            );
            report.insert("trend".into(), json!(scan.trend.as_str()));
            report.insert(
                "grid".into(),
                json!({"omega_max": quad.omega_max, "omega_points": quad.omega_points, "time_points": quad.time_points}),
            );
        }
        Command::Evolve { input, op, steps, time } => {
            report.insert("command".into(), json!("evolve"));
            let loaded = load_dynamics(input, tol)?;
            let a = io::parse_matrix(&read(op)?)?;
            decohere_core::operators::ensure_dim(&a, loaded.dim())?;
            let mut samples = vec![(0.0, a.clone())];
            match loaded.dynamics() {
                Dynamics::Channel(gamma) => {
                    let mut x = a;
                    for k in 1..=*steps {
                        x = gamma.apply(&x)?;
                        samples.push((k as f64, x.clone()));
                    }
                }
                Dynamics::Generator(l) => {
                    if !(*time >= 0.0) || !time.is_finite() {
                        return Err(Error::NegativeTime(*time).into());
                    }
                    let steps = (*steps).max(1);
                    let dt = time / steps as f64;
                    let step = l.semigroup(dt)?;
                    let mut x = a;
                    for k in 1..=steps {
                        x = step.apply(&x)?;
                        samples.push((dt * k as f64, x.clone()));
                    }
                }
            }
            report.insert("input".into(), json!(loaded.kind()));
            report.insert(
                "samples".into(),
                Value::Array(
                    samples
                        .iter()
                        .map(|(t, x)| json!({"t": t, "operator": io::matrix_to_json(x)}))
                        .collect(),
                ),
            );
        }
    }
    Ok(Value::Object(report))
}

fn site_dimension(dim: usize, n_sites: usize) -> CliResult<usize> {
    if n_sites == 0 {
        return Err(Error::Invalid("--sites must be positive".into()).into());
    }
    (1..=dim)
        .find(|d| d.checked_pow(n_sites as u32) == Some(dim))
        .ok_or_else(|| Error::Invalid(format!("dimension {dim} is not a power with {n_sites} sites")).into())
}

fn quadrature(g: &GlobalOpts) -> CliResult<Quadrature> {
    if let Some(w) = g.grid_omega_max {
        if !(w > 0.0) || !w.is_finite() {
            return Err(Error::Invalid(format!("--grid-omega-max must be positive, got {w}")).into());
        }
    }
    if g.grid_points < 2 || g.time_points < 3 {
        return Err(Error::Invalid("grids need at least 2 frequency and 3 time points".into()).into());
    }
    Ok(Quadrature {
        time_points: g.time_points,
        omega_max: g.grid_omega_max,
        omega_points: g.grid_points,
    })
}

fn grid_json(quad: &Quadrature, omega_max: f64) -> Value {
    json!({"omega_max": omega_max, "omega_points": quad.omega_points, "time_points": quad.time_points})
}

type BornInputs = (
    decohere_core::born::ControlTrajectory,
    decohere_core::born::Coupling,
    nalgebra::DVector<decohere_core::operators::C64>,
);

fn load_born(input: &BornInput, tol: f64) -> CliResult<BornInputs> {
    let traj = io::parse_trajectory(&read(&input.traj)?, tol)?;
    let coupling = io::parse_bath(&read(&input.bath)?, tol)?;
    let psi = io::parse_state(&read(&input.psi)?)?;
    Ok((traj, coupling, psi))
}
