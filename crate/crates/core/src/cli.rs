//! The `echoverse` command line: `run`, `validate` and `probe`.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::esn::EsnSystem;
use crate::lab::{self, ExperimentSpec, LevelSummary, ProbeFamily, SimulationSpec, TrainReport};
use crate::lsm::SpikeTrain;
use crate::qrc::{validate_state, QrcDoc, ReservoirVector};
use crate::rng::{self, label};
use crate::signals::Orbit;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Environment variable capping the worker pool.
pub const THREADS_ENV: &str = "ECHOVERSE_THREADS";

const DEFAULT_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Parser)]
#[command(
    name = "echoverse",
    version,
    about = "Reservoir computing experiments and validators"
)]
pub struct Cli {
    /// Suppress progress output.
    #[arg(long, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run an approximation experiment and write reports.csv and summary.json.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "echoverse-out")]
        out: PathBuf,
        /// Overrides the seed in the config.
        #[arg(long)]
        seed: Option<u64>,
        /// Fail (exit 1) when a median test NRMSE at the top of the ladder
        /// exceeds this value.
        #[arg(long)]
        tolerance: Option<f64>,
    },
    /// Check a serialized system, state, spike train, config or orbit.
    Validate {
        subject: PathBuf,
        /// Residual tolerance for numerical invariants.
        #[arg(long)]
        tolerance: Option<f64>,
    },
    /// Search seeded reservoirs for functionals separating orbit pairs.
    Probe {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "echoverse-out")]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
}

/// Entry point shared by the binary and tests. Returns the process exit code.
pub fn main() -> i32 {
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .try_init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    execute(cli)
}

pub fn execute(cli: Cli) -> i32 {
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return EXIT_CONFIG;
    }
    let quiet = cli.quiet;
    let result = match cli.command {
        Command::Run {
            config,
            out,
            seed,
            tolerance,
        } => run(&config, &out, seed, tolerance, quiet),
        Command::Validate { subject, tolerance } => {
            validate(&subject, tolerance.unwrap_or(DEFAULT_TOLERANCE))
        }
        Command::Probe { config, out, seed } => probe(&config, &out, seed, quiet),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_numerical() {
                EXIT_NUMERICAL
            } else {
                EXIT_CONFIG
            }
        }
    }
}

fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| {
            Error::Config(format!(
                "{THREADS_ENV}: expected a positive integer, got `{value}`"
            ))
        })?;
    // A pool installed earlier in this process stays in place.
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global();
    Ok(())
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn write_file(path: &Path, contents: &[u8]) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

/// Parses and validates an experiment config, resolving input paths against
/// the config's directory and checking that they exist.
pub fn load_config(path: &Path) -> Result<ExperimentSpec> {
    let text = read_text(path)?;
    let mut spec = ExperimentSpec::from_json(&text)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let base = path.parent().unwrap_or(Path::new(""));
    for p in [&mut spec.data.train_input, &mut spec.data.test_input] {
        if let Some(p) = p.as_mut() {
            *p = resolve(base, p);
        }
    }
    if let Some(p) = spec.simulate.as_mut().and_then(|s| s.input.as_mut()) {
        *p = resolve(base, p);
    }
    for (field, p) in spec.input_paths() {
        if !p.is_file() {
            return Err(Error::Config(format!(
                "{}: {field}: input file {} does not exist",
                path.display(),
                p.display()
            )));
        }
    }
    Ok(spec)
}

fn fmt(x: f64) -> String {
    format!("{x:e}")
}

pub fn reports_csv(reports: &[TrainReport]) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Parse(e.to_string());
    w.write_record([
        "family",
        "target",
        "size",
        "nodes",
        "degree",
        "features",
        "repeat",
        "seed",
        "train_nrmse",
        "test_nrmse",
        "weight_norm",
    ])
    .map_err(csv_err)?;
    for r in reports {
        w.write_record([
            r.family.name().to_string(),
            r.target.clone(),
            r.capacity.size.to_string(),
            r.capacity.nodes.to_string(),
            r.capacity.degree.to_string(),
            r.capacity.features.to_string(),
            r.repeat.to_string(),
            r.seed.to_string(),
            fmt(r.train_nrmse),
            fmt(r.test_nrmse),
            fmt(r.weight_norm),
        ])
        .map_err(csv_err)?;
    }
    w.into_inner().map_err(|e| Error::Parse(e.to_string()))
}

#[derive(Serialize)]
struct TargetVerdict {
    target: String,
    non_increasing: bool,
    top_median_test_nrmse: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    within_tolerance: Option<bool>,
}

#[derive(Serialize)]
struct Summary<'a> {
    family: &'static str,
    seed: u64,
    repeats: usize,
    ladder: &'a [usize],
    levels: &'a [LevelSummary],
    targets: Vec<TargetVerdict>,
}

fn simulate(sim: &SimulationSpec, seed: u64, out: &Path) -> Result<()> {
    let sys = sim.system.build()?;
    let u = match &sim.input {
        Some(p) => Orbit::load(p)?,
        None => {
            let raw = Orbit::random_uniform(
                &mut rng::stream(seed, label::TEST_DATA, 1),
                sim.length,
                1,
                1.0,
            )?;
            Orbit::scalar(raw.as_flat().iter().map(|x| 0.5 * (x + 1.0)).collect(), 1.0)?
        }
    };
    let run = sys.run(&u, sim.washout)?;
    let mut buf = Vec::new();
    run.write_csv(&mut buf)?;
    write_file(&out.join("trajectory.csv"), &buf)
}

fn run(
    config: &Path,
    out: &Path,
    seed: Option<u64>,
    tolerance: Option<f64>,
    quiet: bool,
) -> Result<i32> {
    let mut spec = load_config(config)?;
    if let Some(s) = seed {
        spec.seed = s;
    }
    if let Some(t) = tolerance {
        if !(t >= 0.0) {
            return Err(Error::Config(format!("--tolerance must be >= 0, got {t}")));
        }
    }
    let reports = lab::approximation_experiment(&spec)?;
    let levels = lab::summarize(&reports);
    fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    write_file(&out.join("reports.csv"), &reports_csv(&reports)?)?;

    let top = *spec.ladder.last().expect("validated ladder");
    let mut passed = true;
    let targets = spec
        .targets
        .iter()
        .map(|t| {
            let top_median = levels
                .iter()
                .find(|l| l.target == t.name && l.size == top)
                .map_or(f64::NAN, |l| l.median_test_nrmse);
            let within = tolerance.map(|tol| top_median <= tol);
            passed &= within.unwrap_or(true);
            TargetVerdict {
                target: t.name.clone(),
                non_increasing: lab::is_non_increasing(&levels, &t.name),
                top_median_test_nrmse: top_median,
                within_tolerance: within,
            }
        })
        .collect();
    let summary = Summary {
        family: spec.family.name(),
        seed: spec.seed,
        repeats: spec.repeats,
        ladder: &spec.ladder,
        levels: &levels,
        targets,
    };
    let mut json = serde_json::to_vec_pretty(&summary).map_err(|e| Error::Parse(e.to_string()))?;
    json.push(b'\n');
    write_file(&out.join("summary.json"), &json)?;
    if let Some(sim) = &spec.simulate {
        simulate(sim, spec.seed, out)?;
    }
    if !quiet {
        let mut stdout = std::io::stdout().lock();
        for l in &levels {
            let _ = writeln!(
                stdout,
                "{} size={} target={} features={} median_train_nrmse={} median_test_nrmse={}",
                spec.family.name(),
                l.size,
                l.target,
                l.features,
                fmt(l.median_train_nrmse),
                fmt(l.median_test_nrmse)
            );
        }
    }
    Ok(if passed { EXIT_OK } else { EXIT_FAIL })
}

/// One checked invariant.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, pass: bool, detail: String) -> Self {
        Self {
            name: name.into(),
            pass,
            detail,
        }
    }

    fn info(name: &str, detail: String) -> Self {
        Self::new(name, true, detail)
    }
}

impl std::fmt::Display for Check {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let verdict = if self.pass { "pass" } else { "fail" };
        if self.detail.is_empty() {
            write!(f, "{}: {verdict}", self.name)
        } else {
            write!(f, "{}: {verdict} ({})", self.name, self.detail)
        }
    }
}

fn check_spikes(text: &str) -> Result<Vec<Check>> {
    match SpikeTrain::parse(text) {
        Ok(u) => Ok(vec![
            Check::new(
                "refractory",
                true,
                format!("{} spikes, delta={}", u.len(), u.refractory()),
            ),
            Check::new("window", true, format!("horizon={}", u.horizon())),
        ]),
        Err(Error::Refractory { earlier, later, .. }) => Ok(vec![Check::new(
            "refractory",
            false,
            format!("pair {earlier:?}, {later:?}"),
        )]),
        Err(Error::OutOfRange(msg)) => Ok(vec![Check::new("window", false, msg)]),
        Err(e) => Err(e),
    }
}

fn check_state(text: &str, tol: f64) -> Result<Vec<Check>> {
    let r = ReservoirVector::from_json(text)?;
    let d = validate_state(&r)?;
    let trace = if d.trace_ok(tol) {
        Check::new("trace", true, format!("{}", d.trace_component))
    } else {
        Check::new(
            "trace",
            false,
            format!("got {}, expected {}", d.trace_component, d.expected_trace),
        )
    };
    Ok(vec![
        trace,
        Check::new(
            "positivity",
            d.positive(tol),
            format!("min eigenvalue {:e}", d.min_eigenvalue),
        ),
        Check::new(
            "hermiticity",
            d.hermitian(tol),
            format!("residual {:e}", d.hermiticity_residual),
        ),
    ])
}

fn check_esn(text: &str) -> Result<Vec<Check>> {
    let sys = EsnSystem::from_json(text)?;
    let report = sys.esp_report()?;
    Ok(vec![
        Check::new(
            "ESP condition",
            report.spectral_pass(),
            format!("L*rho(A) = {}", report.spectral_factor),
        ),
        Check::info(
            "contraction bound",
            format!(
                "L*|A|_op = {}{}",
                report.operator_factor,
                if report.contraction_pass() {
                    ""
                } else {
                    ", no one-step guarantee"
                }
            ),
        ),
    ])
}

fn check_qrc(text: &str, tol: f64) -> Result<Vec<Check>> {
    let sys = QrcDoc::from_json(text)?.build()?;
    let u = sys.channel();
    let gram = u.transpose() * u;
    let residual = (gram - nalgebra::DMatrix::identity(u.nrows(), u.ncols())).amax();
    // Two trajectories from different states under one input.
    let input = Orbit::random_uniform(&mut rng::stream(0, label::PROBE, 0), 200, 1, 1.0)?;
    let mut a = ReservoirVector::maximally_mixed(sys.n_qubits())?;
    let mut components = vec![0.0; a.components().len()];
    components[0] = a.trace_component();
    components[crate::qrc::single_z_index(1, sys.n_qubits())] = a.trace_component();
    let mut b = ReservoirVector::new(sys.n_qubits(), components)?;
    for x in input.as_flat() {
        let v = 0.5 * (x + 1.0);
        a = sys.step(&a, v)?;
        b = sys.step(&b, v)?;
    }
    let gap = a
        .components()
        .iter()
        .zip(b.components())
        .fold(0.0_f64, |m, (p, q)| m.max((p - q).abs()));
    Ok(vec![
        Check::new(
            "channel orthogonality",
            residual <= tol,
            format!("residual {residual:e}"),
        ),
        Check::info(
            "echo state diagnostic",
            format!("trajectory gap after 200 steps {gap:e}"),
        ),
    ])
}

fn check_orbit(path: &Path) -> Result<Vec<Check>> {
    let u = Orbit::load(path)?;
    Ok(vec![Check::new(
        "orbit",
        true,
        format!(
            "{} samples of dimension {}, bound {}",
            u.len(),
            u.dim(),
            u.bound()
        ),
    )])
}

/// Runs the checks appropriate to the subject, detected from its contents.
pub fn validate_subject(path: &Path, tol: f64) -> Result<Vec<Check>> {
    let text = read_text(path)?;
    let trimmed = text.trim_start();
    if trimmed.starts_with('#') {
        return check_spikes(&text);
    }
    if trimmed.starts_with('{') {
        let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| {
            Error::Parse(format!(
                "{}: line {} column {}: {e}",
                path.display(),
                e.line(),
                e.column()
            ))
        })?;
        let has = |k: &str| value.get(k).is_some();
        return if has("components") {
            check_state(&text, tol)
        } else if has("coupling") {
            check_esn(&text)
        } else if has("n_qubits") {
            check_qrc(&text, tol)
        } else if has("ladder") {
            load_config(path)?;
            Ok(vec![Check::new("config", true, String::new())])
        } else {
            Err(Error::Parse(format!(
                "{}: unrecognized JSON subject",
                path.display()
            )))
        };
    }
    check_orbit(path)
}

fn validate(path: &Path, tol: f64) -> Result<i32> {
    let checks = validate_subject(path, tol)?;
    for c in &checks {
        println!("{c}");
    }
    Ok(if checks.iter().all(|c| c.pass) {
        EXIT_OK
    } else {
        EXIT_FAIL
    })
}

/// An orbit given inline as scalar samples or as a CSV path.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum OrbitSource {
    Values(Vec<f64>),
    File(PathBuf),
}

impl OrbitSource {
    fn load(&self, base: &Path) -> Result<Orbit> {
        match self {
            OrbitSource::Values(v) => Orbit::scalar_tight(v.clone()),
            OrbitSource::File(p) => Orbit::load(&resolve(base, p)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeConfig {
    pub reservoir: ProbeFamily,
    pub pairs: Vec<(OrbitSource, OrbitSource)>,
    #[serde(default = "default_instances")]
    pub instances: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_instances() -> usize {
    8
}

fn probe(config: &Path, out: &Path, seed: Option<u64>, quiet: bool) -> Result<i32> {
    let text = read_text(config)?;
    let cfg: ProbeConfig = serde_json::from_str(&text).map_err(|e| {
        Error::Config(format!(
            "{}: line {} column {}: {e}",
            config.display(),
            e.line(),
            e.column()
        ))
    })?;
    let base = config.parent().unwrap_or(Path::new(""));
    let pairs = cfg
        .pairs
        .iter()
        .map(|(a, b)| Ok((a.load(base)?, b.load(base)?)))
        .collect::<Result<Vec<_>>>()?;
    let gaps = lab::separation_probe(
        &cfg.reservoir,
        &pairs,
        cfg.instances,
        seed.unwrap_or(cfg.seed),
    )?;
    fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let mut csv = String::from("pair,gap,witness\n");
    for (i, g) in gaps.iter().enumerate() {
        let witness = g.witness.map_or(String::new(), |w| w.to_string());
        csv.push_str(&format!("{i},{},{witness}\n", fmt(g.gap)));
        if !quiet {
            println!(
                "pair {i}: gap {} witness {}",
                fmt(g.gap),
                if witness.is_empty() { "none" } else { &witness }
            );
        }
    }
    write_file(&out.join("probe.csv"), csv.as_bytes())?;
    Ok(EXIT_OK)
}
