//! Command-line front end.
//!
//! Exit codes: 0 success, 1 a check failed, 2 usage or parse error.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use thiserror::Error;

use crate::config::{transform_setting, ConfigError, QuadratureConfig, ScenarioConfig};
use crate::elastic::{fields_from_tension, reconstruct_tension, ElasticError, FieldChecks, TensionReport};
use crate::medium::check_invertibility;
use crate::spectral::write_spectrum_csv;
use crate::transform::decompose_roundtrip;
use crate::verify::{run_selected, run_suite, CriterionOutcome, SuiteSettings};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Tolerances applied to a solved grid.
pub const CAUSALITY_TOL: f64 = 1e-2;
pub const SURFACE_STRESS_TOL: f64 = 5e-2;
pub const IMAGINARY_TOL: f64 = 1e-6;
pub const CONJUGATION_TOL: f64 = 5e-2;

/// `ξ` values probed by `validate`.
const VALIDATE_XI: [f64; 6] = [0.0, 0.25, 0.5, 1.0, 2.0, 4.0];
const VALIDATE_LAMBDAS: usize = 200;

#[derive(Debug, Parser)]
#[command(name = "lamtrans", version, about = "Vector Fourier transform with discontinuous coefficients and layered elastodynamics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Scenario file (TOML).
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR", default_value = "lamtrans-out")]
    pub out: PathBuf,
    /// Upper limit of the spectral integral (default 200; 100 for `solve`).
    #[arg(long, global = true)]
    pub lambda_max: Option<f64>,
    /// Lower end of the spectral integral when no contour is used (default 1e-6).
    #[arg(long, global = true)]
    pub epsilon: Option<f64>,
    /// Per-panel tolerance of the adaptive quadrature (default 1e-10).
    #[arg(long, global = true)]
    pub panel_tol: Option<f64>,
    /// Worker threads; all cores when unset.
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,
    /// Seed of the randomized checks.
    #[arg(long, global = true, value_name = "N", default_value_t = 20240611)]
    pub seed: u64,
    /// Wall-clock budget in seconds; exceeding it fails the run.
    #[arg(long, global = true, value_name = "SECS", default_value_t = 600.0)]
    pub budget: f64,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Check the medium and coupling of a scenario.
    Validate,
    /// Transform and reconstruct the `[roundtrip]` test field.
    Roundtrip,
    /// Solve the scenario on its `[grid]` and write one CSV per time slice.
    Solve,
    /// Run the acceptance suite.
    Verify {
        /// Criteria to run, e.g. `--criteria 1,5`; all when unset.
        #[arg(long, value_delimiter = ',')]
        criteria: Vec<u8>,
    },
    /// Dump samples of `u` and `u*` for the `[spectrum]` section.
    Spectrum,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Roundtrip => "roundtrip",
            Command::Solve => "solve",
            Command::Verify { .. } => "verify",
            Command::Spectrum => "spectrum",
        }
    }
}

/// Everything that determines a run's output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config: Option<PathBuf>,
    /// Config quadrature with the command-line overrides applied.
    pub quadrature: QuadratureConfig,
    pub out: PathBuf,
    pub seed: u64,
    pub budget_secs: f64,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Check(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Check(_) => EXIT_CHECK,
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        match e {
            ConfigError::Elastic(e) => CliError::Check(format!("invalid scenario: {e}")),
            e => CliError::Usage(e.to_string()),
        }
    }
}

fn check<E: std::fmt::Display>(stage: &str) -> impl Fn(E) -> CliError + '_ {
    move |e| CliError::Check(format!("{stage}: {e}"))
}

fn io_failure(path: &Path) -> impl Fn(std::io::Error) -> CliError + '_ {
    move |e| CliError::Check(format!("writing {}: {e}", path.display()))
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::new().filter_or("LAMTRANS_LOG", "warn")).try_init();
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_CHECK,
        Err(e) => {
            eprintln!("error: {e}");
            e.code()
        }
    }
}

/// Runs a parsed command; `Ok(false)` when a check failed.
pub fn execute(cli: &Cli) -> Result<bool, CliError> {
    let common = &cli.common;
    if !(common.budget > 0.0) {
        return Err(CliError::Usage(format!("--budget must be positive, got {}", common.budget)));
    }
    let config = match &common.config {
        Some(p) => Some(ScenarioConfig::load(p)?),
        None => None,
    };
    let manifest = RunManifest {
        command: cli.command.name().into(),
        config: common.config.clone(),
        quadrature: overrides(config.as_ref().map(|c| c.quadrature).unwrap_or_default(), common),
        out: common.out.clone(),
        seed: common.seed,
        budget_secs: common.budget,
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = common.threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    let start = Instant::now();
    let pass = pool.install(|| match &cli.command {
        Command::Verify { criteria } => cmd_verify(&manifest, criteria),
        command => {
            let config = config.as_ref().ok_or_else(|| CliError::Usage(format!("`{}` needs --config", command.name())))?;
            match command {
                Command::Validate => cmd_validate(&manifest, config),
                Command::Roundtrip => cmd_roundtrip(&manifest, config),
                Command::Solve => cmd_solve(&manifest, config),
                Command::Spectrum => cmd_spectrum(&manifest, config),
                Command::Verify { .. } => unreachable!(),
            }
        }
    })?;
    let elapsed = start.elapsed().as_secs_f64();
    if elapsed > manifest.budget_secs {
        println!("FAIL budget: {elapsed:.1} s exceeds {} s", manifest.budget_secs);
        return Ok(false);
    }
    Ok(pass)
}

fn overrides(mut q: QuadratureConfig, common: &CommonArgs) -> QuadratureConfig {
    q.lambda_max = common.lambda_max.or(q.lambda_max);
    q.epsilon = common.epsilon.or(q.epsilon);
    q.panel_tol = common.panel_tol.or(q.panel_tol);
    q
}

/// Creates the output directory and confirms it takes files.
fn prepare_out(dir: &Path) -> Result<(), CliError> {
    let unwritable = |e: std::io::Error| CliError::Usage(format!("output directory {} is not writable: {e}", dir.display()));
    std::fs::create_dir_all(dir).map_err(unwritable)?;
    let probe = dir.join(".lamtrans-probe");
    File::create(&probe).map_err(unwritable)?;
    std::fs::remove_file(&probe).map_err(unwritable)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let file = File::create(path).map_err(io_failure(path))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| CliError::Check(format!("writing {}: {e}", path.display())))?;
    writeln!(w).and_then(|_| w.flush()).map_err(io_failure(path))
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

/// Geometric `λ` grid from `1e-2` to `lambda_max`.
fn validate_lambdas(lambda_max: f64) -> Vec<f64> {
    let (a, b) = (1e-2f64.ln(), lambda_max.max(1.0).ln());
    (0..VALIDATE_LAMBDAS).map(|i| (a + (b - a) * i as f64 / (VALIDATE_LAMBDAS - 1) as f64).exp()).collect()
}

fn cmd_validate(manifest: &RunManifest, config: &ScenarioConfig) -> Result<bool, CliError> {
    let scenario = match config.scenario() {
        Ok(s) => {
            println!("PASS scenario: {} layer(s), interfaces {:?}", s.layers().len(), s.interfaces());
            s
        }
        Err(e) => {
            println!("FAIL scenario: {e}");
            return Ok(false);
        }
    };
    let mut pass = true;
    if let Some(g) = &config.grid {
        let grid = g.spec();
        let ok = [&grid.x, &grid.y, &grid.t].iter().all(|a| !a.is_empty() && a.iter().all(|v| v.is_finite()));
        println!("{} grid: {} x {} x {} nodes", verdict(ok), grid.x.len(), grid.y.len(), grid.t.len());
        pass &= ok;
    }
    let lambdas = validate_lambdas(manifest.quadrature.transform().lambda_max);
    for xi in VALIDATE_XI {
        match scenario.build_coupling(xi).map_err(|e| e.to_string()).and_then(|(m, c)| check_invertibility(&c, &m, &lambdas).map_err(|e| e.to_string())) {
            Ok(cert) if cert.records.is_empty() => println!("PASS medium at xi = {xi}: no interfaces"),
            Ok(cert) => println!("PASS invertibility at xi = {xi}: min relative det {:.3e} over {} interface sides", cert.min_relative(), cert.records.len()),
            Err(e) => {
                println!("FAIL invertibility at xi = {xi}: {e}");
                pass = false;
            }
        }
    }
    Ok(pass)
}

#[derive(Serialize)]
struct RoundtripSummary<'a> {
    manifest: &'a RunManifest,
    samples: usize,
    max_abs_error: f64,
    max_rel_error: f64,
    truncation: f64,
    image_nodes: usize,
    tolerance: f64,
    elapsed_secs: f64,
    pass: bool,
}

fn cmd_roundtrip(manifest: &RunManifest, config: &ScenarioConfig) -> Result<bool, CliError> {
    let rt = config.roundtrip.as_ref().ok_or_else(|| CliError::Usage("the scenario has no [roundtrip] section".into()))?;
    let start = Instant::now();
    let scenario = config.scenario()?;
    let (medium, coupling) = transform_setting(&scenario, rt.xi, rt.surface)?;
    let f = rt.field(&medium);
    let xs = rt.sample_points(medium.interfaces());
    let report = decompose_roundtrip(&f, &xs, &medium, &coupling, &manifest.quadrature.transform()).map_err(check("round trip"))?;
    prepare_out(&manifest.out)?;

    let path = manifest.out.join("roundtrip.csv");
    let mut w = BufWriter::new(File::create(&path).map_err(io_failure(&path))?);
    let mut rows = || -> std::io::Result<()> {
        writeln!(w, "x,component,f,reconstructed,abs_error")?;
        for (i, &x) in report.xs.iter().enumerate() {
            for (k, (a, b)) in report.original[i].iter().zip(&report.reconstructed[i]).enumerate() {
                writeln!(w, "{x:.17e},{},{:.17e},{:.17e},{:.17e}", k + 1, a.re, b.re, (a - b).norm())?;
            }
        }
        w.flush()
    };
    rows().map_err(io_failure(&path))?;

    let pass = report.max_rel_error <= rt.tolerance;
    let summary = RoundtripSummary {
        manifest,
        samples: xs.len(),
        max_abs_error: report.max_abs_error,
        max_rel_error: report.max_rel_error,
        truncation: report.truncation,
        image_nodes: report.image_nodes,
        tolerance: rt.tolerance,
        elapsed_secs: start.elapsed().as_secs_f64(),
        pass,
    };
    write_json(&manifest.out.join("roundtrip.json"), &summary)?;
    println!(
        "{} roundtrip: max_rel={:.3e} max_abs={:.3e} truncation={:.3e} samples={} tol={:e}",
        verdict(pass),
        report.max_rel_error,
        report.max_abs_error,
        report.truncation,
        xs.len(),
        rt.tolerance
    );
    Ok(pass)
}

#[derive(Debug, Clone, Serialize)]
struct Timings {
    tension_secs: f64,
    fields_secs: f64,
    write_secs: f64,
}

#[derive(Debug, Clone, Serialize)]
struct CheckLine {
    name: &'static str,
    value: f64,
    tolerance: f64,
    pass: bool,
}

impl CheckLine {
    fn new(name: &'static str, value: f64, tolerance: f64) -> Self {
        CheckLine { name, value, tolerance, pass: value <= tolerance }
    }
}

#[derive(Serialize)]
struct SolveSummary<'a> {
    manifest: &'a RunManifest,
    files: Vec<String>,
    timings: Timings,
    report: TensionReport,
    residuals: FieldChecks,
    checks: Vec<CheckLine>,
    pass: bool,
}

fn cmd_solve(manifest: &RunManifest, config: &ScenarioConfig) -> Result<bool, CliError> {
    let scenario = config.scenario()?;
    let grid = config.grid()?;
    let spec = manifest.quadrature.solver();
    let t0 = Instant::now();
    let tension = reconstruct_tension(&scenario, &grid, &spec).map_err(check::<ElasticError>("tension reconstruction"))?;
    let t1 = Instant::now();
    let fields = fields_from_tension(&scenario, &tension).map_err(check::<ElasticError>("field recovery"))?;
    let residuals = fields.checks(&scenario, &tension);
    let t2 = Instant::now();

    prepare_out(&manifest.out)?;
    let mut files = Vec::new();
    for ti in 0..grid.t.len() {
        let name = format!("fields_t{ti:03}.csv");
        let path = manifest.out.join(&name);
        let mut w = BufWriter::new(File::create(&path).map_err(io_failure(&path))?);
        fields.write_csv(ti, &mut w).and_then(|_| w.flush()).map_err(io_failure(&path))?;
        files.push(name);
    }
    let timings = Timings { tension_secs: (t1 - t0).as_secs_f64(), fields_secs: (t2 - t1).as_secs_f64(), write_secs: t2.elapsed().as_secs_f64() };

    let mut checks = vec![
        CheckLine::new("causality", residuals.causality, CAUSALITY_TOL),
        CheckLine::new("surface stress", residuals.surface_stress, SURFACE_STRESS_TOL),
        CheckLine::new("imaginary residue", tension.report.imaginary_residue, IMAGINARY_TOL),
    ];
    if !residuals.conjugation.is_empty() {
        let worst = residuals.conjugation.iter().copied().fold(0.0, f64::max);
        checks.push(CheckLine::new("conjugation", worst, CONJUGATION_TOL));
    }
    let pass = checks.iter().all(|c| c.pass);
    for c in &checks {
        println!("{} {}: {:.3e} (tol {:e})", verdict(c.pass), c.name, c.value, c.tolerance);
    }
    let summary = SolveSummary { manifest, files, timings, report: tension.report.clone(), residuals, checks, pass };
    write_json(&manifest.out.join("summary.json"), &summary)?;
    Ok(pass)
}

#[derive(Serialize)]
struct VerifySummary<'a> {
    manifest: &'a RunManifest,
    outcomes: &'a [CriterionOutcome],
    pass: bool,
}

fn cmd_verify(manifest: &RunManifest, criteria: &[u8]) -> Result<bool, CliError> {
    prepare_out(&manifest.out)?;
    let settings = SuiteSettings { quadrature: manifest.quadrature, seed: manifest.seed };
    let outcomes = if criteria.is_empty() {
        run_suite(&settings)
    } else {
        run_selected(&settings, criteria).ok_or_else(|| CliError::Usage(format!("criteria must lie in 1..=8, got {criteria:?}")))?
    };
    for o in &outcomes {
        println!("{o}");
    }
    let pass = outcomes.iter().all(|o| o.pass);
    write_json(&manifest.out.join("verify.json"), &VerifySummary { manifest, outcomes: &outcomes, pass })?;
    Ok(pass)
}

fn cmd_spectrum(manifest: &RunManifest, config: &ScenarioConfig) -> Result<bool, CliError> {
    let sp = config.spectrum.as_ref().ok_or_else(|| CliError::Usage("the scenario has no [spectrum] section".into()))?;
    let scenario = config.scenario()?;
    let (medium, coupling) = transform_setting(&scenario, sp.xi, sp.surface)?;
    let lambdas = sp.lambda.values();
    if lambdas.iter().any(|&l| !(l > 0.0)) {
        return Err(CliError::Usage("spectrum lambdas must be positive".into()));
    }
    prepare_out(&manifest.out)?;
    let path = manifest.out.join("spectrum.csv");
    let mut w = BufWriter::new(File::create(&path).map_err(io_failure(&path))?);
    write_spectrum_csv(&mut w, &medium, &coupling, &lambdas, &sp.x.values()).map_err(check("spectrum"))?;
    w.flush().map_err(io_failure(&path))?;
    println!("PASS spectrum: {} lambdas x {} points written to {}", lambdas.len(), sp.x.values().len(), path.display());
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("lamtrans").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn flags_are_global() {
        let cli = parse(&["verify", "--seed", "7", "--lambda-max", "80", "--criteria", "1,5"]);
        assert_eq!(cli.common.seed, 7);
        assert_eq!(cli.common.lambda_max, Some(80.0));
        assert!(matches!(cli.command, Command::Verify { ref criteria } if criteria == &[1, 5]));
    }

    #[test]
    fn flags_override_config_quadrature() {
        let cli = parse(&["solve", "--panel-tol", "1e-9"]);
        let q = overrides(QuadratureConfig { panel_tol: Some(1e-6), epsilon: Some(1e-7), ..Default::default() }, &cli.common);
        assert_eq!(q.panel_tol, Some(1e-9));
        assert_eq!(q.epsilon, Some(1e-7));
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run(["lamtrans", "frobnicate"]), EXIT_USAGE);
        assert_eq!(run(["lamtrans", "solve"]), EXIT_USAGE);
        assert_eq!(run(["lamtrans", "verify", "--budget", "0"]), EXIT_USAGE);
        assert_eq!(run(["lamtrans", "validate", "--config", "/nonexistent/scenario.toml"]), EXIT_USAGE);
    }

    #[test]
    fn scenario_errors_are_check_failures() {
        let e: CliError = ConfigError::Elastic(ElasticError::NotHomogeneous).into();
        assert_eq!(e.code(), EXIT_CHECK);
        let e: CliError = ConfigError::Parse("bad".into()).into();
        assert_eq!(e.code(), EXIT_USAGE);
    }

    #[test]
    fn validate_lambdas_span_the_cutoff() {
        let l = validate_lambdas(50.0);
        assert_eq!(l.len(), VALIDATE_LAMBDAS);
        assert!((l[0] - 1e-2).abs() < 1e-15 && (l[l.len() - 1] - 50.0).abs() < 1e-9);
    }
}
