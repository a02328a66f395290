//! Command line front end: argument types, artifact writers and exit codes.
//!
//! Exit codes: 0 on success, 1 on runtime or verification failure, 2 on
//! invalid usage or configuration.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use log::info;
use serde::Serialize;

use crate::error::Error;
use crate::experiments::{
    posterior_snapshot, random_trial, run_baseline, run_convergence, run_verify, unit_grid,
    ExperimentConfig, RateTable, PROP6_GRID_SIZE, PROP6_MAX_N, PROP6_TRIALS,
};
use crate::fem::MMode;
use crate::kernels::MaternParams;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Matérn parameters of the single-realization posterior written by `demo`.
pub const DEMO_POSTERIOR_PARAMS: MaternParams = MaternParams {
    nu: 0.5,
    lengthscale: 0.5,
    variance: 100.0,
};
pub const DEMO_POSTERIOR_N: usize = 7;

#[derive(Debug, Parser)]
#[command(name = "statfem", version, about = "Statistical finite elements for 1D elliptic problems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Experiment configuration (JSON).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory; created if missing.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Overrides the configured seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Overrides the mass matrix mode.
    #[arg(long, global = true)]
    pub mode: Option<MMode>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Run the convergence study in --config.
    Run,
    /// Run the built-in verification suites.
    Verify,
    /// Randomized trials of the kernel perturbation bound.
    Prop6,
    /// Run the study in --config together with the Matérn baseline.
    BaselineCompare,
    /// Desk-scale study plus a single posterior snapshot, no config needed.
    Demo,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Run => "run",
            Command::Verify => "verify",
            Command::Prop6 => "prop6",
            Command::BaselineCompare => "baseline-compare",
            Command::Demo => "demo",
        }
    }
}

#[derive(Serialize)]
struct Manifest<'a> {
    command: &'a str,
    version: &'a str,
    seed: u64,
    config: &'a ExperimentConfig,
    outputs: Vec<&'a str>,
    diagnostics: Vec<&'a str>,
}

/// A failure together with the exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn failure(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_FAILURE,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) => CliError::usage(e.to_string()),
            _ => CliError::failure(e.to_string()),
        }
    }
}

fn load_config(cli: &Cli) -> std::result::Result<ExperimentConfig, CliError> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::usage(format!("{} requires --config PATH", cli.command.name())))?;
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
    let mut cfg = ExperimentConfig::from_json(&text)
        .map_err(|e| CliError::usage(format!("invalid config {}: {e}", path.display())))?;
    apply_overrides(cli, &mut cfg);
    Ok(cfg)
}

fn apply_overrides(cli: &Cli, cfg: &mut ExperimentConfig) {
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(mode) = cli.mode {
        cfg.mode = mode;
    }
}

fn write(out: &Path, name: &str, contents: &str) -> std::result::Result<(), CliError> {
    let path = out.join(name);
    fs::write(&path, contents)
        .map_err(|e| CliError::failure(format!("cannot write {}: {e}", path.display())))
}

fn summarize(label: &str, table: &RateTable) {
    for r in &table.rows {
        println!(
            "{label} nu={} lengthscale={} variance={} n_fe={} n={} mean_l2={:.6e} std_l2={:.6e}",
            r.params.nu, r.params.lengthscale, r.params.variance, r.n_fe, r.n, r.mean_l2, r.std_l2
        );
    }
    for s in &table.series {
        println!(
            "{label} nu={} lengthscale={} variance={} n_fe={} theory_slope={:.4} fitted_slope={}",
            s.params.nu,
            s.params.lengthscale,
            s.params.variance,
            s.n_fe,
            s.theory_slope,
            s.fitted_slope.map_or("n/a".into(), |v| format!("{v:.4}"))
        );
    }
    for d in &table.diagnostics {
        eprintln!("{label} warning: {d}");
    }
}

fn run_study(
    cli: &Cli,
    cfg: &ExperimentConfig,
    with_baseline: bool,
    extra_outputs: &[&str],
) -> std::result::Result<(), CliError> {
    info!("running convergence study with seed {}", cfg.seed);
    let rates = run_convergence(cfg)?;
    summarize("statfem", &rates);
    write(&cli.out, "rates.csv", &rates.to_csv())?;
    let mut outputs = vec!["rates.csv"];
    let mut diagnostics: Vec<&str> = rates.diagnostics.iter().map(String::as_str).collect();
    let baseline;
    if with_baseline {
        info!("running Matérn baseline");
        baseline = run_baseline(cfg)?;
        summarize("baseline", &baseline);
        write(&cli.out, "baseline.csv", &baseline.to_csv())?;
        outputs.push("baseline.csv");
        diagnostics.extend(baseline.diagnostics.iter().map(String::as_str));
    }
    outputs.extend_from_slice(extra_outputs);
    let manifest = Manifest {
        command: cli.command.name(),
        version: env!("CARGO_PKG_VERSION"),
        seed: cfg.seed,
        config: cfg,
        outputs,
        diagnostics,
    };
    let json = serde_json::to_string_pretty(&manifest).map_err(Error::from)?;
    write(&cli.out, "manifest.json", &(json + "\n"))?;
    if rates.rows.is_empty() {
        return Err(CliError::failure("no rows could be computed"));
    }
    Ok(())
}

fn demo(cli: &Cli) -> std::result::Result<(), CliError> {
    let mut cfg = ExperimentConfig::demo();
    apply_overrides(cli, &mut cfg);
    let n_fe = cfg.n_fe.iter().copied().max().unwrap_or(512);
    let snap = posterior_snapshot(&cfg, DEMO_POSTERIOR_PARAMS, n_fe, DEMO_POSTERIOR_N)?;
    write(&cli.out, "posterior.csv", &snap.posterior_csv())?;
    write(&cli.out, "observations.csv", &snap.observations_csv())?;
    run_study(cli, &cfg, true, &["posterior.csv", "observations.csv"])
}

fn verify(cli: &Cli) -> std::result::Result<(), CliError> {
    let mode = cli.mode.unwrap_or(MMode::Exact);
    let report = run_verify(mode, cli.seed.unwrap_or(crate::experiments::DEFAULT_SEED));
    let text = format!("{report}\n");
    print!("{text}");
    write(&cli.out, "verify-report.txt", &text)?;
    if report.passed() {
        Ok(())
    } else {
        let failed: Vec<&str> = report.failed().map(|s| s.name).collect();
        Err(CliError::failure(format!("failed suites: {}", failed.join(", "))))
    }
}

fn prop6(cli: &Cli) -> std::result::Result<(), CliError> {
    use rand::SeedableRng;
    let seed = cli.seed.unwrap_or(crate::experiments::DEFAULT_SEED);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let grid = unit_grid(PROP6_GRID_SIZE);
    let mut csv = String::from("trial,nu1,lengthscale1,variance1,nu2,lengthscale2,variance2,delta,c,lhs,rhs,witness_x,holds\n");
    let mut violations = 0;
    for t in 0..PROP6_TRIALS {
        let (r, [p1, p2]) = random_trial(&mut rng, PROP6_MAX_N, &grid)?;
        violations += usize::from(!r.holds);
        let _ = writeln!(
            csv,
            "{t},{},{},{},{},{},{},{},{},{},{},{},{}",
            p1.nu, p1.lengthscale, p1.variance, p2.nu, p2.lengthscale, p2.variance,
            r.delta, r.c, r.lhs, r.rhs, r.witness_x, r.holds
        );
    }
    write(&cli.out, "prop6.csv", &csv)?;
    println!("prop6: {PROP6_TRIALS} trials, grid {PROP6_GRID_SIZE}, violations {violations}");
    if violations == 0 {
        Ok(())
    } else {
        Err(CliError::failure(format!("{violations} violations of the perturbation bound")))
    }
}

fn dispatch(cli: &Cli) -> std::result::Result<(), CliError> {
    fs::create_dir_all(&cli.out).map_err(|e| {
        CliError::usage(format!("cannot create output directory {}: {e}", cli.out.display()))
    })?;
    match cli.command {
        Command::Run => {
            let cfg = load_config(cli)?;
            run_study(cli, &cfg, cfg.baseline, &[])
        }
        Command::BaselineCompare => {
            let cfg = load_config(cli)?;
            run_study(cli, &cfg, true, &[])
        }
        Command::Demo => demo(cli),
        Command::Verify => verify(cli),
        Command::Prop6 => prop6(cli),
    }
}

/// Executes a parsed command line and returns the process exit code.
pub fn execute(cli: &Cli) -> i32 {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cli.threads {
        if t == 0 {
            eprintln!("error: --threads must be at least 1");
            return EXIT_USAGE;
        }
        builder = builder.num_threads(t);
    }
    let pool = match builder.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start thread pool: {e}");
            return EXIT_FAILURE;
        }
    };
    match pool.install(|| dispatch(cli)) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}
