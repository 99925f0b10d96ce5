//! `lane-emden`: ground states, energy constants, the reduced energy and the
//! verification suite from the command line.
//!
//! Exit codes: 0 success, 1 a check failed, 2 usage or configuration error,
//! 3 numerical failure.

mod checks;
mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::Failure;
use config::{ConfigError, RunConfig};

#[derive(Parser, Debug)]
#[command(
    name = "lane-emden",
    version,
    about = "Lane-Emden system ground states and reduced-energy verification"
)]
struct Cli {
    /// Plain-text `key = value` configuration; flags override it.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<String>,
    /// Worker threads (0 = one per core).
    #[arg(long, global = true, value_name = "N")]
    threads: Option<String>,
    /// Record that the run uses no random numbers (the pipeline is fully deterministic).
    #[arg(long, global = true)]
    seed_free: bool,
    #[command(flatten)]
    problem: ProblemArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct ProblemArgs {
    /// Dimension.
    #[arg(long, global = true)]
    n: Option<String>,
    /// Exponent p (decimal or ratio such as 7/3); q follows from the hyperbola.
    #[arg(long, global = true)]
    p: Option<String>,
    /// Perturbation weight on the p-side nonlinearity.
    #[arg(long, global = true)]
    alpha: Option<String>,
    /// Perturbation weight on the q-side nonlinearity.
    #[arg(long, global = true)]
    beta: Option<String>,
    /// Comma-separated decreasing δ samples.
    #[arg(long, global = true, allow_hyphen_values = true)]
    deltas: Option<String>,
    /// Comma-separated decreasing ε samples.
    #[arg(long, global = true)]
    eps: Option<String>,
    /// Ratio δ/ε for the ε-expansion checks.
    #[arg(long, global = true)]
    d: Option<String>,
    /// Relative tolerance of the radial integrator.
    #[arg(long, global = true)]
    ode_tol: Option<String>,
    /// Largest accepted relative error estimate of the constants.
    #[arg(long, global = true)]
    quad_tol: Option<String>,
    /// Largest accepted relative residual of the tail fit.
    #[arg(long, global = true)]
    fit_tol: Option<String>,
    /// Outer radius of the radial integration.
    #[arg(long, global = true)]
    r_max: Option<String>,
    /// Ball mesh refinement level.
    #[arg(long, global = true)]
    level: Option<String>,
    /// Comma-separated check names (or `all`).
    #[arg(long, global = true)]
    checks: Option<String>,
    /// `limit` or `delta` for the boundary constants.
    #[arg(long, global = true)]
    b_mode: Option<String>,
    /// δ used by `--b-mode delta`.
    #[arg(long, global = true)]
    delta: Option<String>,
    /// Number of (d, G) samples written by `reduced-energy`.
    #[arg(long, global = true)]
    g_samples: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve for the ground state; writes the profile, its sidecar and φ samples.
    GroundState,
    /// Compute A1..D2.
    Constants,
    /// Maximize the reduced energy G(d).
    ReducedEnergy,
    /// Run the verification checks.
    Verify,
    /// Run the whole pipeline and gather every record into report.json.
    Report {
        /// Only gather records already in the output directory.
        #[arg(long)]
        from_existing: bool,
    },
}

fn resolve(cli: &Cli) -> Result<RunConfig, ConfigError> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &cli.config {
        cfg.apply_file(path)?;
    }
    let p = &cli.problem;
    let flags = [
        ("n", &p.n),
        ("p", &p.p),
        ("alpha", &p.alpha),
        ("beta", &p.beta),
        ("deltas", &p.deltas),
        ("eps", &p.eps),
        ("d", &p.d),
        ("ode_tol", &p.ode_tol),
        ("quad_tol", &p.quad_tol),
        ("fit_tol", &p.fit_tol),
        ("r_max", &p.r_max),
        ("level", &p.level),
        ("checks", &p.checks),
        ("b_mode", &p.b_mode),
        ("delta", &p.delta),
        ("g_samples", &p.g_samples),
        ("out", &cli.out),
        ("threads", &cli.threads),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            cfg.set(key, v)
                .map_err(|e| ConfigError(format!("--{}: {e}", key.replace('_', "-"))))?;
        }
    }
    if cli.seed_free {
        cfg.seed_free = true;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn execute(cli: &Cli, cfg: &RunConfig) -> Result<(), Failure> {
    if cfg.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.threads)
            .build_global()
            .map_err(|e| Failure::Usage(format!("cannot start thread pool: {e}")))?;
    }
    let ok = match cli.command {
        Command::GroundState => commands::ground_state(cfg).map(|_| true)?,
        Command::Constants => {
            let profile = commands::solve(cfg)?;
            commands::constants(cfg, &profile).map(|_| true)?
        }
        Command::ReducedEnergy => {
            let profile = commands::solve(cfg)?;
            let k = commands::constants_with(cfg, &profile, lane_emden::BMode::Limit)?;
            commands::reduced_energy(cfg, k).map(|_| true)?
        }
        Command::Verify => commands::verify(cfg, commands::solve(cfg)?)?,
        Command::Report { from_existing } => commands::report(cfg, from_existing)?,
    };
    if ok {
        Ok(())
    } else {
        Err(Failure::ChecksFailed)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match resolve(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match execute(&cli, &cfg) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Usage(m) | Failure::Numerical(m) => eprintln!("error: {m}"),
                Failure::ChecksFailed => eprintln!("one or more checks failed"),
            }
            ExitCode::from(f.exit_code())
        }
    }
}
