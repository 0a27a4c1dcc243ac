//! `largerho`: reproducible experiments on the large-Rayleigh-number Lorenz system.
//!
//! Exit codes: 0 success, 1 numerical failure, 2 configuration error.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::commands::{BranchArgs, HysteresisArgs, OrbitArgs, SampleArgs, SimulateArgs, StenfloArgs, VerifyArgs};
use crate::config::{config_error, pick, CommonFlags, ConfigError, Model};

#[derive(Parser, Debug)]
#[command(name = "largerho", version, about = "Large-Rayleigh-number Lorenz experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[arg(long, global = true)]
    rho: Option<f64>,
    #[arg(long, global = true)]
    sigma: Option<f64>,
    #[arg(long, global = true)]
    beta: Option<f64>,
    /// Sets sigma = lambda (beta + 2) - 1.
    #[arg(long, global = true)]
    lambda: Option<f64>,
    #[arg(long, global = true)]
    rtol: Option<f64>,
    #[arg(long, global = true)]
    atol: Option<f64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for grid commands (0: one per core).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// TOML file of `key = value` settings; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Melnikov branch table over a lambda grid.
    Branch(BranchArgs),
    /// Time series and transport summary from seeded starts.
    Simulate(SimulateArgs),
    /// Parabolic lambda ramp with attractor-switch events.
    Hysteresis(HysteresisArgs),
    /// Refine a periodic orbit by shooting from the branch solution.
    Orbit(OrbitArgs),
    /// Appendix positivity claims and series coefficients.
    Verify(VerifyArgs),
    /// Lorenz-Stenflo Melnikov structure and transport.
    Stenflo(StenfloArgs),
    /// Sample a closed-form orbit of the limiting system.
    OrbitSample(SampleArgs),
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let file = config::load(cli.config.as_deref())?;
    let flags = CommonFlags {
        rho: cli.rho,
        sigma: cli.sigma,
        beta: cli.beta,
        lambda: cli.lambda,
        rtol: cli.rtol,
        atol: cli.atol,
        seed: cli.seed,
    };
    let model = Model::resolve(&flags, &file)?;
    log::info!("resolved model {model:?}");
    let jobs = pick(cli.jobs, file.jobs, 0);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build().map_err(|e| config_error(e.to_string()))?;
    let out = cli.out.as_deref();
    pool.install(|| match &cli.command {
        Command::Branch(a) => commands::branch(&model, &file, a, cli.lambda, out),
        Command::Simulate(a) => commands::simulate(&model, &file, a, out),
        Command::Hysteresis(a) => commands::hysteresis(&model, &file, a, out),
        Command::Orbit(a) => commands::orbit(&model, &file, a, out),
        Command::Verify(a) => commands::verify(&model, &file, a, out),
        Command::Stenflo(a) => commands::stenflo_cmd(&model, &file, a, out),
        Command::OrbitSample(a) => commands::orbit_sample(&model, &file, a, out),
    })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("LARGERHO_LOG", "warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<ConfigError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
