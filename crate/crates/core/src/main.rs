use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use laser_zeno::config::RunConfig;
use laser_zeno::{tasks, validate, Error};

#[derive(Parser)]
#[command(name = "laser-zeno", version, about = "Laser-modified spontaneous emission: rates, spectra, dynamics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML config; built-in defaults when absent.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for sweeps.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Pole-search and integrator tolerance.
    #[arg(long, global = true)]
    tolerance: Option<f64>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// gamma(B)/gamma by three routes for several multipole orders.
    GammaScan,
    /// Emitted-photon spectrum with the laser off and on.
    Spectrum,
    /// Survival probability of the discretized model and the fitted rate.
    Evolve,
    /// Decay rates into the two dressed states.
    Dressed,
    /// Rates with extra off-resonant levels.
    Multilevel,
    /// B from laboratory laser parameters.
    EstimateB,
    /// Run the invariant battery.
    Validate,
}

fn run(cli: &Cli) -> Result<bool, Error> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(t) = cli.tolerance {
        cfg.tolerance = Some(t);
    }
    let cfg = cfg.resolve()?;
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::config("--threads", e.to_string()))?;
    }
    let (table, ok) = match cli.command {
        Command::GammaScan => (tasks::cmd_gamma_scan(&cfg)?, true),
        Command::Spectrum => (tasks::cmd_spectrum(&cfg)?, true),
        Command::Evolve => (tasks::cmd_evolve(&cfg)?, true),
        Command::Dressed => (tasks::cmd_dressed(&cfg)?, true),
        Command::Multilevel => (tasks::cmd_multilevel(&cfg)?, true),
        Command::EstimateB => (tasks::cmd_estimate_b(&cfg)?, true),
        Command::Validate => validate::cmd_validate(&cfg),
    };
    let text = table.render(&cfg);
    match &cli.out {
        Some(path) => std::fs::write(path, text)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            // a closed pipe (`| head`) is not an error
            match stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()) {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => return Err(e.into()),
                _ => {}
            }
        }
    }
    Ok(ok)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("validation failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
