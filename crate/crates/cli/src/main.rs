use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use qcurrent_cli::invariants::{run_invariant_suite, Fault};
use qcurrent_cli::run::{
    run_contextuality_scan, run_continuum_check, run_evolve, run_scenario, run_steady,
};
use qcurrent_cli::{CliError, Result, ScenarioConfig, Table};

#[derive(Parser)]
#[command(
    name = "qcurrent",
    version,
    about = "Steady states, currents and thermodynamics of a dissipative two-qutrit rotor"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the table here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads for sweeps.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Stationary values at a single parameter point.
    Steady {
        #[arg(long)]
        config: PathBuf,
    },
    /// One row per sweep point.
    Sweep {
        #[arg(long)]
        config: PathBuf,
    },
    /// Time trace from the configured initial state.
    Evolve {
        #[arg(long)]
        config: PathBuf,
    },
    /// Ring discretisation errors for growing sizes.
    ContinuumCheck {
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Margenau-Hill rates and weak values on every edge.
    ContextualityScan {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run the randomized invariant suite.
    Invariants {
        #[arg(long, hide = true)]
        fault: Option<FaultArg>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FaultArg {
    RateSign,
}

struct Outcome {
    command: &'static str,
    table: Table,
    config: Option<ScenarioConfig>,
    failures: usize,
}

fn execute(cli: &Cli) -> Result<Outcome> {
    let done = |command, table, config| Outcome {
        command,
        table,
        config,
        failures: 0,
    };
    let load = |p: &PathBuf| ScenarioConfig::load(p);
    Ok(match &cli.command {
        Command::Steady { config } => {
            let cfg = load(config)?;
            done("steady", run_steady(&cfg)?, Some(cfg))
        }
        Command::Sweep { config } => {
            let cfg = load(config)?;
            if cfg.sweep.is_none() {
                return Err(CliError::Config("sweep needs a [sweep] section".into()));
            }
            done("sweep", run_scenario(&cfg, cli.jobs)?, Some(cfg))
        }
        Command::Evolve { config } => {
            let cfg = load(config)?;
            done("evolve", run_evolve(&cfg)?, Some(cfg))
        }
        Command::ContinuumCheck { config } => {
            let cfg = config.as_ref().map(load).transpose()?;
            done("continuum-check", run_continuum_check(cfg.as_ref())?, cfg)
        }
        Command::ContextualityScan { config } => {
            let cfg = load(config)?;
            done(
                "contextuality-scan",
                run_contextuality_scan(&cfg, cli.jobs)?,
                Some(cfg),
            )
        }
        Command::Invariants { fault } => {
            let fault = fault.map(|FaultArg::RateSign| Fault::RateSign);
            let report = run_invariant_suite(cli.seed, fault);
            Outcome {
                command: "invariants",
                table: report.table(),
                config: None,
                failures: report.failures(),
            }
        }
    })
}

fn emit(cli: &Cli, command: &str, table: &Table, cfg: Option<&ScenarioConfig>) -> Result<()> {
    match &cli.out {
        Some(path) => {
            let file = std::fs::File::create(path).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })?;
            let mut w = std::io::BufWriter::new(file);
            table.write(&mut w, command, cli.seed, cfg)?;
            w.flush().map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })
        }
        None => table.write(&mut std::io::stdout().lock(), command, cli.seed, cfg),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = execute(&cli).and_then(|o| {
        emit(&cli, o.command, &o.table, o.config.as_ref())?;
        match o.failures {
            0 => Ok(()),
            n => Err(CliError::Invariants(n)),
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qcurrent: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
