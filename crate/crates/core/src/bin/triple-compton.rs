use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use triple_compton::integration::Process;
use triple_compton::scenario::{
    run_energy_scan, run_grid, run_mgbr1968, run_totals, write_outputs, Observable, RunOutput,
    ScenarioConfig, BUILTIN_SCENARIOS,
};
use triple_compton::Error;

/// Triple Compton cross sections and photon-triplet entanglement.
#[derive(Debug, Parser)]
#[command(name = "triple-compton", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Detector-averaged cross section for the rest-electron experiment.
    Mgbr1968(Common),
    /// σ5 polarization panels or τ on an (ω1, ω2) grid.
    Grid {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = ObservableArg::Sigma5)]
        observable: ObservableArg,
    },
    /// Total single, double and triple Compton cross sections and event rates.
    Totals {
        #[command(flatten)]
        common: Common,
        /// Restrict to one process (repeatable); all three by default.
        #[arg(long, value_enum)]
        process: Vec<ProcessArg>,
    },
    /// Detector average as a function of the incoming photon energy.
    Scan(Common),
}

#[derive(Debug, Args)]
struct Common {
    /// TOML configuration file; overrides --scenario.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Built-in scenario (mgbr1968, xfel, fig4a); defaults per subcommand.
    #[arg(long)]
    scenario: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Monte Carlo samples per integral.
    #[arg(long)]
    budget: Option<u64>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ObservableArg {
    Sigma5,
    Tau,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ProcessArg {
    Single,
    Double,
    Triple,
}

impl Common {
    fn resolve(&self, default_scenario: &str) -> Result<ScenarioConfig, Error> {
        let mut cfg = match (&self.config, &self.scenario) {
            (Some(path), _) => ScenarioConfig::from_path(path).map_err(|e| match e {
                Error::Io(io) => Error::Config {
                    field: "--config".into(),
                    message: format!("{}: {io}", path.display()),
                },
                other => other,
            })?,
            (None, name) => {
                let name = name.as_deref().unwrap_or(default_scenario);
                ScenarioConfig::builtin(name).ok_or_else(|| Error::Config {
                    field: "--scenario".into(),
                    message: format!(
                        "unknown scenario '{name}' ({})",
                        BUILTIN_SCENARIOS.join(", ")
                    ),
                })?
            }
        };
        if let Some(seed) = self.seed {
            cfg.sampling.seed = seed;
        }
        if let Some(budget) = self.budget {
            cfg.sampling.budget = budget;
        }
        Ok(cfg)
    }
}

fn run(cli: Cli) -> Result<(RunOutput, PathBuf), Error> {
    match cli.command {
        Command::Mgbr1968(c) => Ok((run_mgbr1968(&c.resolve("mgbr1968")?)?, c.out)),
        Command::Grid { common, observable } => {
            let observable = match observable {
                ObservableArg::Sigma5 => Observable::Sigma5,
                ObservableArg::Tau => Observable::Tau,
            };
            Ok((run_grid(&common.resolve("xfel")?, observable)?, common.out))
        }
        Command::Totals { common, process } => {
            let processes: Vec<Process> = if process.is_empty() {
                Process::ALL.to_vec()
            } else {
                process
                    .iter()
                    .map(|p| match p {
                        ProcessArg::Single => Process::Single,
                        ProcessArg::Double => Process::Double,
                        ProcessArg::Triple => Process::Triple,
                    })
                    .collect()
            };
            Ok((
                run_totals(&common.resolve("xfel")?, &processes)?,
                common.out,
            ))
        }
        Command::Scan(c) => Ok((run_energy_scan(&c.resolve("mgbr1968")?)?, c.out)),
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config { .. }
        | Error::InvalidArgument(_)
        | Error::Budget { .. }
        | Error::Parse { .. } => 2,
        Error::NonConvergence { .. } => 3,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(cli).and_then(|(output, dir)| {
        write_outputs(&dir, &output.files)?;
        Ok(output)
    });
    match result {
        Ok(output) => {
            if let Some(report) = output.report {
                print!("{report}");
            }
            for f in &output.files {
                eprintln!("wrote {}", f.name);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
