use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use dsair::commands::{reproduce, run_job, Command, Figure, Job};
use dsair::config::{parse_config_unchecked, RunConfig};
use dsair::Error;

/// AI development race model: payoffs, zones, evolutionary sweeps and figure data.
#[derive(Parser, Debug)]
#[command(name = "dsair", version)]
struct Cli {
    /// Configuration file (`key = value` lines, `#` comments).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Zone map of the (s, p_r) plane.
    Zones { overrides: Vec<String> },
    /// Payoff matrix of the configured scenario.
    Payoffs { overrides: Vec<String> },
    /// Fixation probabilities and stationary distribution at one point.
    Stationary { overrides: Vec<String> },
    /// One- or two-dimensional parameter sweep.
    Sweep { overrides: Vec<String> },
    /// Dominant transitions between monomorphic states (Graphviz DOT).
    Transitions { overrides: Vec<String> },
    /// Agent-based simulation compared with the analytic distribution.
    Abm { overrides: Vec<String> },
    /// Regenerate the data behind one figure.
    Reproduce {
        /// fig1, fig2, fig3, fig4, fig5, figA1, figA2, figA3 or figA4
        figure: String,
        overrides: Vec<String>,
    },
}

fn load(path: Option<&Path>, overrides: &[String]) -> Result<RunConfig, Error> {
    let mut config = match path {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Error::Io {
                path: path.to_path_buf(),
                message: e.to_string(),
            })?;
            parse_config_unchecked(&text)?
        }
        None => RunConfig::default(),
    };
    config.apply_overrides(overrides)?;
    config.validate()?;
    Ok(config)
}

fn run(cli: Cli) -> Result<Vec<PathBuf>, Error> {
    let config_path = cli.config.as_deref();
    let (command, overrides) = match cli.command {
        Cmd::Zones { overrides } => (Command::Zones, overrides),
        Cmd::Payoffs { overrides } => (Command::Payoffs, overrides),
        Cmd::Stationary { overrides } => (Command::Stationary, overrides),
        Cmd::Sweep { overrides } => (Command::Sweep, overrides),
        Cmd::Transitions { overrides } => (Command::Transitions, overrides),
        Cmd::Abm { overrides } => (Command::Abm, overrides),
        Cmd::Reproduce { figure, overrides } => {
            let figure: Figure = figure.parse()?;
            let config = load(config_path, &overrides)?;
            let out_dir = PathBuf::from(&config.out_dir);
            return reproduce(figure, &config, &out_dir);
        }
    };
    let config = load(config_path, &overrides)?;
    let out_dir = PathBuf::from(&config.out_dir);
    run_job(&Job::new(command, config), &out_dir)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(paths) => {
            for path in paths {
                println!("{}", path.display());
            }
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error[{}]: {}", err.kind(), err);
            ExitCode::FAILURE
        }
    }
}
