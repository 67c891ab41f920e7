use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand};
use contactflow::ModelKind;
use contactflow_cli::{default_config, exit, parse_config, run_scenario, CliError, ScenarioConfig};

#[derive(Parser)]
#[command(name = "contactflow", version, about = "Verify and integrate contact-type Hamiltonian models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Overrides {
    /// CSV output path, replacing `[output] path`.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long = "t-final")]
    t_final: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Verify the structure, then integrate and write the trajectory.
    Run {
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Verify the structure on sampled states only.
    Verify {
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Print the available model names.
    ListModels,
    /// Print a runnable scenario file for a model.
    DefaultConfig { model: String },
}

fn load(path: &PathBuf, o: &Overrides) -> Result<ScenarioConfig, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.clone(),
        source,
    })?;
    let mut cfg = parse_config(&text)?;
    if let Some(p) = &o.out {
        cfg.output.path = Some(p.clone());
    }
    if let Some(s) = o.seed {
        cfg.verify.seed = s;
    }
    if let Some(dt) = o.dt {
        cfg.run.dt = dt;
    }
    if let Some(t) = o.t_final {
        cfg.run.t_final = t;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn execute(cli: Cli) -> Result<i32, CliError> {
    let (path, overrides, integrate) = match cli.command {
        Command::ListModels => {
            for kind in ModelKind::ALL {
                println!("{kind}");
            }
            return Ok(exit::OK);
        }
        Command::DefaultConfig { model } => {
            let kind = ModelKind::from_str(&model).map_err(|_| contactflow_cli::ConfigError::UnknownModel(model))?;
            print!("{}", default_config(kind));
            return Ok(exit::OK);
        }
        Command::Run { config, overrides } => (config, overrides, true),
        Command::Verify { config, overrides } => (config, overrides, false),
    };
    let cfg = load(&path, &overrides)?;
    let report = run_scenario(&cfg, integrate)?;
    println!("{report}");
    if report.verified() {
        Ok(exit::OK)
    } else {
        eprintln!("error: structure verification failed, integration skipped");
        Ok(exit::VERIFICATION_FAILED)
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("CONTACTFLOW_LOG", "error")).init();
    let code = match execute(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit::ERROR
        }
    };
    ExitCode::from(code as u8)
}
