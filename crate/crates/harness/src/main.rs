use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qsurrogate_harness::{run_to_dir, ExperimentConfig, ExperimentId, HarnessError};

#[derive(Parser)]
#[command(name = "qsurrogate", version, about = "Local surrogation experiments for quantum reuploading models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Growing 1D windows over the Fourier target, 1-3 qubit models.
    Sweep1d(RunArgs),
    /// Fixed quantum and classical patches on one 2D target.
    Patch2dDemo(RunArgs),
    /// 13 targets x 19 anchored windows, all three R² families.
    Sweep2dSuite(RunArgs),
    /// Quantum-kernel SVM on Iris with local surrogates on growing balls.
    QsvmDemo(RunArgs),
    /// Breast-cancer hypercube sweep with separable surrogates.
    WdbcLimits(RunArgs),
    /// Print the fully defaulted config for an experiment and exit.
    PrintConfig {
        #[arg(value_parser = parse_id)]
        experiment: ExperimentId,
    },
}

#[derive(Args)]
struct RunArgs {
    /// JSON config; the experiment id in it must match the subcommand.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Overrides the master seed from the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Path to wdbc.data.
    #[arg(long)]
    wdbc: Option<PathBuf>,
}

fn parse_id(s: &str) -> Result<ExperimentId, String> {
    serde_json::from_value(serde_json::Value::String(s.replace('-', "_"))).map_err(|_| format!("unknown experiment '{s}'"))
}

fn load_config(id: ExperimentId, args: &RunArgs) -> Result<ExperimentConfig, HarnessError> {
    let mut config = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
            ExperimentConfig::from_json(&text)?
        }
        None => ExperimentConfig::new(id),
    };
    if config.experiment != id {
        return Err(HarnessError::Config(format!(
            "config is for '{}', subcommand is '{}'",
            config.experiment.as_str(),
            id.as_str()
        )));
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(path) = &args.wdbc {
        config.wdbc_path = Some(path.clone());
    }
    config.validate()?;
    Ok(config)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (id, args) = match cli.command {
        Command::Sweep1d(a) => (ExperimentId::Sweep1d, a),
        Command::Patch2dDemo(a) => (ExperimentId::Patch2dDemo, a),
        Command::Sweep2dSuite(a) => (ExperimentId::Sweep2dSuite, a),
        Command::QsvmDemo(a) => (ExperimentId::QsvmDemo, a),
        Command::WdbcLimits(a) => (ExperimentId::WdbcLimits, a),
        Command::PrintConfig { experiment } => {
            println!("{}", ExperimentConfig::new(experiment).to_json());
            return ExitCode::SUCCESS;
        }
    };
    let result = load_config(id, &args).and_then(|config| run_to_dir(&config, &args.out));
    match result {
        Ok(run) => {
            println!("{}", serde_json::to_string_pretty(&run.summary).expect("summary serialises"));
            eprintln!("wrote {} rows to {}", run.records.len(), args.out.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
