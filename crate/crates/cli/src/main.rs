use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lipwalk::commands::{self, Outcome};
use lipwalk::config::Format;
use lipwalk::{Result, Scenario, ScenarioConfig};

/// Limit-cycle walking on the linear inverted pendulum.
#[derive(Debug, Parser)]
#[command(name = "lipwalk", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fixed point, step-map eigenvalues and controllability.
    LimitCycle(RunArgs),
    /// Feedback gains and closed-loop eigenvalues.
    DesignGains(RunArgs),
    /// Closed-loop simulation with CSV traces and SVG figures.
    Simulate(RunArgs),
    /// Regenerate figures and the summary from a results directory.
    Analyze {
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Scenario file (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `run.output_dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output formats; overrides `run.formats`.
    #[arg(long, value_enum, value_delimiter = ',')]
    format: Option<Vec<Format>>,
}

impl RunArgs {
    fn load(&self) -> Result<Scenario> {
        let mut scn = ScenarioConfig::load(&self.config)?.validate()?;
        if let Some(out) = &self.out {
            scn.output_dir = Some(out.clone());
        }
        if let Some(f) = &self.format {
            scn.formats = f.clone();
        }
        Ok(scn)
    }
}

fn run(cli: Cli) -> Result<String> {
    let (outcome, dir): (Outcome, Option<PathBuf>) = match cli.command {
        Command::LimitCycle(args) => {
            let scn = args.load()?;
            (commands::limit_cycle(&scn)?, scn.output_dir)
        }
        Command::DesignGains(args) => {
            let scn = args.load()?;
            (commands::design_gains(&scn)?, scn.output_dir)
        }
        Command::Simulate(args) => {
            let scn = args.load()?;
            let dir = scn.output_dir.clone().unwrap_or_else(|| PathBuf::from("out"));
            (commands::simulate_scenario(&scn)?, Some(dir))
        }
        Command::Analyze { out } => (commands::analyze(&out)?, Some(out)),
    };
    if let Some(dir) = dir {
        commands::write_outputs(&dir, &outcome.files)?;
    }
    Ok(outcome.report)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(report) => {
            print!("{report}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("lipwalk: {e}");
            e.into_exit_code()
        }
    }
}
