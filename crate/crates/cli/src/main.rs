use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod config;

use config::RunConfig;

/// Minimal KPP front speeds in shear flows.
#[derive(Debug, Parser)]
#[command(name = "kpp-speedlab", version, about)]
struct Cli {
    /// `key = value` config file; command-line flags take precedence.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Print the merged configuration and exit.
    #[arg(long, global = true)]
    print_config: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Minimal speed of one problem.
    #[command(allow_negative_numbers = true)]
    Speed {
        #[command(flatten)]
        problem: ProblemArgs,
        /// Also write the result as CSV.
        #[arg(long, value_name = "PATH")]
        csv: Option<String>,
    },
    /// c* along a geometric grid of b for the diffusion matrix diag(1, b).
    #[command(allow_negative_numbers = true)]
    Scan {
        #[command(flatten)]
        problem: ProblemArgs,
        /// Swept parameter (only `b`).
        #[arg(long)]
        param: Option<String>,
        #[arg(long)]
        from: Option<f64>,
        #[arg(long)]
        to: Option<f64>,
        #[arg(long)]
        points: Option<usize>,
        /// Output CSV; stdout when absent.
        #[arg(long, value_name = "PATH")]
        out: Option<String>,
    },
    /// Search for a witness that the speed is not monotone in the diffusion.
    #[command(allow_negative_numbers = true)]
    Counterexample {
        #[command(flatten)]
        problem: ProblemArgs,
        /// `proportional` or `nonproportional`.
        #[arg(long)]
        mode: Option<String>,
        #[arg(long)]
        delta: Option<f64>,
        /// Grid used to confirm the witness.
        #[arg(long)]
        confirm_n: Option<usize>,
        /// Write the search trace as CSV.
        #[arg(long, value_name = "PATH")]
        csv: Option<String>,
    },
    /// Time-domain front simulation compared with the variational speed.
    #[command(allow_negative_numbers = true)]
    Simulate {
        #[command(flatten)]
        problem: ProblemArgs,
        /// Strip length in x.
        #[arg(long)]
        strip: Option<f64>,
        #[arg(long)]
        nx: Option<usize>,
        #[arg(long)]
        tend: Option<f64>,
        /// Write the front trajectory as CSV.
        #[arg(long, value_name = "PATH")]
        traj: Option<String>,
    },
    /// Run the acceptance criteria and print a PASS/FAIL table.
    Verify {
        /// `quick` or `full`.
        #[arg(long)]
        suite: Option<String>,
        /// Deliberately break the eigensolver shift (harness self-test).
        #[arg(long, hide = true)]
        inject_broken_shift: bool,
    },
}

#[derive(Debug, Args)]
struct ProblemArgs {
    /// Axial diffusion.
    #[arg(long)]
    alpha: Option<f64>,
    /// Transverse diffusion.
    #[arg(long)]
    beta: Option<f64>,
    /// `zero`, `cosine:amplitude=A[:mode=M]`, `pwl:points=y,v;...` or `pwl:file=PATH`.
    #[arg(long)]
    flow: Option<String>,
    /// f'(0); the reaction is logistic with this rate unless --reaction is given.
    #[arg(long)]
    fprime0: Option<f64>,
    /// `logistic:mu=R` or `poly:coeffs=c0,c1,...`.
    #[arg(long)]
    reaction: Option<String>,
    /// `neumann` or `periodic`.
    #[arg(long)]
    bc: Option<String>,
    /// Cross-section length.
    #[arg(long)]
    length: Option<f64>,
    /// Grid cells across the section.
    #[arg(long)]
    n: Option<usize>,
    /// Eigensolver iteration cap.
    #[arg(long)]
    max_iterations: Option<usize>,
}

impl ProblemArgs {
    fn into_config(self) -> Result<RunConfig, commands::CliError> {
        let bc = self
            .bc
            .map(|s| s.parse().map_err(commands::CliError::Core))
            .transpose()?;
        Ok(RunConfig {
            alpha: self.alpha,
            beta: self.beta,
            flow: self.flow,
            fprime0: self.fprime0,
            reaction: self.reaction,
            bc,
            length: self.length,
            n: self.n,
            max_iterations: self.max_iterations,
            ..RunConfig::default()
        })
    }
}

fn flags_config(command: Command) -> Result<(commands::Kind, RunConfig, bool), commands::CliError> {
    use commands::Kind;
    Ok(match command {
        Command::Speed { problem, csv } => (Kind::Speed, RunConfig { csv, ..problem.into_config()? }, false),
        Command::Scan { problem, param, from, to, points, out } => {
            (Kind::Scan, RunConfig { param, from, to, points, out, ..problem.into_config()? }, false)
        }
        Command::Counterexample { problem, mode, delta, confirm_n, csv } => {
            (Kind::Counterexample, RunConfig { mode, delta, confirm_n, csv, ..problem.into_config()? }, false)
        }
        Command::Simulate { problem, strip, nx, tend, traj } => {
            (Kind::Simulate, RunConfig { strip, nx, tend, traj, ..problem.into_config()? }, false)
        }
        Command::Verify { suite, inject_broken_shift } => {
            (Kind::Verify, RunConfig { suite, ..RunConfig::default() }, inject_broken_shift)
        }
    })
}

fn run(cli: Cli) -> Result<(), commands::CliError> {
    commands::configure_threads()?;
    let file = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| commands::CliError::io(path, e))?;
            RunConfig::parse(&text)?
        }
        None => RunConfig::default(),
    };
    let (kind, flags, fault) = flags_config(cli.command)?;
    let config = file.overlay(flags);
    if cli.print_config {
        print!("{}", config.emit());
        return Ok(());
    }
    commands::dispatch(kind, &config, fault)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
