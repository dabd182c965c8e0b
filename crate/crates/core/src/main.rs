use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use qcoin::batch::Execution;
use qcoin::harness::{batch_report, run_single, theta_sweep, SweepParams};
use qcoin::oracle::{run_suite, OracleOptions};
use qcoin::{Party, ProtocolConfig, StrategySpec};

#[derive(Parser)]
#[command(
    name = "qcoin",
    version,
    about = "Quantum coin-tossing protocol simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(clap::Args)]
struct Common {
    /// Number of entangled pairs per run.
    #[arg(long, default_value_t = 16, value_parser = clap::value_parser!(u64).range(1..))]
    rounds: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// honest | nonmax:<theta> | custom:<8 reals>
    #[arg(long, default_value = "honest")]
    alice: String,
    /// honest | abort-bias:<0|1>
    #[arg(long, default_value = "honest")]
    bob: String,
    /// Output file (default: standard output).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the protocol once and print the verdict.
    Run {
        #[command(flatten)]
        common: Common,
        /// Write the round-by-round transcript to this file.
        #[arg(long)]
        dump_transcript: Option<PathBuf>,
    },
    /// Run many independent executions and report statistics.
    Batch {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Run trials on one thread.
        #[arg(long)]
        sequential: bool,
    },
    /// Batch over a grid of Alice's Schmidt angle; CSV output.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        #[arg(long, default_value = "theta")]
        param: String,
        #[arg(long, allow_negative_numbers = true)]
        from: f64,
        #[arg(long, allow_negative_numbers = true)]
        to: f64,
        #[arg(long, allow_negative_numbers = true)]
        step: f64,
    },
    /// Exact self-checks by exhaustive enumeration.
    Oracle {
        #[arg(long, default_value_t = 4)]
        max_rounds: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Negative control: perturb a Bell amplitude by this amount.
        #[arg(long, allow_negative_numbers = true)]
        inject_perturbation: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Failure {
    Usage(String),
    Check(String),
}

impl From<qcoin::Error> for Failure {
    fn from(e: qcoin::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Failure::Check(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn strategies(common: &Common) -> Result<(ProtocolConfig, StrategySpec, StrategySpec), Failure> {
    let config = ProtocolConfig::new(common.rounds as usize, common.seed)?;
    let alice = StrategySpec::parse(Party::Alice, &common.alice)?;
    let bob = StrategySpec::parse(Party::Bob, &common.bob)?;
    Ok((config, alice, bob))
}

fn execute(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Run {
            common,
            dump_transcript,
        } => {
            let (config, alice, bob) = strategies(&common)?;
            let (transcript, summary) = run_single(&config, &alice, &bob)?;
            if let Some(path) = &dump_transcript {
                fs::write(path, transcript.render())
                    .map_err(|e| Failure::Check(format!("cannot write {}: {e}", path.display())))?;
            }
            emit(common.out.as_ref(), &summary)
        }
        Command::Batch {
            common,
            trials,
            format,
            sequential,
        } => {
            let (config, alice, bob) = strategies(&common)?;
            let execution = if sequential {
                Execution::Sequential
            } else {
                Execution::Parallel
            };
            let report = batch_report(&config, &alice, &bob, trials, execution)?;
            let text = match format {
                Format::Json => report.to_json(),
                Format::Csv => report.to_csv(),
            };
            emit(common.out.as_ref(), &text)
        }
        Command::Sweep {
            common,
            trials,
            param,
            from,
            to,
            step,
        } => {
            if param != "theta" {
                return Err(Failure::Usage(format!(
                    "unsupported sweep parameter `{param}` (only `theta`)"
                )));
            }
            let bob = StrategySpec::parse(Party::Bob, &common.bob)?;
            let params = SweepParams {
                from,
                to,
                step,
                rounds: common.rounds as usize,
                trials,
                seed: common.seed,
            };
            let report = theta_sweep(&params, &bob, Execution::Parallel)?;
            emit(common.out.as_ref(), &report.to_csv())
        }
        Command::Oracle {
            max_rounds,
            seed,
            inject_perturbation,
            out,
        } => {
            let checks = run_suite(&OracleOptions {
                max_rounds,
                perturbation: inject_perturbation,
                seed,
            })?;
            let mut text = String::new();
            for c in &checks {
                text.push_str(&format!("{c}\n"));
            }
            let failed = checks.iter().filter(|c| !c.passed).count();
            text.push_str(&format!("{} checks, {} failed\n", checks.len(), failed));
            emit(out.as_ref(), &text)?;
            if failed > 0 {
                return Err(Failure::Check(format!("{failed} oracle checks failed")));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Check(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
