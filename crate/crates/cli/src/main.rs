//! `modtap`: secrecy-rate tables, parameter sweeps, scheme optimization,
//! seeded simulations, and exact secrecy verification for modulo-additive
//! wiretap channels with noisy feedback.
//!
//! Exit codes: 0 success, 2 configuration/usage error, 3 verification
//! failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod commands;
mod output;
mod scenario;

use commands::{OptimizeArgs, RatesArgs, SimulateArgs, SweepArgs, VerifyArgs};
use modtap::DuplexMode;
use output::Format;
use scenario::ConfigError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e.to_string())
    }
}

/// Commands return the process exit code on success.
pub type CliResult = Result<u8, CliError>;

#[derive(Parser)]
#[command(
    name = "modtap",
    version,
    about = "Secrecy rates and feedback-scheme simulations for modulo-additive wiretap channels"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Full,
    Half,
}

impl From<ModeArg> for DuplexMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Full => DuplexMode::FullDuplex,
            ModeArg::Half => DuplexMode::HalfDuplex,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// One-channel rate summary: secrecy capacity, public-discussion
    /// bounds, full-duplex capacity, optimized half-duplex rate.
    Rates {
        /// Channel spec: `case:<id>,<eps>,<delta>` or a description file.
        #[arg(long)]
        channel: String,
        /// Output path (stdout when absent).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Rate table over a parameter grid; one row per grid point in
    /// lexicographic (epsilon, delta, mu, t) order.
    Sweep {
        #[arg(long)]
        channel: String,
        /// Epsilon axis: a number or `start:end:step`.
        #[arg(long)]
        eps: Option<String>,
        /// Delta axis: a number or `start:end:step`.
        #[arg(long)]
        delta: Option<String>,
        /// Mu axis (switches half-duplex columns to fixed-point evaluation).
        #[arg(long)]
        mu: Option<String>,
        /// t axis (switches half-duplex columns to fixed-point evaluation).
        #[arg(long)]
        t: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        /// Worker threads; the output is identical for any value.
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Maximize the half-duplex achievable rate over (mu, t).
    Optimize {
        #[arg(long)]
        channel: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Run the destination-key feedback scheme over seeded trials.
    Simulate {
        #[arg(long)]
        channel: String,
        #[arg(long, value_enum, default_value = "full")]
        mode: ModeArg,
        /// Block length.
        #[arg(long)]
        n: usize,
        /// Number of messages M (code rate log2(M)/n).
        #[arg(long)]
        messages: usize,
        /// Half-duplex feedback probability.
        #[arg(long, default_value_t = 0.5)]
        t: f64,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        /// Master seed; codebook/noise/key streams derive from it.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        codebook_seed: Option<u64>,
        #[arg(long)]
        noise_seed: Option<u64>,
        #[arg(long)]
        key_seed: Option<u64>,
        /// Force the feedback key to the zero symbol (disables encryption;
        /// for demonstrating leakage).
        #[arg(long)]
        zero_key: bool,
        /// Re-encode each slot with a zeroed feedback history and check the
        /// codeword is unchanged.
        #[arg(long)]
        probe_feedback: bool,
        /// Write the per-trial transcript dump to this path.
        #[arg(long)]
        transcripts: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Exact secrecy checks: uniformity lemma, key cancellation, and full
    /// enumeration of the wiretapper's information. Exit code 3 on failure.
    Verify {
        /// Largest block length to enumerate.
        #[arg(long, default_value_t = 6)]
        max_n: usize,
        /// Largest message count to enumerate.
        #[arg(long, default_value_t = 4)]
        max_messages: usize,
        /// Force a zero key to demonstrate that the checks catch leaks.
        #[arg(long)]
        sabotage_zero_key: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
}

fn run() -> CliResult {
    let cli = Cli::parse();
    match cli.command {
        Command::Rates {
            channel,
            out,
            format,
        } => commands::cmd_rates(&RatesArgs {
            channel,
            out,
            format,
        }),
        Command::Sweep {
            channel,
            eps,
            delta,
            mu,
            t,
            out,
            format,
            workers,
        } => commands::cmd_sweep(&SweepArgs {
            channel,
            eps,
            delta,
            mu,
            t,
            out,
            format,
            workers,
        }),
        Command::Optimize {
            channel,
            out,
            format,
        } => commands::cmd_optimize(&OptimizeArgs {
            channel,
            out,
            format,
        }),
        Command::Simulate {
            channel,
            mode,
            n,
            messages,
            t,
            trials,
            seed,
            codebook_seed,
            noise_seed,
            key_seed,
            zero_key,
            probe_feedback,
            transcripts,
            out,
            format,
            workers,
        } => commands::cmd_simulate(&SimulateArgs {
            channel,
            mode: mode.into(),
            n,
            messages,
            t,
            trials,
            seed,
            codebook_seed,
            noise_seed,
            key_seed,
            zero_key,
            probe_feedback,
            transcripts,
            out,
            format,
            workers,
        }),
        Command::Verify {
            max_n,
            max_messages,
            sabotage_zero_key,
            out,
            format,
        } => commands::cmd_verify(&VerifyArgs {
            max_n,
            max_messages,
            sabotage_zero_key,
            out,
            format,
        }),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
