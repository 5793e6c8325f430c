//! Command-line harness for the mixed maximally entangled state toolkit.
//!
//! [`dispatch`] parses an argument list, runs one subcommand and returns the
//! exit code together with the text destined for stdout and stderr. Exit
//! codes: 0 success, 1 a verdict failed (or no perfect LOCC setting exists),
//! 2 invalid input.

mod commands;
pub mod report;
pub mod statefile;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use report::{RunReport, Verdict};
pub use statefile::{LoadedState, StateFile, StateFileError, StateKind};

/// Environment variable holding the default seed.
pub const SEED_ENV: &str = "MMES_LAB_SEED";

#[derive(Debug, Parser)]
#[command(
    name = "mmes-lab",
    version,
    about = "Mixed maximally entangled state toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// RNG seed; defaults to $MMES_LAB_SEED, then 0
    #[arg(long)]
    seed: Option<u64>,
    /// Emit the report as JSON
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Side {
    A,
    B,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the invariant suite
    Verify {
        #[arg(long, value_delimiter = ',', default_values_t = vec![2usize, 3, 5])]
        d: Vec<usize>,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[command(flatten)]
        common: Common,
        /// Wire in the channel with the uncorrected 1/2 coefficients
        #[arg(long, hide = true)]
        use_literal_kraus: bool,
    },
    /// Certify a state file
    MmesCheck {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        small_side: Side,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Teleport through the mixed resource
    #[command(group(clap::ArgGroup::new("source").required(true).args(["state", "random"])))]
    Teleport {
        #[arg(long)]
        d: usize,
        /// Pure input state file of total dimension d
        #[arg(long)]
        state: Option<PathBuf>,
        /// Draw a Haar-random input
        #[arg(long)]
        random: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Evolve the 2x4 family and the 4x4 maximally entangled state through the channel
    ChannelDemo {
        #[arg(long, default_value_t = 0.25)]
        p: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Discriminate a subset of the mixtures chi_st by LOCC
    Locc {
        #[arg(long)]
        d: usize,
        /// Candidates as "s,t;s,t;..."
        #[arg(long)]
        subset: String,
        /// Sampled rounds per candidate
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Fully entangled fraction of a square state
    Fef {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 32)]
        restarts: usize,
        #[arg(long, default_value_t = 1000)]
        max_iter: usize,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Ground state of the spin-1/2 x spin-3/2 XXZ coupling
    Xxz {
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        j: f64,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        delta: f64,
        #[command(flatten)]
        common: Common,
    },
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dispatched {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Dispatched {
    fn usage_error(msg: impl Into<String>) -> Self {
        Self {
            code: 2,
            stdout: String::new(),
            stderr: msg.into(),
        }
    }
}

/// Failure before a report could be produced.
pub(crate) struct InputError(pub String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

fn resolve_seed(flag: Option<u64>) -> Result<u64, String> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| format!("{SEED_ENV}={v:?} is not an unsigned 64-bit integer")),
        Err(_) => Ok(0),
    }
}

/// Parses `argv` (including the program name) and runs the subcommand.
pub fn dispatch<I, T>(argv: I) -> Dispatched
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Dispatched {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                Dispatched::usage_error(text)
            };
        }
    };
    let common = match &cli.command {
        Command::Verify { common, .. }
        | Command::MmesCheck { common, .. }
        | Command::Teleport { common, .. }
        | Command::ChannelDemo { common, .. }
        | Command::Locc { common, .. }
        | Command::Fef { common, .. }
        | Command::Xxz { common, .. } => common,
    };
    let seed = match resolve_seed(common.seed) {
        Ok(s) => s,
        Err(e) => return Dispatched::usage_error(format!("error: {e}\n")),
    };
    let json = common.json;

    let result = match &cli.command {
        Command::Verify {
            d,
            tol,
            use_literal_kraus,
            ..
        } => commands::verify(d, *tol, seed, *use_literal_kraus),
        Command::MmesCheck {
            input,
            small_side,
            tol,
            ..
        } => {
            let side = match small_side {
                Side::A => mmes_core::qmat::Subsystem::A,
                Side::B => mmes_core::qmat::Subsystem::B,
            };
            commands::mmes_check(input, side, *tol, seed)
        }
        Command::Teleport { d, state, .. } => commands::teleport(*d, state.as_deref(), seed),
        Command::ChannelDemo { p, .. } => commands::channel_demo(*p, seed),
        Command::Locc {
            d, subset, trials, ..
        } => commands::locc(*d, subset, *trials, seed),
        Command::Fef {
            input,
            restarts,
            max_iter,
            tol,
            ..
        } => commands::fef(input, *restarts, *max_iter, *tol, seed),
        Command::Xxz { j, delta, .. } => commands::xxz(*j, *delta, seed),
    };
    match result {
        Ok(report) => Dispatched {
            code: if report.passed() { 0 } else { 1 },
            stdout: if json {
                report.to_json() + "\n"
            } else {
                report.to_text()
            },
            stderr: String::new(),
        },
        Err(InputError(msg)) => Dispatched::usage_error(format!("error: {msg}\n")),
    }
}
