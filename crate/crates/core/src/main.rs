//! Command-line interface: capacity, lambda, find-code, sequence,
//! enumerate, and simulate verbs over JSON channel and code files.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use blockfind::real::DEFAULT_STEP_BUDGET;
use blockfind::{
    capacity_sequence, error_profile, find_code, find_code_ext, simulate, Budget, Channel,
    ChannelKind, CursorMode, EnumerationCursor, Error, ErrorProfile, Rational, SearchMode,
    SearchOptions,
};

#[derive(Parser)]
#[command(name = "blockfind", version, about = "Exact block-code construction for DMCs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Full,
    Pruned,
}

impl From<ModeArg> for SearchMode {
    fn from(mode: ModeArg) -> Self {
        match mode {
            ModeArg::Full => SearchMode::Full,
            ModeArg::Pruned => SearchMode::Pruned,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Certified capacity interval (two rational strings)
    Capacity {
        channel: PathBuf,
        #[arg(long, default_value_t = 20)]
        precision: u32,
        #[arg(long, default_value_t = DEFAULT_STEP_BUDGET)]
        step_budget: u64,
    },
    /// Per-message and maximum block error probability of a code
    Lambda {
        channel: PathBuf,
        code: PathBuf,
        /// Query precision for stream-mode channels
        #[arg(long, default_value_t = 20)]
        precision: u64,
        #[arg(long, default_value_t = DEFAULT_STEP_BUDGET)]
        step_budget: u64,
    },
    /// Search for a code with rate at least RATE and error below EPSILON
    FindCode {
        channel: PathBuf,
        #[arg(long)]
        rate: String,
        /// Rational tolerance, e.g. 1/5
        #[arg(long)]
        epsilon: Option<String>,
        /// Stream tolerance as an expression, e.g. "(rat 1/3)"
        #[arg(long)]
        epsilon_expr: Option<String>,
        #[arg(long, value_enum, default_value = "full")]
        mode: ModeArg,
        #[arg(long = "max-n", default_value_t = 16)]
        max_n: u32,
        #[arg(long, default_value_t = 0)]
        workers: usize,
        #[arg(long, default_value_t = DEFAULT_STEP_BUDGET)]
        step_budget: u64,
        #[arg(long, default_value_t = 1 << 26)]
        cell_limit: u64,
        #[arg(long, default_value_t = 1_000_000)]
        bit_limit: u64,
    },
    /// k-th element of a capacity-achieving code sequence
    Sequence {
        channel: PathBuf,
        #[arg(long)]
        k: u64,
        #[arg(long, value_enum, default_value = "full")]
        mode: ModeArg,
        #[arg(long = "max-n", default_value_t = 16)]
        max_n: u32,
        #[arg(long, default_value_t = 0)]
        workers: usize,
        #[arg(long, default_value_t = DEFAULT_STEP_BUDGET)]
        step_budget: u64,
    },
    /// List a code family in canonical order, one JSON object per line
    Enumerate {
        #[arg(value_name = "M")]
        input_size: u32,
        #[arg(value_name = "N")]
        output_size: u32,
        m: u64,
        n: u32,
        #[arg(long, value_enum, default_value = "full")]
        mode: ModeArg,
        #[arg(long)]
        limit: Option<u64>,
        #[arg(long, default_value_t = 1 << 26)]
        cell_limit: u64,
    },
    /// Monte Carlo transmission simulation with a fixed seed
    Simulate {
        channel: PathBuf,
        code: PathBuf,
        #[arg(long)]
        trials: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        workers: usize,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // exit 1 on every invalid invocation; help and version are not errors
            let ok = matches!(
                err.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            let _ = err.print();
            return ExitCode::from(if ok { 0 } else { 1 });
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(RunError::Library(err)) if err.is_resource_limit() => {
            let diagnostic = match &err {
                Error::BlocklengthExceeded {
                    max_blocklength,
                    candidates_examined,
                } => json!({
                    "error": err.to_string(),
                    "kind": "resource-limit",
                    "max_blocklength": max_blocklength,
                    "candidates_examined": candidates_examined,
                }),
                _ => json!({ "error": err.to_string(), "kind": "resource-limit" }),
            };
            println!("{diagnostic}");
            ExitCode::from(2)
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(1)
        }
    }
}

enum RunError {
    Library(Error),
    Other(String),
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Library(err) => write!(f, "{err}"),
            RunError::Other(message) => write!(f, "{message}"),
        }
    }
}

impl From<Error> for RunError {
    fn from(err: Error) -> Self {
        RunError::Library(err)
    }
}

fn read_file(path: &PathBuf) -> Result<String, RunError> {
    std::fs::read_to_string(path)
        .map_err(|e| RunError::Other(format!("{}: {e}", path.display())))
}

fn parse_rational(text: &str) -> Result<Rational, RunError> {
    Ok(text.parse::<Rational>()?)
}

fn run(command: Command) -> Result<(), RunError> {
    match command {
        Command::Capacity {
            channel,
            precision,
            step_budget,
        } => {
            let budget = Budget::new(step_budget);
            let channel = Channel::from_json(&read_file(&channel)?, &budget)?;
            let (lo, hi) = channel.capacity_interval(precision, &budget)?;
            println!(
                "{}",
                json!({ "lo": lo.to_string(), "hi": hi.to_string() })
            );
            Ok(())
        }
        Command::Lambda {
            channel,
            code,
            precision,
            step_budget,
        } => {
            let budget = Budget::new(step_budget);
            let channel = Channel::from_json(&read_file(&channel)?, &budget)?;
            let code = blockfind::BlockCode::from_json(&read_file(&code)?)?;
            let output = match error_profile(&code, &channel)? {
                ErrorProfile::Exact {
                    per_message,
                    lambda_max,
                } => json!({
                    "per_message": per_message.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
                    "lambda_max": lambda_max.to_string(),
                }),
                ErrorProfile::Stream {
                    per_message,
                    lambda_max,
                } => {
                    let approx = per_message
                        .iter()
                        .map(|s| s.query(precision, &budget).map(|q| q.to_string()))
                        .collect::<blockfind::Result<Vec<_>>>()?;
                    json!({
                        "per_message": approx,
                        "lambda_max": lambda_max.query(precision, &budget)?.to_string(),
                        "precision": precision,
                    })
                }
            };
            println!("{output}");
            Ok(())
        }
        Command::FindCode {
            channel,
            rate,
            epsilon,
            epsilon_expr,
            mode,
            max_n,
            workers,
            step_budget,
            cell_limit,
            bit_limit,
        } => {
            let budget = Budget::new(step_budget);
            let channel = Channel::from_json(&read_file(&channel)?, &budget)?;
            let rate = parse_rational(&rate)?;
            let opts = SearchOptions {
                mode: mode.into(),
                max_blocklength: max_n,
                cell_limit,
                bit_limit,
                step_budget,
                workers,
            };
            let report = match (epsilon, epsilon_expr) {
                (Some(text), None) => find_code(&channel, &rate, &parse_rational(&text)?, &opts)?,
                (None, Some(expr)) => {
                    let stream = blockfind::expr::parse_stream(&expr)?;
                    find_code_ext(&channel, &rate, &stream, &opts)?
                }
                _ => {
                    return Err(RunError::Other(
                        "pass exactly one of --epsilon or --epsilon-expr".into(),
                    ))
                }
            };
            println!("{}", serde_json::to_string(&report).expect("report is serializable"));
            Ok(())
        }
        Command::Sequence {
            channel,
            k,
            mode,
            max_n,
            workers,
            step_budget,
        } => {
            let budget = Budget::new(step_budget);
            let channel = Channel::from_json(&read_file(&channel)?, &budget)?;
            let opts = SearchOptions {
                mode: mode.into(),
                max_blocklength: max_n,
                workers,
                step_budget,
                ..SearchOptions::default()
            };
            let report = capacity_sequence(&channel, k, &opts)?;
            println!("{}", serde_json::to_string(&report).expect("report is serializable"));
            Ok(())
        }
        Command::Enumerate {
            input_size,
            output_size,
            m,
            n,
            mode,
            limit,
            cell_limit,
        } => {
            let cursor_mode = match SearchMode::from(mode) {
                SearchMode::Full => CursorMode::Full,
                SearchMode::Pruned => CursorMode::Pruned(ChannelKind::Hamming),
            };
            let cursor =
                EnumerationCursor::new(input_size, output_size, m, n, cursor_mode, cell_limit)?;
            let limit = limit.unwrap_or(u64::MAX);
            for code in cursor.take(limit as usize) {
                println!("{}", serde_json::to_string(&code).expect("code is serializable"));
            }
            Ok(())
        }
        Command::Simulate {
            channel,
            code,
            trials,
            seed,
            workers,
        } => {
            let budget = Budget::default();
            let channel = Channel::from_json(&read_file(&channel)?, &budget)?;
            let code = blockfind::BlockCode::from_json(&read_file(&code)?)?;
            let result = simulate(&code, &channel, trials, seed, workers)?;
            println!("{}", serde_json::to_string(&result).expect("result is serializable"));
            Ok(())
        }
    }
}
