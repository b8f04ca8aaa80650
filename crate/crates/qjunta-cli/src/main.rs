use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qjunta::learning::TomographyBackend;
use qjunta_cli::{
    cmd_bench, cmd_gen, cmd_learn, cmd_test, cmd_verify, BenchArgs, CliError, GenArgs, LearnArgs,
    TestArgs, VerifyArgs,
};

#[derive(Parser)]
#[command(
    name = "qjunta",
    version,
    about = "Generate, test, learn, and verify unitaries that act on few qubits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Base RNG seed; the QJUNTA_SEED environment variable overrides it.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also write the command's primary artifact to this path
    /// (gen: the instance, bench: the table, otherwise the report).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Exact,
    Measurement,
}

impl From<BackendArg> for TomographyBackend {
    fn from(b: BackendArg) -> TomographyBackend {
        match b {
            BackendArg::Exact => TomographyBackend::Exact,
            BackendArg::Measurement => TomographyBackend::Measurement,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an instance file.
    Gen {
        #[command(flatten)]
        common: Common,
        /// Instance kind: junta, boolean, or dense.
        #[arg(long)]
        kind: String,
        /// Boolean family: parity-<m> or random.
        #[arg(long)]
        family: Option<String>,
        /// Total qubit (or bit) count.
        #[arg(long)]
        n: usize,
        /// Junta size (kind junta only).
        #[arg(long)]
        k: Option<usize>,
    },
    /// Run the junta tester repeatedly against an instance file.
    Test {
        #[command(flatten)]
        common: Common,
        /// Instance JSON path.
        #[arg(long)]
        instance: PathBuf,
        /// Junta size to test against.
        #[arg(long)]
        k: usize,
        /// Distance parameter in (0, 1].
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 100)]
        trials: u64,
    },
    /// Learn a junta hypothesis and report exact distances.
    Learn {
        #[command(flatten)]
        common: Common,
        /// Instance JSON path (must satisfy the k-junta promise).
        #[arg(long)]
        instance: PathBuf,
        /// Promised junta size.
        #[arg(long)]
        k: usize,
        /// Target distance in (0, 1].
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 10)]
        trials: u64,
        /// Tomography backend.
        #[arg(long, value_enum, default_value_t = BackendArg::Exact)]
        backend: BackendArg,
        /// Write the first successful hypothesis as an instance file.
        #[arg(long)]
        learned_out: Option<PathBuf>,
    },
    /// Run an invariant suite and report pass/fail per check.
    Verify {
        #[command(flatten)]
        common: Common,
        /// core, lower-bound, calibration, or all.
        #[arg(long, default_value = "all")]
        suite: String,
    },
    /// Tabulate query counts against k.
    Bench {
        #[command(flatten)]
        common: Common,
        /// Comma-separated k values.
        #[arg(long, value_delimiter = ',')]
        k: Vec<usize>,
        #[arg(long, default_value_t = 0.5)]
        eps: f64,
        #[arg(long, default_value_t = 5)]
        trials: u64,
        /// tester, learner, or both.
        #[arg(long, default_value = "both")]
        algo: String,
        #[arg(long, value_enum, default_value_t = FormatArg::Json)]
        format: FormatArg,
    },
}

fn effective_seed(flag: u64) -> Result<u64, CliError> {
    match std::env::var("QJUNTA_SEED") {
        Ok(text) => text
            .parse()
            .map_err(|_| CliError::InvalidArgument(format!("QJUNTA_SEED is not a u64: {text:?}"))),
        Err(_) => Ok(flag),
    }
}

fn write_artifact(path: &PathBuf, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn run() -> Result<i32, CliError> {
    let cli = Cli::parse();
    let started = Instant::now();
    match cli.command {
        Command::Gen {
            common,
            kind,
            family,
            n,
            k,
        } => {
            let mut report = cmd_gen(&GenArgs {
                kind,
                family,
                n,
                k,
                seed: effective_seed(common.seed)?,
                out: common.out,
            })?;
            report.wall_time_ms = started.elapsed().as_millis() as u64;
            print!("{}", report.to_json());
            Ok(0)
        }
        Command::Test {
            common,
            instance,
            k,
            eps,
            trials,
        } => {
            let mut report = cmd_test(&TestArgs {
                instance,
                k,
                eps,
                trials,
                seed: effective_seed(common.seed)?,
            })?;
            report.wall_time_ms = started.elapsed().as_millis() as u64;
            if let Some(path) = &common.out {
                write_artifact(path, &report.to_json())?;
            }
            print!("{}", report.to_json());
            Ok(0)
        }
        Command::Learn {
            common,
            instance,
            k,
            eps,
            trials,
            backend,
            learned_out,
        } => {
            let mut report = cmd_learn(&LearnArgs {
                instance,
                k,
                eps,
                trials,
                seed: effective_seed(common.seed)?,
                backend: backend.into(),
                learned_out,
            })?;
            report.wall_time_ms = started.elapsed().as_millis() as u64;
            if let Some(path) = &common.out {
                write_artifact(path, &report.to_json())?;
            }
            print!("{}", report.to_json());
            Ok(0)
        }
        Command::Verify { common, suite } => {
            let mut report = cmd_verify(&VerifyArgs {
                suite,
                seed: effective_seed(common.seed)?,
            })?;
            report.wall_time_ms = started.elapsed().as_millis() as u64;
            if let Some(path) = &common.out {
                write_artifact(path, &report.to_json())?;
            }
            print!("{}", report.to_json());
            let failed = report.results["failed"].as_u64().unwrap_or(0);
            if failed > 0 {
                eprintln!(
                    "{}",
                    serde_json::json!({
                        "error": { "kind": "verify-failed", "message": format!("{failed} checks failed") }
                    })
                );
                return Ok(1);
            }
            Ok(0)
        }
        Command::Bench {
            common,
            k,
            eps,
            trials,
            algo,
            format,
        } => {
            let mut report = cmd_bench(&BenchArgs {
                k_list: k,
                eps,
                trials,
                seed: effective_seed(common.seed)?,
                algo,
            })?;
            report.wall_time_ms = started.elapsed().as_millis() as u64;
            let rendered = match format {
                FormatArg::Json => report.to_json(),
                FormatArg::Csv => report.results["csv"]
                    .as_str()
                    .expect("bench reports embed their table")
                    .to_string(),
            };
            if let Some(path) = &common.out {
                write_artifact(path, &rendered)?;
            }
            print!("{rendered}");
            Ok(0)
        }
    }
}

fn main() {
    match run() {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("{}", e.to_json());
            std::process::exit(1);
        }
    }
}
