use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use sealbid_core::harness::bench::{parse_ops, DEFAULT_ITERATIONS};
use sealbid_core::harness::{run_benchmark, run_scenario, verify_trace, BenchOp, Scenario};
use sealbid_core::ledger::{read_trace, write_trace, TraceRecord};

#[derive(Parser)]
#[command(name = "sealbid", version, about = "Sealed-bid storage auctions on a simulated ledger")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file and sweep every invariant
    Run {
        scenario: PathBuf,
        /// Write the ledger trace here
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Time procedures and checkers per operation
    Bench {
        #[arg(long, default_value_t = DEFAULT_ITERATIONS)]
        iterations: usize,
        /// Comma-separated subset of create,commit,reveal,withdraw,submit_work
        #[arg(long)]
        ops: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Both)]
        format: Format,
    },
    /// Run the built-in three-bidder auction
    Demo {
        /// Write the ledger trace here
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Replay a trace and re-check every record and invariant
    VerifyTrace { trace: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Table,
    Csv,
    Both,
}

enum Failure {
    /// Unreadable input or a bad configuration.
    Config(String),
    /// The run or trace broke an invariant.
    Violation(String),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { scenario, trace } => Scenario::load(&scenario)
            .map_err(|e| Failure::Config(format!("{}: {e}", scenario.display())))
            .and_then(|s| run(&s, trace.as_deref())),
        Command::Demo { trace } => run(&Scenario::demo(), trace.as_deref()),
        Command::Bench {
            iterations,
            ops,
            format,
        } => bench(iterations, ops.as_deref(), format),
        Command::VerifyTrace { trace } => verify(&trace),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Violation(reason)) => {
            eprintln!("error: {reason}");
            ExitCode::from(1)
        }
        Err(Failure::Config(reason)) => {
            eprintln!("error: {reason}");
            ExitCode::from(2)
        }
    }
}

fn run(scenario: &Scenario, trace: Option<&Path>) -> Result<(), Failure> {
    let run = run_scenario(scenario).map_err(|e| Failure::Config(e.to_string()))?;
    println!("{}", run.report);
    if let Some(path) = trace {
        save_trace(run.trace(), path)?;
        println!("trace written to {}", path.display());
    }
    match run.report.violations.first() {
        None => Ok(()),
        Some(v) => Err(Failure::Violation(format!(
            "{} invariant violation(s), first: {v}",
            run.report.violations.len()
        ))),
    }
}

fn save_trace(records: &[TraceRecord], path: &Path) -> Result<(), Failure> {
    let io_err = |e: io::Error| Failure::Config(format!("cannot write {}: {e}", path.display()));
    let mut out = BufWriter::new(File::create(path).map_err(io_err)?);
    write_trace(records, &mut out).map_err(io_err)?;
    out.flush().map_err(io_err)
}

fn bench(iterations: usize, ops: Option<&str>, format: Format) -> Result<(), Failure> {
    let ops = match ops {
        Some(list) => parse_ops(list).map_err(|e| Failure::Config(format!("--ops: {e}")))?,
        None => BenchOp::ALL.to_vec(),
    };
    if ops.is_empty() {
        return Err(Failure::Config("--ops: no operation selected".into()));
    }
    let report = run_benchmark(&ops, iterations).map_err(|e| Failure::Config(format!("--{e}")))?;
    if matches!(format, Format::Table | Format::Both) {
        print!("{}", report.to_table());
    }
    if matches!(format, Format::Both) {
        println!();
    }
    if matches!(format, Format::Csv | Format::Both) {
        print!("{}", report.to_csv());
    }
    Ok(())
}

fn verify(path: &Path) -> Result<(), Failure> {
    let file = File::open(path)
        .map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
    let records = read_trace(BufReader::new(file))
        .map_err(|e| Failure::Violation(format!("{}: {e}", path.display())))?;
    let summary = verify_trace(&records)
        .map_err(|e| Failure::Violation(format!("{}: {e}", path.display())))?;
    println!(
        "trace ok: {} blocks, {} applied, {} rejected",
        summary.blocks, summary.applied, summary.rejected
    );
    println!("final state digest {}", summary.final_digest);
    Ok(())
}
