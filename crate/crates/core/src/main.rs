use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use hardylab::cli::{self, Case, VerifyArgs};
use hardylab::report::{write_reports, Format};
use hardylab::VerificationReport;

#[derive(Parser)]
#[command(name = "hardylab", version, about = "Sharp constants for Hardy inequalities with remainder terms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Jsonl,
    Csv,
}

impl From<OutputFormat> for Format {
    fn from(f: OutputFormat) -> Self {
        match f {
            OutputFormat::Jsonl => Format::Jsonl,
            OutputFormat::Csv => Format::Csv,
        }
    }
}

#[derive(clap::Args)]
struct Common {
    #[arg(long, default_value_t = 3)]
    dim: u32,
    /// Volume of the domain; defaults to the unit ball.
    #[arg(long)]
    volume: Option<f64>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "jsonl")]
    format: OutputFormat,
    #[arg(long)]
    output: Option<PathBuf>,
}

impl Common {
    fn verify_args(&self) -> VerifyArgs {
        VerifyArgs { dim: self.dim, volume: self.volume, p: self.p, grid: self.grid, tol: self.tol, seed: self.seed }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print every closed-form constant for the given domain.
    Constants {
        #[arg(long, default_value_t = 3)]
        dim: u32,
        #[arg(long)]
        volume: Option<f64>,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        q: Option<f64>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run verification cases.
    Verify {
        /// bv, hardy, prop_log, sobolev_disk, thm1, thm2, thm4, thm5 or all.
        #[arg(long, default_value = "all")]
        case: String,
        #[command(flatten)]
        common: Common,
    },
    /// Minimize one quotient and compare with its printed constants.
    Minimize {
        /// thm1, thm1_weighted, thm2, thm4, thm5 or bv.
        #[arg(long)]
        case: String,
        #[command(flatten)]
        common: Common,
    },
    /// Symmetrize a field sample read from a JSON file.
    Symmetrize {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 3)]
        dim: u32,
        #[arg(long, default_value_t = 1.0)]
        q: f64,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Where to write the full symmetrization result.
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "jsonl")]
        format: OutputFormat,
    },
}

enum Failure {
    Usage(String),
}

fn sink(path: &Option<PathBuf>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| Failure::Usage(format!("cannot create {}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn emit(reports: &[VerificationReport], format: OutputFormat, out: &mut dyn Write) -> Result<bool, Failure> {
    write_reports(out, reports, format.into()).map_err(|e| Failure::Usage(format!("write failed: {e}")))?;
    out.flush().map_err(|e| Failure::Usage(format!("write failed: {e}")))?;
    Ok(reports.iter().all(|r| r.pass))
}

fn run(cli: Cli) -> Result<bool, Failure> {
    let usage = |e: hardylab::Error| Failure::Usage(e.to_string());
    match cli.command {
        Command::Constants { dim, volume, p, q, output } => {
            let records = cli::constants_records(dim, volume, p, q).map_err(usage)?;
            let mut out = sink(&output)?;
            for r in records {
                let line = serde_json::to_string(&r).map_err(|e| Failure::Usage(e.to_string()))?;
                writeln!(out, "{line}").map_err(|e| Failure::Usage(format!("write failed: {e}")))?;
            }
            out.flush().map_err(|e| Failure::Usage(format!("write failed: {e}")))?;
            Ok(true)
        }
        Command::Verify { case, common } => {
            let cases = Case::parse(&case).map_err(usage)?;
            let reports = cli::verify_all(&cases, &common.verify_args()).map_err(usage)?;
            emit(&reports, common.format, &mut *sink(&common.output)?)
        }
        Command::Minimize { case, common } => {
            let report = cli::minimize(&case, &common.verify_args()).map_err(usage)?;
            emit(&[report], common.format, &mut *sink(&common.output)?)
        }
        Command::Symmetrize { input, dim, q, tol, output, format } => {
            let field = cli::read_field(&input).map_err(usage)?;
            let (result, report) = cli::symmetrize_field(&field, dim, q, tol).map_err(usage)?;
            if let Some(path) = &output {
                let text = serde_json::to_string(&result).map_err(|e| Failure::Usage(e.to_string()))?;
                std::fs::write(path, text + "\n")
                    .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))?;
            }
            emit(&[report], format, &mut *sink(&None)?)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Ok(threads) = std::env::var("HARDYLAB_THREADS") {
        match threads.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => {
                eprintln!("hardylab: HARDYLAB_THREADS must be a positive integer, got {threads:?}");
                return ExitCode::from(2);
            }
        }
    }
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("hardylab: {msg}");
            ExitCode::from(2)
        }
    }
}
