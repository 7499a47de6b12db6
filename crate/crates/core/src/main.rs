use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use eigenblocks::config::{load_config, WeightConfig};
use eigenblocks::enumeration::{
    enumerate, read_checkpoint, search, write_checkpoint, EnumerateOptions, Mode, SearchReport,
};
use eigenblocks::reports::{combine_orders, diff_search, diff_witness, expand_set, format_set, load_fixture, Mismatch};
use eigenblocks::witness::{witness_report_for, WitnessReport};

#[derive(Parser)]
#[command(name = "eigenblocks", version, about = "Block systems of torus eigenvalue forms and the element orders they allow")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Full,
    Hybrid,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a configuration and check its symmetry generators.
    Validate { config: String },
    /// Enumerate closed block systems up to symmetry.
    Enumerate {
        config: String,
        #[arg(long, value_enum, default_value = "full")]
        mode: ModeArg,
        /// Hybrid mode: store systems of at least this dimension.
        #[arg(long, default_value_t = 2)]
        threshold: usize,
        #[arg(long, env = "EIGENBLOCKS_JOBS", default_value_t = 0)]
        jobs: usize,
        /// Write the JSON report here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Hybrid mode: descend from only the first N seeds.
        #[arg(long)]
        limit_seeds: Option<usize>,
        /// Abort when the store grows past this many systems.
        #[arg(long)]
        max_stored: Option<usize>,
        /// Hybrid mode: write the stored systems here before descending.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        /// Hybrid mode: descend from a checkpoint instead of searching.
        #[arg(long, conflicts_with = "checkpoint")]
        resume: Option<PathBuf>,
    },
    /// Pool reports and classify orders 1..=max.
    Orders {
        #[arg(required = true)]
        reports: Vec<PathBuf>,
        #[arg(long)]
        max: Option<u64>,
        /// Orders already certified by witness searches, e.g. `24,36`.
        #[arg(long, value_delimiter = ',')]
        witnessed: Vec<u64>,
        /// Expected bad set; exit 1 if it differs.
        #[arg(long)]
        expect: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search for roots of every element class of a given order.
    Witness {
        config: String,
        #[arg(long)]
        order: u64,
        #[arg(long)]
        mult: u64,
        /// A search report for the same config, used for the exponent bound.
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long, env = "EIGENBLOCKS_JOBS", default_value_t = 0)]
        jobs: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare a report with a fixture (bundled config name or path).
    Diff {
        report: PathBuf,
        fixture: String,
        /// Further reports needed by the fixture's bad-order expectation.
        #[arg(long = "with")]
        with: Vec<PathBuf>,
    },
}

/// A failure reported on standard error as `error[kind]: message`.
struct Failure {
    kind: &'static str,
    message: String,
}

fn fail(kind: &'static str, e: impl ToString) -> Failure {
    Failure { kind, message: e.to_string() }
}

fn config(name: &str) -> Result<WeightConfig, Failure> {
    load_config(name).map_err(|e| fail("config", e))
}

fn read_text(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| fail("io", format!("{}: {e}", path.display())))
}

fn read_report(path: &Path) -> Result<SearchReport, Failure> {
    SearchReport::from_json(&read_text(path)?).map_err(|e| fail("report", format!("{}: {e}", path.display())))
}

fn write_json(path: &Path, json: &str) -> Result<(), Failure> {
    std::fs::write(path, format!("{json}\n")).map_err(|e| fail("io", format!("{}: {e}", path.display())))
}

fn print_mismatches(mismatches: &[Mismatch]) -> ExitCode {
    if mismatches.is_empty() {
        println!("match");
        return ExitCode::SUCCESS;
    }
    for m in mismatches {
        println!("mismatch: {m}");
    }
    ExitCode::from(1)
}

fn run(cli: Cli) -> Result<ExitCode, Failure> {
    match cli.command {
        Command::Validate { config: name } => {
            let c = config(&name)?;
            let diag = c.validate();
            if diag.valid {
                println!("{diag}");
                return Ok(ExitCode::SUCCESS);
            }
            for p in &diag.problems {
                eprintln!("error[config]: {}: {p}", diag.name);
            }
            Ok(ExitCode::from(2))
        }
        Command::Enumerate { config: name, mode, threshold, jobs, out, limit_seeds, max_stored, checkpoint, resume } => {
            let c = config(&name)?;
            let mode = match mode {
                ModeArg::Full => Mode::Full,
                ModeArg::Hybrid => Mode::Hybrid { threshold },
            };
            if matches!(mode, Mode::Full) && (checkpoint.is_some() || resume.is_some() || limit_seeds.is_some()) {
                return Err(fail("usage", "--checkpoint, --resume and --limit-seeds need --mode hybrid"));
            }
            let mut opts = EnumerateOptions { mode, jobs, limit_seeds, max_stored, ..Default::default() };
            let start = Instant::now();
            if let Some(path) = &resume {
                let file = File::open(path).map_err(|e| fail("io", format!("{}: {e}", path.display())))?;
                opts.resume = Some(read_checkpoint(BufReader::new(file)).map_err(|e| fail("checkpoint", e))?);
            } else if let Some(path) = &checkpoint {
                let stored = search(&c, &EnumerateOptions { limit_seeds: Some(0), ..opts.clone() })
                    .map_err(|e| fail("enumerate", e))?
                    .stored;
                let file = File::create(path).map_err(|e| fail("io", format!("{}: {e}", path.display())))?;
                let mut w = BufWriter::new(file);
                write_checkpoint(&mut w, &c.name, &stored)
                    .and_then(|_| w.flush())
                    .map_err(|e| fail("io", format!("{}: {e}", path.display())))?;
                eprintln!("checkpoint: {} systems written to {}", stored.len(), path.display());
                opts.resume = Some(stored);
            }
            let mut report = enumerate(&c, &opts).map_err(|e| fail("enumerate", e))?;
            report.timing.elapsed_seconds = start.elapsed().as_secs_f64();
            println!("{report}");
            if let Some(path) = out {
                write_json(&path, &report.to_json())?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Orders { reports, max, witnessed, expect, out } => {
            let reports = reports.iter().map(|p| read_report(p)).collect::<Result<Vec<_>, _>>()?;
            let witnessed: BTreeSet<u64> = witnessed.into_iter().collect();
            let summary = combine_orders(&reports, max, &witnessed);
            println!("{summary}");
            if let Some(path) = out {
                write_json(&path, &serde_json::to_string_pretty(&summary).map_err(|e| fail("io", e))?)?;
            }
            match expect {
                Some(text) => {
                    let expected = expand_set(&text).map_err(|e| fail("usage", e))?;
                    let actual = summary.bad_set();
                    if expected == actual {
                        Ok(ExitCode::SUCCESS)
                    } else {
                        println!("mismatch: bad_orders: expected {}, got {}", format_set(&expected), format_set(&actual));
                        Ok(ExitCode::from(1))
                    }
                }
                None => Ok(ExitCode::SUCCESS),
            }
        }
        Command::Witness { config: name, order, mult, report, jobs, out } => {
            let c = config(&name)?;
            let bound = match report {
                Some(path) => {
                    let r = read_report(&path)?;
                    r.exponents_scaled.iter().max().copied()
                }
                None => None,
            };
            let w = witness_report_for(&c, order, mult, bound, jobs).map_err(|e| fail("witness", e))?;
            println!("{w}");
            if let Some(path) = out {
                write_json(&path, &serde_json::to_string_pretty(&w).map_err(|e| fail("io", e))?)?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Diff { report, fixture, with } => {
            let fixture = load_fixture(&fixture).map_err(|e| fail("fixture", e))?;
            let text = read_text(&report)?;
            let mismatches = match SearchReport::from_json(&text) {
                Ok(r) => {
                    let others = with.iter().map(|p| read_report(p)).collect::<Result<Vec<_>, _>>()?;
                    diff_search(&r, &fixture, &others).map_err(|e| fail("fixture", e))?
                }
                Err(_) => {
                    let w: WitnessReport = serde_json::from_str(&text)
                        .map_err(|e| fail("report", format!("{}: {e}", report.display())))?;
                    diff_witness(&w, &fixture).map_err(|e| fail("fixture", e))?
                }
            };
            Ok(print_mismatches(&mismatches))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error[{}]: {}", f.kind, f.message);
            ExitCode::from(2)
        }
    }
}
