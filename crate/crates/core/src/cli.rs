//! The `bfly` command line.
//!
//! Every subcommand prints one JSON object (or `key<TAB>value` lines with
//! `--format tsv`) to stdout or `--output`. Exit status: 0 on success, 1 on
//! I/O failure, 2 on parse or configuration errors, 3 on counter overflow.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::approx;
use crate::edge::count_per_edge_evpp;
use crate::error::{Error, Result};
use crate::exact::{self, Algorithm};
use crate::extmem::{em_count, EmConfig};
use crate::gen;
use crate::graph::{BipartiteGraph, ParseOptions};
use crate::parallel::{count_parallel, ScheduleConfig, ScheduleMode, Strategy};

#[derive(Debug, Parser)]
#[command(
    name = "bfly",
    version,
    about = "Butterfly counting on bipartite graphs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Count butterflies with one exact engine.
    Count {
        #[command(flatten)]
        io: IoArgs,
        #[arg(long, value_enum, default_value_t = AlgoArg::Vpp)]
        algo: AlgoArg,
    },
    /// Per-edge butterfly counts (TSV: upper, lower, count).
    Edges {
        #[command(flatten)]
        io: IoArgs,
    },
    /// Butterflies, caterpillars and the bipartite clustering coefficient.
    Stats {
        #[command(flatten)]
        io: IoArgs,
    },
    /// Multi-threaded exact count with per-thread reports.
    Parallel {
        #[command(flatten)]
        io: IoArgs,
        #[arg(long, default_value_t = 1)]
        threads: usize,
        #[arg(long, value_enum, default_value_t = ModeArg::Dynamic)]
        schedule: ModeArg,
        #[arg(long, value_enum, default_value_t = StrategyArg::Priority)]
        strategy: StrategyArg,
        /// Seed for the random strategy.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Out-of-core count under a memory budget.
    Em {
        #[command(flatten)]
        io: IoArgs,
        /// Memory budget; accepts K/M/G suffixes (powers of 1024).
        #[arg(long, default_value = "64M", value_parser = parse_size)]
        memory_budget: usize,
        /// Block size; at least 4K.
        #[arg(long, default_value = "64K", value_parser = parse_size)]
        block_size: usize,
        /// Leave scratch files in place.
        #[arg(long)]
        keep_scratch: bool,
        /// Directory for scratch files (default: system temp dir).
        #[arg(long)]
        scratch_dir: Option<PathBuf>,
    },
    /// Sparsification estimate: each edge kept with probability p.
    Approx {
        #[command(flatten)]
        io: IoArgs,
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        #[arg(long, default_value_t = 1)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also compute the exact count and the relative error.
        #[arg(long)]
        exact: bool,
    },
    /// Write a synthetic graph as an edge list.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
        /// Destination file (default: stdout).
        #[arg(long, short, global = true)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct IoArgs {
    /// Edge-list file: one "upper lower" pair per line, '%' or '#' comments.
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Destination file (default: stdout).
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum GenKind {
    /// Two upper hubs over a lower vertices, two lower hubs over b upper vertices.
    Hub {
        #[arg(long, default_value_t = 1000)]
        a: usize,
        #[arg(long, default_value_t = 1000)]
        b: usize,
    },
    /// An upper hub and a lower hub of degree a joined by a matching.
    HubPath {
        #[arg(long, default_value_t = 1000)]
        a: usize,
    },
    /// Complete bipartite graph.
    Complete {
        #[arg(long)]
        r: usize,
        #[arg(long)]
        l: usize,
    },
    /// Each of the r·l pairs present with probability p.
    Random {
        #[arg(long)]
        r: usize,
        #[arg(long)]
        l: usize,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Tsv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum AlgoArg {
    Ibs,
    Vp,
    Vpp,
}

impl From<AlgoArg> for Algorithm {
    fn from(a: AlgoArg) -> Self {
        match a {
            AlgoArg::Ibs => Algorithm::Ibs,
            AlgoArg::Vp => Algorithm::Vp,
            AlgoArg::Vpp => Algorithm::Vpp,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Dynamic,
    Static,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Priority,
    Random,
    Heuristic,
}

/// Parses byte sizes such as `4096`, `64K`, `4MiB` or `1G`.
pub fn parse_size(s: &str) -> std::result::Result<usize, String> {
    let t = s.trim();
    let split = t.find(|c: char| !c.is_ascii_digit()).unwrap_or(t.len());
    let (digits, unit) = t.split_at(split);
    let base: usize = digits.parse().map_err(|_| format!("invalid size '{s}'"))?;
    let shift = match unit.trim().to_ascii_lowercase().as_str() {
        "" | "b" => 0,
        "k" | "kb" | "kib" => 10,
        "m" | "mb" | "mib" => 20,
        "g" | "gb" | "gib" => 30,
        _ => return Err(format!("unknown size unit in '{s}'")),
    };
    base.checked_mul(1 << shift)
        .ok_or_else(|| format!("size '{s}' too large"))
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Io(_) => 1,
        Error::Parse { .. } | Error::Config(_) | Error::GuardExceeded { .. } => 2,
        Error::Overflow => 3,
        Error::Inconsistent(_) => 1,
    }
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn load(path: &Path) -> Result<BipartiteGraph> {
    let file = File::open(path)?;
    BipartiteGraph::parse_edge_list(BufReader::new(file), &ParseOptions::default())
}

fn emit(io: &IoArgs, value: &impl Serialize) -> Result<()> {
    let value = serde_json::to_value(value).map_err(|e| Error::Inconsistent(e.to_string()))?;
    let mut out = open_output(io.output.as_deref())?;
    match io.format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, &value).map_err(io::Error::from)?;
            writeln!(out)?;
        }
        Format::Tsv => write_tsv(&mut out, "", &value)?,
    }
    out.flush()?;
    Ok(())
}

/// Flattens a JSON object into `dotted.key<TAB>value` lines; arrays use
/// their index as a key segment.
fn write_tsv(out: &mut dyn Write, prefix: &str, value: &Value) -> io::Result<()> {
    let join = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                write_tsv(out, &join(k), v)?;
            }
        }
        Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                write_tsv(out, &join(&i.to_string()), v)?;
            }
        }
        Value::String(s) => writeln!(out, "{prefix}\t{s}")?,
        other => writeln!(out, "{prefix}\t{other}")?,
    }
    Ok(())
}

pub fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Count { io, algo } => {
            let g = load(&io.input)?;
            let algo = Algorithm::from(algo);
            let report = exact::count(&g, algo)?;
            let mut value = json!({ "algorithm": algo });
            merge(&mut value, &report);
            emit(&io, &value)
        }
        Command::Edges { io } => {
            let g = load(&io.input)?;
            let (rg, _) = exact::prepare_vpp(&g);
            let counts = count_per_edge_evpp(&rg)?;
            match io.format {
                Format::Tsv => {
                    let mut out = open_output(io.output.as_deref())?;
                    counts.write_tsv(&g, &mut out)?;
                    out.flush()?;
                    Ok(())
                }
                Format::Json => {
                    let edges: Vec<Value> = counts
                        .counts
                        .iter()
                        .zip(g.edges())
                        .map(|(&c, &(u, v))| json!({ "upper": g.label(u), "lower": g.label(v), "count": c }))
                        .collect();
                    emit(
                        &io,
                        &json!({ "butterflies": counts.butterflies, "edges": edges }),
                    )
                }
            }
        }
        Command::Stats { io } => {
            let g = load(&io.input)?;
            emit(&io, &exact::stats(&g)?)
        }
        Command::Parallel {
            io,
            threads,
            schedule,
            strategy,
            seed,
        } => {
            let cfg = ScheduleConfig {
                mode: match schedule {
                    ModeArg::Dynamic => ScheduleMode::Dynamic,
                    ModeArg::Static => ScheduleMode::Static,
                },
                strategy: match strategy {
                    StrategyArg::Priority => Strategy::Priority,
                    StrategyArg::Random => Strategy::Random,
                    StrategyArg::Heuristic => Strategy::Heuristic,
                },
                threads,
                seed,
            };
            cfg.validate()?;
            let g = load(&io.input)?;
            let (rg, _) = exact::prepare_vpp(&g);
            emit(&io, &count_parallel(&rg, &cfg)?)
        }
        Command::Em {
            io,
            memory_budget,
            block_size,
            keep_scratch,
            scratch_dir,
        } => {
            let cfg = EmConfig {
                memory_budget,
                block_size,
                keep_scratch,
                ..EmConfig::new(scratch_dir.unwrap_or_else(std::env::temp_dir))
            };
            cfg.validate()?;
            emit(&io, &em_count(&io.input, &cfg)?)
        }
        Command::Approx {
            io,
            p,
            trials,
            seed,
            exact,
        } => {
            let g = load(&io.input)?;
            let set = approx::run_trials(&g, p, trials, seed)?;
            let exact = if exact || p == 1.0 {
                Some(exact::count(&g, Algorithm::Vpp)?.butterflies)
            } else {
                None
            };
            let mut value = serde_json::to_value(set.summary(exact)).expect("plain data");
            value["seed"] = json!(seed);
            value["estimates"] = json!(set.estimates);
            emit(&io, &value)
        }
        Command::Gen { kind, output } => {
            let g = match kind {
                GenKind::Hub { a, b } => gen::hub(a, b),
                GenKind::HubPath { a } => gen::hub_path(a),
                GenKind::Complete { r, l } => gen::complete(r, l),
                GenKind::Random { r, l, p, seed } => {
                    if !(0.0..=1.0).contains(&p) {
                        return Err(Error::config(format!(
                            "edge probability {p} outside [0, 1]"
                        )));
                    }
                    gen::random(r, l, p, seed)
                }
            };
            let mut out = open_output(output.as_deref())?;
            g.write_edge_list(&mut out)?;
            out.flush()?;
            Ok(())
        }
    }
}

fn merge(target: &mut Value, extra: &impl Serialize) {
    if let (Value::Object(t), Ok(Value::Object(e))) = (target, serde_json::to_value(extra)) {
        t.extend(e);
    }
}
