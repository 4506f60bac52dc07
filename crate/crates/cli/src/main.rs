use std::fs;
use std::io::Write;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, CommandFactory, Parser, Subcommand};
use cwac_core::bounds::{BoundsEngine, DEFAULT_BUDGET};
use cwac_core::channel::{simulate_records, summarize, ChannelSpec, Placement};
use cwac_core::codec::stream::{decode_stream, encode_stream, EncodedStream};
use cwac_core::codec::{plan_params, CodeDescription, ConcatenatedCode};
use cwac_core::oracle::{exact_gamma, exact_max_anticode, exact_max_code, DEFAULT_CAP};
use cwac_core::words::CodeParams;
use cwac_core::{selftest, Error};
use rayon::prelude::*;
use serde_json::{json, Value};

/// Bounds, exact search and concatenated codes for constant-weight array codes.
///
/// Distances of binary constant-weight objects are half Hamming distances.
#[derive(Parser)]
#[command(name = "cwac", version)]
struct Cli {
    /// Worker threads for parallel work; output does not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct ParamArgs {
    /// Column length.
    #[arg(long)]
    m: u64,
    /// Number of columns.
    #[arg(long)]
    n: u64,
    /// Column weight.
    #[arg(long)]
    w: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Best known interval for A(m,n,w,d) with its provenance.
    Bound {
        #[command(flatten)]
        p: ParamArgs,
        /// Half minimum distance.
        #[arg(long)]
        d: u64,
        /// Recursion budget of the engine.
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        depth: u32,
        /// Print the full report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// CSV of intervals over inclusive ranges such as `2..8`.
    Table {
        #[arg(long, value_parser = parse_range)]
        m: RangeInclusive<u64>,
        #[arg(long, value_parser = parse_range)]
        n: RangeInclusive<u64>,
        #[arg(long, value_parser = parse_range)]
        w: RangeInclusive<u64>,
        #[arg(long, value_parser = parse_range)]
        d: RangeInclusive<u64>,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        depth: u32,
        /// Output file; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact maximum code or anticode by exhaustive search.
    Oracle {
        #[command(flatten)]
        p: ParamArgs,
        /// Half minimum distance (codes).
        #[arg(long, required_unless_present = "anticode")]
        d: Option<u64>,
        /// Search for an anticode instead of a code.
        #[arg(long, requires = "delta")]
        anticode: bool,
        /// Half diameter (anticodes).
        #[arg(long)]
        delta: Option<u64>,
        /// Largest universe the search accepts.
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u64,
    },
    /// Exact largest anticode of Hamming diameter `delta` in [q]^n.
    OracleGamma {
        #[arg(long)]
        q: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        delta: usize,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u64,
    },
    /// Build a concatenated code and write its description.
    Construct {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        w: usize,
        /// Half distance of the inner code.
        #[arg(long)]
        f: usize,
        /// Outer length.
        #[arg(long)]
        n: usize,
        /// Outer dimension.
        #[arg(long)]
        k: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Encode a file of raw bytes into a block stream.
    Encode {
        #[arg(long)]
        code: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Decode a block stream back to raw bytes.
    Decode {
        #[arg(long)]
        code: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Monte-Carlo decoding over the packet loss/injection channel.
    Simulate {
        #[arg(long)]
        code: PathBuf,
        #[arg(long, default_value_t = 0)]
        losses: usize,
        #[arg(long, default_value_t = 0)]
        injections: usize,
        #[arg(long)]
        trials: u64,
        #[arg(long)]
        seed: u64,
        /// `uniform` or `per-column-capped`.
        #[arg(long, default_value = "uniform")]
        policy: Placement,
        /// Also write one CSV row per trial.
        #[arg(long)]
        records: Option<PathBuf>,
    },
    /// Run the built-in acceptance checks.
    Selftest {
        #[arg(long)]
        json: bool,
    },
    /// Print the manual page (roff).
    Man,
}

fn parse_range(s: &str) -> Result<RangeInclusive<u64>, String> {
    let num = |t: &str| t.trim().parse::<u64>().map_err(|e| format!("{t:?}: {e}"));
    match s.split_once("..") {
        Some((a, b)) => {
            let (a, b) = (num(a)?, num(b.trim_start_matches('='))?);
            if a > b {
                return Err(format!("empty range {s}"));
            }
            Ok(a..=b)
        }
        None => num(s).map(|v| v..=v),
    }
}

enum Failure {
    Core(Error),
    Decode(String),
    Selftest,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Core(e.into())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Core(e.into())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Core(Error::Param(format!("csv: {e}")))
    }
}

fn exit_code(f: &Failure) -> u8 {
    match f {
        Failure::Core(Error::CapExceeded { .. }) => 4,
        Failure::Core(Error::Decode(_)) | Failure::Decode(_) => 3,
        Failure::Core(_) => 2,
        Failure::Selftest => 1,
    }
}

fn print_json(v: &Value) -> Result<(), Failure> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, v)?;
    writeln!(out)?;
    Ok(())
}

fn params(p: ParamArgs, d: u64) -> Result<CodeParams, Failure> {
    Ok(CodeParams::new(p.m, p.n, p.w, d)?)
}

fn load_code(path: &Path) -> Result<ConcatenatedCode, Failure> {
    let desc: CodeDescription = serde_json::from_slice(&fs::read(path)?)?;
    Ok(ConcatenatedCode::from_description(&desc)?)
}

fn witness_json(words: impl IntoIterator<Item = Vec<String>>) -> Value {
    Value::Array(words.into_iter().map(|w| json!(w)).collect())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Bound { p, d, depth, json } => {
            let p = params(p, d)?;
            let r = BoundsEngine::new().best_bounds(p, depth);
            if json {
                print_json(&r.to_json())?;
            } else {
                println!(
                    "A{p} in [{}, {}]  lower: {}  upper: {}",
                    r.lower_value(),
                    r.upper_value(),
                    r.lower.rule().name(),
                    r.upper.rule().name()
                );
            }
        }
        Command::Table { m, n, w, d, depth, out } => {
            let mut rows = Vec::new();
            for m in m.clone() {
                for n in n.clone() {
                    for w in w.clone() {
                        for d in d.clone() {
                            if let Ok(p) = CodeParams::new(m, n, w, d) {
                                rows.push(p);
                            }
                        }
                    }
                }
            }
            let engine = BoundsEngine::new();
            let reports: Vec<_> = rows.par_iter().map(|&p| engine.best_bounds(p, depth)).collect();
            let sink: Box<dyn Write> = match &out {
                Some(path) => Box::new(fs::File::create(path)?),
                None => Box::new(std::io::stdout().lock()),
            };
            let mut csv = csv::Writer::from_writer(sink);
            csv.write_record(["m", "n", "w", "d", "lower", "upper", "lower_rule", "upper_rule"])?;
            for r in reports {
                let p = r.params;
                csv.write_record([
                    p.m.to_string(),
                    p.n.to_string(),
                    p.w.to_string(),
                    p.d.to_string(),
                    r.lower_value().to_string(),
                    r.upper_value().to_string(),
                    r.lower.rule().name().to_string(),
                    r.upper.rule().name().to_string(),
                ])?;
            }
            csv.flush()?;
        }
        Command::Oracle { p, d, anticode, delta, cap } => {
            let (m, n, w) = (p.m as usize, p.n as usize, p.w as usize);
            let e = if anticode {
                exact_max_anticode(m, n, w, delta.unwrap_or(0) as usize, cap)?
            } else {
                let d = d.unwrap_or(1);
                params(p, d)?;
                exact_max_code(m, n, w, d as usize, cap)?
            };
            print_json(&json!({
                "exact": e.value.to_string(),
                "witness": witness_json(e.witness.iter().map(|a| a.to_hex_columns())),
            }))?;
        }
        Command::OracleGamma { q, n, delta, cap } => {
            let e = exact_gamma(q, n, delta, cap)?;
            print_json(&json!({
                "exact": e.value.to_string(),
                "witness": e.witness,
            }))?;
        }
        Command::Construct { m, w, f, n, k, out } => {
            let plan = plan_params(m, w, f, n, k)?;
            let code = ConcatenatedCode::new(m, w, f, n, k)?;
            fs::write(&out, serde_json::to_vec_pretty(&code.description())?)?;
            print_json(&serde_json::to_value(plan)?)?;
        }
        Command::Encode { code, input, out } => {
            let code = load_code(&code)?;
            let s = encode_stream(&code, &fs::read(&input)?)?;
            fs::write(&out, serde_json::to_vec(&s)?)?;
        }
        Command::Decode { code, input, out } => {
            let code = load_code(&code)?;
            let s: EncodedStream = serde_json::from_slice(&fs::read(&input)?)?;
            let d = decode_stream(&code, &s)?;
            let failed = d.failed_blocks();
            let beyond: Vec<usize> =
                d.blocks.iter().enumerate().filter(|(_, b)| b.beyond_guarantee).map(|(i, _)| i).collect();
            let erased: usize = d.blocks.iter().map(|b| b.columns.iter().filter(|c| c.erased).count()).sum();
            eprintln!(
                "{}",
                json!({"blocks": d.blocks.len(), "failed": failed, "beyond_guarantee": beyond, "inner_erasures": erased})
            );
            if !failed.is_empty() {
                return Err(Failure::Decode(format!("{} of {} blocks failed to decode", failed.len(), d.blocks.len())));
            }
            fs::write(&out, &d.bytes)?;
        }
        Command::Simulate { code, losses, injections, trials, seed, policy, records } => {
            let code = load_code(&code)?;
            let spec = ChannelSpec { losses, injections, policy, seed };
            let recs = simulate_records(&code, &spec, trials)?;
            if let Some(path) = records {
                let mut csv = csv::Writer::from_path(path)?;
                csv.write_record(["trial", "outcome", "inner_erasures", "beyond_guarantee"])?;
                for r in &recs {
                    let outcome = serde_json::to_value(r.outcome)?;
                    csv.write_record([
                        r.trial.to_string(),
                        outcome.as_str().unwrap_or_default().to_string(),
                        r.inner_erasures.to_string(),
                        r.beyond_guarantee.to_string(),
                    ])?;
                }
                csv.flush()?;
            }
            print_json(&serde_json::to_value(summarize(&code, &spec, &recs))?)?;
        }
        Command::Selftest { json } => {
            let reports = selftest::run_all();
            if json {
                print_json(&serde_json::to_value(&reports)?)?;
            } else {
                reports.iter().for_each(|r| println!("{r}"));
            }
            if reports.iter().any(|r| !r.passed) {
                return Err(Failure::Selftest);
            }
        }
        Command::Man => {
            print!("{}", man_page(&Cli::command()));
        }
    }
    Ok(())
}

fn roff_escape(s: &str) -> String {
    s.replace('\\', "\\e").replace('-', "\\-")
}

fn arg_line(a: &clap::Arg) -> String {
    let name = match (a.get_long(), a.get_short()) {
        (Some(l), _) => format!("\\fB\\-\\-{}\\fR", roff_escape(l)),
        (None, Some(c)) => format!("\\fB\\-{c}\\fR"),
        (None, None) => format!("\\fI{}\\fR", a.get_id()),
    };
    let value = if a.get_action().takes_values() {
        format!(" \\fI{}\\fR", a.get_id().as_str().to_uppercase())
    } else {
        String::new()
    };
    let default: Vec<String> = a.get_default_values().iter().map(|v| v.to_string_lossy().into_owned()).collect();
    let mut help = a.get_help().map(|h| h.to_string()).unwrap_or_default();
    if !default.is_empty() {
        help = format!("{help} [default: {}]", default.join(","));
    }
    format!(".TP\n{name}{value}\n{}\n", roff_escape(help.trim()))
}

/// Manual page in roff, built from the same definitions as the parser.
fn man_page(cmd: &clap::Command) -> String {
    let name = cmd.get_name();
    let mut s = format!(".TH {} 1 \"\" \"{name} {}\"\n", name.to_uppercase(), cmd.get_version().unwrap_or(""));
    s += &format!(".SH NAME\n{name} \\- {}\n", roff_escape(&cmd.get_about().map(|a| a.to_string()).unwrap_or_default()));
    s += &format!(".SH SYNOPSIS\n\\fB{name}\\fR [\\fB\\-\\-threads\\fR \\fIN\\fR] \\fICOMMAND\\fR [\\fIOPTIONS\\fR]\n");
    if let Some(long) = cmd.get_long_about() {
        s += &format!(".SH DESCRIPTION\n{}\n", roff_escape(&long.to_string()));
    }
    s += ".SH OPTIONS\n";
    for a in cmd.get_arguments().filter(|a| !a.is_hide_set()) {
        s += &arg_line(a);
    }
    s += ".SH COMMANDS\n";
    for sub in cmd.get_subcommands() {
        s += &format!(".SS {}\n{}\n", sub.get_name(), roff_escape(&sub.get_about().map(|a| a.to_string()).unwrap_or_default()));
        for a in sub.get_arguments().filter(|a| !a.is_global_set() && a.get_id() != "help") {
            s += &arg_line(a);
        }
    }
    s += ".SH EXIT STATUS\n0 success, 1 failed selftest, 2 parameter or input error, 3 decoding failure, 4 search refused by the universe cap.\n";
    s
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("cwac: thread pool: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Core(e) => eprintln!("cwac: {e}"),
                Failure::Decode(msg) => eprintln!("cwac: {msg}"),
                Failure::Selftest => eprintln!("cwac: selftest failed"),
            }
            ExitCode::from(exit_code(&f))
        }
    }
}
