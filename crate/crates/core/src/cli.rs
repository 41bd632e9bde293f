//! The `cclab` command line: generate, lift, measure, extract, build,
//! balance, verify and report.
//!
//! Exit codes: 0 when every reported quantity is exact, 2 when some are
//! only bounded, 1 on user error, 3 when `verify` finds a disagreement.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::builder::{build_protocol, theorem_report, BuildOptions, Strategy, CSV_HEADER};
use crate::entropy::extract_rectangle;
use crate::error::{Error, Result};
use crate::limits::SearchLimits;
use crate::matrix::{make_family, parse_bfn, rank, write_bfn, xor_power, BoolFun, Family};
use crate::protocol::{balance, depth_bound, exact_cc, ProtocolTree};
use crate::rect::{cover_number, max_mono_rectangle, parse_rect, write_rect, CoverMode};

pub const LIMITS_ENV: &str = "CCLAB_LIMITS";

#[derive(Debug, Parser)]
#[command(name = "cclab", version, about = "Desk-scale communication complexity toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Search limits, e.g. `node=1000000,ms=5000,rects=50000`.
    #[arg(long, global = true)]
    pub limits: Option<String>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    /// Write the primary output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Lift,
    Direct,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exact,
    Greedy,
}

/// Exactly one of a matrix file or a family spec.
#[derive(Debug, Clone, Args)]
pub struct Input {
    /// Matrix file in `.bfn` format.
    #[arg(long = "in", conflicts_with = "family")]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub family: Option<String>,
    /// Side length for `--family`.
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output bit of the `const` family.
    #[arg(long)]
    pub value: Option<u8>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a family matrix.
    Gen(Input),
    /// Write the XOR lift `f^{⊕n}`.
    Lift {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 2)]
        n: usize,
    },
    /// Rank, distinct rows/columns, `D(f)` and the cover number.
    Measure {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
        mode: ModeArg,
    },
    /// Pull a rectangle of the lift back to a rectangle of `f`.
    Extract {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Rectangle of the lift; defaults to its maximum monochromatic one.
        #[arg(long)]
        rect: Option<PathBuf>,
    },
    /// Build a protocol by rank splitting.
    Build {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, value_enum, default_value_t = StrategyArg::Direct)]
        strategy: StrategyArg,
        /// Upper bound on `C(f^{⊕n})` used for the area and shrink checks.
        #[arg(long)]
        cover: Option<u64>,
        /// Also write the build trace as JSON.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Rebalance a protocol tree.
    Balance {
        #[arg(long)]
        proto: PathBuf,
    },
    /// Check a protocol against a matrix on every input.
    Verify {
        #[arg(long)]
        proto: PathBuf,
        #[command(flatten)]
        input: Input,
    },
    /// Summary rows over a family sweep or matrix files.
    Report {
        #[arg(long = "in", conflicts_with = "family")]
        inputs: Vec<PathBuf>,
        #[arg(long)]
        family: Option<String>,
        /// Side lengths, comma separated.
        #[arg(long, value_delimiter = ',')]
        m: Vec<usize>,
        /// Lift exponents, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "2")]
        n: Vec<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        value: Option<u8>,
    },
}

/// What a command produced: text for `--out`/stdout, and whether every
/// quantity in it is exact.
struct Outcome {
    text: String,
    code: u8,
}

impl Outcome {
    fn exact(text: String) -> Outcome {
        Outcome { text, code: 0 }
    }

    fn graded(text: String, exact: bool) -> Outcome {
        Outcome { text, code: if exact { 0 } else { 2 } }
    }
}

fn read(path: &PathBuf) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::invalid(format!("cannot read {}: {e}", path.display())))
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report types serialize");
    s.push('\n');
    s
}

fn load(input: &Input) -> Result<BoolFun> {
    match (&input.input, &input.family) {
        (Some(path), None) => {
            if input.m.is_some() || input.seed.is_some() || input.value.is_some() {
                return Err(Error::invalid("--m, --seed and --value only apply to --family"));
            }
            let text = read(path)?;
            let f = parse_bfn(&text).map_err(|e| Error::invalid(format!("{}: {e}", path.display())))?;
            Ok(match (f.label().is_none(), path.file_stem()) {
                (true, Some(stem)) => f.with_label(stem.to_string_lossy()),
                _ => f,
            })
        }
        (None, Some(name)) => {
            let fam: Family = name.parse()?;
            let m = input.m.ok_or_else(|| Error::invalid("--family needs --m"))?;
            make_family(fam, m, input.seed, input.value)
        }
        _ => Err(Error::invalid("give exactly one input: --in FILE or --family NAME")),
    }
}

fn limits(flag: Option<&str>, env: Option<&str>) -> Result<SearchLimits> {
    let base = match env {
        Some(spec) => SearchLimits::parse(spec).map_err(|e| Error::invalid(format!("{LIMITS_ENV}: {e}")))?,
        None => SearchLimits::default(),
    };
    match flag {
        Some(spec) => SearchLimits::parse_with_base(spec, base),
        None => Ok(base),
    }
}

#[derive(Serialize)]
struct Measure {
    name: String,
    rows: usize,
    cols: usize,
    rank: usize,
    distinct_rows: usize,
    distinct_cols: usize,
    d_lo: usize,
    d_hi: usize,
    c_lo: usize,
    c_hi: usize,
    cover_status: String,
}

fn interval(lo: usize, hi: usize) -> String {
    if lo == hi {
        format!("{lo} (exact)")
    } else {
        format!("[{lo}, {hi}] (bounded)")
    }
}

fn measure(f: &BoolFun, mode: ModeArg, lim: &SearchLimits, format: Format) -> Result<Outcome> {
    let d = exact_cc(f, lim)?;
    let mode = match mode {
        ModeArg::Exact => CoverMode::Exact,
        ModeArg::Greedy => CoverMode::Greedy,
    };
    let c = cover_number(f, mode, lim)?;
    let (c_lo, c_hi) = c.bounds();
    let m = Measure {
        name: f.label().unwrap_or("f").to_string(),
        rows: f.rows(),
        cols: f.cols(),
        rank: rank(f),
        distinct_rows: f.distinct_row_count(),
        distinct_cols: f.distinct_col_count(),
        d_lo: d.lower,
        d_hi: d.upper,
        c_lo,
        c_hi,
        cover_status: serde_json::to_value(c.status).unwrap().as_str().unwrap().to_string(),
    };
    let exact = d.exact().is_some() && c_lo == c_hi;
    let text = match format {
        Format::Json => json(&m),
        Format::Csv => format!(
            "#v1\nname,rows,cols,rank,distinct_rows,distinct_cols,D_lo,D_hi,C_lo,C_hi,C_status\n{},{},{},{},{},{},{},{},{},{},{}\n",
            m.name, m.rows, m.cols, m.rank, m.distinct_rows, m.distinct_cols, m.d_lo, m.d_hi, m.c_lo, m.c_hi, m.cover_status
        ),
        Format::Text => format!(
            "name      {}\nsize      {} x {}\nrank      {}\ndistinct  {} rows, {} cols\nD         {}\nC         {} [{}]\n",
            m.name,
            m.rows,
            m.cols,
            m.rank,
            m.distinct_rows,
            m.distinct_cols,
            interval(m.d_lo, m.d_hi),
            interval(m.c_lo, m.c_hi),
            m.cover_status
        ),
    };
    Ok(Outcome::graded(text, exact))
}

fn extract(f: &BoolFun, n: usize, rect: Option<&PathBuf>, format: Format) -> Result<Outcome> {
    let lift = xor_power(f, n)?;
    let r = match rect {
        Some(path) => parse_rect(&read(path)?).map_err(|e| Error::invalid(format!("{}: {e}", path.display())))?,
        None => max_mono_rectangle(&lift.lifted)?,
    };
    let ext = extract_rectangle(&lift, &r).map_err(|e| match e {
        Error::Precondition(msg) => Error::InvalidArgument(msg),
        other => other,
    })?;
    let c = &ext.certificate;
    let text = match format {
        Format::Json => json(&ext),
        Format::Csv => format!(
            "#v1\nn,i,u,v,R,T,t_guarantee,passed\n{},{},{},{},{},{},{},{}\n",
            c.n, c.i, c.u, c.v, c.r_size, c.t_size, c.t_guarantee, c.passed
        ),
        Format::Text => {
            let mut s = String::new();
            let _ = writeln!(s, "n         {}", c.n);
            let _ = writeln!(s, "|R|       {}", c.r_size);
            let _ = writeln!(s, "|T| ≥ {}", c.t_guarantee);
            let _ = writeln!(s, "|T|       {}", c.t_size);
            let _ = writeln!(s, "context   i={} x<i={:?} y>i={:?} u={} v={}", c.i, c.x_prefix, c.y_suffix, c.u, c.v);
            let _ = writeln!(s, "check     {} {}", c.check, if c.passed { "passed" } else { "FAILED" });
            let _ = write!(s, "T\n{}", write_rect(&ext.t));
            s
        }
    };
    Ok(Outcome::exact(text))
}

fn build(f: &BoolFun, n: usize, strategy: StrategyArg, cover: Option<u64>, trace: Option<&PathBuf>) -> Result<Outcome> {
    let opts = BuildOptions {
        strategy: match strategy {
            StrategyArg::Lift => Strategy::Lift,
            StrategyArg::Direct => Strategy::Direct,
        },
        cover_value: cover,
    };
    let (tree, tr) = build_protocol(f, n, opts)?;
    tr.audit(tree.leaf_count()).map_err(Error::Invariant)?;
    if let Some(path) = trace {
        write_file(path, &json(&tr))?;
    }
    eprintln!(
        "leaves {} depth {} rank_steps {} shrink_steps {}",
        tree.leaf_count(),
        tree.depth(),
        tr.rank_steps,
        tr.shrink_steps
    );
    Ok(Outcome::exact(tree.to_json() + "\n"))
}

fn load_tree(path: &PathBuf) -> Result<ProtocolTree> {
    ProtocolTree::from_json(&read(path)?).map_err(|e| Error::invalid(format!("{}: {e}", path.display())))
}

fn report(cmd: &Command, lim: &SearchLimits, format: Format) -> Result<Outcome> {
    let Command::Report { inputs, family, m, n, seed, value } = cmd else {
        unreachable!("called for report only")
    };
    let mut funs = Vec::new();
    if let Some(name) = family {
        if m.is_empty() {
            return Err(Error::invalid("--family needs --m"));
        }
        let fam: Family = name.parse()?;
        for &mm in m {
            funs.push(make_family(fam, mm, *seed, *value)?);
        }
    } else if inputs.is_empty() {
        return Err(Error::invalid("give --family NAME --m LIST or one or more --in FILE"));
    }
    for path in inputs {
        funs.push(load(&Input { input: Some(path.clone()), family: None, m: None, seed: None, value: None })?);
    }
    let mut rows = Vec::new();
    for f in &funs {
        for &nn in n {
            rows.push(theorem_report(f, nn, lim)?);
        }
    }
    let exact = rows.iter().all(|r| r.is_exact());
    let text = match format {
        Format::Json => json(&rows),
        Format::Csv | Format::Text => {
            let mut s = format!("{CSV_HEADER}\n");
            for r in &rows {
                s.push_str(&r.csv_row());
                s.push('\n');
            }
            s
        }
    };
    Ok(Outcome::graded(text, exact))
}

fn write_file(path: &PathBuf, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::invalid(format!("cannot write {}: {e}", path.display())))
}

fn dispatch(cli: &Cli, env_limits: Option<&str>) -> Result<Outcome> {
    let lim = limits(cli.limits.as_deref(), env_limits)?;
    match &cli.command {
        Command::Gen(input) => {
            if input.input.is_some() {
                return Err(Error::invalid("gen takes --family, not --in"));
            }
            Ok(Outcome::exact(write_bfn(&load(input)?)))
        }
        Command::Lift { input, n } => {
            let f = load(input)?;
            let lift = xor_power(&f, *n)?;
            let label = format!("{}_xor{n}", f.label().unwrap_or("f"));
            Ok(Outcome::exact(write_bfn(&lift.lifted.with_label(label))))
        }
        Command::Measure { input, mode } => measure(&load(input)?, *mode, &lim, cli.format),
        Command::Extract { input, n, rect } => extract(&load(input)?, *n, rect.as_ref(), cli.format),
        Command::Build { input, n, strategy, cover, trace } => build(&load(input)?, *n, *strategy, *cover, trace.as_ref()),
        Command::Balance { proto } => {
            let t = load_tree(proto)?;
            let b = balance(&t);
            eprintln!(
                "leaves {} depth {} -> {} (bound {})",
                t.leaf_count(),
                t.depth(),
                b.depth(),
                depth_bound(t.leaf_count())
            );
            Ok(Outcome::exact(b.to_json() + "\n"))
        }
        Command::Verify { proto, input } => {
            let t = load_tree(proto)?;
            let f = load(input)?;
            if (t.rows(), t.cols()) != (f.rows(), f.cols()) {
                return Err(Error::invalid(format!(
                    "protocol is {}x{} but the matrix is {}x{}",
                    t.rows(),
                    t.cols(),
                    f.rows(),
                    f.cols()
                )));
            }
            Ok(match t.first_disagreement(&f) {
                None => Outcome::exact("ok\n".into()),
                Some((x, y)) => Outcome {
                    text: format!("mismatch at ({x}, {y}): f = {}\n", f.bit(x, y)),
                    code: 3,
                },
            })
        }
        Command::Report { .. } => report(&cli.command, &lim, cli.format),
    }
}

/// Runs a parsed command line; `env_limits` is the value of `CCLAB_LIMITS`.
pub fn run(cli: &Cli, env_limits: Option<&str>) -> ExitCode {
    match dispatch(cli, env_limits) {
        Ok(out) => {
            let written = match &cli.out {
                Some(path) => write_file(path, &out.text),
                None => {
                    print!("{}", out.text);
                    Ok(())
                }
            };
            match written {
                Ok(()) => ExitCode::from(out.code),
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(1)
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let env = std::env::var(LIMITS_ENV).ok();
    run(&cli, env.as_deref())
}
