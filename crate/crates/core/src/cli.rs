//! Command-line front end. `main` only forwards to [`run`].

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::code::GridCode;
use crate::constructions::{
    bch_simple_field_bits, bch_zero_field_bits, bootstrap_h1, construct_ap3, construct_binary,
    construct_bch_simple, construct_bch_zero, smallest_ap3_prime,
};
use crate::decoder::{erase, random_codeword, recover, DecodeError, PartialWord};
use crate::gridgraph::{Cell, Pattern};
use crate::reductions::{reduce_box, reduce_monotone, ReductionError};
use crate::verifier::{
    is_mr_cycle_criterion_with, is_mr_rank_oracle, min_field_size_search, MrReport, OracleMode, SearchFamily,
    VerifyError, DEFAULT_PAIR_CAP, DEFAULT_PATTERN_CAP,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_CAP: i32 = 2;
pub const EXIT_INVALID: i32 = 3;

#[derive(Parser, Debug, Serialize)]
#[command(name = "mrgrid", version, about = "Maximally recoverable grid codes")]
pub struct Cli {
    #[command(flatten)]
    pub shared: Shared,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Serialize)]
pub struct Shared {
    /// Write the JSON artifact here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Resource cap; each command has its own default.
    #[arg(long, global = true)]
    pub cap: Option<u128>,
    /// Verifier threads.
    #[arg(long, global = true, default_value_t = 1)]
    pub workers: usize,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Build a code from one of the explicit families.
    Construct(ConstructArgs),
    /// Decide whether a code is maximally recoverable.
    Verify(VerifyArgs),
    /// Reduce a code to smaller parameters.
    Reduce(ReduceArgs),
    /// Sample a codeword, optionally with erasures.
    Codeword(CodewordArgs),
    /// Recover erased symbols of a word.
    Decode(DecodeArgs),
    /// Search for the smallest field admitting an MR code.
    Search(SearchArgs),
    /// Print a summary table of field sizes and bounds.
    Table(TableArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Binary,
    Bch,
    BchZero,
    Ap3,
    Bootstrap,
}

#[derive(Args, Debug, Serialize)]
pub struct ConstructArgs {
    #[arg(long, value_enum)]
    pub family: Family,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub h: usize,
    /// Field size for ap3; defaults to the smallest admissible prime.
    #[arg(long)]
    pub q: Option<u64>,
    /// Square seed code for bootstrap.
    #[arg(long)]
    pub seed_code: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Cycles,
    Rank,
    Both,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Auto,
    Full,
    Restricted,
}

#[derive(Args, Debug, Serialize)]
pub struct VerifyArgs {
    pub code: PathBuf,
    #[arg(long, value_enum, default_value_t = Method::Cycles)]
    pub method: Method,
    /// Rank oracle mode; auto picks full when mn <= 20.
    #[arg(long, value_enum, default_value_t = ModeArg::Auto)]
    pub mode: ModeArg,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ReduceMethod {
    Monotone,
    Box,
}

#[derive(Args, Debug, Serialize)]
pub struct ReduceArgs {
    #[arg(long, value_enum)]
    pub method: ReduceMethod,
    #[arg(long = "h-prime")]
    pub h_prime: usize,
    #[arg(long)]
    pub h1: Option<usize>,
    #[arg(long)]
    pub h2: Option<usize>,
    /// Skip the MR check of the input.
    #[arg(long)]
    pub assume_mr: bool,
    pub input: PathBuf,
    pub output: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct CodewordArgs {
    pub code: PathBuf,
    /// 1-based cells to erase, as `i,j;i,j;...`.
    #[arg(long)]
    pub erase: Option<String>,
}

#[derive(Args, Debug, Serialize)]
pub struct DecodeArgs {
    pub code: PathBuf,
    pub word: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct SearchArgs {
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub h: usize,
    #[arg(long = "max-q")]
    pub max_q: u64,
    #[arg(long, value_enum, default_value_t = SearchFamilyArg::Generic)]
    pub family: SearchFamilyArg,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchFamilyArg {
    Generic,
    Gabidulin,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TableId {
    BoundsSummary,
}

#[derive(Args, Debug, Serialize)]
pub struct TableArgs {
    #[arg(value_enum)]
    pub table: TableId,
}

/// An error carrying its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn invalid(e: impl std::fmt::Display) -> Failure {
        Failure {
            code: EXIT_INVALID,
            message: e.to_string(),
        }
    }
}

impl From<VerifyError> for Failure {
    fn from(e: VerifyError) -> Failure {
        let code = if matches!(e, VerifyError::CapExceeded { .. } | VerifyError::SearchCapped { .. }) {
            EXIT_CAP
        } else {
            EXIT_INVALID
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

macro_rules! invalid_from {
    ($($t:ty),*) => {$(
        impl From<$t> for Failure {
            fn from(e: $t) -> Failure {
                Failure::invalid(e)
            }
        }
    )*};
}

invalid_from!(
    std::io::Error,
    crate::code::CodeError,
    crate::constructions::ConstructionError,
    ReductionError,
    DecodeError,
    crate::gridgraph::GraphError
);

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
    path: Option<PathBuf>,
}

impl Io<'_> {
    /// Writes the artifact to `--out` or standard output.
    fn artifact(&mut self, body: &str) -> Result<(), Failure> {
        match &self.path {
            Some(p) => fs::write(p, format!("{body}\n"))?,
            None => writeln!(self.out, "{body}")?,
        }
        Ok(())
    }

    /// Human-readable lines go to standard output unless it carries the artifact.
    fn say(&mut self, line: &str) -> Result<(), Failure> {
        if self.path.is_some() {
            writeln!(self.out, "{line}")?;
        } else {
            writeln!(self.err, "{line}")?;
        }
        Ok(())
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    let _ = writeln!(err, "config: {}", serde_json::to_string(&cli).expect("config serializes"));
    let mut io = Io {
        out,
        err,
        path: cli.shared.out.clone(),
    };
    match dispatch(&cli, &mut io) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(io.err, "error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(cli: &Cli, io: &mut Io) -> Result<i32, Failure> {
    match &cli.command {
        Command::Construct(a) => cmd_construct(a, io),
        Command::Verify(a) => cmd_verify(a, &cli.shared, io),
        Command::Reduce(a) => cmd_reduce(a, &cli.shared, io),
        Command::Codeword(a) => cmd_codeword(a, &cli.shared, io),
        Command::Decode(a) => cmd_decode(a, io),
        Command::Search(a) => cmd_search(a, &cli.shared, io),
        Command::Table(a) => cmd_table(a, &cli.shared, io),
    }
}

fn read_code(path: &Path) -> Result<GridCode, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))?;
    Ok(GridCode::from_json(&text)?)
}

fn need_m(m: Option<usize>) -> Result<usize, Failure> {
    m.ok_or_else(|| Failure::invalid("--m is required for this family"))
}

fn describe(code: &GridCode) -> String {
    format!(
        "m={} n={} h={} field={} q={}",
        code.m(),
        code.n(),
        code.h(),
        code.field(),
        code.field().q()
    )
}

fn cmd_construct(a: &ConstructArgs, io: &mut Io) -> Result<i32, Failure> {
    let code = match a.family {
        Family::Binary => {
            if a.h != 1 {
                return Err(Failure::invalid("binary family has h = 1"));
            }
            construct_binary(need_m(a.m)?, a.n)?
        }
        Family::Bch => construct_bch_simple(need_m(a.m)?, a.n, a.h)?,
        Family::BchZero => construct_bch_zero(need_m(a.m)?, a.n, a.h)?,
        Family::Ap3 => {
            if a.h != 1 || a.m.is_some_and(|m| m != 3) {
                return Err(Failure::invalid("ap3 family has m = 3 and h = 1"));
            }
            let q = a.q.unwrap_or_else(|| smallest_ap3_prime(a.n));
            construct_ap3(a.n, q)?
        }
        Family::Bootstrap => {
            let path = a
                .seed_code
                .as_ref()
                .ok_or_else(|| Failure::invalid("--seed-code is required for bootstrap"))?;
            bootstrap_h1(&read_code(path)?, a.n)?
        }
    };
    io.artifact(&code.to_json())?;
    io.say(&format!("constructed {}", describe(&code)))?;
    Ok(EXIT_OK)
}

fn oracle_mode(mode: ModeArg, code: &GridCode) -> OracleMode {
    match mode {
        ModeArg::Full => OracleMode::Full,
        ModeArg::Restricted => OracleMode::Restricted,
        ModeArg::Auto if code.m() * code.n() <= 20 => OracleMode::Full,
        ModeArg::Auto => OracleMode::Restricted,
    }
}

fn report_line(name: &str, r: &MrReport) -> String {
    format!(
        "{name}: {} (patterns checked {}, dedup hits {})",
        if r.is_mr { "MR" } else { "not MR" },
        r.patterns_checked,
        r.dedup_hits
    )
}

fn cmd_verify(a: &VerifyArgs, shared: &Shared, io: &mut Io) -> Result<i32, Failure> {
    let code = read_code(&a.code)?;
    let mut reports = serde_json::Map::new();
    let mut verdict = None;
    if a.method != Method::Rank {
        let r = is_mr_cycle_criterion_with(&code, shared.cap.unwrap_or(DEFAULT_PAIR_CAP), shared.workers)?;
        io.say(&report_line("cycles", &r))?;
        verdict = Some(r.is_mr);
        reports.insert("cycles".into(), serde_json::to_value(&r).expect("report serializes"));
    }
    if a.method != Method::Cycles {
        let mode = oracle_mode(a.mode, &code);
        let r = is_mr_rank_oracle(&code, mode, shared.cap.unwrap_or(DEFAULT_PATTERN_CAP))?;
        io.say(&report_line("rank", &r))?;
        if verdict.is_some_and(|v| v != r.is_mr) {
            return Err(Failure::invalid("cycle criterion and rank oracle disagree"));
        }
        verdict = Some(r.is_mr);
        reports.insert("rank".into(), serde_json::to_value(&r).expect("report serializes"));
    }
    let is_mr = verdict.expect("at least one method runs");
    let body = json!({ "format": 1, "is_mr": is_mr, "reports": reports });
    io.artifact(&serde_json::to_string_pretty(&body).expect("json"))?;
    Ok(if is_mr { EXIT_OK } else { EXIT_NEGATIVE })
}

fn cmd_reduce(a: &ReduceArgs, shared: &Shared, io: &mut Io) -> Result<i32, Failure> {
    let code = read_code(&a.input)?;
    if !a.assume_mr {
        let r = is_mr_cycle_criterion_with(&code, shared.cap.unwrap_or(DEFAULT_PAIR_CAP), shared.workers)
            .map_err(|e| {
                let mut f = Failure::from(e);
                if f.code == EXIT_CAP {
                    f.message.push_str("; pass --assume-mr to skip the input check");
                }
                f
            })?;
        if !r.is_mr {
            io.say("input is not MR")?;
            return Ok(EXIT_NEGATIVE);
        }
    }
    let red = match a.method {
        ReduceMethod::Monotone => reduce_monotone(&code, a.h_prime),
        ReduceMethod::Box => {
            let (h1, h2) = a
                .h1
                .zip(a.h2)
                .ok_or_else(|| Failure::invalid("--h1 and --h2 are required for box"))?;
            reduce_box(&code, a.h_prime, h1, h2)
        }
    };
    let red = match red {
        Err(ReductionError::NotMr) => {
            io.say("input is not MR: the designated cycle sums are dependent")?;
            return Ok(EXIT_NEGATIVE);
        }
        other => other?,
    };
    fs::write(&a.output, format!("{}\n", red.code.to_json()))?;
    io.artifact(&serde_json::to_string_pretty(&red.summary_json()).expect("json"))?;
    io.say(&format!("reduced to {}", describe(&red.code)))?;
    Ok(EXIT_OK)
}

fn parse_cells(spec: &str, m: usize, n: usize) -> Result<Pattern, Failure> {
    let mut cells = Vec::new();
    for part in spec.split(';').map(str::trim).filter(|s| !s.is_empty()) {
        let (i, j) = part
            .split_once(',')
            .ok_or_else(|| Failure::invalid(format!("bad cell {part:?}, expected i,j")))?;
        let parse = |s: &str| {
            s.trim()
                .parse::<usize>()
                .ok()
                .filter(|&v| v >= 1)
                .ok_or_else(|| Failure::invalid(format!("bad index {s:?} in {part:?}")))
        };
        cells.push(Cell::one_based(parse(i)?, parse(j)?));
    }
    Ok(Pattern::new(m, n, cells)?)
}

fn cmd_codeword(a: &CodewordArgs, shared: &Shared, io: &mut Io) -> Result<i32, Failure> {
    let code = read_code(&a.code)?;
    let w = random_codeword(&code, shared.seed);
    let pattern = match &a.erase {
        Some(s) => parse_cells(s, code.m(), code.n())?,
        None => Pattern::empty(code.m(), code.n()),
    };
    io.artifact(&erase(&w, &pattern).to_json())?;
    io.say(&format!("codeword with {} erasures", pattern.len()))?;
    Ok(EXIT_OK)
}

fn cmd_decode(a: &DecodeArgs, io: &mut Io) -> Result<i32, Failure> {
    let code = read_code(&a.code)?;
    let text = fs::read_to_string(&a.word)?;
    let word = PartialWord::from_json(&text)?;
    match recover(&code, &word) {
        Ok(w) => {
            io.artifact(&w.to_json())?;
            io.say("recovered")?;
            Ok(EXIT_OK)
        }
        Err(DecodeError::NotCorrectable { rank, erased }) => {
            let body = json!({ "format": 1, "correctable": false, "rank": rank, "erased": erased });
            io.artifact(&serde_json::to_string_pretty(&body).expect("json"))?;
            io.say(&format!("not correctable: rank {rank} < {erased} erased"))?;
            Ok(EXIT_NEGATIVE)
        }
        Err(DecodeError::Inconsistent) => {
            let body = json!({ "format": 1, "correctable": true, "consistent": false });
            io.artifact(&serde_json::to_string_pretty(&body).expect("json"))?;
            io.say("known symbols are not consistent with any codeword")?;
            Ok(EXIT_NEGATIVE)
        }
        Err(e) => Err(e.into()),
    }
}

fn cmd_search(a: &SearchArgs, shared: &Shared, io: &mut Io) -> Result<i32, Failure> {
    let family = match a.family {
        SearchFamilyArg::Generic => SearchFamily::Generic,
        SearchFamilyArg::Gabidulin => SearchFamily::Gabidulin,
    };
    let out = min_field_size_search(a.m, a.n, a.h, a.max_q, family, shared.cap.unwrap_or(DEFAULT_PATTERN_CAP))?;
    let body = json!({
        "format": 1,
        "outcome": out,
        "code": out.code.as_ref().map(|c| serde_json::to_value(c.to_file()).expect("json")),
    });
    io.artifact(&serde_json::to_string_pretty(&body).expect("json"))?;
    match out.q {
        Some(q) => {
            io.say(&format!("q = {q} (ruled out: {:?})", out.ruled_out))?;
            Ok(EXIT_OK)
        }
        None => {
            io.say(&format!("no code up to q = {} (ruled out: {:?})", a.max_q, out.ruled_out))?;
            Ok(EXIT_NEGATIVE)
        }
    }
}

#[derive(Serialize)]
struct TableRow {
    m: usize,
    n: usize,
    h: usize,
    binary_q: Option<u64>,
    bch_simple_log2_q: Option<u32>,
    bch_zero_log2_q: Option<u32>,
    bch_zero_bound_log2: f64,
    ap3_q: Option<u64>,
    lower_bound_h1: Option<u64>,
    gabidulin_lower_bound: u64,
    search_generic: String,
    search_gabidulin: String,
}

fn binom(n: u64, k: u64) -> u64 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn search_cell(m: usize, n: usize, h: usize, family: SearchFamily, cap: u128) -> String {
    match min_field_size_search(m, n, h, 16, family, cap) {
        Ok(o) => match o.q {
            Some(q) => q.to_string(),
            None => "> 16".into(),
        },
        Err(VerifyError::SearchCapped { q, .. }) => format!(">={q},cap"),
        Err(VerifyError::CapExceeded { .. }) => "cap".into(),
        Err(e) => format!("error: {e}"),
    }
}

/// Desk-scale parameters covered by `table bounds-summary`.
pub const TABLE_GRID: [(usize, usize, usize); 7] =
    [(2, 2, 1), (2, 3, 1), (2, 4, 1), (3, 4, 1), (2, 3, 2), (2, 4, 2), (3, 4, 2)];

fn cmd_table(_a: &TableArgs, shared: &Shared, io: &mut Io) -> Result<i32, Failure> {
    let cap = shared.cap.unwrap_or(1 << 16);
    let mut rows = Vec::new();
    for &(m, n, h) in &TABLE_GRID {
        let pow2 = n.is_power_of_two();
        let row = TableRow {
            m,
            n,
            h,
            binary_q: (pow2 && h == 1).then(|| (n as u64).pow(m as u32 - 1)),
            bch_simple_log2_q: pow2.then(|| bch_simple_field_bits(m, n, h)).transpose()?,
            bch_zero_log2_q: pow2.then(|| bch_zero_field_bits(m, n, h)).transpose()?,
            bch_zero_bound_log2: 1.0 + (m + h - 2) as f64 * ((2 * m * n) as f64).log2(),
            ap3_q: (m == 3 && h == 1).then(|| smallest_ap3_prime(n)),
            lower_bound_h1: (h == 1).then_some(n as u64),
            gabidulin_lower_bound: binom(n as u64, h.div_ceil(2) as u64),
            search_generic: if h == 1 {
                search_cell(m, n, h, SearchFamily::Generic, cap)
            } else {
                "-".into()
            },
            search_gabidulin: search_cell(m, n, h, SearchFamily::Gabidulin, cap),
        };
        rows.push(row);
    }
    let opt = |v: Option<String>| v.unwrap_or_else(|| "-".into());
    let mut text = format!(
        "{:>2} {:>2} {:>2} | {:>8} {:>11} {:>9} {:>14} {:>5} | {:>6} {:>7} | {:>9} {:>9}\n",
        "m", "n", "h", "n^(m-1)", "log2 bch", "log2 bch0", "log2 2(2mn)^e", "ap3", "lb n", "lb gab", "min gen", "min gab"
    );
    for r in &rows {
        text.push_str(&format!(
            "{:>2} {:>2} {:>2} | {:>8} {:>11} {:>9} {:>14.2} {:>5} | {:>6} {:>7} | {:>9} {:>9}\n",
            r.m,
            r.n,
            r.h,
            opt(r.binary_q.map(|v| v.to_string())),
            opt(r.bch_simple_log2_q.map(|v| v.to_string())),
            opt(r.bch_zero_log2_q.map(|v| v.to_string())),
            r.bch_zero_bound_log2,
            opt(r.ap3_q.map(|v| v.to_string())),
            opt(r.lower_bound_h1.map(|v| v.to_string())),
            r.gabidulin_lower_bound,
            r.search_generic,
            r.search_gabidulin,
        ));
    }
    writeln!(io.out, "{}", text.trim_end())?;
    if let Some(p) = &io.path {
        let body = json!({ "format": 1, "table": "bounds-summary", "rows": rows });
        fs::write(p, format!("{}\n", serde_json::to_string_pretty(&body).expect("json")))?;
    }
    Ok(EXIT_OK)
}
