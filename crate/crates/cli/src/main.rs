//! `ecds`: build, corrupt, decode and measure error-correcting data
//! structures, and evaluate the matching lower bounds.

use std::fs::File;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use ecds_core::bounds::{self, BoundReport};
use ecds_core::harness::{self, Adversary, AdversaryKind, ExperimentConfig, Mode, SweepCell, SweepSpec};
use ecds_core::persist::StoredStructure;
use ecds_core::scheme::{ComposedDecoder, Query, SchemeSpec};
use ecds_core::{seed, BitString, Error, ProbeOracle};

#[derive(Parser, Debug)]
#[command(name = "ecds", version, about = "Error-correcting data structure experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a structure for an item and store it.
    Build(BuildArgs),
    /// Answer one query from a stored (possibly corrupted) structure.
    Decode(DecodeArgs),
    /// Corrupt a stored structure with an adversary.
    Attack(AttackArgs),
    /// Measure worst-query error under an adversary.
    Experiment(ExperimentArgs),
    /// Run an experiment grid read from a JSON file.
    Sweep(SweepArgs),
    /// Evaluate lower bounds and thresholds.
    Bounds(BoundsArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SchemeKind {
    HadLdc,
    HadIp,
    Equality,
    IpTable,
    PolyIp,
    Substring,
    Bmrv,
    Composed,
    ComposedDirect,
}

#[derive(Args, Debug, Clone)]
struct SchemeArgs {
    #[arg(long)]
    scheme: SchemeKind,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    s: Option<usize>,
    #[arg(long)]
    r: Option<usize>,
    #[arg(long)]
    p: Option<usize>,
    #[arg(long)]
    eps: Option<f64>,
    /// Repetitions per bit (substring).
    #[arg(long)]
    t: Option<usize>,
    #[arg(long)]
    n_prime: Option<usize>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    block_bits: Option<usize>,
    #[arg(long)]
    blocks: Option<usize>,
}

fn need(v: Option<usize>, flag: &str, scheme: &str) -> Result<usize, Error> {
    v.ok_or_else(|| Error::InvalidParameter(format!("--{flag} is required for {scheme}")))
}

impl SchemeArgs {
    fn spec(&self) -> Result<SchemeSpec, Error> {
        let n = need(self.n, "n", "every scheme")?;
        let s = || need(self.s, "s", "membership schemes");
        let r = || need(self.r, "r", "this scheme");
        Ok(match self.scheme {
            SchemeKind::HadLdc => SchemeSpec::HadLdc { n },
            SchemeKind::HadIp => SchemeSpec::HadIp { n },
            SchemeKind::Equality => SchemeSpec::Equality { n },
            SchemeKind::IpTable => SchemeSpec::IpTable {
                n,
                r: r()?,
                p: self.p.unwrap_or(1),
            },
            SchemeKind::PolyIp => SchemeSpec::PolyIp {
                n,
                r: r()?,
                p: need(self.p, "p", "poly-ip")?,
            },
            SchemeKind::Substring => SchemeSpec::Substring {
                n,
                r: r()?,
                t: self.t.unwrap_or(1),
            },
            SchemeKind::Bmrv => SchemeSpec::Bmrv {
                n,
                s: s()?,
                eps: self
                    .eps
                    .ok_or_else(|| Error::InvalidParameter("--eps is required for bmrv".into()))?,
                n_prime: self.n_prime,
                d: self.d,
            },
            SchemeKind::Composed | SchemeKind::ComposedDirect => SchemeSpec::Composed {
                n,
                s: s()?,
                decoder: if matches!(self.scheme, SchemeKind::Composed) {
                    ComposedDecoder::Block
                } else {
                    ComposedDecoder::Direct
                },
                block_bits: self.block_bits,
                blocks: self.blocks,
            },
        })
    }
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq)]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug)]
struct OutputArgs {
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Write here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BuildArgs {
    #[command(flatten)]
    scheme: SchemeArgs,
    /// Item to encode as a 0/1 string; seeded random item otherwise.
    #[arg(long)]
    item: Option<String>,
    #[arg(long, env = "ECDS_SEED", default_value_t = 0)]
    seed: u64,
    /// Structure file to write; standard output otherwise.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct DecodeArgs {
    /// Stored structure.
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    query: String,
    /// Seed for the decoder's coins.
    #[arg(long, env = "ECDS_SEED", default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct AttackArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    adversary: AdversaryKind,
    #[arg(long)]
    delta: f64,
    /// Target query for targeted adversaries.
    #[arg(long)]
    query: Option<String>,
    #[arg(long, env = "ECDS_SEED", default_value_t = 0)]
    seed: u64,
    /// Corrupted structure file to write.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    #[command(flatten)]
    scheme: SchemeArgs,
    #[arg(long, default_value_t = 0.0)]
    delta: f64,
    #[arg(long, default_value = "none")]
    adversary: AdversaryKind,
    #[arg(long, default_value_t = harness::DEFAULT_TRIALS)]
    trials: usize,
    #[arg(long, env = "ECDS_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "auto")]
    mode: Mode,
    #[arg(long)]
    item: Option<String>,
    /// Restrict to these queries (repeatable).
    #[arg(long = "query")]
    queries: Vec<String>,
    /// Include each query's corruption pattern.
    #[arg(long)]
    patterns: bool,
    /// Include wall-clock time (makes output run-dependent).
    #[arg(long)]
    wall_time: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// JSON grid: {"schemes": [...], "deltas": [...], "adversaries": [...], "trials", "seed", "mode"}.
    #[arg(long)]
    grid: PathBuf,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct BoundsArgs {
    #[command(subcommand)]
    which: BoundKind,
    #[arg(long, value_enum, default_value = "json", global = true)]
    format: Format,
}

#[derive(Subcommand, Debug)]
enum BoundKind {
    /// Length lower bound for inner product with p probes.
    Ip {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        r: u64,
        /// Exact rational or decimal, e.g. 1/4 or 0.25.
        #[arg(long)]
        eps: String,
        #[arg(long, default_value_t = 1)]
        p: u32,
    },
    /// Communication lower bound for inner product at advantage beta.
    Comm {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        r: u64,
        #[arg(long)]
        beta: f64,
    },
    /// Largest s admitting one-probe error-correcting membership.
    Threshold {
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        eps: f64,
    },
    /// log2 B(n, s).
    Membership {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        s: u64,
    },
    /// Check the inner-product matrix discrepancy bound.
    Discrepancy {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: usize,
        /// Sample this many rectangles instead of all.
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long, env = "ECDS_SEED", default_value_t = 0)]
        seed: u64,
    },
}

/// Failure with a stable machine-readable code and exit status.
struct Failure {
    code: &'static str,
    status: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let (code, status) = match &e {
            Error::InvalidParameter(_)
            | Error::LengthMismatch { .. }
            | Error::WeightExceeded { .. }
            | Error::IndexOutOfRange { .. } => ("invalid_parameter", 3),
            Error::Infeasible(_) | Error::NotEnumerable { .. } => ("infeasible", 4),
            Error::ConstructionFailed { .. } | Error::VerificationFailed { .. } => ("construction_failed", 5),
            Error::Parse(_) => ("parse", 6),
            Error::BudgetExhausted { .. } | Error::ProbeOutOfRange { .. } => ("probe_budget", 7),
        };
        Failure {
            code,
            status,
            message: e.to_string(),
        }
    }
}

fn io_failure(path: &Path, e: io::Error) -> Failure {
    Failure {
        code: "io",
        status: 8,
        message: format!("{}: {e}", path.display()),
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| io_failure(path, e)),
        None => {
            let mut stdout = io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| io_failure(Path::new("<stdout>"), e))
        }
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

fn parse_item(item: &Option<String>, spec: &SchemeSpec, seed: u64) -> Result<BitString, Error> {
    let x = match item {
        Some(s) => s.parse()?,
        None => spec.default_item(seed),
    };
    spec.check_item(&x)?;
    Ok(x)
}

fn load(path: &Path) -> Result<StoredStructure, Failure> {
    let file = File::open(path).map_err(|e| io_failure(path, e))?;
    Ok(StoredStructure::read_from(BufReader::new(file))?)
}

fn build(a: &BuildArgs) -> Result<(), Failure> {
    let spec = a.scheme.spec()?;
    let x = parse_item(&a.item, &spec, a.seed)?;
    let (stored, scheme) = StoredStructure::create(&spec, a.seed, &x)?;
    match &a.out {
        Some(path) => {
            let file = File::create(path).map_err(|e| io_failure(path, e))?;
            stored.write_to(io::BufWriter::new(file))?;
            let summary = json!({
                "command": "build",
                "out": path.display().to_string(),
                "header": stored.header,
                "build": scheme.build_report(),
            });
            emit(&None, &to_json(&summary))
        }
        None => {
            let mut buf = Vec::new();
            stored.write_to(&mut buf)?;
            emit(&None, &String::from_utf8(buf).expect("ascii"))
        }
    }
}

fn decode(a: &DecodeArgs) -> Result<(), Failure> {
    let stored = load(&a.input)?;
    let scheme = stored.scheme()?;
    let q = scheme.parse_query(&a.query)?;
    let budget = scheme.probe_budget(&q);
    let mut coins = seed::rng(a.seed, &[]);
    let mut oracle = ProbeOracle::new(&stored.payload, budget);
    let answer = scheme.decode(&mut oracle, &q, &mut coins)?;
    let truth = scheme.truth(&stored.header.item, &q)?;
    let out = json!({
        "command": "decode",
        "scheme": stored.header.spec,
        "seed": a.seed,
        "query": q.to_string(),
        "answer": answer.to_string(),
        "truth": truth.to_string(),
        "correct": answer == truth,
        "probes": oracle.log(),
        "budget": budget,
        "corrupted_positions": stored.header.corruption.weight(),
    });
    emit(&None, &to_json(&out))
}

fn attack(a: &AttackArgs) -> Result<(), Failure> {
    let mut stored = load(&a.input)?;
    let scheme = stored.scheme()?;
    let q = match &a.query {
        Some(s) => scheme.parse_query(s)?,
        None if a.adversary.targeted() => {
            return Err(Error::InvalidParameter(format!("--query is required for {}", a.adversary)).into())
        }
        None => Query::Index(0),
    };
    let word = scheme.encode(&stored.header.item)?;
    let adversary = Adversary::for_delta(a.adversary, a.delta, word.len(), a.seed);
    let pattern = adversary.attack(scheme.as_ref(), &stored.header.item, &word, &q)?;
    stored.apply(&pattern)?;
    if let Some(path) = &a.out {
        let file = File::create(path).map_err(|e| io_failure(path, e))?;
        stored.write_to(io::BufWriter::new(file))?;
    }
    let out = json!({
        "command": "attack",
        "adversary": a.adversary,
        "delta": a.delta,
        "seed": a.seed,
        "query": a.query,
        "budget": adversary.budget,
        "flips": pattern.weight(),
        "pattern": pattern,
        "out": a.out.as_ref().map(|p| p.display().to_string()),
    });
    emit(&None, &to_json(&out))
}

fn experiment(a: &ExperimentArgs) -> Result<(), Failure> {
    let spec = a.scheme.spec()?;
    let mut cfg = ExperimentConfig::new(spec.clone(), a.delta, a.adversary, a.trials, a.seed);
    cfg.mode = a.mode;
    cfg.item = Some(parse_item(&a.item, &spec, a.seed)?);
    cfg.record_patterns = a.patterns;
    cfg.wall_time = a.wall_time;
    let scheme = spec.build(a.seed)?;
    let x = cfg.item.clone().expect("set above");
    let queries = if a.queries.is_empty() {
        scheme.queries(&x)
    } else {
        a.queries
            .iter()
            .map(|s| scheme.parse_query(s))
            .collect::<Result<Vec<_>, _>>()?
    };
    let report = harness::estimate_error(scheme.as_ref(), &cfg, &x, &queries)?;
    let text = match a.output.format {
        Format::Json => to_json(&report),
        Format::Csv => harness::to_csv([&report]),
    };
    emit(&a.output.out, &text)
}

fn sweep(a: &SweepArgs) -> Result<(), Failure> {
    let text = std::fs::read_to_string(&a.grid).map_err(|e| io_failure(&a.grid, e))?;
    let grid: SweepSpec = serde_json::from_str(&text).map_err(|e| Error::Parse(format!("bad grid: {e}")))?;
    let cells = harness::sweep(&grid);
    let text = match a.output.format {
        Format::Json => to_json(&cells),
        Format::Csv => harness::to_csv(cells.iter().filter_map(|c| match c {
            SweepCell::Report(r) => Some(r.as_ref()),
            SweepCell::Failed { .. } => None,
        })),
    };
    for cell in &cells {
        if let SweepCell::Failed { .. } = cell {
            eprintln!("{}", serde_json::to_string(&json!({ "warning": "cell_failed", "cell": cell })).expect("json"));
        }
    }
    emit(&a.output.out, &text)
}

fn bound_csv(reports: &[BoundReport]) -> String {
    let mut out = String::from("name,formula,inputs,value,exact\n");
    for r in reports {
        let inputs: Vec<String> = r.inputs.iter().map(|(k, v)| format!("{k}={v}")).collect();
        out.push_str(&format!(
            "{},\"{}\",\"{}\",{},{}\n",
            r.name,
            r.formula,
            inputs.join(";"),
            r.value,
            r.exact.clone().unwrap_or_default()
        ));
    }
    out
}

fn bounds_cmd(a: &BoundsArgs) -> Result<(), Failure> {
    let report = match &a.which {
        BoundKind::Ip { n, r, eps, p } => bounds::ip_ds_lower_bound(*n, *r, &bounds::parse_rational(eps)?, *p)?,
        BoundKind::Comm { n, r, beta } => bounds::ip_comm_lower_bound(*n, *r, *beta)?,
        BoundKind::Threshold { delta, eps } => bounds::katz_trevisan_threshold(*delta, *eps)?,
        BoundKind::Membership { n, s } => bounds::membership_trivial_lb(*n, *s)?,
        BoundKind::Discrepancy { n, r, samples, seed } => {
            let rep = bounds::discrepancy_verify(*n, *r, *samples, *seed)?;
            let text = match a.format {
                Format::Json => to_json(&rep),
                Format::Csv => format!(
                    "n,r,columns,gram_ok,mode,rectangles,violations,max_ratio\n{},{},{},{},{},{},{},{}\n",
                    rep.n, rep.r, rep.columns, rep.gram_ok, rep.mode, rep.rectangles, rep.violations, rep.max_ratio
                ),
            };
            return emit(&None, &text);
        }
    };
    let text = match a.format {
        Format::Json => to_json(&report),
        Format::Csv => bound_csv(std::slice::from_ref(&report)),
    };
    emit(&None, &text)
}

fn run(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Build(a) => build(a),
        Command::Decode(a) => decode(a),
        Command::Attack(a) => attack(a),
        Command::Experiment(a) => experiment(a),
        Command::Sweep(a) => sweep(a),
        Command::Bounds(a) => bounds_cmd(a),
    }
}

fn fail(f: Failure) -> ExitCode {
    let obj = json!({ "error": { "code": f.code, "message": f.message } });
    eprintln!("{obj}");
    ExitCode::from(f.status)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                e.exit();
            }
            return fail(Failure {
                code: "usage",
                status: 2,
                message: e.to_string().trim().to_string(),
            });
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => fail(f),
    }
}
