//! Adversaries and error measurement.
//!
//! An experiment fixes a scheme, a data item `x`, a noise level `δ` and an
//! adversary. For every query the adversary picks a corruption pattern of
//! weight at most `⌊δN⌋` (it sees the scheme and `x`, never the decoder's
//! coins), and the decoder's failure probability on the corrupted word is
//! measured: exactly, by walking all coin outcomes, when there are at most
//! [`EXACT_LIMIT`] of them, otherwise by sampling with a 99% Clopper–Pearson
//! interval. Every random choice is derived from `(seed, path)`, so reports
//! do not depend on thread scheduling.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::beta::beta_reg;

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::oracle::{corrupt, for_each_outcome, CorruptionPattern, ProbSum, ProbeOracle};
use crate::scheme::{Query, Scheme, SchemeSpec};
use crate::seed;

/// Largest coin space enumerated exactly.
pub const EXACT_LIMIT: u128 = 1 << 20;
pub const DEFAULT_TRIALS: usize = 100_000;
pub const CONFIDENCE: f64 = 0.99;
pub const DEFAULT_GREEDY_EVALS: usize = 200;
/// Coin space up to which greedy_local scores candidates exactly.
const GREEDY_EXACT_LIMIT: u128 = 1 << 14;
const GREEDY_TRIALS: usize = 512;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdversaryKind {
    None,
    RandomFlips,
    BlockKiller,
    PieceKiller,
    ProbeSetKiller,
    GreedyLocal,
}

impl AdversaryKind {
    pub const ALL: [AdversaryKind; 6] = [
        AdversaryKind::None,
        AdversaryKind::RandomFlips,
        AdversaryKind::BlockKiller,
        AdversaryKind::PieceKiller,
        AdversaryKind::ProbeSetKiller,
        AdversaryKind::GreedyLocal,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            AdversaryKind::None => "none",
            AdversaryKind::RandomFlips => "random_flips",
            AdversaryKind::BlockKiller => "block_killer",
            AdversaryKind::PieceKiller => "piece_killer",
            AdversaryKind::ProbeSetKiller => "probe_set_killer",
            AdversaryKind::GreedyLocal => "greedy_local",
        }
    }

    /// Whether the pattern depends on the query.
    pub fn targeted(&self) -> bool {
        !matches!(self, AdversaryKind::None | AdversaryKind::RandomFlips)
    }
}

impl fmt::Display for AdversaryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AdversaryKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().replace('-', "_");
        AdversaryKind::ALL
            .into_iter()
            .find(|k| k.name() == norm)
            .ok_or_else(|| Error::Parse(format!("unknown adversary {s:?}")))
    }
}

/// A strategy with its flip budget.
#[derive(Clone, Debug)]
pub struct Adversary {
    pub kind: AdversaryKind,
    pub budget: usize,
    pub seed: u64,
    pub greedy_evals: usize,
}

fn fnv(s: &str) -> u64 {
    s.bytes()
        .fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3))
}

fn parity(v: u64) -> bool {
    v.count_ones() % 2 == 1
}

impl Adversary {
    pub fn new(kind: AdversaryKind, budget: usize, seed: u64) -> Self {
        Adversary {
            kind,
            budget,
            seed,
            greedy_evals: DEFAULT_GREEDY_EVALS,
        }
    }

    /// Budget `⌊δN⌋` for a word of length `len`.
    pub fn for_delta(kind: AdversaryKind, delta: f64, len: usize, seed: u64) -> Self {
        Self::new(kind, CorruptionPattern::budget_for(delta, len), seed)
    }

    /// The corruption for query `q` against `word = encode(x)`.
    pub fn attack(&self, scheme: &dyn Scheme, x: &BitString, word: &BitString, q: &Query) -> Result<CorruptionPattern> {
        let len = word.len();
        let budget = self.budget.min(len);
        let qseed = seed::derive(self.seed, &[fnv(&q.to_string())]);
        let positions: Vec<usize> = match self.kind {
            AdversaryKind::None => Vec::new(),
            AdversaryKind::RandomFlips => {
                sample(&mut seed::rng(self.seed, &[2]), len, budget).into_vec()
            }
            AdversaryKind::BlockKiller => {
                let mut out = Vec::new();
                for seg in scheme.hadamard_targets(q)? {
                    let m = seg.message_bits;
                    // flipping every u with odd parity on the targeted
                    // coordinates inverts each of their 2-probe decodes
                    let mask = seg.coordinates.iter().fold(0u64, |a, &c| a | 1 << (m - 1 - c));
                    for u in 0..1u64 << m {
                        if out.len() == budget {
                            break;
                        }
                        if parity(u & mask) {
                            out.push(seg.offset + u as usize);
                        }
                    }
                }
                out
            }
            AdversaryKind::PieceKiller => {
                let mut out = Vec::new();
                for seg in scheme.hadamard_targets(q)? {
                    let m = seg.message_bits;
                    let c = seg.coordinates[0];
                    let hit = 1u64 << (m - 1 - c);
                    // a quarter of the piece: u_c = 1 and u_c' = 0 makes each
                    // repetition for coordinate c a fair coin
                    let guard = (0..m).find(|&o| o != c).map_or(0, |o| 1u64 << (m - 1 - o));
                    for u in 0..1u64 << m {
                        if out.len() == budget {
                            break;
                        }
                        if u & hit != 0 && u & guard == 0 {
                            out.push(seg.offset + u as usize);
                        }
                    }
                }
                out
            }
            AdversaryKind::ProbeSetKiller => {
                let set = scheme.probe_set(q).ok_or_else(|| {
                    Error::InvalidParameter("probe_set_killer needs a scheme with probe sets".into())
                })?;
                set.into_iter().take(budget).collect()
            }
            AdversaryKind::GreedyLocal => self.greedy(scheme, x, word, q, budget, qseed)?,
        };
        let pattern = CorruptionPattern::new(positions, len)?;
        assert!(
            pattern.weight() <= self.budget,
            "adversary emitted {} flips over budget {}",
            pattern.weight(),
            self.budget
        );
        Ok(pattern)
    }

    /// Hill climbing on the decoder's error for `q`: swap one flipped
    /// position for an unflipped one, keep the swap unless the error drops.
    /// A heuristic lower bound on adversarial power, nothing more.
    fn greedy(
        &self,
        scheme: &dyn Scheme,
        x: &BitString,
        word: &BitString,
        q: &Query,
        budget: usize,
        qseed: u64,
    ) -> Result<Vec<usize>> {
        let len = word.len();
        if budget == 0 || budget == len {
            return Ok((0..budget).collect());
        }
        let mut rng = seed::rng(qseed, &[3]);
        let mut current = sample(&mut rng, len, budget).into_vec();
        let mut flipped = BitString::from_positions(len, current.iter().copied())?;
        let truth = scheme.truth(x, q)?;
        let exact = scheme.coin_space(q).is_some_and(|c| c <= GREEDY_EXACT_LIMIT);
        let score = |view: &BitString| -> Result<f64> {
            if exact {
                let mut wrong = ProbSum::default();
                for_each_outcome(
                    GREEDY_EXACT_LIMIT as u64,
                    |coins| {
                        let mut o = ProbeOracle::new(view, scheme.probe_budget(q));
                        Ok(scheme.decode(&mut o, q, coins)? != truth)
                    },
                    |d, bad| {
                        if bad {
                            wrong.add(d)
                        }
                    },
                )?;
                let p = wrong.total();
                Ok(*p.numer() as f64 / *p.denom() as f64)
            } else {
                let mut bad = 0;
                for t in 0..GREEDY_TRIALS {
                    let mut coins = seed::rng(qseed, &[4, t as u64]);
                    let mut o = ProbeOracle::new(view, scheme.probe_budget(q));
                    bad += (scheme.decode(&mut o, q, &mut coins)? != truth) as usize;
                }
                Ok(bad as f64 / GREEDY_TRIALS as f64)
            }
        };
        let mut view = word.xor(&flipped)?;
        let mut best = score(&view)?;
        for _ in 0..self.greedy_evals {
            let out_slot = rng.gen_range(0..current.len());
            let incoming = loop {
                let p = rng.gen_range(0..len);
                if !flipped.get(p) {
                    break p;
                }
            };
            let outgoing = current[out_slot];
            view.flip(outgoing);
            view.flip(incoming);
            let s = score(&view)?;
            if s >= best {
                best = s;
                current[out_slot] = incoming;
                flipped.flip(outgoing);
                flipped.flip(incoming);
            } else {
                view.flip(outgoing);
                view.flip(incoming);
            }
        }
        Ok(current)
    }
}

/// Two-sided Clopper–Pearson interval for `k` failures in `n` trials.
pub fn clopper_pearson(k: u64, n: u64, confidence: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let alpha = 1.0 - confidence;
    // smallest x with I_x(a, b) ≥ target, by bisection
    let invert = |a: f64, b: f64, target: f64| {
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if beta_reg(a, b, mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    let (kf, nf) = (k as f64, n as f64);
    let lower = if k == 0 { 0.0 } else { invert(kf, nf - kf + 1.0, alpha / 2.0) };
    let upper = if k == n { 1.0 } else { invert(kf + 1.0, nf - kf, 1.0 - alpha / 2.0) };
    (lower, upper)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Exact whenever the coin space is at most [`EXACT_LIMIT`].
    #[default]
    Auto,
    Exact,
    Sample,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "auto" => Ok(Mode::Auto),
            "exact" => Ok(Mode::Exact),
            "sample" => Ok(Mode::Sample),
            other => Err(Error::Parse(format!("unknown mode {other:?}"))),
        }
    }
}

/// Failure probability of one query on one corrupted word.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QueryResult {
    pub query: String,
    pub flips: usize,
    /// `"exact"` or `"sampled"`.
    pub mode: String,
    /// Coin outcomes enumerated, or trials drawn.
    pub trials: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failures: Option<u64>,
    pub error: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact_error: Option<String>,
    pub ci_low: f64,
    pub ci_high: f64,
    pub half_width: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub notice: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pattern: Option<CorruptionPattern>,
}

/// Measures the failure probability of `scheme` on `view` for query `q`.
/// `stream` separates the sampling streams of different queries.
#[allow(clippy::too_many_arguments)]
pub fn measure_query(
    scheme: &dyn Scheme,
    view: &BitString,
    x: &BitString,
    q: &Query,
    trials: usize,
    seed: u64,
    stream: u64,
    mode: Mode,
) -> Result<QueryResult> {
    let truth = scheme.truth(x, q)?;
    let budget = scheme.probe_budget(q);
    let space = scheme.coin_space(q);
    let enumerable = space.is_some_and(|c| c <= EXACT_LIMIT);
    let mut notice = None;
    if mode == Mode::Exact && !enumerable {
        notice = Some(format!(
            "coin space {} exceeds 2^20; sampled instead",
            space.map_or("unbounded".into(), |c| c.to_string())
        ));
    }
    if enumerable && mode != Mode::Sample {
        let mut wrong = ProbSum::default();
        let outcomes = for_each_outcome(
            EXACT_LIMIT as u64,
            |coins| {
                let mut o = ProbeOracle::new(view, budget);
                Ok(scheme.decode(&mut o, q, coins)? != truth)
            },
            |d, bad| {
                if bad {
                    wrong.add(d)
                }
            },
        )?;
        let p = wrong.total();
        let error = *p.numer() as f64 / *p.denom() as f64;
        return Ok(QueryResult {
            query: q.to_string(),
            flips: 0,
            mode: "exact".into(),
            trials: outcomes,
            failures: None,
            error,
            exact_error: Some(if *p.denom() == 1 {
                p.numer().to_string()
            } else {
                format!("{}/{}", p.numer(), p.denom())
            }),
            ci_low: error,
            ci_high: error,
            half_width: 0.0,
            notice,
            pattern: None,
        });
    }
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    let failures = (0..trials as u64)
        .into_par_iter()
        .map(|t| -> Result<u64> {
            let mut coins = seed::rng(seed, &[10, stream, t]);
            let mut o = ProbeOracle::new(view, budget);
            Ok((scheme.decode(&mut o, q, &mut coins)? != truth) as u64)
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    let (lo, hi) = clopper_pearson(failures, trials as u64, CONFIDENCE);
    Ok(QueryResult {
        query: q.to_string(),
        flips: 0,
        mode: "sampled".into(),
        trials: trials as u64,
        failures: Some(failures),
        error: failures as f64 / trials as f64,
        exact_error: None,
        ci_low: lo,
        ci_high: hi,
        half_width: (hi - lo) / 2.0,
        notice,
        pattern: None,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub scheme: SchemeSpec,
    /// Stored length `N`.
    pub length: usize,
    /// Largest probe budget over the queries.
    pub probes: usize,
    pub delta: f64,
    pub flip_budget: usize,
    pub adversary: AdversaryKind,
    pub seed: u64,
    pub trials: usize,
    pub mode: Mode,
    pub item: BitString,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub build: Option<serde_json::Value>,
    pub per_query: Vec<QueryResult>,
    pub worst_query: Option<String>,
    pub worst_error: f64,
    pub worst_ci_high: f64,
    pub max_half_width: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub spec: SchemeSpec,
    pub delta: f64,
    pub adversary: AdversaryKind,
    pub trials: usize,
    pub seed: u64,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub item: Option<BitString>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub queries: Option<Vec<Query>>,
    #[serde(default)]
    pub record_patterns: bool,
    #[serde(default)]
    pub wall_time: bool,
}

impl ExperimentConfig {
    pub fn new(spec: SchemeSpec, delta: f64, adversary: AdversaryKind, trials: usize, seed: u64) -> Self {
        ExperimentConfig {
            spec,
            delta,
            adversary,
            trials,
            seed,
            mode: Mode::Auto,
            item: None,
            queries: None,
            record_patterns: false,
            wall_time: false,
        }
    }
}

/// Measurement against an already built scheme.
pub fn estimate_error(
    scheme: &dyn Scheme,
    cfg: &ExperimentConfig,
    x: &BitString,
    queries: &[Query],
) -> Result<ExperimentReport> {
    if !(0.0..=1.0).contains(&cfg.delta) {
        return Err(Error::InvalidParameter(format!("delta = {} outside [0, 1]", cfg.delta)));
    }
    cfg.spec.check_item(x)?;
    let started = Instant::now();
    let word = scheme.encode(x)?;
    let adversary = Adversary::for_delta(cfg.adversary, cfg.delta, word.len(), cfg.seed);
    let shared = if cfg.adversary.targeted() {
        None
    } else {
        let q0 = queries.first().cloned().unwrap_or(Query::Index(0));
        Some(adversary.attack(scheme, x, &word, &q0)?)
    };
    let mut per_query = Vec::with_capacity(queries.len());
    for (k, q) in queries.iter().enumerate() {
        let pattern = match &shared {
            Some(p) => p.clone(),
            None => adversary.attack(scheme, x, &word, q)?,
        };
        let view = corrupt(&word, &pattern)?;
        let mut res = measure_query(scheme, &view, x, q, cfg.trials, cfg.seed, k as u64, cfg.mode)?;
        res.flips = pattern.weight();
        if cfg.record_patterns {
            res.pattern = Some(pattern);
        }
        per_query.push(res);
    }
    let worst = per_query
        .iter()
        .enumerate()
        .max_by(|(i, a), (j, b)| a.error.total_cmp(&b.error).then(j.cmp(i)));
    Ok(ExperimentReport {
        scheme: cfg.spec.clone(),
        length: word.len(),
        probes: queries.iter().map(|q| scheme.probe_budget(q)).max().unwrap_or(0),
        delta: cfg.delta,
        flip_budget: adversary.budget,
        adversary: cfg.adversary,
        seed: cfg.seed,
        trials: cfg.trials,
        mode: cfg.mode,
        item: x.clone(),
        build: scheme.build_report(),
        worst_query: worst.map(|(_, r)| r.query.clone()),
        worst_error: worst.map_or(0.0, |(_, r)| r.error),
        worst_ci_high: per_query.iter().map(|r| r.ci_high).fold(0.0, f64::max),
        max_half_width: per_query.iter().map(|r| r.half_width).fold(0.0, f64::max),
        per_query,
        wall_time_ms: cfg.wall_time.then(|| started.elapsed().as_secs_f64() * 1e3),
    })
}

/// Builds the scheme from its spec and seed, then measures.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let scheme = cfg.spec.build(cfg.seed)?;
    let x = cfg.item.clone().unwrap_or_else(|| cfg.spec.default_item(cfg.seed));
    let queries = match &cfg.queries {
        Some(q) => q.clone(),
        None => scheme.queries(&x),
    };
    estimate_error(scheme.as_ref(), cfg, &x, &queries)
}

/// Grid over schemes × δ × adversaries.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct SweepSpec {
    #[serde(default)]
    pub schemes: Vec<SchemeSpec>,
    #[serde(default)]
    pub deltas: Vec<f64>,
    #[serde(default)]
    pub adversaries: Vec<AdversaryKind>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub mode: Mode,
}

fn default_trials() -> usize {
    DEFAULT_TRIALS
}

/// One grid cell: a report, or the error that stopped it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SweepCell {
    Report(Box<ExperimentReport>),
    Failed {
        scheme: SchemeSpec,
        delta: f64,
        adversary: AdversaryKind,
        error: String,
    },
}

/// One cell per grid point, in grid order; failing cells are recorded and
/// the sweep continues. Every cell uses the sweep seed, so it can be rerun on
/// its own as an experiment.
pub fn sweep(spec: &SweepSpec) -> Vec<SweepCell> {
    let mut out = Vec::new();
    for scheme in &spec.schemes {
        for &delta in &spec.deltas {
            for &adversary in &spec.adversaries {
                let mut cfg = ExperimentConfig::new(scheme.clone(), delta, adversary, spec.trials, spec.seed);
                cfg.mode = spec.mode;
                out.push(match run_experiment(&cfg) {
                    Ok(r) => SweepCell::Report(Box::new(r)),
                    Err(e) => SweepCell::Failed {
                        scheme: scheme.clone(),
                        delta,
                        adversary,
                        error: e.to_string(),
                    },
                });
            }
        }
    }
    out
}

pub const CSV_HEADER: &str =
    "scheme,params,length,probes,delta,flip_budget,adversary,seed,query,flips,mode,trials,error,exact_error,ci_low,ci_high,half_width";

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// One CSV row per query, without the header.
pub fn csv_rows(report: &ExperimentReport) -> Vec<String> {
    let params = serde_json::to_string(&report.scheme).expect("spec serializes");
    report
        .per_query
        .iter()
        .map(|r| {
            [
                report.scheme.id().to_string(),
                csv_field(&params),
                report.length.to_string(),
                report.probes.to_string(),
                report.delta.to_string(),
                report.flip_budget.to_string(),
                report.adversary.to_string(),
                report.seed.to_string(),
                csv_field(&r.query),
                r.flips.to_string(),
                r.mode.clone(),
                r.trials.to_string(),
                r.error.to_string(),
                r.exact_error.clone().unwrap_or_default(),
                r.ci_low.to_string(),
                r.ci_high.to_string(),
                r.half_width.to_string(),
            ]
            .join(",")
        })
        .collect()
}

/// Header plus the rows of every report.
pub fn to_csv<'a>(reports: impl IntoIterator<Item = &'a ExperimentReport>) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in reports {
        for row in csv_rows(r) {
            out.push_str(&row);
            out.push('\n');
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adversary_names_roundtrip() {
        for k in AdversaryKind::ALL {
            assert_eq!(k.name().parse::<AdversaryKind>().unwrap(), k);
        }
        assert_eq!("block-killer".parse::<AdversaryKind>().unwrap(), AdversaryKind::BlockKiller);
        assert!("nope".parse::<AdversaryKind>().is_err());
    }

    #[test]
    fn clopper_pearson_known_values() {
        let (lo, hi) = clopper_pearson(0, 10, 0.95);
        assert_eq!(lo, 0.0);
        assert!((hi - 0.3084971).abs() < 1e-6);
        let (lo, hi) = clopper_pearson(5, 10, 0.95);
        assert!((lo - 0.1870860).abs() < 1e-6);
        assert!((hi - 0.8129140).abs() < 1e-6);
        let (_, hi) = clopper_pearson(10, 10, 0.99);
        assert_eq!(hi, 1.0);
    }

    #[test]
    fn none_is_empty_and_noiseless_is_exact_zero() {
        let cfg = ExperimentConfig::new(SchemeSpec::IpTable { n: 6, r: 3, p: 2 }, 0.0, AdversaryKind::None, 10, 1);
        let rep = run_experiment(&cfg).unwrap();
        assert_eq!(rep.worst_error, 0.0);
        assert!(rep.per_query.iter().all(|r| r.mode == "exact" && r.flips == 0));
        assert_eq!(rep.per_query.len(), 42);
    }

    #[test]
    fn hadamard_worst_pattern_within_two_delta() {
        let spec = SchemeSpec::HadLdc { n: 8 };
        for kind in [AdversaryKind::RandomFlips, AdversaryKind::BlockKiller, AdversaryKind::GreedyLocal] {
            let mut cfg = ExperimentConfig::new(spec.clone(), 0.05, kind, 100, 3);
            cfg.queries = Some(vec![Query::Index(0), Query::Index(5)]);
            let rep = run_experiment(&cfg).unwrap();
            assert_eq!(rep.flip_budget, 12);
            assert!(rep.worst_error <= 0.1 + 1e-12, "{kind}: {}", rep.worst_error);
        }
    }

    #[test]
    fn block_killer_inverts_a_hadamard_bit() {
        let spec = SchemeSpec::HadLdc { n: 4 };
        let mut cfg = ExperimentConfig::new(spec, 0.5, AdversaryKind::BlockKiller, 10, 0);
        cfg.queries = Some(vec![Query::Index(2)]);
        let rep = run_experiment(&cfg).unwrap();
        assert_eq!(rep.per_query[0].exact_error.as_deref(), Some("1"));
    }

    #[test]
    fn piece_killer_quarter_on_substring() {
        let spec = SchemeSpec::Substring { n: 16, r: 4, t: 3 };
        let mut cfg = ExperimentConfig::new(spec, 1.0 / 16.0, AdversaryKind::PieceKiller, 2000, 5);
        cfg.queries = Some(vec![Query::Vector("1000000000000000".parse().unwrap())]);
        cfg.record_patterns = true;
        let rep = run_experiment(&cfg).unwrap();
        let r = &rep.per_query[0];
        assert_eq!(r.flips, 4);
        assert_eq!(r.pattern.as_ref().unwrap().positions(), &[8, 9, 10, 11]);
        assert_eq!(r.exact_error.as_deref(), Some("1/2"));
    }

    #[test]
    fn probe_set_killer_on_bmrv() {
        let spec = SchemeSpec::Bmrv {
            n: 16,
            s: 1,
            eps: 0.25,
            n_prime: Some(200),
            d: Some(8),
        };
        let scheme = spec.build(2).unwrap();
        let x = spec.default_item(2);
        let word = scheme.encode(&x).unwrap();
        let adv = Adversary::new(AdversaryKind::ProbeSetKiller, 8, 0);
        let q = Query::Index(3);
        let pat = adv.attack(scheme.as_ref(), &x, &word, &q).unwrap();
        let mut set = scheme.probe_set(&q).unwrap();
        set.sort_unstable();
        assert_eq!(pat.positions(), set.as_slice());
    }

    #[test]
    fn sampling_agrees_with_exact() {
        let mut cfg = ExperimentConfig::new(SchemeSpec::HadIp { n: 6 }, 0.1, AdversaryKind::RandomFlips, 20_000, 9);
        cfg.queries = Some(vec![Query::Vector("101101".parse().unwrap())]);
        let exact = run_experiment(&cfg).unwrap();
        cfg.mode = Mode::Sample;
        let sampled = run_experiment(&cfg).unwrap();
        let (e, s) = (&exact.per_query[0], &sampled.per_query[0]);
        assert!(e.error > 0.0);
        assert!(s.ci_low <= e.error && e.error <= s.ci_high, "{e:?} {s:?}");
    }

    #[test]
    fn forced_exact_falls_back_with_notice() {
        let mut cfg = ExperimentConfig::new(SchemeSpec::Substring { n: 16, r: 4, t: 5 }, 0.0, AdversaryKind::None, 50, 1);
        cfg.mode = Mode::Exact;
        cfg.queries = Some(vec![Query::Vector("1100000000000001".parse().unwrap())]);
        let rep = run_experiment(&cfg).unwrap();
        assert_eq!(rep.per_query[0].mode, "sampled");
        assert!(rep.per_query[0].notice.is_some());
    }

    #[test]
    fn reports_are_reproducible() {
        let mut cfg = ExperimentConfig::new(SchemeSpec::Substring { n: 8, r: 2, t: 3 }, 0.05, AdversaryKind::GreedyLocal, 300, 4);
        cfg.mode = Mode::Sample;
        let a = serde_json::to_string(&run_experiment(&cfg).unwrap()).unwrap();
        let b = serde_json::to_string(&run_experiment(&cfg).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn sweep_grid_shapes() {
        assert!(sweep(&SweepSpec::default()).is_empty());
        let spec = SweepSpec {
            schemes: vec![SchemeSpec::HadIp { n: 4 }, SchemeSpec::IpTable { n: 9, r: 10, p: 1 }],
            deltas: vec![0.0, 0.1],
            adversaries: vec![AdversaryKind::RandomFlips],
            trials: 10,
            seed: 1,
            mode: Mode::Auto,
        };
        let cells = sweep(&spec);
        assert_eq!(cells.len(), 4);
        assert!(matches!(cells[0], SweepCell::Report(_)));
        assert!(matches!(cells[3], SweepCell::Failed { .. }));
        let text = serde_json::to_string(&cells).unwrap();
        let back: Vec<SweepCell> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, cells);
    }

    #[test]
    fn csv_has_one_row_per_query() {
        let cfg = ExperimentConfig::new(SchemeSpec::HadLdc { n: 3 }, 0.0, AdversaryKind::None, 10, 1);
        let rep = run_experiment(&cfg).unwrap();
        let csv = to_csv([&rep]);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[0], CSV_HEADER);
        assert!(lines[1].starts_with("had-ldc,\"{\"\"scheme\"\":\"\"had-ldc\"\",\"\"n\"\":3}\",8,2,0,0,none,1,0,0,exact,8,0,0,"));
    }
}
