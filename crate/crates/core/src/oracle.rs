//! Counted, corruptible access to an encoded structure.
//!
//! Decoders never see a codeword directly: they read it through a [`Probe`]
//! implementation that enforces the probe budget, and draw their randomness
//! through [`Coins`]. Routing all randomness through `Coins` lets the same
//! decoder run either on a seeded generator or under [`for_each_outcome`],
//! which walks every outcome of the decoder's coin flips with its exact
//! probability.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};

use num_rational::Ratio;
use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{Error, Result};

/// Exact probability.
pub type Prob = Ratio<u128>;

static BUDGET_VIOLATIONS: AtomicU64 = AtomicU64::new(0);

/// Number of refused probes (budget overruns) in this process so far.
pub fn budget_violations() -> u64 {
    BUDGET_VIOLATIONS.load(Ordering::SeqCst)
}

fn refuse(budget: usize) -> Error {
    BUDGET_VIOLATIONS.fetch_add(1, Ordering::SeqCst);
    Error::BudgetExhausted { budget }
}

/// A set of distinct bit positions the adversary flips.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CorruptionPattern {
    positions: Vec<usize>,
}

impl CorruptionPattern {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Positions are sorted and deduplicated; every position must be `< len`.
    pub fn new<I: IntoIterator<Item = usize>>(positions: I, len: usize) -> Result<Self> {
        let mut positions: Vec<usize> = positions.into_iter().collect();
        positions.sort_unstable();
        positions.dedup();
        if let Some(&last) = positions.last() {
            if last >= len {
                return Err(Error::IndexOutOfRange { index: last, bound: len });
            }
        }
        Ok(CorruptionPattern { positions })
    }

    pub fn positions(&self) -> &[usize] {
        &self.positions
    }

    pub fn weight(&self) -> usize {
        self.positions.len()
    }

    pub fn contains(&self, position: usize) -> bool {
        self.positions.binary_search(&position).is_ok()
    }

    /// Largest flip count allowed at noise level `delta` on `len` bits.
    pub fn budget_for(delta: f64, len: usize) -> usize {
        if delta <= 0.0 {
            return 0;
        }
        (((delta * len as f64) + 1e-9).floor() as usize).min(len)
    }

    pub fn union(&self, other: &CorruptionPattern) -> CorruptionPattern {
        let mut positions = self.positions.clone();
        positions.extend_from_slice(&other.positions);
        positions.sort_unstable();
        positions.dedup();
        CorruptionPattern { positions }
    }
}

/// The word the decoder actually sees: `codeword` with `pattern` flipped.
pub fn corrupt(codeword: &BitString, pattern: &CorruptionPattern) -> Result<BitString> {
    let mut view = codeword.clone();
    for &p in pattern.positions() {
        if p >= view.len() {
            return Err(Error::IndexOutOfRange {
                index: p,
                bound: view.len(),
            });
        }
        view.flip(p);
    }
    Ok(view)
}

/// Bit-level read access with an enforced budget.
pub trait Probe {
    fn probe(&mut self, position: usize) -> Result<bool>;
    fn len(&self) -> usize;
    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Single-use oracle over a (possibly corrupted) word.
#[derive(Debug)]
pub struct ProbeOracle<'a> {
    view: &'a BitString,
    budget: usize,
    log: Vec<usize>,
}

impl<'a> ProbeOracle<'a> {
    pub fn new(view: &'a BitString, budget: usize) -> Self {
        ProbeOracle {
            view,
            budget,
            log: Vec::with_capacity(budget.min(64)),
        }
    }

    pub fn used(&self) -> usize {
        self.log.len()
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    /// Probed positions in order.
    pub fn log(&self) -> &[usize] {
        &self.log
    }
}

impl Probe for ProbeOracle<'_> {
    fn probe(&mut self, position: usize) -> Result<bool> {
        if self.log.len() >= self.budget {
            return Err(refuse(self.budget));
        }
        if position >= self.view.len() {
            return Err(Error::ProbeOutOfRange {
                position,
                len: self.view.len(),
            });
        }
        self.log.push(position);
        Ok(self.view.get(position))
    }

    fn len(&self) -> usize {
        self.view.len()
    }
}

/// Contiguous sub-range `[offset, offset + len)` of another oracle.
pub struct Window<'o> {
    inner: &'o mut dyn Probe,
    offset: usize,
    len: usize,
}

impl<'o> Window<'o> {
    pub fn new(inner: &'o mut dyn Probe, offset: usize, len: usize) -> Result<Self> {
        if offset + len > inner.len() {
            return Err(Error::IndexOutOfRange {
                index: offset + len,
                bound: inner.len(),
            });
        }
        Ok(Window { inner, offset, len })
    }
}

impl Probe for Window<'_> {
    fn probe(&mut self, position: usize) -> Result<bool> {
        if position >= self.len {
            return Err(Error::ProbeOutOfRange {
                position,
                len: self.len,
            });
        }
        self.inner.probe(self.offset + position)
    }

    fn len(&self) -> usize {
        self.len
    }
}

/// Caps the number of probes made through it, on top of the inner budget.
pub struct Limited<'o> {
    inner: &'o mut dyn Probe,
    budget: usize,
    used: usize,
}

impl<'o> Limited<'o> {
    pub fn new(inner: &'o mut dyn Probe, budget: usize) -> Self {
        Limited {
            inner,
            budget,
            used: 0,
        }
    }
}

impl Probe for Limited<'_> {
    fn probe(&mut self, position: usize) -> Result<bool> {
        if self.used >= self.budget {
            return Err(refuse(self.budget));
        }
        self.used += 1;
        self.inner.probe(position)
    }

    fn len(&self) -> usize {
        self.inner.len()
    }
}

/// Source of uniform decoder randomness.
pub trait Coins {
    /// Uniform value in `[0, bound)`; `bound ≥ 1`.
    fn below(&mut self, bound: u64) -> u64;

    fn bit(&mut self) -> bool {
        self.below(2) == 1
    }
}

impl<R: RngCore> Coins for R {
    fn below(&mut self, bound: u64) -> u64 {
        self.gen_range(0..bound)
    }
}

/// Replays a script of coin values, extending it with zeros on demand.
struct Script {
    values: Vec<(u64, u64)>,
    cursor: usize,
}

impl Coins for Script {
    fn below(&mut self, bound: u64) -> u64 {
        assert!(bound >= 1, "coin bound must be positive");
        let v = if self.cursor < self.values.len() {
            let (v, b) = self.values[self.cursor];
            assert_eq!(b, bound, "decoder coin requests must be deterministic");
            v
        } else {
            self.values.push((0, bound));
            0
        };
        self.cursor += 1;
        v
    }
}

/// Runs `run` once for every outcome of its coin flips, passing each result to
/// `visit` together with the outcome's probability `1 / denominator`.
///
/// Returns the number of outcomes; fails with [`Error::NotEnumerable`] once
/// more than `limit` outcomes would be needed.
pub fn for_each_outcome<T>(
    limit: u64,
    mut run: impl FnMut(&mut dyn Coins) -> Result<T>,
    mut visit: impl FnMut(u128, T),
) -> Result<u64> {
    let mut script = Script {
        values: Vec::new(),
        cursor: 0,
    };
    let mut count = 0u64;
    loop {
        if count >= limit {
            return Err(Error::NotEnumerable { limit });
        }
        script.cursor = 0;
        let out = run(&mut script)?;
        script.values.truncate(script.cursor);
        let mut denom: u128 = 1;
        for &(_, b) in &script.values {
            denom = denom
                .checked_mul(b as u128)
                .ok_or(Error::NotEnumerable { limit })?;
        }
        visit(denom, out);
        count += 1;
        // advance the mixed-radix odometer from the deepest coin
        loop {
            match script.values.last_mut() {
                None => return Ok(count),
                Some((v, b)) if *v + 1 < *b => {
                    *v += 1;
                    break;
                }
                Some(_) => {
                    script.values.pop();
                }
            }
        }
    }
}

/// Exact sum of probabilities `Σ 1/denominator`, grouped by denominator.
#[derive(Default, Debug, Clone)]
pub struct ProbSum {
    by_denom: BTreeMap<u128, u128>,
}

impl ProbSum {
    pub fn add(&mut self, denom: u128) {
        *self.by_denom.entry(denom).or_insert(0) += 1;
    }

    pub fn total(&self) -> Prob {
        self.by_denom
            .iter()
            .fold(Prob::from_integer(0), |acc, (&d, &c)| acc + Prob::new(c, d))
    }
}

/// Exact error probability of a decoder on a fixed word, over all of its coin
/// outcomes. `decode` returns whether the answer was correct.
pub fn exact_error(
    limit: u64,
    mut decode: impl FnMut(&mut dyn Coins) -> Result<bool>,
) -> Result<Prob> {
    let mut wrong = ProbSum::default();
    for_each_outcome(limit, &mut decode, |d, ok| {
        if !ok {
            wrong.add(d)
        }
    })?;
    Ok(wrong.total())
}

/// Marginal distribution of each probe slot: entry `k` maps the position read
/// by the `k`-th probe (or `None` when the decoder stopped before probing `k`
/// times) to its exact probability.
pub type ProbeDistribution = Vec<BTreeMap<Option<usize>, Prob>>;

/// Enumerates the decoder's randomness and records where each probe lands.
///
/// `decode` receives a fresh oracle over `view` with the given budget.
pub fn probe_distribution<T>(
    view: &BitString,
    budget: usize,
    limit: u64,
    mut decode: impl FnMut(&mut ProbeOracle<'_>, &mut dyn Coins) -> Result<T>,
) -> Result<ProbeDistribution> {
    let mut counts: Vec<BTreeMap<Option<usize>, ProbSum>> = vec![BTreeMap::new(); budget];
    for_each_outcome(
        limit,
        |coins| {
            let mut oracle = ProbeOracle::new(view, budget);
            decode(&mut oracle, coins)?;
            Ok(oracle.log().to_vec())
        },
        |denom, log| {
            for (slot, slot_counts) in counts.iter_mut().enumerate() {
                slot_counts.entry(log.get(slot).copied()).or_default().add(denom);
            }
        },
    )?;
    Ok(counts
        .into_iter()
        .map(|slot| slot.into_iter().map(|(k, v)| (k, v.total())).collect())
        .collect())
}
