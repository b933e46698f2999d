//! `s`-out-of-`n` Membership.
//!
//! [`BmrvStructure`] is the one-probe structure: every universe element `i`
//! owns a probe set `P_i` of `d` positions in a string `y` of length `n'`,
//! and the encoding of a set `S` is the characteristic vector of
//! `∪_{i∈S} P_i`. Construction is Las Vegas: probe sets are sampled and the
//! structure is accepted only after every index is verified to agree with
//! `x_i` on at least a `1 − ε` fraction of its probe set, for every set of
//! size at most `s`.
//!
//! [`ComposedMembership`] makes the structure error-correcting: `y` is
//! permuted, cut into `b = d` blocks of `a` bits, and every block is stored
//! under the Hadamard code.

use rand::seq::index::sample;
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::bits::{bounded_weight_count, BitString};
use crate::error::{Error, Result};
use crate::hadamard::HadamardCode;
use crate::oracle::{Coins, Probe, Window};
use crate::seed;

/// Above this many candidate sets the verifier samples instead of
/// certifying every set.
pub const EXHAUSTIVE_SET_LIMIT: u64 = 1_000_000;
const SAMPLED_SETS: usize = 1_000_000;
const SEARCH_NODE_LIMIT: u64 = 20_000_000;

/// Disagreements tolerated inside a probe set of size `d` at error `eps`.
pub fn allowed_disagreements(eps: f64, d: usize) -> usize {
    ((eps * d as f64) + 1e-9).floor() as usize
}

/// `(n', d) = (⌈(100/ε²)·s·log₂ n⌉, ⌈log₂ n / ε⌉)`.
pub fn default_parameters(n: usize, s: usize, eps: f64) -> (usize, usize) {
    let log_n = (n.max(2) as f64).log2();
    let n_prime = ((100.0 / (eps * eps)) * s.max(1) as f64 * log_n).ceil() as usize;
    let d = (log_n / eps).ceil() as usize;
    (n_prime.max(d), d.max(1))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Coverage {
    /// Every set of weight ≤ s certified.
    Complete { sets: String },
    /// Uniformly sampled sets; `shortfall` sets were not examined.
    Sampled { sets: u64, shortfall: String },
}

/// What the verifier established about a probe-set system.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verification {
    pub coverage: Coverage,
    /// Per index, the fewest agreeing positions over all examined sets.
    pub min_agreement: Vec<usize>,
    pub d: usize,
}

impl Verification {
    /// Largest realized `Pr_{j∈P_i}[y_j ≠ x_i]` over all indices and sets.
    pub fn realized_eps(&self) -> f64 {
        let worst = self.min_agreement.iter().copied().min().unwrap_or(self.d);
        (self.d - worst) as f64 / self.d as f64
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BmrvBuildReport {
    pub seed: u64,
    pub attempts: usize,
    pub n_prime: usize,
    pub d: usize,
    pub verification: Verification,
}

#[derive(Clone, Debug)]
pub struct BmrvOptions {
    pub n_prime: Option<usize>,
    pub d: Option<usize>,
    pub max_attempts: usize,
}

impl Default for BmrvOptions {
    fn default() -> Self {
        BmrvOptions {
            n_prime: None,
            d: None,
            max_attempts: 64,
        }
    }
}

/// One-probe membership structure.
#[derive(Clone, Debug)]
pub struct BmrvStructure {
    n: usize,
    s: usize,
    eps: f64,
    n_prime: usize,
    probe_sets: Vec<Vec<usize>>,
}

/// Encoded set together with each index's agreement count.
#[derive(Clone, Debug, PartialEq)]
pub struct BmrvEncoding {
    pub y: BitString,
    pub agreement: Vec<usize>,
}

impl BmrvStructure {
    /// Unverified structure over explicit probe sets (all of equal size).
    pub fn from_probe_sets(
        n: usize,
        s: usize,
        eps: f64,
        n_prime: usize,
        probe_sets: Vec<Vec<usize>>,
    ) -> Result<Self> {
        if probe_sets.len() != n {
            return Err(Error::LengthMismatch {
                left: probe_sets.len(),
                right: n,
            });
        }
        if s > n {
            return Err(Error::InvalidParameter(format!("s = {s} exceeds n = {n}")));
        }
        if !(0.0..1.0).contains(&eps) {
            return Err(Error::InvalidParameter(format!("eps = {eps} outside [0, 1)")));
        }
        let d = probe_sets.first().map_or(0, Vec::len);
        let mut sets = Vec::with_capacity(n);
        for set in probe_sets {
            let mut set = set;
            set.sort_unstable();
            set.dedup();
            if set.len() != d || d == 0 {
                return Err(Error::InvalidParameter(
                    "probe sets must be nonempty, duplicate-free and of equal size".into(),
                ));
            }
            if let Some(&last) = set.last() {
                if last >= n_prime {
                    return Err(Error::IndexOutOfRange {
                        index: last,
                        bound: n_prime,
                    });
                }
            }
            sets.push(set);
        }
        Ok(BmrvStructure {
            n,
            s,
            eps,
            n_prime,
            probe_sets: sets,
        })
    }

    /// Samples probe sets until verification passes.
    pub fn build(n: usize, s: usize, eps: f64, seed: u64, opts: &BmrvOptions) -> Result<(Self, BmrvBuildReport)> {
        if n == 0 || s > n {
            return Err(Error::InvalidParameter(format!(
                "need 1 ≤ n and s ≤ n, got n = {n}, s = {s}"
            )));
        }
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::InvalidParameter(format!("eps = {eps} outside (0, 1)")));
        }
        let (default_n_prime, default_d) = default_parameters(n, s, eps);
        let d = opts.d.unwrap_or(default_d);
        let n_prime = opts.n_prime.unwrap_or(default_n_prime);
        if d == 0 || d > n_prime {
            return Err(Error::InvalidParameter(format!(
                "probe-set size d = {d} must lie in [1, n' = {n_prime}]"
            )));
        }
        let mut last_err = None;
        for attempt in 0..opts.max_attempts.max(1) {
            let mut rng = seed::rng(seed, &[attempt as u64]);
            let sets = (0..n)
                .map(|_| sample(&mut rng, n_prime, d).into_vec())
                .collect();
            let st = Self::from_probe_sets(n, s, eps, n_prime, sets)?;
            match st.verify(seed) {
                Ok(verification) => {
                    let report = BmrvBuildReport {
                        seed,
                        attempts: attempt + 1,
                        n_prime,
                        d,
                        verification,
                    };
                    return Ok((st, report));
                }
                Err(e @ Error::VerificationFailed { .. }) => last_err = Some(e),
                Err(e) => return Err(e),
            }
        }
        Err(Error::ConstructionFailed {
            attempts: opts.max_attempts.max(1),
            reason: format!(
                "n = {n}, s = {s}, eps = {eps}, n' = {n_prime}, d = {d}; last failure: {}",
                last_err.map_or_else(|| "none".into(), |e| e.to_string())
            ),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn n_prime(&self) -> usize {
        self.n_prime
    }

    pub fn d(&self) -> usize {
        self.probe_sets[0].len()
    }

    pub fn probe_set(&self, i: usize) -> &[usize] {
        &self.probe_sets[i]
    }

    fn check_item(&self, x: &BitString) -> Result<()> {
        if x.len() != self.n {
            return Err(Error::LengthMismatch {
                left: x.len(),
                right: self.n,
            });
        }
        if x.weight() > self.s {
            return Err(Error::WeightExceeded {
                weight: x.weight(),
                cap: self.s,
            });
        }
        Ok(())
    }

    /// Characteristic vector of the union of the members' probe sets, plus
    /// its agreement profile; fails naming the first index whose agreement
    /// falls below `(1 − ε)·d`.
    pub fn encode(&self, x: &BitString) -> Result<BmrvEncoding> {
        self.check_item(x)?;
        let mut y = BitString::zeros(self.n_prime);
        for i in x.ones_positions() {
            for &j in &self.probe_sets[i] {
                y.set(j, true);
            }
        }
        let d = self.d();
        let required = d - allowed_disagreements(self.eps, d);
        let mut agreement = Vec::with_capacity(self.n);
        for (i, set) in self.probe_sets.iter().enumerate() {
            let xi = x.get(i);
            let agree = set.iter().filter(|&&j| y.get(j) == xi).count();
            if agree < required {
                return Err(Error::VerificationFailed {
                    index: i,
                    agree,
                    of: d,
                    required,
                });
            }
            agreement.push(agree);
        }
        Ok(BmrvEncoding { y, agreement })
    }

    /// One probe at a uniform element of `P_i`.
    pub fn decode(&self, oracle: &mut dyn Probe, i: usize, coins: &mut dyn Coins) -> Result<bool> {
        if i >= self.n {
            return Err(Error::IndexOutOfRange { index: i, bound: self.n });
        }
        let set = &self.probe_sets[i];
        let j = set[coins.below(set.len() as u64) as usize];
        oracle.probe(j)
    }

    /// Checks that every index keeps agreement `≥ (1 − ε)·d` for every set
    /// of weight ≤ s.
    ///
    /// Under the union rule an index inside the set agrees everywhere, so the
    /// work is a max-coverage question per index: how much of `P_i` can `s`
    /// other probe sets cover. It is answered exactly by branch and bound;
    /// when that search would be too large and there are more than
    /// [`EXHAUSTIVE_SET_LIMIT`] sets, uniformly sampled sets are checked
    /// instead and the shortfall is recorded.
    pub fn verify(&self, seed: u64) -> Result<Verification> {
        let d = self.d();
        let allowed = allowed_disagreements(self.eps, d);
        let total_sets = bounded_weight_count(self.n as u64, self.s as u64);
        if let Some(min_agreement) = self.exact_min_agreement(Some(allowed))? {
            return Ok(Verification {
                coverage: Coverage::Complete {
                    sets: total_sets.to_string(),
                },
                min_agreement,
                d,
            });
        }
        if total_sets <= EXHAUSTIVE_SET_LIMIT.into() {
            return Err(Error::Infeasible(
                "max-coverage search exceeded its node limit on a small instance".into(),
            ));
        }
        self.verify_sampled(seed, &total_sets)
    }

    /// Fewest agreeing positions per index over every set of weight ≤ s, or
    /// `None` when the search is too large. With `allowed` set, stops at the
    /// first index whose coverage exceeds it.
    pub fn exact_min_agreement(&self, allowed: Option<usize>) -> Result<Option<Vec<usize>>> {
        let d = self.d();
        let mut out = Vec::with_capacity(self.n);
        for (i, cands) in self.overlap_lists().iter().enumerate() {
            let Some(cov) = max_coverage(cands, self.s, SEARCH_NODE_LIMIT) else {
                return Ok(None);
            };
            if let Some(allowed) = allowed.filter(|&a| cov > a) {
                return Err(Error::VerificationFailed {
                    index: i,
                    agree: d - cov,
                    of: d,
                    required: d - allowed,
                });
            }
            out.push(d - cov);
        }
        Ok(Some(out))
    }

    fn verify_sampled(&self, seed: u64, total_sets: &num_bigint::BigUint) -> Result<Verification> {
        let d = self.d();
        let mut rng = seed::rng(seed, &[u64::MAX]);
        let mut min_agreement = vec![d; self.n];
        let mut universe: Vec<usize> = (0..self.n).collect();
        for _ in 0..SAMPLED_SETS {
            let k = rand::Rng::gen_range(&mut rng, 0..=self.s);
            let (members, _) = universe.partial_shuffle(&mut rng, k);
            let x = BitString::from_positions(self.n, members.iter().copied())?;
            let enc = self.encode(&x)?;
            for (m, a) in min_agreement.iter_mut().zip(&enc.agreement) {
                *m = (*m).min(*a);
            }
        }
        let examined = SAMPLED_SETS as u64;
        let shortfall = if *total_sets > examined.into() {
            (total_sets - examined).to_string()
        } else {
            "0".into()
        };
        Ok(Verification {
            coverage: Coverage::Sampled {
                sets: examined,
                shortfall,
            },
            min_agreement,
            d,
        })
    }

    /// For every index `i`, the sets `P_i ∩ P_k` (k ≠ i) as bit masks over
    /// the positions of `P_i`, heaviest first.
    fn overlap_lists(&self) -> Vec<Vec<BitString>> {
        let d = self.d();
        let mut owners: Vec<Vec<u32>> = vec![Vec::new(); self.n_prime];
        for (k, set) in self.probe_sets.iter().enumerate() {
            for &j in set {
                owners[j].push(k as u32);
            }
        }
        let mut slot = vec![usize::MAX; self.n];
        let mut out = Vec::with_capacity(self.n);
        for (i, set) in self.probe_sets.iter().enumerate() {
            let mut masks: Vec<BitString> = Vec::new();
            let mut touched = Vec::new();
            for (local, &j) in set.iter().enumerate() {
                for &k in &owners[j] {
                    let k = k as usize;
                    if k == i {
                        continue;
                    }
                    if slot[k] == usize::MAX {
                        slot[k] = masks.len();
                        masks.push(BitString::zeros(d));
                        touched.push(k);
                    }
                    masks[slot[k]].set(local, true);
                }
            }
            for k in touched {
                slot[k] = usize::MAX;
            }
            masks.sort_by_key(|m| std::cmp::Reverse(m.weight()));
            out.push(masks);
        }
        out
    }
}

/// Largest `|∪ chosen|` over at most `s` of `cands` (sorted heaviest first),
/// or `None` if the search needs more than `node_limit` nodes.
fn max_coverage(cands: &[BitString], s: usize, node_limit: u64) -> Option<usize> {
    if s == 0 || cands.is_empty() {
        return Some(0);
    }
    let weights: Vec<usize> = cands.iter().map(BitString::weight).collect();
    let mut best = 0;
    let mut nodes = 0u64;
    let empty = BitString::zeros(cands[0].len());
    let ok = cover_dfs(cands, &weights, s, 0, &empty, &mut best, &mut nodes, node_limit);
    ok.then_some(best)
}

#[allow(clippy::too_many_arguments)]
fn cover_dfs(
    cands: &[BitString],
    weights: &[usize],
    left: usize,
    start: usize,
    current: &BitString,
    best: &mut usize,
    nodes: &mut u64,
    limit: u64,
) -> bool {
    let here = current.weight();
    *best = (*best).max(here);
    if left == 0 {
        return true;
    }
    for idx in start..cands.len() {
        // optimistic: the next `left` heaviest masks add all their weight
        let bound: usize = here + weights[idx..].iter().take(left).sum::<usize>();
        if bound <= *best {
            break;
        }
        *nodes += 1;
        if *nodes > limit {
            return false;
        }
        let next = current.or(&cands[idx]).expect("equal lengths");
        if !cover_dfs(cands, weights, left - 1, idx + 1, &next, best, nodes, limit) {
            return false;
        }
    }
    true
}

/// `E[X_ik] = a·C(ab−a, b−1) / C(ab, b)`: the chance that a fixed block of
/// size `a` receives exactly one of `b` positions placed uniformly among `ab`.
pub fn expected_goodness(a: usize, b: usize) -> f64 {
    // ratio of falling products, evaluated term by term to stay in range
    let (a, b) = (a as f64, b as f64);
    let mut log = a.ln();
    let total = a * b;
    // C(ab−a, b−1) / C(ab, b) = b · Π_{t=0}^{b−2} (ab−a−t) / Π_{t=0}^{b−1} (ab−t)
    log += b.ln();
    for t in 0..(b as usize).saturating_sub(1) {
        log += (total - a - t as f64).ln();
    }
    for t in 0..b as usize {
        log -= (total - t as f64).ln();
    }
    log.exp()
}

/// Which inner locally decodable code protects the blocks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InnerLdc {
    /// 2 probes, error ≤ 2δ per block.
    Hadamard,
}

impl InnerLdc {
    pub fn probes(&self) -> usize {
        match self {
            InnerLdc::Hadamard => 2,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComposedOptions {
    /// Target BMRV error used to size the probe sets, `d = ⌈log₂(20n)/ε⌉`.
    pub eps_target: f64,
    /// Block size `a`; defaults to `6s`.
    pub block_bits: Option<usize>,
    /// Block count `b = d`; defaults to the value implied by `eps_target`.
    pub blocks: Option<usize>,
    pub pi_trials: usize,
    pub max_attempts: usize,
    /// Required certified advantage over 1/2 at δ = 0 for every public index.
    pub min_advantage: f64,
    pub universe_factor: usize,
    pub inner: InnerLdc,
}

impl Default for ComposedOptions {
    fn default() -> Self {
        ComposedOptions {
            eps_target: 0.1,
            block_bits: None,
            blocks: None,
            pi_trials: 256,
            max_attempts: 64,
            min_advantage: 0.05,
            universe_factor: 20,
            inner: InnerLdc::Hadamard,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComposedBuildReport {
    pub seed: u64,
    pub attempts: usize,
    pub pi_trials_used: usize,
    pub internal_universe: usize,
    pub internal_good_count: usize,
    pub good_threshold: usize,
    pub block_bits: usize,
    pub blocks: usize,
    pub length: usize,
    /// Realized BMRV error of the public sub-structure.
    pub bmrv_eps: f64,
    pub verification: Verification,
    /// Per public index: blocks good for it.
    pub good_blocks: Vec<usize>,
    /// Per public index: worst-case success of the block decoder at δ = 0.
    pub certified_success: Vec<f64>,
}

/// Where each element of a probe set lands after permutation and blocking.
#[derive(Clone, Debug)]
struct IndexLayout {
    /// (block, position inside the block) per element of `P_i`.
    elements: Vec<(usize, usize)>,
    /// Per block: number of elements of `P_i` it holds and the local
    /// position of the last one.
    per_block: Vec<(u32, u32)>,
}

impl IndexLayout {
    fn new(set: &[usize], perm: &[usize], a: usize, b: usize) -> Self {
        let mut per_block = vec![(0u32, 0u32); b];
        let elements = set
            .iter()
            .map(|&j| {
                let p = perm[j];
                let (k, local) = (p / a, p % a);
                per_block[k].0 += 1;
                per_block[k].1 = local as u32;
                (k, local)
            })
            .collect();
        IndexLayout { elements, per_block }
    }

    fn good_blocks(&self) -> usize {
        self.per_block.iter().filter(|c| c.0 == 1).count()
    }
}

/// Segment of the stored word a Hadamard decoder reads, with the message
/// coordinates it needs there.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HadamardSegment {
    pub offset: usize,
    pub message_bits: usize,
    pub coordinates: Vec<usize>,
}

/// BMRV structure composed with per-block Hadamard encodings.
#[derive(Clone, Debug)]
pub struct ComposedMembership {
    n: usize,
    s: usize,
    a: usize,
    b: usize,
    inner: HadamardCode,
    bmrv: BmrvStructure,
    perm: Vec<usize>,
    public_to_internal: Vec<usize>,
    internal_sets: Vec<Vec<usize>>,
    layouts: Vec<IndexLayout>,
    report: ComposedBuildReport,
}

impl ComposedMembership {
    /// Builds the structure for universe `n` from a BMRV probe-set system on
    /// `20n` internal indices.
    ///
    /// For each attempt: sample the internal probe sets, try up to
    /// `pi_trials` permutations and keep the first under which at least
    /// `20n/20` internal indices are good (≥ b/4 blocks hold exactly one
    /// element of their probe set). Then pick the `n` public indices among
    /// the good ones, greedily, such that each keeps a certified δ = 0
    /// success of at least `1/2 + min_advantage` against every set of weight
    /// ≤ s, and verify the resulting public BMRV structure.
    pub fn build(n: usize, s: usize, seed: u64, opts: &ComposedOptions) -> Result<Self> {
        if n == 0 || s == 0 || s > n {
            return Err(Error::InvalidParameter(format!(
                "need 1 ≤ s ≤ n, got n = {n}, s = {s}"
            )));
        }
        if !(opts.eps_target > 0.0 && opts.eps_target < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "eps_target = {} outside (0, 1)",
                opts.eps_target
            )));
        }
        let universe = n * opts.universe_factor.max(1);
        let log_u = (universe.max(2) as f64).log2();
        let b = opts
            .blocks
            .unwrap_or_else(|| (log_u / opts.eps_target).ceil() as usize)
            .max(1);
        let a = opts.block_bits.unwrap_or(6 * s);
        let inner = HadamardCode::new(a)?;
        let n_prime = a * b;
        let d = b;
        let threshold = universe.div_ceil(opts.universe_factor.max(1));
        let mut last_reason = String::new();

        for attempt in 0..opts.max_attempts.max(1) {
            let mut rng = seed::rng(seed, &[attempt as u64]);
            let internal_sets: Vec<Vec<usize>> = (0..universe)
                .map(|_| {
                    let mut v = sample(&mut rng, n_prime, d).into_vec();
                    v.sort_unstable();
                    v
                })
                .collect();

            let mut accepted = None;
            let mut best_count = 0;
            for trial in 0..opts.pi_trials.max(1) {
                let mut perm: Vec<usize> = (0..n_prime).collect();
                perm.shuffle(&mut seed::rng(seed, &[attempt as u64, trial as u64 + 1]));
                let count = count_good(&internal_sets, &perm, a, b);
                best_count = best_count.max(count);
                if count >= threshold {
                    accepted = Some((perm, count, trial + 1));
                    break;
                }
            }
            let Some((perm, good_count, trials_used)) = accepted else {
                last_reason = format!(
                    "no permutation within {} trials reached {threshold} good indices (best {best_count})",
                    opts.pi_trials
                );
                continue;
            };

            let layouts: Vec<IndexLayout> = internal_sets
                .iter()
                .map(|set| IndexLayout::new(set, &perm, a, b))
                .collect();
            let Some(public) = select_public(&internal_sets, n_prime, &layouts, n, s, b, opts.min_advantage)
            else {
                last_reason = format!(
                    "could not select {n} public indices with advantage ≥ {}",
                    opts.min_advantage
                );
                continue;
            };

            let public_sets: Vec<Vec<usize>> = public.iter().map(|&i| internal_sets[i].clone()).collect();
            // realized error of the public sub-structure, then certified at it
            let probe = BmrvStructure::from_probe_sets(n, s, 0.0, n_prime, public_sets.clone())?;
            let worst = probe
                .exact_min_agreement(None)?
                .ok_or_else(|| Error::Infeasible("coverage search too large".into()))?;
            let worst_cov = d - worst.iter().copied().min().unwrap_or(d);
            let bmrv_eps = worst_cov as f64 / d as f64;
            let bmrv = BmrvStructure::from_probe_sets(n, s, bmrv_eps, n_prime, public_sets)?;
            let verification = bmrv.verify(seed)?;

            let public_layouts: Vec<IndexLayout> = public.iter().map(|&i| layouts[i].clone()).collect();
            let certified = certified_success(&bmrv, &public_layouts, b);
            let good_blocks = public_layouts.iter().map(IndexLayout::good_blocks).collect();
            let report = ComposedBuildReport {
                seed,
                attempts: attempt + 1,
                pi_trials_used: trials_used,
                internal_universe: universe,
                internal_good_count: good_count,
                good_threshold: threshold,
                block_bits: a,
                blocks: b,
                length: b << a,
                bmrv_eps,
                verification,
                good_blocks,
                certified_success: certified,
            };
            return Ok(ComposedMembership {
                n,
                s,
                a,
                b,
                inner,
                bmrv,
                perm,
                public_to_internal: public,
                internal_sets,
                layouts: public_layouts,
                report,
            });
        }
        Err(Error::ConstructionFailed {
            attempts: opts.max_attempts.max(1),
            reason: last_reason,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn block_bits(&self) -> usize {
        self.a
    }

    pub fn blocks(&self) -> usize {
        self.b
    }

    /// Total stored length `b·2^a`.
    pub fn len(&self) -> usize {
        self.b << self.a
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn bmrv(&self) -> &BmrvStructure {
        &self.bmrv
    }

    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    pub fn internal_sets(&self) -> &[Vec<usize>] {
        &self.internal_sets
    }

    pub fn public_to_internal(&self) -> &[usize] {
        &self.public_to_internal
    }

    pub fn report(&self) -> &ComposedBuildReport {
        &self.report
    }

    pub fn encode(&self, x: &BitString) -> Result<BitString> {
        let y = self.bmrv.encode(x)?.y;
        let mut blocks = vec![0u64; self.b];
        for j in y.ones_positions() {
            let p = self.perm[j];
            blocks[p / self.a] |= self.inner.unit(p % self.a);
        }
        let block_len = self.inner.len() as u64;
        Ok(BitString::from_bools(blocks.iter().flat_map(|&m| {
            (0..block_len).map(move |u| HadamardCode::bit_at(m, u))
        })))
    }

    fn window<'o>(&self, oracle: &'o mut dyn Probe, block: usize) -> Result<Window<'o>> {
        Window::new(oracle, block * self.inner.len(), self.inner.len())
    }

    fn layout(&self, i: usize) -> Result<&IndexLayout> {
        self.layouts
            .get(i)
            .ok_or(Error::IndexOutOfRange { index: i, bound: self.n })
    }

    /// Picks a uniform block; decodes the unique element of `P_i` there, or
    /// answers with a fair coin when the block holds zero or several.
    pub fn decode_block(&self, oracle: &mut dyn Probe, i: usize, coins: &mut dyn Coins) -> Result<bool> {
        let layout = self.layout(i)?;
        let k = coins.below(self.b as u64) as usize;
        let (count, local) = layout.per_block[k];
        if count != 1 {
            return Ok(coins.bit());
        }
        let mut w = self.window(oracle, k)?;
        self.inner.decode_bit(&mut w, local as usize, coins)
    }

    /// Picks a uniform `j ∈ P_i` and decodes `y_j` from its block.
    pub fn decode_direct(&self, oracle: &mut dyn Probe, i: usize, coins: &mut dyn Coins) -> Result<bool> {
        let layout = self.layout(i)?;
        let t = coins.below(layout.elements.len() as u64) as usize;
        let (k, local) = layout.elements[t];
        let mut w = self.window(oracle, k)?;
        self.inner.decode_bit(&mut w, local, coins)
    }

    /// Blocks holding elements of `P_i`, most elements first.
    pub fn segments(&self, i: usize) -> Result<Vec<HadamardSegment>> {
        let layout = self.layout(i)?;
        let mut by_block: Vec<Vec<usize>> = vec![Vec::new(); self.b];
        for &(k, local) in &layout.elements {
            by_block[k].push(local);
        }
        let mut segs: Vec<HadamardSegment> = by_block
            .into_iter()
            .enumerate()
            .filter(|(_, c)| !c.is_empty())
            .map(|(k, coordinates)| HadamardSegment {
                offset: k * self.inner.len(),
                message_bits: self.a,
                coordinates,
            })
            .collect();
        segs.sort_by_key(|s| (std::cmp::Reverse(s.coordinates.len()), s.offset));
        Ok(segs)
    }

    /// Monte-Carlo frequency of "block k is good for i" over `trials` fresh
    /// uniform permutations, for each listed internal index and every block.
    pub fn goodness_frequencies(&self, internal: &[usize], trials: usize, seed: u64) -> Vec<Vec<f64>> {
        let n_prime = self.a * self.b;
        let mut hits = vec![vec![0u32; self.b]; internal.len()];
        let mut perm: Vec<usize> = (0..n_prime).collect();
        let mut counts = vec![0u32; self.b];
        for t in 0..trials {
            perm.shuffle(&mut seed::rng(seed, &[t as u64]));
            for (row, &i) in internal.iter().enumerate() {
                counts.iter_mut().for_each(|c| *c = 0);
                for &j in &self.internal_sets[i] {
                    counts[perm[j] / self.a] += 1;
                }
                for (h, &c) in hits[row].iter_mut().zip(&counts) {
                    *h += (c == 1) as u32;
                }
            }
        }
        hits.into_iter()
            .map(|row| row.into_iter().map(|h| h as f64 / trials as f64).collect())
            .collect()
    }
}

fn count_good(sets: &[Vec<usize>], perm: &[usize], a: usize, b: usize) -> usize {
    let mut counts = vec![0u32; b];
    sets.iter()
        .filter(|set| {
            counts.iter_mut().for_each(|c| *c = 0);
            for &j in set.iter() {
                counts[perm[j] / a] += 1;
            }
            let good = counts.iter().filter(|&&c| c == 1).count();
            4 * good >= b
        })
        .count()
}

/// Greedy choice of `n` good internal indices whose good-block elements are
/// lightly covered by the other chosen probe sets.
fn select_public(
    sets: &[Vec<usize>],
    n_prime: usize,
    layouts: &[IndexLayout],
    n: usize,
    s: usize,
    b: usize,
    min_advantage: f64,
) -> Option<Vec<usize>> {
    let masks: Vec<BitString> = sets
        .iter()
        .map(|set| BitString::from_positions(n_prime, set.iter().copied()).expect("in range"))
        .collect();
    let good_elems: Vec<Vec<usize>> = sets
        .iter()
        .zip(layouts)
        .map(|(set, lay)| {
            set.iter()
                .zip(&lay.elements)
                .filter(|(_, (k, _))| lay.per_block[*k].0 == 1)
                .map(|(&j, _)| j)
                .collect()
        })
        .collect();
    // slack(i) = G_i/2 − advantage·b; the covered good elements must stay below it
    let slack = |i: usize| layouts[i].good_blocks() as f64 / 2.0 - min_advantage * b as f64;

    let mut order: Vec<usize> = (0..sets.len()).filter(|&i| 4 * layouts[i].good_blocks() >= b).collect();
    order.sort_by_key(|&i| (std::cmp::Reverse(layouts[i].good_blocks()), i));

    let mut chosen: Vec<usize> = Vec::with_capacity(n);
    // top-s overlaps received by each chosen index from the other chosen ones
    let mut top: Vec<Vec<usize>> = Vec::with_capacity(n);
    let push_top = |list: &mut Vec<usize>, v: usize| {
        list.push(v);
        list.sort_unstable_by(|x, y| y.cmp(x));
        list.truncate(s);
    };
    for &c in &order {
        if chosen.len() == n {
            break;
        }
        if slack(c) <= 0.0 {
            continue;
        }
        let into_c: Vec<usize> = chosen
            .iter()
            .map(|&k| good_elems[c].iter().filter(|&&j| masks[k].get(j)).count())
            .collect();
        let from_c: Vec<usize> = chosen
            .iter()
            .map(|&i| good_elems[i].iter().filter(|&&j| masks[c].get(j)).count())
            .collect();
        let mut c_top = Vec::new();
        for &v in &into_c {
            push_top(&mut c_top, v);
        }
        if c_top.iter().sum::<usize>() as f64 > slack(c) {
            continue;
        }
        let fits = chosen.iter().zip(&top).zip(&from_c).all(|((&i, t), &v)| {
            let mut t = t.clone();
            push_top(&mut t, v);
            t.iter().sum::<usize>() as f64 <= slack(i)
        });
        if !fits {
            continue;
        }
        for ((t, &v), _) in top.iter_mut().zip(&from_c).zip(&chosen) {
            push_top(t, v);
        }
        chosen.push(c);
        top.push(c_top);
    }
    (chosen.len() == n).then_some(chosen)
}

/// Worst-case δ = 0 success of the block decoder per public index, over all
/// sets of weight ≤ s: `1/2 + (G_i/2 − B_i)/b` where `B_i` is the largest
/// number of good-block elements of `P_i` that `s` other probe sets cover.
fn certified_success(bmrv: &BmrvStructure, layouts: &[IndexLayout], b: usize) -> Vec<f64> {
    let d = bmrv.d();
    let overlaps = bmrv.overlap_lists();
    layouts
        .iter()
        .enumerate()
        .map(|(i, lay)| {
            // restrict P_i masks to positions lying in good blocks
            let good_local = BitString::from_bools(
                lay.elements.iter().map(|(k, _)| lay.per_block[*k].0 == 1),
            );
            debug_assert_eq!(good_local.len(), d);
            let mut masks: Vec<BitString> = overlaps[i]
                .iter()
                .map(|m| m.and(&good_local).expect("equal lengths"))
                .filter(|m| m.weight() > 0)
                .collect();
            masks.sort_by_key(|m| std::cmp::Reverse(m.weight()));
            let covered = max_coverage(&masks, bmrv.s(), SEARCH_NODE_LIMIT).unwrap_or(good_local.weight());
            0.5 + (lay.good_blocks() as f64 / 2.0 - covered as f64) / b as f64
        })
        .collect()
}
