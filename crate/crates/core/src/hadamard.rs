//! The Hadamard code as a 2-probe locally decodable code, majority
//! amplification, and the 1-probe Equality structure built on a code whose
//! distinct codewords are far apart.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bits::{binomial, BitString};
use crate::error::{Error, Result};
use crate::oracle::{Coins, Limited, Probe, Prob};

/// Largest message length whose codeword we materialize.
pub const MAX_HADAMARD_BITS: usize = 28;

/// Hadamard code on `s`-bit messages. Position `u ∈ [0, 2^s)` holds `x · y`
/// where `y` is the `s`-bit big-endian form of `u`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HadamardCode {
    s: usize,
}

impl HadamardCode {
    pub fn new(s: usize) -> Result<Self> {
        if s == 0 {
            return Err(Error::InvalidParameter("Hadamard message length must be ≥ 1".into()));
        }
        if s > MAX_HADAMARD_BITS {
            return Err(Error::Infeasible(format!(
                "Hadamard codeword of length 2^{s} exceeds the 2^{MAX_HADAMARD_BITS} limit"
            )));
        }
        Ok(HadamardCode { s })
    }

    pub fn message_len(&self) -> usize {
        self.s
    }

    pub fn len(&self) -> usize {
        1 << self.s
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `e_i` as a codeword position.
    pub fn unit(&self, i: usize) -> u64 {
        1 << (self.s - 1 - i)
    }

    /// Codeword bit at position `u` for the message with integer form `x`.
    #[inline]
    pub fn bit_at(x: u64, u: u64) -> bool {
        (x & u).count_ones() % 2 == 1
    }

    pub fn encode(&self, x: &BitString) -> Result<BitString> {
        if x.len() != self.s {
            return Err(Error::LengthMismatch {
                left: x.len(),
                right: self.s,
            });
        }
        let xv = x.value()?;
        Ok(BitString::from_bools(
            (0..self.len() as u64).map(|u| Self::bit_at(xv, u)),
        ))
    }

    /// Two probes at `z` and `z ⊕ e_i` for uniform `z`; returns their XOR.
    pub fn decode_bit(&self, oracle: &mut dyn Probe, i: usize, coins: &mut dyn Coins) -> Result<bool> {
        if i >= self.s {
            return Err(Error::IndexOutOfRange { index: i, bound: self.s });
        }
        self.decode_mask(oracle, self.unit(i), coins)
    }

    /// Two probes at `z` and `z ⊕ y` for uniform `z`; returns their XOR, an
    /// estimate of `x · y`.
    pub fn decode_ip(&self, oracle: &mut dyn Probe, y: &BitString, coins: &mut dyn Coins) -> Result<bool> {
        if y.len() != self.s {
            return Err(Error::LengthMismatch {
                left: y.len(),
                right: self.s,
            });
        }
        self.decode_mask(oracle, y.value()?, coins)
    }

    fn decode_mask(&self, oracle: &mut dyn Probe, mask: u64, coins: &mut dyn Coins) -> Result<bool> {
        if oracle.len() != self.len() {
            return Err(Error::LengthMismatch {
                left: oracle.len(),
                right: self.len(),
            });
        }
        let z = coins.below(self.len() as u64);
        let a = oracle.probe(z as usize)?;
        let b = oracle.probe((z ^ mask) as usize)?;
        Ok(a ^ b)
    }

    /// Majority of `t` independent 2-probe decodes, each limited to its own
    /// two probes.
    pub fn amplified_decode(
        &self,
        oracle: &mut dyn Probe,
        target: &HadamardQuery,
        t: usize,
        coins: &mut dyn Coins,
    ) -> Result<bool> {
        if t.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "repetition count must be odd, got {t}"
            )));
        }
        let mut ones = 0;
        for _ in 0..t {
            let mut rep = Limited::new(oracle, 2);
            let bit = match target {
                HadamardQuery::Bit(i) => self.decode_bit(&mut rep, *i, coins)?,
                HadamardQuery::Parity(y) => self.decode_ip(&mut rep, y, coins)?,
            };
            ones += bit as usize;
        }
        Ok(2 * ones > t)
    }

    /// Minimum distance measured by enumerating every nonzero message.
    pub fn measured_min_distance(&self) -> Result<usize> {
        if self.s > 12 {
            return Err(Error::Infeasible(format!(
                "distance enumeration for s = {} exceeds the s ≤ 12 limit",
                self.s
            )));
        }
        let n = self.len() as u64;
        Ok((1..n)
            .map(|x| (0..n).filter(|&u| Self::bit_at(x, u)).count())
            .min()
            .unwrap_or(0))
    }
}

/// What a Hadamard decoder is asked for.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HadamardQuery {
    Bit(usize),
    Parity(BitString),
}

/// Exact error of the majority of `t` independent trials that each fail with
/// probability `q`.
pub fn majority_error(q: &Prob, t: usize) -> BigRational {
    let q = BigRational::new(BigInt::from(*q.numer()), BigInt::from(*q.denom()));
    let one = BigRational::one();
    let mut total = BigRational::zero();
    for k in (t / 2 + 1)..=t {
        let c = BigRational::from_integer(BigInt::from(binomial(t as u64, k as u64)));
        let term = c * pow(&q, k) * pow(&(&one - &q), t - k);
        total += term;
    }
    total
}

fn pow(base: &BigRational, e: usize) -> BigRational {
    let mut acc = BigRational::one();
    for _ in 0..e {
        acc *= base;
    }
    acc
}

/// A binary code that a decoder can evaluate locally at any position.
pub trait BinaryCode {
    fn message_len(&self) -> usize;
    fn len(&self) -> usize;
    fn is_empty(&self) -> bool {
        self.len() == 0
    }
    fn encode(&self, x: &BitString) -> Result<BitString>;
    /// Codeword bit `j` of `x` without building the whole codeword.
    fn bit(&self, x: &BitString, j: usize) -> Result<bool>;
}

impl BinaryCode for HadamardCode {
    fn message_len(&self) -> usize {
        self.s
    }

    fn len(&self) -> usize {
        1 << self.s
    }

    fn encode(&self, x: &BitString) -> Result<BitString> {
        HadamardCode::encode(self, x)
    }

    fn bit(&self, x: &BitString, j: usize) -> Result<bool> {
        if x.len() != self.s {
            return Err(Error::LengthMismatch {
                left: x.len(),
                right: self.s,
            });
        }
        Ok(Self::bit_at(x.value()?, j as u64))
    }
}

/// Random linear code `x ↦ xG` with a generator sampled from a seed and its
/// minimum distance verified by enumerating all nonzero messages.
#[derive(Clone, Debug)]
pub struct RandomLinearCode {
    rows: Vec<BitString>,
    len: usize,
    min_distance: usize,
    seed: u64,
}

impl RandomLinearCode {
    /// Samples generators until `1/2 − d_min/len ≤ max_gamma`, at most
    /// `retries` times.
    pub fn build(k: usize, len: usize, max_gamma: f64, seed: u64, retries: usize) -> Result<Self> {
        if k == 0 || k > 20 {
            return Err(Error::InvalidParameter(format!(
                "random linear code needs 1 ≤ k ≤ 20, got {k}"
            )));
        }
        if len == 0 {
            return Err(Error::InvalidParameter("code length must be positive".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut best = 0;
        for _ in 0..retries.max(1) {
            let rows: Vec<BitString> = (0..k)
                .map(|_| BitString::from_bools((0..len).map(|_| rng.gen::<bool>())))
                .collect();
            let d = Self::min_weight(&rows, len);
            best = best.max(d);
            if 0.5 - d as f64 / len as f64 <= max_gamma {
                return Ok(RandomLinearCode {
                    rows,
                    len,
                    min_distance: d,
                    seed,
                });
            }
        }
        Err(Error::ConstructionFailed {
            attempts: retries.max(1),
            reason: format!(
                "best minimum distance {best} of {len} misses gamma ≤ {max_gamma}"
            ),
        })
    }

    fn min_weight(rows: &[BitString], len: usize) -> usize {
        // Gray-code walk over all nonzero messages
        let k = rows.len();
        let mut word = BitString::zeros(len);
        let mut best = usize::MAX;
        for g in 1u64..(1 << k) {
            let flip = g.trailing_zeros() as usize;
            word = word.xor(&rows[flip]).expect("equal lengths");
            best = best.min(word.weight());
        }
        best
    }

    pub fn min_distance(&self) -> usize {
        self.min_distance
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

impl BinaryCode for RandomLinearCode {
    fn message_len(&self) -> usize {
        self.rows.len()
    }

    fn len(&self) -> usize {
        self.len
    }

    fn encode(&self, x: &BitString) -> Result<BitString> {
        if x.len() != self.rows.len() {
            return Err(Error::LengthMismatch {
                left: x.len(),
                right: self.rows.len(),
            });
        }
        let mut out = BitString::zeros(self.len);
        for i in x.ones_positions() {
            out = out.xor(&self.rows[i])?;
        }
        Ok(out)
    }

    fn bit(&self, x: &BitString, j: usize) -> Result<bool> {
        if j >= self.len {
            return Err(Error::IndexOutOfRange { index: j, bound: self.len });
        }
        if x.len() != self.rows.len() {
            return Err(Error::LengthMismatch {
                left: x.len(),
                right: self.rows.len(),
            });
        }
        Ok(x.ones_positions().fold(false, |acc, i| acc ^ self.rows[i].get(j)))
    }
}

/// One-probe Equality: probe a uniform position of the stored codeword and
/// compare with the query's codeword there. With probability 1/3 the decoder
/// answers "different" outright, which balances the two one-sided errors.
#[derive(Clone, Debug)]
pub struct EqualityStructure<C> {
    code: C,
    gamma: f64,
}

impl<C: BinaryCode> EqualityStructure<C> {
    /// `min_distance` is the measured minimum distance of `code`.
    pub fn new(code: C, min_distance: usize) -> Self {
        let gamma = 0.5 - min_distance as f64 / code.len() as f64;
        EqualityStructure { code, gamma }
    }

    /// `1/2 − d_min/N`: how far the closest pair of codewords is from half
    /// the length.
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn code(&self) -> &C {
        &self.code
    }

    /// Two-sided error bound `1/3 + 2δ/3 + 2γ/3` at noise level `delta`.
    pub fn error_bound(&self, delta: f64) -> f64 {
        1.0 / 3.0 + 2.0 * delta / 3.0 + 2.0 * self.gamma.max(0.0) / 3.0
    }

    pub fn encode(&self, x: &BitString) -> Result<BitString> {
        self.code.encode(x)
    }

    pub fn decode(&self, oracle: &mut dyn Probe, y: &BitString, coins: &mut dyn Coins) -> Result<bool> {
        let j = coins.below(self.code.len() as u64) as usize;
        let stored = oracle.probe(j)?;
        if coins.below(3) == 0 {
            return Ok(false);
        }
        Ok(stored == self.code.bit(y, j)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{corrupt, exact_error, probe_distribution, CorruptionPattern, ProbeOracle};

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn encode_examples() {
        let h = HadamardCode::new(2).unwrap();
        assert_eq!(h.encode(&bs("00")).unwrap(), bs("0000"));
        assert_eq!(h.encode(&bs("10")).unwrap(), bs("0011"));
        for v in 0..4 {
            let x = BitString::from_value(v, 2).unwrap();
            assert!(!h.encode(&x).unwrap().get(0));
        }
        assert!(HadamardCode::new(0).is_err());
        assert!(h.encode(&bs("101")).is_err());
    }

    #[test]
    fn min_distance_is_half_length() {
        for s in 1..=6 {
            let h = HadamardCode::new(s).unwrap();
            assert_eq!(h.measured_min_distance().unwrap(), h.len() / 2);
            // independent check through explicit codewords
            let words: Vec<BitString> = (0..1u64 << s)
                .map(|v| h.encode(&BitString::from_value(v, s).unwrap()).unwrap())
                .collect();
            for a in 0..words.len() {
                for b in a + 1..words.len() {
                    assert_eq!(words[a].distance(&words[b]).unwrap(), h.len() / 2);
                }
            }
        }
    }

    #[test]
    fn noiseless_bit_decoding_exhaustive() {
        for s in 1..=6 {
            let h = HadamardCode::new(s).unwrap();
            for v in 0..1u64 << s {
                let x = BitString::from_value(v, s).unwrap();
                let c = h.encode(&x).unwrap();
                for i in 0..s {
                    let err = exact_error(1 << 20, |coins| {
                        let mut o = ProbeOracle::new(&c, 2);
                        Ok(h.decode_bit(&mut o, i, coins)? == x.get(i))
                    })
                    .unwrap();
                    assert_eq!(err, Prob::from_integer(0));
                }
            }
        }
    }

    #[test]
    fn full_complement_always_wrong() {
        let h = HadamardCode::new(4).unwrap();
        let x = bs("1011");
        let c = h.encode(&x).unwrap();
        let view = c.not();
        for i in 0..4 {
            let err = exact_error(1 << 20, |coins| {
                let mut o = ProbeOracle::new(&view, 2);
                Ok(h.decode_bit(&mut o, i, coins)? == x.get(i))
            })
            .unwrap();
            // complementing both probes leaves their XOR unchanged
            assert_eq!(err, Prob::from_integer(0));
        }
        // a true "always wrong" word is the codeword of x ⊕ e_i
        let x2 = bs("0011");
        let view = h.encode(&x2).unwrap();
        let err = exact_error(1 << 20, |coins| {
            let mut o = ProbeOracle::new(&view, 2);
            Ok(h.decode_bit(&mut o, 0, coins)? == x.get(0))
        })
        .unwrap();
        assert_eq!(err, Prob::from_integer(1));
    }

    #[test]
    fn ip_examples() {
        let h = HadamardCode::new(2).unwrap();
        let c = h.encode(&bs("10")).unwrap();
        let err = exact_error(1 << 20, |coins| {
            let mut o = ProbeOracle::new(&c, 2);
            h.decode_ip(&mut o, &bs("11"), coins)
        })
        .unwrap();
        // decode always returns 1 here, so "wrong" == returned false never happens
        assert_eq!(err, Prob::from_integer(0));

        // y = e_i reduces to bit decoding
        let h = HadamardCode::new(5).unwrap();
        let x = bs("10110");
        let c = h.encode(&x).unwrap();
        let pattern = CorruptionPattern::new([0, 5, 17, 30], 32).unwrap();
        let view = corrupt(&c, &pattern).unwrap();
        for i in 0..5 {
            let e = BitString::from_positions(5, [i]).unwrap();
            let a = exact_error(1 << 20, |coins| {
                let mut o = ProbeOracle::new(&view, 2);
                Ok(h.decode_ip(&mut o, &e, coins)? == x.get(i))
            })
            .unwrap();
            let b = exact_error(1 << 20, |coins| {
                let mut o = ProbeOracle::new(&view, 2);
                Ok(h.decode_bit(&mut o, i, coins)? == x.get(i))
            })
            .unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn probes_are_marginally_uniform() {
        let h = HadamardCode::new(3).unwrap();
        let c = h.encode(&bs("110")).unwrap();
        let dist = probe_distribution(&c, 2, 1 << 20, |o, coins| h.decode_bit(o, 1, coins)).unwrap();
        for slot in &dist {
            assert_eq!(slot.len(), 8);
            for p in slot.values() {
                assert_eq!(*p, Prob::new(1, 8));
            }
        }
        let y = bs("101");
        let dist = probe_distribution(&c, 2, 1 << 20, |o, coins| h.decode_ip(o, &y, coins)).unwrap();
        assert!(dist.iter().all(|slot| slot.values().all(|p| *p == Prob::new(1, 8))));
    }

    #[test]
    fn amplification_contract() {
        let h = HadamardCode::new(3).unwrap();
        let c = h.encode(&bs("010")).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut o = ProbeOracle::new(&c, 6);
        assert!(h.amplified_decode(&mut o, &HadamardQuery::Bit(1), 3, &mut rng).unwrap());
        assert_eq!(o.used(), 6);
        let mut o = ProbeOracle::new(&c, 8);
        assert!(h.amplified_decode(&mut o, &HadamardQuery::Bit(1), 2, &mut rng).is_err());

        // t = 1 is the base decoder, outcome for outcome
        let view = corrupt(&c, &CorruptionPattern::new([1, 2], 8).unwrap()).unwrap();
        let base = exact_error(1 << 20, |coins| {
            let mut o = ProbeOracle::new(&view, 2);
            h.decode_bit(&mut o, 0, coins)
        })
        .unwrap();
        let amp = exact_error(1 << 20, |coins| {
            let mut o = ProbeOracle::new(&view, 2);
            h.amplified_decode(&mut o, &HadamardQuery::Bit(0), 1, coins)
        })
        .unwrap();
        assert_eq!(base, amp);
    }

    #[test]
    fn majority_error_matches_enumeration_and_is_monotone() {
        let h = HadamardCode::new(3).unwrap();
        let x = bs("011");
        let c = h.encode(&x).unwrap();
        let view = corrupt(&c, &CorruptionPattern::new([3], 8).unwrap()).unwrap();
        let q = exact_error(1 << 20, |coins| {
            let mut o = ProbeOracle::new(&view, 2);
            Ok(h.decode_bit(&mut o, 0, coins)? == x.get(0))
        })
        .unwrap();
        let rep3 = exact_error(1 << 20, |coins| {
            let mut o = ProbeOracle::new(&view, 6);
            Ok(h.amplified_decode(&mut o, &HadamardQuery::Bit(0), 3, coins)? == x.get(0))
        })
        .unwrap();
        let rep3_big = BigRational::new(BigInt::from(*rep3.numer()), BigInt::from(*rep3.denom()));
        assert_eq!(majority_error(&q, 3), rep3_big);
        let mut prev = majority_error(&q, 1);
        for t in (3..40).step_by(2) {
            let e = majority_error(&q, t);
            assert!(e <= prev);
            prev = e;
        }
    }

    #[test]
    fn equality_balancing() {
        let h = HadamardCode::new(4).unwrap();
        let eq = EqualityStructure::new(h, h.measured_min_distance().unwrap());
        assert_eq!(eq.gamma(), 0.0);
        let x = bs("1001");
        let c = eq.encode(&x).unwrap();
        // x = y, no noise: answer "equal" with probability exactly 2/3
        let err_same = exact_error(1 << 20, |coins| {
            let mut o = ProbeOracle::new(&c, 1);
            eq.decode(&mut o, &x, coins)
        })
        .unwrap();
        assert_eq!(err_same, Prob::new(1, 3));
        // raw agreement of distinct codewords is exactly 1/2
        let y = bs("0111");
        let cy = eq.encode(&y).unwrap();
        assert_eq!(c.distance(&cy).unwrap(), 8);
        let err_diff = exact_error(1 << 20, |coins| {
            let mut o = ProbeOracle::new(&c, 1);
            Ok(!eq.decode(&mut o, &y, coins)?)
        })
        .unwrap();
        assert_eq!(err_diff, Prob::new(1, 3));

        // noisy word: both errors stay below 1/3 + 2δ/3
        let pattern = CorruptionPattern::new([2, 9], 16).unwrap();
        let view = corrupt(&c, &pattern).unwrap();
        let bound = Prob::new(1, 3) + Prob::new(2, 3) * Prob::new(2, 16);
        for q in 0..16u64 {
            let y = BitString::from_value(q, 4).unwrap();
            let err = exact_error(1 << 20, |coins| {
                let mut o = ProbeOracle::new(&view, 1);
                Ok(eq.decode(&mut o, &y, coins)? == (y == x))
            })
            .unwrap();
            assert!(err <= bound, "query {y}: {err}");
        }
    }

    #[test]
    fn random_linear_code_distance_verified() {
        let code = RandomLinearCode::build(6, 64, 0.25, 9, 64).unwrap();
        assert!(0.5 - code.min_distance() as f64 / 64.0 <= 0.25);
        // cross-check min distance with explicit codewords
        let mut best = usize::MAX;
        for v in 1..64u64 {
            let x = BitString::from_value(v, 6).unwrap();
            let c = code.encode(&x).unwrap();
            best = best.min(c.weight());
            for j in [0, 17, 63] {
                assert_eq!(code.bit(&x, j).unwrap(), c.get(j));
            }
        }
        assert_eq!(best, code.min_distance());
        assert!(RandomLinearCode::build(10, 12, 0.0, 1, 3).is_err());
    }
}
