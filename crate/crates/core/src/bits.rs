//! Bit strings over GF(2) and the combinatorics of bounded-weight query vectors.
//!
//! Positions are 0-based in the API. In text form a bit string is written as
//! ASCII `0`/`1` with position 0 leftmost, and whenever a bit string is read as
//! an integer (table addresses, Hadamard positions) position 0 is the most
//! significant bit. Lexicographic order on strings therefore coincides with
//! numeric order on their integer values.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

const WORD: usize = 64;

/// Fixed-length bit string.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitString {
    len: usize,
    words: Vec<u64>,
}

impl BitString {
    pub fn zeros(len: usize) -> Self {
        BitString {
            len,
            words: vec![0; len.div_ceil(WORD)],
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut b = Self::zeros(len);
        for w in b.words.iter_mut() {
            *w = u64::MAX;
        }
        b.clear_tail();
        b
    }

    pub fn from_bools<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut words = Vec::new();
        let mut len = 0;
        for bit in bits {
            if len % WORD == 0 {
                words.push(0);
            }
            if bit {
                words[len / WORD] |= 1 << (len % WORD);
            }
            len += 1;
        }
        BitString { len, words }
    }

    /// The `len`-bit big-endian representation of `value` (position 0 is the
    /// most significant bit).
    pub fn from_value(value: u64, len: usize) -> Result<Self> {
        if len > 64 || (len < 64 && value >> len != 0) {
            return Err(Error::InvalidParameter(format!(
                "value {value} does not fit in {len} bits"
            )));
        }
        Ok(Self::from_bools((0..len).map(|i| (value >> (len - 1 - i)) & 1 == 1)))
    }

    /// Characteristic vector of `positions` inside a string of length `len`.
    pub fn from_positions<I: IntoIterator<Item = usize>>(len: usize, positions: I) -> Result<Self> {
        let mut b = Self::zeros(len);
        for p in positions {
            if p >= len {
                return Err(Error::IndexOutOfRange { index: p, bound: len });
            }
            b.set(p, true);
        }
        Ok(b)
    }

    /// Integer value with position 0 most significant. Only for strings of at
    /// most 64 bits.
    pub fn value(&self) -> Result<u64> {
        if self.len > 64 {
            return Err(Error::InvalidParameter(format!(
                "bit string of length {} has no u64 value",
                self.len
            )));
        }
        Ok(self.iter().fold(0u64, |acc, b| (acc << 1) | b as u64))
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, bit: bool) {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        let mask = 1u64 << (i % WORD);
        if bit {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        self.words[i / WORD] ^= 1 << (i % WORD);
    }

    /// Hamming weight.
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// Positions holding a 1, increasing.
    pub fn ones_positions(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let tz = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * WORD + tz)
                }
            })
        })
    }

    fn check_len(&self, other: &BitString) -> Result<()> {
        if self.len != other.len {
            return Err(Error::LengthMismatch {
                left: self.len,
                right: other.len,
            });
        }
        Ok(())
    }

    pub fn xor(&self, other: &BitString) -> Result<BitString> {
        self.check_len(other)?;
        let words = self.words.iter().zip(&other.words).map(|(a, b)| a ^ b).collect();
        Ok(BitString { len: self.len, words })
    }

    pub fn and(&self, other: &BitString) -> Result<BitString> {
        self.check_len(other)?;
        let words = self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect();
        Ok(BitString { len: self.len, words })
    }

    pub fn or(&self, other: &BitString) -> Result<BitString> {
        self.check_len(other)?;
        let words = self.words.iter().zip(&other.words).map(|(a, b)| a | b).collect();
        Ok(BitString { len: self.len, words })
    }

    pub fn not(&self) -> BitString {
        let mut b = BitString {
            len: self.len,
            words: self.words.iter().map(|w| !w).collect(),
        };
        b.clear_tail();
        b
    }

    /// Hamming distance.
    pub fn distance(&self, other: &BitString) -> Result<usize> {
        Ok(self.xor(other)?.weight())
    }

    /// Concatenation `self ‖ other`.
    pub fn concat(&self, other: &BitString) -> BitString {
        BitString::from_bools(self.iter().chain(other.iter()))
    }

    /// Bits `[start, start + len)`.
    pub fn slice(&self, start: usize, len: usize) -> Result<BitString> {
        if start + len > self.len {
            return Err(Error::IndexOutOfRange {
                index: start + len,
                bound: self.len,
            });
        }
        Ok(BitString::from_bools((start..start + len).map(|i| self.get(i))))
    }

    fn clear_tail(&mut self) {
        let rem = self.len % WORD;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut bits = Vec::with_capacity(s.len());
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => bits.push(false),
                '1' => bits.push(true),
                _ => {
                    return Err(Error::Parse(format!(
                        "invalid character {c:?} at position {i} of bit string"
                    )))
                }
            }
        }
        Ok(BitString::from_bools(bits))
    }
}

impl Serialize for BitString {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Inner product `a · b mod 2`.
pub fn dot_mod2(a: &BitString, b: &BitString) -> Result<bool> {
    a.check_len(b)?;
    let ones: u32 = a.words.iter().zip(&b.words).map(|(x, y)| (x & y).count_ones()).sum();
    Ok(ones % 2 == 1)
}

/// The bits of `x` at the positions where `y` has a 1, in increasing order.
pub fn extract_substring(x: &BitString, y: &BitString) -> Result<BitString> {
    x.check_len(y)?;
    Ok(BitString::from_bools(y.ones_positions().map(|i| x.get(i))))
}

/// Exact binomial coefficient.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// `B(n, r) = Σ_{i=0..r} C(n, i)`, the number of strings of length `n` and
/// weight at most `r`.
pub fn bounded_weight_count(n: u64, r: u64) -> BigUint {
    let mut total = BigUint::zero();
    let mut term = BigUint::one();
    for i in 0..=r.min(n) {
        total += &term;
        term = term * (n - i) / (i + 1);
    }
    total
}

/// `log2` of an arbitrary-size unsigned integer (must be nonzero).
pub fn log2_big(v: &BigUint) -> f64 {
    let bits = v.bits();
    if bits <= 1000 {
        let f: f64 = v.to_string().parse().unwrap_or(f64::INFINITY);
        if f.is_finite() {
            return f.log2();
        }
    }
    let shift = bits - 64;
    let top: BigUint = v >> shift;
    let top: u64 = top.try_into().unwrap_or(u64::MAX);
    (top as f64).log2() + shift as f64
}

/// The set of length-`n` strings of weight at most `r`, ranked in
/// lexicographic order.
#[derive(Clone, Debug)]
pub struct BoundedWeightSpace {
    n: usize,
    r: usize,
    // counts[m][k] = B(m, k) for m ≤ n, k ≤ r
    counts: Vec<Vec<u128>>,
}

impl BoundedWeightSpace {
    /// Supports `n ≤ 127`, which keeps every rank inside `u128`.
    pub fn new(n: usize, r: usize) -> Result<Self> {
        if r > n {
            return Err(Error::InvalidParameter(format!(
                "weight cap r = {r} exceeds length n = {n}"
            )));
        }
        if n > 127 {
            return Err(Error::Infeasible(format!(
                "bounded-weight space with n = {n} > 127 cannot be ranked in 128 bits"
            )));
        }
        let mut counts = vec![vec![0u128; r + 1]; n + 1];
        for m in 0..=n {
            for k in 0..=r {
                counts[m][k] = if m == 0 || k == 0 {
                    1
                } else {
                    // B(m, k) = B(m-1, k) + B(m-1, k-1)
                    counts[m - 1][k] + counts[m - 1][k - 1]
                };
            }
        }
        Ok(BoundedWeightSpace { n, r, counts })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn size(&self) -> u128 {
        self.counts[self.n][self.r]
    }

    /// Position of `v` in the lexicographic enumeration.
    pub fn rank(&self, v: &BitString) -> Result<u128> {
        if v.len() != self.n {
            return Err(Error::LengthMismatch {
                left: v.len(),
                right: self.n,
            });
        }
        let w = v.weight();
        if w > self.r {
            return Err(Error::WeightExceeded { weight: w, cap: self.r });
        }
        let mut rank = 0u128;
        for (ones, i) in v.ones_positions().enumerate() {
            // every string agreeing before i and holding 0 at i comes first
            rank += self.counts[self.n - i - 1][self.r - ones];
        }
        Ok(rank)
    }

    pub fn unrank(&self, index: u128) -> Result<BitString> {
        if index >= self.size() {
            return Err(Error::IndexOutOfRange {
                index: usize::try_from(index).unwrap_or(usize::MAX),
                bound: usize::try_from(self.size()).unwrap_or(usize::MAX),
            });
        }
        let mut idx = index;
        let mut ones = 0;
        let mut out = BitString::zeros(self.n);
        for i in 0..self.n {
            let with_zero = self.counts[self.n - i - 1][self.r - ones];
            if idx >= with_zero {
                idx -= with_zero;
                out.set(i, true);
                ones += 1;
            }
        }
        Ok(out)
    }

    /// All members in lexicographic order.
    pub fn iter(&self) -> impl Iterator<Item = BitString> + '_ {
        (0..self.size()).map(move |k| self.unrank(k).expect("index below size"))
    }
}

/// Writes `y = z_1 ⊕ … ⊕ z_p` with disjoint supports: `z_1` takes the first
/// `⌈|y|/p⌉` one-positions, `z_2` the next, and so on; trailing pieces may be
/// zero.
pub fn split_query(y: &BitString, p: usize) -> Result<Vec<BitString>> {
    if p == 0 {
        return Err(Error::InvalidParameter("split_query needs p ≥ 1".into()));
    }
    let chunk = y.weight().div_ceil(p);
    let mut parts = vec![BitString::zeros(y.len()); p];
    if chunk == 0 {
        return Ok(parts);
    }
    for (k, pos) in y.ones_positions().enumerate() {
        parts[k / chunk].set(pos, true);
    }
    Ok(parts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn dot_examples() {
        assert!(!dot_mod2(&bs("0000"), &bs("1011")).unwrap());
        assert!(dot_mod2(&bs("10"), &bs("11")).unwrap());
        assert!(dot_mod2(&bs("111"), &bs("111")).unwrap());
        assert!(matches!(
            dot_mod2(&bs("10"), &bs("101")),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn substring_examples() {
        assert_eq!(extract_substring(&bs("1010"), &bs("0110")).unwrap(), bs("01"));
        let x = bs("1101001");
        assert_eq!(extract_substring(&x, &BitString::ones(7)).unwrap(), x);
        assert!(extract_substring(&x, &BitString::zeros(7)).unwrap().is_empty());
        assert!(extract_substring(&x, &bs("11")).is_err());
    }

    #[test]
    fn rank_unrank_small() {
        let sp = BoundedWeightSpace::new(3, 2).unwrap();
        assert_eq!(sp.size(), 7);
        assert_eq!(sp.unrank(0).unwrap(), bs("000"));
        assert_eq!(sp.unrank(3).unwrap(), bs("011"));
        assert_eq!(sp.unrank(6).unwrap(), bs("110"));
        assert!(sp.unrank(7).is_err());
        assert!(matches!(sp.rank(&bs("111")), Err(Error::WeightExceeded { .. })));

        let full = BoundedWeightSpace::new(3, 3).unwrap();
        assert_eq!(full.size(), 8);
        assert_eq!(full.unrank(7).unwrap(), bs("111"));

        let sp = BoundedWeightSpace::new(4, 2).unwrap();
        assert_eq!(sp.size(), 11);
        for k in 0..11 {
            assert_eq!(sp.rank(&sp.unrank(k).unwrap()).unwrap(), k);
        }
    }

    #[test]
    fn rank_unrank_exhaustive_against_sorted_enumeration() {
        for n in 0..=10usize {
            for r in 0..=n {
                let sp = BoundedWeightSpace::new(n, r).unwrap();
                // oracle: every string of the cube with weight ≤ r, in numeric order
                let expected: Vec<BitString> = (0..1u64 << n)
                    .map(|v| BitString::from_value(v, n).unwrap())
                    .filter(|b| b.weight() <= r)
                    .collect();
                assert_eq!(sp.size() as usize, expected.len());
                assert_eq!(
                    bounded_weight_count(n as u64, r as u64),
                    BigUint::from(expected.len())
                );
                for (k, v) in expected.iter().enumerate() {
                    assert_eq!(&sp.unrank(k as u128).unwrap(), v);
                    assert_eq!(sp.rank(v).unwrap(), k as u128);
                }
            }
        }
    }

    #[test]
    fn split_examples() {
        assert_eq!(split_query(&bs("1111"), 2).unwrap(), vec![bs("1100"), bs("0011")]);
        assert_eq!(
            split_query(&bs("10100"), 3).unwrap(),
            vec![bs("10000"), bs("00100"), bs("00000")]
        );
        assert!(split_query(&bs("1"), 0).is_err());
    }

    #[test]
    fn split_exhaustive_small() {
        for n in 0..=8usize {
            for v in 0..1u64 << n {
                let y = BitString::from_value(v, n).unwrap();
                for p in 1..=4 {
                    let parts = split_query(&y, p).unwrap();
                    let cap = y.weight().div_ceil(p);
                    let mut acc = BitString::zeros(n);
                    for z in &parts {
                        assert!(z.weight() <= cap);
                        assert_eq!(acc.and(z).unwrap().weight(), 0);
                        acc = acc.xor(z).unwrap();
                    }
                    assert_eq!(acc, y);
                }
            }
        }
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(64, 2), BigUint::from(2016u32));
        assert_eq!(bounded_weight_count(64, 2), BigUint::from(2081u32));
        assert_eq!(binomial(3, 5), BigUint::zero());
        let big = bounded_weight_count(2000, 1000);
        assert!((log2_big(&big) - 1999.0).abs() < 0.5);
    }

    #[test]
    fn text_and_value_forms() {
        let b = bs("0110");
        assert_eq!(b.value().unwrap(), 6);
        assert_eq!(BitString::from_value(6, 4).unwrap(), b);
        assert!(BitString::from_value(16, 4).is_err());
        assert!("01x".parse::<BitString>().is_err());
        let json = serde_json::to_string(&b).unwrap();
        assert_eq!(json, "\"0110\"");
        assert_eq!(serde_json::from_str::<BitString>(&json).unwrap(), b);
        assert_eq!(BitString::ones(70).weight(), 70);
        assert_eq!(BitString::ones(70).not().weight(), 0);
    }

    proptest! {
        #[test]
        fn dot_matches_naive_loop(bits in proptest::collection::vec((any::<bool>(), any::<bool>()), 0..200)) {
            let a = BitString::from_bools(bits.iter().map(|p| p.0));
            let b = BitString::from_bools(bits.iter().map(|p| p.1));
            let naive = bits.iter().filter(|(x, y)| *x && *y).count() % 2 == 1;
            prop_assert_eq!(dot_mod2(&a, &b).unwrap(), naive);
        }

        #[test]
        fn split_xors_back(bits in proptest::collection::vec(any::<bool>(), 0..150), p in 1usize..9) {
            let y = BitString::from_bools(bits);
            let parts = split_query(&y, p).unwrap();
            prop_assert_eq!(parts.len(), p);
            let acc = parts.iter().fold(BitString::zeros(y.len()), |acc, z| acc.xor(z).unwrap());
            prop_assert_eq!(acc, y.clone());
            let cap = y.weight().div_ceil(p);
            prop_assert!(parts.iter().all(|z| z.weight() <= cap));
        }

        #[test]
        fn rank_is_monotone(n in 1usize..40, r in 0usize..6, a in any::<u64>(), b in any::<u64>()) {
            let r = r.min(n);
            let sp = BoundedWeightSpace::new(n, r).unwrap();
            let size = sp.size();
            let (i, j) = ((a as u128) % size, (b as u128) % size);
            let (vi, vj) = (sp.unrank(i).unwrap(), sp.unrank(j).unwrap());
            // lexicographic comparison of the text forms
            prop_assert_eq!(i.cmp(&j), vi.to_string().cmp(&vj.to_string()));
            prop_assert_eq!(sp.rank(&vi).unwrap(), i);
        }
    }
}
