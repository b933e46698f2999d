//! Lower bounds and thresholds as evaluable formulas, and a numerical check
//! of the discrepancy of the inner-product matrix.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits::{bounded_weight_count, log2_big, BitString, BoundedWeightSpace};
use crate::error::{Error, Result};
use crate::seed;

/// One evaluated formula.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub name: String,
    pub formula: String,
    pub inputs: BTreeMap<String, String>,
    pub value: f64,
    /// Exact rational value, when the inputs allow one.
    pub exact: Option<String>,
}

fn inputs(pairs: &[(&str, String)]) -> BTreeMap<String, String> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

/// Parses `"3/4"`, `"0.25"`, `"2"` or `"1e-2"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a number: {s:?}"));
    if let Some((a, b)) = s.split_once('/') {
        let a: BigInt = a.trim().parse().map_err(|_| bad())?;
        let b: BigInt = b.trim().parse().map_err(|_| bad())?;
        if b.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(a, b));
    }
    let (mantissa, exp) = match s.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if int.is_empty() && frac.is_empty()
        || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    let all: BigInt = format!("0{int}{frac}").parse().map_err(|_| bad())?;
    let scale = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    let mut q = if scale >= 0 {
        BigRational::from_integer(all * ten.pow(scale as u32))
    } else {
        BigRational::new(all, ten.pow((-scale) as u32))
    };
    if neg {
        q = -q;
    }
    Ok(q)
}

fn to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// `a/b` written in lowest terms.
pub fn format_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Exact `p`-th root of a nonnegative rational, if there is one.
fn exact_root(q: &BigRational, p: u32) -> Option<BigRational> {
    if q.is_negative() {
        return None;
    }
    let root = |v: &BigInt| {
        let r = v.nth_root(p);
        (r.pow(p) == *v).then_some(r)
    };
    Some(BigRational::new(root(q.numer())?, root(q.denom())?))
}

/// Communication lower bound `log₂ B(n,r) − 2·log₂(1/(2β))` in bits.
pub fn ip_comm_lower_bound(n: u64, r: u64, beta: f64) -> Result<BoundReport> {
    if !(beta > 0.0 && beta <= 0.5) || r > n {
        return Err(Error::InvalidParameter(format!(
            "need 0 < beta ≤ 1/2 and r ≤ n, got beta = {beta}, n = {n}, r = {r}"
        )));
    }
    let b = bounded_weight_count(n, r);
    let value = log2_big(&b) - 2.0 * (1.0 / (2.0 * beta)).log2();
    Ok(BoundReport {
        name: "ip_comm_lower_bound".into(),
        formula: "log2 B(n,r) - 2 log2(1/(2 beta))".into(),
        inputs: inputs(&[("n", n.to_string()), ("r", r.to_string()), ("beta", beta.to_string())]),
        value,
        exact: None,
    })
}

/// Length lower bound `N ≥ ½·2^{(log₂ B(n,r) − 2·log₂(1/(1−2ε)) − 1)/p}`,
/// i.e. `½·(B·(1−2ε)²/2)^{1/p}`; exact when the `p`-th root is rational.
pub fn ip_ds_lower_bound(n: u64, r: u64, eps: &BigRational, p: u32) -> Result<BoundReport> {
    let half = BigRational::new(1.into(), 2.into());
    if eps.is_negative() || *eps >= half {
        return Err(Error::InvalidParameter(format!(
            "need 0 ≤ eps < 1/2, got {}",
            format_rational(eps)
        )));
    }
    if p == 0 || r > n {
        return Err(Error::InvalidParameter(format!(
            "need p ≥ 1 and r ≤ n, got p = {p}, n = {n}, r = {r}"
        )));
    }
    let b = BigRational::from_integer(BigInt::from(bounded_weight_count(n, r)));
    let one = BigRational::one();
    let two = BigRational::from_integer(2.into());
    let gap = &one - &two * eps;
    let inner = &b * &gap * &gap / &two;
    let exact = exact_root(&inner, p).map(|root| &half * root);
    let value = match &exact {
        Some(q) => to_f64(q),
        None => {
            let log = log2_big(&bounded_weight_count(n, r)) - 2.0 * (1.0 / to_f64(&gap)).log2() - 1.0;
            0.5 * (log / p as f64).exp2()
        }
    };
    Ok(BoundReport {
        name: "ip_ds_lower_bound".into(),
        formula: "1/2 * 2^((log2 B(n,r) - 2 log2(1/(1-2 eps)) - 1)/p)".into(),
        inputs: inputs(&[
            ("n", n.to_string()),
            ("r", r.to_string()),
            ("eps", format_rational(eps)),
            ("p", p.to_string()),
        ]),
        value,
        exact: exact.as_ref().map(format_rational),
    })
}

/// Binary entropy in bits, `H(0) = H(1) = 0`.
pub fn binary_entropy(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        return 0.0;
    }
    -x * x.log2() - (1.0 - x) * (1.0 - x).log2()
}

/// Set size above which no one-probe structure tolerates noise `δ` at
/// error `ε`: `1/(δ·(1 − H(ε)))`.
pub fn katz_trevisan_threshold(delta: f64, eps: f64) -> Result<BoundReport> {
    if delta.is_nan() || delta <= 0.0 || !(0.0..0.5).contains(&eps) {
        return Err(Error::InvalidParameter(format!(
            "need delta > 0 and 0 ≤ eps < 1/2, got delta = {delta}, eps = {eps}"
        )));
    }
    Ok(BoundReport {
        name: "katz_trevisan_threshold".into(),
        formula: "1/(delta (1 - H(eps)))".into(),
        inputs: inputs(&[("delta", delta.to_string()), ("eps", eps.to_string())]),
        value: 1.0 / (delta * (1.0 - binary_entropy(eps))),
        exact: None,
    })
}

/// `log₂ B(n,s)`, the information-theoretic length of `s`-out-of-`n`
/// membership.
pub fn membership_trivial_lb(n: u64, s: u64) -> Result<BoundReport> {
    if s > n {
        return Err(Error::InvalidParameter(format!("s = {s} exceeds n = {n}")));
    }
    let b = bounded_weight_count(n, s);
    Ok(BoundReport {
        name: "membership_trivial_lb".into(),
        formula: "log2 B(n,s)".into(),
        inputs: inputs(&[("n", n.to_string()), ("s", s.to_string()), ("B", b.to_string())]),
        value: log2_big(&b),
        exact: None,
    })
}

pub const DISCREPANCY_MAX_N: usize = 12;
pub const DISCREPANCY_MAX_COLUMNS: u128 = 4096;
/// Exhaustive rectangle checks run only below this many rectangles.
pub const EXHAUSTIVE_RECTANGLES: u128 = 1 << 20;

/// `±1` matrix `M[x][y] = (−1)^{x·y}` with rows all `x ∈ {0,1}ⁿ` and columns
/// the `y` of weight ≤ r in rank order.
#[derive(Clone, Debug)]
pub struct SignMatrix {
    n: usize,
    rows: usize,
    cols: usize,
    entries: Vec<i8>,
}

impl SignMatrix {
    pub fn new(n: usize, r: usize) -> Result<Self> {
        if n > DISCREPANCY_MAX_N {
            return Err(Error::Infeasible(format!(
                "n = {n} above the limit {DISCREPANCY_MAX_N}"
            )));
        }
        let space = BoundedWeightSpace::new(n, r)?;
        if space.size() > DISCREPANCY_MAX_COLUMNS {
            return Err(Error::Infeasible(format!(
                "B(n, r) = {} above the limit {DISCREPANCY_MAX_COLUMNS}",
                space.size()
            )));
        }
        let ys: Vec<u64> = space.iter().map(|y| y.value().expect("n ≤ 12")).collect();
        let rows = 1usize << n;
        let mut entries = Vec::with_capacity(rows * ys.len());
        for x in 0..rows as u64 {
            entries.extend(ys.iter().map(|&y| if (x & y).count_ones() % 2 == 0 { 1i8 } else { -1 }));
        }
        Ok(SignMatrix {
            n,
            rows,
            cols: ys.len(),
            entries,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, x: usize, y: usize) -> i8 {
        self.entries[x * self.cols + y]
    }

    /// Whether `MᵀM = 2ⁿ·I` holds entry by entry.
    pub fn gram_is_scaled_identity(&self) -> bool {
        for a in 0..self.cols {
            for b in a..self.cols {
                let dot: i64 = (0..self.rows).map(|x| (self.get(x, a) * self.get(x, b)) as i64).sum();
                let want = if a == b { self.rows as i64 } else { 0 };
                if dot != want {
                    return false;
                }
            }
        }
        true
    }

    /// Entry sum over the rectangle `A × B`.
    pub fn rectangle_sum(&self, rows: &BitString, cols: &BitString) -> i64 {
        rows.ones_positions()
            .map(|x| cols.ones_positions().map(|y| self.get(x, y) as i64).sum::<i64>())
            .sum()
    }

    /// Whether `δ_μ(A×B) ≤ √|R| / (√2ⁿ·B(n,r))` for the uniform `μ`, checked
    /// as the integer inequality `S² ≤ |A|·|B|·2ⁿ`.
    pub fn lemma_holds(&self, sum: i64, a: usize, b: usize) -> bool {
        (sum as i128).pow(2) <= ((a as i128) * (b as i128)) << self.n
    }

    /// `δ_μ(R) = |S| / (2ⁿ·B(n,r))` and the lemma's bound, as floats.
    pub fn discrepancy(&self, sum: i64, a: usize, b: usize) -> (f64, f64) {
        let denom = self.rows as f64 * self.cols as f64;
        let bound = ((a * b) as f64).sqrt() / ((self.rows as f64).sqrt() * self.cols as f64);
        (sum.unsigned_abs() as f64 / denom, bound)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscrepancyReport {
    pub n: usize,
    pub r: usize,
    pub columns: usize,
    pub gram_ok: bool,
    /// `"exhaustive"` or `"sampled"`.
    pub mode: String,
    pub rectangles: u64,
    pub seed: Option<u64>,
    pub violations: u64,
    /// Largest `δ_μ(R) / bound` seen (0 when every sum was 0).
    pub max_ratio: f64,
}

impl DiscrepancyReport {
    pub fn passed(&self) -> bool {
        self.gram_ok && self.violations == 0
    }
}

/// Checks `MᵀM = 2ⁿI` and the rectangle bound, exhaustively when there are at
/// most [`EXHAUSTIVE_RECTANGLES`] rectangles and `samples` is `None`,
/// otherwise on `samples` random rectangles (each row and column kept with
/// probability 1/2).
pub fn discrepancy_verify(n: usize, r: usize, samples: Option<u64>, seed: u64) -> Result<DiscrepancyReport> {
    let m = SignMatrix::new(n, r)?;
    let gram_ok = m.gram_is_scaled_identity();
    let log_rects = m.rows() as u32 + m.cols() as u32;
    let exhaustive = samples.is_none();
    if exhaustive && (log_rects >= 128 || 1u128 << log_rects > EXHAUSTIVE_RECTANGLES) {
        return Err(Error::Infeasible(format!(
            "2^{log_rects} rectangles above the exhaustive limit 2^20; sample instead"
        )));
    }
    let mut violations = 0;
    let mut max_ratio = 0.0f64;
    let mut rectangles = 0u64;
    let mut record = |sum: i64, a: usize, b: usize| {
        rectangles += 1;
        if !m.lemma_holds(sum, a, b) {
            violations += 1;
        }
        if sum != 0 {
            let (d, bound) = m.discrepancy(sum, a, b);
            max_ratio = max_ratio.max(d / bound);
        }
    };
    if exhaustive {
        let mut col_sums = vec![0i64; m.cols()];
        for a in 0..1u64 << m.rows() {
            col_sums.iter_mut().for_each(|c| *c = 0);
            for x in 0..m.rows() {
                if a >> x & 1 == 1 {
                    for (y, c) in col_sums.iter_mut().enumerate() {
                        *c += m.get(x, y) as i64;
                    }
                }
            }
            let a_size = a.count_ones() as usize;
            for b in 0..1u64 << m.cols() {
                let sum = (0..m.cols()).filter(|y| b >> y & 1 == 1).map(|y| col_sums[y]).sum();
                record(sum, a_size, b.count_ones() as usize);
            }
        }
    } else {
        let count = samples.unwrap_or(0);
        for k in 0..count {
            let mut rng = seed::rng(seed, &[k]);
            let rows = BitString::from_bools((0..m.rows()).map(|_| rng.gen::<bool>()));
            let cols = BitString::from_bools((0..m.cols()).map(|_| rng.gen::<bool>()));
            let sum = m.rectangle_sum(&rows, &cols);
            record(sum, rows.weight(), cols.weight());
        }
    }
    Ok(DiscrepancyReport {
        n,
        r,
        columns: m.cols(),
        gram_ok,
        mode: if exhaustive { "exhaustive" } else { "sampled" }.into(),
        rectangles,
        seed: (!exhaustive).then_some(seed),
        violations,
        max_ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> BigRational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn parses_rationals() {
        assert_eq!(q("1/4"), q("0.25"));
        assert_eq!(q("2.5e-1"), q("1/4"));
        assert_eq!(q("-3"), BigRational::from_integer((-3).into()));
        assert_eq!(q(".5"), q("1/2"));
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational(".").is_err());
    }

    #[test]
    fn ds_bound_example() {
        let rep = ip_ds_lower_bound(4, 2, &q("1/4"), 1).unwrap();
        assert_eq!(rep.exact.as_deref(), Some("11/16"));
        assert!((rep.value - 0.6875).abs() < 1e-15);
        assert!(ip_ds_lower_bound(4, 2, &q("1/2"), 1).is_err());
        // exponent path agrees with the closed form at p = 3
        let b = 11.0f64;
        let rep = ip_ds_lower_bound(4, 2, &q("1/4"), 3).unwrap();
        let direct = 0.5 * ((b.log2() - 2.0 * 2f64.log2() - 1.0) / 3.0).exp2();
        assert!((rep.value - direct).abs() < 1e-12);
    }

    #[test]
    fn ds_bound_nonincreasing_in_p() {
        for n in 1..=8u64 {
            for r in 0..=n {
                let mut prev = f64::INFINITY;
                for p in 1..6 {
                    let v = ip_ds_lower_bound(n, r, &q("0.1"), p).unwrap().value;
                    assert!(v <= prev + 1e-12 || prev < 0.5 + 1e-12);
                    prev = v;
                }
            }
        }
    }

    #[test]
    fn comm_bound_examples() {
        let b = ip_comm_lower_bound(4, 2, 0.5).unwrap();
        assert!((b.value - 11f64.log2()).abs() < 1e-12);
        let b = ip_comm_lower_bound(4, 2, 0.25).unwrap();
        assert!((b.value - 1.459431618637297).abs() < 1e-9);
        let lo = ip_comm_lower_bound(10, 3, 0.1).unwrap().value;
        let hi = ip_comm_lower_bound(10, 3, 0.2).unwrap().value;
        assert!(lo < hi);
        assert!(ip_comm_lower_bound(4, 2, 0.0).is_err());
    }

    #[test]
    fn katz_trevisan_examples() {
        assert!((katz_trevisan_threshold(0.02, 0.0).unwrap().value - 50.0).abs() < 1e-9);
        let v = katz_trevisan_threshold(0.01, 0.25).unwrap().value;
        assert!((v - 529.9).abs() < 0.1, "{v}");
        let a = katz_trevisan_threshold(0.01, 0.1).unwrap().value;
        let b = katz_trevisan_threshold(0.01, 0.2).unwrap().value;
        assert!(a < b);
        assert!(katz_trevisan_threshold(0.01, 0.5).is_err());
    }

    #[test]
    fn trivial_membership_bound() {
        let rep = membership_trivial_lb(64, 2).unwrap();
        assert_eq!(rep.inputs["B"], "2081");
        assert!((rep.value - 2081f64.log2()).abs() < 1e-12);
    }

    #[test]
    fn sign_matrix_small() {
        let m = SignMatrix::new(2, 2).unwrap();
        assert_eq!((m.rows(), m.cols()), (4, 4));
        assert!(m.gram_is_scaled_identity());
        let full = BitString::ones(4);
        let sum = m.rectangle_sum(&full, &full);
        assert_eq!(sum, 4);
        let (d, bound) = m.discrepancy(sum, 4, 4);
        assert_eq!((d, bound), (0.25, 0.5));
        assert!(m.lemma_holds(0, 0, 0));
    }

    #[test]
    fn discrepancy_exhaustive_small() {
        for (n, r) in [(1, 1), (2, 1), (2, 2), (3, 1)] {
            let rep = discrepancy_verify(n, r, None, 0).unwrap();
            assert!(rep.passed(), "{rep:?}");
            assert!(rep.max_ratio <= 1.0);
        }
        assert!(matches!(discrepancy_verify(6, 6, None, 0), Err(Error::Infeasible(_))));
        assert!(matches!(SignMatrix::new(13, 1), Err(Error::Infeasible(_))));
    }
}
