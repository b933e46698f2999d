//! Inner-product and substring structures.
//!
//! * [`IpTableStructure`]: noiseless table of `x · z` over all `z` of weight
//!   at most `⌈r/p⌉`, read with `p` probes.
//! * [`HadamardIpStructure`]: the Hadamard code of `x`, two probes per query.
//! * [`PolyIpStructure`]: `p` truth tables from secret-sharing a low-degree
//!   polynomial, `p` probes per query.
//! * [`SubstringStructure`]: Hadamard codes of `r` chunks of `x`,
//!   concatenated.

use serde::{Deserialize, Serialize};

use crate::bits::{binomial, split_query, BitString, BoundedWeightSpace};
use crate::error::{Error, Result};
use crate::hadamard::{HadamardCode, HadamardQuery};
use crate::oracle::{Coins, Probe, Window};

/// Largest table (in bits, as a power of two) any structure here will
/// materialize.
pub const MAX_TABLE_LOG2: usize = 28;

fn check_query(y: &BitString, n: usize, r: usize) -> Result<()> {
    if y.len() != n {
        return Err(Error::LengthMismatch { left: y.len(), right: n });
    }
    if y.weight() > r {
        return Err(Error::WeightExceeded {
            weight: y.weight(),
            cap: r,
        });
    }
    Ok(())
}

fn check_len(x: &BitString, n: usize) -> Result<()> {
    if x.len() != n {
        return Err(Error::LengthMismatch { left: x.len(), right: n });
    }
    Ok(())
}

/// `x · z` for every `z` of weight at most `⌈r/p⌉`, in lexicographic rank
/// order.
#[derive(Clone, Debug)]
pub struct IpTableStructure {
    n: usize,
    r: usize,
    p: usize,
    space: BoundedWeightSpace,
}

impl IpTableStructure {
    pub fn new(n: usize, r: usize, p: usize) -> Result<Self> {
        if p == 0 || r > n {
            return Err(Error::InvalidParameter(format!(
                "need p ≥ 1 and r ≤ n, got n = {n}, r = {r}, p = {p}"
            )));
        }
        let space = BoundedWeightSpace::new(n, r.div_ceil(p))?;
        if space.size() > 1u128 << MAX_TABLE_LOG2 {
            return Err(Error::Infeasible(format!(
                "table of B({n}, {}) = {} bits",
                r.div_ceil(p),
                space.size()
            )));
        }
        Ok(IpTableStructure { n, r, p, space })
    }

    pub fn len(&self) -> usize {
        self.space.size() as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn probes(&self) -> usize {
        self.p
    }

    pub fn encode(&self, x: &BitString) -> Result<BitString> {
        check_len(x, self.n)?;
        let xv: Vec<bool> = x.iter().collect();
        // walk the table in rank order without unranking each entry
        let mut out = Vec::with_capacity(self.len());
        let mut z = Vec::with_capacity(self.space.r());
        visit_lex(self.n, self.space.r(), 0, &mut z, &mut |ones| {
            out.push(ones.iter().fold(false, |acc, &i| acc ^ xv[i]));
        });
        Ok(BitString::from_bools(out))
    }

    /// One probe per piece of `split_query(y, p)`; returns the XOR.
    pub fn decode(&self, oracle: &mut dyn Probe, y: &BitString) -> Result<bool> {
        check_query(y, self.n, self.r)?;
        let mut acc = false;
        for z in split_query(y, self.p)? {
            acc ^= oracle.probe(self.space.rank(&z)? as usize)?;
        }
        Ok(acc)
    }

    /// Table positions probed for `y`.
    pub fn probe_positions(&self, y: &BitString) -> Result<Vec<usize>> {
        check_query(y, self.n, self.r)?;
        split_query(y, self.p)?
            .iter()
            .map(|z| Ok(self.space.rank(z)? as usize))
            .collect()
    }
}

/// Calls `f` with the one-positions of every string of weight ≤ `r`, in
/// lexicographic order (index 0 most significant, so "0…0" first).
fn visit_lex(n: usize, r: usize, start: usize, ones: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
    // strings with first one at a later position are smaller, so recurse
    // from the last free position backwards
    f(ones);
    if ones.len() == r {
        return;
    }
    for pos in (start..n).rev() {
        ones.push(pos);
        visit_lex(n, r, pos + 1, ones, f);
        ones.pop();
    }
}

/// Hadamard code of the whole of `x`; `x · y` for any `y` with two probes.
#[derive(Clone, Debug)]
pub struct HadamardIpStructure {
    code: HadamardCode,
}

impl HadamardIpStructure {
    pub fn new(n: usize) -> Result<Self> {
        Ok(HadamardIpStructure {
            code: HadamardCode::new(n)?,
        })
    }

    pub fn n(&self) -> usize {
        self.code.message_len()
    }

    pub fn len(&self) -> usize {
        self.code.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn code(&self) -> &HadamardCode {
        &self.code
    }

    pub fn encode(&self, x: &BitString) -> Result<BitString> {
        self.code.encode(x)
    }

    pub fn decode(&self, oracle: &mut dyn Probe, y: &BitString, coins: &mut dyn Coins) -> Result<bool> {
        self.code.decode_ip(oracle, y, coins)
    }
}

/// Smallest `m` with `m^d ≥ n·d^d`, i.e. `⌈d·n^{1/d}⌉` computed exactly.
pub fn poly_m(n: usize, d: usize) -> usize {
    let target = num_bigint::BigUint::from(n) * num_bigint::BigUint::from(d).pow(d as u32);
    let guess = (d as f64 * (n as f64).powf(1.0 / d as f64)).ceil() as usize;
    let pow = |m: usize| num_bigint::BigUint::from(m).pow(d as u32);
    let mut m = guess.saturating_sub(2).max(1);
    while pow(m) < target {
        m += 1;
    }
    while m > 1 && pow(m - 1) >= target {
        m -= 1;
    }
    m
}

/// The first `count` subsets of `[m]` of size `d` in lexicographic order.
pub fn lex_subsets(m: usize, d: usize, count: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(count);
    if d > m {
        return out;
    }
    let mut cur: Vec<usize> = (0..d).collect();
    while out.len() < count {
        out.push(cur.clone());
        // advance to the next combination
        let mut k = d;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            if cur[k] < m - d + k {
                cur[k] += 1;
                for t in k + 1..d {
                    cur[t] = cur[t - 1] + 1;
                }
                break;
            }
        }
    }
    out
}

/// Polynomial secret-sharing structure: `p` probes, length `p·2^{(p−1)rm}`.
///
/// Variables of the polynomial are `z^{(l)}_v` for `l < r`, `v < m`; a point
/// is an `rm`-bit vector with `z^{(1)}` first and, inside each `z^{(l)}`,
/// variable 0 first (most significant). Table `j` is indexed by the other
/// `p − 1` shares concatenated in increasing share order.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolyIpStructure {
    n: usize,
    r: usize,
    p: usize,
    m: usize,
    sets: Vec<Vec<usize>>,
}

/// A monomial of `q_{x,r}`: for each variable `(l, v)`, which share it reads.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShareMonomial {
    pub l: usize,
    pub vars: Vec<(usize, usize)>,
    pub block: usize,
}

impl PolyIpStructure {
    pub fn new(n: usize, r: usize, p: usize) -> Result<Self> {
        if p < 2 {
            return Err(Error::InvalidParameter(format!("polynomial scheme needs p ≥ 2, got {p}")));
        }
        if n == 0 || r == 0 || r > n {
            return Err(Error::InvalidParameter(format!(
                "need 1 ≤ r ≤ n, got n = {n}, r = {r}"
            )));
        }
        let d = p - 1;
        let m = poly_m(n, d);
        if binomial(m as u64, d as u64) < n.into() {
            return Err(Error::Infeasible(format!("C({m}, {d}) < n = {n}")));
        }
        let input_bits = (p - 1) * r * m;
        if input_bits > MAX_TABLE_LOG2 {
            return Err(Error::Infeasible(format!(
                "truth tables over 2^{input_bits} inputs"
            )));
        }
        Ok(PolyIpStructure {
            n,
            r,
            p,
            m,
            sets: lex_subsets(m, d, n),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn degree(&self) -> usize {
        self.p - 1
    }

    pub fn sets(&self) -> &[Vec<usize>] {
        &self.sets
    }

    fn share_bits(&self) -> usize {
        self.r * self.m
    }

    fn input_bits(&self) -> usize {
        (self.p - 1) * self.share_bits()
    }

    pub fn block_len(&self) -> usize {
        1 << self.input_bits()
    }

    /// `p·2^{(p−1)rm}`.
    pub fn len(&self) -> usize {
        self.p * self.block_len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Bit of variable `(l, v)` inside an `rm`-bit share value.
    fn var_bit(&self, l: usize, v: usize) -> usize {
        self.share_bits() - 1 - (l * self.m + v)
    }

    /// `p_x(z) = Σ_i x_i Π_{v∈S_i} z_v`.
    pub fn eval_px(&self, x: &BitString, z: &[bool]) -> Result<bool> {
        check_len(x, self.n)?;
        Ok(x
            .ones_positions()
            .fold(false, |acc, i| acc ^ self.sets[i].iter().all(|&v| z[v])))
    }

    /// `q_{x,r}` at the sum of the given shares (each an `rm`-bit value).
    pub fn eval_q(&self, x: &BitString, shares: &[u64]) -> Result<bool> {
        let w = shares.iter().fold(0u64, |a, &s| a ^ s);
        let mut acc = false;
        for l in 0..self.r {
            let z: Vec<bool> = (0..self.m).map(|v| (w >> self.var_bit(l, v)) & 1 == 1).collect();
            acc ^= self.eval_px(x, &z)?;
        }
        Ok(acc)
    }

    /// Every monomial of `q_{x,r}` with the block it is assigned to (the
    /// least share index it does not read).
    pub fn monomials(&self, x: &BitString) -> Result<Vec<ShareMonomial>> {
        check_len(x, self.n)?;
        let d = self.degree();
        let mut out = Vec::new();
        for i in x.ones_positions() {
            let set = &self.sets[i];
            for l in 0..self.r {
                // every map from S_i to shares, as a base-p counter
                let total = self.p.pow(d as u32);
                for code in 0..total {
                    let mut c = code;
                    let vars: Vec<(usize, usize)> = set
                        .iter()
                        .map(|&v| {
                            let share = c % self.p;
                            c /= self.p;
                            (v, share)
                        })
                        .collect();
                    let block = (0..self.p)
                        .find(|j| vars.iter().all(|&(_, s)| s != *j))
                        .expect("d < p shares leave one unused");
                    out.push(ShareMonomial { l, vars, block });
                }
            }
        }
        Ok(out)
    }

    /// Position of share `share`'s bit `bit` in the input of table `block`.
    fn input_bit(&self, block: usize, share: usize, bit: usize) -> usize {
        let slot = if share < block { share } else { share - 1 };
        (self.p - 2 - slot) * self.share_bits() + bit
    }

    /// Truth tables `q^{(1)}, …, q^{(p)}`, concatenated.
    pub fn encode(&self, x: &BitString) -> Result<BitString> {
        let k = self.input_bits();
        let mut coeffs = vec![vec![false; 1 << k]; self.p];
        for mono in self.monomials(x)? {
            let mask = mono.vars.iter().fold(0usize, |acc, &(v, share)| {
                acc | 1 << self.input_bit(mono.block, share, self.var_bit(mono.l, v))
            });
            coeffs[mono.block][mask] ^= true;
        }
        // GF(2) zeta transform: value(u) = Σ_{mask ⊆ u} coeff(mask)
        for table in &mut coeffs {
            for bit in 0..k {
                for u in 0..table.len() {
                    if u >> bit & 1 == 1 {
                        table[u] ^= table[u ^ (1 << bit)];
                    }
                }
            }
        }
        Ok(BitString::from_bools(coeffs.into_iter().flatten()))
    }

    /// The point `w` for query `y`: the characteristic vectors of `S_i` for
    /// the one-positions of `y`, then zero blocks standing for the dummy
    /// variable.
    pub fn query_point(&self, y: &BitString) -> Result<u64> {
        check_query(y, self.n, self.r)?;
        let mut w = 0u64;
        for (l, i) in y.ones_positions().enumerate() {
            for &v in &self.sets[i] {
                w |= 1 << self.var_bit(l, v);
            }
        }
        Ok(w)
    }

    /// Table index read in block `block` for the given shares.
    pub fn table_index(&self, block: usize, shares: &[u64]) -> usize {
        let mut idx = 0usize;
        for (j, &s) in shares.iter().enumerate() {
            if j != block {
                idx = (idx << self.share_bits()) | s as usize;
            }
        }
        idx
    }

    /// Shares `w^{(1)}, …, w^{(p−1)}` uniform, `w^{(p)}` completing the sum;
    /// one probe per block; XOR of the answers.
    pub fn decode(&self, oracle: &mut dyn Probe, y: &BitString, coins: &mut dyn Coins) -> Result<bool> {
        let w = self.query_point(y)?;
        let share_space = 1u64 << self.share_bits();
        let mut shares: Vec<u64> = (0..self.p - 1).map(|_| coins.below(share_space)).collect();
        shares.push(shares.iter().fold(w, |a, &s| a ^ s));
        let mut acc = false;
        for block in 0..self.p {
            acc ^= oracle.probe(block * self.block_len() + self.table_index(block, &shares))?;
        }
        Ok(acc)
    }
}

/// Hadamard codes of the `r` chunks of `x` (zero-padded to `r·⌈n/r⌉` bits),
/// concatenated.
#[derive(Clone, Debug)]
pub struct SubstringStructure {
    n: usize,
    r: usize,
    piece: HadamardCode,
}

impl SubstringStructure {
    pub fn new(n: usize, r: usize) -> Result<Self> {
        if r == 0 || r > n {
            return Err(Error::InvalidParameter(format!(
                "need 1 ≤ r ≤ n, got n = {n}, r = {r}"
            )));
        }
        Ok(SubstringStructure {
            n,
            r,
            piece: HadamardCode::new(n.div_ceil(r))?,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn chunk_bits(&self) -> usize {
        self.piece.message_len()
    }

    pub fn piece_len(&self) -> usize {
        self.piece.len()
    }

    /// `r·2^{⌈n/r⌉}`.
    pub fn len(&self) -> usize {
        self.r * self.piece.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Probes used for a query of weight `w` with `t` repetitions.
    pub fn budget(w: usize, t: usize) -> usize {
        2 * t * w
    }

    pub fn encode(&self, x: &BitString) -> Result<BitString> {
        check_len(x, self.n)?;
        let c = self.chunk_bits();
        let padded = x.concat(&BitString::zeros(self.r * c - self.n));
        let mut out = BitString::zeros(0);
        for k in 0..self.r {
            out = out.concat(&self.piece.encode(&padded.slice(k * c, c)?)?);
        }
        Ok(out)
    }

    /// Piece and local coordinate holding bit `i` of `x`.
    pub fn locate(&self, i: usize) -> (usize, usize) {
        (i / self.chunk_bits(), i % self.chunk_bits())
    }

    /// `x` restricted to the one-positions of `y`, each bit by `t`-fold
    /// majority inside its piece.
    pub fn decode(
        &self,
        oracle: &mut dyn Probe,
        y: &BitString,
        t: usize,
        coins: &mut dyn Coins,
    ) -> Result<BitString> {
        check_query(y, self.n, self.r)?;
        let mut out = Vec::with_capacity(y.weight());
        for i in y.ones_positions() {
            let (k, local) = self.locate(i);
            let mut w = Window::new(oracle, k * self.piece.len(), self.piece.len())?;
            out.push(self.piece.amplified_decode(&mut w, &HadamardQuery::Bit(local), t, coins)?);
        }
        Ok(BitString::from_bools(out))
    }
}
