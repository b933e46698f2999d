//! Uniform interface over every structure in the crate, used by the harness,
//! persistence and the command line.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits::{dot_mod2, extract_substring, BitString, BoundedWeightSpace};
use crate::error::{Error, Result};
use crate::hadamard::{EqualityStructure, HadamardCode};
use crate::inner_product::{HadamardIpStructure, IpTableStructure, PolyIpStructure, SubstringStructure};
use crate::membership::{BmrvBuildReport, BmrvOptions, BmrvStructure, ComposedMembership, ComposedOptions, HadamardSegment};
use crate::oracle::{Coins, Probe};
use crate::seed;

/// Queries beyond this count are thinned to an evenly spaced subset.
pub const MAX_DEFAULT_QUERIES: usize = 1024;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Query {
    Index(usize),
    Vector(BitString),
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Query::Index(i) => write!(f, "{i}"),
            Query::Vector(y) => write!(f, "{y}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Answer {
    Bit(bool),
    Bits(BitString),
}

impl fmt::Display for Answer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Answer::Bit(b) => write!(f, "{}", *b as u8),
            Answer::Bits(y) => write!(f, "{y}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ComposedDecoder {
    /// Uniform block; coin unless it holds exactly one probe-set element.
    #[default]
    Block,
    /// Uniform probe-set element, decoded from its block.
    Direct,
}

/// Scheme selector plus its parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "kebab-case")]
pub enum SchemeSpec {
    HadLdc { n: usize },
    HadIp { n: usize },
    Equality { n: usize },
    IpTable { n: usize, r: usize, p: usize },
    PolyIp { n: usize, r: usize, p: usize },
    Substring { n: usize, r: usize, t: usize },
    Bmrv {
        n: usize,
        s: usize,
        eps: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n_prime: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        d: Option<usize>,
    },
    Composed {
        n: usize,
        s: usize,
        #[serde(default)]
        decoder: ComposedDecoder,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        block_bits: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        blocks: Option<usize>,
    },
}

impl SchemeSpec {
    pub fn id(&self) -> &'static str {
        match self {
            SchemeSpec::HadLdc { .. } => "had-ldc",
            SchemeSpec::HadIp { .. } => "had-ip",
            SchemeSpec::Equality { .. } => "equality",
            SchemeSpec::IpTable { .. } => "ip-table",
            SchemeSpec::PolyIp { .. } => "poly-ip",
            SchemeSpec::Substring { .. } => "substring",
            SchemeSpec::Bmrv { .. } => "bmrv",
            SchemeSpec::Composed { .. } => "composed",
        }
    }

    pub fn n(&self) -> usize {
        match *self {
            SchemeSpec::HadLdc { n }
            | SchemeSpec::HadIp { n }
            | SchemeSpec::Equality { n }
            | SchemeSpec::IpTable { n, .. }
            | SchemeSpec::PolyIp { n, .. }
            | SchemeSpec::Substring { n, .. }
            | SchemeSpec::Bmrv { n, .. }
            | SchemeSpec::Composed { n, .. } => n,
        }
    }

    /// Largest data-item weight the scheme accepts.
    pub fn item_weight_cap(&self) -> usize {
        match *self {
            SchemeSpec::Bmrv { s, .. } | SchemeSpec::Composed { s, .. } => s,
            _ => self.n(),
        }
    }

    pub fn build(&self, seed: u64) -> Result<Box<dyn Scheme>> {
        Ok(match *self {
            SchemeSpec::HadLdc { n } => Box::new(HadLdc(HadamardCode::new(n)?)),
            SchemeSpec::HadIp { n } => Box::new(HadIp(HadamardIpStructure::new(n)?)),
            SchemeSpec::Equality { n } => {
                let code = HadamardCode::new(n)?;
                let dmin = code.len() / 2;
                Box::new(Equality(EqualityStructure::new(code, dmin)))
            }
            SchemeSpec::IpTable { n, r, p } => Box::new(IpTable {
                st: IpTableStructure::new(n, r, p)?,
                n,
                r,
            }),
            SchemeSpec::PolyIp { n, r, p } => Box::new(PolyIp {
                st: PolyIpStructure::new(n, r, p)?,
                r,
                p,
            }),
            SchemeSpec::Substring { n, r, t } => {
                if t % 2 == 0 {
                    return Err(Error::InvalidParameter(format!(
                        "repetition count t must be odd, got {t}"
                    )));
                }
                Box::new(Substring {
                    st: SubstringStructure::new(n, r)?,
                    t,
                })
            }
            SchemeSpec::Bmrv { n, s, eps, n_prime, d } => {
                let opts = BmrvOptions {
                    n_prime,
                    d,
                    ..Default::default()
                };
                let (st, report) = BmrvStructure::build(n, s, eps, seed, &opts)?;
                Box::new(Bmrv(st, report))
            }
            SchemeSpec::Composed {
                n,
                s,
                decoder,
                block_bits,
                blocks,
            } => {
                let opts = ComposedOptions {
                    block_bits,
                    blocks,
                    ..Default::default()
                };
                Box::new(Composed {
                    cm: ComposedMembership::build(n, s, seed, &opts)?,
                    decoder,
                })
            }
        })
    }

    /// Seeded data item within the scheme's weight cap (exactly the cap for
    /// membership schemes).
    pub fn default_item(&self, seed: u64) -> BitString {
        let n = self.n();
        let mut rng = seed::rng(seed, &[1]);
        match self {
            SchemeSpec::Bmrv { s, .. } | SchemeSpec::Composed { s, .. } => {
                let picks = rand::seq::index::sample(&mut rng, n, (*s).min(n));
                BitString::from_positions(n, picks.iter()).expect("in range")
            }
            _ => BitString::from_bools((0..n).map(|_| rng.gen::<bool>())),
        }
    }

    pub fn check_item(&self, x: &BitString) -> Result<()> {
        if x.len() != self.n() {
            return Err(Error::LengthMismatch {
                left: x.len(),
                right: self.n(),
            });
        }
        if x.weight() > self.item_weight_cap() {
            return Err(Error::WeightExceeded {
                weight: x.weight(),
                cap: self.item_weight_cap(),
            });
        }
        Ok(())
    }
}

/// A built structure: encoder, probe-counted decoder and ground truth.
pub trait Scheme: Send + Sync {
    /// Stored length `N`.
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn encode(&self, x: &BitString) -> Result<BitString>;

    fn decode(&self, oracle: &mut dyn Probe, q: &Query, coins: &mut dyn Coins) -> Result<Answer>;

    fn truth(&self, x: &BitString, q: &Query) -> Result<Answer>;

    fn probe_budget(&self, q: &Query) -> usize;

    /// The default query set for item `x`.
    fn queries(&self, x: &BitString) -> Vec<Query>;

    /// Number of equally likely coin outcomes of one decode, if small enough
    /// to count.
    fn coin_space(&self, q: &Query) -> Option<u128>;

    /// Hadamard-coded segments the decoder reads for `q`, highest priority
    /// first, with the message coordinates it needs in each.
    fn hadamard_targets(&self, _q: &Query) -> Result<Vec<HadamardSegment>> {
        Ok(Vec::new())
    }

    /// Positions a one-probe decoder may read for `q`.
    fn probe_set(&self, _q: &Query) -> Option<Vec<usize>> {
        None
    }

    fn parse_query(&self, s: &str) -> Result<Query>;

    /// What the randomized build established, if anything.
    fn build_report(&self) -> Option<serde_json::Value> {
        None
    }
}

fn index_query(q: &Query, n: usize) -> Result<usize> {
    match q {
        Query::Index(i) if *i < n => Ok(*i),
        Query::Index(i) => Err(Error::IndexOutOfRange { index: *i, bound: n }),
        Query::Vector(_) => Err(Error::InvalidParameter("expected an index query".into())),
    }
}

fn vector_query(q: &Query) -> Result<&BitString> {
    match q {
        Query::Vector(y) => Ok(y),
        Query::Index(_) => Err(Error::InvalidParameter("expected a vector query".into())),
    }
}

fn parse_index(s: &str) -> Result<Query> {
    s.trim()
        .parse()
        .map(Query::Index)
        .map_err(|_| Error::Parse(format!("not an index: {s:?}")))
}

fn parse_vector(s: &str, n: usize) -> Result<Query> {
    let y: BitString = s.trim().parse()?;
    if y.len() != n {
        return Err(Error::LengthMismatch { left: y.len(), right: n });
    }
    Ok(Query::Vector(y))
}

fn evenly_spaced(total: u128) -> impl Iterator<Item = u128> {
    let k = (MAX_DEFAULT_QUERIES as u128).min(total);
    (0..k).map(move |j| j * total / k)
}

fn all_vectors(n: usize) -> Vec<Query> {
    let total = 1u128 << n.min(127);
    evenly_spaced(total)
        .map(|v| Query::Vector(BitString::from_value(v as u64, n).expect("n ≤ 64")))
        .collect()
}

fn bounded_vectors(n: usize, r: usize) -> Vec<Query> {
    let space = BoundedWeightSpace::new(n, r).expect("validated at build");
    evenly_spaced(space.size())
        .map(|k| Query::Vector(space.unrank(k).expect("below size")))
        .collect()
}

fn pow_checked(base: u128, exp: usize) -> Option<u128> {
    base.checked_pow(u32::try_from(exp).ok()?)
}

struct HadLdc(HadamardCode);

impl Scheme for HadLdc {
    fn len(&self) -> usize {
        self.0.len()
    }
    fn encode(&self, x: &BitString) -> Result<BitString> {
        self.0.encode(x)
    }
    fn decode(&self, oracle: &mut dyn Probe, q: &Query, coins: &mut dyn Coins) -> Result<Answer> {
        let i = index_query(q, self.0.message_len())?;
        self.0.decode_bit(oracle, i, coins).map(Answer::Bit)
    }
    fn truth(&self, x: &BitString, q: &Query) -> Result<Answer> {
        Ok(Answer::Bit(x.get(index_query(q, x.len())?)))
    }
    fn probe_budget(&self, _q: &Query) -> usize {
        2
    }
    fn queries(&self, _x: &BitString) -> Vec<Query> {
        (0..self.0.message_len()).map(Query::Index).collect()
    }
    fn coin_space(&self, _q: &Query) -> Option<u128> {
        Some(self.0.len() as u128)
    }
    fn hadamard_targets(&self, q: &Query) -> Result<Vec<HadamardSegment>> {
        Ok(vec![HadamardSegment {
            offset: 0,
            message_bits: self.0.message_len(),
            coordinates: vec![index_query(q, self.0.message_len())?],
        }])
    }
    fn parse_query(&self, s: &str) -> Result<Query> {
        parse_index(s)
    }
}

struct HadIp(HadamardIpStructure);

impl Scheme for HadIp {
    fn len(&self) -> usize {
        self.0.len()
    }
    fn encode(&self, x: &BitString) -> Result<BitString> {
        self.0.encode(x)
    }
    fn decode(&self, oracle: &mut dyn Probe, q: &Query, coins: &mut dyn Coins) -> Result<Answer> {
        self.0.decode(oracle, vector_query(q)?, coins).map(Answer::Bit)
    }
    fn truth(&self, x: &BitString, q: &Query) -> Result<Answer> {
        dot_mod2(x, vector_query(q)?).map(Answer::Bit)
    }
    fn probe_budget(&self, _q: &Query) -> usize {
        2
    }
    fn queries(&self, _x: &BitString) -> Vec<Query> {
        all_vectors(self.0.n())
    }
    fn coin_space(&self, _q: &Query) -> Option<u128> {
        Some(self.0.len() as u128)
    }
    fn hadamard_targets(&self, q: &Query) -> Result<Vec<HadamardSegment>> {
        Ok(vec![HadamardSegment {
            offset: 0,
            message_bits: self.0.n(),
            coordinates: vector_query(q)?.ones_positions().collect(),
        }])
    }
    fn parse_query(&self, s: &str) -> Result<Query> {
        parse_vector(s, self.0.n())
    }
}

struct Equality(EqualityStructure<HadamardCode>);

impl Scheme for Equality {
    fn len(&self) -> usize {
        self.0.code().len()
    }
    fn encode(&self, x: &BitString) -> Result<BitString> {
        self.0.encode(x)
    }
    fn decode(&self, oracle: &mut dyn Probe, q: &Query, coins: &mut dyn Coins) -> Result<Answer> {
        self.0.decode(oracle, vector_query(q)?, coins).map(Answer::Bit)
    }
    fn truth(&self, x: &BitString, q: &Query) -> Result<Answer> {
        let y = vector_query(q)?;
        if y.len() != x.len() {
            return Err(Error::LengthMismatch {
                left: y.len(),
                right: x.len(),
            });
        }
        Ok(Answer::Bit(x == y))
    }
    fn probe_budget(&self, _q: &Query) -> usize {
        1
    }
    fn queries(&self, x: &BitString) -> Vec<Query> {
        let mut qs = all_vectors(x.len());
        let own = Query::Vector(x.clone());
        if !qs.contains(&own) {
            qs.push(own);
        }
        qs
    }
    fn coin_space(&self, _q: &Query) -> Option<u128> {
        Some(self.0.code().len() as u128 * 3)
    }
    fn parse_query(&self, s: &str) -> Result<Query> {
        parse_vector(s, self.0.code().message_len())
    }
}

struct IpTable {
    st: IpTableStructure,
    n: usize,
    r: usize,
}

impl Scheme for IpTable {
    fn len(&self) -> usize {
        self.st.len()
    }
    fn encode(&self, x: &BitString) -> Result<BitString> {
        self.st.encode(x)
    }
    fn decode(&self, oracle: &mut dyn Probe, q: &Query, _coins: &mut dyn Coins) -> Result<Answer> {
        self.st.decode(oracle, vector_query(q)?).map(Answer::Bit)
    }
    fn truth(&self, x: &BitString, q: &Query) -> Result<Answer> {
        dot_mod2(x, vector_query(q)?).map(Answer::Bit)
    }
    fn probe_budget(&self, _q: &Query) -> usize {
        self.st.probes()
    }
    fn queries(&self, _x: &BitString) -> Vec<Query> {
        bounded_vectors(self.n, self.r)
    }
    fn coin_space(&self, _q: &Query) -> Option<u128> {
        Some(1)
    }
    fn probe_set(&self, q: &Query) -> Option<Vec<usize>> {
        self.st.probe_positions(vector_query(q).ok()?).ok()
    }
    fn parse_query(&self, s: &str) -> Result<Query> {
        parse_vector(s, self.n)
    }
}

struct PolyIp {
    st: PolyIpStructure,
    r: usize,
    p: usize,
}

impl Scheme for PolyIp {
    fn len(&self) -> usize {
        self.st.len()
    }
    fn encode(&self, x: &BitString) -> Result<BitString> {
        self.st.encode(x)
    }
    fn decode(&self, oracle: &mut dyn Probe, q: &Query, coins: &mut dyn Coins) -> Result<Answer> {
        self.st.decode(oracle, vector_query(q)?, coins).map(Answer::Bit)
    }
    fn truth(&self, x: &BitString, q: &Query) -> Result<Answer> {
        dot_mod2(x, vector_query(q)?).map(Answer::Bit)
    }
    fn probe_budget(&self, _q: &Query) -> usize {
        self.p
    }
    fn queries(&self, _x: &BitString) -> Vec<Query> {
        bounded_vectors(self.st.n(), self.r)
    }
    fn coin_space(&self, _q: &Query) -> Option<u128> {
        Some(self.st.block_len() as u128)
    }
    fn parse_query(&self, s: &str) -> Result<Query> {
        parse_vector(s, self.st.n())
    }
}

struct Substring {
    st: SubstringStructure,
    t: usize,
}

impl Scheme for Substring {
    fn len(&self) -> usize {
        self.st.len()
    }
    fn encode(&self, x: &BitString) -> Result<BitString> {
        self.st.encode(x)
    }
    fn decode(&self, oracle: &mut dyn Probe, q: &Query, coins: &mut dyn Coins) -> Result<Answer> {
        self.st.decode(oracle, vector_query(q)?, self.t, coins).map(Answer::Bits)
    }
    fn truth(&self, x: &BitString, q: &Query) -> Result<Answer> {
        extract_substring(x, vector_query(q)?).map(Answer::Bits)
    }
    fn probe_budget(&self, q: &Query) -> usize {
        let w = vector_query(q).map_or(0, BitString::weight);
        SubstringStructure::budget(w, self.t)
    }
    fn queries(&self, _x: &BitString) -> Vec<Query> {
        bounded_vectors(self.st.n(), self.st.r())
    }
    fn coin_space(&self, q: &Query) -> Option<u128> {
        let w = vector_query(q).ok()?.weight();
        pow_checked(self.st.piece_len() as u128, self.t * w)
    }
    fn hadamard_targets(&self, q: &Query) -> Result<Vec<HadamardSegment>> {
        let y = vector_query(q)?;
        let mut by_piece: Vec<Vec<usize>> = vec![Vec::new(); self.st.r()];
        for i in y.ones_positions() {
            let (k, local) = self.st.locate(i);
            by_piece[k].push(local);
        }
        let mut segs: Vec<HadamardSegment> = by_piece
            .into_iter()
            .enumerate()
            .filter(|(_, c)| !c.is_empty())
            .map(|(k, coordinates)| HadamardSegment {
                offset: k * self.st.piece_len(),
                message_bits: self.st.chunk_bits(),
                coordinates,
            })
            .collect();
        segs.sort_by_key(|s| (std::cmp::Reverse(s.coordinates.len()), s.offset));
        Ok(segs)
    }
    fn parse_query(&self, s: &str) -> Result<Query> {
        parse_vector(s, self.st.n())
    }
}

struct Bmrv(BmrvStructure, BmrvBuildReport);

impl Scheme for Bmrv {
    fn len(&self) -> usize {
        self.0.n_prime()
    }
    fn encode(&self, x: &BitString) -> Result<BitString> {
        Ok(self.0.encode(x)?.y)
    }
    fn decode(&self, oracle: &mut dyn Probe, q: &Query, coins: &mut dyn Coins) -> Result<Answer> {
        self.0.decode(oracle, index_query(q, self.0.n())?, coins).map(Answer::Bit)
    }
    fn truth(&self, x: &BitString, q: &Query) -> Result<Answer> {
        Ok(Answer::Bit(x.get(index_query(q, x.len())?)))
    }
    fn probe_budget(&self, _q: &Query) -> usize {
        1
    }
    fn queries(&self, _x: &BitString) -> Vec<Query> {
        (0..self.0.n()).map(Query::Index).collect()
    }
    fn coin_space(&self, _q: &Query) -> Option<u128> {
        Some(self.0.d() as u128)
    }
    fn probe_set(&self, q: &Query) -> Option<Vec<usize>> {
        let i = index_query(q, self.0.n()).ok()?;
        Some(self.0.probe_set(i).to_vec())
    }
    fn parse_query(&self, s: &str) -> Result<Query> {
        parse_index(s)
    }
    fn build_report(&self) -> Option<serde_json::Value> {
        serde_json::to_value(&self.1).ok()
    }
}

struct Composed {
    cm: ComposedMembership,
    decoder: ComposedDecoder,
}

impl Scheme for Composed {
    fn len(&self) -> usize {
        self.cm.len()
    }
    fn encode(&self, x: &BitString) -> Result<BitString> {
        self.cm.encode(x)
    }
    fn decode(&self, oracle: &mut dyn Probe, q: &Query, coins: &mut dyn Coins) -> Result<Answer> {
        let i = index_query(q, self.cm.n())?;
        match self.decoder {
            ComposedDecoder::Block => self.cm.decode_block(oracle, i, coins),
            ComposedDecoder::Direct => self.cm.decode_direct(oracle, i, coins),
        }
        .map(Answer::Bit)
    }
    fn truth(&self, x: &BitString, q: &Query) -> Result<Answer> {
        Ok(Answer::Bit(x.get(index_query(q, x.len())?)))
    }
    fn probe_budget(&self, _q: &Query) -> usize {
        2
    }
    fn queries(&self, _x: &BitString) -> Vec<Query> {
        (0..self.cm.n()).map(Query::Index).collect()
    }
    fn coin_space(&self, _q: &Query) -> Option<u128> {
        let block = 1u128 << self.cm.block_bits();
        Some(match self.decoder {
            ComposedDecoder::Block => self.cm.blocks() as u128 * block * 2,
            ComposedDecoder::Direct => self.cm.bmrv().d() as u128 * block,
        })
    }
    /// The block decoder only reads blocks holding exactly one element of
    /// `P_i`, so only those are targets for it.
    fn hadamard_targets(&self, q: &Query) -> Result<Vec<HadamardSegment>> {
        let segs = self.cm.segments(index_query(q, self.cm.n())?)?;
        Ok(match self.decoder {
            ComposedDecoder::Block => segs.into_iter().filter(|s| s.coordinates.len() == 1).collect(),
            ComposedDecoder::Direct => segs,
        })
    }
    fn parse_query(&self, s: &str) -> Result<Query> {
        parse_index(s)
    }
    fn build_report(&self) -> Option<serde_json::Value> {
        serde_json::to_value(self.cm.report()).ok()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::ProbeOracle;

    fn specs() -> Vec<SchemeSpec> {
        vec![
            SchemeSpec::HadLdc { n: 5 },
            SchemeSpec::HadIp { n: 5 },
            SchemeSpec::Equality { n: 4 },
            SchemeSpec::IpTable { n: 6, r: 3, p: 2 },
            SchemeSpec::PolyIp { n: 4, r: 1, p: 3 },
            SchemeSpec::Substring { n: 8, r: 2, t: 3 },
            SchemeSpec::Bmrv {
                n: 16,
                s: 1,
                eps: 0.25,
                n_prime: None,
                d: None,
            },
        ]
    }

    #[test]
    fn noiseless_roundtrip_all_schemes() {
        for spec in specs() {
            let scheme = spec.build(3).unwrap();
            let x = spec.default_item(3);
            spec.check_item(&x).unwrap();
            let word = scheme.encode(&x).unwrap();
            assert_eq!(word.len(), scheme.len());
            let mut rng = seed::rng(4, &[]);
            for q in scheme.queries(&x) {
                let mut o = ProbeOracle::new(&word, scheme.probe_budget(&q));
                let got = scheme.decode(&mut o, &q, &mut rng).unwrap();
                if !matches!(spec, SchemeSpec::Bmrv { .. } | SchemeSpec::Equality { .. }) {
                    assert_eq!(got, scheme.truth(&x, &q).unwrap(), "{} {q}", spec.id());
                }
            }
        }
    }

    #[test]
    fn spec_json_roundtrip() {
        for spec in specs() {
            let text = serde_json::to_string(&spec).unwrap();
            let back: SchemeSpec = serde_json::from_str(&text).unwrap();
            assert_eq!(back, spec);
        }
        let spec: SchemeSpec = serde_json::from_str(r#"{"scheme":"composed","n":8,"s":1}"#).unwrap();
        assert_eq!(spec.id(), "composed");
    }

    #[test]
    fn query_parsing() {
        let scheme = SchemeSpec::HadIp { n: 4 }.build(0).unwrap();
        assert_eq!(scheme.parse_query("0110").unwrap(), Query::Vector("0110".parse().unwrap()));
        assert!(scheme.parse_query("011").is_err());
        let scheme = SchemeSpec::HadLdc { n: 4 }.build(0).unwrap();
        assert_eq!(scheme.parse_query("3").unwrap(), Query::Index(3));
        assert!(scheme.parse_query("x").is_err());
    }

    #[test]
    fn thinned_queries() {
        let scheme = SchemeSpec::HadIp { n: 12 }.build(0).unwrap();
        let qs = scheme.queries(&BitString::zeros(12));
        assert_eq!(qs.len(), MAX_DEFAULT_QUERIES);
        assert_eq!(qs[1], Query::Vector(BitString::from_value(4, 12).unwrap()));
    }
}
