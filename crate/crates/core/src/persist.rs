//! Stored structures: a JSON header line followed by the stored word as a
//! line of ASCII `0`/`1`.
//!
//! The header carries everything needed to rebuild the decoder (scheme spec
//! and build seed) plus the encoded item, so decode results can be checked
//! against ground truth. Corruption applied after encoding is recorded in the
//! header; the payload is the word the decoder will actually read.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::oracle::{corrupt, CorruptionPattern};
use crate::scheme::{Scheme, SchemeSpec};

pub const FORMAT: &str = "ecds-structure/1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Header {
    pub format: String,
    pub spec: SchemeSpec,
    pub seed: u64,
    pub item: BitString,
    pub length: usize,
    #[serde(default)]
    pub corruption: CorruptionPattern,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StoredStructure {
    pub header: Header,
    pub payload: BitString,
}

impl StoredStructure {
    /// Builds the scheme and encodes `item`.
    pub fn create(spec: &SchemeSpec, seed: u64, item: &BitString) -> Result<(Self, Box<dyn Scheme>)> {
        spec.check_item(item)?;
        let scheme = spec.build(seed)?;
        let payload = scheme.encode(item)?;
        let header = Header {
            format: FORMAT.into(),
            spec: spec.clone(),
            seed,
            item: item.clone(),
            length: payload.len(),
            corruption: CorruptionPattern::empty(),
        };
        Ok((StoredStructure { header, payload }, scheme))
    }

    /// Rebuilds the decoder side from the header.
    pub fn scheme(&self) -> Result<Box<dyn Scheme>> {
        let scheme = self.header.spec.build(self.header.seed)?;
        if scheme.len() != self.payload.len() {
            return Err(Error::LengthMismatch {
                left: self.payload.len(),
                right: scheme.len(),
            });
        }
        Ok(scheme)
    }

    /// Flips `pattern` in the payload and records it.
    pub fn apply(&mut self, pattern: &CorruptionPattern) -> Result<()> {
        self.payload = corrupt(&self.payload, pattern)?;
        // flipping a position twice restores it
        let mut net: Vec<usize> = self.header.corruption.positions().to_vec();
        for &p in pattern.positions() {
            match net.binary_search(&p) {
                Ok(k) => {
                    net.remove(k);
                }
                Err(k) => net.insert(k, p),
            }
        }
        self.header.corruption = CorruptionPattern::new(net, self.payload.len())?;
        Ok(())
    }

    pub fn write_to(&self, mut w: impl Write) -> Result<()> {
        let io = |e: std::io::Error| Error::Parse(format!("write failed: {e}"));
        let header = serde_json::to_string(&self.header).map_err(|e| Error::Parse(e.to_string()))?;
        writeln!(w, "{header}").map_err(io)?;
        writeln!(w, "{}", self.payload).map_err(io)?;
        Ok(())
    }

    pub fn read_from(r: impl BufRead) -> Result<Self> {
        let mut lines = r.lines();
        let mut next = |what: &str| -> Result<String> {
            lines
                .next()
                .ok_or_else(|| Error::Parse(format!("missing {what} line")))?
                .map_err(|e| Error::Parse(format!("read failed: {e}")))
        };
        let header: Header =
            serde_json::from_str(&next("header")?).map_err(|e| Error::Parse(format!("bad header: {e}")))?;
        if header.format != FORMAT {
            return Err(Error::Parse(format!("unsupported format {:?}", header.format)));
        }
        let payload: BitString = next("payload")?.trim().parse()?;
        if payload.len() != header.length {
            return Err(Error::LengthMismatch {
                left: payload.len(),
                right: header.length,
            });
        }
        Ok(StoredStructure { header, payload })
    }
}
