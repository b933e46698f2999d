//! Error-correcting data structures.
//!
//! Static data structures that answer queries about an encoded object with a
//! few bit probes, even after an adversary has flipped a constant fraction of
//! the stored bits. The crate provides:
//!
//! * [`bits`]: GF(2) bit strings, bounded-weight query spaces and query splitting.
//! * [`oracle`]: probe-counted, corruptible access plus exact enumeration of
//!   decoder randomness.
//! * [`hadamard`]: the Hadamard code as a 2-probe locally decodable code and
//!   the 1-probe Equality structure.
//! * [`membership`]: the one-probe BMRV membership structure and its
//!   composition with an inner locally decodable code.
//! * [`inner_product`]: inner-product and substring structures.
//! * [`bounds`]: evaluable lower bounds and the discrepancy lemma checks.
//! * [`harness`]: adversaries and error estimation.

pub mod bits;
pub mod bounds;
pub mod error;
pub mod hadamard;
pub mod harness;
pub mod inner_product;
pub mod membership;
pub mod oracle;
pub mod persist;
pub mod scheme;
pub mod seed;

pub use bits::{BitString, BoundedWeightSpace};
pub use error::{Error, Result};
pub use oracle::{Coins, CorruptionPattern, Probe, ProbeOracle};
