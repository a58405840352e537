//! Exact computation with closed relations on the Cantor space, its clopen
//! partitions, and the prefix-exchange homeomorphisms acting on it.
//!
//! * [`finrel`]: relations on finite index sets and their composition semigroup.
//! * [`cantor`]: binary words, clopen sets, clopen partitions.
//! * [`homeo`]: prefix-exchange maps with exact composition, traces and distances.
//! * [`towers`]: closed relations on `2^ω × 2^ω` as coherent sequences of traces.
//! * [`constructions`]: certificate-producing realizations and witnesses.
//! * [`cli`]: text formats and the command-line dispatcher.

pub mod cantor;
pub mod cli;
pub mod constructions;
pub mod dyadic;
pub mod error;
pub mod finrel;
pub mod homeo;
pub mod sample;
pub mod towers;

pub use cantor::{BinaryWord, ClopenSet, Partition};
pub use dyadic::DyadicValue;
pub use error::{Error, Result};
pub use finrel::{IndexRelation, RelationClassification};
pub use homeo::PrefixMap;
