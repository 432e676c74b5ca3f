//! Low-bandwidth repair and decoding for Reed-Solomon codes over prime
//! fields.
//!
//! Nodes holding evaluations `f(alpha_i)` of a polynomial of degree `< k`
//! each send only the index of the arithmetic-progression bucket their
//! symbol falls into. [`schemes`] builds the two bucket layouts, [`verify`]
//! decides whether a layout determines the missing data, and
//! [`reconstruct`] recovers it from the leaked indices. [`expsums`] holds
//! the character-sum numerics behind the constructions.

pub mod cli;
pub mod error;
pub mod expsums;
pub mod field;
pub mod lattice;
pub mod partition;
pub mod reconstruct;
pub mod schemes;
mod search;
pub mod verify;

pub use error::{Error, Result};
pub use field::{interpolate, is_prime, FieldElement, LagrangeBasis, Poly, PrimeField};
pub use partition::PartitionScheme;
pub use reconstruct::{decode, enumerate_consistent, repair, CandidateSet};
pub use schemes::{
    leak_transcript, DecodingScheme, LeakageScheme, RepairScheme, Scheme, SchemeDescriptor,
    Transcript, TranscriptEntry,
};
pub use verify::{SearchConfig, Verdict, WindowProblem};

/// Library version, embedded in reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
