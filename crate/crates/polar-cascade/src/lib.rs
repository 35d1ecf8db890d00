//! Polar coding over a binary erasure channel cascaded with an adversarial
//! deletion channel.
//!
//! The decoder never learns which symbols were deleted. It re-inserts
//! erasure symbols at every possible position to form a candidate set,
//! SC-decodes each candidate, filters the resulting list with a CRC (or
//! random linear parity) check, and selects one message. The crate also
//! evaluates the associated error bounds, the optimal redundancy length,
//! and ships a Monte-Carlo simulation harness (`cascade-sim`).
//!
//! Modules:
//! - [`symbol`]: the ternary alphabet {0, 1, e}
//! - [`polar`]: code construction, encoding, erasure-domain SC decoding
//! - [`channel`]: BEC, deletion channel, and their cascade
//! - [`precode`]: CRC / random-parity redundancy
//! - [`listdec`]: candidate sets and CRC-aided list decoding
//! - [`bounds`]: error estimates and redundancy optimization
//! - [`sim`]: the Monte-Carlo experiment grid and CSV output

pub mod bounds;
pub mod channel;
pub mod listdec;
pub mod polar;
pub mod precode;
pub mod sim;
pub mod symbol;

pub use channel::{BecParams, DeletionMode, DeletionParams, TrialRng};
pub use listdec::{build_candidate_set, build_candidate_set_d, decode_received, DecodeOutcome};
pub use polar::{
    bit_reversal_permutation, construct_code, polar_encode, sc_decode, AmbiguityPolicy,
    PolarCodeSpec, ScOptions,
};
pub use precode::{CrcSpec, Precode, RandomParitySpec};
pub use symbol::Symbol;
