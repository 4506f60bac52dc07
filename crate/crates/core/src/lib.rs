//! Constant-weight array codes (CWACs).
//!
//! A CWAC is a set of `n`-tuples of binary columns, each column of length `m`
//! and Hamming weight `w`. This crate provides:
//!
//! * [`words`]: column and array words, distances, colex ranking and balls.
//! * [`counting`]: exact binomials, distance-distribution counts and anticode sizes.
//! * [`bounds`]: a memoized engine combining every known bound on `A(m,n,w,d)`
//!   into an interval with a replayable provenance tree.
//! * [`oracle`]: exhaustive branch-and-bound search for exact values on tiny
//!   instances.
//! * [`codec`]: concatenated Reed–Solomon / constant-weight codes with
//!   generalized-minimum-distance decoding.
//! * [`channel`]: a store-and-forward packet loss/injection channel and a
//!   Monte-Carlo harness.
//! * [`selftest`]: the acceptance checks, shared by the test suite and the CLI.
//!
//! Unit convention: for binary constant-weight objects (`A`, `B`, `α`, `β`) the
//! distance `d` and diameter `δ` are *half* the Hamming distance. For q-ary
//! objects (`C`, `γ`) they are plain Hamming distances.

pub mod bounds;
pub mod channel;
pub mod codec;
pub mod counting;
pub mod error;
pub mod oracle;
pub mod selftest;
pub mod words;

pub use error::{Error, Result};

/// Arbitrary-precision nonnegative count.
pub type BigCount = num_bigint::BigUint;
