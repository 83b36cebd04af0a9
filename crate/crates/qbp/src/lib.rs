//! Belief-propagation decoding toolkit for quantum stabilizer codes over GF(4).
//!
//! The crate provides:
//!
//! - exact phaseless Pauli algebra with bit-packed operators ([`pauli`]),
//! - surface-code constructions (toric, planar, XZZX), generic hypergraph
//!   products, and a text format for external check matrices ([`code`]),
//! - i.i.d. Pauli noise channels with deterministic per-trial RNG streams
//!   ([`noise`]),
//! - the LLR-BP4 message-passing engine under parallel (flooding) and serial
//!   (layered) scheduling, together with the improved decoders: Momentum-BP,
//!   AdaGrad-BP, EWAInit-BP, MBP, adaptive sweeps (AMBP / AEWA-BP), and the
//!   trapping-set breaker BP-OTS ([`bp`]),
//! - a deterministic Monte Carlo harness for logical-error-rate and
//!   iteration-count experiments ([`harness`]),
//! - a small laboratory for the (4,0) trapping set with full iteration
//!   tracing and oscillation detection ([`trapping`]).
//!
//! Monte Carlo trials are data-parallel; the `parallel` feature (on by
//! default) backs [`harness::run_batch`] with a rayon pool. Disabling it
//! leaves a sequential fallback with identical results.

pub mod bp;
pub mod code;
pub mod harness;
pub mod noise;
pub mod pauli;
pub mod trapping;

pub use bp::{decode, DecodeOutcome, DecoderConfig, LlrTriple, Schedule, Variant};
pub use code::{CodeSpec, ResidualClass, TannerGraph};
pub use harness::{run_batch, run_trial, RunStats, TrialOutcome};
pub use noise::{NoiseModel, PriorSet, RngStream};
pub use pauli::{commute, Pauli, PauliVector, Syndrome};

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum QbpError {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("checks {row_a} and {row_b} anticommute")]
    CommutationViolation { row_a: usize, row_b: usize },

    #[error("logical operator {index} anticommutes with check {row}")]
    LogicalAgainstCheck { index: usize, row: usize },

    #[error("logical pair {pair} does not anticommute with its partner")]
    LogicalPairing { pair: usize },

    #[error("logical operators of pairs {pair_a} and {pair_b} anticommute")]
    LogicalCrossTalk { pair_a: usize, pair_b: usize },

    #[error("stored K = {stored} but N - rank = {computed}")]
    KMismatch { stored: usize, computed: usize },

    #[error("code has no logical operators")]
    MissingLogicals,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid construction: {0}")]
    Construction(String),

    #[error("internal consistency violation: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
