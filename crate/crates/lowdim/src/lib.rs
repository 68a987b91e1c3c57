//! Seeded Gaussian dimension reduction for discrete (k,z)-clustering.
//!
//! The crate is organized around one question: when a weighted point set is
//! pushed through a random Gaussian matrix into a much lower dimension, which
//! clustering quantities survive, at which target dimension, and how do the
//! known failure modes look in practice? Everything here is built to make
//! that question *checkable* on concrete instances:
//!
//! * [`geometry`] — weighted point sets, powered distances, and the powered
//!   triangle bounds that all downstream guarantees lean on.
//! * [`projection`] — seeded Gaussian maps (bit-reproducible from
//!   `(seed, t, d)`) and target-dimension recipes for each guarantee regime.
//! * [`nets`] — greedy metric nets, packing-bound checks, doubling-dimension
//!   estimation, and the multi-resolution net hierarchies the analyses quantize
//!   over.
//! * [`clustering`] — discrete (k,z)-clustering costs, exact and local-search
//!   discrete optima, and continuous 1-center solvers.
//! * [`verify`] — the checkers: expansion, for-all-partitions contraction,
//!   relaxed contraction, sum preservation, central symmetry, and the
//!   good-event diagnostics, each reporting a witness that reproduces its
//!   worst ratio.
//! * [`instances`] — deterministic generators for the benign and adversarial
//!   instance families used throughout the test suite.
//! * [`stats`] — chi-square tail estimates (Monte Carlo and closed form) and
//!   distortion summaries.
//! * [`cli`] — config-driven experiment pipelines and the subcommand
//!   implementations behind the `lowdim` binary.
//!
//! Determinism is a crate-wide contract: every random artifact derives from
//! [`rng::SplitMix64`] and a caller-supplied seed, and experiment pipelines
//! produce byte-identical output regardless of thread count.

// Validation deliberately writes `!(x > 0.0)` instead of `x <= 0.0`: the
// negated form also rejects NaN, which the "simplified" comparison lets through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod clustering;
pub mod geometry;
pub mod instances;
pub mod nets;
pub mod projection;
pub mod rng;
pub mod stats;
pub mod verify;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("missing field for this operation: {0}")]
    MissingField(&'static str),

    #[error("enumeration budget exceeded: need {required}, budget {budget}")]
    BudgetExceeded { required: u128, budget: u128 },

    #[error("continuous centers are only solvable for z in {{1, 2}}, got z = {0}")]
    UnsupportedExponent(f64),

    #[error("point set is not centrally symmetric about the given center")]
    NotSymmetric,

    #[error("requested hierarchy level {level} is outside the built range [{lo}, {hi}]")]
    MissingLevel { level: i64, lo: i64, hi: i64 },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
