//! Multitype branching forests and the laws of their mutation clusters.
//!
//! A plane forest with `d` types is viewed through its maximal monotype
//! subtrees (clusters). Collapsing every cluster to a single node yields the
//! forest of mutations, itself a multitype branching forest whose progeny law
//! is computable from the original one. This crate provides:
//!
//! * sparse lattice pmfs with exact-rational and f64 backends ([`pmf`]),
//! * progeny-law models, mean matrices and Perron data ([`progeny`], [`means`]),
//! * the cluster-collapse progeny law and joint mutation-count laws ([`mutation`]),
//! * plane-forest sampling, coding walks and census statistics ([`forest`], [`walkers`]),
//! * continuous-time population engines, direct and via time-changed walks ([`ct`]),
//! * emergence times of mutation levels in ladder systems ([`emergence`]),
//! * reproducible seeding, experiment statistics and model/result files
//!   ([`seeds`], [`stats`], [`modelfile`]).

pub mod ct;
pub mod emergence;
pub mod forest;
pub mod means;
pub mod modelfile;
pub mod mutation;
pub mod pmf;
pub mod progeny;
pub mod seeds;
pub mod stats;
pub mod walkers;

mod scalar;

pub use pmf::{Point, SparsePmf, SupportBox};
pub use progeny::{ConditionAB, ProgenyLaw};
pub use scalar::Weight;

/// Sparse pmf over `f64` weights, the default numeric backend.
pub type Pmf = SparsePmf<f64>;
/// Sparse pmf over exact rationals, for small-support reference computations.
pub type ExactPmf = SparsePmf<num::BigRational>;

/// Errors for model construction, validation and file handling.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimMismatch { expected: usize, got: usize },
    #[error("invalid probability weight at {point:?}: {why}")]
    BadWeight { point: Vec<i32>, why: String },
    #[error("pmf mass {mass} differs from 1 beyond tolerance {tol}")]
    MassNotOne { mass: f64, tol: f64 },
    #[error("invalid model: {0}")]
    BadModel(String),
    #[error("domain violation: {0}")]
    Domain(String),
    #[error("numerical failure: {0}")]
    Numeric(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
