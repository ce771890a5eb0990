//! Benchmark harness for quality/time trade-off analysis of supervised
//! text classifiers.
//!
//! The crate trains several classifier families over a schedule of growing
//! training-data sizes, measures quality (precision/recall/F-measure) and
//! wall-clock cost, and applies a trade-off framework on top: the
//! performance measure quality*size/time, dominance frontiers (Pareto set
//! and convex hull) and an analytical break-even crossover solver for
//! competing cost models.

pub mod config;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod features;
pub mod harness;
pub mod learners;
pub mod rng;
pub mod svg;
pub mod tradeoff;

pub use error::{Error, Result};
