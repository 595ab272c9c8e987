//! Finite-sample concentration bounds for the empirical relative entropy
//! of multinomial samples.
//!
//! Given n samples from a distribution P on k cells, the statistic is the
//! KL divergence D̂ of the empirical frequencies from P (2nD̂ is the
//! likelihood-ratio statistic). This crate evaluates the closed-form
//! bounds on the centered MGF, tails, and moments of D̂, inverts them into
//! confidence radii, sample sizes, and goodness-of-fit p-values, and
//! certifies every inequality against an exact enumeration oracle and a
//! deterministic Monte Carlo harness.
//!
//! Enumeration and sampling are data-parallel (rayon) behind the default
//! `parallel` feature, with a sequential fallback when it is disabled.
//! Results are bit-identical either way: work is chunked by a stable index
//! and reduced in chunk order.

pub mod bounds;
pub mod divergence;
pub mod error;
mod exec;
pub mod inversion;
pub mod montecarlo;
pub mod numeric;
pub mod oracle;
pub mod verify;

pub use bounds::{BoundQuery, BoundSide, TailBoundReport};
pub use divergence::{CountVector, PhiValue, ProbabilityVector};
pub use error::{Error, Result};
pub use inversion::{ConfidenceResult, GofResult};
pub use montecarlo::{McEstimate, McSweepCell, McSweepConfig, McVerifyReport};
pub use oracle::{Atom, ExactDistribution, ExactMoments, Side};
pub use verify::{CheckReport, Violation};
