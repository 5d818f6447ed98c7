//! Single-pass maximization of non-negative (possibly non-monotone) submodular
//! functions subject to independence systems and multiple knapsack constraints.
//!
//! The crate is organised bottom-up:
//!
//! - [`objectives`]: value oracles (coverage, graph cut, log-det DPP,
//!   sequential DPP, sampled decomposable functions) and reservoir sampling.
//! - [`constraints`]: independence oracles (uniform, partition, matchoid) and
//!   multi-knapsack feasibility.
//! - [`indstream`]: the monotone swap-based streaming backbone, with and
//!   without a density gate.
//! - [`unconstrained`]: deterministic and randomized double greedy.
//! - [`localsearch`]: the chain of backbone instances with discarded-element
//!   routing, and the lazy grid of density-thresholded chains.
//! - [`bruteforce`]: exhaustive optima for small instances.
//! - [`session`], [`io`]: the streaming session API, stream loading, run
//!   configuration, summary metrics and reports.
//!
//! With the `parallel` feature (on by default) independent threshold runs and
//! exhaustive enumeration fan out over rayon; [`ExecMode`] selects the path at
//! runtime and silently falls back to sequential execution without the feature.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bruteforce;
pub mod constraints;
mod element;
mod error;
pub mod indstream;
pub mod instances;
pub mod io;
pub mod localsearch;
pub mod objectives;
mod parallel;
pub mod session;
pub mod unconstrained;
pub mod verify;

pub use element::{sorted_ids, Element, ElementId};
pub use error::{Error, Result};
pub use parallel::ExecMode;

/// Slack applied to floating point comparisons of marginal gains.
pub const GAIN_TOLERANCE: f64 = 1e-12;
