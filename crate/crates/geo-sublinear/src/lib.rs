//! Randomized sublinear-time solvers for high-dimensional enclosing problems.
//!
//! The crate covers four layers:
//!
//! * [`dataset`] — point storage (dense and sparse rows), CSV/LIBSVM ingestion,
//!   seeded sampling, and synthetic instance generators with planted ground truth.
//! * [`meb`] — the greedy core-set construction for minimum enclosing balls with
//!   approximate per-iteration centers, usable with linear or RBF kernels.
//! * [`stable`], [`outliers`], [`hybrid`] — sampling algorithms that are sublinear
//!   in the number of points: MEB under a stability assumption, bi-criteria MEB
//!   with outliers, and the hybrid radius-or-covering solver that needs no
//!   stability assumption.
//! * [`mex`] — the generalized "minimum enclosing x" framework (shape families
//!   with a center/size/distance contract) and its instantiations: k-center with
//!   outliers, line fitting with outliers, and one-/two-class SVM with outliers.
//!
//! [`oracle`] holds brute-force and certified reference solvers used by tests and
//! the `verify` CLI path; [`report`] holds the JSON report emitted by the CLI.

// Sampling primitives mirror wide multi-parameter contracts; `!(x > 0.0)`
// guards intentionally reject NaN inputs.
#![allow(clippy::too_many_arguments)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dataset;
pub mod error;
pub mod hybrid;
pub mod meb;
pub mod mex;
pub mod oracle;
pub mod outliers;
pub mod report;
pub mod stable;

pub use dataset::{PointSet, RngStream};
pub use error::{Error, Result};
pub use meb::{Ball, Center, Kernel};
pub use report::RunStats;
