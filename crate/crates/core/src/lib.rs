//! Numerical laboratory for hidden-variable models with unsharp eigenvalues.
//!
//! - [`quantum`]: one- and two-qubit operator algebra and states.
//! - [`mermin`]: sharp ±1 assignments for the Mermin–Peres square.
//! - [`unsharp`]: the deviation equations, their solvers and solution families.
//! - [`chsh`]: quantum and hidden-variable CHSH bounds.
//! - [`sga`]: Stern-Gerlach screen Monte Carlo and Bell-basis sampling.
//! - [`report`]: the experiments behind the command-line tool.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chsh;
pub mod mermin;
pub mod quantum;
pub mod report;
pub mod sga;
pub mod unsharp;
