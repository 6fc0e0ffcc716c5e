//! EAM molecular dynamics on a logical 2D core mesh.
//!
//! Atoms are projected onto the x-y plane and placed on diagonals of a core
//! grid ([`mapping`]); each owner multicasts its atom along a T-shaped route and
//! every interacting pair is handled by the one core where two routes cross
//! ([`nt`]). [`engine`] runs the two-exchange force evaluation and velocity
//! Verlet on that model and estimates cycles per step; [`reference`] is the
//! serial oracle it is checked against.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod cli;
pub mod config;
pub mod eam;
pub mod engine;
pub mod error;
pub mod kernel;
pub mod mapping;
pub mod nt;
pub mod reference;
pub mod spline;
pub mod system;
pub mod units;

pub use error::{Error, Result};
