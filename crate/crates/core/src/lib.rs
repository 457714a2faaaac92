//! Finite earthquakes on the hyperbolic plane, measured laminations, and
//! Douady–Earle extensions of their boundary maps.

// NaN must fail range checks, so negated comparisons are deliberate.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod barycentric;
pub mod circle_map;
pub mod cli;
pub mod earthquake;
pub mod error;
pub mod experiments;
pub mod hyperbolic;
pub mod lamination;
pub mod report;

pub use error::{Error, Result};
