//! Exact symbolic engine for the loop extension of the Z2xZ2-graded
//! superalgebra osp(1|2) and the integrable hierarchies built on it.

pub mod charges;
pub mod cli;
pub mod coeff;
pub mod emit;
pub mod fields;
pub mod grading;
pub mod lax;
pub mod loop_algebra;
pub mod miura;
pub mod rep6;
pub mod ring;
