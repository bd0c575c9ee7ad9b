//! Exponential-sum evaluation: direct, on dense grids, and sup-norms.

pub mod eval;
pub mod fft;
pub mod supnorm;

pub use eval::{eval_direct, eval_direct_rational, eval_grid, GridEvaluation};
pub use supnorm::{sup_norm, SupNormReport};
