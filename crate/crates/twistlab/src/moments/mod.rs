//! L^s moments of twisted sums: doubling-certified grid quadrature, moments
//! of dual-side transformed sums, the approximate functional equation check,
//! geometric moment ladders, and the empirical distribution of normalized
//! cusp-form sums.

mod afe;
mod dist;
mod grid;
mod ladder;
mod transformed;

pub use afe::{afe_check, AfeReport, AFE_DEFAULT_X1};
pub use dist::{distribution, ks_distance, DistributionReport};
pub use grid::{moment, plancherel_raw, power_means, MomentReport, GRID_CAP, MAX_S};
pub use ladder::{ladder, LadderReport, LadderRung};
pub use transformed::transformed_moment;
