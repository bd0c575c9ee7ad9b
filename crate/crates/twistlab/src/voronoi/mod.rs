//! Summation-formula machinery: the twisted identities themselves and
//! the major-arc profile built on their main terms.

pub mod identity;
pub mod major_arc;

pub use identity::{
    calibrate_constant, dual_sum, dual_sum_with_n, dual_tail_certificate, main_term_divisor,
    main_term_divisor_shifted, voronoi_residual, CalibrationReport, VoronoiResidual, EULER_GAMMA,
};
pub use major_arc::{major_arc_profile, MajorArcReport, MajorArcRow};
