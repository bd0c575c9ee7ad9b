//! Numerical analysis layer: smooth windows, Bessel kernels, quadrature,
//! Chebyshev tables, and the Voronoi integral transforms built from them.

pub mod bessel;
pub mod cheb;
pub mod jet;
pub mod quad;
pub mod transform;
pub mod window;

pub use bessel::{kernel_eval, Kernel};
pub use transform::{hankel_transform, Star, TransformPart, VoronoiTransform};
pub use window::{Orientation, SmoothWindow};
