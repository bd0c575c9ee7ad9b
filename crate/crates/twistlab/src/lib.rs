//! Desk-scale numerical toolkit for additive twists of arithmetic sequences:
//! exponential sums over the divisor function and Hecke eigenvalues, their
//! Voronoi duals, the smoothed Farey (Jutila) circle method, L^s moments,
//! and the empirical limiting distribution of normalized twisted sums.
//!
//! The crate is organized around six subsystems:
//!
//! * [`arith`] — exact integer substrate: multiplicative-function sieves,
//!   Ramanujan sums, Ramanujan tau generation, reduced-residue counting.
//! * [`analysis`] — smooth compactly supported windows, Fourier transforms of
//!   bumps, Bessel kernels, and the tabulated integral transforms they induce.
//! * [`expsum`] — pointwise and dense-grid evaluation of twisted sums
//!   `S(α; X) = Σ_{n≤X} λ(n) e(nα)`.
//! * [`voronoi`] — the dual-sum identity, its main term, constant calibration,
//!   a residual checker, and the major-arc lower-bound experiment.
//! * [`circle`] — Farey systems, the smoothed indicator χ̃, its exact L²
//!   defect, coprime-average lemma checks, and the maximal large sieve.
//! * [`moments`] — L^s moment integration, moment ladders, the approximate
//!   functional equation, and the empirical distribution estimator.

pub mod analysis;
pub mod arith;
pub mod circle;
pub mod error;
pub mod expsum;
pub mod moments;
pub mod report;
pub mod voronoi;

pub use error::{Error, Result};
