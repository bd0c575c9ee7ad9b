//! Compactly supported C^∞ windows and bumps built from the exp(−1/t)
//! smooth step, with analytic derivatives through order 4 and Fourier
//! transforms by adaptive quadrature.
//!
//! The Fourier convention is e^{−2πixt} everywhere; the Poisson test in
//! this file is what pins it down for the rest of the crate.

use num_complex::Complex64;

use super::jet::Jet4;
use super::quad::adaptive_quad_complex;
use crate::error::{Error, Result};

/// Below this point on the step's axis, exp(1/t − 1/(1−t)) overflows and
/// ψ is 0 to all orders in double precision.
const STEP_DEAD_ZONE: f64 = 1.0 / 708.0;

/// The smooth step ψ(t) = E(t)/(E(t) + E(1−t)), E(t) = exp(−1/t)·[t>0],
/// computed as 1/(1 + exp(1/t − 1/(1−t))) so that the extremes underflow
/// gracefully instead of producing 0/0.
pub fn smooth_step(t: f64) -> f64 {
    if t <= STEP_DEAD_ZONE {
        0.0
    } else if t >= 1.0 - STEP_DEAD_ZONE {
        1.0
    } else {
        1.0 / (1.0 + (1.0 / t - 1.0 / (1.0 - t)).exp())
    }
}

fn smooth_step_jet(t: Jet4) -> Jet4 {
    let v = t.value();
    if v <= STEP_DEAD_ZONE {
        Jet4::constant(0.0)
    } else if v >= 1.0 - STEP_DEAD_ZONE {
        Jet4::constant(1.0)
    } else {
        let one = Jet4::constant(1.0);
        let g = t.recip().sub(&one.sub(&t).recip());
        one.div(&one.add(&g.exp()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    /// Rise, plateau at height 1 on [a+r, b−r], fall.
    Window,
    /// Single smooth hump (ramps span the whole support; requires
    /// 2r = b−a). Used for the circle-method φ.
    Bump,
}

/// A C^∞ weight supported exactly on [a, b], built as
/// ψ((x−a)/ρ)·ψ((b−x)/ρ) where ρ = r for windows and ρ = 2r for bumps.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothWindow {
    a: f64,
    b: f64,
    r: f64,
    orientation: Orientation,
}

impl SmoothWindow {
    pub fn new(a: f64, b: f64, r: f64, orientation: Orientation) -> Result<Self> {
        if !(a >= 0.0 && a < b) || !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "window support [{a}, {b}] is degenerate"
            )));
        }
        if !(r > 0.0 && 2.0 * r <= b - a) {
            return Err(Error::InvalidArgument(format!(
                "ramp {r} does not satisfy 0 < 2r <= b - a = {}",
                b - a
            )));
        }
        if orientation == Orientation::Bump && 2.0 * r != b - a {
            return Err(Error::InvalidArgument(
                "a bump has no plateau: its ramps must satisfy 2r = b - a".into(),
            ));
        }
        Ok(SmoothWindow { a, b, r, orientation })
    }

    pub fn window(a: f64, b: f64, r: f64) -> Result<Self> {
        Self::new(a, b, r, Orientation::Window)
    }

    pub fn bump(a: f64, b: f64) -> Result<Self> {
        let r = 0.5 * (b - a);
        Self::new(a, b, r, Orientation::Bump)
    }

    /// The default circle-method bump, supported on [1, 2].
    pub fn bump_unit() -> Self {
        Self::bump(1.0, 2.0).expect("static geometry")
    }

    /// The default weight for Voronoi experiments: a wide hump on
    /// [1/2, 5/2]. Maximal ramp width means the transform tails die as
    /// early as this mollifier family allows.
    pub fn voronoi_default() -> Self {
        Self::bump(0.5, 2.5).expect("static geometry")
    }

    pub fn support(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    pub fn ramp(&self) -> f64 {
        self.r
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    /// The window with both endpoints and the ramp scaled by σ > 0, so
    /// that rescaled.eval(σ·u) == self.eval(u) identically — the exact
    /// change of variables needed when a sum over n ≤ bX is fed to an
    /// evaluator that cuts at its nominal length.
    pub fn rescaled(&self, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "rescale factor {sigma} must be positive and finite"
            )));
        }
        match self.orientation {
            Orientation::Bump => Self::bump(self.a * sigma, self.b * sigma),
            Orientation::Window => {
                Self::new(self.a * sigma, self.b * sigma, self.r * sigma, self.orientation)
            }
        }
    }

    /// Width of the mollifier actually composed with ψ.
    fn scale(&self) -> f64 {
        match self.orientation {
            Orientation::Window => self.r,
            Orientation::Bump => 2.0 * self.r,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        if x <= self.a || x >= self.b {
            return 0.0;
        }
        let s = self.scale();
        // each factor is exactly 1 once x clears its ramp, so the
        // plateau really is flat
        smooth_step((x - self.a) / s) * smooth_step((self.b - x) / s)
    }

    /// order-th derivative, order ≤ 4, by truncated-Taylor (jet)
    /// arithmetic through the same formula as `eval`.
    pub fn eval_deriv(&self, x: f64, order: usize) -> f64 {
        assert!(order <= 4, "derivatives implemented through order 4");
        if order == 0 {
            return self.eval(x);
        }
        if x <= self.a || x >= self.b {
            return 0.0;
        }
        let s = self.scale();
        let up = smooth_step_jet(Jet4::variable((x - self.a) / s, 1.0 / s));
        let down = smooth_step_jet(Jet4::variable((self.b - x) / s, -1.0 / s));
        up.mul(&down).derivative(order)
    }

    /// ŵ(t) = ∫ w(x) e^{−2πixt} dx, absolute tolerance 10⁻¹².
    pub fn fourier(&self, t: f64) -> Result<Complex64> {
        adaptive_quad_complex(
            |x| {
                let phase = -2.0 * std::f64::consts::PI * x * t;
                Complex64::new(phase.cos(), phase.sin()) * self.eval(x)
            },
            self.a,
            self.b,
            1e-12,
        )
    }
}
