//! Grid quadrature of L^s moments ∫₀¹ |S_⋆(α; X)|^s dα.
//!
//! Moments are computed on uniform dyadic grids with a doubling criterion:
//! the grid is doubled until the raw value's relative change drops below the
//! requested tolerance, and the last observed change is reported as the
//! error estimate. |S|^s is Lipschitz at the grid scale (constant at most
//! s·(sup|S|)^{s−1}·2πX·Σ|λ(n)| for s ≥ 1), and near-zeros for s < 1 are
//! covered by the same empirical criterion, so this is both simpler and more
//! checkable than Farey-adaptive quadrature.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::SmoothWindow;
use crate::arith::CoeffSeq;
use crate::error::{Error, Result};
use crate::expsum::eval_grid;

/// Hard ceiling on moment grids (2²⁶ points ≈ 1 GiB of complex samples).
pub const GRID_CAP: usize = 1 << 26;

/// Largest supported moment exponent; beyond this the grid powers run out
/// of dynamic range.
pub const MAX_S: f64 = 8.0;

/// One converged L^s moment.
#[derive(Debug, Clone, Serialize)]
pub struct MomentReport {
    /// Coefficient sequence label ("divisor", "hecke12", "squares").
    pub kind: String,
    pub s: f64,
    /// Sum length (for transformed moments: the scale parameter X₁).
    pub x: usize,
    /// Grid size that met the doubling criterion.
    pub m: usize,
    /// (1/M)·Σ_j |S(j/M)|^s on the final grid.
    pub raw: f64,
    /// raw scaled by X^{−s/2} (t-dependent for transformed moments).
    pub normalized: f64,
    /// Relative change of `raw` on the last grid doubling.
    pub error_estimate: f64,
    /// Description of the smoothing weight, if any.
    pub window: Option<String>,
}

pub(crate) fn window_label(w: &SmoothWindow) -> String {
    let (a, b) = w.support();
    format!("{:?}[{a},{b};r={}]", w.orientation(), w.ramp())
}

pub(crate) fn validate_exponent(s: f64) -> Result<()> {
    if !s.is_finite() || s <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "moment exponent s = {s} must be a positive real"
        )));
    }
    if s > MAX_S {
        return Err(Error::InvalidArgument(format!(
            "moment exponent s = {s} exceeds the supported range (0, {MAX_S}]"
        )));
    }
    Ok(())
}

pub(crate) fn validate_moment_params(s: f64, tol: f64) -> Result<()> {
    validate_exponent(s)?;
    if !tol.is_finite() || tol <= 0.0 || tol >= 1.0 {
        return Err(Error::InvalidArgument(format!(
            "moment tolerance {tol} must lie in (0, 1)"
        )));
    }
    Ok(())
}

#[inline]
fn abs_power(z: Complex64, s: f64) -> f64 {
    let nsq = z.norm_sqr();
    if s == 2.0 {
        nsq
    } else if s == 1.0 {
        nsq.sqrt()
    } else if s == 4.0 {
        nsq * nsq
    } else {
        nsq.powf(0.5 * s)
    }
}

/// (1/M)·Σ_{j<M} |v_j|^s for the values of a sum with real coefficients,
/// reading only j ≤ M/2 and doubling the interior by conjugate symmetry
/// v_{M−j} = conj(v_j). Chunked fixed-order reduction keeps the result
/// independent of thread scheduling.
pub(crate) fn symmetric_power_sum(values: &[Complex64], s: f64) -> f64 {
    let m = values.len();
    let half = m / 2;
    let partials: Vec<f64> = values[1..half]
        .par_chunks(1 << 14)
        .map(|chunk| chunk.iter().map(|&z| abs_power(z, s)).sum::<f64>())
        .collect();
    let body: f64 = partials.iter().sum();
    (abs_power(values[0], s) + abs_power(values[half], s) + 2.0 * body) / m as f64
}

/// Starting grid: at least 2¹² points and at least 4 samples per unit
/// frequency of the sum being integrated.
pub(crate) fn grid_floor(extent: usize) -> usize {
    (4 * extent.max(1)).next_power_of_two().max(1 << 12)
}

#[derive(Debug)]
pub(crate) struct GridConvergence {
    pub m: usize,
    pub raw: f64,
    pub error_estimate: f64,
}

/// Drive `raw_at` over doubling grids from `m0` until the relative change
/// of the value falls below `tol`, or the grid cap is hit.
pub(crate) fn converge_on_grids(
    mut raw_at: impl FnMut(usize) -> Result<f64>,
    m0: usize,
    tol: f64,
) -> Result<GridConvergence> {
    if 2 * m0 > GRID_CAP {
        return Err(Error::ResourceLimit(format!(
            "starting grid {m0} leaves no room to refine under the cap {GRID_CAP}"
        )));
    }
    let mut m = m0;
    let mut prev = raw_at(m)?;
    let mut last_err = f64::INFINITY;
    loop {
        let m2 = 2 * m;
        if m2 > GRID_CAP {
            return Err(Error::NonConvergence {
                requested: tol,
                achieved: last_err,
                best: prev,
            });
        }
        let cur = raw_at(m2)?;
        last_err = (cur - prev).abs() / cur.abs().max(f64::MIN_POSITIVE);
        if last_err < tol {
            return Ok(GridConvergence {
                m: m2,
                raw: cur,
                error_estimate: last_err,
            });
        }
        prev = cur;
        m = m2;
    }
}

/// A grid evaluator cuts sums at their nominal length, so a window whose
/// support reaches past u = 1 is fed through the exact rescale-to-X_eff
/// change of variables: Σ_{n≤bX} λ(n)w(n/X)e(nα) = Σ_{n≤X_eff} λ(n)w̃(n/X_eff)e(nα)
/// with w̃ = w.rescaled(X/X_eff).
fn effective(window: Option<&SmoothWindow>, x: usize) -> Result<(Option<SmoothWindow>, usize)> {
    match window {
        None => Ok((None, x)),
        Some(w) => {
            let x_eff = ((w.support().1 * x as f64).ceil() as usize).max(x);
            let sigma = x as f64 / x_eff as f64;
            Ok((Some(w.rescaled(sigma)?), x_eff))
        }
    }
}

/// ∫₀¹ |S_⋆(α; X)|^s dα with a doubling-certified dyadic grid.
///
/// With a window the integrand sum is Σ λ(n)·w(n/X)·e(nα) over the window's
/// whole support; without one it is the sharp cutoff at X.
pub fn moment(
    coeffs: &CoeffSeq,
    window: Option<&SmoothWindow>,
    x: usize,
    s: f64,
    tol: f64,
) -> Result<MomentReport> {
    validate_moment_params(s, tol)?;
    if x == 0 {
        return Err(Error::InvalidArgument("moment length X must be >= 1".into()));
    }
    let (w_eff, x_eff) = effective(window, x)?;
    let conv = converge_on_grids(
        |m| Ok(symmetric_power_sum(eval_grid(coeffs, w_eff.as_ref(), x_eff, m)?.values(), s)),
        grid_floor(x_eff),
        tol,
    )?;
    Ok(MomentReport {
        kind: coeffs.kind().label(),
        s,
        x,
        m: conv.m,
        raw: conv.raw,
        normalized: (x as f64).powf(-0.5 * s) * conv.raw,
        error_estimate: conv.error_estimate,
        window: window.map(window_label),
    })
}

/// The exact value the s = 2 raw moment must equal: Σ_n λ(n)²·w(n/X)²
/// (sharp cutoff at X when no window is given).
pub fn plancherel_raw(coeffs: &CoeffSeq, window: Option<&SmoothWindow>, x: usize) -> Result<f64> {
    if x == 0 {
        return Err(Error::InvalidArgument("moment length X must be >= 1".into()));
    }
    let v = coeffs.values();
    match window {
        None => {
            if x > coeffs.limit() {
                return Err(Error::Range(format!(
                    "X = {x} exceeds coefficient table limit {}",
                    coeffs.limit()
                )));
            }
            Ok(v[1..=x].iter().map(|&c| c * c).sum())
        }
        Some(w) => {
            let hi = ((w.support().1 * x as f64).ceil() as usize).min(coeffs.limit());
            let xf = x as f64;
            Ok(v[1..=hi]
                .iter()
                .enumerate()
                .map(|(i, &c)| {
                    let t = c * w.eval((i + 1) as f64 / xf);
                    t * t
                })
                .sum())
        }
    }
}

/// Normalized moments m(s) = X^{−s/2}·(1/M)Σ|S(j/M)|^s for several exponents
/// on one shared grid — the discrete power-mean setting in which
/// monotonicity of m(s)^{1/s} in s is an exact inequality, not an estimate.
pub fn power_means(
    coeffs: &CoeffSeq,
    window: Option<&SmoothWindow>,
    x: usize,
    m: usize,
    s_list: &[f64],
) -> Result<Vec<f64>> {
    for &s in s_list {
        validate_exponent(s)?;
    }
    if x == 0 {
        return Err(Error::InvalidArgument("moment length X must be >= 1".into()));
    }
    let (w_eff, x_eff) = effective(window, x)?;
    let grid = eval_grid(coeffs, w_eff.as_ref(), x_eff, m)?;
    Ok(s_list
        .iter()
        .map(|&s| (x as f64).powf(-0.5 * s) * symmetric_power_sum(grid.values(), s))
        .collect())
}
