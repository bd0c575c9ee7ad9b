//! Geometric moment ladders: normalized L^s moments along X, X·f, X·f², …
//! with successive differences as a Cauchy diagnostic and a fitted decay
//! exponent for those differences.

use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::Star;
use crate::arith::CoeffSeq;
use crate::error::{Error, Result};

use super::grid::{moment, validate_moment_params};

#[derive(Debug, Clone, Serialize)]
pub struct LadderRung {
    pub x: usize,
    pub m: usize,
    pub raw: f64,
    pub normalized: f64,
    /// normalized(this rung) − normalized(previous rung); None on the first.
    pub diff: Option<f64>,
    /// Σ_{n≤X} λ(n)²/X, reported for (star = f, s = 2) where the normalized
    /// moment must equal it identically.
    pub cf_estimate: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct LadderReport {
    pub kind: String,
    pub s: f64,
    pub factor: f64,
    pub rungs: Vec<LadderRung>,
    /// Exponent e in |Δm| ≈ C·X^{−e}, least-squares fitted on the
    /// successive differences (positive means the ladder is Cauchy).
    pub decay_exponent: Option<f64>,
    /// Root-mean-square residual of the log-log fit.
    pub fit_residual: Option<f64>,
}

fn rung_lengths(x_start: usize, x_end: usize, factor: f64) -> Vec<usize> {
    let mut xs = Vec::new();
    let mut x = x_start;
    while x <= x_end {
        xs.push(x);
        let next = ((x as f64) * factor).round() as usize;
        x = next.max(x + 1);
    }
    xs
}

pub fn ladder(
    star: Star,
    s: f64,
    x_start: usize,
    x_end: usize,
    factor: f64,
    tol: f64,
) -> Result<LadderReport> {
    validate_moment_params(s, tol)?;
    if !(factor > 1.0 && factor <= 4.0) || !factor.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "ladder factor {factor} must lie in (1, 4]"
        )));
    }
    if x_start == 0 || x_end < x_start {
        return Err(Error::InvalidArgument(format!(
            "ladder range [{x_start}, {x_end}] is empty"
        )));
    }
    let coeffs = match star {
        Star::D => CoeffSeq::divisor(x_end)?,
        Star::F { weight: 12 } => CoeffSeq::hecke(x_end)?,
        Star::F { weight } => {
            return Err(Error::InvalidArgument(format!(
                "no coefficient generator for weight-{weight} forms (weight 12 only)"
            )))
        }
    };
    let is_f = matches!(star, Star::F { .. });
    let xs = rung_lengths(x_start, x_end, factor);
    let reports = xs
        .par_iter()
        .map(|&x| moment(&coeffs, None, x, s, tol))
        .collect::<Result<Vec<_>>>()?;

    let v = coeffs.values();
    let mut rungs: Vec<LadderRung> = Vec::with_capacity(xs.len());
    for (i, rep) in reports.iter().enumerate() {
        let cf = if is_f && s == 2.0 {
            let mass: f64 = v[1..=rep.x].iter().map(|&c| c * c).sum();
            Some(mass / rep.x as f64)
        } else {
            None
        };
        rungs.push(LadderRung {
            x: rep.x,
            m: rep.m,
            raw: rep.raw,
            normalized: rep.normalized,
            diff: (i > 0).then(|| rep.normalized - reports[i - 1].normalized),
            cf_estimate: cf,
        });
    }

    let (decay_exponent, fit_residual) = fit_decay(&rungs);
    Ok(LadderReport {
        kind: coeffs.kind().label(),
        s,
        factor,
        rungs,
        decay_exponent,
        fit_residual,
    })
}

/// Least-squares fit of ln|Δm| against ln X over the rungs with nonzero
/// difference; returns (decay exponent, rms residual).
fn fit_decay(rungs: &[LadderRung]) -> (Option<f64>, Option<f64>) {
    let pts: Vec<(f64, f64)> = rungs
        .iter()
        .filter_map(|r| {
            r.diff
                .filter(|d| d.abs() > 0.0)
                .map(|d| ((r.x as f64).ln(), d.abs().ln()))
        })
        .collect();
    if pts.len() < 2 {
        return (None, None);
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-12 {
        return (None, None);
    }
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    let ss: f64 = pts
        .iter()
        .map(|&(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum();
    (Some(-slope), Some((ss / n).sqrt()))
}
