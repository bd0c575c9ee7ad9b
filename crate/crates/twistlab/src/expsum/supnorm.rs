//! Certified sup-norm estimation: dense grid scan, golden-section ascent
//! around the leading peaks, and a derivative-bound certificate for what
//! the grid can miss.

use crate::arith::CoeffSeq;
use crate::error::Result;

use super::eval::{eval_direct, eval_grid};

#[derive(Debug, Clone)]
pub struct SupNormReport {
    /// Best |S(α)| found (grid scan + local refinement).
    pub value: f64,
    /// Where it was found.
    pub alpha: f64,
    /// Grid size used for the scan.
    pub grid_m: usize,
    /// sup |S′| ≤ 2π Σ n|c_n|, the Lipschitz constant of the scan.
    pub derivative_bound: f64,
    /// Certified upper bound: grid max + derivative_bound/(2M).
    pub upper_bound: f64,
}

/// Maximize f on [a, b] by golden-section to the given α-tolerance.
fn golden_max(mut f: impl FnMut(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut guard = 0;
    while b - a > tol && guard < 200 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        guard += 1;
    }
    if fc > fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

pub fn sup_norm(coeffs: &CoeffSeq, x: usize, refine_tol: f64) -> Result<SupNormReport> {
    let m = (32 * x).next_power_of_two();
    let grid = eval_grid(coeffs, None, x, m)?;
    let mut peaks: Vec<(f64, usize)> = grid
        .values()
        .iter()
        .enumerate()
        .map(|(j, z)| (z.norm(), j))
        .collect();
    peaks.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    let grid_max = peaks[0].0;
    let mut best = (peaks[0].0, grid.alpha(peaks[0].1));
    let tol = refine_tol.max(1e-14).min(1.0 / m as f64);
    for &(_, j) in peaks.iter().take(8) {
        let center = grid.alpha(j);
        let (alpha, val) = golden_max(
            |a| eval_direct(coeffs, None, x, a).unwrap().norm(),
            center - 1.0 / m as f64,
            center + 1.0 / m as f64,
            tol,
        );
        if val > best.0 {
            best = (val, alpha.rem_euclid(1.0));
        }
    }
    let derivative_bound = 2.0
        * std::f64::consts::PI
        * (1..=x)
            .map(|n| n as f64 * coeffs.value(n).abs())
            .sum::<f64>();
    Ok(SupNormReport {
        value: best.0,
        alpha: best.1,
        grid_m: m,
        derivative_bound,
        upper_bound: grid_max + derivative_bound / (2.0 * m as f64),
    })
}
