//! Pointwise and grid evaluation of S_⋆(α; X) = Σ_{n≤X} λ_⋆(n)·w(n/X)·e(nα).

use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

use super::fft::fft_inplace;
use crate::analysis::SmoothWindow;
use crate::arith::{CoeffKind, CoeffSeq};
use crate::error::{Error, Result};

const BLOCK: usize = 1024;

/// {nα} with the product split by fma, so the fractional part survives
/// the cancellation when nα is large.
fn frac_mul(n: f64, alpha: f64) -> f64 {
    let hi = n * alpha;
    let lo = n.mul_add(alpha, -hi);
    let mut t = hi - hi.floor() + lo;
    if t >= 1.0 {
        t -= 1.0;
    } else if t < 0.0 {
        t += 1.0;
    }
    t
}

/// e(t) = e^{2πit}.
fn unit_phase(t: f64) -> Complex64 {
    let (s, c) = (2.0 * PI * t).sin_cos();
    Complex64::new(c, s)
}

/// Fixed-shape combination: always splits at the midpoint, so the result
/// is a function of the partials alone, not of how they were produced.
fn pairwise_sum(v: &[Complex64]) -> Complex64 {
    match v.len() {
        0 => Complex64::new(0.0, 0.0),
        1 => v[0],
        n => pairwise_sum(&v[..n / 2]) + pairwise_sum(&v[n / 2..]),
    }
}

fn check_range(coeffs: &CoeffSeq, x: usize) -> Result<()> {
    if x == 0 {
        return Err(Error::InvalidArgument("sum length X must be positive".into()));
    }
    if x > coeffs.limit() {
        return Err(Error::Range(format!(
            "X = {x} exceeds the coefficient table limit {}",
            coeffs.limit()
        )));
    }
    Ok(())
}

fn eval_blocks(
    coeffs: &CoeffSeq,
    window: Option<&SmoothWindow>,
    x: usize,
    ph: impl Fn(usize) -> Complex64 + Sync,
) -> Complex64 {
    let vals = coeffs.values();
    let nblocks = x.div_ceil(BLOCK);
    let partials: Vec<Complex64> = (0..nblocks)
        .into_par_iter()
        .map(|b| {
            let lo = b * BLOCK + 1;
            let hi = ((b + 1) * BLOCK).min(x);
            let mut acc = Complex64::new(0.0, 0.0);
            for n in lo..=hi {
                let c = vals[n];
                if c == 0.0 {
                    continue;
                }
                let cw = match window {
                    Some(w) => {
                        let wv = w.eval(n as f64 / x as f64);
                        if wv == 0.0 {
                            continue;
                        }
                        c * wv
                    }
                    None => c,
                };
                acc += ph(n) * cw;
            }
            acc
        })
        .collect();
    pairwise_sum(&partials)
}

/// S_⋆(α; X) by direct summation; deterministic regardless of worker count.
pub fn eval_direct(
    coeffs: &CoeffSeq,
    window: Option<&SmoothWindow>,
    x: usize,
    alpha: f64,
) -> Result<Complex64> {
    check_range(coeffs, x)?;
    Ok(eval_blocks(coeffs, window, x, |n| {
        unit_phase(frac_mul(n as f64, alpha))
    }))
}

/// S_⋆(a/q; X) with the phase reduced in integer arithmetic, so rational
/// points keep their exact periodicity.
pub fn eval_direct_rational(
    coeffs: &CoeffSeq,
    window: Option<&SmoothWindow>,
    x: usize,
    a: i64,
    q: u64,
) -> Result<Complex64> {
    check_range(coeffs, x)?;
    if q == 0 {
        return Err(Error::InvalidArgument("denominator must be positive".into()));
    }
    let a_mod = a.rem_euclid(q as i64) as u64;
    Ok(eval_blocks(coeffs, window, x, |n| {
        let r = (n as u128 * a_mod as u128 % q as u128) as u64;
        unit_phase(r as f64 / q as f64)
    }))
}

/// Dense samples S(j/M), j = 0..M−1, from one transform of the folded
/// coefficient array.
pub struct GridEvaluation {
    m: usize,
    values: Vec<Complex64>,
    kind: CoeffKind,
    window: Option<SmoothWindow>,
    x: usize,
    warnings: Vec<String>,
}

pub fn eval_grid(
    coeffs: &CoeffSeq,
    window: Option<&SmoothWindow>,
    x: usize,
    m: usize,
) -> Result<GridEvaluation> {
    check_range(coeffs, x)?;
    if !m.is_power_of_two() {
        return Err(Error::InvalidArgument(format!(
            "grid size {m} is not a power of two"
        )));
    }
    let mut warnings = Vec::new();
    if m < 2 * x {
        warnings.push(format!(
            "grid size {m} below the recommended 2X = {}; aliasing folds frequencies",
            2 * x
        ));
    }
    let vals = coeffs.values();
    let mut data = vec![Complex64::new(0.0, 0.0); m];
    for n in 1..=x {
        let c = vals[n];
        if c == 0.0 {
            continue;
        }
        let cw = match window {
            Some(w) => c * w.eval(n as f64 / x as f64),
            None => c,
        };
        data[n % m].re += cw;
    }
    fft_inplace(&mut data);
    Ok(GridEvaluation {
        m,
        values: data,
        kind: coeffs.kind(),
        window: window.cloned(),
        x,
        warnings,
    })
}

impl GridEvaluation {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn alpha(&self, j: usize) -> f64 {
        j as f64 / self.m as f64
    }

    pub fn kind(&self) -> CoeffKind {
        self.kind
    }

    pub fn window(&self) -> Option<&SmoothWindow> {
        self.window.as_ref()
    }

    pub fn x(&self) -> usize {
        self.x
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }
}
