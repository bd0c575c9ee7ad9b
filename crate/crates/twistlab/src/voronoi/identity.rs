//! The two summation identities: divisor main term + Y/K dual pair, and
//! the cusp-form J dual, with calibration of the normalization constant
//! and a residual checker that certifies its own truncation.

use num_complex::Complex64;
use num_integer::Integer;
use std::f64::consts::PI;

use crate::analysis::quad::adaptive_quad;
use crate::analysis::transform::TAIL_LEVEL;
use crate::analysis::{SmoothWindow, Star, VoronoiTransform};
use crate::arith::{divisors_of, is_prime, CoeffKind, CoeffSeq};
use crate::error::{Error, Result};
use crate::expsum::eval_direct_rational;

pub const EULER_GAMMA: f64 = 0.5772156649015329;

/// Dual sums truncate at this multiple of the pointwise tail threshold,
/// so the neglected remainder (divisor-weighted, summed against the
/// decay envelope) certifies below the 10⁻¹⁰·(1+|lhs|) budget rather
/// than merely having small individual terms.
pub(crate) const DUAL_CUT_FACTOR: f64 = 3.5;

pub(crate) fn mod_inverse(a: u64, q: u64) -> Option<u64> {
    if q == 1 {
        return Some(0);
    }
    let (mut old_r, mut r) = (a as i128, q as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let quot = old_r / r;
        (old_r, r) = (r, old_r - quot * r);
        (old_s, s) = (s, old_s - quot * s);
    }
    if old_r == 1 {
        Some(old_s.rem_euclid(q as i128) as u64)
    } else {
        None
    }
}

fn pairwise(v: &[Complex64]) -> Complex64 {
    match v.len() {
        0 => Complex64::new(0.0, 0.0),
        1 => v[0],
        n => pairwise(&v[..n / 2]) + pairwise(&v[n / 2..]),
    }
}

pub(crate) fn star_matches(star: Star, kind: CoeffKind) -> bool {
    match (star, kind) {
        (Star::D, CoeffKind::Divisor) => true,
        (Star::F { weight }, CoeffKind::Hecke { weight: w }) => weight == w,
        _ => false,
    }
}

/// (X/q)·∫ (log(Xu/q²) + 2γ) w(u) du.
pub fn main_term_divisor(q: u64, x: usize, w: &SmoothWindow) -> Result<Complex64> {
    main_term_divisor_shifted(q, x, w, 0.0)
}

/// Same with 2γ replaced by 2γ + shift; shift = −1 is the variant that
/// appears when the weight integral is evaluated against a sharp cutoff,
/// kept on the books so reports can show both.
pub fn main_term_divisor_shifted(
    q: u64,
    x: usize,
    w: &SmoothWindow,
    shift: f64,
) -> Result<Complex64> {
    if q == 0 {
        return Err(Error::InvalidArgument("modulus must be positive".into()));
    }
    if x == 0 {
        return Err(Error::InvalidArgument("length X must be positive".into()));
    }
    let (a, b) = w.support();
    let log_xq2 = (x as f64).ln() - 2.0 * (q as f64).ln();
    let v = adaptive_quad(
        |u| w.eval(u) * (log_xq2 + u.ln() + 2.0 * EULER_GAMMA + shift),
        a,
        b,
        1e-12,
    )?;
    Ok(Complex64::new(x as f64 / q as f64 * v, 0.0))
}

/// The lhs of the identity: Σ_n λ(n) e(an/q) w(n/X), summed across the
/// window's whole support (which extends past X when b > 1).
pub fn identity_lhs(
    coeffs: &CoeffSeq,
    w: &SmoothWindow,
    q: u64,
    a: i64,
    x: usize,
) -> Result<Complex64> {
    let (_, b) = w.support();
    let x_eff = ((b * x as f64).ceil() as usize).max(x);
    let sigma = x as f64 / x_eff as f64;
    let w_scaled = w.rescaled(sigma)?;
    eval_direct_rational(coeffs, Some(&w_scaled), x_eff, a, q)
}

/// Raw dual sum (X/q)·Σ_n λ(n)·e(∓ān/q)·I_part(nX/q²), without the
/// normalization constant; each kernel part carries its own phase sign.
pub fn dual_sum(
    coeffs: &CoeffSeq,
    table: &VoronoiTransform,
    q: u64,
    a: i64,
    x: usize,
) -> Result<Complex64> {
    dual_sum_with_n(coeffs, table, q, a, x).map(|(v, _)| v)
}

pub fn dual_sum_with_n(
    coeffs: &CoeffSeq,
    table: &VoronoiTransform,
    q: u64,
    a: i64,
    x: usize,
) -> Result<(Complex64, usize)> {
    if q == 0 || x == 0 {
        return Err(Error::InvalidArgument("q and X must be positive".into()));
    }
    if !star_matches(table.star(), coeffs.kind()) {
        return Err(Error::InvalidArgument(format!(
            "table is for star {} but coefficients are {}",
            table.star().label(),
            coeffs.kind().label()
        )));
    }
    let a_mod = a.rem_euclid(q as i64) as u64;
    if a_mod.gcd(&q) != 1 {
        return Err(Error::InvalidArgument(format!(
            "a = {a} and q = {q} are not coprime"
        )));
    }
    let tail = table.tail_threshold().ok_or_else(|| {
        Error::InvalidArgument("table has no certified tail; build it with build_to_tail".into())
    })?;
    let abar = mod_inverse(a_mod, q).expect("coprimality checked");
    let roots: Vec<Complex64> = (0..q)
        .map(|j| {
            let (s, c) = (2.0 * PI * j as f64 / q as f64).sin_cos();
            Complex64::new(c, s)
        })
        .collect();
    let scale = (q as f64) * (q as f64) / (x as f64);
    let y_cut = DUAL_CUT_FACTOR * tail;
    let parts = table.parts();
    let mut total = Complex64::new(0.0, 0.0);
    let mut n_used = 0usize;
    for (i, part) in parts.iter().enumerate() {
        let weights = table.part_weights_to(i, scale, y_cut)?;
        let n_max = weights.len() - 1;
        n_used = n_used.max(n_max);
        if n_max > coeffs.limit() {
            return Err(Error::Range(format!(
                "dual sum needs coefficients to n = {n_max}, table holds {}",
                coeffs.limit()
            )));
        }
        let vals = coeffs.values();
        let negative_phase = part.dual_phase_sign() < 0.0;
        let mut partials = Vec::with_capacity(n_max / 1024 + 1);
        let mut block = Complex64::new(0.0, 0.0);
        for n in 1..=n_max {
            let c = vals[n] * weights[n];
            if c != 0.0 {
                let r = (n as u128 * abar as u128 % q as u128) as u64;
                let idx = if negative_phase { (q - r) % q } else { r };
                block += roots[idx as usize] * c;
            }
            if n % 1024 == 0 {
                partials.push(block);
                block = Complex64::new(0.0, 0.0);
            }
        }
        partials.push(block);
        total += pairwise(&partials);
    }
    Ok((total * (x as f64 / q as f64), n_used))
}

/// Σ_{n_lo < n ≤ n_hi} d(n)·envelope(n/scale) · (X/q), the raw bound on a
/// block of neglected dual terms; ∞ when the table carries no envelope.
fn envelope_block_bound(
    table: &VoronoiTransform,
    q: u64,
    x: usize,
    n_lo: usize,
    n_hi: usize,
) -> f64 {
    let Some(tail) = table.tail_threshold() else {
        return f64::INFINITY;
    };
    let Some((kappa, level)) = table.tail_envelope() else {
        return f64::INFINITY;
    };
    if kappa <= 0.0 {
        return f64::INFINITY;
    }
    let scale = (q as f64) * (q as f64) / (x as f64);
    let t4 = tail.powf(0.25);
    let mut sum = 0.0;
    for n in (n_lo + 1)..=n_hi {
        let y = n as f64 / scale;
        let env = level * (-(kappa * (y.powf(0.25) - t4)).max(0.0)).exp();
        let term = divisors_of(n as u64).len() as f64 * env;
        sum += term;
        if term < 1e-22 {
            break;
        }
    }
    (x as f64 / q as f64) * sum
}

/// Upper bound on the dual terms dropped beyond n_start, from the table's
/// measured decay envelope and the divisor bound |λ(n)| ≤ d(n); includes
/// a safety factor of 10.
pub fn dual_tail_certificate(table: &VoronoiTransform, q: u64, x: usize, n_start: usize) -> f64 {
    10.0 * envelope_block_bound(table, q, x, n_start, 64 * n_start + 64)
}

#[derive(Debug, Clone)]
pub struct VoronoiResidual {
    pub star: Star,
    pub q: u64,
    pub a: i64,
    pub x: usize,
    pub window: SmoothWindow,
    pub lhs: Complex64,
    pub main_term: Complex64,
    pub dual: Complex64,
    pub constant_used: Complex64,
    pub truncation_n: usize,
    pub residual: f64,
    /// Main term with the 2γ−1 variant, and the residual it would give.
    pub main_term_alt: Complex64,
    pub residual_alt: f64,
    /// Certified bound on what truncation dropped.
    pub tail_certificate: f64,
}

impl VoronoiResidual {
    pub fn passes(&self, tol: f64) -> bool {
        self.residual.is_finite() && self.residual < tol
    }
}

/// Assemble lhs, main term, and calibrated dual for prime q, and record
/// how far the identity is from closing.
pub fn voronoi_residual(
    coeffs: &CoeffSeq,
    table: &VoronoiTransform,
    q: u64,
    a: i64,
    x: usize,
) -> Result<VoronoiResidual> {
    if !is_prime(q) {
        return Err(Error::InvalidArgument(format!(
            "q = {q} is composite; the identity is implemented for prime modulus"
        )));
    }
    let star = table.star();
    let w = table.window().clone();
    let lhs = identity_lhs(coeffs, &w, q, a, x)?;
    let (main, main_alt) = match star {
        Star::D => (
            main_term_divisor(q, x, &w)?,
            main_term_divisor_shifted(q, x, &w, -1.0)?,
        ),
        Star::F { .. } => (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)),
    };
    let (dual, truncation_n) = dual_sum_with_n(coeffs, table, q, a, x)?;
    let c = table.norm_constant();
    let residual = (lhs - main - c * dual).norm();
    let residual_alt = (lhs - main_alt - c * dual).norm();
    let tail_certificate = dual_tail_certificate(table, q, x, truncation_n);
    Ok(VoronoiResidual {
        star,
        q,
        a,
        x,
        window: w,
        lhs,
        main_term: main,
        dual,
        constant_used: c,
        truncation_n,
        residual,
        main_term_alt: main_alt,
        residual_alt,
        tail_certificate,
    })
}

#[derive(Debug, Clone)]
pub struct CalibrationReport {
    /// Least-squares constant across the probes.
    pub constant: Complex64,
    /// √(Σ|lhs−main−c·dual|² / Σ|lhs−main|²).
    pub fit_residual: f64,
    /// Closest member of the closed candidate set (cusp-form star only).
    pub candidate: Option<Complex64>,
    pub candidate_distance: f64,
}

/// Least-squares fit of the constant c in lhs = main + c·dual over the
/// probe set; the result is stored on the table.
pub fn calibrate_constant(
    coeffs: &CoeffSeq,
    table: &mut VoronoiTransform,
    probes: &[(u64, i64, usize)],
) -> Result<CalibrationReport> {
    if probes.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "calibration needs at least 3 probes, got {}",
            probes.len()
        )));
    }
    let star = table.star();
    let w = table.window().clone();
    let mut num = Complex64::new(0.0, 0.0);
    let mut den = 0.0;
    let mut rows = Vec::with_capacity(probes.len());
    for &(q, a, x) in probes {
        let lhs = identity_lhs(coeffs, &w, q, a, x)?;
        let main = match star {
            Star::D => main_term_divisor(q, x, &w)?,
            Star::F { .. } => Complex64::new(0.0, 0.0),
        };
        let dual = dual_sum(coeffs, table, q, a, x)?;
        let l = lhs - main;
        num += dual.conj() * l;
        den += dual.norm_sqr();
        rows.push((l, dual));
    }
    let l_scale: f64 = rows.iter().map(|(l, _)| l.norm_sqr()).sum();
    if den < 1e-20 * l_scale.max(1e-20) {
        return Err(Error::Calibration(
            "dual sums vanish across all probes; constant is unidentifiable".into(),
        ));
    }
    let c = num / den;
    let misfit: f64 = rows.iter().map(|(l, d)| (l - c * d).norm_sqr()).sum();
    let fit_residual = (misfit / l_scale.max(1e-300)).sqrt();
    let (candidate, candidate_distance) = match star {
        Star::D => (None, f64::NAN),
        Star::F { weight } => {
            let ik = if weight % 4 == 0 { 1.0 } else { -1.0 };
            let set = [
                Complex64::new(1.0, 0.0),
                Complex64::new(2.0 * PI, 0.0),
                Complex64::new(-2.0 * PI, 0.0),
                Complex64::new(2.0 * PI * ik, 0.0),
                Complex64::new(-2.0 * PI * ik, 0.0),
            ];
            let best = set
                .iter()
                .min_by(|p, r| {
                    (c - **p).norm().partial_cmp(&(c - **r).norm()).unwrap()
                })
                .copied()
                .unwrap();
            (Some(best), (c - best).norm())
        }
    };
    table.set_norm_constant(c);
    Ok(CalibrationReport {
        constant: c,
        fit_residual,
        candidate,
        candidate_distance,
    })
}
