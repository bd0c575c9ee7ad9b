//! Moments of dual-side sums built from a tabulated Voronoi transform.
//!
//! The dual of a twisted sum attaches a *different* exponential phase to
//! each kernel part: e(−ān/q) to the Y₀ and J pieces, e(+ān/q) to the K₀
//! piece. Under the substitution α = −ā/q (the coprime-average model) the
//! first family lands on frequency +n and the second on frequency −n, so
//! the model field is two-sided:
//!
//!   S̃_t(α) = Σ_n λ(n)·I⁻(n/(X₁t²))·e(nα) + Σ_n λ(n)·I⁺(n/(X₁t²))·e(−nα),
//!
//! where I∓ collects the parts with phase sign ∓. Collapsing both onto one
//! side would be a different random field (its L² picks up a spurious
//! cross term). Coefficient weights are truncated where the transform is
//! certified dead, so the grid length is finite even though the dual
//! expansion is formally infinite.

use num_complex::Complex64;

use crate::analysis::transform::VoronoiTransform;
use crate::arith::CoeffSeq;
use crate::error::{Error, Result};
use crate::expsum::fft::fft_inplace;
use crate::voronoi::identity::{star_matches, DUAL_CUT_FACTOR};

use super::grid::{
    converge_on_grids, grid_floor, symmetric_power_sum, validate_moment_params, window_label,
    MomentReport,
};

/// The dual-side coefficient field, one weight vector per phase side.
/// `plus[n]` multiplies e(nα), `minus[n]` multiplies e(−nα); index 0 of
/// each is padding.
pub(crate) struct DualField {
    pub plus: Vec<f64>,
    pub minus: Vec<f64>,
}

impl DualField {
    pub fn extent(&self) -> usize {
        self.plus.len().max(self.minus.len()).saturating_sub(1)
    }

    /// Σ (over both sides) of the squared weights: the exact Plancherel
    /// mass of the field without its zero mode.
    pub fn l2_mass(&self) -> f64 {
        let p: f64 = self.plus.iter().map(|&w| w * w).sum();
        let m: f64 = self.minus.iter().map(|&w| w * w).sum();
        p + m
    }
}

/// λ(n)·I_part(n/(X₁t²)) for every kernel part, truncated at `y_cut` in
/// the transform variable and routed to the phase side the part carries
/// in the dual sum.
pub(crate) fn transformed_coeffs(
    table: &VoronoiTransform,
    coeffs: &CoeffSeq,
    x1: usize,
    t: f64,
    y_cut: f64,
) -> Result<DualField> {
    if !star_matches(table.star(), coeffs.kind()) {
        return Err(Error::InvalidArgument(format!(
            "transform star {:?} does not match coefficient kind {}",
            table.star(),
            coeffs.kind().label()
        )));
    }
    let scale = x1 as f64 * t * t;
    let parts = table.parts();
    let mut field = DualField {
        plus: vec![0.0],
        minus: vec![0.0],
    };
    for (idx, part) in parts.iter().enumerate() {
        let mut w = table.part_weights_to(idx, scale, y_cut)?;
        let n_max = w.len() - 1;
        if n_max > coeffs.limit() {
            return Err(Error::Range(format!(
                "transformed sum needs coefficients to {n_max}, table holds {}",
                coeffs.limit()
            )));
        }
        let v = coeffs.values();
        for (n, slot) in w.iter_mut().enumerate().skip(1) {
            *slot *= v[n];
        }
        // e(−ān/q) ⇒ +n under α = −ā/q; e(+ān/q) ⇒ −n
        let side = if part.dual_phase_sign() < 0.0 {
            &mut field.plus
        } else {
            &mut field.minus
        };
        if w.len() > side.len() {
            side.resize(w.len(), 0.0);
        }
        for (slot, val) in side.iter_mut().zip(w.iter()).skip(1) {
            *slot += val;
        }
    }
    Ok(field)
}

/// (1/M)Σ_j |c₀ + Σ_n plus_n e(nj/M) + Σ_n minus_n e(−nj/M)|^s by FFT;
/// `zero_mode` is the constant (frequency-0) term c₀. All coefficients
/// real, so the grid values stay conjugate-symmetric.
pub(crate) fn grid_power_from_field(field: &DualField, zero_mode: f64, m: usize, s: f64) -> f64 {
    let mut data = vec![Complex64::new(0.0, 0.0); m];
    data[0].re = zero_mode;
    for (n, &cn) in field.plus.iter().enumerate().skip(1) {
        data[n % m].re += cn;
    }
    for (n, &cn) in field.minus.iter().enumerate().skip(1) {
        data[(m - n % m) % m].re += cn;
    }
    fft_inplace(&mut data);
    symmetric_power_sum(&data, s)
}

pub(crate) fn transformed_moment_with_cut(
    table: &VoronoiTransform,
    coeffs: &CoeffSeq,
    x1: usize,
    t: f64,
    s: f64,
    tol: f64,
    y_cut: f64,
    zero_mode: f64,
) -> Result<MomentReport> {
    validate_moment_params(s, tol)?;
    if !(1.0..=2.0).contains(&t) {
        return Err(Error::InvalidArgument(format!(
            "transformed-moment parameter t = {t} must lie in [1, 2]"
        )));
    }
    if x1 == 0 {
        return Err(Error::InvalidArgument("scale X1 must be >= 1".into()));
    }
    let field = transformed_coeffs(table, coeffs, x1, t, y_cut)?;
    let conv = converge_on_grids(
        |m| Ok(grid_power_from_field(&field, zero_mode, m, s)),
        grid_floor(field.extent()),
        tol,
    )?;
    let eff = x1 as f64 * t * t;
    Ok(MomentReport {
        kind: coeffs.kind().label(),
        s,
        x: x1,
        m: conv.m,
        raw: conv.raw,
        normalized: eff.powf(-0.5 * s) * conv.raw,
        error_estimate: conv.error_estimate,
        window: Some(format!("I_*{} t={t}", window_label(table.window()))),
    })
}

/// ∫₀¹ |(1/(t√X₁))·S̃_t(α)|^s dα as a `MomentReport` whose `normalized`
/// field carries the (t²X₁)^{−s/2} scaling of the display.
pub fn transformed_moment(
    table: &VoronoiTransform,
    coeffs: &CoeffSeq,
    x1: usize,
    t: f64,
    s: f64,
    tol: f64,
) -> Result<MomentReport> {
    let tail = table.tail_threshold().ok_or_else(|| {
        Error::InvalidArgument("table has no certified tail; rebuild with build_to_tail".into())
    })?;
    transformed_moment_with_cut(table, coeffs, x1, t, s, tol, DUAL_CUT_FACTOR * tail, 0.0)
}

#[cfg(test)]
mod tests {
    use std::sync::OnceLock;

    use super::*;
    use crate::analysis::{SmoothWindow, Star, VoronoiTransform};

    fn d_table() -> &'static VoronoiTransform {
        static T: OnceLock<VoronoiTransform> = OnceLock::new();
        T.get_or_init(|| {
            VoronoiTransform::build_to_tail(&SmoothWindow::voronoi_default(), Star::D).unwrap()
        })
    }

    fn d_coeffs() -> &'static CoeffSeq {
        static C: OnceLock<CoeffSeq> = OnceLock::new();
        C.get_or_init(|| CoeffSeq::divisor(1 << 17).unwrap())
    }

    #[test]
    fn plancherel_route_agrees() {
        let table = d_table();
        let coeffs = d_coeffs();
        let (x1, t) = (8usize, 1.3f64);
        let rep = transformed_moment(table, coeffs, x1, t, 2.0, 1e-10).unwrap();
        let tail = table.tail_threshold().unwrap();
        let field = transformed_coeffs(table, coeffs, x1, t, DUAL_CUT_FACTOR * tail).unwrap();
        let exact = field.l2_mass();
        assert!(
            (rep.raw - exact).abs() <= 1e-10 * exact.max(1e-300),
            "grid {} vs exact {exact}",
            rep.raw
        );
        let eff = x1 as f64 * t * t;
        assert!((rep.normalized - exact / eff).abs() <= 1e-10 * (exact / eff));
    }

    #[test]
    fn phase_split_changes_the_field() {
        // Folding the K₀ weights onto the +n side is a *different* field:
        // its L² carries a cross term 2Σ I⁻I⁺ that the true dual does not.
        // This pins the two-sided layout against a silent regression.
        let table = d_table();
        let coeffs = d_coeffs();
        let field = transformed_coeffs(table, coeffs, 8, 1.0, 30.0).unwrap();
        let folded: f64 = {
            let mut c = field.plus.clone();
            if field.minus.len() > c.len() {
                c.resize(field.minus.len(), 0.0);
            }
            for (slot, v) in c.iter_mut().zip(field.minus.iter()) {
                *slot += v;
            }
            c.iter().map(|&w| w * w).sum()
        };
        let split = field.l2_mass();
        assert!(
            (folded - split).abs() > 1e-3 * split,
            "cross term unexpectedly negligible: folded {folded} vs split {split}"
        );
        let m = grid_floor(field.extent());
        let grid = grid_power_from_field(&field, 0.0, m, 2.0);
        assert!(
            (grid - split).abs() < 1e-9 * split,
            "grid L² {grid} vs split closed form {split}"
        );
    }

    #[test]
    fn continuous_in_t() {
        let table = d_table();
        let coeffs = d_coeffs();
        let a = transformed_moment(table, coeffs, 8, 1.0, 1.0, 1e-7).unwrap();
        let b = transformed_moment(table, coeffs, 8, 1.0 + 1e-3, 1.0, 1e-7).unwrap();
        assert!(
            (a.normalized - b.normalized).abs() < 1e-2 * a.normalized,
            "t-jump: {} vs {}",
            a.normalized,
            b.normalized
        );
    }

    #[test]
    fn deep_tail_is_immaterial() {
        // Pushing the truncation from 2.5·tail to the default 3.5·tail moves
        // the moment by strictly less than 1e-10: everything past the
        // certified tail is numerically dead weight.
        let table = d_table();
        let coeffs = d_coeffs();
        let tail = table.tail_threshold().unwrap();
        let a =
            transformed_moment_with_cut(table, coeffs, 8, 1.2, 2.0, 1e-10, 2.5 * tail, 0.0).unwrap();
        let b = transformed_moment(table, coeffs, 8, 1.2, 2.0, 1e-10).unwrap();
        assert!(
            (a.normalized - b.normalized).abs() < 1e-10,
            "truncation moved the moment by {}",
            (a.normalized - b.normalized).abs()
        );
    }

    #[test]
    fn validation_gates() {
        let table = d_table();
        let coeffs = d_coeffs();
        assert!(transformed_moment(table, coeffs, 8, 0.9, 1.0, 1e-6).is_err());
        assert!(transformed_moment(table, coeffs, 8, 2.1, 1.0, 1e-6).is_err());
        assert!(transformed_moment(table, coeffs, 0, 1.5, 1.0, 1e-6).is_err());
        let hecke = CoeffSeq::hecke(64).unwrap();
        assert!(
            transformed_moment(table, &hecke, 8, 1.5, 1.0, 1e-6).is_err(),
            "star/kind mismatch must be rejected"
        );
        let short = CoeffSeq::divisor(64).unwrap();
        assert!(
            transformed_moment(table, &short, 8, 1.5, 1.0, 1e-6).is_err(),
            "insufficient coefficient range must be rejected"
        );
    }
}
