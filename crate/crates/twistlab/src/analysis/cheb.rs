//! Chebyshev interpolation on panels.
//!
//! Smooth functions that are expensive to evaluate (window transforms,
//! |φ̂|²) get fitted once on adaptive panels and then read back in a few
//! dozen flops. The Chebyshev coefficient tail doubles as an a
//! posteriori error certificate for each panel.

use crate::error::{Error, Result};

/// A single Chebyshev expansion f(x) ≈ Σ_k c_k T_k(u) on [a, b], with
/// u the affine pullback of x to [-1, 1].
#[derive(Debug, Clone)]
pub struct ChebPoly {
    a: f64,
    b: f64,
    coeffs: Vec<f64>,
}

impl ChebPoly {
    /// Interpolate through the n Chebyshev–Gauss nodes of [a, b].
    pub fn fit(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64, n: usize) -> Self {
        assert!(n >= 2 && b > a);
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let vals: Vec<f64> = (0..n)
            .map(|j| {
                let theta = std::f64::consts::PI * (j as f64 + 0.5) / n as f64;
                f(mid + half * theta.cos())
            })
            .collect();
        let mut coeffs = vec![0.0; n];
        for (k, c) in coeffs.iter_mut().enumerate() {
            let mut s = 0.0;
            for (j, v) in vals.iter().enumerate() {
                s += v * (std::f64::consts::PI * k as f64 * (j as f64 + 0.5) / n as f64).cos();
            }
            *c = 2.0 * s / n as f64;
        }
        coeffs[0] *= 0.5;
        ChebPoly { a, b, coeffs }
    }

    /// Clenshaw recurrence.
    pub fn eval(&self, x: f64) -> f64 {
        let u = (2.0 * x - self.a - self.b) / (self.b - self.a);
        let mut b1 = 0.0;
        let mut b2 = 0.0;
        for &c in self.coeffs.iter().skip(1).rev() {
            let t = 2.0 * u * b1 - b2 + c;
            b2 = b1;
            b1 = t;
        }
        u * b1 - b2 + self.coeffs[0]
    }

    /// Max |c_k| over the last `m` coefficients — the convergence proxy.
    pub fn tail_bound(&self, m: usize) -> f64 {
        let n = self.coeffs.len();
        self.coeffs[n.saturating_sub(m)..]
            .iter()
            .fold(0.0f64, |acc, c| acc.max(c.abs()))
    }
}

/// Piecewise-Chebyshev interpolant with adaptive panel splitting driven
/// by the coefficient-tail certificate.
#[derive(Debug, Clone)]
pub struct ChebPanels {
    edges: Vec<f64>,
    polys: Vec<ChebPoly>,
}

impl ChebPanels {
    /// Fit panels of the given degree until every panel's coefficient
    /// tail falls below `abs_tol`. Panels that fail are bisected, up to
    /// `max_panels` in total.
    pub fn build(
        f: &mut impl FnMut(f64) -> f64,
        a: f64,
        b: f64,
        degree: usize,
        abs_tol: f64,
        max_panels: usize,
    ) -> Result<Self> {
        assert!(b > a && degree >= 8);
        let mut pending = vec![(a, b)];
        let mut done: Vec<ChebPoly> = Vec::new();
        while let Some((lo, hi)) = pending.pop() {
            if done.len() + pending.len() >= max_panels {
                return Err(Error::TableResolution(format!(
                    "panel budget {max_panels} exhausted on [{a}, {b}]"
                )));
            }
            let p = ChebPoly::fit(f, lo, hi, degree + 1);
            if p.tail_bound(3) <= abs_tol || hi - lo < 1e-9 * (b - a) {
                done.push(p);
            } else {
                let m = 0.5 * (lo + hi);
                pending.push((m, hi));
                pending.push((lo, m));
            }
        }
        done.sort_by(|p, q| p.a.partial_cmp(&q.a).unwrap());
        let mut edges: Vec<f64> = done.iter().map(|p| p.a).collect();
        edges.push(b);
        Ok(ChebPanels { edges, polys: done })
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.polys.len();
        let idx = match self
            .edges
            .binary_search_by(|e| e.partial_cmp(&x).unwrap())
        {
            Ok(i) => i.min(n - 1),
            Err(0) => 0,
            Err(i) => (i - 1).min(n - 1),
        };
        self.polys[idx].eval(x)
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.edges[0], *self.edges.last().unwrap())
    }

    pub fn panel_count(&self) -> usize {
        self.polys.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_polynomial_exactly() {
        let mut f = |x: f64| 2.0 * x * x * x - x + 0.5;
        let p = ChebPoly::fit(&mut f, -1.0, 3.0, 12);
        for i in 0..=40 {
            let x = -1.0 + 4.0 * i as f64 / 40.0;
            assert!((p.eval(x) - f(x)).abs() < 1e-13, "x = {x}");
        }
        assert!(p.tail_bound(3) < 1e-13);
    }

    #[test]
    fn panels_track_oscillation() {
        let mut f = |x: f64| (20.0 * x).sin() * (-x).exp();
        let p = ChebPanels::build(&mut f, 0.0, 6.0, 16, 1e-12, 400).unwrap();
        for i in 0..=600 {
            let x = 6.0 * i as f64 / 600.0;
            assert!((p.eval(x) - f(x)).abs() < 1e-10, "x = {x}");
        }
        assert!(p.panel_count() >= 4);
    }

    #[test]
    fn budget_exhaustion_reported() {
        // step discontinuity cannot be resolved by polynomial panels
        let mut f = |x: f64| if x < 0.37 { 0.0 } else { 1.0 };
        match ChebPanels::build(&mut f, 0.0, 1.0, 8, 1e-14, 16) {
            Err(Error::TableResolution(_)) => {}
            other => panic!("expected table-resolution error, got {other:?}"),
        }
    }

    #[test]
    fn eval_at_domain_edges() {
        let mut f = |x: f64| x.exp();
        let p = ChebPanels::build(&mut f, 0.0, 2.0, 12, 1e-12, 64).unwrap();
        assert!((p.eval(0.0) - 1.0).abs() < 1e-11);
        assert!((p.eval(2.0) - 2f64.exp()).abs() < 1e-10);
        let (lo, hi) = p.domain();
        assert_eq!((lo, hi), (0.0, 2.0));
    }
}
