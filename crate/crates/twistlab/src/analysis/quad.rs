//! Adaptive Gauss–Kronrod quadrature plus fixed rules used as building
//! blocks and as independent test oracles.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// 15-point Kronrod abscissae on [0, 1] side (symmetric rule); the
/// even-indexed entries are the embedded 7-point Gauss nodes.
const XGK: [f64; 8] = [
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
];
const WG: [f64; 4] = [
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
];

/// Values that can be integrated: f64 and Complex64. Keeps the adaptive
/// driver generic without pulling in a numeric-traits dependency.
pub trait Integrand: Copy {
    fn zero() -> Self;
    fn add(self, o: Self) -> Self;
    fn scale(self, s: f64) -> Self;
    fn norm(self) -> f64;
}

impl Integrand for f64 {
    fn zero() -> Self {
        0.0
    }
    fn add(self, o: Self) -> Self {
        self + o
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn norm(self) -> f64 {
        self.abs()
    }
}

impl Integrand for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn add(self, o: Self) -> Self {
        self + o
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn norm(self) -> f64 {
        // 1-norm of the parts: cheap and an upper bound proxy
        self.re.abs() + self.im.abs()
    }
}

/// One G7/K15 application on [a, b]: (K15 value, |K15 − G7| error proxy).
fn kronrod_panel<T: Integrand>(f: &mut impl FnMut(f64) -> T, a: f64, b: f64) -> (T, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut k = T::zero();
    let mut g = T::zero();
    for (i, (&x, &wk)) in XGK.iter().zip(WGK.iter()).enumerate() {
        if x == 0.0 {
            let v = f(c);
            k = k.add(v.scale(wk));
            g = g.add(v.scale(WG[3]));
        } else {
            let lo = f(c - h * x);
            let hi = f(c + h * x);
            let pair = lo.add(hi);
            k = k.add(pair.scale(wk));
            if i % 2 == 1 {
                g = g.add(pair.scale(WG[i / 2]));
            }
        }
    }
    let k = k.scale(h);
    let g = g.scale(h);
    let raw = k.add(g.scale(-1.0)).norm();
    // the usual conservative rescaling of the raw difference
    let err = (200.0 * raw).powf(1.5).min(raw.max(1e-300));
    (k, err.max(raw * 1e-2))
}

struct Segment<T> {
    a: f64,
    b: f64,
    value: T,
    err: f64,
}

impl<T> PartialEq for Segment<T> {
    fn eq(&self, o: &Self) -> bool {
        self.err == o.err && self.a == o.a
    }
}
impl<T> Eq for Segment<T> {}
impl<T> PartialOrd for Segment<T> {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}
impl<T> Ord for Segment<T> {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        // max-heap on error; tie-break on position for determinism
        self.err
            .partial_cmp(&o.err)
            .unwrap()
            .then(self.a.partial_cmp(&o.a).unwrap())
    }
}

/// Adaptive bisection to absolute tolerance. Splits the segment with the
/// largest error estimate until the total is below `abs_tol` or the
/// segment budget runs out; non-convergence reports the best estimate.
pub fn adaptive<T: Integrand>(
    mut f: impl FnMut(f64) -> T,
    a: f64,
    b: f64,
    abs_tol: f64,
) -> Result<(T, f64)> {
    assert!(b >= a, "reversed integration bounds");
    if a == b {
        return Ok((T::zero(), 0.0));
    }
    let (v, e) = kronrod_panel(&mut f, a, b);
    let mut heap = std::collections::BinaryHeap::new();
    heap.push(Segment { a, b, value: v, err: e });
    let mut total_err = e;
    const MAX_SEGMENTS: usize = 30_000;
    while total_err > abs_tol && heap.len() < MAX_SEGMENTS {
        let worst = heap.pop().unwrap();
        let m = 0.5 * (worst.a + worst.b);
        if m <= worst.a || m >= worst.b {
            // interval at floating-point resolution; keep it as is
            heap.push(worst);
            break;
        }
        let (v1, e1) = kronrod_panel(&mut f, worst.a, m);
        let (v2, e2) = kronrod_panel(&mut f, m, worst.b);
        total_err += e1 + e2 - worst.err;
        heap.push(Segment { a: worst.a, b: m, value: v1, err: e1 });
        heap.push(Segment { a: m, b: worst.b, value: v2, err: e2 });
    }
    // sum left-to-right for a reproducible rounding pattern
    let mut segs: Vec<Segment<T>> = heap.into_vec();
    segs.sort_by(|x, y| x.a.partial_cmp(&y.a).unwrap());
    let mut value = T::zero();
    for s in &segs {
        value = value.add(s.value);
    }
    if total_err > abs_tol {
        return Err(Error::NonConvergence {
            requested: abs_tol,
            achieved: total_err,
            best: value.norm(),
        });
    }
    Ok((value, total_err))
}

/// ∫_a^b f, adaptive, absolute tolerance.
pub fn adaptive_quad(f: impl FnMut(f64) -> f64, a: f64, b: f64, abs_tol: f64) -> Result<f64> {
    adaptive(f, a, b, abs_tol).map(|(v, _)| v)
}

/// Complex-valued adaptive integral.
pub fn adaptive_quad_complex(
    f: impl FnMut(f64) -> Complex64,
    a: f64,
    b: f64,
    abs_tol: f64,
) -> Result<Complex64> {
    adaptive(f, a, b, abs_tol).map(|(v, _)| v)
}

/// 16-node Gauss–Legendre abscissae/weights on [-1, 1], positive half.
const XGL16: [f64; 8] = [
    0.0950125098376374,
    0.2816035507792589,
    0.4580167776572274,
    0.6178762444026438,
    0.7554044083550030,
    0.8656312023878318,
    0.9445750230732326,
    0.9894009349916499,
];
const WGL16: [f64; 8] = [
    0.1894506104550685,
    0.1826034150449236,
    0.1691565193950025,
    0.1495959888165767,
    0.1246289712555339,
    0.0951585116824928,
    0.0622535239386479,
    0.0271524594117541,
];

/// The 16 (node, weight) pairs of `gauss_legendre_16` mapped to [a, b],
/// for callers that want to evaluate the integrand nodes in parallel.
pub fn gl16_points(a: f64, b: f64) -> [(f64, f64); 16] {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut out = [(0.0, 0.0); 16];
    for i in 0..8 {
        out[2 * i] = (c - h * XGL16[i], h * WGL16[i]);
        out[2 * i + 1] = (c + h * XGL16[i], h * WGL16[i]);
    }
    out
}

/// Fixed 16-node Gauss–Legendre rule; exact for polynomials to degree 31.
pub fn gauss_legendre_16(mut f: impl FnMut(f64) -> f64, a: f64, b: f64) -> f64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut s = 0.0;
    for (&x, &w) in XGL16.iter().zip(WGL16.iter()) {
        s += w * (f(c - h * x) + f(c + h * x));
    }
    s * h
}

/// Composite Simpson with 2n subintervals — a deliberately independent,
/// fixed-order oracle for cross-checking the adaptive integrator.
pub fn composite_simpson(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let m = 2 * n.max(1);
    let h = (b - a) / m as f64;
    let mut s = f(a) + f(b);
    for j in 1..m {
        let w = if j % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + j as f64 * h);
    }
    s * h / 3.0
}
