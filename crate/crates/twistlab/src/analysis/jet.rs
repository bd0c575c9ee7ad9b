//! Degree-4 truncated Taylor arithmetic.
//!
//! A `Jet4` carries a function value together with its first four
//! derivatives at a point. Arithmetic on jets propagates derivatives
//! through the chain and Leibniz rules exactly, which is how the window
//! code produces analytic derivatives without finite differencing.

/// (f, f′, f″, f‴, f⁗) at an implicit base point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet4(pub [f64; 5]);

/// Binomial coefficients C(n, k) for n ≤ 4.
const BINOM: [[f64; 5]; 5] = [
    [1.0, 0.0, 0.0, 0.0, 0.0],
    [1.0, 1.0, 0.0, 0.0, 0.0],
    [1.0, 2.0, 1.0, 0.0, 0.0],
    [1.0, 3.0, 3.0, 1.0, 0.0],
    [1.0, 4.0, 6.0, 4.0, 1.0],
];

impl Jet4 {
    pub fn constant(c: f64) -> Self {
        Jet4([c, 0.0, 0.0, 0.0, 0.0])
    }

    /// The identity function x ↦ x seen at base point x, or any affine
    /// reparametrization with slope `dx`.
    pub fn variable(x: f64, dx: f64) -> Self {
        Jet4([x, dx, 0.0, 0.0, 0.0])
    }

    pub fn value(&self) -> f64 {
        self.0[0]
    }

    pub fn derivative(&self, order: usize) -> f64 {
        self.0[order]
    }

    pub fn add(&self, o: &Jet4) -> Jet4 {
        let mut r = [0.0; 5];
        for i in 0..5 {
            r[i] = self.0[i] + o.0[i];
        }
        Jet4(r)
    }

    pub fn sub(&self, o: &Jet4) -> Jet4 {
        let mut r = [0.0; 5];
        for i in 0..5 {
            r[i] = self.0[i] - o.0[i];
        }
        Jet4(r)
    }

    pub fn neg(&self) -> Jet4 {
        let mut r = [0.0; 5];
        for i in 0..5 {
            r[i] = -self.0[i];
        }
        Jet4(r)
    }

    /// Leibniz rule: (fg)⁽ⁿ⁾ = Σ C(n,k) f⁽ᵏ⁾ g⁽ⁿ⁻ᵏ⁾.
    pub fn mul(&self, o: &Jet4) -> Jet4 {
        let mut r = [0.0; 5];
        for n in 0..5 {
            let mut s = 0.0;
            for k in 0..=n {
                s += BINOM[n][k] * self.0[k] * o.0[n - k];
            }
            r[n] = s;
        }
        Jet4(r)
    }

    /// Reciprocal by solving (f·g)⁽ⁿ⁾ = [n = 0] for the derivatives of
    /// g = 1/f order by order.
    pub fn recip(&self) -> Jet4 {
        let f0 = self.0[0];
        assert!(f0 != 0.0, "reciprocal of a zero-valued jet");
        let mut g = [0.0; 5];
        g[0] = 1.0 / f0;
        for n in 1..5 {
            let mut s = 0.0;
            for k in 1..=n {
                s += BINOM[n][k] * self.0[k] * g[n - k];
            }
            g[n] = -s / f0;
        }
        Jet4(g)
    }

    pub fn div(&self, o: &Jet4) -> Jet4 {
        self.mul(&o.recip())
    }

    /// exp(f) via g′ = f′·g, differentiated repeatedly.
    pub fn exp(&self) -> Jet4 {
        let mut g = [0.0; 5];
        g[0] = self.0[0].exp();
        for n in 1..5 {
            // g^{(n)} = (f' g)^{(n-1)}
            let mut s = 0.0;
            for k in 0..n {
                s += BINOM[n - 1][k] * self.0[k + 1] * g[n - 1 - k];
            }
            g[n] = s;
        }
        Jet4(g)
    }
}
