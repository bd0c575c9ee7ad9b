//! Coefficient sequences λ_⋆(n): divisor values, normalized Hecke
//! eigenvalues, and the perfect-square indicator.

use num_bigint::BigInt;

use self::convert::big_to_f64;
use super::tables::ArithTables;
use super::tau::tau_series;
use crate::error::{Error, Result};

/// Which arithmetic sequence an exponential sum weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoeffKind {
    /// d(n), the divisor-count function.
    Divisor,
    /// λ(n) = a(n)/n^{(k−1)/2} for a weight-k eigenform; weight 12 is the
    /// discriminant form with a(n) = τ(n).
    Hecke { weight: u32 },
    /// Indicator of perfect squares.
    Squares,
}

impl CoeffKind {
    pub fn label(&self) -> String {
        match self {
            CoeffKind::Divisor => "divisor".into(),
            CoeffKind::Hecke { weight } => format!("hecke{weight}"),
            CoeffKind::Squares => "squares".into(),
        }
    }
}

/// λ_⋆(1..=limit) as doubles, optionally with the exact integer backing
/// they were derived from (τ(n) for Hecke, d(n) for divisor).
#[derive(Debug, Clone)]
pub struct CoeffSeq {
    kind: CoeffKind,
    limit: usize,
    /// values[n] = λ(n) for 1 ≤ n ≤ limit; values[0] = 0 padding.
    values: Vec<f64>,
    exact: Option<Vec<BigInt>>,
}

// num-bigint's ToPrimitive lives in num-traits, which we don't otherwise
// depend on; a sign-and-magnitude digit walk is four lines.
mod convert {
    use num_bigint::{BigInt, Sign};

    pub fn big_to_f64(x: &BigInt) -> f64 {
        let (sign, digits) = x.to_u64_digits();
        let mut v = 0.0f64;
        for &d in digits.iter().rev() {
            v = v * 1.8446744073709552e19 + d as f64; // 2^64
        }
        if sign == Sign::Minus {
            -v
        } else {
            v
        }
    }
}

impl CoeffSeq {
    /// d(1..=limit) from a linear sieve.
    pub fn divisor(limit: usize) -> Result<Self> {
        let tables = ArithTables::build(limit)?;
        let mut values = vec![0.0; limit + 1];
        let mut exact = vec![BigInt::from(0); limit + 1];
        for n in 1..=limit {
            values[n] = tables.divisor(n) as f64;
            exact[n] = BigInt::from(tables.divisor(n));
        }
        Ok(CoeffSeq {
            kind: CoeffKind::Divisor,
            limit,
            values,
            exact: Some(exact),
        })
    }

    /// λ(n) = τ(n)/n^{11/2} for the weight-12 form.
    pub fn hecke(limit: usize) -> Result<Self> {
        let tau = tau_series(limit)?;
        hecke_normalize(tau, 12)
    }

    /// Perfect-square indicator.
    pub fn squares(limit: usize) -> Result<Self> {
        if limit == 0 {
            return Err(Error::InvalidArgument("sequence limit must be >= 1".into()));
        }
        let mut values = vec![0.0; limit + 1];
        let mut m = 1usize;
        while m * m <= limit {
            values[m * m] = 1.0;
            m += 1;
        }
        Ok(CoeffSeq {
            kind: CoeffKind::Squares,
            limit,
            values,
            exact: None,
        })
    }

    pub fn kind(&self) -> CoeffKind {
        self.kind
    }

    pub fn limit(&self) -> usize {
        self.limit
    }

    /// λ(n); panics outside 1..=limit.
    pub fn value(&self, n: usize) -> f64 {
        assert!(n >= 1 && n <= self.limit, "index {n} outside 1..={}", self.limit);
        self.values[n]
    }

    /// The full padded array, values[n] = λ(n), values[0] = 0.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn exact(&self) -> Option<&[BigInt]> {
        self.exact.as_deref()
    }

    /// Σ_{n≤X} λ(n)², the s = 2 moment's closed form.
    pub fn sum_of_squares(&self, x: usize) -> f64 {
        assert!(x <= self.limit);
        self.values[1..=x].iter().map(|v| v * v).sum()
    }
}

/// Normalize exact weight-k coefficients a(n) (indexed so that exact[n] =
/// a(n), exact[0] ignored) into λ(n) = a(n)/n^{(k−1)/2}, checking the
/// Deligne bound |λ(n)| ≤ d(n) over the whole range. A violation means
/// the input array was not generated correctly, so it is reported as data
/// corruption rather than a numeric failure.
pub fn hecke_normalize(exact: Vec<BigInt>, weight: u32) -> Result<CoeffSeq> {
    if exact.len() < 2 {
        return Err(Error::InvalidArgument(
            "exact coefficient array must contain at least a(1)".into(),
        ));
    }
    if weight < 12 || weight % 2 != 0 {
        return Err(Error::InvalidArgument(format!(
            "weight must be even and >= 12, got {weight}"
        )));
    }
    let limit = exact.len() - 1;
    let tables = ArithTables::build(limit)?;
    let half = (weight - 1) as f64 / 2.0;
    let mut values = vec![0.0; limit + 1];
    for n in 1..=limit {
        let lam = big_to_f64(&exact[n]) / (n as f64).powf(half);
        // generous float slack: genuine generation bugs overshoot by
        // orders of magnitude, not by rounding
        if lam.abs() > tables.divisor(n) as f64 * (1.0 + 1e-9) {
            return Err(Error::DataCorruption(format!(
                "coefficient bound violated at n = {n}: |{lam:.6}| > d({n}) = {}",
                tables.divisor(n)
            )));
        }
        values[n] = lam;
    }
    Ok(CoeffSeq {
        kind: CoeffKind::Hecke { weight },
        limit,
        values,
        exact: Some(exact),
    })
}
