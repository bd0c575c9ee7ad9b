//! Ramanujan sums c_q(ℓ) and a small cache keyed by modulus.

use num_integer::Integer;
use std::collections::HashMap;

use super::tables::{divisors_of, mobius_of};

/// c_q(ℓ) = Σ_{d | gcd(q, |ℓ|)} d · μ(q/d), with the convention
/// gcd(q, 0) = q so that c_q(0) = φ(q).
pub fn ramanujan_sum(q: u64, ell: i64) -> i64 {
    assert!(q >= 1, "modulus must be positive");
    let g = if ell == 0 {
        q
    } else {
        q.gcd(&(ell.unsigned_abs()))
    };
    let mut s = 0i64;
    for d in divisors_of(g) {
        s += d as i64 * mobius_of(q / d);
    }
    s
}

/// Memoized Ramanujan sums for repeated evaluation over a fixed set of
/// moduli, as in the overlap-defect series where every ℓ is paired with
/// every modulus of a Farey system.
#[derive(Debug, Default)]
pub struct RamanujanSumCache {
    // per modulus: divisors of q and μ(q/d) for each, so each query is a
    // gcd plus a short divisor scan
    by_q: HashMap<u64, Vec<(u64, i64)>>,
}

impl RamanujanSumCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn eval(&mut self, q: u64, ell: i64) -> i64 {
        let entry = self.by_q.entry(q).or_insert_with(|| {
            divisors_of(q)
                .into_iter()
                .map(|d| (d, mobius_of(q / d)))
                .collect()
        });
        let g = if ell == 0 {
            q
        } else {
            q.gcd(&(ell.unsigned_abs()))
        };
        let mut s = 0i64;
        for &(d, mu) in entry.iter() {
            if g % d == 0 {
                s += d as i64 * mu;
            }
        }
        s
    }

    pub fn moduli_cached(&self) -> usize {
        self.by_q.len()
    }
}
