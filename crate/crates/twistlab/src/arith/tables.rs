//! Linear-sieve tables for d(n), μ(n), φ(n).

use crate::error::{Error, Result};

/// Divisor, Möbius, and totient tables up to a fixed limit, built by a single
/// linear sieve over smallest prime factors. Immutable after construction.
#[derive(Debug, Clone)]
pub struct ArithTables {
    limit: usize,
    divisor: Vec<u32>,
    mobius: Vec<i8>,
    totient: Vec<u64>,
}

impl ArithTables {
    pub fn build(limit: usize) -> Result<Self> {
        if limit == 0 {
            return Err(Error::InvalidArgument("table limit must be >= 1".into()));
        }
        let n = limit + 1;
        let mut spf = vec![0u32; n]; // smallest prime factor, 0 = prime or <2
        let mut primes: Vec<u32> = Vec::new();
        let mut divisor = vec![0u32; n];
        let mut mobius = vec![0i8; n];
        let mut totient = vec![0u64; n];
        // exponent of the smallest prime factor, for the d(n) recurrence
        let mut spf_exp = vec![0u32; n];

        divisor[1] = 1;
        mobius[1] = 1;
        totient[1] = 1;

        for i in 2..n {
            if spf[i] == 0 {
                primes.push(i as u32);
                divisor[i] = 2;
                mobius[i] = -1;
                totient[i] = (i - 1) as u64;
                spf_exp[i] = 1;
            }
            for &p in &primes {
                let p = p as usize;
                if i * p >= n {
                    break;
                }
                let m = i * p;
                spf[m] = p as u32;
                if i % p == 0 {
                    // p is also the smallest prime of i
                    spf_exp[m] = spf_exp[i] + 1;
                    divisor[m] = divisor[i] / (spf_exp[i] + 1) * (spf_exp[m] + 1);
                    mobius[m] = 0;
                    totient[m] = totient[i] * p as u64;
                    break;
                } else {
                    spf_exp[m] = 1;
                    divisor[m] = divisor[i] * 2;
                    mobius[m] = -mobius[i];
                    totient[m] = totient[i] * (p - 1) as u64;
                }
            }
        }

        Ok(ArithTables {
            limit,
            divisor,
            mobius,
            totient,
        })
    }

    pub fn limit(&self) -> usize {
        self.limit
    }

    /// d(n), the number of positive divisors. Panics if n is 0 or above limit.
    pub fn divisor(&self, n: usize) -> u32 {
        self.divisor[n]
    }

    /// μ(n).
    pub fn mobius(&self, n: usize) -> i8 {
        self.mobius[n]
    }

    /// φ(n).
    pub fn totient(&self, n: usize) -> u64 {
        self.totient[n]
    }

    pub fn divisor_slice(&self) -> &[u32] {
        &self.divisor
    }

    pub fn mobius_slice(&self) -> &[i8] {
        &self.mobius
    }

    pub fn totient_slice(&self) -> &[u64] {
        &self.totient
    }
}

/// Enumerate the positive divisors of n by trial division, unsorted cost
/// O(√n), returned sorted.
pub fn divisors_of(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    large.reverse();
    small.extend(large);
    small
}

/// Factor n by trial division into (prime, exponent) pairs.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// μ(n) by trial division.
pub fn mobius_of(n: u64) -> i64 {
    let mut mu = 1i64;
    for (_, e) in factorize(n) {
        if e > 1 {
            return 0;
        }
        mu = -mu;
    }
    mu
}

/// φ(n) by trial division.
pub fn totient_of(n: u64) -> u64 {
    let mut phi = n;
    for (p, _) in factorize(n) {
        phi = phi / p * (p - 1);
    }
    phi
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            return false;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    true
}
