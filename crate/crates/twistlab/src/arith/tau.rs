//! Ramanujan τ(n) by power-series expansion of the discriminant form.
//!
//! Δ(z) = q ∏_{n≥1} (1 − qⁿ)²⁴ = Σ τ(n) qⁿ.  The cube of the eta-type
//! product collapses to a sparse series supported on triangular numbers
//! (Jacobi),
//!
//!   ∏ (1 − qⁿ)³ = Σ_{k≥0} (−1)ᵏ (2k+1) q^{k(k+1)/2},
//!
//! so the 24th power is the 8th power of that sparse series: seven
//! dense-by-sparse multiplications, each O(limit^{3/2}) coefficient
//! operations, all exact in big integers.

use num_bigint::BigInt;

use crate::error::{Error, Result};

/// Hard ceiling on the series length; above this the dense-by-sparse
/// route stops being a desk-scale computation.
pub const TAU_LIMIT_CEILING: usize = 200_000;

/// τ(1..=limit), exactly. Index n of the returned vector holds τ(n);
/// index 0 is zero padding.
pub fn tau_series(limit: usize) -> Result<Vec<BigInt>> {
    if limit == 0 {
        return Err(Error::InvalidArgument("tau series limit must be >= 1".into()));
    }
    if limit > TAU_LIMIT_CEILING {
        return Err(Error::ResourceLimit(format!(
            "tau series limit {limit} exceeds ceiling {TAU_LIMIT_CEILING}"
        )));
    }
    // Coefficients of the cube series up to degree limit - 1.
    let deg = limit; // work with degrees 0..deg, τ(n) = coeff at n-1
    let mut sparse: Vec<(usize, i64)> = Vec::new();
    let mut k = 0usize;
    loop {
        let t = k * (k + 1) / 2;
        if t >= deg {
            break;
        }
        let c = (2 * k as i64 + 1) * if k % 2 == 0 { 1 } else { -1 };
        sparse.push((t, c));
        k += 1;
    }

    // dense ← sparse, then seven dense-by-sparse convolutions
    let mut dense = vec![BigInt::from(0); deg];
    for &(t, c) in &sparse {
        dense[t] = BigInt::from(c);
    }
    for _ in 0..7 {
        let mut next = vec![BigInt::from(0); deg];
        for &(t, c) in &sparse {
            for m in t..deg {
                if dense[m - t].sign() != num_bigint::Sign::NoSign {
                    next[m] += &dense[m - t] * c;
                }
            }
        }
        dense = next;
    }

    let mut out = vec![BigInt::from(0); limit + 1];
    for n in 1..=limit {
        out[n] = std::mem::take(&mut dense[n - 1]);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    /// Independent oracle: expand ∏(1−qⁿ) term by term, then raise to the
    /// 24th power by binary powering of dense polynomials. No shared code
    /// or identity with the production route.
    fn naive_eta24(limit: usize) -> Vec<BigInt> {
        let deg = limit;
        let mut euler = vec![BigInt::from(0); deg];
        euler[0] = BigInt::from(1);
        for n in 1..deg {
            // multiply by (1 - q^n) in place, descending degrees
            for m in (n..deg).rev() {
                let t = std::mem::take(&mut euler[m]);
                euler[m] = t - &euler[m - n];
            }
        }
        let mul = |a: &[BigInt], b: &[BigInt]| -> Vec<BigInt> {
            let mut out = vec![BigInt::from(0); deg];
            for i in 0..deg {
                if a[i].sign() == num_bigint::Sign::NoSign {
                    continue;
                }
                for j in 0..deg - i {
                    if b[j].sign() != num_bigint::Sign::NoSign {
                        out[i + j] += &a[i] * &b[j];
                    }
                }
            }
            out
        };
        let e2 = mul(&euler, &euler);
        let e4 = mul(&e2, &e2);
        let e8 = mul(&e4, &e4);
        let e16 = mul(&e8, &e8);
        let e24 = mul(&e16, &e8);
        let mut out = vec![BigInt::from(0); limit + 1];
        for n in 1..=limit {
            out[n] = e24[n - 1].clone();
        }
        out
    }

    #[test]
    fn first_values() {
        let tau = tau_series(12).unwrap();
        let expect: [i64; 12] = [
            1, -24, 252, -1472, 4830, -6048, -16744, 84480, -113643, -115920, 534612, -370944,
        ];
        for (n, &e) in expect.iter().enumerate() {
            assert_eq!(tau[n + 1], BigInt::from(e), "tau({})", n + 1);
        }
    }

    #[test]
    fn matches_naive_eta_product_to_2000() {
        let limit = 2000;
        let tau = tau_series(limit).unwrap();
        let oracle = naive_eta24(limit);
        for n in 1..=limit {
            assert_eq!(tau[n], oracle[n], "tau({n})");
        }
    }

    #[test]
    fn multiplicative_and_hecke_recursion() {
        let limit = 5000;
        let tau = tau_series(limit).unwrap();
        // tau(mn) = tau(m) tau(n) for coprime m, n
        for m in 2..=70usize {
            for n in 2..=70usize {
                if num_integer::gcd(m, n) != 1 || m * n > limit {
                    continue;
                }
                assert_eq!(tau[m * n], &tau[m] * &tau[n], "tau({m}*{n})");
            }
        }
        // tau(p^{r+1}) = tau(p) tau(p^r) - p^11 tau(p^{r-1})
        for p in [2usize, 3, 5, 7, 11, 13] {
            let p11 = BigInt::from(p).pow(11);
            let mut pr = p; // p^r with r = 1
            let mut prev = BigInt::from(1); // tau(p^0)
            let mut cur = tau[p].clone(); // tau(p^1)
            while pr * p <= limit {
                let next = &tau[p] * &cur - &p11 * &prev;
                assert_eq!(tau[pr * p], next, "tau({}^next)", p);
                prev = cur;
                cur = next;
                pr *= p;
            }
        }
    }

    #[test]
    fn congruence_mod_691() {
        // tau(n) ≡ σ₁₁(n) (mod 691), a classical check independent of any
        // series manipulation.
        let limit = 3000;
        let tau = tau_series(limit).unwrap();
        let m = BigInt::from(691);
        for n in 1..=limit as u64 {
            let mut sigma11 = BigInt::from(0);
            for d in crate::arith::tables::divisors_of(n) {
                sigma11 += BigInt::from(d).pow(11);
            }
            let lhs = ((&tau[n as usize] % &m) + &m) % &m;
            let rhs = sigma11 % &m;
            assert_eq!(lhs, rhs, "tau({n}) mod 691");
        }
    }

    #[test]
    fn ceiling_enforced() {
        match tau_series(TAU_LIMIT_CEILING + 1) {
            Err(Error::ResourceLimit(_)) => {}
            other => panic!("expected resource-limit error, got {other:?}"),
        }
        assert!(tau_series(0).is_err());
    }
}
