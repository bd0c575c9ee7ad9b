//! Exact counting of reduced residues in real intervals.

use super::tables::{divisors_of, mobius_of};

/// N_q([x, x+H]): the number of integers n ∈ [x, x+H] with gcd(n, q) = 1.
///
/// Computed by Möbius-inverting the coprimality condition into floor
/// counts, N(y) = Σ_{d|q} μ(d)⌊y/d⌋, exact in integer arithmetic. The
/// count always satisfies |N_q − φ(q)H/q| ≤ d(q): each divisor's floor
/// differs from its linear term by less than one.
pub fn reduced_residue_count(q: u64, x: f64, h: f64) -> u64 {
    assert!(q >= 1, "modulus must be positive");
    assert!(h >= 0.0, "interval length must be nonnegative");
    let lo = x.ceil() as i64;
    let hi = (x + h).floor() as i64;
    if hi < lo {
        return 0;
    }
    // Coprimality to q is q-periodic over all of Z, so shift the window
    // into the positives before counting.
    let shift = if lo <= 0 {
        let k = (1 - lo) as u64 / q + 1;
        (k * q) as i64
    } else {
        0
    };
    let lo = (lo + shift) as u64;
    let hi = (hi + shift) as u64;
    let count_to = |y: u64| -> i64 {
        let mut s = 0i64;
        for d in divisors_of(q) {
            s += mobius_of(d) * (y / d) as i64;
        }
        s
    };
    (count_to(hi) - count_to(lo - 1)) as u64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::tables::{divisors_of, totient_of, ArithTables};
    use num_integer::Integer;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn brute(q: u64, x: f64, h: f64) -> u64 {
        let lo = x.ceil() as i64;
        let hi = (x + h).floor() as i64;
        (lo..=hi)
            .filter(|&n| (n.rem_euclid(q as i64) as u64).gcd(&q) == 1)
            .count() as u64
    }

    #[test]
    fn full_period_gives_totient() {
        assert_eq!(reduced_residue_count(6, 1.0, 5.0), 2);
        for q in 1..=50u64 {
            assert_eq!(reduced_residue_count(q, 1.0, (q - 1) as f64), totient_of(q));
        }
    }

    #[test]
    fn small_window() {
        // [2, 5] against modulus 6 contains only 5
        assert_eq!(reduced_residue_count(6, 2.0, 3.0), 1);
        // [2, 4] contains none
        assert_eq!(reduced_residue_count(6, 2.0, 2.0), 0);
    }

    #[test]
    fn q_one_counts_all_integers() {
        for (x, h) in [(0.3f64, 7.2f64), (5.0, 0.0), (2.5, 0.4), (-3.7, 10.0)] {
            let expect = ((x + h).floor() - x.ceil() + 1.0).max(0.0) as u64;
            assert_eq!(reduced_residue_count(1, x, h), expect);
        }
    }

    #[test]
    fn negative_intervals() {
        for q in [2u64, 6, 15] {
            for x in [-25.3f64, -6.0, -0.5] {
                for h in [0.0f64, 3.7, 12.0] {
                    assert_eq!(reduced_residue_count(q, x, h), brute(q, x, h));
                }
            }
        }
    }

    #[test]
    fn equidistribution_bound_over_seeded_intervals() {
        // |N_q - phi(q) H / q| <= d(q) for 100 pseudorandom intervals per
        // modulus, H up to 5q.
        let tables = ArithTables::build(200).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        for q in 1..=200u64 {
            for _ in 0..100 {
                let x: f64 = rng.gen_range(0.0..1000.0);
                let h: f64 = rng.gen_range(0.0..(5 * q) as f64);
                let n = reduced_residue_count(q, x, h);
                assert_eq!(n, brute(q, x, h), "count mismatch at q={q} x={x} h={h}");
                let main = totient_of(q) as f64 * h / q as f64;
                let err = (n as f64 - main).abs();
                assert!(
                    err <= tables.divisor(q as usize) as f64,
                    "bound fails: q={q} x={x} h={h} err={err}"
                );
            }
        }
    }

    #[test]
    fn moebius_count_matches_brute_everywhere_small() {
        for q in 1..=30u64 {
            let _ = divisors_of(q);
            for lo10 in 0..40i64 {
                let x = lo10 as f64 / 4.0;
                for h4 in 0..20i64 {
                    let h = h4 as f64 / 2.0;
                    assert_eq!(reduced_residue_count(q, x, h), brute(q, x, h));
                }
            }
        }
    }
}
