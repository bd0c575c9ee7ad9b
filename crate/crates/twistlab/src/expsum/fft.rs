//! Iterative radix-2 transform with the e(+njα) sign convention, so that
//! transforming the folded coefficient array b[n mod M] yields the grid
//! values S(j/M) = Σ_n c_n e(nj/M) directly.

use num_complex::Complex64;
use std::f64::consts::PI;

/// In-place transform: data[j] ← Σ_n data[n]·e(+nj/M). Length must be a
/// power of two.
pub fn fft_inplace(data: &mut [Complex64]) {
    let m = data.len();
    assert!(m.is_power_of_two(), "transform length {m} not a power of two");
    if m == 1 {
        return;
    }
    let bits = m.trailing_zeros();
    for i in 0..m {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            data.swap(i, j);
        }
    }
    // one table of e(k/m), k < m/2; stages index it by stride, and each
    // entry comes from a directly reduced angle rather than a recurrence
    let half = m / 2;
    let mut tw = Vec::with_capacity(half);
    for k in 0..half {
        let (s, c) = (2.0 * PI * k as f64 / m as f64).sin_cos();
        tw.push(Complex64::new(c, s));
    }
    let mut len = 2;
    while len <= m {
        let h = len / 2;
        let stride = m / len;
        for start in (0..m).step_by(len) {
            for k in 0..h {
                let w = tw[k * stride];
                let u = data[start + k];
                let v = data[start + k + h] * w;
                data[start + k] = u + v;
                data[start + k + h] = u - v;
            }
        }
        len <<= 1;
    }
}
