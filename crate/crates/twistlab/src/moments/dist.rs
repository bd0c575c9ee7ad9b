//! Empirical distribution of the normalized cusp-form sums X^{−1/2}|S_f|:
//! histogram, quantiles, raw moments, and the two-sample Kolmogorov–Smirnov
//! distance used to compare consecutive ladder rungs.

use rayon::prelude::*;
use serde::Serialize;

use crate::arith::CoeffSeq;
use crate::error::{Error, Result};
use crate::expsum::eval_grid;

#[derive(Debug, Clone, Serialize)]
pub struct DistributionReport {
    pub x: usize,
    pub m: usize,
    pub bins: usize,
    /// bins+1 equally spaced edges from 0 to just past the sample maximum.
    pub edges: Vec<f64>,
    /// Bin masses (counts/M); they sum to 1.
    pub masses: Vec<f64>,
    /// Empirical quantiles at p = 0.05, 0.10, …, 0.95.
    pub quantiles: Vec<(f64, f64)>,
    /// First four raw moments of the sample.
    pub moments: [f64; 4],
    /// Sorted samples, retained in memory for ECDF comparisons but not
    /// serialized (the histogram is the on-disk summary).
    #[serde(skip)]
    pub samples_sorted: Vec<f64>,
}

/// Sample X^{−1/2}|S_f(j/M; X)| over the full dyadic grid and summarize its
/// empirical distribution.
pub fn distribution(x: usize, m: usize, bins: usize) -> Result<DistributionReport> {
    if x == 0 {
        return Err(Error::InvalidArgument("sample length X must be >= 1".into()));
    }
    if m < 8 * x {
        return Err(Error::InvalidArgument(format!(
            "distribution grid M = {m} must be at least 8X = {}",
            8 * x
        )));
    }
    if bins < 4 {
        return Err(Error::InvalidArgument(format!(
            "histogram needs at least 4 bins, got {bins}"
        )));
    }
    let coeffs = CoeffSeq::hecke(x)?;
    let grid = eval_grid(&coeffs, None, x, m)?;
    let scale = 1.0 / (x as f64).sqrt();
    let mut samples: Vec<f64> = grid
        .values()
        .par_iter()
        .map(|z| z.norm() * scale)
        .collect();
    samples.sort_by(|a, b| a.partial_cmp(b).expect("finite samples"));

    let vmax = *samples.last().expect("nonempty grid");
    let top = vmax * (1.0 + 1e-12) + f64::MIN_POSITIVE;
    let edges: Vec<f64> = (0..=bins).map(|i| top * i as f64 / bins as f64).collect();
    let mut masses = vec![0.0; bins];
    {
        let mut bin = 0usize;
        let mut count = 0usize;
        for &v in &samples {
            while bin + 1 < bins && v >= edges[bin + 1] {
                masses[bin] = count as f64 / m as f64;
                count = 0;
                bin += 1;
            }
            count += 1;
        }
        masses[bin] = count as f64 / m as f64;
    }

    let quantiles: Vec<(f64, f64)> = (1..=19)
        .map(|j| {
            let p = j as f64 / 20.0;
            let idx = ((p * m as f64).ceil() as usize).clamp(1, m) - 1;
            (p, samples[idx])
        })
        .collect();

    let mut moments = [0.0f64; 4];
    for (k, slot) in moments.iter_mut().enumerate() {
        let partials: Vec<f64> = samples
            .par_chunks(1 << 14)
            .map(|c| c.iter().map(|&v| v.powi(k as i32 + 1)).sum::<f64>())
            .collect();
        *slot = partials.iter().sum::<f64>() / m as f64;
    }

    Ok(DistributionReport {
        x,
        m,
        bins,
        edges,
        masses,
        quantiles,
        moments,
        samples_sorted: samples,
    })
}

/// Two-sample Kolmogorov–Smirnov distance between sorted sample vectors.
pub(crate) fn ks_sorted(a: &[f64], b: &[f64]) -> f64 {
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let t = a[i].min(b[j]);
        while i < a.len() && a[i] <= t {
            i += 1;
        }
        while j < b.len() && b[j] <= t {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// KS distance between the ECDFs of two distribution reports.
pub fn ks_distance(a: &DistributionReport, b: &DistributionReport) -> Result<f64> {
    if a.samples_sorted.is_empty() || b.samples_sorted.is_empty() {
        return Err(Error::InvalidArgument(
            "distribution report carries no retained samples (deserialized?)".into(),
        ));
    }
    Ok(ks_sorted(&a.samples_sorted, &b.samples_sorted))
}
