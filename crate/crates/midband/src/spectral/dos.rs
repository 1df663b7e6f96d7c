//! Eigenvalue histograms: a visual sanity check that finite-volume spectra
//! fill the predicted band union, plus the fraction of states escaping it.

use crate::error::{Error, Result};
use crate::lattice::EigenSystem;
use crate::spectral::SpectrumPrediction;

/// Minimum bin count; coarser histograms say nothing.
pub const DOS_MIN_BINS: usize = 10;

/// Normalized eigenvalue histogram over `[lo, hi]`.
#[derive(Debug, Clone)]
pub struct DosHistogram {
    pub lo: f64,
    pub hi: f64,
    /// Eigenvalue counts per bin; equal-width bins, last edge closed.
    pub counts: Vec<usize>,
    /// `counts / total`.
    pub fractions: Vec<f64>,
    /// Fraction of eigenvalues outside every predicted interval.
    pub outside_fraction: f64,
    pub total: usize,
}

/// Bins all eigenvalues over the hull of the predicted intervals, widened
/// if needed so every eigenvalue lands inside, and reports how much
/// spectral weight escapes the prediction.
pub fn density_of_states(
    eigen: &EigenSystem,
    bins: usize,
    prediction: &SpectrumPrediction,
) -> Result<DosHistogram> {
    if bins < DOS_MIN_BINS {
        return Err(Error::InvalidArgument(format!(
            "histogram needs at least {DOS_MIN_BINS} bins, got {bins}"
        )));
    }
    if eigen.is_empty() {
        return Err(Error::InvalidArgument(
            "cannot bin an empty eigensystem".into(),
        ));
    }
    let values = eigen.eigenvalues();
    let intervals = prediction.intervals();
    let mut lo = intervals.first().map(|i| i.0).unwrap_or(f64::INFINITY);
    let mut hi = intervals.last().map(|i| i.1).unwrap_or(f64::NEG_INFINITY);
    lo = lo.min(values[0]);
    hi = hi.max(values[values.len() - 1]);
    if lo == hi {
        // Degenerate spectrum and prediction at one point: widen so the
        // single spike occupies one interior bin.
        lo -= 0.5;
        hi += 0.5;
    }

    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    let mut outside = 0usize;
    for &v in values {
        let bin = (((v - lo) / width) as usize).min(bins - 1);
        counts[bin] += 1;
        if !prediction.contains(v) {
            outside += 1;
        }
    }
    let total = values.len();
    let fractions = counts.iter().map(|&c| c as f64 / total as f64).collect();
    Ok(DosHistogram {
        lo,
        hi,
        counts,
        fractions,
        outside_fraction: outside as f64 / total as f64,
        total,
    })
}
