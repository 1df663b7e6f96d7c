//! Essential-spectrum prediction: the Minkowski sum of the free band
//! `[-2ν, 2ν]` with `λ` times the coupling support, merged into disjoint
//! closed intervals.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::potential::CouplingDistribution;

/// Finite union of closed intervals, sorted and pairwise disjoint.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumPrediction {
    intervals: Vec<(f64, f64)>,
}

impl SpectrumPrediction {
    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    /// Whether `x` lies in some interval (closed endpoints).
    pub fn contains(&self, x: f64) -> bool {
        self.intervals.iter().any(|&(lo, hi)| lo <= x && x <= hi)
    }

    /// Sum of interval lengths.
    pub fn total_length(&self) -> f64 {
        self.intervals.iter().map(|&(lo, hi)| hi - lo).sum()
    }

    /// Widens every interval by `margin` on both sides and re-merges;
    /// used to absorb a `λ·E∞` perturbation into a base prediction.
    pub fn fattened(&self, margin: f64) -> Self {
        Self {
            intervals: merge(
                self.intervals
                    .iter()
                    .map(|&(lo, hi)| (lo - margin, hi + margin))
                    .collect(),
            ),
        }
    }
}

fn merge(mut intervals: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    intervals.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(intervals.len());
    for (lo, hi) in intervals {
        match out.last_mut() {
            Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
            _ => out.push((lo, hi)),
        }
    }
    out
}

/// `[-2ν, 2ν] + λ·supp(μ)`: one translated-and-fattened band per support
/// component of the coupling law, merged.
pub fn predict_essential_spectrum(
    dim: usize,
    lambda: f64,
    mu: &CouplingDistribution,
) -> Result<SpectrumPrediction> {
    if dim == 0 {
        return Err(Error::InvalidArgument("dimension must be positive".into()));
    }
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "lambda must be a finite nonnegative number, got {lambda}"
        )));
    }
    let band = 2.0 * dim as f64;
    let summands = mu
        .support_intervals()
        .iter()
        .map(|&(lo, hi)| (-band + lambda * lo, band + lambda * hi))
        .collect();
    Ok(SpectrumPrediction {
        intervals: merge(summands),
    })
}
