//! Compactly supported coupling distributions.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const REJECTION_CAP: usize = 1_000_000;

/// Distribution of the random couplings: finitely many atoms, a uniform
/// interval, or a finite mixture of either. Always bounded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum CouplingDistribution {
    Atomic {
        points: Vec<f64>,
        weights: Vec<f64>,
    },
    Uniform {
        lo: f64,
        hi: f64,
    },
    Mixture {
        children: Vec<CouplingDistribution>,
        weights: Vec<f64>,
    },
}

fn validate_weights(weights: &[f64], what: &str) -> Result<f64> {
    if weights.is_empty() {
        return Err(Error::InvalidArgument(format!("{what}: no weights given")));
    }
    let mut total = 0.0;
    for &w in weights {
        if !(w > 0.0) || !w.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "{what}: weights must be positive and finite, got {w}"
            )));
        }
        total += w;
    }
    Ok(total)
}

impl CouplingDistribution {
    /// Finitely many atoms; weights are normalized to sum to one.
    pub fn atomic(points: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if points.len() != weights.len() {
            return Err(Error::InvalidArgument(format!(
                "atomic distribution: {} points but {} weights",
                points.len(),
                weights.len()
            )));
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidArgument(
                "atomic distribution: points must be finite".into(),
            ));
        }
        let total = validate_weights(&weights, "atomic distribution")?;
        let weights = weights.iter().map(|w| w / total).collect();
        Ok(Self::Atomic { points, weights })
    }

    /// Uniform distribution on `[lo, hi]`.
    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() || !(lo < hi) {
            return Err(Error::InvalidArgument(format!(
                "uniform distribution needs finite lo < hi, got [{lo}, {hi}]"
            )));
        }
        Ok(Self::Uniform { lo, hi })
    }

    /// Finite mixture; weights are normalized to sum to one.
    pub fn mixture(children: Vec<CouplingDistribution>, weights: Vec<f64>) -> Result<Self> {
        if children.len() != weights.len() {
            return Err(Error::InvalidArgument(format!(
                "mixture: {} children but {} weights",
                children.len(),
                weights.len()
            )));
        }
        let total = validate_weights(&weights, "mixture")?;
        let weights = weights.iter().map(|w| w / total).collect();
        Ok(Self::Mixture { children, weights })
    }

    /// Re-checks the structural invariants, for values built by
    /// deserialization rather than the constructors.
    pub fn validate(&self) -> Result<()> {
        match self.clone() {
            Self::Atomic { points, weights } => {
                let rebuilt = Self::atomic(points, weights)?;
                let _ = rebuilt;
            }
            Self::Uniform { lo, hi } => {
                let _ = Self::uniform(lo, hi)?;
            }
            Self::Mixture { children, weights } => {
                for child in &children {
                    child.validate()?;
                }
                let _ = Self::mixture(children, weights)?;
            }
        }
        Ok(())
    }

    /// Infimum of the support.
    pub fn e_minus(&self) -> f64 {
        match self {
            Self::Atomic { points, .. } => points.iter().copied().fold(f64::INFINITY, f64::min),
            Self::Uniform { lo, .. } => *lo,
            Self::Mixture { children, .. } => children
                .iter()
                .map(|c| c.e_minus())
                .fold(f64::INFINITY, f64::min),
        }
    }

    /// Supremum of the support.
    pub fn e_plus(&self) -> f64 {
        match self {
            Self::Atomic { points, .. } => {
                points.iter().copied().fold(f64::NEG_INFINITY, f64::max)
            }
            Self::Uniform { hi, .. } => *hi,
            Self::Mixture { children, .. } => children
                .iter()
                .map(|c| c.e_plus())
                .fold(f64::NEG_INFINITY, f64::max),
        }
    }

    /// Sup of |support|, the worst-case coupling magnitude.
    pub fn e_infty(&self) -> f64 {
        self.e_minus().abs().max(self.e_plus().abs())
    }

    /// Whether 0 lies in the support.
    pub fn zero_in_support(&self) -> bool {
        match self {
            Self::Atomic { points, .. } => points.iter().any(|&p| p == 0.0),
            Self::Uniform { lo, hi } => *lo <= 0.0 && 0.0 <= *hi,
            Self::Mixture { children, .. } => children.iter().any(|c| c.zero_in_support()),
        }
    }

    /// Expected value.
    pub fn mean(&self) -> f64 {
        match self {
            Self::Atomic { points, weights } => points
                .iter()
                .zip(weights)
                .map(|(p, w)| p * w)
                .sum(),
            Self::Uniform { lo, hi } => 0.5 * (lo + hi),
            Self::Mixture { children, weights } => children
                .iter()
                .zip(weights)
                .map(|(c, w)| c.mean() * w)
                .sum(),
        }
    }

    /// The support as maximal disjoint closed intervals, sorted; atoms are
    /// degenerate intervals.
    pub fn support_intervals(&self) -> Vec<(f64, f64)> {
        let mut raw = Vec::new();
        self.collect_intervals(&mut raw);
        raw.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        let mut merged: Vec<(f64, f64)> = Vec::new();
        for (lo, hi) in raw {
            match merged.last_mut() {
                Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
                _ => merged.push((lo, hi)),
            }
        }
        merged
    }

    fn collect_intervals(&self, out: &mut Vec<(f64, f64)>) {
        match self {
            Self::Atomic { points, .. } => out.extend(points.iter().map(|&p| (p, p))),
            Self::Uniform { lo, hi } => out.push((*lo, *hi)),
            Self::Mixture { children, .. } => {
                for c in children {
                    c.collect_intervals(out);
                }
            }
        }
    }

    /// One draw.
    pub fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        match self {
            Self::Atomic { points, weights } => points[pick_index(weights, rng)],
            Self::Uniform { lo, hi } => lo + (hi - lo) * rng.random::<f64>(),
            Self::Mixture { children, weights } => {
                children[pick_index(weights, rng)].sample(rng)
            }
        }
    }

    /// One draw conditioned on landing in the open window
    /// `(target - halfwidth, target + halfwidth)`, by rejection. Errors if
    /// the window carries no mass (detected by exhausting the draw budget).
    pub fn sample_conditioned(
        &self,
        target: f64,
        halfwidth: f64,
        rng: &mut ChaCha8Rng,
    ) -> Result<f64> {
        if !(halfwidth > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "conditioning halfwidth must be positive, got {halfwidth}"
            )));
        }
        let mut last = f64::NAN;
        for _ in 0..REJECTION_CAP {
            let draw = self.sample(rng);
            if (draw - target).abs() < halfwidth {
                return Ok(draw);
            }
            last = draw;
        }
        Err(Error::NoConvergence {
            what: "conditioned coupling rejection sampling",
            iterations: REJECTION_CAP,
            last_value: last,
        })
    }
}

fn pick_index(weights: &[f64], rng: &mut ChaCha8Rng) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, &w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return i;
        }
    }
    weights.len() - 1
}
