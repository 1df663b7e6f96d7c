//! Smooth energy cutoffs pinned inside the free spectral band.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::smoothstep;

const QUADRATURE_START_LOG2: u32 = 14;
const QUADRATURE_MAX_LOG2: u32 = 20;
const QUADRATURE_REL_TOL: f64 = 5e-4;

/// C² cutoff adapted to an interval `[a, b]` strictly inside `(-2, 2)`:
/// exactly 1 on `[a, b]`, smoothstep flanks of width `s`, exactly 0 outside
/// `[a - s, b + s]`, which by construction sits strictly inside
/// `(-2 + delta, 2 - delta)` with `delta = min(1 + a/2, 1 - b/2)`.
#[derive(Debug, Clone)]
pub struct CutoffFunction {
    a: f64,
    b: f64,
    delta: f64,
    flank: f64,
    fourier_factor: f64,
}

impl CutoffFunction {
    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// Distance budget `delta = min(1 + a/2, 1 - b/2)`, in (0, 1).
    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Width of each smoothstep flank.
    pub fn flank(&self) -> f64 {
        self.flank
    }

    /// The closed support `[a - s, b + s]`.
    pub fn support(&self) -> (f64, f64) {
        (self.a - self.flank, self.b + self.flank)
    }

    /// Self-convergent quadrature value of `∫ |t| |ψ̂(t)| dt` (with the
    /// normalization `ψ̂(t) = (1/2π) ∫ ψ(x) e^{-itx} dx`). Scale-free: the
    /// coupling-strength bound multiplies this by the distribution's sup.
    pub fn fourier_factor(&self) -> f64 {
        self.fourier_factor
    }

    /// Cutoff value at energy `x`.
    pub fn value(&self, x: f64) -> f64 {
        if x >= self.a && x <= self.b {
            1.0
        } else if x < self.a {
            smoothstep::descend((self.a - x) / self.flank)
        } else {
            smoothstep::descend((x - self.b) / self.flank)
        }
    }
}

/// Builds the cutoff for `[a, b] ⊂ (-2, 2)` and computes its Fourier factor.
pub fn build_cutoff(a: f64, b: f64) -> Result<CutoffFunction> {
    if !a.is_finite() || !b.is_finite() || !(-2.0 < a && a < b && b < 2.0) {
        return Err(Error::InvalidArgument(format!(
            "cutoff interval must satisfy -2 < a < b < 2, got [{a}, {b}]"
        )));
    }
    let delta = (1.0 + a / 2.0).min(1.0 - b / 2.0);
    let gap_lo = a - (-2.0 + delta);
    let gap_hi = (2.0 - delta) - b;
    let flank = 0.5 * gap_lo.min(gap_hi);
    let mut cutoff = CutoffFunction {
        a,
        b,
        delta,
        flank,
        fourier_factor: 0.0,
    };
    cutoff.fourier_factor = converged_fourier_factor(&cutoff)?;
    Ok(cutoff)
}

/// `∫ |t| |ψ̂(t)| dt` by FFT on `[-4, 4)`, doubling the sample count until
/// two consecutive values agree to three significant digits.
fn converged_fourier_factor(cutoff: &CutoffFunction) -> Result<f64> {
    let mut prev = fourier_factor_at(cutoff, 1usize << QUADRATURE_START_LOG2);
    for log2 in (QUADRATURE_START_LOG2 + 1)..=QUADRATURE_MAX_LOG2 {
        let next = fourier_factor_at(cutoff, 1usize << log2);
        if (next - prev).abs() <= QUADRATURE_REL_TOL * next.abs() {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::NoConvergence {
        what: "cutoff Fourier-factor quadrature",
        iterations: (QUADRATURE_MAX_LOG2 - QUADRATURE_START_LOG2) as usize,
        last_value: prev,
    })
}

fn fourier_factor_at(cutoff: &CutoffFunction, n: usize) -> f64 {
    let width = 8.0;
    let dx = width / n as f64;
    let mut buf: Vec<Complex<f64>> = (0..n)
        .map(|j| Complex::new(cutoff.value(-4.0 + j as f64 * dx), 0.0))
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    // Bin k of the DFT sits at frequency t_k = 2π k' / width with k' the
    // signed index; |ψ̂(t_k)| = (dx / 2π) |X_k|, and the t-grid spacing is
    // 2π / width, so the quadrature is a plain Riemann sum over all bins.
    let dt = 2.0 * std::f64::consts::PI / width;
    let scale = dx / (2.0 * std::f64::consts::PI);
    let mut integral = 0.0;
    for (k, x) in buf.iter().enumerate() {
        let signed = if k <= n / 2 {
            k as i64
        } else {
            k as i64 - n as i64
        };
        let t = dt * signed as f64;
        integral += t.abs() * scale * x.norm() * dt;
    }
    integral
}
