//! Exhaustive momentum-torus scan behind the positivity constant.
//!
//! On the torus the free Hamiltonian has symbol `2 Σ cos θ_i` and the
//! positive commutator has symbol `4 Σ sin² θ_i`. The scan minimizes the
//! latter over the region `W = {|Σ cos θ_i| < 1 - δ/2}` where the cutoff
//! can be nonzero, and compares against the target `3δ`.

use crate::error::{Error, Result};

/// Maximum dimension the exhaustive scan accepts; `grid^dim` points.
pub const TORUS_SCAN_MAX_DIM: usize = 3;

/// Minimum grid resolution per axis.
pub const TORUS_SCAN_MIN_GRID: usize = 64;

#[derive(Debug, Clone)]
pub struct TorusScanResult {
    pub dim: usize,
    pub delta: f64,
    pub grid: usize,
    /// Minimum of `4 Σ sin² θ_i` over grid points inside `W`.
    pub min_value: f64,
    /// Angles (in radians, in `[0, 2π)`) where the minimum is attained;
    /// first hit in lexicographic grid order.
    pub argmin: Vec<f64>,
    /// The target `3δ`.
    pub bound_3delta: f64,
    /// `min_value ≥ 3δ (1 - 2π dim / grid)`: the target holds up to
    /// grid-resolution slack.
    pub pass: bool,
}

/// Scans the full grid `{2π m / grid}^dim` restricted to `W`.
pub fn torus_scan(dim: usize, delta: f64, grid: usize) -> Result<TorusScanResult> {
    if dim == 0 || dim > TORUS_SCAN_MAX_DIM {
        return Err(Error::CapacityExceeded {
            what: "dimension for exhaustive torus scan",
            got: dim,
            cap: TORUS_SCAN_MAX_DIM,
        });
    }
    if grid < TORUS_SCAN_MIN_GRID {
        return Err(Error::InvalidArgument(format!(
            "torus grid must have at least {TORUS_SCAN_MIN_GRID} points per axis, got {grid}"
        )));
    }
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "delta must lie in (0, 1], got {delta}"
        )));
    }

    let angles: Vec<f64> = (0..grid)
        .map(|m| 2.0 * std::f64::consts::PI * m as f64 / grid as f64)
        .collect();
    let cos: Vec<f64> = angles.iter().map(|t| t.cos()).collect();
    let sin2: Vec<f64> = angles.iter().map(|t| t.sin() * t.sin()).collect();
    let window = 1.0 - delta / 2.0;

    let mut min_value = f64::INFINITY;
    let mut argmin_idx: Vec<usize> = Vec::new();
    let mut idx = vec![0usize; dim];
    loop {
        let cos_sum: f64 = idx.iter().map(|&m| cos[m]).sum();
        if cos_sum.abs() < window {
            let value: f64 = 4.0 * idx.iter().map(|&m| sin2[m]).sum::<f64>();
            if value < min_value {
                min_value = value;
                argmin_idx = idx.clone();
            }
        }
        // Odometer increment, last axis fastest, so the first minimum hit is
        // the lexicographically smallest argmin.
        let mut axis = dim;
        loop {
            if axis == 0 {
                let bound_3delta = 3.0 * delta;
                let slack = 1.0 - 2.0 * std::f64::consts::PI * dim as f64 / grid as f64;
                let pass = min_value >= bound_3delta * slack;
                return Ok(TorusScanResult {
                    dim,
                    delta,
                    grid,
                    min_value,
                    argmin: argmin_idx.iter().map(|&m| angles[m]).collect(),
                    bound_3delta,
                    pass,
                });
            }
            axis -= 1;
            idx[axis] += 1;
            if idx[axis] < grid {
                break;
            }
            idx[axis] = 0;
        }
    }
}
