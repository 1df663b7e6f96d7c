//! Radial plateau bump profile.

use crate::error::{Error, Result};
use crate::smoothstep;

/// C² radial bump on ℝ^ν: exactly 1 inside radius `plateau_radius`, a
/// quintic smoothstep descent on `(plateau_radius, 1)`, exactly 0 from
/// radius 1 outward. Radii use the Euclidean norm.
#[derive(Debug, Clone, Copy)]
pub struct BumpProfile {
    plateau_radius: f64,
    sup_abs_d1: f64,
    sup_abs_d2: f64,
}

impl BumpProfile {
    pub fn new(plateau_radius: f64) -> Result<Self> {
        if !(plateau_radius > 0.0 && plateau_radius < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "plateau radius must lie in (0, 1), got {plateau_radius}"
            )));
        }
        let w = 1.0 - plateau_radius;
        Ok(Self {
            plateau_radius,
            sup_abs_d1: smoothstep::SUP_ABS_D1 / w,
            sup_abs_d2: smoothstep::SUP_ABS_D2 / (w * w),
        })
    }

    pub fn plateau_radius(&self) -> f64 {
        self.plateau_radius
    }

    /// Analytic sup of the first radial derivative, `15 / (8(1-ρ))`.
    pub fn sup_abs_d1(&self) -> f64 {
        self.sup_abs_d1
    }

    /// Analytic sup of the second radial derivative, `10 / (√3 (1-ρ)²)`.
    pub fn sup_abs_d2(&self) -> f64 {
        self.sup_abs_d2
    }

    /// Profile as a function of the radius `t >= 0`.
    pub fn radial(&self, t: f64) -> f64 {
        smoothstep::descend((t - self.plateau_radius) / (1.0 - self.plateau_radius))
    }

    /// First derivative of [`Self::radial`].
    pub fn radial_d1(&self, t: f64) -> f64 {
        let w = 1.0 - self.plateau_radius;
        smoothstep::descend_d1((t - self.plateau_radius) / w) / w
    }

    /// Second derivative of [`Self::radial`].
    pub fn radial_d2(&self, t: f64) -> f64 {
        let w = 1.0 - self.plateau_radius;
        smoothstep::descend_d2((t - self.plateau_radius) / w) / (w * w)
    }

    /// Bump value at a point of ℝ^ν.
    pub fn value(&self, x: &[f64]) -> f64 {
        let t = x.iter().map(|c| c * c).sum::<f64>().sqrt();
        self.radial(t)
    }

    /// Sup norms of the second partial derivatives of `x ↦ radial(|x|₂)`:
    /// `(mixed, pure)` where `mixed` bounds every `∂_i∂_j, i ≠ j` and `pure`
    /// every `∂_i²`. In one dimension there are no mixed partials and both
    /// slots carry the pure bound.
    ///
    /// For a radial function f(x) = h(|x|), with t = |x| and unit direction u:
    /// `∂_i∂_j f = h'' u_i u_j + (h'/t)(δ_ij - u_i u_j)`, so off-diagonal
    /// entries are bounded by `sup ½|h'' - h'/t|` (since `|u_i u_j| ≤ ½`) and
    /// diagonal ones by the larger of `sup|h''|` and `sup|h'/t|` (a convex
    /// combination runs between its endpoints). Sups come from a dense grid
    /// scan of the analytic derivatives.
    pub fn second_partial_sups(&self, dim: usize) -> (f64, f64) {
        if dim == 1 {
            return (self.sup_abs_d2, self.sup_abs_d2);
        }
        let steps = 200_000;
        let mut mixed = 0.0f64;
        let mut pure = 0.0f64;
        for k in 1..=steps {
            let t = k as f64 / steps as f64;
            let d1_over_t = self.radial_d1(t) / t;
            let d2 = self.radial_d2(t);
            mixed = mixed.max(0.5 * (d2 - d1_over_t).abs());
            pure = pure.max(d2.abs()).max(d1_over_t.abs());
        }
        (mixed, pure)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_out_of_range_plateau() {
        assert!(BumpProfile::new(0.0).is_err());
        assert!(BumpProfile::new(1.0).is_err());
        assert!(BumpProfile::new(-0.5).is_err());
        assert!(BumpProfile::new(f64::NAN).is_err());
    }

    #[test]
    fn origin_is_one_and_unit_sphere_is_zero() {
        let p = BumpProfile::new(0.5).unwrap();
        assert_eq!(p.value(&[0.0, 0.0]), 1.0);
        assert_eq!(p.value(&[1.0, 0.0]), 0.0);
        assert_eq!(p.value(&[0.6, 0.8]), 0.0);
        assert_eq!(p.value(&[2.0]), 0.0);
    }

    #[test]
    fn plateau_is_exactly_one() {
        let p = BumpProfile::new(0.5).unwrap();
        assert_eq!(p.radial(0.25), 1.0);
        assert_eq!(p.radial(0.5), 1.0);
        assert_eq!(p.value(&[0.3, 0.4]), 1.0);
    }

    #[test]
    fn flank_midpoint_is_half() {
        for rho in [0.25, 0.5, 0.75] {
            let p = BumpProfile::new(rho).unwrap();
            let mid = (rho + 1.0) / 2.0;
            assert!((p.radial(mid) - 0.5).abs() <= 1e-15);
        }
    }

    #[test]
    fn radially_non_increasing_within_unit_interval() {
        let p = BumpProfile::new(0.5).unwrap();
        let mut prev = p.radial(0.0);
        for k in 1..=2000 {
            let t = k as f64 * 1.2 / 2000.0;
            let cur = p.radial(t);
            assert!(cur <= prev + 1e-15);
            prev = cur;
        }
    }

    #[test]
    fn analytic_derivative_bounds_dominate_grid_maxima() {
        for rho in [0.3, 0.5, 0.7] {
            let p = BumpProfile::new(rho).unwrap();
            let mut max1 = 0.0f64;
            let mut max2 = 0.0f64;
            for k in 0..=100_000 {
                let t = k as f64 * 1.1 / 100_000.0;
                max1 = max1.max(p.radial_d1(t).abs());
                max2 = max2.max(p.radial_d2(t).abs());
            }
            assert!(max1 <= p.sup_abs_d1() + 1e-12);
            assert!(max1 >= p.sup_abs_d1() - 1e-4 * p.sup_abs_d1());
            assert!(max2 <= p.sup_abs_d2() + 1e-12);
            assert!(max2 >= p.sup_abs_d2() - 1e-4 * p.sup_abs_d2());
        }
    }

    #[test]
    fn half_plateau_second_derivative_sup_is_forty_over_root_three() {
        let p = BumpProfile::new(0.5).unwrap();
        assert!((p.sup_abs_d2() - 23.094010767585033).abs() <= 1e-12);
        assert!((p.sup_abs_d1() - 3.75).abs() <= 1e-15);
    }

    #[test]
    fn second_partial_sups_collapse_in_one_dimension() {
        let p = BumpProfile::new(0.5).unwrap();
        let (mixed, pure) = p.second_partial_sups(1);
        assert_eq!(mixed, p.sup_abs_d2());
        assert_eq!(pure, p.sup_abs_d2());
    }

    #[test]
    fn second_partial_sups_in_higher_dimension() {
        let p = BumpProfile::new(0.5).unwrap();
        let (mixed, pure) = p.second_partial_sups(2);
        // The diagonal bound is still dominated by |h''|; the mixed bound is
        // strictly smaller than the pure one for this profile.
        assert!((pure - p.sup_abs_d2()).abs() <= 1e-6 * p.sup_abs_d2());
        assert!(mixed > 0.0 && mixed < pure);
    }
}
