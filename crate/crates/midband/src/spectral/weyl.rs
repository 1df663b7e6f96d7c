//! Windowed plane-wave witnesses: near-eigenvectors of the free operator
//! at a chosen energy, placed inside bump plateaus so the potential acts
//! on them as an exact scalar.

use crate::error::{Error, Result};
use crate::lattice::{build_laplacian, LatticeBox};
use crate::potential::{PotentialSpec, Realization};

/// A normalized windowed plane wave at energy `E`, supported in the cube
/// of halfwidth `window_halfwidth` around `center`.
#[derive(Debug, Clone)]
pub struct WeylVector {
    energy: f64,
    theta: Vec<f64>,
    window_halfwidth: i64,
    center: Vec<i64>,
    values: Vec<f64>,
    lattice: LatticeBox,
}

impl WeylVector {
    pub fn energy(&self) -> f64 {
        self.energy
    }

    /// Momentum, one angle per axis, satisfying `2 Σ cos θ_i = E`.
    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn window_halfwidth(&self) -> i64 {
        self.window_halfwidth
    }

    pub fn center(&self) -> &[i64] {
        &self.center
    }

    /// Site-indexed values over the whole box; unit `ℓ²` norm.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn lattice(&self) -> &LatticeBox {
        &self.lattice
    }

    /// `‖(Δ - E) f‖₂`, the free-operator residual of this witness.
    pub fn free_residual(&self) -> Result<f64> {
        let lap = build_laplacian(self.lattice)?;
        let image = lap.apply(&self.values);
        Ok(norm2(&residual(&image, &self.values, self.energy)))
    }
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn residual(image: &[f64], v: &[f64], shift: f64) -> Vec<f64> {
    image
        .iter()
        .zip(v.iter())
        .map(|(a, b)| a - shift * b)
        .collect()
}

/// The radial window: the same smoothstep family as the bump profile, with
/// plateau fraction 1/2, so the witness is exactly the plane wave on the
/// inner half of its cube and vanishes at the cube faces.
fn window(t: f64) -> f64 {
    if t >= 1.0 {
        0.0
    } else if t <= 0.5 {
        1.0
    } else {
        crate::smoothstep::descend((t - 0.5) / 0.5)
    }
}

/// Builds the witness `f(n) ∝ cos(θ·(n-center))·w(|n-center|₂/j)`.
///
/// `theta` defaults to the equal-angle solution `θ_i = arccos(E/2ν)`; an
/// explicit momentum is accepted as long as it sits on the energy shell.
pub fn make_weyl_vector(
    energy: f64,
    window_halfwidth: i64,
    center: &[i64],
    lattice: LatticeBox,
    theta: Option<&[f64]>,
) -> Result<WeylVector> {
    let dim = lattice.dim();
    let band = 2.0 * dim as f64;
    if !(energy.is_finite() && energy.abs() < band) {
        return Err(Error::InvalidArgument(format!(
            "energy must lie strictly inside (-{band}, {band}), got {energy}"
        )));
    }
    if window_halfwidth < 1 {
        return Err(Error::InvalidArgument(format!(
            "window halfwidth must be at least 1, got {window_halfwidth}"
        )));
    }
    if center.len() != dim {
        return Err(Error::InvalidArgument(format!(
            "center has {} coordinates on a dimension-{dim} box",
            center.len()
        )));
    }
    let half = lattice.half_side();
    for &c in center {
        if c.abs() + window_halfwidth > half {
            return Err(Error::InvalidArgument(format!(
                "window cube of halfwidth {window_halfwidth} at {center:?} leaves the box"
            )));
        }
    }
    let theta: Vec<f64> = match theta {
        Some(t) => {
            if t.len() != dim {
                return Err(Error::InvalidArgument(format!(
                    "momentum has {} angles on a dimension-{dim} box",
                    t.len()
                )));
            }
            let shell: f64 = 2.0 * t.iter().map(|a| a.cos()).sum::<f64>();
            if (shell - energy).abs() > 1e-10 {
                return Err(Error::InvalidArgument(format!(
                    "momentum is off the energy shell: 2Σcosθ = {shell}, energy = {energy}"
                )));
            }
            t.to_vec()
        }
        None => vec![(energy / band).acos(); dim],
    };

    let mut values = vec![0.0f64; lattice.site_count()];
    let j = window_halfwidth as f64;
    for (idx, site) in lattice.sites().enumerate() {
        let offset: Vec<f64> = site
            .iter()
            .zip(center.iter())
            .map(|(n, c)| (n - c) as f64)
            .collect();
        let rad = norm2(&offset);
        let w = window(rad / j);
        if w == 0.0 {
            continue;
        }
        let phase: f64 = offset.iter().zip(theta.iter()).map(|(o, t)| o * t).sum();
        values[idx] = phase.cos() * w;
    }
    let scale = norm2(&values);
    for v in &mut values {
        *v /= scale;
    }
    Ok(WeylVector {
        energy,
        theta,
        window_halfwidth,
        center: center.to_vec(),
        values,
        lattice,
    })
}

/// Largest window halfwidth any bump of `spec` can host inside `lattice`:
/// the cube must fit in the plateau ball (`j√ν ≤ ρr`) and in the box.
pub fn max_feasible_window(spec: &PotentialSpec, lattice: &LatticeBox) -> i64 {
    let rho = spec.profile().plateau_radius();
    let sqrt_dim = (spec.dim() as f64).sqrt();
    spec.sites()
        .iter()
        .map(|bump| {
            let plateau = (rho * bump.radius as f64 / sqrt_dim).floor() as i64;
            let room = lattice.half_side() - bump.center_sup_norm();
            plateau.min(room)
        })
        .max()
        .unwrap_or(0)
        .max(0)
}

/// Picks a bump whose plateau hosts a window of halfwidth `j` and returns
/// its index into `spec.sites()`.
pub fn place_weyl_window(spec: &PotentialSpec, lattice: &LatticeBox, j: i64) -> Result<usize> {
    if j < 1 {
        return Err(Error::InvalidArgument(format!(
            "window halfwidth must be at least 1, got {j}"
        )));
    }
    let rho = spec.profile().plateau_radius();
    let sqrt_dim = (spec.dim() as f64).sqrt();
    let found = spec.sites().iter().position(|bump| {
        let in_plateau = j as f64 * sqrt_dim <= rho * bump.radius as f64;
        let in_box = bump.center_sup_norm() + j <= lattice.half_side();
        in_plateau && in_box
    });
    found.ok_or(Error::Placement {
        requested: j,
        max_feasible: max_feasible_window(spec, lattice),
    })
}

/// `‖(H - (E + λr)) g‖₂` for a witness `g` sitting in a bump plateau.
///
/// On the plateau the potential multiplies `g` by exactly the bump's
/// coupling `ω`, so the result obeys the triangle bound
/// `free residual + λ|ω - r|`; the bound is asserted before returning.
pub fn weyl_residual_check(
    realization: &Realization,
    spec: &PotentialSpec,
    energy: f64,
    r_coupling: f64,
    vector: &WeylVector,
) -> Result<f64> {
    if realization.lattice() != vector.lattice() {
        return Err(Error::BoxMismatch {
            left: realization.lattice().site_count(),
            right: vector.lattice().site_count(),
        });
    }
    if !r_coupling.is_finite() {
        return Err(Error::InvalidArgument(
            "target coupling value must be finite".into(),
        ));
    }
    let rho = spec.profile().plateau_radius();
    let j = vector.window_halfwidth();
    let host = spec
        .sites()
        .iter()
        .position(|bump| {
            // Worst corner of the window cube, measured from the bump
            // center, must stay inside the plateau ball.
            let corner: f64 = bump
                .center
                .iter()
                .zip(vector.center().iter())
                .map(|(b, c)| ((c - b).abs() + j) as f64)
                .map(|d| d * d)
                .sum::<f64>()
                .sqrt();
            corner <= rho * bump.radius as f64
        })
        .ok_or_else(|| {
            Error::InvalidArgument(format!(
                "witness support (halfwidth {j} at {:?}) escapes every bump plateau",
                vector.center()
            ))
        })?;
    let coupling = realization
        .couplings()
        .get(host)
        .filter(|c| c.center == spec.sites()[host].center)
        .ok_or_else(|| {
            Error::InvalidArgument(
                "realization was not drawn from the given bump layout".into(),
            )
        })?;
    let omega = coupling.omega;

    let h = realization.hamiltonian()?;
    let image = h.apply(vector.values());
    let shift = energy + realization.lambda() * r_coupling;
    let value = norm2(&residual(&image, vector.values(), shift));

    let bound =
        vector.free_residual()? + realization.lambda() * (omega - r_coupling).abs();
    assert!(
        value <= bound + 1e-10,
        "triangle bound violated: residual {value} > {bound}"
    );
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Boundary;
    use crate::potential::{
        sample_realization, sample_realization_conditioned, BumpProfile, CouplingDistribution,
    };
    use approx::assert_abs_diff_eq;

    fn chain(half: i64) -> LatticeBox {
        LatticeBox::new(1, half, Boundary::Dirichlet).unwrap()
    }

    #[test]
    fn unit_norm_and_momentum_shell() {
        let v = make_weyl_vector(0.0, 8, &[0], chain(100), None).unwrap();
        let norm: f64 = v.values().iter().map(|x| x * x).sum::<f64>().sqrt();
        assert_abs_diff_eq!(norm, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(v.theta()[0], std::f64::consts::FRAC_PI_2, epsilon = 1e-15);
    }

    #[test]
    fn support_stays_inside_the_window_cube() {
        let v = make_weyl_vector(0.5, 6, &[10], chain(30), None).unwrap();
        for (idx, site) in v.lattice().sites().enumerate() {
            if (site[0] - 10).abs() >= 6 {
                assert_eq!(v.values()[idx], 0.0, "leak at site {}", site[0]);
            }
        }
    }

    #[test]
    fn frozen_residual_table_on_the_halfband_box() {
        // Central energies on the 201-site chain; windowed cosine waves
        // converge like 1/j with these measured values.
        for (energy, expected) in [(0.0, 0.125669), (1.5, 0.083713), (-1.5, 0.083713)] {
            let v = make_weyl_vector(energy, 32, &[0], chain(100), None).unwrap();
            assert_abs_diff_eq!(v.free_residual().unwrap(), expected, epsilon = 1e-5);
        }
    }

    #[test]
    fn residual_halves_as_the_window_doubles() {
        let mut last = f64::INFINITY;
        for j in [4, 8, 16, 32] {
            let v = make_weyl_vector(0.0, j, &[0], chain(100), None).unwrap();
            let r = v.free_residual().unwrap();
            assert!(r < 0.7 * last, "j={j}: residual {r} vs previous {last}");
            last = r;
        }
    }

    #[test]
    fn two_dimensional_residual_matches_oracle() {
        let lattice = LatticeBox::new(2, 20, Boundary::Dirichlet).unwrap();
        let v = make_weyl_vector(1.0, 8, &[0, 0], lattice, None).unwrap();
        assert_abs_diff_eq!(v.free_residual().unwrap(), 0.663334, epsilon = 1e-5);
    }

    #[test]
    fn explicit_momentum_must_sit_on_the_shell() {
        let lattice = LatticeBox::new(2, 20, Boundary::Dirichlet).unwrap();
        // Unequal angles with 2(cos θ₁ + cos θ₂) = 1.0.
        let t2 = (0.5f64 - 0.25).acos();
        let ok = make_weyl_vector(1.0, 6, &[0, 0], lattice, Some(&[(0.25f64).acos(), t2]));
        assert!(ok.is_ok());
        let bad = make_weyl_vector(1.0, 6, &[0, 0], lattice, Some(&[0.3, 0.3]));
        assert!(bad.is_err());
    }

    #[test]
    fn rejects_energy_outside_the_open_band() {
        assert!(make_weyl_vector(2.0, 4, &[0], chain(20), None).is_err());
        assert!(make_weyl_vector(-2.5, 4, &[0], chain(20), None).is_err());
    }

    #[test]
    fn rejects_windows_leaving_the_box() {
        assert!(make_weyl_vector(0.0, 15, &[10], chain(20), None).is_err());
    }

    #[test]
    fn placement_reports_the_largest_feasible_window() {
        let profile = BumpProfile::new(0.5).unwrap();
        let spec = PotentialSpec::single_bump(1, 64, profile).unwrap();
        let lattice = chain(100);
        // Plateau ball has radius 32, so 32 fits and 33 does not.
        assert_eq!(place_weyl_window(&spec, &lattice, 32).unwrap(), 0);
        match place_weyl_window(&spec, &lattice, 33) {
            Err(Error::Placement {
                requested,
                max_feasible,
            }) => {
                assert_eq!(requested, 33);
                assert_eq!(max_feasible, 32);
            }
            other => panic!("expected placement error, got {other:?}"),
        }
    }

    #[test]
    fn annular_layout_caps_the_window_by_the_box() {
        let profile = BumpProfile::new(0.5).unwrap();
        let spec = PotentialSpec::annular(1, 16, 2, profile).unwrap();
        // Bumps: radius 8 at ±24, radius 16 at ±48; plateau halves are 4
        // and 8.
        let lattice = chain(100);
        assert_eq!(max_feasible_window(&spec, &lattice), 8);
        assert_eq!(place_weyl_window(&spec, &lattice, 8).unwrap(), 2);
    }

    #[test]
    fn atomic_coupling_makes_the_residual_exactly_free() {
        let profile = BumpProfile::new(0.5).unwrap();
        let spec = PotentialSpec::single_bump(1, 64, profile).unwrap();
        let lattice = chain(100);
        let mu = CouplingDistribution::atomic(vec![1.0], vec![1.0]).unwrap();
        let real = sample_realization(&spec, &mu, 0.5, 7, &lattice).unwrap();
        let v = make_weyl_vector(0.0, 16, &[0], lattice, None).unwrap();
        let residual = weyl_residual_check(&real, &spec, 0.0, 1.0, &v).unwrap();
        // ω = r exactly, so the potential term cancels to rounding.
        assert_abs_diff_eq!(residual, v.free_residual().unwrap(), epsilon = 1e-12);
    }

    #[test]
    fn conditioned_draw_obeys_the_window_bound() {
        let profile = BumpProfile::new(0.5).unwrap();
        let spec = PotentialSpec::single_bump(1, 64, profile).unwrap();
        let lattice = chain(100);
        let mu = CouplingDistribution::uniform(-1.0, 1.0).unwrap();
        let lambda = 0.5;
        let target = 0.25;
        let real = sample_realization_conditioned(
            &spec, &mu, lambda, 3, &lattice, 0, target, 0.01,
        )
        .unwrap();
        let v = make_weyl_vector(0.0, 32, &[0], lattice, None).unwrap();
        let residual = weyl_residual_check(&real, &spec, 0.0, target, &v).unwrap();
        assert!(residual <= v.free_residual().unwrap() + lambda * 0.01 + 1e-12);
    }

    #[test]
    fn support_escaping_the_plateau_is_rejected() {
        let profile = BumpProfile::new(0.5).unwrap();
        let spec = PotentialSpec::single_bump(1, 64, profile).unwrap();
        let lattice = chain(100);
        let mu = CouplingDistribution::atomic(vec![1.0], vec![1.0]).unwrap();
        let real = sample_realization(&spec, &mu, 0.5, 7, &lattice).unwrap();
        // Halfwidth 40 spills past the plateau ball of radius 32.
        let v = make_weyl_vector(0.0, 40, &[0], lattice, None).unwrap();
        assert!(weyl_residual_check(&real, &spec, 0.0, 1.0, &v).is_err());
    }
}
