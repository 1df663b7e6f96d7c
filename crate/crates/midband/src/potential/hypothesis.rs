//! Structural checks on a bump layout: value range, support disjointness,
//! plateau coverage, and uniformity of conjugate-operator commutator norms.

use crate::error::Result;
use crate::lattice::{build_conjugate, commutator, operator_norm, LatticeBox};
use crate::potential::PotentialSpec;

/// Checks aggregated per dyadic shell (all bumps of one shell share radius
/// and center norm; reported norms are the worst over the shell's bumps).
#[derive(Debug, Clone)]
pub struct AnnulusCheck {
    pub annulus: usize,
    pub center_sup_norm: i64,
    pub radius: i64,
    /// Every site of the sup-norm cube of half side `ceil(sqrt(center
    /// norm))` around each center carries bump value exactly 1.
    pub plateau_ok: bool,
    /// Worst `‖[A, phi]‖` over the shell's bumps.
    pub comm_norm: f64,
    /// Worst `‖[A, [A, phi]]‖` over the shell's bumps.
    pub comm2_norm: f64,
    /// Scale-free bound `2 c² (mixed + pure)` with `c` the largest
    /// `|site|∞ / radius` over the bump support and `(mixed, pure)` the
    /// second-partial sups of the profile.
    pub comm2_bound: f64,
    pub comm2_ok: bool,
}

/// Result of [`check_hypothesis`]; failures are flags, not errors.
#[derive(Debug, Clone)]
pub struct HypothesisReport {
    /// All bump values lie in [0, 1].
    pub range_ok: bool,
    /// No lattice site carries positive values from two different bumps.
    pub supports_disjoint: bool,
    /// Center sup-norm beyond which the plateau condition holds
    /// automatically: `16 dim / rho²`.
    pub plateau_threshold_sup_norm: f64,
    pub shells: Vec<AnnulusCheck>,
    /// Running sup over shells of `‖[A, phi]‖`.
    pub comm_norm_sup: f64,
    /// Largest over smallest shell commutator norm; `None` without shells.
    pub comm_ratio: Option<f64>,
    /// The ratio stays within the uniformity budget of 4.
    pub comm_ratio_ok: bool,
    pub all_ok: bool,
}

/// Runs every structural check of the bump layout on the given box.
///
/// `commut_tol` is the relative tolerance handed to the operator-norm
/// computations. The box must be Dirichlet and contain all bump cubes.
pub fn check_hypothesis(
    spec: &PotentialSpec,
    lattice: &LatticeBox,
    commut_tol: f64,
) -> Result<HypothesisReport> {
    spec.check_box(lattice)?;
    let rho = spec.profile().plateau_radius();
    let plateau_threshold_sup_norm = 16.0 * spec.dim() as f64 / (rho * rho);

    let mut range_ok = true;
    let mut owner: Vec<Option<usize>> = vec![None; lattice.site_count()];
    let mut supports_disjoint = true;

    let conj = build_conjugate(*lattice)?;
    let (mixed, pure) = spec.profile().second_partial_sups(spec.dim());

    struct PerBump {
        annulus: usize,
        center_sup_norm: i64,
        radius: i64,
        plateau_ok: bool,
        comm_norm: f64,
        comm2_norm: f64,
        comm2_bound: f64,
    }
    let mut per_bump = Vec::with_capacity(spec.sites().len());

    for (i, bump) in spec.sites().iter().enumerate() {
        let phi = spec.bump_diagonal(i, lattice)?;
        let mut c_ratio = 0.0f64;
        for idx in 0..lattice.site_count() {
            let v = phi.entry(idx, idx);
            if v == 0.0 {
                continue;
            }
            if !(0.0..=1.0).contains(&v) {
                range_ok = false;
            }
            match owner[idx] {
                Some(prev) if prev != i => supports_disjoint = false,
                _ => owner[idx] = Some(i),
            }
            let site_sup = lattice
                .site_of(idx)
                .iter()
                .map(|c| c.abs())
                .max()
                .unwrap_or(0);
            c_ratio = c_ratio.max(site_sup as f64 / bump.radius as f64);
        }

        let plateau_ok = plateau_holds(spec, i, lattice);
        let comm = commutator(&conj, &phi)?;
        let comm_norm = operator_norm(&comm, commut_tol)?;
        let comm2 = commutator(&conj, &comm)?;
        let comm2_norm = operator_norm(&comm2, commut_tol)?;
        let comm2_bound = 2.0 * c_ratio * c_ratio * (mixed + pure);

        per_bump.push(PerBump {
            annulus: bump.annulus,
            center_sup_norm: bump.center_sup_norm(),
            radius: bump.radius,
            plateau_ok,
            comm_norm,
            comm2_norm,
            comm2_bound,
        });
    }

    let mut shells: Vec<AnnulusCheck> = Vec::new();
    for pb in &per_bump {
        match shells.iter_mut().find(|s| s.annulus == pb.annulus) {
            Some(shell) => {
                shell.plateau_ok &= pb.plateau_ok;
                shell.comm_norm = shell.comm_norm.max(pb.comm_norm);
                shell.comm2_norm = shell.comm2_norm.max(pb.comm2_norm);
                shell.comm2_bound = shell.comm2_bound.max(pb.comm2_bound);
            }
            None => shells.push(AnnulusCheck {
                annulus: pb.annulus,
                center_sup_norm: pb.center_sup_norm,
                radius: pb.radius,
                plateau_ok: pb.plateau_ok,
                comm_norm: pb.comm_norm,
                comm2_norm: pb.comm2_norm,
                comm2_bound: pb.comm2_bound,
                comm2_ok: true,
            }),
        }
    }
    shells.sort_by_key(|s| s.annulus);
    for s in &mut shells {
        s.comm2_ok = s.comm2_norm <= s.comm2_bound;
    }

    let comm_norm_sup = shells.iter().fold(0.0f64, |m, s| m.max(s.comm_norm));
    let comm_ratio = if shells.is_empty() {
        None
    } else {
        let min = shells.iter().fold(f64::INFINITY, |m, s| m.min(s.comm_norm));
        Some(if min > 0.0 { comm_norm_sup / min } else { f64::INFINITY })
    };
    let comm_ratio_ok = comm_ratio.map_or(true, |r| r <= 4.0);

    let all_ok = range_ok
        && supports_disjoint
        && shells.iter().all(|s| s.plateau_ok && s.comm2_ok)
        && comm_ratio_ok;

    Ok(HypothesisReport {
        range_ok,
        supports_disjoint,
        plateau_threshold_sup_norm,
        shells,
        comm_norm_sup,
        comm_ratio,
        comm_ratio_ok,
        all_ok,
    })
}

/// Sitewise plateau check: every site of the cube of half side
/// `ceil(sqrt(|center|∞))` around the center must have bump value exactly 1.
/// The cube corner realizes the largest Euclidean radius, so this is
/// equivalent to `sqrt(dim) * halfside <= rho * radius`.
fn plateau_holds(spec: &PotentialSpec, site_index: usize, lattice: &LatticeBox) -> bool {
    let bump = &spec.sites()[site_index];
    let s = (bump.center_sup_norm() as f64).sqrt().ceil() as i64;
    if s > bump.radius {
        return false;
    }
    let r = bump.radius as f64;
    let mut ok = true;
    super::for_each_cube_site(lattice, &bump.center, s, |_, offset| {
        let x: Vec<f64> = offset.iter().map(|&c| c as f64 / r).collect();
        if spec.profile().value(&x) != 1.0 {
            ok = false;
        }
    });
    ok
}
