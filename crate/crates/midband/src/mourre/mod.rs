//! Positive-commutator machinery: smooth spectral cutoffs, functional
//! calculus, the disorder-linearity bound with its explicit constant, the
//! momentum-torus positivity scan, and the boundary-filtered estimate with
//! its disorder-threshold sweep.

mod cutoff;
mod estimate;
mod lemma1;
mod torus;

pub use cutoff::{build_cutoff, CutoffFunction};
pub use estimate::{
    lambda_threshold_scan, mourre_check, projected_min_eigenvalue, MourreCheck, MourreReport,
    MourreRow, MourreSide, GRAM_KEEP_TOL,
};
pub use lemma1::{lemma1_check, Lemma1Row};
pub use torus::{torus_scan, TorusScanResult, TORUS_SCAN_MAX_DIM, TORUS_SCAN_MIN_GRID};

use crate::error::Result;
use crate::lattice::{EigenSystem, LatticeOperator};

/// Applies a cutoff through the spectral theorem: `ψ(H) = V ψ(Λ) Vᵀ`.
///
/// The result is symmetric with norm at most 1, since `0 ≤ ψ ≤ 1`.
pub fn apply_function(eigen: &EigenSystem, psi: &CutoffFunction) -> Result<LatticeOperator> {
    eigen.synthesize(|x| psi.value(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{
        build_laplacian, eigendecompose, operator_norm, Boundary, LatticeBox,
    };

    #[test]
    fn plateau_everywhere_gives_identity() {
        let lattice = LatticeBox::new(1, 6, Boundary::Dirichlet).unwrap();
        let h = build_laplacian(lattice).unwrap().scale(0.1);
        let eigen = eigendecompose(&h).unwrap();
        // Spectrum of 0.1Δ sits inside [-0.2, 0.2], the cutoff plateau.
        let psi = build_cutoff(-0.5, 0.5).unwrap();
        let applied = apply_function(&eigen, &psi).unwrap();
        let diff = applied
            .add_scaled(&LatticeOperator::identity(lattice), -1.0)
            .unwrap();
        assert!(operator_norm(&diff, 1e-12).unwrap() <= 1e-10);
    }

    #[test]
    fn plateau_rank_matches_eigenvalue_count() {
        let lattice = LatticeBox::new(1, 50, Boundary::Dirichlet).unwrap();
        let h = build_laplacian(lattice).unwrap();
        let eigen = eigendecompose(&h).unwrap();
        let psi = build_cutoff(-0.5, 0.5).unwrap();
        // Chain eigenvalues are 2cos(kπ/102); count those with magnitude
        // at most 0.5 in closed form and compare.
        let n = lattice.site_count() as f64;
        let expected = (1..=lattice.site_count())
            .filter(|&k| (2.0 * (k as f64 * std::f64::consts::PI / (n + 1.0)).cos()).abs() <= 0.5)
            .count();
        assert_eq!(eigen.indices_in(-0.5, 0.5).len(), expected);
        // Those eigenvectors sit on the plateau, so ψ(H) fixes them.
        let applied = apply_function(&eigen, &psi).unwrap();
        for k in eigen.indices_in(-0.5, 0.5) {
            let v = eigen.eigenvector(k);
            let image = applied.apply(v.as_slice());
            let err: f64 = image
                .iter()
                .zip(v.iter())
                .map(|(a, b)| (a - b).powi(2))
                .sum::<f64>()
                .sqrt();
            assert!(err <= 1e-10, "eigenvector {k} moved by {err}");
        }
    }

    #[test]
    fn applied_cutoff_is_a_contraction() {
        let lattice = LatticeBox::new(2, 4, Boundary::Dirichlet).unwrap();
        let h = build_laplacian(lattice).unwrap();
        let eigen = eigendecompose(&h).unwrap();
        let psi = build_cutoff(-1.0, 0.25).unwrap();
        let applied = apply_function(&eigen, &psi).unwrap();
        assert!(operator_norm(&applied, 1e-12).unwrap() <= 1.0 + 1e-10);
    }
}
