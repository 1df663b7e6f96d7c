//! Dense eigendecomposition for symmetric operators, plus functional calculus.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::lattice::{LatticeBox, LatticeOperator, Symmetry};

/// Largest site count accepted by [`eigendecompose`]. Bigger boxes only get
/// the iterative norm; a full spectrum there is out of desk-scale budget.
pub const DENSE_EIGEN_CAP: usize = 4096;

/// Full orthonormal eigensystem of a symmetric operator.
///
/// Eigenvalues are sorted ascending; column `k` of `eigenvectors` belongs to
/// `eigenvalues[k]`.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<f64>,
    lattice: LatticeBox,
}

impl EigenSystem {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.eigenvectors
    }

    pub fn lattice(&self) -> &LatticeBox {
        &self.lattice
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Eigenvector for the `k`-th ascending eigenvalue.
    pub fn eigenvector(&self, k: usize) -> DVector<f64> {
        self.eigenvectors.column(k).into_owned()
    }

    /// Indices of eigenvalues inside the closed interval `[a, b]`.
    pub fn indices_in(&self, a: f64, b: f64) -> Vec<usize> {
        self.eigenvalues
            .iter()
            .enumerate()
            .filter(|(_, &l)| a <= l && l <= b)
            .map(|(k, _)| k)
            .collect()
    }

    /// Applies a scalar function through the spectral theorem:
    /// returns `V f(Lambda) Vᵀ` as a symmetric operator.
    pub fn synthesize(&self, f: impl Fn(f64) -> f64) -> Result<LatticeOperator> {
        let n = self.len();
        let mut scaled = self.eigenvectors.clone();
        for k in 0..n {
            let fv = f(self.eigenvalues[k]);
            scaled.column_mut(k).scale_mut(fv);
        }
        // (V f(Lambda)) Vᵀ sums identical products in identical order for the
        // (i, j) and (j, i) entries, so the result is exactly symmetric.
        let dense = scaled * self.eigenvectors.transpose();
        LatticeOperator::from_dense(self.lattice, &dense, Symmetry::Symmetric)
    }

    /// Worst residual `max_k ‖Hv_k - lambda_k v_k‖₂`, for diagnostics.
    pub fn max_residual(&self, h: &LatticeOperator) -> f64 {
        let mut worst = 0.0f64;
        for k in 0..self.len() {
            let v = self.eigenvector(k);
            let hv = h.apply(v.as_slice());
            let res: f64 = hv
                .iter()
                .zip(v.iter())
                .map(|(a, b)| (a - self.eigenvalues[k] * b).powi(2))
                .sum::<f64>()
                .sqrt();
            worst = worst.max(res);
        }
        worst
    }
}

/// Full dense eigendecomposition of a symmetric operator.
///
/// Requires the `Symmetric` tag (the solver exploits it and the result is
/// meaningless otherwise) and at most [`DENSE_EIGEN_CAP`] sites.
pub fn eigendecompose(h: &LatticeOperator) -> Result<EigenSystem> {
    if h.symmetry() != Symmetry::Symmetric {
        return Err(Error::InvalidArgument(
            "eigendecomposition requires an operator tagged Symmetric".into(),
        ));
    }
    let n = h.site_count();
    if n > DENSE_EIGEN_CAP {
        return Err(Error::CapacityExceeded {
            what: "sites for dense eigendecomposition",
            got: n,
            cap: DENSE_EIGEN_CAP,
        });
    }
    let eig = h.to_dense().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut eigenvectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        eigenvectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    Ok(EigenSystem {
        eigenvalues,
        eigenvectors,
        lattice: *h.lattice(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_laplacian, Boundary};

    #[test]
    fn diagonal_matrix_decomposes_to_itself() {
        let b = LatticeBox::new(1, 1, Boundary::Dirichlet).unwrap();
        let d = LatticeOperator::diagonal(b, &[2.0, 3.0, 1.0]).unwrap();
        let sys = eigendecompose(&d).unwrap();
        assert_eq!(sys.eigenvalues(), &[1.0, 2.0, 3.0]);
        for (k, expect_site) in [(0, 2usize), (1, 0usize), (2, 1usize)] {
            let v = sys.eigenvector(k);
            assert!((v[expect_site].abs() - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn dirichlet_chain_matches_closed_form_cosines() {
        let n_sites = 11usize;
        let b = LatticeBox::new(1, 5, Boundary::Dirichlet).unwrap();
        let lap = build_laplacian(b).unwrap();
        let sys = eigendecompose(&lap).unwrap();
        let mut expected: Vec<f64> = (1..=n_sites)
            .map(|k| 2.0 * (k as f64 * std::f64::consts::PI / (n_sites as f64 + 1.0)).cos())
            .collect();
        expected.sort_by(f64::total_cmp);
        for (got, want) in sys.eigenvalues().iter().zip(&expected) {
            assert!((got - want).abs() <= 1e-10, "{got} vs {want}");
        }
    }

    #[test]
    fn periodic_ring_matches_closed_form_cosines() {
        let b = LatticeBox::new(1, 2, Boundary::Periodic).unwrap();
        let lap = build_laplacian(b).unwrap();
        let sys = eigendecompose(&lap).unwrap();
        let mut expected: Vec<f64> = (0..5)
            .map(|j| 2.0 * (2.0 * std::f64::consts::PI * j as f64 / 5.0).cos())
            .collect();
        expected.sort_by(f64::total_cmp);
        for (got, want) in sys.eigenvalues().iter().zip(&expected) {
            assert!((got - want).abs() <= 1e-12, "{got} vs {want}");
        }
    }

    #[test]
    fn eigensystem_invariants_hold_on_a_laplacian() {
        let b = LatticeBox::new(2, 3, Boundary::Dirichlet).unwrap();
        let lap = build_laplacian(b).unwrap();
        let sys = eigendecompose(&lap).unwrap();
        assert!(sys
            .eigenvalues()
            .windows(2)
            .all(|w| w[0] <= w[1]));
        assert!(sys.max_residual(&lap) <= 1e-8 * 4.0);
        let v = sys.eigenvectors();
        let gram = v.transpose() * v;
        let n = sys.len();
        for i in 0..n {
            for j in 0..n {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((gram[(i, j)] - want).abs() <= 1e-8);
            }
        }
    }

    #[test]
    fn synthesize_identity_function_reconstructs_operator() {
        let b = LatticeBox::new(1, 4, Boundary::Dirichlet).unwrap();
        let lap = build_laplacian(b).unwrap();
        let sys = eigendecompose(&lap).unwrap();
        let rebuilt = sys.synthesize(|x| x).unwrap();
        let diff = rebuilt.add_scaled(&lap, -1.0).unwrap();
        assert!(diff.max_abs_entry() <= 1e-10);
    }

    #[test]
    fn synthesize_indicator_gives_projection() {
        let b = LatticeBox::new(1, 4, Boundary::Dirichlet).unwrap();
        let lap = build_laplacian(b).unwrap();
        let sys = eigendecompose(&lap).unwrap();
        let p = sys
            .synthesize(|x| if x.abs() <= 1.0 { 1.0 } else { 0.0 })
            .unwrap();
        let p2 = p.matmul(&p).unwrap();
        let diff = p2.add_scaled(&p, -1.0).unwrap();
        assert!(diff.max_abs_entry() <= 1e-10);
    }

    #[test]
    fn non_symmetric_tag_is_rejected() {
        let b = LatticeBox::new(1, 1, Boundary::Dirichlet).unwrap();
        let m =
            LatticeOperator::from_triplets(b, vec![(0, 1, 1.0)], Symmetry::General).unwrap();
        assert!(matches!(
            eigendecompose(&m),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn capacity_cap_is_enforced() {
        let b = LatticeBox::new(1, 2100, Boundary::Dirichlet).unwrap();
        let id = LatticeOperator::identity(b);
        assert!(matches!(
            eigendecompose(&id),
            Err(Error::CapacityExceeded { .. })
        ));
    }
}
