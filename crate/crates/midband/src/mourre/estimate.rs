//! Positive-commutator check on a finite box and the disorder threshold
//! scan built on top of it.
//!
//! The check compresses `[A, H]` to the span of the eigenvectors of `H`
//! with eigenvalue in the cutoff interval. The truncated conjugate operator
//! is wrong near the box edge, so alongside the raw compression a filtered
//! one is reported: eigenvectors carrying more than `mass_cutoff` of their
//! weight within `collar_width` sites of the boundary have those entries
//! zeroed, and the truncated family is reorthonormalized through its Gram
//! matrix before compressing.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::{
    build_conjugate, commutator, eigendecompose, EigenSystem, LatticeBox, LatticeOperator,
    Symmetry,
};
use crate::mourre::CutoffFunction;
use crate::potential::{CouplingDistribution, PotentialModel};

/// Gram eigenvalues at or below this are treated as numerically dependent
/// directions and dropped during reorthonormalization.
pub const GRAM_KEEP_TOL: f64 = 1e-8;

/// One side (raw or boundary-filtered) of a positivity check.
#[derive(Debug, Clone, Copy)]
pub struct MourreSide {
    /// Dimension of the compressed space.
    pub rank: usize,
    /// Smallest eigenvalue of the compressed commutator; `None` when the
    /// compression is zero-dimensional.
    pub min_eig: Option<f64>,
}

impl MourreSide {
    /// `min_eig - target`, the slack against a positivity target.
    pub fn margin(&self, target: f64) -> Option<f64> {
        self.min_eig.map(|m| m - target)
    }
}

/// Raw and boundary-filtered compressions for one Hamiltonian.
#[derive(Debug, Clone, Copy)]
pub struct MourreCheck {
    pub unfiltered: MourreSide,
    pub filtered: MourreSide,
}

/// One `(λ, seed)` entry of a threshold scan.
#[derive(Debug, Clone)]
pub struct MourreRow {
    pub lambda: f64,
    pub seed: u64,
    pub check: MourreCheck,
}

/// Full threshold-scan output: every row, plus the largest grid `λ` whose
/// worst seed still clears the post-absorption target `2δ`.
#[derive(Debug, Clone)]
pub struct MourreReport {
    pub interval: (f64, f64),
    pub delta: f64,
    pub collar_width: i64,
    pub mass_cutoff: f64,
    pub rows: Vec<MourreRow>,
    pub lambda_threshold: Option<f64>,
}

/// Compresses `comm` to the span of the eigenvectors listed in `indices`
/// and returns the raw and boundary-filtered minimum eigenvalues.
pub fn projected_min_eigenvalue(
    eigen: &EigenSystem,
    comm: &LatticeOperator,
    indices: &[usize],
    collar_width: i64,
    mass_cutoff: f64,
) -> Result<MourreCheck> {
    if eigen.lattice() != comm.lattice() {
        return Err(Error::BoxMismatch {
            left: eigen.len(),
            right: comm.site_count(),
        });
    }
    if comm.symmetry() != Symmetry::Symmetric {
        return Err(Error::InvalidArgument(
            "compression needs a commutator tagged Symmetric".into(),
        ));
    }
    if collar_width < 0 {
        return Err(Error::InvalidArgument(format!(
            "collar width must be nonnegative, got {collar_width}"
        )));
    }
    if !(mass_cutoff.is_finite() && mass_cutoff > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "mass cutoff must be positive, got {mass_cutoff}"
        )));
    }

    let n = eigen.len();
    let r = indices.len();
    if r == 0 {
        let empty = MourreSide {
            rank: 0,
            min_eig: None,
        };
        return Ok(MourreCheck {
            unfiltered: empty,
            filtered: empty,
        });
    }

    let mut basis = DMatrix::<f64>::zeros(n, r);
    for (col, &k) in indices.iter().enumerate() {
        basis.set_column(col, &eigen.eigenvector(k));
    }
    let unfiltered = MourreSide {
        rank: r,
        min_eig: Some(compressed_min(comm, &basis)),
    };

    let lattice = *eigen.lattice();
    let collar: Vec<usize> = (0..n)
        .filter(|&i| lattice.distance_to_boundary(&lattice.site_of(i)) < collar_width)
        .collect();
    let mut truncated = basis;
    for col in 0..r {
        let mass: f64 = collar.iter().map(|&i| truncated[(i, col)].powi(2)).sum();
        if mass > mass_cutoff {
            for &i in &collar {
                truncated[(i, col)] = 0.0;
            }
        }
    }
    let gram = truncated.transpose() * &truncated;
    let gram_eig = gram.symmetric_eigen();
    let kept: Vec<usize> = (0..r)
        .filter(|&j| gram_eig.eigenvalues[j] > GRAM_KEEP_TOL)
        .collect();
    if kept.is_empty() {
        return Ok(MourreCheck {
            unfiltered,
            filtered: MourreSide {
                rank: 0,
                min_eig: None,
            },
        });
    }
    let mut orthonormal = DMatrix::<f64>::zeros(n, kept.len());
    for (col, &j) in kept.iter().enumerate() {
        let coeff = gram_eig.eigenvectors.column(j) / gram_eig.eigenvalues[j].sqrt();
        orthonormal.set_column(col, &(&truncated * coeff));
    }
    let filtered = MourreSide {
        rank: kept.len(),
        min_eig: Some(compressed_min(comm, &orthonormal)),
    };
    Ok(MourreCheck {
        unfiltered,
        filtered,
    })
}

/// Smallest eigenvalue of `Bᵀ comm B` for an (approximately) orthonormal
/// column family `B`; the product is symmetrized before solving so rounding
/// in the compression cannot leak complex parts.
fn compressed_min(comm: &LatticeOperator, basis: &DMatrix<f64>) -> f64 {
    let n = basis.nrows();
    let r = basis.ncols();
    let mut image = DMatrix::<f64>::zeros(n, r);
    for col in 0..r {
        let x: Vec<f64> = basis.column(col).iter().copied().collect();
        image.set_column(col, &DVector::from_vec(comm.apply(&x)));
    }
    let compressed = basis.transpose() * image;
    let symmetrized = (&compressed + compressed.transpose()) / 2.0;
    symmetrized
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .fold(f64::INFINITY, |acc, &v| acc.min(v))
}

/// Runs one positivity check: selects the eigenvectors of `H` with
/// eigenvalue in the cutoff interval, compresses `[A, H]` to their span,
/// and reports the raw and boundary-filtered minimum eigenvalues.
///
/// An empty selection is a degenerate report (both ranks zero), not an
/// error.
pub fn mourre_check(
    h_eigen: &EigenSystem,
    a: &LatticeOperator,
    h: &LatticeOperator,
    psi: &CutoffFunction,
    collar_width: i64,
    mass_cutoff: f64,
) -> Result<MourreCheck> {
    if h_eigen.lattice() != h.lattice() || a.lattice() != h.lattice() {
        return Err(Error::BoxMismatch {
            left: a.site_count(),
            right: h.site_count(),
        });
    }
    if h.symmetry() != Symmetry::Symmetric {
        return Err(Error::InvalidArgument(
            "positivity check needs a Hamiltonian tagged Symmetric".into(),
        ));
    }
    if a.symmetry() != Symmetry::Antisymmetric {
        return Err(Error::InvalidArgument(
            "positivity check needs a conjugate operator tagged Antisymmetric".into(),
        ));
    }
    let comm = commutator(a, h)?;
    let indices = h_eigen.indices_in(psi.a(), psi.b());
    projected_min_eigenvalue(h_eigen, &comm, &indices, collar_width, mass_cutoff)
}

/// Sweeps an ascending `λ` grid, running one check per `(λ, seed)` pair,
/// and estimates the largest `λ` at which the filtered minimum still clears
/// `2δ` for every seed.
pub fn lambda_threshold_scan(
    model: &PotentialModel,
    mu: &CouplingDistribution,
    psi: &CutoffFunction,
    lambda_grid: &[f64],
    seeds: &[u64],
    lattice: LatticeBox,
    collar_width: i64,
    mass_cutoff: f64,
) -> Result<MourreReport> {
    if lambda_grid.is_empty() || seeds.is_empty() {
        return Err(Error::InvalidArgument(
            "threshold scan needs at least one lambda and one seed".into(),
        ));
    }
    let e_infty = mu.e_infty();
    for pair in lambda_grid.windows(2) {
        if pair[1] <= pair[0] {
            return Err(Error::InvalidArgument(format!(
                "lambda grid must be strictly ascending, got {} after {}",
                pair[1], pair[0]
            )));
        }
    }
    for &l in lambda_grid {
        if !(l.is_finite() && l >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "lambda must be a finite nonnegative number, got {l}"
            )));
        }
        if l * e_infty >= 1.0 {
            return Err(Error::InvalidArgument(format!(
                "lambda {l} times coupling bound {e_infty} must stay below 1"
            )));
        }
    }
    model.check_box(&lattice)?;

    let a = build_conjugate(lattice)?;
    let grid: Vec<(f64, u64)> = lambda_grid
        .iter()
        .flat_map(|&l| seeds.iter().map(move |&s| (l, s)))
        .collect();
    let rows: Vec<MourreRow> = grid
        .par_iter()
        .map(|&(lambda, seed)| {
            let realization = model.sample(mu, lambda, seed, &lattice)?;
            let h = realization.hamiltonian()?;
            let h_eigen = eigendecompose(&h)?;
            let check = mourre_check(&h_eigen, &a, &h, psi, collar_width, mass_cutoff)?;
            Ok(MourreRow {
                lambda,
                seed,
                check,
            })
        })
        .collect::<Result<_>>()?;

    let target = 2.0 * psi.delta();
    let lambda_threshold = lambda_grid
        .iter()
        .filter(|&&l| {
            rows.iter().filter(|row| row.lambda == l).all(|row| {
                row.check
                    .filtered
                    .margin(target)
                    .map(|m| m >= 0.0)
                    .unwrap_or(false)
            })
        })
        .copied()
        .fold(None, |acc: Option<f64>, l| {
            Some(acc.map_or(l, |best| best.max(l)))
        });

    Ok(MourreReport {
        interval: (psi.a(), psi.b()),
        delta: psi.delta(),
        collar_width,
        mass_cutoff,
        rows,
        lambda_threshold,
    })
}
