//! Constructors for the standard operators on a box, plus the commutator.

use crate::error::{Error, Result};
use crate::lattice::{Boundary, LatticeBox, LatticeOperator, Symmetry};

fn check_axis(lattice: &LatticeBox, axis: usize) -> Result<()> {
    if axis >= lattice.dim() {
        return Err(Error::InvalidArgument(format!(
            "axis {axis} out of range for dimension {}",
            lattice.dim()
        )));
    }
    Ok(())
}

fn require_dirichlet(lattice: &LatticeBox, what: &'static str) -> Result<()> {
    if lattice.boundary() != Boundary::Dirichlet {
        return Err(Error::PeriodicUnsupported(what));
    }
    Ok(())
}

/// Unit left shift along `axis`: `(Tu)(n) = u(n - e_axis)`.
///
/// On a periodic box the coordinate wraps, giving a permutation matrix; on a
/// Dirichlet box entries that would leave the box are dropped.
pub fn build_shift(lattice: LatticeBox, axis: usize) -> Result<LatticeOperator> {
    check_axis(&lattice, axis)?;
    let mut trips = Vec::with_capacity(lattice.site_count());
    for idx in 0..lattice.site_count() {
        let site = lattice.site_of(idx);
        if let Some(src) = lattice.neighbor(&site, axis, -1) {
            trips.push((idx, lattice.index_of(&src), 1.0));
        }
    }
    LatticeOperator::from_triplets(lattice, trips, Symmetry::General)
}

/// Discrete Laplacian without the diagonal term: `sum_axis (T + Tᵀ)`.
pub fn build_laplacian(lattice: LatticeBox) -> Result<LatticeOperator> {
    let mut acc = LatticeOperator::zero(lattice);
    for axis in 0..lattice.dim() {
        let t = build_shift(lattice, axis)?;
        acc = acc.add_scaled(&t, 1.0)?.add_scaled(&t.transpose(), 1.0)?;
    }
    acc.with_symmetry(Symmetry::Symmetric)
}

/// Position operator along `axis`: diagonal with the centered coordinate.
/// Only meaningful with Dirichlet boundaries; a torus has no coordinates.
pub fn build_position(lattice: LatticeBox, axis: usize) -> Result<LatticeOperator> {
    check_axis(&lattice, axis)?;
    require_dirichlet(&lattice, "position operator needs genuine coordinates")?;
    let diag: Vec<f64> = (0..lattice.site_count())
        .map(|idx| lattice.site_of(idx)[axis] as f64)
        .collect();
    LatticeOperator::diagonal(lattice, &diag)
}

/// Dilation-type conjugate operator
/// `A = (1/2) sum_axis { Q (Tᵀ - T) + (Tᵀ - T) Q }`,
/// antisymmetric as a real matrix. In one dimension its interior action is
/// `(Au)(n) = (1/2)[(2n+1)u(n+1) - (2n-1)u(n-1)]`.
pub fn build_conjugate(lattice: LatticeBox) -> Result<LatticeOperator> {
    require_dirichlet(&lattice, "conjugate operator needs genuine coordinates")?;
    let mut acc = LatticeOperator::zero(lattice);
    for axis in 0..lattice.dim() {
        let t = build_shift(lattice, axis)?;
        let b = t.transpose().add_scaled(&t, -1.0)?;
        let q = build_position(lattice, axis)?;
        let qb = q.matmul(&b)?;
        let bq = b.matmul(&q)?;
        acc = acc.add_scaled(&qb.add_scaled(&bq, 1.0)?, 0.5)?;
    }
    acc.with_symmetry(Symmetry::Antisymmetric)
}

/// Commutator `[x, y] = xy - yx`.
///
/// The structural tag of the result follows from the factor tags: a
/// commutator of an antisymmetric with a symmetric operator is symmetric,
/// of two symmetric or two antisymmetric operators antisymmetric. If the
/// numerics fail to confirm the inferred tag the result falls back to
/// `General` rather than erroring.
pub fn commutator(x: &LatticeOperator, y: &LatticeOperator) -> Result<LatticeOperator> {
    let xy = x.matmul(y)?;
    let yx = y.matmul(x)?;
    let z = xy.add_scaled(&yx, -1.0)?;
    let inferred = match (x.symmetry(), y.symmetry()) {
        (Symmetry::Symmetric, Symmetry::Symmetric) => Symmetry::Antisymmetric,
        (Symmetry::Antisymmetric, Symmetry::Antisymmetric) => Symmetry::Antisymmetric,
        (Symmetry::Symmetric, Symmetry::Antisymmetric) => Symmetry::Symmetric,
        (Symmetry::Antisymmetric, Symmetry::Symmetric) => Symmetry::Symmetric,
        _ => Symmetry::General,
    };
    Ok(z.try_symmetry(inferred))
}
