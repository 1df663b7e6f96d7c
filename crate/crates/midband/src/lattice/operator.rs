//! Sparse operators on a lattice box, stored row-compressed.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::lattice::LatticeBox;

/// Structural tag carried by an operator. `Symmetric` and `Antisymmetric` are
/// verified at construction: the worst entry of `M - Mᵀ` (resp. `M + Mᵀ`) must
/// be at most `1e-12 * max|M|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Symmetry {
    Symmetric,
    Antisymmetric,
    General,
}

/// Site count below which `operator_norm` uses an exact dense eigensolve
/// instead of power iteration.
pub const DENSE_NORM_CUTOFF: usize = 2000;

const SYMMETRY_CHECK_REL_TOL: f64 = 1e-12;
const POWER_ITERATION_CAP: usize = 50_000;

/// A real sparse matrix acting on the sites of one box.
///
/// Rows and columns are indexed by the box's site indexing; within each row,
/// column indices are strictly increasing and explicit zeros are dropped.
/// Instances are immutable after construction.
#[derive(Debug, Clone)]
pub struct LatticeOperator {
    lattice: LatticeBox,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
    symmetry: Symmetry,
}

impl LatticeOperator {
    /// Builds from `(row, col, value)` triplets. Duplicate positions are
    /// summed; entries that are exactly zero after summing are dropped. A
    /// `Symmetric`/`Antisymmetric` tag is verified and rejected if false.
    pub fn from_triplets(
        lattice: LatticeBox,
        triplets: impl IntoIterator<Item = (usize, usize, f64)>,
        symmetry: Symmetry,
    ) -> Result<Self> {
        let n = lattice.site_count();
        let mut entries: Vec<(usize, usize, f64)> = triplets.into_iter().collect();
        for &(r, c, _) in &entries {
            if r >= n || c >= n {
                return Err(Error::InvalidArgument(format!(
                    "triplet position ({r}, {c}) outside {n}x{n} matrix"
                )));
            }
        }
        entries.sort_unstable_by_key(|&(r, c, _)| (r, c));

        let mut row_ptr = vec![0usize; n + 1];
        let mut cols = Vec::with_capacity(entries.len());
        let mut vals = Vec::with_capacity(entries.len());
        let mut i = 0;
        while i < entries.len() {
            let (r, c, mut v) = entries[i];
            i += 1;
            while i < entries.len() && entries[i].0 == r && entries[i].1 == c {
                v += entries[i].2;
                i += 1;
            }
            if v != 0.0 {
                row_ptr[r + 1] += 1;
                cols.push(c);
                vals.push(v);
            }
        }
        for r in 0..n {
            row_ptr[r + 1] += row_ptr[r];
        }

        let op = Self {
            lattice,
            row_ptr,
            cols,
            vals,
            symmetry: Symmetry::General,
        };
        op.with_symmetry(symmetry)
    }

    /// Re-tags the operator, verifying the claimed structure.
    pub fn with_symmetry(mut self, symmetry: Symmetry) -> Result<Self> {
        if symmetry != Symmetry::General {
            let dev = self.structure_deviation(symmetry);
            let scale = self.max_abs_entry();
            if dev > SYMMETRY_CHECK_REL_TOL * scale {
                return Err(Error::InvalidArgument(format!(
                    "operator tagged {symmetry:?} but worst structural deviation is {dev:.3e} \
                     against scale {scale:.3e}"
                )));
            }
        }
        self.symmetry = symmetry;
        Ok(self)
    }

    /// Applies the tag when the numerics confirm it, `General` otherwise.
    pub fn try_symmetry(self, symmetry: Symmetry) -> Self {
        match self.clone().with_symmetry(symmetry) {
            Ok(tagged) => tagged,
            Err(_) => self,
        }
    }

    /// Identity matrix on the box.
    pub fn identity(lattice: LatticeBox) -> Self {
        let n = lattice.site_count();
        Self {
            lattice,
            row_ptr: (0..=n).collect(),
            cols: (0..n).collect(),
            vals: vec![1.0; n],
            symmetry: Symmetry::Symmetric,
        }
    }

    /// Diagonal matrix with the given per-site values.
    pub fn diagonal(lattice: LatticeBox, values: &[f64]) -> Result<Self> {
        let n = lattice.site_count();
        if values.len() != n {
            return Err(Error::InvalidArgument(format!(
                "diagonal length {} does not match {n} sites",
                values.len()
            )));
        }
        let trips = values
            .iter()
            .enumerate()
            .map(|(i, &v)| (i, i, v))
            .collect::<Vec<_>>();
        Self::from_triplets(lattice, trips, Symmetry::Symmetric)
    }

    /// All-zero operator.
    pub fn zero(lattice: LatticeBox) -> Self {
        let n = lattice.site_count();
        Self {
            lattice,
            row_ptr: vec![0; n + 1],
            cols: Vec::new(),
            vals: Vec::new(),
            symmetry: Symmetry::Symmetric,
        }
    }

    pub fn lattice(&self) -> &LatticeBox {
        &self.lattice
    }

    pub fn site_count(&self) -> usize {
        self.lattice.site_count()
    }

    pub fn symmetry(&self) -> Symmetry {
        self.symmetry
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// Entry at `(row, col)`; zero where no stored entry exists.
    pub fn entry(&self, row: usize, col: usize) -> f64 {
        let lo = self.row_ptr[row];
        let hi = self.row_ptr[row + 1];
        match self.cols[lo..hi].binary_search(&col) {
            Ok(k) => self.vals[lo + k],
            Err(_) => 0.0,
        }
    }

    /// Largest absolute entry; zero for the empty matrix.
    pub fn max_abs_entry(&self) -> f64 {
        self.vals.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Matrix-vector product `Mx`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.site_count(), "vector length mismatch");
        let n = self.site_count();
        let mut y = vec![0.0; n];
        for r in 0..n {
            let mut acc = 0.0;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            y[r] = acc;
        }
        y
    }

    /// `self + alpha * other`; boxes must match.
    pub fn add_scaled(&self, other: &Self, alpha: f64) -> Result<Self> {
        self.check_same_box(other)?;
        let n = self.site_count();
        let mut trips = Vec::with_capacity(self.nnz() + other.nnz());
        for r in 0..n {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                trips.push((r, self.cols[k], self.vals[k]));
            }
            for k in other.row_ptr[r]..other.row_ptr[r + 1] {
                trips.push((r, other.cols[k], alpha * other.vals[k]));
            }
        }
        let tag = match (self.symmetry, other.symmetry) {
            (Symmetry::Symmetric, Symmetry::Symmetric) => Symmetry::Symmetric,
            (Symmetry::Antisymmetric, Symmetry::Antisymmetric) => Symmetry::Antisymmetric,
            _ => Symmetry::General,
        };
        let sum = Self::from_triplets(self.lattice, trips, Symmetry::General)?;
        // Near-total cancellation can leave a residue whose asymmetry is pure
        // rounding noise yet large relative to the residue itself; fall back
        // to General there instead of failing.
        Ok(sum.try_symmetry(tag))
    }

    /// Scalar multiple `alpha * self`; the structural tag survives scaling.
    pub fn scale(&self, alpha: f64) -> Self {
        if alpha == 0.0 {
            let mut z = Self::zero(self.lattice);
            z.symmetry = self.symmetry;
            return z;
        }
        let mut out = self.clone();
        for v in &mut out.vals {
            *v *= alpha;
        }
        out
    }

    /// Matrix product `self * other`; boxes must match. The result is tagged
    /// `General` (products of structured operators are not structured in
    /// general); callers that know better can re-tag with `with_symmetry`.
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_same_box(other)?;
        let n = self.site_count();
        let mut row_ptr = vec![0usize; n + 1];
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        let mut acc = vec![0.0f64; n];
        let mut touched: Vec<usize> = Vec::new();
        for r in 0..n {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                let a = self.vals[k];
                let mid = self.cols[k];
                for k2 in other.row_ptr[mid]..other.row_ptr[mid + 1] {
                    let c = other.cols[k2];
                    if acc[c] == 0.0 && !touched.contains(&c) {
                        touched.push(c);
                    }
                    acc[c] += a * other.vals[k2];
                }
            }
            touched.sort_unstable();
            for &c in &touched {
                if acc[c] != 0.0 {
                    cols.push(c);
                    vals.push(acc[c]);
                }
                acc[c] = 0.0;
            }
            row_ptr[r + 1] = cols.len();
            touched.clear();
        }
        Ok(Self {
            lattice: self.lattice,
            row_ptr,
            cols,
            vals,
            symmetry: Symmetry::General,
        })
    }

    /// Transpose. Symmetric and antisymmetric tags survive transposition.
    pub fn transpose(&self) -> Self {
        let n = self.site_count();
        let mut counts = vec![0usize; n + 1];
        for &c in &self.cols {
            counts[c + 1] += 1;
        }
        for i in 0..n {
            counts[i + 1] += counts[i];
        }
        let row_ptr = counts.clone();
        let mut cols = vec![0usize; self.nnz()];
        let mut vals = vec![0.0f64; self.nnz()];
        let mut cursor = counts;
        for r in 0..n {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                let c = self.cols[k];
                let dst = cursor[c];
                cols[dst] = r;
                vals[dst] = self.vals[k];
                cursor[c] += 1;
            }
        }
        Self {
            lattice: self.lattice,
            row_ptr,
            cols,
            vals,
            symmetry: self.symmetry,
        }
    }

    /// Dense copy, for eigensolves and small-box checks.
    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.site_count();
        let mut m = DMatrix::zeros(n, n);
        for r in 0..n {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                m[(r, self.cols[k])] = self.vals[k];
            }
        }
        m
    }

    /// Sparsifies a dense matrix back onto the box, dropping exact zeros.
    pub fn from_dense(lattice: LatticeBox, m: &DMatrix<f64>, symmetry: Symmetry) -> Result<Self> {
        let n = lattice.site_count();
        if m.nrows() != n || m.ncols() != n {
            return Err(Error::InvalidArgument(format!(
                "dense matrix is {}x{}, box has {n} sites",
                m.nrows(),
                m.ncols()
            )));
        }
        let mut trips = Vec::new();
        for r in 0..n {
            for c in 0..n {
                let v = m[(r, c)];
                if v != 0.0 {
                    trips.push((r, c, v));
                }
            }
        }
        Self::from_triplets(lattice, trips, symmetry)
    }

    /// Writes the matrix as coordinate-list text, one `row col value` line per
    /// stored entry in row-major order, values with 17 significant digits.
    pub fn dump_coordinate_list(&self, out: &mut impl std::io::Write) -> Result<()> {
        let n = self.site_count();
        for r in 0..n {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                writeln!(out, "{} {} {:.16e}", r, self.cols[k], self.vals[k])?;
            }
        }
        Ok(())
    }

    /// Worst deviation from the claimed structure: `max|M - Mᵀ|` for
    /// `Symmetric`, `max|M + Mᵀ|` for `Antisymmetric`, zero for `General`.
    fn structure_deviation(&self, symmetry: Symmetry) -> f64 {
        let sign = match symmetry {
            Symmetry::Symmetric => 1.0,
            Symmetry::Antisymmetric => -1.0,
            Symmetry::General => return 0.0,
        };
        let t = self.transpose();
        let n = self.site_count();
        let mut worst = 0.0f64;
        for r in 0..n {
            let (mut i, hi_i) = (self.row_ptr[r], self.row_ptr[r + 1]);
            let (mut j, hi_j) = (t.row_ptr[r], t.row_ptr[r + 1]);
            while i < hi_i || j < hi_j {
                let ci = if i < hi_i { self.cols[i] } else { usize::MAX };
                let cj = if j < hi_j { t.cols[j] } else { usize::MAX };
                let dev = if ci == cj {
                    let d = self.vals[i] - sign * t.vals[j];
                    i += 1;
                    j += 1;
                    d
                } else if ci < cj {
                    let d = self.vals[i];
                    i += 1;
                    d
                } else {
                    let d = sign * t.vals[j];
                    j += 1;
                    d
                };
                worst = worst.max(dev.abs());
            }
        }
        worst
    }

    fn check_same_box(&self, other: &Self) -> Result<()> {
        if self.lattice != other.lattice {
            return Err(Error::BoxMismatch {
                left: self.site_count(),
                right: other.site_count(),
            });
        }
        Ok(())
    }
}

/// Largest singular value of `x` to relative tolerance `tol`.
///
/// Below [`DENSE_NORM_CUTOFF`] sites the answer comes from an exact dense
/// eigensolve (of `x` itself when tagged symmetric, of `xᵀx` otherwise).
/// Larger boxes use power iteration on `xᵀx` with a deterministic start
/// vector (normalized all-ones) so results are reproducible bit-for-bit.
pub fn operator_norm(x: &LatticeOperator, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let n = x.site_count();
    if x.nnz() == 0 {
        return Ok(0.0);
    }
    if n < DENSE_NORM_CUTOFF {
        return Ok(dense_norm(x));
    }

    let xt = x.transpose();
    let mut v = vec![1.0 / (n as f64).sqrt(); n];
    let mut sigma_prev = f64::NAN;
    for _iter in 1..=POWER_ITERATION_CAP {
        let w = xt.apply(&x.apply(&v));
        // Rayleigh quotient of xᵀx at the unit vector v equals ‖xv‖².
        let rayleigh: f64 = v.iter().zip(&w).map(|(a, b)| a * b).sum();
        let sigma = rayleigh.max(0.0).sqrt();
        let wnorm = w.iter().map(|a| a * a).sum::<f64>().sqrt();
        if wnorm == 0.0 {
            return Ok(0.0);
        }
        for (vi, wi) in v.iter_mut().zip(&w) {
            *vi = wi / wnorm;
        }
        if (sigma - sigma_prev).abs() <= tol * sigma.max(f64::MIN_POSITIVE) {
            return Ok(sigma);
        }
        sigma_prev = sigma;
    }
    Err(Error::NoConvergence {
        what: "operator norm power iteration",
        iterations: POWER_ITERATION_CAP,
        last_value: sigma_prev,
    })
}

fn dense_norm(x: &LatticeOperator) -> f64 {
    if x.symmetry() == Symmetry::Symmetric {
        let eig = x.to_dense().symmetric_eigen();
        return eig.eigenvalues.iter().fold(0.0f64, |m, l| m.max(l.abs()));
    }
    let d = x.to_dense();
    let gram = d.transpose() * &d;
    let eig = gram.symmetric_eigen();
    eig.eigenvalues
        .iter()
        .fold(0.0f64, |m, l| m.max(l.max(0.0)))
        .sqrt()
}
