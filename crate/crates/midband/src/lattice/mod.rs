//! Finite lattice boxes and sparse operators on them.

mod builders;
mod eigen;
mod operator;

pub use builders::{
    build_conjugate, build_laplacian, build_position, build_shift, commutator,
};
pub use eigen::{eigendecompose, EigenSystem, DENSE_EIGEN_CAP};
pub use operator::{operator_norm, LatticeOperator, Symmetry, DENSE_NORM_CUTOFF};

use crate::error::{Error, Result};

/// Boundary handling for the box.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    /// Shifts drop contributions that would leave the box.
    Dirichlet,
    /// Shifts wrap around, turning the box into a discrete torus.
    Periodic,
}

impl std::fmt::Display for Boundary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Boundary::Dirichlet => write!(f, "dirichlet"),
            Boundary::Periodic => write!(f, "periodic"),
        }
    }
}

/// A centered cube of lattice sites, `{-half_side ..= half_side}^dim`.
///
/// Sites are indexed row-major with axis 0 slowest, so index 0 is the corner
/// with every coordinate at `-half_side`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LatticeBox {
    dim: usize,
    half_side: i64,
    boundary: Boundary,
}

impl LatticeBox {
    /// Max dimension supported by the dense/sparse kernels in this crate.
    pub const MAX_DIM: usize = 4;

    pub fn new(dim: usize, half_side: i64, boundary: Boundary) -> Result<Self> {
        if dim == 0 || dim > Self::MAX_DIM {
            return Err(Error::InvalidArgument(format!(
                "dim must be in 1..={}, got {dim}",
                Self::MAX_DIM
            )));
        }
        if half_side < 1 {
            return Err(Error::InvalidArgument(format!(
                "half_side must be >= 1, got {half_side}"
            )));
        }
        let side = 2 * half_side as u128 + 1;
        let sites = side.pow(dim as u32);
        if sites > usize::MAX as u128 {
            return Err(Error::InvalidArgument(format!(
                "box with {sites} sites does not fit in memory"
            )));
        }
        Ok(Self {
            dim,
            half_side,
            boundary,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn half_side(&self) -> i64 {
        self.half_side
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    /// Sites per axis, `2 * half_side + 1`.
    pub fn side(&self) -> usize {
        (2 * self.half_side + 1) as usize
    }

    /// Total number of sites, `side^dim`.
    pub fn site_count(&self) -> usize {
        self.side().pow(self.dim as u32)
    }

    /// Whether every coordinate of `site` lies in `[-half_side, half_side]`.
    pub fn contains(&self, site: &[i64]) -> bool {
        site.len() == self.dim && site.iter().all(|&c| c.abs() <= self.half_side)
    }

    /// Flat index of a site, row-major with axis 0 slowest.
    ///
    /// # Panics
    /// Panics if the site is outside the box; use [`Self::contains`] to guard.
    pub fn index_of(&self, site: &[i64]) -> usize {
        assert!(
            self.contains(site),
            "site {site:?} outside box with half_side {}",
            self.half_side
        );
        let side = self.side();
        let mut idx = 0usize;
        for &c in site {
            idx = idx * side + (c + self.half_side) as usize;
        }
        idx
    }

    /// Coordinates of the site with flat index `idx`.
    ///
    /// # Panics
    /// Panics if `idx >= site_count()`.
    pub fn site_of(&self, idx: usize) -> Vec<i64> {
        assert!(idx < self.site_count(), "index {idx} out of range");
        let side = self.side();
        let mut rem = idx;
        let mut site = vec![0i64; self.dim];
        for axis in (0..self.dim).rev() {
            site[axis] = (rem % side) as i64 - self.half_side;
            rem /= side;
        }
        site
    }

    /// Iterator over all sites in index order.
    pub fn sites(&self) -> impl Iterator<Item = Vec<i64>> + '_ {
        (0..self.site_count()).map(move |i| self.site_of(i))
    }

    /// Sup-norm distance from `site` to the boundary face set,
    /// `half_side - max_i |site_i|`. Zero on the outermost layer.
    pub fn distance_to_boundary(&self, site: &[i64]) -> i64 {
        assert!(
            self.contains(site),
            "site {site:?} outside box with half_side {}",
            self.half_side
        );
        let max_abs = site.iter().map(|c| c.abs()).max().unwrap_or(0);
        self.half_side - max_abs
    }

    /// The neighbor of `site` shifted by `delta` along `axis`, respecting the
    /// boundary condition. Returns `None` when a Dirichlet shift exits the box.
    pub fn neighbor(&self, site: &[i64], axis: usize, delta: i64) -> Option<Vec<i64>> {
        debug_assert!(axis < self.dim);
        let mut out = site.to_vec();
        let moved = out[axis] + delta;
        match self.boundary {
            Boundary::Dirichlet => {
                if moved.abs() > self.half_side {
                    return None;
                }
                out[axis] = moved;
            }
            Boundary::Periodic => {
                let side = self.side() as i64;
                let mut wrapped = (moved + self.half_side).rem_euclid(side) - self.half_side;
                if wrapped.abs() > self.half_side {
                    wrapped -= side * wrapped.signum();
                }
                out[axis] = wrapped;
            }
        }
        Some(out)
    }
}
