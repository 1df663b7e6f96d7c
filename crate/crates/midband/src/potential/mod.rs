//! Sparse random bump potentials: dyadic annuli, plateau bumps, coupling
//! distributions, sampled realizations, and the structural compliance
//! checker used before any positivity experiment.

mod distribution;
mod hypothesis;
mod profile;
mod realization;

pub use distribution::CouplingDistribution;
pub use hypothesis::{check_hypothesis, AnnulusCheck, HypothesisReport};
pub use profile::BumpProfile;
pub use realization::{
    sample_realization, sample_realization_conditioned, sample_stationary, Coupling, Realization,
};

use crate::error::{Error, Result};
use crate::lattice::{Boundary, LatticeBox, LatticeOperator, Symmetry};

/// Which potential geometry an experiment runs on: the sparse bump layout,
/// or the dense comparison model with one coupling per site.
#[derive(Debug, Clone)]
pub enum PotentialModel {
    Bumps(PotentialSpec),
    Stationary,
}

impl PotentialModel {
    pub fn sample(
        &self,
        mu: &CouplingDistribution,
        lambda: f64,
        seed: u64,
        lattice: &LatticeBox,
    ) -> Result<Realization> {
        match self {
            Self::Bumps(spec) => sample_realization(spec, mu, lambda, seed, lattice),
            Self::Stationary => sample_stationary(mu, lambda, seed, lattice),
        }
    }

    pub fn check_box(&self, lattice: &LatticeBox) -> Result<()> {
        match self {
            Self::Bumps(spec) => spec.check_box(lattice),
            Self::Stationary => {
                if lattice.boundary() != Boundary::Dirichlet {
                    return Err(Error::PeriodicUnsupported(
                        "random potentials need genuine coordinates",
                    ));
                }
                Ok(())
            }
        }
    }
}

/// One bump: a lattice center, an integer radius, and the dyadic shell index
/// it came from (0 for layouts placed outside the annular family).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BumpSite {
    pub center: Vec<i64>,
    pub radius: i64,
    pub annulus: usize,
}

impl BumpSite {
    /// Sup-norm of the center.
    pub fn center_sup_norm(&self) -> i64 {
        self.center.iter().map(|c| c.abs()).max().unwrap_or(0)
    }
}

/// Geometry of the potential: which bumps exist, where, and how wide.
///
/// The annular layout covers dyadic shells `A_k = {2^(k-1)M < |m|∞ ≤ 2^k M}`
/// for `k = 1..=K`; each shell contributes `2ν` bumps of radius
/// `r_k = 2^(k-2) M` centered at `±d_k e_i` with `d_k = 3 r_k`, the shell's
/// sup-norm midpoint. Centers therefore sit at sup-norm exactly `3 r_k`.
#[derive(Debug, Clone)]
pub struct PotentialSpec {
    dim: usize,
    base_scale: i64,
    annulus_count: usize,
    profile: BumpProfile,
    sites: Vec<BumpSite>,
}

impl PotentialSpec {
    /// Builds the dyadic annular layout. `base_scale` must be an even
    /// integer ≥ 4 so the innermost radius `M/2` is a positive integer;
    /// `annulus_count = 0` yields the empty layout (zero potential).
    pub fn annular(
        dim: usize,
        base_scale: i64,
        annulus_count: usize,
        profile: BumpProfile,
    ) -> Result<Self> {
        if dim == 0 || dim > LatticeBox::MAX_DIM {
            return Err(Error::InvalidArgument(format!(
                "dim must be in 1..={}, got {dim}",
                LatticeBox::MAX_DIM
            )));
        }
        if base_scale < 4 || base_scale % 2 != 0 {
            return Err(Error::InvalidArgument(format!(
                "base scale must be an even integer >= 4, got {base_scale}"
            )));
        }
        let mut sites = Vec::with_capacity(2 * dim * annulus_count);
        for k in 1..=annulus_count {
            // r_k = 2^(k-2) M, written so k = 1 stays in integers.
            let r = (base_scale / 2) << (k - 1);
            let d = 3 * r;
            for axis in 0..dim {
                for sign in [1i64, -1] {
                    let mut center = vec![0i64; dim];
                    center[axis] = sign * d;
                    sites.push(BumpSite {
                        center,
                        radius: r,
                        annulus: k,
                    });
                }
            }
        }
        let spec = Self {
            dim,
            base_scale,
            annulus_count,
            profile,
            sites,
        };
        spec.verify_geometry()?;
        Ok(spec)
    }

    /// A single bump of the given radius centered at the origin; used for
    /// quasimode constructions that need one big plateau around a point.
    pub fn single_bump(dim: usize, radius: i64, profile: BumpProfile) -> Result<Self> {
        if dim == 0 || dim > LatticeBox::MAX_DIM {
            return Err(Error::InvalidArgument(format!(
                "dim must be in 1..={}, got {dim}",
                LatticeBox::MAX_DIM
            )));
        }
        if radius < 1 {
            return Err(Error::InvalidArgument(format!(
                "bump radius must be >= 1, got {radius}"
            )));
        }
        Ok(Self {
            dim,
            base_scale: radius,
            annulus_count: 0,
            profile,
            sites: vec![BumpSite {
                center: vec![0; dim],
                radius,
                annulus: 0,
            }],
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn base_scale(&self) -> i64 {
        self.base_scale
    }

    pub fn annulus_count(&self) -> usize {
        self.annulus_count
    }

    pub fn profile(&self) -> &BumpProfile {
        &self.profile
    }

    pub fn sites(&self) -> &[BumpSite] {
        &self.sites
    }

    /// Farthest sup-norm coordinate any bump's cube can touch; a box must
    /// have at least this half side to contain every bump.
    pub fn outer_reach(&self) -> i64 {
        self.sites
            .iter()
            .map(|s| s.center_sup_norm() + s.radius)
            .max()
            .unwrap_or(0)
    }

    /// Errors unless the box is Dirichlet and contains every bump cube.
    pub fn check_box(&self, lattice: &LatticeBox) -> Result<()> {
        if lattice.boundary() != Boundary::Dirichlet {
            return Err(Error::PeriodicUnsupported(
                "bump potentials need genuine coordinates",
            ));
        }
        if lattice.dim() != self.dim {
            return Err(Error::InvalidArgument(format!(
                "potential has dimension {}, box has {}",
                self.dim,
                lattice.dim()
            )));
        }
        let reach = self.outer_reach();
        if reach > lattice.half_side() {
            return Err(Error::CapacityExceeded {
                what: "bump support reach beyond the box half side",
                got: reach as usize,
                cap: lattice.half_side() as usize,
            });
        }
        Ok(())
    }

    /// Diagonal of one bump on the box: entry `phi((m - center)/radius)` at
    /// each site `m`, using the Euclidean norm, zero outside the open ball.
    /// `site_index` picks the bump from [`Self::sites`].
    pub fn bump_diagonal(
        &self,
        site_index: usize,
        lattice: &LatticeBox,
    ) -> Result<LatticeOperator> {
        if lattice.boundary() != Boundary::Dirichlet {
            return Err(Error::PeriodicUnsupported(
                "bump potentials need genuine coordinates",
            ));
        }
        let bump = self.sites.get(site_index).ok_or_else(|| {
            Error::InvalidArgument(format!(
                "bump index {site_index} out of range for {} bumps",
                self.sites.len()
            ))
        })?;
        let mut trips = Vec::new();
        for_each_cube_site(lattice, &bump.center, bump.radius, |idx, offset| {
            let x: Vec<f64> = offset
                .iter()
                .map(|&c| c as f64 / bump.radius as f64)
                .collect();
            let v = self.profile.value(&x);
            if v != 0.0 {
                trips.push((idx, idx, v));
            }
        });
        LatticeOperator::from_triplets(*lattice, trips, Symmetry::Symmetric)
    }

    /// Same as [`Self::bump_diagonal`] but looked up by center coordinates.
    pub fn bump_diagonal_at(
        &self,
        center: &[i64],
        lattice: &LatticeBox,
    ) -> Result<LatticeOperator> {
        let idx = self
            .sites
            .iter()
            .position(|s| s.center == center)
            .ok_or_else(|| {
                Error::InvalidArgument(format!("no bump centered at {center:?}"))
            })?;
        self.bump_diagonal(idx, lattice)
    }

    /// Construction-time geometry checks: center/radius ratio exactly 3,
    /// same-shell cubes strictly disjoint, all support balls disjoint.
    fn verify_geometry(&self) -> Result<()> {
        for s in &self.sites {
            if s.center_sup_norm() != 3 * s.radius {
                return Err(Error::InvalidArgument(format!(
                    "bump at {:?} has sup-norm {} != 3 * radius {}",
                    s.center,
                    s.center_sup_norm(),
                    s.radius
                )));
            }
        }
        for (i, a) in self.sites.iter().enumerate() {
            for b in self.sites.iter().skip(i + 1) {
                let linf: i64 = a
                    .center
                    .iter()
                    .zip(&b.center)
                    .map(|(x, y)| (x - y).abs())
                    .max()
                    .unwrap_or(0);
                if a.annulus == b.annulus && linf <= a.radius + b.radius {
                    return Err(Error::InvalidArgument(format!(
                        "cubes of same-shell bumps at {:?} and {:?} overlap",
                        a.center, b.center
                    )));
                }
                let l2: f64 = a
                    .center
                    .iter()
                    .zip(&b.center)
                    .map(|(x, y)| ((x - y) as f64).powi(2))
                    .sum::<f64>()
                    .sqrt();
                if l2 < (a.radius + b.radius) as f64 {
                    return Err(Error::InvalidArgument(format!(
                        "support balls of bumps at {:?} and {:?} overlap",
                        a.center, b.center
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Visits every box site in the closed sup-norm cube of the given radius
/// around `center`, clipped to the box; yields the flat index and the
/// center-relative offset.
pub(crate) fn for_each_cube_site(
    lattice: &LatticeBox,
    center: &[i64],
    radius: i64,
    mut visit: impl FnMut(usize, &[i64]),
) {
    let dim = lattice.dim();
    let half = lattice.half_side();
    let mut lo = vec![0i64; dim];
    let mut hi = vec![0i64; dim];
    for axis in 0..dim {
        lo[axis] = (center[axis] - radius).max(-half);
        hi[axis] = (center[axis] + radius).min(half);
        if lo[axis] > hi[axis] {
            return;
        }
    }
    let mut site = lo.clone();
    let mut offset = vec![0i64; dim];
    loop {
        for axis in 0..dim {
            offset[axis] = site[axis] - center[axis];
        }
        visit(lattice.index_of(&site), &offset);
        let mut axis = dim;
        loop {
            if axis == 0 {
                return;
            }
            axis -= 1;
            if site[axis] < hi[axis] {
                site[axis] += 1;
                for a in axis + 1..dim {
                    site[a] = lo[a];
                }
                break;
            }
        }
    }
}
