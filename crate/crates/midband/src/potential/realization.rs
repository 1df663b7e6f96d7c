//! Sampled potentials and the random Hamiltonian they induce.

use crate::error::{Error, Result};
use crate::lattice::{build_laplacian, Boundary, LatticeBox, LatticeOperator};
use crate::potential::{CouplingDistribution, PotentialSpec};
use crate::rng::stream_rng;

/// One sampled coupling: which bump it scales and the drawn value.
#[derive(Debug, Clone, PartialEq)]
pub struct Coupling {
    pub center: Vec<i64>,
    pub radius: i64,
    pub omega: f64,
}

/// A sampled potential on a box, with everything needed to rebuild or audit
/// it: the seed, the per-bump couplings, and the assembled diagonal.
#[derive(Debug, Clone)]
pub struct Realization {
    lattice: LatticeBox,
    lambda: f64,
    seed: u64,
    couplings: Vec<Coupling>,
    potential: LatticeOperator,
}

impl Realization {
    pub fn lattice(&self) -> &LatticeBox {
        &self.lattice
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn couplings(&self) -> &[Coupling] {
        &self.couplings
    }

    /// The diagonal potential operator (couplings times bumps, unscaled).
    pub fn potential(&self) -> &LatticeOperator {
        &self.potential
    }

    /// The random Hamiltonian: Laplacian plus `lambda` times the potential.
    pub fn hamiltonian(&self) -> Result<LatticeOperator> {
        let lap = build_laplacian(self.lattice)?;
        lap.add_scaled(&self.potential, self.lambda)
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !lambda.is_finite() || lambda < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "coupling strength must be finite and >= 0, got {lambda}"
        )));
    }
    Ok(())
}

/// Draws i.i.d. couplings for every bump of `spec` and assembles the
/// potential. Each bump reads its own RNG stream keyed by `(seed, bump
/// index)`, so the result is independent of evaluation order.
pub fn sample_realization(
    spec: &PotentialSpec,
    mu: &CouplingDistribution,
    lambda: f64,
    seed: u64,
    lattice: &LatticeBox,
) -> Result<Realization> {
    sample_with(spec, mu, lambda, seed, lattice, None)
}

/// Like [`sample_realization`], but the bump at `conditioned_index` draws
/// from `mu` conditioned on the open window `(target - halfwidth, target +
/// halfwidth)`; all other bumps draw unconditionally from their usual
/// streams.
pub fn sample_realization_conditioned(
    spec: &PotentialSpec,
    mu: &CouplingDistribution,
    lambda: f64,
    seed: u64,
    lattice: &LatticeBox,
    conditioned_index: usize,
    target: f64,
    halfwidth: f64,
) -> Result<Realization> {
    if conditioned_index >= spec.sites().len() {
        return Err(Error::InvalidArgument(format!(
            "conditioned bump index {conditioned_index} out of range for {} bumps",
            spec.sites().len()
        )));
    }
    sample_with(
        spec,
        mu,
        lambda,
        seed,
        lattice,
        Some((conditioned_index, target, halfwidth)),
    )
}

fn sample_with(
    spec: &PotentialSpec,
    mu: &CouplingDistribution,
    lambda: f64,
    seed: u64,
    lattice: &LatticeBox,
    condition: Option<(usize, f64, f64)>,
) -> Result<Realization> {
    check_lambda(lambda)?;
    spec.check_box(lattice)?;
    let mut diag = vec![0.0f64; lattice.site_count()];
    let mut couplings = Vec::with_capacity(spec.sites().len());
    for (i, bump) in spec.sites().iter().enumerate() {
        let mut rng = stream_rng(seed, i as u64);
        let omega = match condition {
            Some((idx, target, halfwidth)) if idx == i => {
                mu.sample_conditioned(target, halfwidth, &mut rng)?
            }
            _ => mu.sample(&mut rng),
        };
        let phi = spec.bump_diagonal(i, lattice)?;
        for s in 0..lattice.site_count() {
            let v = phi.entry(s, s);
            if v != 0.0 {
                diag[s] += omega * v;
            }
        }
        couplings.push(Coupling {
            center: bump.center.clone(),
            radius: bump.radius,
            omega,
        });
    }
    let potential = LatticeOperator::diagonal(*lattice, &diag)?;
    Ok(Realization {
        lattice: *lattice,
        lambda,
        seed,
        couplings,
        potential,
    })
}

/// Comparison-run potential: an independent coupling at every single site
/// (stream keyed by the site index), no bump geometry.
pub fn sample_stationary(
    mu: &CouplingDistribution,
    lambda: f64,
    seed: u64,
    lattice: &LatticeBox,
) -> Result<Realization> {
    check_lambda(lambda)?;
    if lattice.boundary() != Boundary::Dirichlet {
        return Err(Error::PeriodicUnsupported(
            "random potentials need genuine coordinates",
        ));
    }
    let n = lattice.site_count();
    let mut diag = vec![0.0f64; n];
    let mut couplings = Vec::with_capacity(n);
    for idx in 0..n {
        let mut rng = stream_rng(seed, idx as u64);
        let omega = mu.sample(&mut rng);
        diag[idx] = omega;
        couplings.push(Coupling {
            center: lattice.site_of(idx),
            radius: 0,
            omega,
        });
    }
    let potential = LatticeOperator::diagonal(*lattice, &diag)?;
    Ok(Realization {
        lattice: *lattice,
        lambda,
        seed,
        couplings,
        potential,
    })
}
