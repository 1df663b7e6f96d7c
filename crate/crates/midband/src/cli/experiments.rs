//! Experiment dispatch: turns a validated config into data tables, a
//! summary, and a pass verdict, then writes everything under the
//! configured output directory.
//!
//! Each experiment has a fixed table layout (documented in the README)
//! and a fixed row order, so two runs of the same config produce
//! byte-identical data files. The manifest is the only file containing a
//! quantity that varies between runs (`wall_ms`).

use std::fs;
use std::time::Instant;

use serde_json::json;

use crate::cli::config::{Experiment, ExperimentConfig, Layout};
use crate::cli::manifest::{write_tables, Cell, DataTable, RunManifest};
use crate::error::{Error, Result};
use crate::lattice::{
    build_conjugate, build_laplacian, build_shift, commutator, eigendecompose, Boundary,
    EigenSystem, LatticeBox, LatticeOperator,
};
use crate::mourre::{build_cutoff, lambda_threshold_scan, lemma1_check, mourre_check, MourreSide};
use crate::potential::{
    check_hypothesis, sample_realization_conditioned, BumpProfile, CouplingDistribution,
    PotentialModel, PotentialSpec, Realization,
};
use crate::rng::stream_rng;
use crate::spectral::{
    density_of_states, make_weyl_vector, place_weyl_window, predict_essential_spectrum,
    weyl_residual_check,
};

const HYPOTHESIS_NORM_TOL: f64 = 1e-8;
const COMMUTATOR_IDENTITY_TOL: f64 = 1e-12;
const WEYL_BOUND_SLACK: f64 = 1e-9;

struct Product {
    tables: Vec<DataTable>,
    seeds: Vec<u64>,
    summary: serde_json::Value,
    pass: bool,
}

/// Runs the configured experiment and writes data files plus
/// `manifest.json` under `config.output_path`.
pub fn run(cfg: &ExperimentConfig) -> Result<RunManifest> {
    let start = Instant::now();
    let product = match cfg.experiment {
        Experiment::TorusLemma => run_torus(cfg)?,
        Experiment::CommutatorIdentity => run_commutator_identity(cfg)?,
        Experiment::HypothesisCheck => run_hypothesis(cfg)?,
        Experiment::Lemma1 => run_lemma1(cfg)?,
        Experiment::Mourre => run_mourre(cfg)?,
        Experiment::LambdaScan => run_lambda_scan(cfg)?,
        Experiment::Weyl => run_weyl(cfg)?,
        Experiment::Spectrum => run_spectrum(cfg)?,
        Experiment::Dos => run_dos(cfg)?,
    };
    let outputs = write_tables(&cfg.output_path, &product.tables, cfg.format)?;
    let manifest = RunManifest {
        version: env!("CARGO_PKG_VERSION").to_string(),
        experiment: cfg.experiment.name().to_string(),
        config: cfg.clone(),
        seeds: product.seeds,
        wall_ms: start.elapsed().as_millis(),
        outputs,
        summary: product.summary,
        pass: product.pass,
    };
    fs::write(cfg.output_path.join("manifest.json"), manifest.render())?;
    Ok(manifest)
}

fn lattice_of(cfg: &ExperimentConfig) -> Result<LatticeBox> {
    LatticeBox::new(
        cfg.nu.expect("validated"),
        cfg.half_side.expect("validated"),
        cfg.boundary,
    )
}

fn spec_of(cfg: &ExperimentConfig) -> Result<Option<PotentialSpec>> {
    let profile = BumpProfile::new(cfg.plateau_radius)?;
    let nu = cfg.nu.expect("validated");
    match cfg.layout {
        Layout::Annular => Ok(Some(PotentialSpec::annular(
            nu,
            cfg.base_scale.expect("validated"),
            cfg.annuli.expect("validated"),
            profile,
        )?)),
        Layout::SingleBump => Ok(Some(PotentialSpec::single_bump(
            nu,
            cfg.bump_radius.expect("validated"),
            profile,
        )?)),
        Layout::Stationary => Ok(None),
    }
}

fn model_of(cfg: &ExperimentConfig) -> Result<PotentialModel> {
    Ok(match spec_of(cfg)? {
        Some(spec) => PotentialModel::Bumps(spec),
        None => PotentialModel::Stationary,
    })
}

fn mu_of(cfg: &ExperimentConfig) -> &CouplingDistribution {
    cfg.distribution.as_ref().expect("validated")
}

fn opt_float(v: Option<f64>) -> Cell {
    match v {
        Some(x) => Cell::Float(x),
        None => Cell::Empty,
    }
}

fn run_torus(cfg: &ExperimentConfig) -> Result<Product> {
    let nu = cfg.nu.expect("validated");
    let scan = crate::mourre::torus_scan(nu, cfg.delta.expect("validated"), cfg.grid.expect("validated"))?;
    let columns: Vec<&'static str> = match nu {
        1 => vec!["nu", "delta", "grid", "min", "argmin_0"],
        2 => vec!["nu", "delta", "grid", "min", "argmin_0", "argmin_1"],
        _ => vec!["nu", "delta", "grid", "min", "argmin_0", "argmin_1", "argmin_2"],
    };
    let mut table = DataTable::new("torus", columns);
    let mut row = vec![
        Cell::UInt(nu as u64),
        Cell::Float(scan.delta),
        Cell::UInt(scan.grid as u64),
        Cell::Float(scan.min_value),
    ];
    row.extend(scan.argmin.iter().map(|&x| Cell::Float(x)));
    table.push_row(row);
    Ok(Product {
        tables: vec![table],
        seeds: vec![],
        summary: json!({
            "min": scan.min_value,
            "bound_3delta": scan.bound_3delta,
            "argmin": scan.argmin,
        }),
        pass: scan.pass,
    })
}

fn run_commutator_identity(cfg: &ExperimentConfig) -> Result<Product> {
    let lattice = lattice_of(cfg)?;
    let seed = cfg.seed.unwrap_or(0);
    let conjugate = build_conjugate(lattice)?;
    let laplacian = build_laplacian(lattice)?;
    let comm = commutator(&conjugate, &laplacian)?;
    let mut hop_sum = LatticeOperator::zero(lattice);
    for axis in 0..lattice.dim() {
        let t = build_shift(lattice, axis)?;
        let b = t.transpose().add_scaled(&t, -1.0)?;
        hop_sum = hop_sum.add_scaled(&b.matmul(&b)?, 1.0)?;
    }
    let residual_op = comm.add_scaled(&hop_sum, 1.0)?;

    let interior: Vec<usize> = (0..lattice.site_count())
        .filter(|&idx| lattice.distance_to_boundary(&lattice.site_of(idx)) >= 2)
        .collect();
    if interior.is_empty() {
        return Err(Error::InvalidArgument(
            "the box has no sites at distance 2 from the boundary; increase L".into(),
        ));
    }

    let mut table = DataTable::new("commutator", vec!["nu", "L", "trial", "residual"]);
    let mut worst: f64 = 0.0;
    for trial in 0..cfg.trials {
        let mut rng = stream_rng(seed, trial as u64);
        let mut u = vec![0.0; lattice.site_count()];
        for &idx in &interior {
            u[idx] = rand::Rng::random_range(&mut rng, -1.0..1.0);
        }
        let image = residual_op.apply(&u);
        let residual = image.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        worst = worst.max(residual);
        table.push_row(vec![
            Cell::UInt(lattice.dim() as u64),
            Cell::Int(lattice.half_side()),
            Cell::UInt(trial as u64),
            Cell::Float(residual),
        ]);
    }
    Ok(Product {
        tables: vec![table],
        seeds: vec![seed],
        summary: json!({
            "trials": cfg.trials,
            "worst_residual": worst,
            "tolerance": COMMUTATOR_IDENTITY_TOL,
        }),
        pass: worst <= COMMUTATOR_IDENTITY_TOL,
    })
}

fn run_hypothesis(cfg: &ExperimentConfig) -> Result<Product> {
    let lattice = lattice_of(cfg)?;
    let profile = BumpProfile::new(cfg.plateau_radius)?;
    let spec = PotentialSpec::annular(
        cfg.nu.expect("validated"),
        cfg.base_scale.expect("validated"),
        cfg.annuli.expect("validated"),
        profile,
    )?;
    let report = check_hypothesis(&spec, &lattice, HYPOTHESIS_NORM_TOL)?;

    let mut shells = DataTable::new(
        "hypothesis_shells",
        vec![
            "annulus",
            "center_sup_norm",
            "radius",
            "plateau_ok",
            "comm_norm",
            "comm2_norm",
            "comm2_bound",
            "comm2_ok",
        ],
    );
    for shell in &report.shells {
        shells.push_row(vec![
            Cell::UInt(shell.annulus as u64),
            Cell::Int(shell.center_sup_norm),
            Cell::Int(shell.radius),
            Cell::Flag(shell.plateau_ok),
            Cell::Float(shell.comm_norm),
            Cell::Float(shell.comm2_norm),
            Cell::Float(shell.comm2_bound),
            Cell::Flag(shell.comm2_ok),
        ]);
    }
    let mut summary_table = DataTable::new(
        "hypothesis_summary",
        vec![
            "range_ok",
            "supports_disjoint",
            "plateau_threshold_sup_norm",
            "comm_norm_sup",
            "comm_ratio",
            "comm_ratio_ok",
            "all_ok",
        ],
    );
    summary_table.push_row(vec![
        Cell::Flag(report.range_ok),
        Cell::Flag(report.supports_disjoint),
        Cell::Float(report.plateau_threshold_sup_norm),
        Cell::Float(report.comm_norm_sup),
        opt_float(report.comm_ratio),
        Cell::Flag(report.comm_ratio_ok),
        Cell::Flag(report.all_ok),
    ]);
    Ok(Product {
        tables: vec![shells, summary_table],
        seeds: vec![],
        summary: json!({
            "shells": report.shells.len(),
            "comm_norm_sup": report.comm_norm_sup,
            "comm_ratio": report.comm_ratio,
            "all_ok": report.all_ok,
        }),
        pass: report.all_ok,
    })
}

fn run_lemma1(cfg: &ExperimentConfig) -> Result<Product> {
    let lattice = lattice_of(cfg)?;
    let model = model_of(cfg)?;
    let mu = mu_of(cfg);
    let psi = build_cutoff(cfg.a.expect("validated"), cfg.b.expect("validated"))?;
    let grid = cfg.lambda_grid.as_deref().expect("validated");
    let seeds = cfg.seeds.as_deref().expect("validated");
    let rows = lemma1_check(&model, mu, grid, &psi, lattice, seeds)?;

    let mut table = DataTable::new(
        "lemma1",
        vec!["lambda", "seed", "diff_norm", "ratio", "bound", "ok"],
    );
    let mut max_ratio: f64 = 0.0;
    for row in &rows {
        max_ratio = max_ratio.max(row.ratio);
        table.push_row(vec![
            Cell::Float(row.lambda),
            Cell::UInt(row.seed),
            Cell::Float(row.diff_norm),
            Cell::Float(row.ratio),
            Cell::Float(row.bound),
            Cell::Flag(row.ok),
        ]);
    }
    let pass = rows.iter().all(|r| r.ok);
    Ok(Product {
        tables: vec![table],
        seeds: seeds.to_vec(),
        summary: json!({
            "bound": rows.first().map(|r| r.bound),
            "max_ratio": max_ratio,
            "rows": rows.len(),
        }),
        pass,
    })
}

fn mourre_columns() -> Vec<&'static str> {
    vec![
        "nu",
        "N",
        "a",
        "b",
        "delta",
        "lambda",
        "seed",
        "rank_P",
        "m",
        "margin_2delta",
        "margin_3delta",
        "filtered_flag",
    ]
}

#[allow(clippy::too_many_arguments)]
fn push_mourre_row(
    table: &mut DataTable,
    lattice: &LatticeBox,
    interval: (f64, f64),
    delta: f64,
    lambda: f64,
    seed: u64,
    side: &MourreSide,
    filtered: bool,
) {
    table.push_row(vec![
        Cell::UInt(lattice.dim() as u64),
        Cell::UInt(lattice.side() as u64),
        Cell::Float(interval.0),
        Cell::Float(interval.1),
        Cell::Float(delta),
        Cell::Float(lambda),
        Cell::UInt(seed),
        Cell::UInt(side.rank as u64),
        opt_float(side.min_eig),
        opt_float(side.margin(2.0 * delta)),
        opt_float(side.margin(3.0 * delta)),
        Cell::Int(i64::from(filtered)),
    ]);
}

fn run_mourre(cfg: &ExperimentConfig) -> Result<Product> {
    let lattice = lattice_of(cfg)?;
    let model = model_of(cfg)?;
    let mu = mu_of(cfg);
    let psi = build_cutoff(cfg.a.expect("validated"), cfg.b.expect("validated"))?;
    let lambda = cfg.lambda.expect("validated");
    let seeds = cfg.seeds.as_deref().expect("validated");
    let conjugate = build_conjugate(lattice)?;
    let delta = psi.delta();
    let interval = (psi.a(), psi.b());

    let mut table = DataTable::new("mourre", mourre_columns());
    let mut pass = true;
    let mut worst_filtered_margin: Option<f64> = None;
    for &seed in seeds {
        let realization = model.sample(mu, lambda, seed, &lattice)?;
        let h = realization.hamiltonian()?;
        let h_eigen = eigendecompose(&h)?;
        let check = mourre_check(&h_eigen, &conjugate, &h, &psi, cfg.collar, cfg.mass_cutoff)?;
        push_mourre_row(
            &mut table, &lattice, interval, delta, lambda, seed, &check.unfiltered, false,
        );
        push_mourre_row(
            &mut table, &lattice, interval, delta, lambda, seed, &check.filtered, true,
        );
        match check.filtered.margin(2.0 * delta) {
            Some(margin) => {
                worst_filtered_margin =
                    Some(worst_filtered_margin.map_or(margin, |w: f64| w.min(margin)));
                if margin < 0.0 {
                    pass = false;
                }
            }
            None => pass = false,
        }
    }
    Ok(Product {
        tables: vec![table],
        seeds: seeds.to_vec(),
        summary: json!({
            "delta": delta,
            "target_2delta": 2.0 * delta,
            "worst_filtered_margin_2delta": worst_filtered_margin,
        }),
        pass,
    })
}

fn run_lambda_scan(cfg: &ExperimentConfig) -> Result<Product> {
    let lattice = lattice_of(cfg)?;
    let model = model_of(cfg)?;
    let mu = mu_of(cfg);
    let psi = build_cutoff(cfg.a.expect("validated"), cfg.b.expect("validated"))?;
    let grid = cfg.lambda_grid.as_deref().expect("validated");
    let seeds = cfg.seeds.as_deref().expect("validated");
    let report = lambda_threshold_scan(
        &model,
        mu,
        &psi,
        grid,
        seeds,
        lattice,
        cfg.collar,
        cfg.mass_cutoff,
    )?;

    let mut table = DataTable::new("lambda_scan", mourre_columns());
    for row in &report.rows {
        push_mourre_row(
            &mut table,
            &lattice,
            report.interval,
            report.delta,
            row.lambda,
            row.seed,
            &row.check.unfiltered,
            false,
        );
        push_mourre_row(
            &mut table,
            &lattice,
            report.interval,
            report.delta,
            row.lambda,
            row.seed,
            &row.check.filtered,
            true,
        );
    }
    let pass = report.lambda_threshold.is_some_and(|t| t > 0.0);
    Ok(Product {
        tables: vec![table],
        seeds: seeds.to_vec(),
        summary: json!({
            "delta": report.delta,
            "lambda_threshold": report.lambda_threshold,
            "grid_max": grid.last(),
        }),
        pass,
    })
}

fn run_weyl(cfg: &ExperimentConfig) -> Result<Product> {
    let lattice = lattice_of(cfg)?;
    let spec = spec_of(cfg)?.ok_or_else(|| {
        Error::InvalidArgument("plane-wave witnesses need a bump layout".into())
    })?;
    let mu = mu_of(cfg);
    let lambda = cfg.lambda.expect("validated");
    let seed = cfg.seed.expect("validated");
    let energies = cfg.energies.as_deref().expect("validated");
    let windows = cfg.windows.as_deref().expect("validated");
    let halfwidth = 1.0 / cfg.ell as f64;
    let targets: Vec<f64> = match cfg.coupling_targets.clone() {
        Some(t) => t,
        None => match mu {
            CouplingDistribution::Atomic { points, .. } => points.clone(),
            _ => {
                return Err(Error::InvalidArgument(
                    "coupling targets are required for non-atomic distributions".into(),
                ))
            }
        },
    };

    let mut table = DataTable::new(
        "weyl",
        vec![
            "energy",
            "window",
            "target",
            "omega",
            "free_residual",
            "residual",
            "bound",
            "ok",
        ],
    );
    let mut pass = true;
    let mut draw = 0u64;
    let mut worst_excess: f64 = f64::NEG_INFINITY;
    for &energy in energies {
        for &window in windows {
            let host = place_weyl_window(&spec, &lattice, window)?;
            let vector = make_weyl_vector(
                energy,
                window,
                &spec.sites()[host].center,
                lattice,
                None,
            )?;
            let free = vector.free_residual()?;
            for &target in &targets {
                let realization = sample_realization_conditioned(
                    &spec,
                    mu,
                    lambda,
                    seed.wrapping_add(draw),
                    &lattice,
                    host,
                    target,
                    halfwidth,
                )?;
                draw += 1;
                let omega = realization.couplings()[host].omega;
                let residual = weyl_residual_check(&realization, &spec, energy, target, &vector)?;
                let bound = free + lambda * halfwidth;
                let ok = residual <= bound + WEYL_BOUND_SLACK;
                pass &= ok;
                worst_excess = worst_excess.max(residual - bound);
                table.push_row(vec![
                    Cell::Float(energy),
                    Cell::Int(window),
                    Cell::Float(target),
                    Cell::Float(omega),
                    Cell::Float(free),
                    Cell::Float(residual),
                    Cell::Float(bound),
                    Cell::Flag(ok),
                ]);
            }
        }
    }
    Ok(Product {
        tables: vec![table],
        seeds: vec![seed],
        summary: json!({
            "rows": draw,
            "worst_excess_over_bound": worst_excess,
        }),
        pass,
    })
}

fn realization_columns(dim: usize) -> Vec<&'static str> {
    let mut cols: Vec<&'static str> = Vec::with_capacity(dim + 2);
    cols.extend(["center_0", "center_1", "center_2", "center_3"][..dim].iter());
    cols.push("radius");
    cols.push("omega");
    cols
}

fn realization_table(realization: &Realization) -> DataTable {
    let dim = realization.lattice().dim();
    let mut table = DataTable::new("realization", realization_columns(dim));
    for coupling in realization.couplings() {
        let mut row: Vec<Cell> = coupling.center.iter().map(|&c| Cell::Int(c)).collect();
        row.push(Cell::Int(coupling.radius));
        row.push(Cell::Float(coupling.omega));
        table.push_row(row);
    }
    table
}

/// Shared spectrum assembly: the eigensystem, its tables, and the
/// containment verdict against the free band fattened by `lambda·E∞`.
fn spectrum_parts(
    cfg: &ExperimentConfig,
) -> Result<(EigenSystem, Vec<DataTable>, serde_json::Value, bool)> {
    let lattice = lattice_of(cfg)?;
    let mu = mu_of(cfg);
    let lambda = cfg.lambda.expect("validated");
    let nu = cfg.nu.expect("validated");

    let (eigen, mut tables) = if lattice.boundary() == Boundary::Periodic {
        // Validation admits periodic boxes only at lambda = 0: the free
        // operator needs no realization.
        let h = build_laplacian(lattice)?;
        (eigendecompose(&h)?, Vec::new())
    } else {
        let model = model_of(cfg)?;
        let realization = model.sample(mu, lambda, cfg.seed.expect("validated"), &lattice)?;
        let h = realization.hamiltonian()?;
        (eigendecompose(&h)?, vec![realization_table(&realization)])
    };

    let predicted = predict_essential_spectrum(nu, lambda, mu)?;
    let mut prediction_table = DataTable::new("prediction", vec!["lo", "hi"]);
    for &(lo, hi) in predicted.intervals() {
        prediction_table.push_row(vec![Cell::Float(lo), Cell::Float(hi)]);
    }
    tables.push(prediction_table);

    let envelope =
        predict_essential_spectrum(nu, 0.0, mu)?.fattened(lambda * mu.e_infty());
    let outside = eigen
        .eigenvalues()
        .iter()
        .filter(|&&x| !envelope.contains(x))
        .count();
    let summary = json!({
        "eigenvalues": eigen.len(),
        "outside_envelope": outside,
        "envelope": envelope.intervals(),
    });
    Ok((eigen, tables, summary, outside == 0))
}

fn run_spectrum(cfg: &ExperimentConfig) -> Result<Product> {
    let (eigen, mut tables, summary, pass) = spectrum_parts(cfg)?;
    let mut table = DataTable::new("eigenvalues", vec!["index", "value"]);
    for (i, &x) in eigen.eigenvalues().iter().enumerate() {
        table.push_row(vec![Cell::UInt(i as u64), Cell::Float(x)]);
    }
    tables.insert(0, table);
    Ok(Product {
        tables,
        seeds: cfg.seed.into_iter().collect(),
        summary,
        pass,
    })
}

fn run_dos(cfg: &ExperimentConfig) -> Result<Product> {
    let (eigen, mut tables, mut summary, pass) = spectrum_parts(cfg)?;
    let mu = mu_of(cfg);
    let lambda = cfg.lambda.expect("validated");
    let predicted = predict_essential_spectrum(cfg.nu.expect("validated"), lambda, mu)?;
    let hist = density_of_states(&eigen, cfg.bins, &predicted)?;

    let mut table = DataTable::new("dos", vec!["bin", "lo", "hi", "count", "fraction"]);
    let width = (hist.hi - hist.lo) / hist.counts.len() as f64;
    for (i, (&count, &fraction)) in hist.counts.iter().zip(&hist.fractions).enumerate() {
        table.push_row(vec![
            Cell::UInt(i as u64),
            Cell::Float(hist.lo + i as f64 * width),
            Cell::Float(hist.lo + (i + 1) as f64 * width),
            Cell::UInt(count as u64),
            Cell::Float(fraction),
        ]);
    }
    tables.insert(0, table);
    summary["outside_fraction"] = json!(hist.outside_fraction);
    summary["range"] = json!([hist.lo, hist.hi]);
    Ok(Product {
        tables,
        seeds: cfg.seed.into_iter().collect(),
        summary,
        pass,
    })
}
