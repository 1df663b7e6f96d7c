//! Property tests for structural invariants of the public API: operator
//! adjointness, sampling ranges, cutoff shape, prediction geometry, and
//! table rendering.

use proptest::prelude::*;

use midband::cli::{Cell, DataTable, OutputFormat};
use midband::lattice::{
    build_conjugate, build_laplacian, build_position, build_shift, Boundary, LatticeBox,
};
use midband::mourre::build_cutoff;
use midband::potential::CouplingDistribution;
use midband::rng::stream_rng;
use midband::smoothstep;
use midband::spectral::predict_essential_spectrum;

fn random_vector(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = stream_rng(seed, 17);
    (0..n)
        .map(|_| rand::Rng::random_range(&mut rng, -1.0..1.0))
        .collect()
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

fn small_box() -> impl Strategy<Value = (usize, i64)> {
    prop_oneof![
        (Just(1usize), 2i64..12),
        (Just(2usize), 2i64..5),
        (Just(3usize), 2i64..3),
    ]
}

proptest! {
    // Sum-by-parts structure: the Laplacian is self-adjoint and the
    // conjugate operator is skew-adjoint on every Dirichlet box.
    #[test]
    fn laplacian_is_self_adjoint_and_conjugate_is_skew((dim, half) in small_box(), seed in 0u64..1000) {
        let lattice = LatticeBox::new(dim, half, Boundary::Dirichlet).unwrap();
        let n = lattice.site_count();
        let u = random_vector(n, seed);
        let v = random_vector(n, seed.wrapping_add(1));

        let lap = build_laplacian(lattice).unwrap();
        let sym_gap = (dot(&lap.apply(&u), &v) - dot(&u, &lap.apply(&v))).abs();
        prop_assert!(sym_gap <= 1e-10 * n as f64, "symmetry gap {sym_gap}");

        let conj = build_conjugate(lattice).unwrap();
        let skew_gap = (dot(&conj.apply(&u), &v) + dot(&u, &conj.apply(&v))).abs();
        prop_assert!(skew_gap <= 1e-9 * (half * n as i64) as f64, "skew gap {skew_gap}");
    }

    // Shifts wrap without loss on a torus and never grow a vector on a
    // Dirichlet box.
    #[test]
    fn shifts_preserve_or_contract_norms((dim, half) in small_box(), axis_pick in 0usize..3, seed in 0u64..1000) {
        let axis = axis_pick % dim;
        let u_len = |lattice: LatticeBox| lattice.site_count();

        let torus = LatticeBox::new(dim, half, Boundary::Periodic).unwrap();
        let u = random_vector(u_len(torus), seed);
        let shifted = build_shift(torus, axis).unwrap().apply(&u);
        let gap = (dot(&shifted, &shifted) - dot(&u, &u)).abs();
        prop_assert!(gap <= 1e-12 * u.len() as f64, "torus shift norm gap {gap}");

        let boxed = LatticeBox::new(dim, half, Boundary::Dirichlet).unwrap();
        let v = random_vector(u_len(boxed), seed.wrapping_add(2));
        let clipped = build_shift(boxed, axis).unwrap().apply(&v);
        prop_assert!(dot(&clipped, &clipped) <= dot(&v, &v) + 1e-12);
    }

    // The position operator reports exactly the coordinate of each site.
    #[test]
    fn position_operator_matches_coordinates(half in 2i64..12, seed in 0u64..1000) {
        let lattice = LatticeBox::new(1, half, Boundary::Dirichlet).unwrap();
        let q = build_position(lattice, 0).unwrap();
        let u = random_vector(lattice.site_count(), seed);
        let image = q.apply(&u);
        for idx in 0..lattice.site_count() {
            let coord = lattice.site_of(idx)[0] as f64;
            prop_assert!((image[idx] - coord * u[idx]).abs() <= 1e-15 * half as f64);
        }
    }

    // Draws stay inside the declared support and under the absolute bound.
    #[test]
    fn coupling_draws_respect_their_support(lo in -3.0f64..0.0, width in 0.1f64..3.0, seed in 0u64..2000) {
        let hi = lo + width;
        let mu = CouplingDistribution::uniform(lo, hi).unwrap();
        let mut rng = stream_rng(seed, 3);
        for _ in 0..16 {
            let omega = mu.sample(&mut rng);
            prop_assert!(omega >= lo && omega <= hi, "draw {omega} outside [{lo}, {hi}]");
            prop_assert!(omega.abs() <= mu.e_infty() + 1e-12);
        }
    }

    // Conditioned draws land inside the requested window.
    #[test]
    fn conditioned_draws_hit_their_window(target in -0.9f64..0.9, halfwidth in 0.001f64..0.1, seed in 0u64..2000) {
        let mu = CouplingDistribution::uniform(-1.0, 1.0).unwrap();
        let mut rng = stream_rng(seed, 5);
        let omega = mu.sample_conditioned(target, halfwidth, &mut rng).unwrap();
        prop_assert!((omega - target).abs() < halfwidth);
    }

    // The interval cutoff is a [0,1]-valued plateau: exactly one on the
    // interval, exactly zero beyond its support, monotone on each flank.
    #[test]
    fn cutoff_shape_is_a_plateau(a in -1.5f64..0.5, width in 0.3f64..1.0, x in -2.5f64..2.5) {
        let b = (a + width).min(1.95);
        let psi = build_cutoff(a, b).unwrap();
        let value = psi.value(x);
        prop_assert!((0.0..=1.0).contains(&value), "value {value} at {x}");
        if x >= a && x <= b {
            prop_assert!(value == 1.0, "plateau broken at {x}: {value}");
        }
        let (lo, hi) = psi.support();
        if x < lo || x > hi {
            prop_assert!(value == 0.0, "support leak at {x}: {value}");
        }
    }

    // Band prediction: intervals come out sorted, disjoint, containing
    // the center of the coupling-shifted band, and fattening only adds
    // points. A support far from zero at large lambda moves the whole
    // band away from the origin, so zero itself is not guaranteed.
    #[test]
    fn prediction_geometry_is_consistent(dim in 1usize..4, lambda in 0.0f64..2.0, lo in -2.0f64..0.0, width in 0.1f64..2.0, probe in -10.0f64..10.0, margin in 0.0f64..1.0) {
        let mu = CouplingDistribution::uniform(lo, lo + width).unwrap();
        let prediction = predict_essential_spectrum(dim, lambda, &mu).unwrap();
        let intervals = prediction.intervals();
        for pair in intervals.windows(2) {
            prop_assert!(pair[0].1 < pair[1].0, "intervals touch or overlap: {pair:?}");
        }
        for &(l, h) in intervals {
            prop_assert!(l <= h);
        }
        let shifted_center = lambda * (lo + width / 2.0);
        prop_assert!(
            prediction.contains(shifted_center),
            "shifted band center {shifted_center} missing"
        );
        prop_assert!(prediction.total_length() >= 4.0 * dim as f64 - 1e-12);
        let fat = prediction.fattened(margin);
        if prediction.contains(probe) {
            prop_assert!(fat.contains(probe), "fattening dropped {probe}");
        }
    }

    // The descending smoothstep is a monotone bridge from one to zero.
    #[test]
    fn smoothstep_descends_monotonically(t in -1.0f64..2.0, s in -1.0f64..2.0) {
        let (x, y) = (smoothstep::descend(t), smoothstep::descend(s));
        prop_assert!((0.0..=1.0).contains(&x));
        if t <= 0.0 {
            prop_assert!(x == 1.0);
        }
        if t >= 1.0 {
            prop_assert!(x == 0.0);
        }
        if t < s {
            prop_assert!(x >= y, "descend({t}) = {x} < descend({s}) = {y}");
        }
    }

    // Table rendering is a pure function of the rows: same cells, same
    // bytes, and one CSV line per row plus the header.
    #[test]
    fn table_rendering_is_deterministic(values in prop::collection::vec((any::<i64>(), -1e9f64..1e9, any::<bool>()), 1..20)) {
        let build = || {
            let mut t = DataTable::new("prop", vec!["i", "x", "ok"]);
            for &(i, x, ok) in &values {
                t.push_row(vec![Cell::Int(i), Cell::Float(x), Cell::Flag(ok)]);
            }
            t
        };
        let csv_a = build().render(OutputFormat::Csv);
        let csv_b = build().render(OutputFormat::Csv);
        prop_assert_eq!(&csv_a, &csv_b);
        prop_assert_eq!(csv_a.lines().count(), values.len() + 1);
        let json_a = build().render(OutputFormat::Json);
        let json_b = build().render(OutputFormat::Json);
        prop_assert_eq!(json_a, json_b);
    }
}
