//! Cross-module invariants checked on random inputs and on the built-in grids.

use cavmag::config::{Axis, Mode as RunMode};
use cavmag::dynamics::{build_diffusion, build_drift, is_stable, solve_lyapunov, LYAPUNOV_TOLERANCE};
use cavmag::gaussian::{
    log_negativity_one_vs_two, log_negativity_pair, physicality_check, random_physical, symplectic_eigenvalues,
    CovarianceMatrix, Measures, Mode,
};
use cavmag::bogoliubov::matching_report;
use cavmag::model::{mhz, thermal_occupancy, to_mhz, EffectiveConfig};
use cavmag::sweep::{max_kerr_params, preset, run_point, run_sweep, PointOptions, SweepGrid};
use nalgebra::{DMatrix, Matrix6};
use proptest::prelude::{prop_assert, prop_assume, proptest, ProptestConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn effective(values: [f64; 10], n: [f64; 3]) -> EffectiveConfig {
    let [da, db, dc, kb, kc, g, gab, ga, gb, gc] = values.map(mhz);
    EffectiveConfig {
        delta_a: da,
        delta_b: db,
        delta_c: dc,
        kerr_b: kb,
        kerr_c: kc,
        cross_kerr: g,
        g_ab: gab,
        gamma_a: ga,
        gamma_b: gb,
        gamma_c: gc,
        n_a: n[0],
        n_b: n[1],
        n_c: n[2],
    }
}

fn lyapunov_residual(cfg: &EffectiveConfig, v: &Matrix6<f64>) -> f64 {
    let a = build_drift(cfg).0;
    (a * v + v * a.transpose() + build_diffusion(cfg).to_matrix()).amax()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn lyapunov_solution_is_accurate_and_positive(
        da in -200.0f64..200.0, db in -200.0f64..0.0, dc in -200.0f64..0.0,
        kb in 0.0f64..30.0, kc in 0.0f64..30.0, g in 0.0f64..30.0, gab in 1.0f64..40.0,
        ga in 1.0f64..20.0, gb in 1.0f64..15.0, gc in 1.0f64..15.0,
        na in 0.0f64..2.0, nb in 0.0f64..2.0, nc in 0.0f64..2.0,
    ) {
        let cfg = effective([da, db, dc, kb, kc, g, gab, ga, gb, gc], [na, nb, nc]);
        prop_assume!(is_stable(&build_drift(&cfg)).unwrap().stable);
        let v = solve_lyapunov(&build_drift(&cfg), &build_diffusion(&cfg)).unwrap();
        let bound = LYAPUNOV_TOLERANCE * build_diffusion(&cfg).max_abs();
        prop_assert!(lyapunov_residual(&cfg, v.entries()) <= bound);
        prop_assert!((v.entries() - v.entries().transpose()).amax() == 0.0);
        prop_assert!(v.entries().cholesky().is_some());
        prop_assert!(physicality_check(&v).unwrap().physical);
    }

    #[test]
    fn bath_occupation_raises_variance(
        da in -200.0f64..200.0, db in -200.0f64..0.0, g in 0.0f64..30.0, gab in 1.0f64..40.0,
        which in 0usize..3, n0 in 0.0f64..1.0,
    ) {
        let mut cfg = effective([da, db, -100.0, 5.0, 8.0, g, gab, 10.0, 8.0, 8.0], [n0; 3]);
        prop_assume!(is_stable(&build_drift(&cfg)).unwrap().stable);
        let before = solve_lyapunov(&build_drift(&cfg), &build_diffusion(&cfg)).unwrap();
        let dn = 1e-3;
        match which {
            0 => cfg.n_a += dn,
            1 => cfg.n_b += dn,
            _ => cfg.n_c += dn,
        }
        let after = solve_lyapunov(&build_drift(&cfg), &build_diffusion(&cfg)).unwrap();
        for k in [2 * which, 2 * which + 1] {
            prop_assert!(after.entries()[(k, k)] > before.entries()[(k, k)]);
        }
    }

    #[test]
    fn thermal_occupancy_is_monotone(t in 0.001f64..1.0, w in 1.0f64..20.0) {
        let omega = 2.0 * std::f64::consts::PI * w * 1e9;
        let n = thermal_occupancy(omega, t).unwrap();
        prop_assert!(thermal_occupancy(omega, t * 1.01).unwrap() > n);
        prop_assert!(thermal_occupancy(omega * 1.01, t).unwrap() < n);
    }

    #[test]
    fn ppt_criterion_matches_negativity(seed in 0u64..100_000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (v, _) = random_physical(&mut rng, 3, 0.7, 0.5);
        let cm = CovarianceMatrix::new(Matrix6::from_column_slice(v.as_slice())).unwrap();
        for pair in [(Mode::A, Mode::B), (Mode::A, Mode::C), (Mode::B, Mode::C)] {
            let e = log_negativity_pair(&cm, pair).unwrap();
            prop_assert!((e.value > 0.0) == (e.nu_minus < 0.5 - 1e-12));
            prop_assert!((e.nu_minus - e.nu_minus_closed).abs() < 1e-10);
        }
        let m = Measures::from_covariance(&cm).unwrap();
        prop_assert!(m.contangle.a_bc >= -1e-9 && m.contangle.b_ac >= -1e-9 && m.contangle.c_ab >= -1e-9);
        for single in Mode::ALL {
            prop_assert!(log_negativity_one_vs_two(&cm, single).unwrap() >= 0.0);
        }
    }
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Symplectic spectrum from the characteristic polynomial of −(ΩV)², whose
/// eigenvalues are the squared symplectic eigenvalues, each twice. The cubic
/// comes from the power sums tr(Kᵏ)/2 via Newton's identities and is solved
/// by a dense sign scan plus bisection.
fn spectrum_from_char_poly(v: &DMatrix<f64>) -> Vec<f64> {
    let om = cavmag::gaussian::symplectic_form(3);
    let k = -(&om * v) * (&om * v);
    let k2 = &k * &k;
    let s1 = k.trace() / 2.0;
    let s2 = k2.trace() / 2.0;
    let s3 = (&k2 * &k).trace() / 2.0;
    let e1 = s1;
    let e2 = (e1 * s1 - s2) / 2.0;
    let e3 = (e2 * s1 - e1 * s2 + s3) / 3.0;
    let cubic = |x: f64| ((x - e1) * x + e2) * x - e3;
    let hi = e1;
    let n = 20_000;
    let mut roots = Vec::new();
    let mut prev = (0.0, cubic(0.0));
    for i in 1..=n {
        let x = hi * i as f64 / n as f64;
        let y = cubic(x);
        if y == 0.0 || (y > 0.0) != (prev.1 > 0.0) {
            roots.push(bisect(cubic, prev.0, x));
        }
        prev = (x, y);
    }
    roots.iter().map(|r| r.sqrt()).collect()
}

#[test]
fn symplectic_eigenvalues_match_char_poly_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst = 0f64;
    let mut checked = 0;
    for _ in 0..300 {
        let (v, _) = random_physical(&mut rng, 3, 0.3, 1.0);
        let oracle = spectrum_from_char_poly(&v);
        // Root accuracy of the cubic degrades like ε/gap; keep it well conditioned.
        if oracle.len() != 3 || oracle.windows(2).any(|w| w[1] * w[1] - w[0] * w[0] < 0.2) {
            continue;
        }
        let got = symplectic_eigenvalues(&v).unwrap();
        for (g, o) in got.iter().zip(&oracle) {
            worst = worst.max((g - o).abs() / o);
        }
        checked += 1;
    }
    assert!(checked >= 50, "only {checked} spectra resolved by the oracle");
    assert!(worst < 1e-10, "max relative error {worst:e}");
}

#[test]
fn fig2_grid_is_stable_and_physical() {
    let grid = preset("fig2").unwrap();
    let recs = run_sweep(&grid, 1, 0).unwrap();
    assert_eq!(recs.len(), 101 * 101);
    for r in &recs {
        assert!(r.error.is_none(), "{:?}", r.error);
        assert!(r.stable());
        assert!(r.measures().unwrap().nu_min >= 0.5 - 1e-9);
    }
}

#[test]
fn fig2_corners_give_four_records() {
    let base = preset("fig2").unwrap().base;
    let grid = SweepGrid::new(
        base,
        vec![
            Axis::new("Delta_b_tilde", mhz(-200.0), 0.0, 2).unwrap(),
            Axis::new("Delta_a", mhz(-200.0), mhz(200.0), 2).unwrap(),
        ],
        RunMode::Effective,
    )
    .unwrap();
    let recs = run_sweep(&grid, 2, 0).unwrap();
    assert_eq!(recs.len(), 4);
    let idx: Vec<_> = recs.iter().map(|r| r.index).collect();
    assert_eq!(idx, vec![(0, 0), (0, 1), (1, 0), (1, 1)]);
}

#[test]
fn fig2_tripartite_point() {
    let base = preset("fig2").unwrap().base;
    let p = base.with("Delta_b_tilde", mhz(-100.0)).with("Delta_a", mhz(100.0));
    let m = run_point(&p, &PointOptions::default()).unwrap().measures.unwrap();
    assert!(m.e_bc > 0.0 && m.e_ab > 0.0 && m.e_ac > 0.0 && m.contangle.min > 0.0, "{m:?}");
}

#[test]
fn no_cross_kerr_means_no_entanglement() {
    let p = preset("fig2").unwrap().base.with("Delta_b_tilde", mhz(-100.0)).with("Delta_a", mhz(100.0)).with("G_tilde", 0.0);
    let m = run_point(&p, &PointOptions::default()).unwrap().measures.unwrap();
    for e in [m.e_ab, m.e_ac, m.e_bc, m.e_a_bc, m.e_b_ac, m.e_c_ab] {
        assert_eq!(e, 0.0);
    }
}

#[test]
fn hot_bath_kills_entanglement() {
    let p = max_kerr_params().with("T_e", 0.3);
    let m = run_point(&p, &PointOptions::default()).unwrap().measures.unwrap();
    assert_eq!((m.e_ab, m.e_ac, m.e_bc), (0.0, 0.0, 0.0));
}

#[test]
fn fig3_max_kerr_cavity_optimum_follows_bogoliubov_detuning() {
    let grid = SweepGrid::new(
        max_kerr_params(),
        vec![Axis::new("Delta_a", mhz(-200.0), mhz(200.0), 101).unwrap()],
        RunMode::Effective,
    )
    .unwrap();
    let step = 4.0;
    let recs = run_sweep(&grid, 1, 0).unwrap();
    let best = recs
        .iter()
        .filter(|r| r.measures().is_some())
        .max_by(|a, b| a.measures().unwrap().e_ab.total_cmp(&b.measures().unwrap().e_ab))
        .unwrap();
    let at = to_mhz(best.value("Delta_a").unwrap());
    let report = matching_report(&max_kerr_params().effective().unwrap());
    let bog = to_mhz(report.bogoliubov.unwrap());
    let matched = to_mhz(report.match_bc);
    assert!(
        (at - bog).abs() <= step && (at - bog).abs() < (at - matched).abs(),
        "E_ab peaks at {at} MHz; Bogoliubov prediction {bog} MHz, matching line {matched} MHz"
    );
}

