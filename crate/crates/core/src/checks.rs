//! Quick self-test suite behind `cavmag check`.

use nalgebra::{DMatrix, Matrix6};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dynamics::{build_diffusion, build_drift, solve_lyapunov, stability_of};
use crate::gaussian::{
    embed_pair, log_negativity_pair, random_physical, symplectic_eigenvalues,
    two_mode_squeezed, CovarianceMatrix, Mode,
};
use crate::model::{derive_effective, mhz, reference_bare, to_mhz};
use crate::steady_state::{mean_field_residual, solve_mean_field, tolerance};
use crate::sweep::{max_kerr_params, run_point, PointOptions};

#[derive(Clone, Debug)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, passed: bool, detail: String) -> CheckResult {
    CheckResult { name, passed, detail }
}

fn squeezed_vacuum() -> CheckResult {
    let v = embed_pair(&two_mode_squeezed(0.5), Mode::B, Mode::C);
    match log_negativity_pair(&v, (Mode::B, Mode::C)) {
        Ok(e) => check("two-mode squeezed vacuum", (e.value - 1.0).abs() < 1e-10, format!("E_N = {}", e.value)),
        Err(e) => check("two-mode squeezed vacuum", false, e.to_string()),
    }
}

fn vacuum_lyapunov() -> CheckResult {
    let mut eff = max_kerr_params().effective().expect("preset is complete");
    eff.g_ab = 0.0;
    eff.cross_kerr = 0.0;
    eff.kerr_b = 0.0;
    eff.kerr_c = 0.0;
    eff.delta_a = 0.0;
    eff.delta_b = 0.0;
    eff.delta_c = 0.0;
    match solve_lyapunov(&build_drift(&eff), &build_diffusion(&eff)) {
        Ok(v) => {
            let err = (v.entries() - Matrix6::identity() * 0.5).amax();
            check("vacuum covariance", err < 1e-12, format!("max deviation {err:e}"))
        }
        Err(e) => check("vacuum covariance", false, e.to_string()),
    }
}

fn closed_form_agreement(rng: &mut ChaCha8Rng) -> CheckResult {
    let mut worst = 0f64;
    for _ in 0..200 {
        let (v, _) = random_physical(rng, 3, 0.6, 0.5);
        let cm = CovarianceMatrix::new(Matrix6::from_column_slice(v.as_slice())).expect("symmetric");
        for pair in [(Mode::A, Mode::B), (Mode::B, Mode::C)] {
            match log_negativity_pair(&cm, pair) {
                Ok(e) => worst = worst.max((e.nu_minus - e.nu_minus_closed).abs()),
                Err(_) => worst = f64::INFINITY,
            }
        }
    }
    check("closed-form two-mode nu", worst < 1e-10, format!("max |difference| {worst:e}"))
}

fn symplectic_spectrum(rng: &mut ChaCha8Rng) -> CheckResult {
    let mut worst = 0f64;
    for _ in 0..200 {
        let (v, nus) = random_physical(rng, 3, 0.8, 1.0);
        match symplectic_eigenvalues(&v) {
            Ok(got) => {
                for (g, e) in got.iter().zip(&nus) {
                    worst = worst.max((g - e).abs() / e);
                }
            }
            Err(_) => worst = f64::INFINITY,
        }
    }
    check("symplectic spectrum", worst < 1e-10, format!("max relative error {worst:e}"))
}

fn routh_hurwitz(rng: &mut ChaCha8Rng) -> CheckResult {
    let mut disagree = 0;
    let n = 2000;
    for _ in 0..n {
        let m = DMatrix::from_fn(6, 6, |_, _| rng.random_range(-1.0..1.0)) - DMatrix::identity(6, 6) * rng.random_range(0.0..2.0);
        match stability_of(&m) {
            Ok(s) if s.consistent() => {}
            _ => disagree += 1,
        }
    }
    check("Routh-Hurwitz vs eigenvalues", disagree == 0, format!("{disagree} of {n} disagree"))
}

fn reference_values() -> CheckResult {
    match derive_effective(&reference_bare(), 7.5e16, 2e16) {
        Ok(e) => {
            let db = to_mhz(e.delta_b);
            let dc = to_mhz(e.delta_c);
            let g = to_mhz(e.cross_kerr);
            let ok = (db + 70.0).abs() < 0.35 && (dc + 100.0).abs() < 0.5 && (g - 19.4).abs() < 0.097;
            check("effective reference values", ok, format!("Delta_b = {db:.3}, Delta_c = {dc:.3}, G = {g:.3} MHz"))
        }
        Err(e) => check("effective reference values", false, e.to_string()),
    }
}

fn mean_field() -> CheckResult {
    let mut bare = reference_bare();
    bare.drive_b = mhz(2e9);
    bare.drive_c = mhz(1e9);
    match solve_mean_field(&bare, None) {
        Ok(s) => {
            let r = mean_field_residual(&s, &bare);
            let n = r.iter().map(|x| x * x).sum::<f64>().sqrt();
            check("mean-field residual", n < tolerance(&bare), format!("residual {n:e} rad/s"))
        }
        Err(e) => check("mean-field residual", false, e.to_string()),
    }
}

fn pipeline() -> CheckResult {
    let p = max_kerr_params();
    match run_point(&p, &PointOptions::default()) {
        Ok(r) => match r.measures {
            Some(m) => check(
                "max-Kerr point",
                m.nu_min >= 0.5 - 1e-9 && m.contangle.min >= -1e-9,
                format!("E_ab = {:.4}, E_bc = {:.4}, E_ac = {:.4}, R_min = {:.4}", m.e_ab, m.e_bc, m.e_ac, m.contangle.min),
            ),
            None => check("max-Kerr point", false, "unstable".into()),
        },
        Err(e) => check("max-Kerr point", false, e.to_string()),
    }
}

/// Runs every check with a fixed seed.
pub fn run_all(seed: u64) -> Vec<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    vec![
        squeezed_vacuum(),
        vacuum_lyapunov(),
        closed_form_agreement(&mut rng),
        symplectic_spectrum(&mut rng),
        routh_hurwitz(&mut rng),
        reference_values(),
        mean_field(),
        pipeline(),
    ]
}
