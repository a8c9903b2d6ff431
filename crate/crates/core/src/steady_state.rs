//! Classical mean-field fixed points of the driven three-mode model.
//!
//! The cavity amplitude is slaved to the Kittel amplitude, which leaves two
//! complex equations in `⟨b⟩`, `⟨c⟩`. They are solved by damped Newton on
//! the four real unknowns with an analytic Jacobian.

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;
use rand::Rng;

use crate::dynamics::{build_drift, is_stable};
use crate::error::{Error, Result};
use crate::model::{derive_effective, BareConfig, Validate};

pub const MAX_NEWTON_ITERATIONS: usize = 200;
pub const CONTINUATION_STEPS: usize = 32;
/// Random seeds drawn by [`branch_scan`] callers that have no preference.
pub const DEFAULT_SEEDS: usize = 16;
/// Relative distance below which two fixed points are the same branch.
pub const DEDUP_TOLERANCE: f64 = 1e-6;
/// Largest seed occupation `|amp|²` drawn by [`branch_scan`].
pub const SEED_OCCUPATION_CAP: f64 = 4e17;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Clone, Debug, PartialEq)]
pub struct MeanFieldState {
    pub a_amp: Complex64,
    pub b_amp: Complex64,
    pub c_amp: Complex64,
    /// Linear stability of the fluctuations around this point.
    pub stable: bool,
    /// Euclidean norm of [`mean_field_residual`], rad/s.
    pub residual_norm: f64,
}

impl MeanFieldState {
    /// Unclassified state with the cavity slaved to `b`.
    pub fn from_magnons(bare: &BareConfig, b: Complex64, c: Complex64) -> Self {
        MeanFieldState {
            a_amp: eliminate_cavity(b, bare),
            b_amp: b,
            c_amp: c,
            stable: false,
            residual_norm: f64::INFINITY,
        }
    }

    pub fn nb2(&self) -> f64 {
        self.b_amp.norm_sqr()
    }

    pub fn nc2(&self) -> f64 {
        self.c_amp.norm_sqr()
    }

    fn unknowns(&self) -> Vector4<f64> {
        Vector4::new(self.b_amp.re, self.b_amp.im, self.c_amp.re, self.c_amp.im)
    }
}

/// `⟨a⟩ = −i g ⟨b⟩ / (iΔ_a + γ_a)`.
pub fn eliminate_cavity(b_amp: Complex64, bare: &BareConfig) -> Complex64 {
    -I * bare.g_ab * b_amp / Complex64::new(bare.gamma_a, bare.delta_a)
}

/// Solver tolerance on the residual norm for the given drives.
pub fn tolerance(bare: &BareConfig) -> f64 {
    1e-10 * 1f64.max(bare.drive_b.abs()).max(bare.drive_c.abs())
}

fn residuals(bare: &BareConfig, b: Complex64, c: Complex64) -> (Complex64, Complex64) {
    let nb = b.norm_sqr();
    let nc = c.norm_sqr();
    let cav = bare.g_ab * bare.g_ab / Complex64::new(bare.gamma_a, bare.delta_a);
    let fb = -Complex64::new(bare.gamma_b, bare.delta_b) * b
        - I * (2.0 * bare.kerr_b * nb + bare.cross_kerr * nc) * b
        - I * bare.drive_b
        - cav * b;
    let fc = -Complex64::new(bare.gamma_c, bare.delta_c) * c
        - I * (2.0 * bare.kerr_c * nc + bare.cross_kerr * nb) * c
        - I * bare.drive_c;
    (fb, fc)
}

/// `(Re F_b, Im F_b, Re F_c, Im F_c)` of the steady-state equations with the
/// cavity eliminated. Zero exactly at a fixed point.
pub fn mean_field_residual(state: &MeanFieldState, bare: &BareConfig) -> [f64; 4] {
    let (fb, fc) = residuals(bare, state.b_amp, state.c_amp);
    [fb.re, fb.im, fc.re, fc.im]
}

fn residual_vec(bare: &BareConfig, x: &Vector4<f64>) -> Vector4<f64> {
    let (fb, fc) = residuals(bare, Complex64::new(x[0], x[1]), Complex64::new(x[2], x[3]));
    Vector4::new(fb.re, fb.im, fc.re, fc.im)
}

// Columns of the real Jacobian from Wirtinger derivatives:
// ∂F/∂x = F_z + F_z̄, ∂F/∂y = i(F_z − F_z̄).
fn jacobian(bare: &BareConfig, x: &Vector4<f64>) -> Matrix4<f64> {
    let b = Complex64::new(x[0], x[1]);
    let c = Complex64::new(x[2], x[3]);
    let nb = b.norm_sqr();
    let nc = c.norm_sqr();
    let cav = bare.g_ab * bare.g_ab / Complex64::new(bare.gamma_a, bare.delta_a);
    let g = bare.cross_kerr;

    let fb_b = -Complex64::new(bare.gamma_b, bare.delta_b)
        - I * (4.0 * bare.kerr_b * nb + g * nc)
        - cav;
    let fb_bbar = -I * 2.0 * bare.kerr_b * b * b;
    let fb_c = -I * g * c.conj() * b;
    let fb_cbar = -I * g * c * b;

    let fc_c = -Complex64::new(bare.gamma_c, bare.delta_c) - I * (4.0 * bare.kerr_c * nc + g * nb);
    let fc_cbar = -I * 2.0 * bare.kerr_c * c * c;
    let fc_b = -I * g * b.conj() * c;
    let fc_bbar = -I * g * b * c;

    let dx = |dz: Complex64, dzbar: Complex64| dz + dzbar;
    let dy = |dz: Complex64, dzbar: Complex64| I * (dz - dzbar);
    let cols = [
        (dx(fb_b, fb_bbar), dx(fc_b, fc_bbar)),
        (dy(fb_b, fb_bbar), dy(fc_b, fc_bbar)),
        (dx(fb_c, fb_cbar), dx(fc_c, fc_cbar)),
        (dy(fb_c, fb_cbar), dy(fc_c, fc_cbar)),
    ];
    Matrix4::from_fn(|i, j| {
        let (fb, fc) = cols[j];
        match i {
            0 => fb.re,
            1 => fb.im,
            2 => fc.re,
            _ => fc.im,
        }
    })
}

struct NewtonOutcome {
    x: Vector4<f64>,
    residual: f64,
    iterations: usize,
    converged: bool,
}

fn newton(bare: &BareConfig, x0: Vector4<f64>, tol: f64) -> NewtonOutcome {
    let mut x = x0;
    let mut f = residual_vec(bare, &x);
    let mut fnorm = f.norm();
    for it in 0..MAX_NEWTON_ITERATIONS {
        if fnorm < tol {
            return NewtonOutcome {
                x,
                residual: fnorm,
                iterations: it,
                converged: true,
            };
        }
        let step = match jacobian(bare, &x).lu().solve(&(-f)) {
            Some(s) if s.iter().all(|v| v.is_finite()) => s,
            _ => break,
        };
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let trial = x + step * lambda;
            let ft = residual_vec(bare, &trial);
            let nt = ft.norm();
            if nt.is_finite() && nt < (1.0 - 1e-4 * lambda) * fnorm {
                x = trial;
                f = ft;
                fnorm = nt;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if !accepted {
            // Take the full step once the residual is at rounding level.
            let trial = x + step;
            let nt = residual_vec(bare, &trial).norm();
            if nt < tol {
                x = trial;
                fnorm = nt;
                continue;
            }
            return NewtonOutcome {
                x,
                residual: fnorm,
                iterations: it + 1,
                converged: false,
            };
        }
    }
    NewtonOutcome {
        x,
        residual: fnorm,
        converged: fnorm < tol,
        iterations: MAX_NEWTON_ITERATIONS,
    }
}

fn classify(bare: &BareConfig, x: &Vector4<f64>, residual: f64) -> Result<MeanFieldState> {
    let mut s = MeanFieldState::from_magnons(bare, Complex64::new(x[0], x[1]), Complex64::new(x[2], x[3]));
    s.residual_norm = residual;
    let eff = derive_effective(bare, s.nb2(), s.nc2())?;
    s.stable = is_stable(&build_drift(&eff))?.stable;
    Ok(s)
}

fn failure(bare: &BareConfig, out: &NewtonOutcome) -> Error {
    Error::SolverFailure {
        iterations: out.iterations,
        residual: out.residual,
        best: Box::new({
            let mut s = MeanFieldState::from_magnons(
                bare,
                Complex64::new(out.x[0], out.x[1]),
                Complex64::new(out.x[2], out.x[3]),
            );
            s.residual_norm = out.residual;
            s
        }),
    }
}

fn scaled_drive(bare: &BareConfig, s: f64) -> BareConfig {
    let mut b = bare.clone();
    b.drive_b *= s;
    b.drive_c *= s;
    b
}

// Solution of the system with every nonlinearity removed; exact at small drive.
fn linear_guess(bare: &BareConfig) -> Vector4<f64> {
    let cav = bare.g_ab * bare.g_ab / Complex64::new(bare.gamma_a, bare.delta_a);
    let b = -I * bare.drive_b / (Complex64::new(bare.gamma_b, bare.delta_b) + cav);
    let c = -I * bare.drive_c / Complex64::new(bare.gamma_c, bare.delta_c);
    Vector4::new(b.re, b.im, c.re, c.im)
}

// Geometric ramp of the drive from 1e-6 of its value, each step seeded with
// the previous solution.
fn continuation(bare: &BareConfig) -> std::result::Result<Vector4<f64>, NewtonOutcome> {
    let n = CONTINUATION_STEPS;
    let mut x = linear_guess(&scaled_drive(bare, 1e-6));
    for k in 0..n {
        let s = 10f64.powf(-6.0 * (n - 1 - k) as f64 / (n - 1) as f64);
        let step_cfg = scaled_drive(bare, s);
        let out = newton(&step_cfg, x, tolerance(&step_cfg));
        if !out.converged {
            return Err(out);
        }
        x = out.x;
    }
    Ok(x)
}

/// Converged fixed point, from `seed` if given, else by drive continuation
/// from zero. Unstable fixed points are returned with `stable = false`.
pub fn solve_mean_field(bare: &BareConfig, seed: Option<&MeanFieldState>) -> Result<MeanFieldState> {
    bare.check()?;
    let tol = tolerance(bare);
    if bare.drive_b == 0.0 && bare.drive_c == 0.0 && seed.is_none() {
        return classify(bare, &Vector4::zeros(), 0.0);
    }
    let x = match seed {
        Some(s) => {
            let out = newton(bare, s.unknowns(), tol);
            if !out.converged {
                return Err(failure(bare, &out));
            }
            out.x
        }
        None => match continuation(bare) {
            Ok(x) => x,
            Err(out) => {
                // Fall back to a direct solve from the linear guess.
                let direct = newton(bare, linear_guess(bare), tol);
                if !direct.converged {
                    return Err(failure(bare, if direct.residual < out.residual { &direct } else { &out }));
                }
                direct.x
            }
        },
    };
    let res = residual_vec(bare, &x).norm();
    classify(bare, &x, res)
}

fn same_branch(a: &MeanFieldState, b: &MeanFieldState) -> bool {
    let d = (a.unknowns() - b.unknowns()).norm();
    let scale = a.unknowns().norm().max(b.unknowns().norm());
    d <= DEDUP_TOLERANCE * scale || d == 0.0
}

/// Largest occupation any fixed point can have: each magnon equation forces
/// `|amp| ≤ |Ω| / γ`, the cavity only adding damping.
pub fn occupation_bound(bare: &BareConfig) -> f64 {
    let b = bare.drive_b / bare.gamma_b;
    let c = bare.drive_c / bare.gamma_c;
    b * b + c * c
}

/// Distinct fixed points found by continuation plus `n_seeds` random seeds
/// drawn uniformly from the disk of admissible occupations. Sorted by total
/// occupation; seeds that fail to converge are dropped.
pub fn branch_scan<R: Rng + ?Sized>(
    bare: &BareConfig,
    n_seeds: usize,
    rng: &mut R,
) -> Result<Vec<MeanFieldState>> {
    if n_seeds == 0 {
        return Err(Error::InvalidArgument("branch scan needs at least one seed".into()));
    }
    bare.check()?;
    let tol = tolerance(bare);
    let mut found: Vec<MeanFieldState> = Vec::new();
    let push = |s: MeanFieldState, found: &mut Vec<MeanFieldState>| {
        if !found.iter().any(|f| same_branch(f, &s)) {
            found.push(s);
        }
    };
    if let Ok(s) = solve_mean_field(bare, None) {
        push(s, &mut found);
    }
    let cap = occupation_bound(bare).min(SEED_OCCUPATION_CAP);
    let b_on = bare.drive_b != 0.0 || bare.g_ab != 0.0;
    let c_on = bare.drive_c != 0.0;
    for _ in 0..n_seeds {
        let mut draw = |on: bool| {
            if !on || cap == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            let r = (rng.random_range(0.0..=1.0) * cap).sqrt();
            Complex64::from_polar(r, rng.random_range(0.0..std::f64::consts::TAU))
        };
        let b = draw(b_on);
        let c = draw(c_on);
        let out = newton(bare, Vector4::new(b.re, b.im, c.re, c.im), tol);
        if out.converged {
            push(classify(bare, &out.x, out.residual)?, &mut found);
        }
    }
    found.sort_by(|a, b| (a.nb2() + a.nc2()).total_cmp(&(b.nb2() + b.nc2())));
    Ok(found)
}

/// Default operating point: the continuation branch when it is stable,
/// otherwise the stable branch with the smallest occupation, otherwise the
/// continuation branch itself.
pub fn default_branch<R: Rng + ?Sized>(
    bare: &BareConfig,
    n_seeds: usize,
    rng: &mut R,
) -> Result<MeanFieldState> {
    let cont = solve_mean_field(bare, None);
    if let Ok(s) = &cont {
        if s.stable {
            return cont;
        }
    }
    let branches = branch_scan(bare, n_seeds, rng)?;
    if let Some(s) = branches.iter().find(|s| s.stable) {
        return Ok(s.clone());
    }
    cont
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{mhz, nhz, reference_bare};
    use proptest::prelude::{prop_assert, proptest, ProptestConfig};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn undriven() -> BareConfig {
        let mut b = reference_bare();
        b.omega_a = None;
        b.omega_b = None;
        b.omega_c = None;
        b.omega_d = None;
        b
    }

    fn linear(drive_b: f64, drive_c: f64, g: f64) -> BareConfig {
        let mut b = undriven();
        b.kerr_b = 0.0;
        b.kerr_c = 0.0;
        b.cross_kerr = 0.0;
        b.g_ab = g;
        b.drive_b = drive_b;
        b.drive_c = drive_c;
        b
    }

    // Only mode c is driven and nonlinear.
    fn kerr_only(delta: f64, kerr: f64, gamma: f64, drive: f64) -> BareConfig {
        let mut b = linear(0.0, drive, 0.0);
        b.delta_c = delta;
        b.kerr_c = kerr;
        b.gamma_c = gamma;
        b
    }

    fn cubic(n: f64, delta: f64, kerr: f64, gamma: f64, drive: f64) -> f64 {
        let d = delta + 2.0 * kerr * n;
        n * (d * d + gamma * gamma) - drive * drive
    }

    // Brute-force roots of the occupation cubic: sign changes on a uniform
    // grid over [0, Ω²/γ²], refined by bisection.
    fn scan_roots(delta: f64, kerr: f64, gamma: f64, drive: f64) -> Vec<f64> {
        let top = drive * drive / (gamma * gamma);
        let m = 200_000;
        let f = |n: f64| cubic(n, delta, kerr, gamma, drive);
        let mut roots = Vec::new();
        let mut lo = 0.0;
        let mut flo = f(lo);
        for k in 1..=m {
            let hi = top * k as f64 / m as f64;
            let fhi = f(hi);
            if flo == 0.0 {
                roots.push(lo);
            } else if flo * fhi < 0.0 {
                let (mut a, mut b) = (lo, hi);
                for _ in 0..200 {
                    let mid = 0.5 * (a + b);
                    if mid <= a || mid >= b {
                        break;
                    }
                    if f(a) * f(mid) <= 0.0 {
                        b = mid;
                    } else {
                        a = mid;
                    }
                }
                roots.push(0.5 * (a + b));
            }
            lo = hi;
            flo = fhi;
        }
        roots
    }

    // Term-by-term re-evaluation of the steady-state equations, including
    // the cavity amplitude explicitly.
    fn oracle_residual(bare: &BareConfig, a: Complex64, b: Complex64, c: Complex64) -> [f64; 4] {
        let i = Complex64::i();
        let fb = -(i * bare.delta_b + bare.gamma_b) * b
            - 2.0 * i * bare.kerr_b * b.conj() * b * b
            - i * bare.cross_kerr * c.conj() * c * b
            - i * bare.g_ab * a
            - i * bare.drive_b;
        let fc = -(i * bare.delta_c + bare.gamma_c) * c
            - 2.0 * i * bare.kerr_c * c.conj() * c * c
            - i * bare.cross_kerr * b.conj() * b * c
            - i * bare.drive_c;
        [fb.re, fb.im, fc.re, fc.im]
    }

    #[test]
    fn cavity_elimination() {
        let b = undriven();
        assert_eq!(eliminate_cavity(Complex64::new(0.0, 0.0), &b), Complex64::new(0.0, 0.0));
        let mut d = b.clone();
        d.g_ab = 0.0;
        assert_eq!(eliminate_cavity(Complex64::new(3.0, -1.0), &d).norm(), 0.0);
        let mut e = b.clone();
        e.delta_a = 0.0;
        e.gamma_a = mhz(1.0);
        e.g_ab = mhz(1.0);
        let a = eliminate_cavity(Complex64::new(1.0, 0.0), &e);
        assert!((a - Complex64::new(0.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn undriven_origin_is_fixed_point() {
        let b = undriven();
        let s = solve_mean_field(&b, None).unwrap();
        assert_eq!(mean_field_residual(&s, &b), [0.0; 4]);
        assert_eq!(s.b_amp.norm(), 0.0);
        assert!(s.stable);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(branch_scan(&b, 8, &mut rng).unwrap().len(), 1);
    }

    #[test]
    fn linear_closed_form() {
        let bare = linear(mhz(5e4), mhz(-3e4), 0.0);
        let s = solve_mean_field(&bare, None).unwrap();
        let b = -I * bare.drive_b / Complex64::new(bare.gamma_b, bare.delta_b);
        let c = -I * bare.drive_c / Complex64::new(bare.gamma_c, bare.delta_c);
        assert!((s.b_amp - b).norm() <= 1e-12 * b.norm());
        assert!((s.c_amp - c).norm() <= 1e-12 * c.norm());
        assert!(s.stable);
        let res = mean_field_residual(&MeanFieldState::from_magnons(&bare, b, c), &bare);
        assert!(res[2].abs() < 1e-6 && res[3].abs() < 1e-6);
    }

    #[test]
    fn linear_system_has_one_branch() {
        let bare = linear(mhz(5e4), mhz(2e4), mhz(30.0));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(branch_scan(&bare, 16, &mut rng).unwrap().len(), 1);
    }

    #[test]
    fn residual_matches_term_by_term_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut bare = undriven();
        bare.kerr_b = nhz(0.3);
        bare.drive_b = mhz(1e9);
        bare.drive_c = mhz(-4e8);
        for _ in 0..50 {
            let b = Complex64::new(rng.random_range(-3e8..3e8), rng.random_range(-3e8..3e8));
            let c = Complex64::new(rng.random_range(-3e8..3e8), rng.random_range(-3e8..3e8));
            let s = MeanFieldState::from_magnons(&bare, b, c);
            let got = mean_field_residual(&s, &bare);
            let want = oracle_residual(&bare, s.a_amp, b, c);
            let scale = want.iter().fold(0f64, |m, x| m.max(x.abs()));
            for k in 0..4 {
                assert!((got[k] - want[k]).abs() <= 1e-12 * scale);
            }
        }
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut bare = undriven();
        bare.drive_b = mhz(1e9);
        bare.drive_c = mhz(1e9);
        for _ in 0..20 {
            let x = Vector4::from_fn(|_, _| rng.random_range(-3e8..3e8));
            let j = jacobian(&bare, &x);
            for col in 0..4 {
                let h = 1e-6 * x.norm();
                let mut xp = x;
                let mut xm = x;
                xp[col] += h;
                xm[col] -= h;
                let fd = (residual_vec(&bare, &xp) - residual_vec(&bare, &xm)) / (2.0 * h);
                let err = (fd - j.column(col)).norm();
                assert!(err <= 1e-6 * j.column(col).norm().max(1.0), "col {col}: {err}");
            }
        }
    }

    #[test]
    fn kerr_cubic_three_branches() {
        // Bistable: Δ < −√3 γ and drive between the two fold points.
        let (delta, kerr, gamma) = (mhz(-100.0), nhz(0.6), mhz(6.7));
        let n_mid = 2e16;
        let d = delta + 2.0 * kerr * n_mid;
        let drive = (n_mid * (d * d + gamma * gamma)).sqrt();
        let roots = scan_roots(delta, kerr, gamma, drive);
        assert_eq!(roots.len(), 3, "{roots:?}");
        let bare = kerr_only(delta, kerr, gamma, drive);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let branches = branch_scan(&bare, 64, &mut rng).unwrap();
        assert_eq!(branches.len(), 3);
        for (s, r) in branches.iter().zip(&roots) {
            assert!((s.nc2() - r).abs() <= 1e-8 * r, "{} vs {r}", s.nc2());
            assert!(s.residual_norm < tolerance(&bare));
        }
        let flags: Vec<bool> = branches.iter().map(|s| s.stable).collect();
        assert_eq!(flags, [true, false, true]);
        let def = default_branch(&bare, 16, &mut rng).unwrap();
        assert!(def.stable);
        assert!((def.nc2() - roots[0]).abs() <= 1e-8 * roots[0]);
    }

    #[test]
    fn continuation_is_smooth_away_from_folds() {
        let mut bare = reference_bare();
        bare.omega_d = None;
        bare.drive_b = mhz(3e8);
        bare.drive_c = mhz(1e8);
        let s0 = solve_mean_field(&bare, None).unwrap();
        for f in [1.0 + 1e-6, 1.0 - 1e-6] {
            let s = solve_mean_field(&scaled_drive(&bare, f), Some(&s0)).unwrap();
            assert!((s.b_amp - s0.b_amp).norm() < 1e-3 * s0.b_amp.norm());
            assert!((s.c_amp - s0.c_amp).norm() < 1e-3 * s0.c_amp.norm());
        }
    }

    #[test]
    fn imaginary_parts_vanish_with_damping() {
        let mut bare = reference_bare();
        bare.omega_d = None;
        bare.drive_b = mhz(2e8);
        bare.drive_c = mhz(1e8);
        let s1 = solve_mean_field(&bare, None).unwrap();
        let mut weak = bare.clone();
        weak.gamma_a *= 1e-3;
        weak.gamma_b *= 1e-3;
        weak.gamma_c *= 1e-3;
        let s2 = solve_mean_field(&weak, Some(&s1)).unwrap();
        for (x1, x2) in [(s1.b_amp, s2.b_amp), (s1.c_amp, s2.c_amp)] {
            let ratio = (x2.im / x2.re) / (x1.im / x1.re);
            assert!((ratio - 1e-3).abs() < 1e-4, "{ratio}");
        }
    }

    #[test]
    fn rejects_invalid_config() {
        let mut b = undriven();
        b.gamma_b = 0.0;
        assert!(solve_mean_field(&b, None).is_err());
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(branch_scan(&undriven(), 0, &mut rng).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn converged_states_meet_tolerance(
            wb in 0.0f64..3e8, wc in 0.0f64..3e8, seed in 0u64..1000,
        ) {
            let mut bare = reference_bare();
            bare.omega_d = None;
            bare.drive_b = mhz(wb);
            bare.drive_c = mhz(wc);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for s in branch_scan(&bare, 4, &mut rng).unwrap() {
                let r = mean_field_residual(&s, &bare);
                let n = r.iter().map(|x| x * x).sum::<f64>().sqrt();
                prop_assert!(n < tolerance(&bare));
            }
        }
    }
}
