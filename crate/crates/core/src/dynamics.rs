//! Linearized fluctuation dynamics: drift and diffusion matrices, stability
//! and the steady-state covariance.
//!
//! Quadratures are ordered `(X_a, Y_a, X_b, Y_b, X_c, Y_c)` with
//! `X = (o + o†)/√2`, `Y = i(o† − o)/√2`.

use nalgebra::{DMatrix, DVector, Matrix6};

use crate::error::{Error, Result};
use crate::gaussian::CovarianceMatrix;
use crate::linalg;
use crate::model::EffectiveConfig;

/// Relative width of the band around zero in which the largest eigenvalue
/// real part is treated as marginal.
pub const MARGINAL_TOLERANCE: f64 = 1e-9;

/// Relative Lyapunov residual accepted by [`solve_lyapunov`].
pub const LYAPUNOV_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DriftMatrix(pub Matrix6<f64>);

/// Diagonal noise matrix `D`; only the diagonal is stored.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiffusionMatrix(pub [f64; 6]);

impl DriftMatrix {
    pub fn entries(&self) -> &Matrix6<f64> {
        &self.0
    }

    /// Max absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..6)
            .map(|i| self.0.row(i).iter().map(|x| x.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

impl DiffusionMatrix {
    pub fn to_matrix(&self) -> Matrix6<f64> {
        Matrix6::from_diagonal(&self.0.into())
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

pub fn build_drift(cfg: &EffectiveConfig) -> DriftMatrix {
    let EffectiveConfig {
        delta_a,
        delta_b,
        delta_c,
        kerr_b,
        kerr_c,
        cross_kerr,
        g_ab,
        gamma_a,
        gamma_b,
        gamma_c,
        ..
    } = *cfg;
    let g2 = 2.0 * cross_kerr;
    #[rustfmt::skip]
    let m = Matrix6::new(
        -gamma_a,  delta_a,  0.0,                g_ab,               0.0,                0.0,
        -delta_a, -gamma_a, -g_ab,               0.0,                0.0,                0.0,
         0.0,      g_ab,    -gamma_b,            delta_b - kerr_b,   0.0,                0.0,
        -g_ab,     0.0,     -(delta_b + kerr_b), -gamma_b,           -g2,                0.0,
         0.0,      0.0,      0.0,                0.0,                -gamma_c,           delta_c - kerr_c,
         0.0,      0.0,     -g2,                 0.0,                -(delta_c + kerr_c), -gamma_c,
    );
    DriftMatrix(m)
}

pub fn build_diffusion(cfg: &EffectiveConfig) -> DiffusionMatrix {
    let a = cfg.gamma_a * (2.0 * cfg.n_a + 1.0);
    let b = cfg.gamma_b * (2.0 * cfg.n_b + 1.0);
    let c = cfg.gamma_c * (2.0 * cfg.n_c + 1.0);
    DiffusionMatrix([a, a, b, b, c, c])
}

#[derive(Clone, Debug, PartialEq)]
pub struct Stability {
    /// All eigenvalues strictly inside the left half-plane (and not marginal).
    pub stable: bool,
    /// Largest eigenvalue real part, rad/s.
    pub margin: f64,
    /// Margin within the marginal band around zero.
    pub marginal: bool,
    /// Verdict of the Routh-Hurwitz test on the characteristic polynomial.
    pub routh_hurwitz: bool,
}

impl Stability {
    /// Whether the eigenvalue and Routh-Hurwitz verdicts agree. Marginal
    /// matrices are excluded from the comparison.
    pub fn consistent(&self) -> bool {
        self.marginal || (self.margin < 0.0) == self.routh_hurwitz
    }
}

/// Stability of a general real square matrix by both eigenvalues and the
/// Routh-Hurwitz criterion.
pub fn stability_of(m: &DMatrix<f64>) -> Result<Stability> {
    let norm = (0..m.nrows())
        .map(|i| m.row(i).iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    if norm == 0.0 {
        return Ok(Stability {
            stable: false,
            margin: 0.0,
            marginal: true,
            routh_hurwitz: false,
        });
    }
    let ev = linalg::eigenvalues(m)?;
    let margin = ev.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
    let marginal = margin.abs() <= MARGINAL_TOLERANCE * norm;
    // Positive scaling leaves the sign pattern of the roots unchanged and
    // keeps the polynomial coefficients O(1).
    let scaled = m / norm;
    let rh = linalg::routh_hurwitz(&linalg::characteristic_polynomial(&scaled));
    Ok(Stability {
        stable: margin < 0.0 && !marginal,
        margin,
        marginal,
        routh_hurwitz: rh.stable,
    })
}

pub fn is_stable(a: &DriftMatrix) -> Result<Stability> {
    stability_of(&DMatrix::from_column_slice(6, 6, a.0.as_slice()))
}

fn lyapunov_residual(a: &Matrix6<f64>, v: &Matrix6<f64>, d: &Matrix6<f64>) -> Matrix6<f64> {
    a * v + v * a.transpose() + d
}

/// Steady-state covariance: the solution of `A V + V Aᵀ + D = 0`.
///
/// The equation is vectorized into a 36×36 Kronecker-sum system and solved
/// by LU with partial pivoting plus one step of iterative refinement.
pub fn solve_lyapunov(a: &DriftMatrix, d: &DiffusionMatrix) -> Result<CovarianceMatrix> {
    let stability = is_stable(a)?;
    if !stability.stable {
        return Err(Error::Unstable {
            margin: stability.margin,
        });
    }
    let am = a.0;
    let dm = d.to_matrix();
    // vec(AV + VAᵀ) = (I ⊗ A + A ⊗ I) vec(V), column-major vec.
    let id = Matrix6::<f64>::identity();
    let op = DMatrix::from_fn(36, 36, |row, col| {
        let (i, j) = (row % 6, row / 6);
        let (k, l) = (col % 6, col / 6);
        id[(j, l)] * am[(i, k)] + am[(j, l)] * id[(i, k)]
    });
    let lu = op.lu();
    let u = lu.u();
    let (umin, umax) = u
        .diagonal()
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), x| (lo.min(x.abs()), hi.max(x.abs())));
    if !(umin > 1e-14 * umax) {
        return Err(Error::Conditioning(format!(
            "Lyapunov operator is numerically singular (pivot ratio {:e})",
            umin / umax
        )));
    }
    let rhs = DVector::from_iterator(36, dm.iter().map(|x| -x));
    let x = lu
        .solve(&rhs)
        .ok_or_else(|| Error::Conditioning("LU solve failed".into()))?;
    let mut v = Matrix6::from_column_slice(x.as_slice());
    let r = lyapunov_residual(&am, &v, &dm);
    let corr = lu
        .solve(&DVector::from_iterator(36, r.iter().map(|x| -x)))
        .ok_or_else(|| Error::Conditioning("LU solve failed".into()))?;
    v += Matrix6::from_column_slice(corr.as_slice());
    v = (v + v.transpose()) * 0.5;

    let res = lyapunov_residual(&am, &v, &dm).amax();
    let dmax = d.max_abs();
    if res > LYAPUNOV_TOLERANCE * dmax {
        return Err(Error::Conditioning(format!(
            "Lyapunov residual {res:e} exceeds {:e}",
            LYAPUNOV_TOLERANCE * dmax
        )));
    }
    Ok(CovarianceMatrix::new_unchecked(v))
}

/// Integrates `dV/dt = A V + V Aᵀ + D` from `v0` with classical RK4.
///
/// Verification oracle for [`solve_lyapunov`]; the step is shortened so that
/// an integer number of steps lands exactly on `t_final`.
pub fn integrate_transient(
    a: &DriftMatrix,
    d: &DiffusionMatrix,
    v0: &CovarianceMatrix,
    t_final: f64,
    dt: f64,
) -> Result<CovarianceMatrix> {
    if !(dt > 0.0) || !(t_final > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "need dt > 0 and t_final > 0 (dt = {dt}, t_final = {t_final})"
        )));
    }
    let steps = (t_final / dt).ceil() as u64;
    let h = t_final / steps as f64;
    let am = a.0;
    let at = am.transpose();
    let dm = d.to_matrix();
    let f = |v: &Matrix6<f64>| am * v + v * at + dm;
    let mut v = *v0.entries();
    for step in 0..steps {
        let k1 = f(&v);
        let k2 = f(&(v + k1 * (0.5 * h)));
        let k3 = f(&(v + k2 * (0.5 * h)));
        let k4 = f(&(v + k3 * h));
        v += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        if step % 1024 == 0 && !v.iter().all(|x| x.is_finite() && x.abs() < 1e150) {
            return Err(Error::Integration(format!(
                "state blew up after {step} steps (h = {h:e})"
            )));
        }
    }
    if !v.iter().all(|x| x.is_finite()) {
        return Err(Error::Integration("non-finite final state".into()));
    }
    Ok(CovarianceMatrix::new_unchecked((v + v.transpose()) * 0.5))
}

/// Default RK4 step for the transient oracle: `0.01 / max |A_ij|`.
pub fn default_transient_step(a: &DriftMatrix) -> f64 {
    0.01 / a.max_abs()
}
