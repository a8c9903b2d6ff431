//! Gaussian-state entanglement measures on the three-mode covariance matrix.
//!
//! Vacuum variance is 1/2, so the logarithmic negativity of a bipartition is
//! `max(0, −ln 2ν⁻)` where `ν⁻` is the smallest symplectic eigenvalue of the
//! partially transposed covariance matrix.

use std::fmt;

use nalgebra::{DMatrix, Matrix2, Matrix4, Matrix6};
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg;

/// Lower bound on symplectic eigenvalues accepted as physical.
pub const PHYSICAL_TOLERANCE: f64 = 1e-9;
/// `E = 0` whenever `2ν⁻ ≥ 1 − ZERO_NEGATIVITY_BAND`.
pub const ZERO_NEGATIVITY_BAND: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    /// Cavity photons.
    A,
    /// Kittel magnons.
    B,
    /// Higher-order magnetostatic magnons.
    C,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::A, Mode::B, Mode::C];

    pub fn index(self) -> usize {
        match self {
            Mode::A => 0,
            Mode::B => 1,
            Mode::C => 2,
        }
    }

    /// The two other modes, in order.
    pub fn others(self) -> (Mode, Mode) {
        match self {
            Mode::A => (Mode::B, Mode::C),
            Mode::B => (Mode::A, Mode::C),
            Mode::C => (Mode::A, Mode::B),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::A => "a",
            Mode::B => "b",
            Mode::C => "c",
        })
    }
}

/// Symmetric 6×6 covariance of `(X_a, Y_a, X_b, Y_b, X_c, Y_c)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CovarianceMatrix(Matrix6<f64>);

impl CovarianceMatrix {
    /// Checks symmetry to 1e-12 relative to the largest entry.
    pub fn new(m: Matrix6<f64>) -> Result<Self> {
        let asym = (m - m.transpose()).amax();
        if asym > 1e-12 * m.amax().max(f64::MIN_POSITIVE) {
            return Err(Error::InvalidArgument(format!(
                "covariance matrix is not symmetric (max asymmetry {asym:e})"
            )));
        }
        Ok(CovarianceMatrix((m + m.transpose()) * 0.5))
    }

    pub(crate) fn new_unchecked(m: Matrix6<f64>) -> Self {
        CovarianceMatrix(m)
    }

    pub fn entries(&self) -> &Matrix6<f64> {
        &self.0
    }

    pub fn to_dmatrix(&self) -> DMatrix<f64> {
        DMatrix::from_column_slice(6, 6, self.0.as_slice())
    }

    /// 4×4 covariance of a pair of modes, in the given order.
    pub fn pair_block(&self, first: Mode, second: Mode) -> Matrix4<f64> {
        let idx = [
            2 * first.index(),
            2 * first.index() + 1,
            2 * second.index(),
            2 * second.index() + 1,
        ];
        Matrix4::from_fn(|i, j| self.0[(idx[i], idx[j])])
    }
}

/// Standard symplectic form `⊕ [[0, 1], [−1, 0]]` on `n` modes.
pub fn symplectic_form(n: usize) -> DMatrix<f64> {
    let mut om = DMatrix::zeros(2 * n, 2 * n);
    for k in 0..n {
        om[(2 * k, 2 * k + 1)] = 1.0;
        om[(2 * k + 1, 2 * k)] = -1.0;
    }
    om
}

fn flip_momenta(m: &DMatrix<f64>, flipped: &[usize]) -> DMatrix<f64> {
    let mut out = m.clone();
    for &k in flipped {
        let y = 2 * k + 1;
        for j in 0..out.ncols() {
            out[(y, j)] = -out[(y, j)];
        }
        for i in 0..out.nrows() {
            out[(i, y)] = -out[(i, y)];
        }
    }
    out
}

/// `P V P` with `P` flipping the sign of `Y` for every transposed mode.
pub fn partial_transpose(v: &CovarianceMatrix, modes: &[Mode]) -> Result<Matrix6<f64>> {
    let mut set: Vec<usize> = modes.iter().map(|m| m.index()).collect();
    set.sort_unstable();
    set.dedup();
    if set.is_empty() || set.len() == 3 {
        return Err(Error::InvalidArgument(
            "partial transpose needs a non-empty proper subset of modes".into(),
        ));
    }
    let out = flip_momenta(&v.to_dmatrix(), &set);
    Ok(Matrix6::from_column_slice(out.as_slice()))
}

/// Symplectic eigenvalues of a symmetric `2n × 2n` matrix, ascending.
///
/// These are the moduli of the eigenvalues of `Ω M`, which come in `±iν`
/// pairs. Sorted moduli are paired off, so exactly `n` values are returned
/// even when the spectrum is degenerate.
pub fn symplectic_eigenvalues(m: &DMatrix<f64>) -> Result<Vec<f64>> {
    let dim = m.nrows();
    if dim % 2 != 0 || !m.is_square() {
        return Err(Error::InvalidArgument(format!(
            "symplectic spectrum needs an even square matrix, got {}×{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let n = dim / 2;
    let om = symplectic_form(n);
    let ev = linalg::eigenvalues(&(om * m))?;
    let mut moduli: Vec<f64> = ev.iter().map(|z| z.norm()).collect();
    moduli.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    Ok(moduli.chunks(2).map(|p| 0.5 * (p[0] + p[1])).collect())
}

fn negativity_from_nu(nu: f64) -> f64 {
    if 2.0 * nu >= 1.0 - ZERO_NEGATIVITY_BAND {
        0.0
    } else {
        -(2.0 * nu).ln()
    }
}

/// Smallest symplectic eigenvalue of the partially transposed two-mode CM
/// `[[A, C], [Cᵀ, B]]` from its local invariants.
pub fn two_mode_nu_minus_closed_form(v4: &Matrix4<f64>) -> f64 {
    let a = v4.fixed_view::<2, 2>(0, 0).determinant();
    let b = v4.fixed_view::<2, 2>(2, 2).determinant();
    let c = v4.fixed_view::<2, 2>(0, 2).determinant();
    let sigma = a + b - 2.0 * c;
    let det = v4.determinant();
    let disc = (sigma * sigma - 4.0 * det).max(0.0);
    ((sigma - disc.sqrt()) / 2.0).max(0.0).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairNegativity {
    pub value: f64,
    /// `ν⁻` from the generic eigensolver.
    pub nu_minus: f64,
    /// `ν⁻` from the two-mode closed form.
    pub nu_minus_closed: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Physicality {
    pub physical: bool,
    pub nu_min: f64,
    /// `max(0, 1/2 − ν_min)`.
    pub defect: f64,
}

pub fn physicality_check(v: &CovarianceMatrix) -> Result<Physicality> {
    let nu = symplectic_eigenvalues(&v.to_dmatrix())?;
    let nu_min = nu[0];
    Ok(Physicality {
        physical: nu_min >= 0.5 - PHYSICAL_TOLERANCE,
        nu_min,
        defect: (0.5 - nu_min).max(0.0),
    })
}

fn require_physical(v: &CovarianceMatrix) -> Result<()> {
    let p = physicality_check(v)?;
    if p.physical {
        Ok(())
    } else {
        Err(Error::Unphysical { nu_min: p.nu_min })
    }
}

fn pair_negativity(v: &CovarianceMatrix, pair: (Mode, Mode)) -> Result<PairNegativity> {
    if pair.0 == pair.1 {
        return Err(Error::InvalidArgument("pair needs two distinct modes".into()));
    }
    let v4 = v.pair_block(pair.0, pair.1);
    let mut pt = v4;
    for k in 0..4 {
        pt[(1, k)] = -pt[(1, k)];
        pt[(k, 1)] = -pt[(k, 1)];
    }
    let nu = symplectic_eigenvalues(&DMatrix::from_column_slice(4, 4, pt.as_slice()))?;
    let nu_minus = nu[0];
    Ok(PairNegativity {
        value: negativity_from_nu(nu_minus),
        nu_minus,
        nu_minus_closed: two_mode_nu_minus_closed_form(&v4),
    })
}

fn one_vs_two(v: &CovarianceMatrix, single: Mode) -> Result<f64> {
    let pt = flip_momenta(&v.to_dmatrix(), &[single.index()]);
    let nu = symplectic_eigenvalues(&pt)?;
    Ok(negativity_from_nu(nu[0]))
}

/// Logarithmic negativity between two modes; the first mode is transposed.
pub fn log_negativity_pair(v: &CovarianceMatrix, pair: (Mode, Mode)) -> Result<PairNegativity> {
    require_physical(v)?;
    pair_negativity(v, pair)
}

/// Logarithmic negativity of `single` against the other two modes.
pub fn log_negativity_one_vs_two(v: &CovarianceMatrix, single: Mode) -> Result<f64> {
    require_physical(v)?;
    one_vs_two(v, single)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResidualContangle {
    pub a_bc: f64,
    pub b_ac: f64,
    pub c_ab: f64,
    pub min: f64,
}

fn contangle_from(pairs: &PairValues, split: [f64; 3]) -> ResidualContangle {
    let c = |x: f64| x * x;
    let a_bc = c(split[0]) - c(pairs.ab) - c(pairs.ac);
    let b_ac = c(split[1]) - c(pairs.ab) - c(pairs.bc);
    let c_ab = c(split[2]) - c(pairs.ac) - c(pairs.bc);
    ResidualContangle {
        a_bc,
        b_ac,
        c_ab,
        min: a_bc.min(b_ac).min(c_ab),
    }
}

struct PairValues {
    ab: f64,
    ac: f64,
    bc: f64,
}

/// Residual contangles `C_{i|jk} − C_{i|j} − C_{i|k}` with `C = E²`.
pub fn residual_contangle(v: &CovarianceMatrix) -> Result<ResidualContangle> {
    require_physical(v)?;
    let pairs = PairValues {
        ab: pair_negativity(v, (Mode::A, Mode::B))?.value,
        ac: pair_negativity(v, (Mode::A, Mode::C))?.value,
        bc: pair_negativity(v, (Mode::B, Mode::C))?.value,
    };
    let split = [
        one_vs_two(v, Mode::A)?,
        one_vs_two(v, Mode::B)?,
        one_vs_two(v, Mode::C)?,
    ];
    Ok(contangle_from(&pairs, split))
}

/// Mean excitation numbers `(⟨X²⟩ + ⟨Y²⟩ − 1)/2` of the three modes.
pub fn excitation_numbers(v: &CovarianceMatrix) -> [f64; 3] {
    let m = v.entries();
    [0, 1, 2].map(|k| 0.5 * (m[(2 * k, 2 * k)] + m[(2 * k + 1, 2 * k + 1)] - 1.0))
}

/// Every entanglement measure of a physical steady state.
#[derive(Clone, Debug, PartialEq)]
pub struct Measures {
    pub e_ab: f64,
    pub e_ac: f64,
    pub e_bc: f64,
    pub e_a_bc: f64,
    pub e_b_ac: f64,
    pub e_c_ab: f64,
    pub contangle: ResidualContangle,
    pub n_a: f64,
    pub n_b: f64,
    pub n_c: f64,
    /// Smallest symplectic eigenvalue of the (untransposed) covariance.
    pub nu_min: f64,
}

impl Measures {
    pub fn r_min(&self) -> f64 {
        self.contangle.min
    }

    pub fn from_covariance(v: &CovarianceMatrix) -> Result<Self> {
        let phys = physicality_check(v)?;
        if !phys.physical {
            return Err(Error::Unphysical { nu_min: phys.nu_min });
        }
        let ab = pair_negativity(v, (Mode::A, Mode::B))?.value;
        let ac = pair_negativity(v, (Mode::A, Mode::C))?.value;
        let bc = pair_negativity(v, (Mode::B, Mode::C))?.value;
        let split = [
            one_vs_two(v, Mode::A)?,
            one_vs_two(v, Mode::B)?,
            one_vs_two(v, Mode::C)?,
        ];
        let contangle = contangle_from(&PairValues { ab, ac, bc }, split);
        let [n_a, n_b, n_c] = excitation_numbers(v);
        Ok(Measures {
            e_ab: ab,
            e_ac: ac,
            e_bc: bc,
            e_a_bc: split[0],
            e_b_ac: split[1],
            e_c_ab: split[2],
            contangle,
            n_a,
            n_b,
            n_c,
            nu_min: phys.nu_min,
        })
    }
}

/// Result of one steady-state evaluation. Unstable points carry no measures.
#[derive(Clone, Debug, PartialEq)]
pub struct EntanglementReport {
    pub stable: bool,
    /// Largest real part of the drift eigenvalues, rad/s.
    pub margin: f64,
    pub measures: Option<Measures>,
}

/// Random symplectic matrix on `n` modes built from rotations, single-mode
/// squeezers and beam splitters.
pub fn random_symplectic<R: Rng + ?Sized>(rng: &mut R, n: usize, max_squeeze: f64) -> DMatrix<f64> {
    let dim = 2 * n;
    let mut s = DMatrix::<f64>::identity(dim, dim);
    for _ in 0..3 * n {
        for k in 0..n {
            let phi = rng.random_range(0.0..std::f64::consts::TAU);
            let (sn, cs) = phi.sin_cos();
            let mut g = DMatrix::<f64>::identity(dim, dim);
            g.view_mut((2 * k, 2 * k), (2, 2))
                .copy_from(&Matrix2::new(cs, sn, -sn, cs));
            s = g * s;
            let r = rng.random_range(-max_squeeze..max_squeeze);
            let mut g = DMatrix::<f64>::identity(dim, dim);
            g[(2 * k, 2 * k)] = (-r).exp();
            g[(2 * k + 1, 2 * k + 1)] = r.exp();
            s = g * s;
        }
        if n > 1 {
            let j = rng.random_range(0..n);
            let mut k = rng.random_range(0..n - 1);
            if k >= j {
                k += 1;
            }
            let th = rng.random_range(0.0..std::f64::consts::TAU);
            let (sn, cs) = th.sin_cos();
            let mut g = DMatrix::<f64>::identity(dim, dim);
            for q in 0..2 {
                let (x, y) = (2 * j + q, 2 * k + q);
                g[(x, x)] = cs;
                g[(x, y)] = sn;
                g[(y, x)] = -sn;
                g[(y, y)] = cs;
            }
            s = g * s;
        }
    }
    s
}

/// Random physical covariance `S diag(ν) Sᵀ` on `n` modes together with its
/// symplectic eigenvalues `ν_k = n_k + 1/2`.
pub fn random_physical<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    max_squeeze: f64,
    max_thermal: f64,
) -> (DMatrix<f64>, Vec<f64>) {
    let s = random_symplectic(rng, n, max_squeeze);
    let nus: Vec<f64> = (0..n).map(|_| 0.5 + rng.random_range(0.0..max_thermal)).collect();
    let d = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        2 * n,
        nus.iter().flat_map(|&x| [x, x]),
    ));
    let v = &s * d * s.transpose();
    let v = (&v + v.transpose()) * 0.5;
    let mut sorted = nus;
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    (v, sorted)
}

/// Two-mode squeezed vacuum with squeezing `r` as a 4×4 covariance.
pub fn two_mode_squeezed(r: f64) -> Matrix4<f64> {
    let ch = 0.5 * (2.0 * r).cosh();
    let sh = 0.5 * (2.0 * r).sinh();
    #[rustfmt::skip]
    let m = Matrix4::new(
        ch,  0.0, sh,  0.0,
        0.0, ch,  0.0, -sh,
        sh,  0.0, ch,  0.0,
        0.0, -sh, 0.0, ch,
    );
    m
}

/// Embeds a two-mode covariance on `(first, second)` with the third mode in vacuum.
pub fn embed_pair(v4: &Matrix4<f64>, first: Mode, second: Mode) -> CovarianceMatrix {
    let mut m = Matrix6::identity() * 0.5;
    let idx = [
        2 * first.index(),
        2 * first.index() + 1,
        2 * second.index(),
        2 * second.index() + 1,
    ];
    for i in 0..4 {
        for j in 0..4 {
            m[(idx[i], idx[j])] = v4[(i, j)];
        }
    }
    CovarianceMatrix(m)
}
