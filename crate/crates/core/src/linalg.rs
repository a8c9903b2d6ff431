//! Small dense eigenvalue and characteristic-polynomial routines.
//!
//! The matrices here are at most 6×6, so everything works on a copied
//! row-major buffer: balancing, Householder reduction to upper Hessenberg
//! form, then the Francis double-shift QR iteration.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

const MAX_QR_ITERATIONS: usize = 60;

struct Dense {
    n: usize,
    data: Vec<f64>,
}

impl Dense {
    fn from_matrix(m: &DMatrix<f64>) -> Self {
        let n = m.nrows();
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                data[i * n + j] = m[(i, j)];
            }
        }
        Dense { n, data }
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    /// Diagonal similarity by powers of two so that row and column norms match.
    fn balance(&mut self) {
        const RADIX: f64 = 2.0;
        let n = self.n;
        let sqrdx = RADIX * RADIX;
        let mut done = false;
        while !done {
            done = true;
            for i in 0..n {
                let mut r = 0.0;
                let mut c = 0.0;
                for j in 0..n {
                    if j != i {
                        c += self.at(j, i).abs();
                        r += self.at(i, j).abs();
                    }
                }
                if c == 0.0 || r == 0.0 {
                    continue;
                }
                let s = c + r;
                let mut f = 1.0;
                let mut g = r / RADIX;
                while c < g {
                    f *= RADIX;
                    c *= sqrdx;
                }
                g = r * RADIX;
                while c > g {
                    f /= RADIX;
                    c /= sqrdx;
                }
                if (c + r) / f < 0.95 * s {
                    done = false;
                    let ginv = 1.0 / f;
                    for j in 0..n {
                        self.data[i * n + j] *= ginv;
                    }
                    for j in 0..n {
                        self.data[j * n + i] *= f;
                    }
                }
            }
        }
    }

    /// Orthogonal reduction to upper Hessenberg form.
    fn hessenberg(&mut self) {
        let n = self.n;
        if n < 3 {
            return;
        }
        let mut v = vec![0.0; n];
        for k in 0..n - 2 {
            let mut norm = 0.0;
            for i in k + 1..n {
                norm += self.at(i, k) * self.at(i, k);
            }
            let norm = norm.sqrt();
            if norm == 0.0 {
                continue;
            }
            let x0 = self.at(k + 1, k);
            let alpha = if x0 > 0.0 { -norm } else { norm };
            v.iter_mut().for_each(|x| *x = 0.0);
            v[k + 1] = x0 - alpha;
            for i in k + 2..n {
                v[i] = self.at(i, k);
            }
            let vnorm2: f64 = v[k + 1..].iter().map(|x| x * x).sum();
            if vnorm2 == 0.0 {
                continue;
            }
            // A <- H A
            for j in 0..n {
                let dot: f64 = (k + 1..n).map(|i| v[i] * self.at(i, j)).sum();
                let f = 2.0 * dot / vnorm2;
                for i in k + 1..n {
                    let val = self.at(i, j) - f * v[i];
                    self.set(i, j, val);
                }
            }
            // A <- A H
            for i in 0..n {
                let dot: f64 = (k + 1..n).map(|j| self.at(i, j) * v[j]).sum();
                let f = 2.0 * dot / vnorm2;
                for j in k + 1..n {
                    let val = self.at(i, j) - f * v[j];
                    self.set(i, j, val);
                }
            }
            for i in k + 2..n {
                self.set(i, k, 0.0);
            }
        }
    }

    /// Francis double-shift QR on an upper Hessenberg matrix. Destroys `self`.
    fn hqr(&mut self) -> Result<Vec<Complex64>> {
        let n = self.n as isize;
        let mut w = vec![Complex64::new(0.0, 0.0); self.n];
        if n == 0 {
            return Ok(w);
        }
        let a = |s: &Self, i: isize, j: isize| s.at(i as usize, j as usize);
        let eps = f64::EPSILON;
        let mut anorm = 0.0;
        for i in 0..n {
            for j in (i - 1).max(0)..n {
                anorm += a(self, i, j).abs();
            }
        }
        let mut nn = n - 1;
        let mut t = 0.0;
        let (mut p, mut q, mut r): (f64, f64, f64);
        let (mut x, mut y, mut z);
        while nn >= 0 {
            let mut its = 0usize;
            loop {
                // Look for a single small subdiagonal element.
                let mut l = nn;
                while l > 0 {
                    let mut s = a(self, l - 1, l - 1).abs() + a(self, l, l).abs();
                    if s == 0.0 {
                        s = anorm;
                    }
                    if a(self, l, l - 1).abs() <= eps * s {
                        self.set(l as usize, (l - 1) as usize, 0.0);
                        break;
                    }
                    l -= 1;
                }
                x = a(self, nn, nn);
                if l == nn {
                    w[nn as usize] = Complex64::new(x + t, 0.0);
                    nn -= 1;
                } else {
                    y = a(self, nn - 1, nn - 1);
                    let mut ww = a(self, nn, nn - 1) * a(self, nn - 1, nn);
                    if l == nn - 1 {
                        p = 0.5 * (y - x);
                        q = p * p + ww;
                        z = q.abs().sqrt();
                        x += t;
                        if q >= 0.0 {
                            z = p + z.copysign(p);
                            w[(nn - 1) as usize] = Complex64::new(x + z, 0.0);
                            w[nn as usize] = Complex64::new(x + z, 0.0);
                            if z != 0.0 {
                                w[nn as usize] = Complex64::new(x - ww / z, 0.0);
                            }
                        } else {
                            w[nn as usize] = Complex64::new(x + p, -z);
                            w[(nn - 1) as usize] = Complex64::new(x + p, z);
                        }
                        nn -= 2;
                    } else {
                        if its == MAX_QR_ITERATIONS {
                            return Err(Error::Numerical(
                                "QR eigenvalue iteration did not converge".into(),
                            ));
                        }
                        if its == 10 || its == 20 || its == 40 {
                            // Exceptional shift.
                            t += x;
                            for i in 0..=nn {
                                let v = a(self, i, i) - x;
                                self.set(i as usize, i as usize, v);
                            }
                            let s = a(self, nn, nn - 1).abs() + a(self, nn - 1, nn - 2).abs();
                            x = 0.75 * s;
                            y = x;
                            ww = -0.4375 * s * s;
                        }
                        its += 1;
                        let mut m = nn - 2;
                        loop {
                            z = a(self, m, m);
                            let rr = x - z;
                            let ss = y - z;
                            p = (rr * ss - ww) / a(self, m + 1, m) + a(self, m, m + 1);
                            q = a(self, m + 1, m + 1) - z - rr - ss;
                            r = a(self, m + 2, m + 1);
                            let s = p.abs() + q.abs() + r.abs();
                            p /= s;
                            q /= s;
                            r /= s;
                            if m == l {
                                break;
                            }
                            let u = a(self, m, m - 1).abs() * (q.abs() + r.abs());
                            let v = p.abs()
                                * (a(self, m - 1, m - 1).abs() + z.abs() + a(self, m + 1, m + 1).abs());
                            if u <= eps * v {
                                break;
                            }
                            m -= 1;
                        }
                        for i in m..nn - 1 {
                            self.set((i + 2) as usize, i as usize, 0.0);
                            if i != m {
                                self.set((i + 2) as usize, (i - 1) as usize, 0.0);
                            }
                        }
                        let mut k = m;
                        while k < nn {
                            if k != m {
                                p = a(self, k, k - 1);
                                q = a(self, k + 1, k - 1);
                                r = 0.0;
                                if k + 1 != nn {
                                    r = a(self, k + 2, k - 1);
                                }
                                x = p.abs() + q.abs() + r.abs();
                                if x != 0.0 {
                                    p /= x;
                                    q /= x;
                                    r /= x;
                                }
                            }
                            let s = (p * p + q * q + r * r).sqrt().copysign(p);
                            if s != 0.0 {
                                if k == m {
                                    if l != m {
                                        let v = -a(self, k, k - 1);
                                        self.set(k as usize, (k - 1) as usize, v);
                                    }
                                } else {
                                    self.set(k as usize, (k - 1) as usize, -s * x);
                                }
                                p += s;
                                x = p / s;
                                y = q / s;
                                z = r / s;
                                q /= p;
                                r /= p;
                                for j in k..=nn {
                                    p = a(self, k, j) + q * a(self, k + 1, j);
                                    if k + 1 != nn {
                                        p += r * a(self, k + 2, j);
                                        let v = a(self, k + 2, j) - p * z;
                                        self.set((k + 2) as usize, j as usize, v);
                                    }
                                    let v = a(self, k + 1, j) - p * y;
                                    self.set((k + 1) as usize, j as usize, v);
                                    let v = a(self, k, j) - p * x;
                                    self.set(k as usize, j as usize, v);
                                }
                                let mmin = if nn < k + 3 { nn } else { k + 3 };
                                for i in l..=mmin {
                                    p = x * a(self, i, k) + y * a(self, i, k + 1);
                                    if k + 1 != nn {
                                        p += z * a(self, i, k + 2);
                                        let v = a(self, i, k + 2) - p * r;
                                        self.set(i as usize, (k + 2) as usize, v);
                                    }
                                    let v = a(self, i, k + 1) - p * q;
                                    self.set(i as usize, (k + 1) as usize, v);
                                    let v = a(self, i, k) - p;
                                    self.set(i as usize, k as usize, v);
                                }
                            }
                            k += 1;
                        }
                    }
                }
                if l + 1 >= nn {
                    break;
                }
            }
        }
        Ok(w)
    }
}

/// All eigenvalues of a real square matrix, in no particular order.
pub fn eigenvalues(m: &DMatrix<f64>) -> Result<Vec<Complex64>> {
    assert!(m.is_square(), "eigenvalues of a non-square matrix");
    if m.iter().any(|x| !x.is_finite()) {
        return Err(Error::Numerical("matrix has non-finite entries".into()));
    }
    let mut d = Dense::from_matrix(m);
    d.balance();
    d.hessenberg();
    d.hqr()
}

/// Coefficients `[1, c1, ..., cn]` of `det(λI - A) = λⁿ + c1 λⁿ⁻¹ + ... + cn`
/// by the Faddeev-LeVerrier recursion.
pub fn characteristic_polynomial(m: &DMatrix<f64>) -> Vec<f64> {
    let n = m.nrows();
    let mut coeffs = vec![0.0; n + 1];
    coeffs[0] = 1.0;
    let id = DMatrix::<f64>::identity(n, n);
    let mut mk = DMatrix::<f64>::zeros(n, n);
    for k in 1..=n {
        mk = m * &mk + &id * coeffs[k - 1];
        let amk = m * &mk;
        coeffs[k] = -amk.trace() / k as f64;
    }
    coeffs
}

/// Routh array verdict for a monic polynomial `[1, c1, ..., cn]`.
#[derive(Clone, Debug, PartialEq)]
pub struct RouthHurwitz {
    /// All roots strictly in the open left half-plane.
    pub stable: bool,
    /// First column of the Routh array.
    pub first_column: Vec<f64>,
}

pub fn routh_hurwitz(coeffs: &[f64]) -> RouthHurwitz {
    let n = coeffs.len() - 1;
    let width = n / 2 + 1;
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    let mut r0 = vec![0.0; width];
    let mut r1 = vec![0.0; width];
    for (i, &c) in coeffs.iter().enumerate() {
        if i % 2 == 0 {
            r0[i / 2] = c;
        } else {
            r1[i / 2] = c;
        }
    }
    rows.push(r0);
    if n >= 1 {
        rows.push(r1);
    }
    let mut stable = coeffs.iter().all(|&c| c > 0.0);
    while rows.len() < n + 1 {
        let prev = &rows[rows.len() - 1];
        let pprev = &rows[rows.len() - 2];
        let pivot = prev[0];
        let mut next = vec![0.0; width];
        if pivot == 0.0 {
            stable = false;
            rows.push(next);
            continue;
        }
        for j in 0..width - 1 {
            next[j] = (pivot * pprev[j + 1] - pprev[0] * prev[j + 1]) / pivot;
        }
        rows.push(next);
    }
    let first_column: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    stable &= first_column.iter().all(|&x| x > 0.0);
    RouthHurwitz {
        stable,
        first_column,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sorted(mut v: Vec<Complex64>) -> Vec<Complex64> {
        v.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap().then(a.im.partial_cmp(&b.im).unwrap()));
        v
    }

    #[test]
    fn diagonal_eigenvalues() {
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![3.0, -1.0, 2.0, 0.5]));
        let ev = sorted(eigenvalues(&m).unwrap());
        let expect = [-1.0, 0.5, 2.0, 3.0];
        for (e, x) in ev.iter().zip(expect) {
            assert!((e.re - x).abs() < 1e-14 && e.im.abs() < 1e-14);
        }
    }

    #[test]
    fn rotation_generator_has_imaginary_pair() {
        let m = DMatrix::from_row_slice(2, 2, &[0.0, 2.0, -2.0, 0.0]);
        let ev = sorted(eigenvalues(&m).unwrap());
        assert!(ev[0].re.abs() < 1e-15);
        assert!((ev[0].im.abs() - 2.0).abs() < 1e-14);
        assert!((ev[0].im + ev[1].im).abs() < 1e-14);
    }

    #[test]
    fn eigenvalues_satisfy_trace_and_determinant() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let n = rng.random_range(2..=6);
            let m = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
            let ev = eigenvalues(&m).unwrap();
            let tr: Complex64 = ev.iter().sum();
            let det: Complex64 = ev.iter().product();
            assert!((tr.re - m.trace()).abs() < 1e-11 && tr.im.abs() < 1e-11);
            let d = m.clone().determinant();
            assert!((det.re - d).abs() < 1e-10 && det.im.abs() < 1e-10, "{det} vs {d}");
            // each eigenvalue is a root of det(λI - A)
            let cp = characteristic_polynomial(&m);
            for e in &ev {
                let val = cp.iter().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * e + c);
                assert!(val.norm() < 1e-9, "{val}");
            }
        }
    }

    #[test]
    fn faddeev_leverrier_on_companion() {
        // (λ-1)(λ-2)(λ-3) = λ³ - 6λ² + 11λ - 6
        let m = DMatrix::from_row_slice(3, 3, &[6.0, -11.0, 6.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
        let cp = characteristic_polynomial(&m);
        for (c, x) in cp.iter().zip([1.0, -6.0, 11.0, -6.0]) {
            assert!((c - x).abs() < 1e-12);
        }
    }

    #[test]
    fn routh_hurwitz_simple_cases() {
        // (λ+1)(λ+2)(λ+3)
        assert!(routh_hurwitz(&[1.0, 6.0, 11.0, 6.0]).stable);
        // (λ-1)(λ+2)(λ+3) = λ³ + 4λ² + λ - 6
        assert!(!routh_hurwitz(&[1.0, 4.0, 1.0, -6.0]).stable);
        // λ³ + λ² + 2λ + 8: positive coefficients, roots -2 and 0.5 ± 1.94i
        assert!(!routh_hurwitz(&[1.0, 1.0, 2.0, 8.0]).stable);
        // λ² + 1: marginal
        assert!(!routh_hurwitz(&[1.0, 0.0, 1.0]).stable);
    }
}
