//! Dense complex matrices, Hermitian eigensolvers and PSD square roots.

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Row-major dense complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix<T: Real> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> CMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_real(rows: usize, cols: usize, values: &[T]) -> Self {
        assert_eq!(values.len(), rows * cols);
        Self {
            rows,
            cols,
            data: values.iter().map(|&v| Complex::new(v, T::zero())).collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                let row = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(row) {
                    *d = *d + a * b;
                }
            }
        }
        out
    }

    pub fn kron(&self, other: &Self) -> Self {
        let (r2, c2) = (other.rows, other.cols);
        Self::from_fn(self.rows * r2, self.cols * c2, |i, j| {
            self[(i / r2, j / c2)] * other[(i % r2, j % c2)]
        })
    }

    pub fn scale(&self, s: T) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.scale(s)).collect(),
        }
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, z| m.max(z.norm()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .fold(T::zero(), |m, (a, b)| m.max((*a - *b).norm()))
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.rows.min(self.cols)).fold(Complex::zero(), |acc, i| acc + self[(i, i)])
    }

    /// Largest `|H[i][j] - conj(H[j][i])|`, with its position.
    pub fn hermiticity_defect(&self) -> (T, usize, usize) {
        let mut worst = (T::zero(), 0, 0);
        for i in 0..self.rows {
            for j in i..self.cols {
                let dev = (self[(i, j)] - self[(j, i)].conj()).norm();
                if dev > worst.0 {
                    worst = (dev, i, j);
                }
            }
        }
        worst
    }

    pub fn is_real(&self) -> bool {
        self.data.iter().all(|z| z.im.is_zero())
    }
}

impl<T: Real> std::ops::Index<(usize, usize)> for CMatrix<T> {
    type Output = Complex<T>;
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.data[i * self.cols + j]
    }
}

impl<T: Real> std::ops::IndexMut<(usize, usize)> for CMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[i * self.cols + j]
    }
}

/// Square complex matrix known to be Hermitian (within a tolerance checked at construction).
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix<T: Real>(CMatrix<T>);

impl<T: Real> HermitianMatrix<T> {
    pub const DEFAULT_TOL: f64 = 1e-13;

    /// Accept `m` if it is square and Hermitian within `tol` (relative to its largest entry).
    pub fn new(m: CMatrix<T>, tol: f64) -> Result<Self> {
        if m.rows != m.cols {
            return Err(Error::Domain(format!(
                "Hermitian matrix must be square, got {}x{}",
                m.rows, m.cols
            )));
        }
        let (dev, row, col) = m.hermiticity_defect();
        let scale = m.max_abs().max(T::one());
        if dev > T::lit(tol) * scale {
            return Err(Error::NotHermitian {
                row,
                col,
                deviation: dev.to_f64_lossy(),
            });
        }
        Ok(Self(m))
    }

    /// Average `m` with its adjoint after checking it is Hermitian within `tol`.
    pub fn symmetrized(m: CMatrix<T>, tol: f64) -> Result<Self> {
        let adj = m.adjoint();
        let checked = Self::new(m, tol)?;
        let half = T::lit(0.5);
        let data = checked
            .0
            .data
            .iter()
            .zip(&adj.data)
            .map(|(a, b)| (*a + *b).scale(half))
            .collect();
        Ok(Self(CMatrix { data, ..checked.0 }))
    }

    pub fn identity(n: usize) -> Self {
        Self(CMatrix::identity(n))
    }

    /// Wrap a matrix the caller has built to be exactly Hermitian.
    pub(crate) fn assume_hermitian(m: CMatrix<T>) -> Self {
        debug_assert_eq!(m.rows, m.cols);
        Self(m)
    }

    pub fn from_real_symmetric(n: usize, values: &[T]) -> Result<Self> {
        Self::new(CMatrix::from_real(n, n, values), Self::DEFAULT_TOL)
    }

    pub fn dim(&self) -> usize {
        self.0.rows
    }

    pub fn as_matrix(&self) -> &CMatrix<T> {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix<T> {
        self.0
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self(self.0.kron(&other.0))
    }

    /// `B A B` for Hermitian `A`, `B`.
    pub fn sandwich(&self, outer: &Self) -> Self {
        let m = outer.0.matmul(&self.0).matmul(&outer.0);
        Self::symmetrized(m, 1e-8).expect("congruence of Hermitian matrices is Hermitian")
    }

    pub fn trace_re(&self) -> T {
        self.0.trace().re
    }

    pub fn eigen(&self) -> Result<Spectrum<T>> {
        hermitian_eigen(self)
    }

    pub fn eigenvalues(&self) -> Result<Vec<T>> {
        hermitian_eigenvalues(&self.0)
    }
}

impl<T: Real> std::ops::Index<(usize, usize)> for HermitianMatrix<T> {
    type Output = Complex<T>;
    fn index(&self, idx: (usize, usize)) -> &Complex<T> {
        &self.0[idx]
    }
}

/// Eigen-decomposition `H = Q diag(values) Q†`, values ascending.
#[derive(Clone, Debug)]
pub struct Spectrum<T: Real> {
    pub values: Vec<T>,
    /// Eigenvectors as columns.
    pub vectors: CMatrix<T>,
}

impl<T: Real> Spectrum<T> {
    pub fn reconstruct(&self, f: impl Fn(T) -> T) -> CMatrix<T> {
        let n = self.values.len();
        let q = &self.vectors;
        let mut out = CMatrix::zeros(n, n);
        for (k, &lam) in self.values.iter().enumerate() {
            let fl = f(lam);
            if fl.is_zero() {
                continue;
            }
            for i in 0..n {
                let qi = q[(i, k)].scale(fl);
                for j in 0..n {
                    out[(i, j)] = out[(i, j)] + qi * q[(j, k)].conj();
                }
            }
        }
        out
    }
}

/// Full spectrum by cyclic complex Jacobi rotations.
pub fn hermitian_eigen<T: Real>(h: &HermitianMatrix<T>) -> Result<Spectrum<T>> {
    const MAX_SWEEPS: usize = 100;
    let n = h.dim();
    let mut a = h.0.clone();
    let mut v = CMatrix::<T>::identity(n);
    let scale = a.max_abs();
    if n <= 1 || scale.is_zero() {
        return Ok(sorted_spectrum(&a, v));
    }
    let tiny = T::epsilon() * T::epsilon() * scale * scale;
    let eps = T::epsilon();
    for _ in 0..MAX_SWEEPS {
        let mut off = T::zero();
        for p in 0..n {
            for q in (p + 1)..n {
                off = off + a[(p, q)].norm_sqr();
            }
        }
        if off <= tiny {
            return Ok(sorted_spectrum(&a, v));
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                let diag = a[(p, p)].re.abs() + a[(q, q)].re.abs();
                if mag <= eps * eps * scale || mag <= eps * T::lit(0.01) * diag {
                    a[(p, q)] = Complex::zero();
                    a[(q, p)] = Complex::zero();
                    continue;
                }
                let w = apq / mag;
                let theta = (a[(q, q)].re - a[(p, p)].re) / (T::lit(2.0) * mag);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let t = if theta.is_zero() { T::one() } else { t };
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                // G = diag(1, conj(w)) · [[c, s], [-s, c]] on the (p, q) plane.
                let gpp = Complex::new(c, T::zero());
                let gpq = Complex::new(s, T::zero());
                let gqp = w.conj().scale(-s);
                let gqq = w.conj().scale(c);
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = akp * gpp + akq * gqp;
                    a[(k, q)] = akp * gpq + akq * gqq;
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = vkp * gpp + vkq * gqp;
                    v[(k, q)] = vkp * gpq + vkq * gqq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = gpp.conj() * apk + gqp.conj() * aqk;
                    a[(q, k)] = gpq.conj() * apk + gqq.conj() * aqk;
                }
                a[(p, q)] = Complex::zero();
                a[(q, p)] = Complex::zero();
                a[(p, p)] = Complex::new(a[(p, p)].re, T::zero());
                a[(q, q)] = Complex::new(a[(q, q)].re, T::zero());
            }
        }
    }
    Err(Error::NoConvergence(MAX_SWEEPS))
}

fn sorted_spectrum<T: Real>(a: &CMatrix<T>, v: CMatrix<T>) -> Spectrum<T> {
    let n = a.rows;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.partial_cmp(&a[(j, j)].re).expect("finite eigenvalues"));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = CMatrix::from_fn(n, n, |i, k| v[(i, order[k])]);
    Spectrum { values, vectors }
}

/// Eigenvalues (ascending) of a Hermitian matrix, without vectors.
///
/// Real input goes straight to Householder + QL; complex input is embedded as
/// the real symmetric `[[Re, -Im], [Im, Re]]`, whose spectrum doubles each eigenvalue.
pub fn hermitian_eigenvalues<T: Real>(m: &CMatrix<T>) -> Result<Vec<T>> {
    let n = m.rows;
    if m.is_real() {
        let a: Vec<T> = m.data.iter().map(|z| z.re).collect();
        return symmetric_eigenvalues(a, n);
    }
    let mut a = vec![T::zero(); 4 * n * n];
    let w = 2 * n;
    for i in 0..n {
        for j in 0..n {
            let z = m[(i, j)];
            a[i * w + j] = z.re;
            a[(i + n) * w + j + n] = z.re;
            a[i * w + j + n] = -z.im;
            a[(i + n) * w + j] = z.im;
        }
    }
    let vals = symmetric_eigenvalues(a, w)?;
    Ok(vals.into_iter().step_by(2).collect())
}

/// Eigenvalues of a real symmetric matrix given row-major, ascending.
pub fn symmetric_eigenvalues<T: Real>(mut a: Vec<T>, n: usize) -> Result<Vec<T>> {
    assert_eq!(a.len(), n * n);
    if n == 0 {
        return Ok(Vec::new());
    }
    let (mut diag, mut off) = tridiagonalize(&mut a, n);
    tridiagonal_ql(&mut diag, &mut off)?;
    diag.sort_by(|x, y| x.partial_cmp(y).expect("finite eigenvalues"));
    Ok(diag)
}

/// Householder reduction to tridiagonal form; returns (diagonal, subdiagonal).
/// The subdiagonal is stored in entries 1..n.
fn tridiagonalize<T: Real>(a: &mut [T], n: usize) -> (Vec<T>, Vec<T>) {
    let mut d = vec![T::zero(); n];
    let mut e = vec![T::zero(); n];
    let at = |i: usize, j: usize| i * n + j;
    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = T::zero();
        if l > 0 {
            let scale = (0..=l).fold(T::zero(), |s, k| s + a[at(i, k)].abs());
            if scale.is_zero() {
                e[i] = a[at(i, l)];
            } else {
                for k in 0..=l {
                    a[at(i, k)] = a[at(i, k)] / scale;
                    h = h + a[at(i, k)] * a[at(i, k)];
                }
                let f = a[at(i, l)];
                let g = if f >= T::zero() { -h.sqrt() } else { h.sqrt() };
                e[i] = scale * g;
                h = h - f * g;
                a[at(i, l)] = f - g;
                let u: Vec<T> = a[at(i, 0)..=at(i, l)].to_vec();
                for ej in &mut e[..=l] {
                    *ej = T::zero();
                }
                for j in 0..=l {
                    let row = &a[at(j, 0)..=at(j, j)];
                    let mut acc = row[j] * u[j];
                    for k in 0..j {
                        acc = acc + row[k] * u[k];
                        e[k] = e[k] + row[k] * u[j];
                    }
                    e[j] = e[j] + acc;
                }
                let mut f = T::zero();
                for j in 0..=l {
                    e[j] = e[j] / h;
                    f = f + e[j] * u[j];
                }
                let hh = f / (h + h);
                for j in 0..=l {
                    let f = a[at(i, j)];
                    let g = e[j] - hh * f;
                    e[j] = g;
                    for k in 0..=j {
                        a[at(j, k)] = a[at(j, k)] - (f * e[k] + g * a[at(i, k)]);
                    }
                }
            }
        } else {
            e[i] = a[at(i, l)];
        }
        d[i] = h;
    }
    for i in 0..n {
        d[i] = a[at(i, i)];
    }
    (d, e)
}

/// Implicit QL with Wilkinson-style shifts on a symmetric tridiagonal matrix.
fn tridiagonal_ql<T: Real>(d: &mut [T], e: &mut [T]) -> Result<()> {
    const MAX_ITER: usize = 60;
    let n = d.len();
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = T::zero();
    let two = T::lit(2.0);
    // Absolute floor so blocks of near-zero eigenvalues still deflate.
    let norm = (0..n).fold(T::zero(), |m, i| m.max(d[i].abs() + e[i].abs()));
    let floor = T::epsilon() * norm;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= T::epsilon() * dd || e[m].abs() <= floor {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_ITER {
                return Err(Error::NoConvergence(MAX_ITER));
            }
            let mut g = (d[l + 1] - d[l]) / (two * e[l]);
            let mut r = g.hypot(T::one());
            let sr = if g >= T::zero() { r.abs() } else { -r.abs() };
            g = d[m] - d[l] + e[l] / (g + sr);
            let (mut s, mut c, mut p) = (T::one(), T::one(), T::zero());
            let mut deflated = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r.is_zero() {
                    d[i + 1] = d[i + 1] - p;
                    e[m] = T::zero();
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + two * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] = d[l] - p;
            e[l] = g;
            e[m] = T::zero();
        }
    }
    Ok(())
}

/// Eigenvalues below `-NEG_TOL` reject a matrix as not PSD.
pub const NEG_TOL: f64 = 1e-10;

/// `Σ √λ` over a PSD spectrum.
///
/// Returns the sum and the discarded mass: negatives down to `-NEG_TOL`, plus
/// positive values under the rank cutoff `dim · 64ε · λ_max`, which are
/// rounding noise in place of exact zeros.
pub fn trace_sqrt<T: Real>(values: &[T]) -> Result<(T, T)> {
    let max = values.iter().fold(T::zero(), |m, &v| m.max(v));
    let cutoff = T::from_count(values.len().max(1)) * T::lit(64.0) * T::epsilon() * max;
    let mut sum = T::zero();
    let mut clipped = T::zero();
    for &v in values {
        if v < -T::lit(NEG_TOL) {
            return Err(Error::NotPsd {
                eigenvalue: v.to_f64_lossy(),
            });
        }
        if v <= cutoff {
            clipped = clipped + v.abs();
        } else {
            sum = sum + v.sqrt();
        }
    }
    Ok((sum, clipped))
}

/// Principal square root of a PSD matrix, with the clipped negative mass.
pub fn matrix_sqrt_psd<T: Real>(h: &HermitianMatrix<T>) -> Result<(HermitianMatrix<T>, T)> {
    let eig = h.eigen()?;
    let mut clipped = T::zero();
    for &v in &eig.values {
        if v < -T::lit(NEG_TOL) {
            return Err(Error::NotPsd {
                eigenvalue: v.to_f64_lossy(),
            });
        }
        if v < T::zero() {
            clipped = clipped - v;
        }
    }
    let root = eig.reconstruct(|v| if v > T::zero() { v.sqrt() } else { T::zero() });
    Ok((HermitianMatrix::symmetrized(root, 1e-8)?, clipped))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn herm(n: usize, vals: &[(f64, f64)]) -> HermitianMatrix<f64> {
        let m = CMatrix::from_fn(n, n, |i, j| Complex64::new(vals[i * n + j].0, vals[i * n + j].1));
        HermitianMatrix::new(m, 1e-13).unwrap()
    }

    fn random_hermitian(n: usize, entries: &[f64]) -> HermitianMatrix<f64> {
        let mut m = CMatrix::<f64>::zeros(n, n);
        let mut it = entries.iter().cycle();
        for i in 0..n {
            m[(i, i)] = Complex64::new(*it.next().unwrap(), 0.0);
            for j in (i + 1)..n {
                let z = Complex64::new(*it.next().unwrap(), *it.next().unwrap());
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
            }
        }
        HermitianMatrix::new(m, 1e-13).unwrap()
    }

    #[test]
    fn small_spectra() {
        let id = HermitianMatrix::<f64>::identity(2);
        assert_eq!(id.eigen().unwrap().values, vec![1.0, 1.0]);
        let ones = herm(2, &[(1.0, 0.0), (1.0, 0.0), (1.0, 0.0), (1.0, 0.0)]);
        let v = ones.eigen().unwrap().values;
        assert!(v[0].abs() < 1e-15 && (v[1] - 2.0).abs() < 1e-15);
        let v = ones.eigenvalues().unwrap();
        assert!(v[0].abs() < 1e-15 && (v[1] - 2.0).abs() < 1e-15);
        // [[2, i], [-i, 2]] has eigenvalues 1 and 3
        let c = herm(2, &[(2.0, 0.0), (0.0, 1.0), (0.0, -1.0), (2.0, 0.0)]);
        let v = c.eigenvalues().unwrap();
        assert!((v[0] - 1.0).abs() < 1e-14 && (v[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = CMatrix::from_fn(2, 2, |i, j| Complex64::new((i * 2 + j) as f64, 0.0));
        assert!(matches!(
            HermitianMatrix::new(m, 1e-13),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn sqrt_examples() {
        let d = HermitianMatrix::from_real_symmetric(2, &[4.0f64, 0.0, 0.0, 9.0]).unwrap();
        let (r, clipped) = matrix_sqrt_psd(&d).unwrap();
        assert_eq!(clipped, 0.0);
        assert!((r[(0, 0)].re - 2.0).abs() < 1e-14 && (r[(1, 1)].re - 3.0).abs() < 1e-14);
        let ones = HermitianMatrix::from_real_symmetric(2, &[1.0f64, 1.0, 1.0, 1.0]).unwrap();
        let (r, _) = matrix_sqrt_psd(&ones).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((r[(i, j)].re - 0.5f64.sqrt()).abs() < 1e-14);
            }
        }
        let neg = HermitianMatrix::from_real_symmetric(2, &[-1.0, 0.0, 0.0, 1.0]).unwrap();
        assert!(matches!(matrix_sqrt_psd(&neg), Err(Error::NotPsd { .. })));
    }

    #[test]
    fn generic_over_f32() {
        let m = HermitianMatrix::<f32>::from_real_symmetric(2, &[2.0, 1.0, 1.0, 2.0]).unwrap();
        let v = m.eigen().unwrap().values;
        assert!((v[0] - 1.0).abs() < 1e-6 && (v[1] - 3.0).abs() < 1e-6);
    }

    #[test]
    fn trace_sqrt_discards_noise() {
        let (s, c) = trace_sqrt(&[4.0, 1e-20, -1e-18, 9.0]).unwrap();
        assert_eq!(s, 5.0);
        assert!(c > 0.0 && c < 1e-17);
        assert!(trace_sqrt(&[1.0, -1e-3]).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn jacobi_reconstructs(n in 1usize..12, entries in prop::collection::vec(-1.0f64..1.0, 16..64)) {
            let h = random_hermitian(n, &entries);
            let eig = h.eigen().unwrap();
            let back = eig.reconstruct(|v| v);
            prop_assert!(back.max_abs_diff(h.as_matrix()) <= 1e-10 * h.as_matrix().max_abs().max(1.0));
            let qtq = eig.vectors.adjoint().matmul(&eig.vectors);
            prop_assert!(qtq.max_abs_diff(&CMatrix::identity(n)) <= 1e-10);
            prop_assert!(eig.values.windows(2).all(|w| w[0] <= w[1]));
        }

        #[test]
        fn ql_matches_jacobi(n in 1usize..16, entries in prop::collection::vec(-1.0f64..1.0, 16..64)) {
            let h = random_hermitian(n, &entries);
            let a = h.eigen().unwrap().values;
            let b = h.eigenvalues().unwrap();
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((x - y).abs() <= 1e-10);
            }
        }

        #[test]
        fn sqrt_squares_back(n in 1usize..8, entries in prop::collection::vec(-1.0f64..1.0, 16..64)) {
            let h = random_hermitian(n, &entries);
            let psd = HermitianMatrix::symmetrized(h.as_matrix().matmul(h.as_matrix()), 1e-10).unwrap();
            let (r, _) = matrix_sqrt_psd(&psd).unwrap();
            let sq = r.as_matrix().matmul(r.as_matrix());
            prop_assert!(sq.max_abs_diff(psd.as_matrix()) <= 1e-9 * psd.as_matrix().max_abs().max(1.0));
        }
    }

    #[test]
    fn random_50_reconstruction() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(50);
        let entries: Vec<f64> = (0..2600).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let h = random_hermitian(50, &entries);
        let eig = h.eigen().unwrap();
        let back = eig.reconstruct(|v| v);
        assert!(back.max_abs_diff(h.as_matrix()) <= 1e-10 * h.as_matrix().max_abs());
        let ql = h.eigenvalues().unwrap();
        for (x, y) in eig.values.iter().zip(&ql) {
            assert!((x - y).abs() < 1e-10);
        }
    }
}
