//! Dense row-major complex matrices and the Hermitian eigensolver.

use std::ops::{Index, IndexMut};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{cone, creal, czero, lit, tol, Real};

/// Dense complex matrix stored in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix<T: Real> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> ComplexMatrix<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex<T>>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::DimensionMismatch(format!(
                "matrix dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from real entries given in row-major order.
    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Result<Self> {
        Self::new(rows, cols, entries.iter().map(|&x| creal(lit(x))).collect())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Self {
            rows,
            cols,
            data: vec![czero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = cone();
        }
        m
    }

    pub fn diagonal(diag: &[Complex<T>]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// Outer product `|a><b|`.
    pub fn outer(a: &[Complex<T>], b: &[Complex<T>]) -> Self {
        let mut m = Self::zeros(a.len(), b.len());
        for (i, ai) in a.iter().enumerate() {
            for (j, bj) in b.iter().enumerate() {
                m[(i, j)] = ai * bj.conj();
            }
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn data(&self) -> &[Complex<T>] {
        &self.data
    }

    #[inline]
    pub fn data_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<Complex<T>> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[Complex<T>] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn mul_unchecked(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == czero() {
                    continue;
                }
                let orow = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, b) in dst.iter_mut().zip(orow) {
                    *d += a * b;
                }
            }
        }
        out
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.data[i * self.cols + j].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| x * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }

    /// `self += s * other`.
    pub(crate) fn axpy(&mut self, s: Complex<T>, other: &Self) {
        debug_assert_eq!(self.data.len(), other.data.len());
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    /// Largest absolute entry of `self - self^dagger`.
    pub fn hermitian_deviation(&self) -> T {
        if !self.is_square() {
            return T::infinity();
        }
        let n = self.rows;
        let mut dev = T::zero();
        for i in 0..n {
            for j in i..n {
                let d = (self[(i, j)] - self[(j, i)].conj()).norm();
                dev = dev.max(d);
            }
        }
        dev
    }

    pub fn is_hermitian(&self, tolerance: T) -> bool {
        self.hermitian_deviation() <= tolerance
    }

    /// Largest absolute entry of `U U^dagger - I`.
    pub fn unitary_deviation(&self) -> T {
        if !self.is_square() {
            return T::infinity();
        }
        let prod = self.mul_unchecked(&self.adjoint());
        let mut dev = T::zero();
        for i in 0..self.rows {
            for j in 0..self.cols {
                let target = if i == j { cone() } else { czero() };
                dev = dev.max((prod[(i, j)] - target).norm());
            }
        }
        dev
    }

    pub fn is_unitary(&self, tolerance: T) -> bool {
        self.unitary_deviation() <= tolerance
    }

    /// Kronecker product; the left factor indexes the most significant block.
    pub fn kron(&self, other: &Self) -> Self {
        kron(self, other)
    }
}

impl<T: Real> Index<(usize, usize)> for ComplexMatrix<T> {
    type Output = Complex<T>;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.data[i * self.cols + j]
    }
}

impl<T: Real> IndexMut<(usize, usize)> for ComplexMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[i * self.cols + j]
    }
}

/// Kronecker product `a ⊗ b`.
pub fn kron<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    let mut data = vec![czero(); rows * cols];
    for ai in 0..a.rows {
        for aj in 0..a.cols {
            let x = a[(ai, aj)];
            for bi in 0..b.rows {
                let base = (ai * b.rows + bi) * cols + aj * b.cols;
                for bj in 0..b.cols {
                    data[base + bj] = x * b[(bi, bj)];
                }
            }
        }
    }
    ComplexMatrix { rows, cols, data }
}

/// Eigendecomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen<T: Real> {
    /// Eigenvalues in ascending order.
    pub values: Vec<T>,
    /// Unitary whose columns are the matching eigenvectors.
    pub vectors: ComplexMatrix<T>,
}

/// Diagonalizes a Hermitian matrix with cyclic complex Jacobi rotations.
pub fn eigh<T: Real>(m: &ComplexMatrix<T>) -> Result<HermitianEigen<T>> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "eigh needs a square matrix, got {}x{}",
            m.rows, m.cols
        )));
    }
    let scale = T::one().max(m.frobenius_norm());
    let dev = m.hermitian_deviation();
    if dev > tol::<T>(1e-10) * scale {
        return Err(Error::NotHermitian(dev.to_f64().unwrap_or(f64::NAN)));
    }
    let n = m.rows;
    let mut a = m.clone();
    // symmetrize so the rotations see an exactly Hermitian input
    for i in 0..n {
        a[(i, i)] = creal(a[(i, i)].re);
        for j in (i + 1)..n {
            let avg = (a[(i, j)] + a[(j, i)].conj()) * creal(lit(0.5));
            a[(i, j)] = avg;
            a[(j, i)] = avg.conj();
        }
    }
    let mut v = ComplexMatrix::identity(n);
    let threshold = T::epsilon() * T::epsilon() * scale * scale;
    for _sweep in 0..100 {
        let off: T = (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum();
        if off <= threshold {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r <= T::min_positive_value().sqrt() {
                    continue;
                }
                // phase so that a[p][q] becomes real and positive
                let e = apq / creal(r);
                let ph = e.conj();
                for k in 0..n {
                    a[(k, q)] *= ph;
                }
                for k in 0..n {
                    a[(q, k)] *= e;
                }
                for k in 0..n {
                    v[(k, q)] *= ph;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let theta = (aqq - app) / (lit::<T>(2.0) * r);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * c - akq * s;
                    a[(k, q)] = akp * s + akq * c;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = apk * c - aqk * s;
                    a[(q, k)] = apk * s + aqk * c;
                }
                a[(p, q)] = czero();
                a[(q, p)] = czero();
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * c - vkq * s;
                    v[(k, q)] = vkp * s + vkq * c;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a[(i, i)]
            .re
            .partial_cmp(&a[(j, j)].re)
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (new, &old) in order.iter().enumerate() {
        for k in 0..n {
            vectors[(k, new)] = v[(k, old)];
        }
    }
    Ok(HermitianEigen { values, vectors })
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn eigvalsh<T: Real>(m: &ComplexMatrix<T>) -> Result<Vec<T>> {
    eigh(m).map(|e| e.values)
}

/// Applies `f` to the spectrum of a Hermitian matrix.
pub(crate) fn hermitian_map<T: Real>(
    m: &ComplexMatrix<T>,
    f: impl Fn(T) -> T,
) -> Result<ComplexMatrix<T>> {
    let HermitianEigen { values, vectors } = eigh(m)?;
    let n = values.len();
    let mut out = ComplexMatrix::zeros(n, n);
    for (k, &lam) in values.iter().enumerate() {
        let fl = f(lam);
        if fl == T::zero() {
            continue;
        }
        for i in 0..n {
            let vik = vectors[(i, k)] * creal(fl);
            for j in 0..n {
                out[(i, j)] += vik * vectors[(j, k)].conj();
            }
        }
    }
    Ok(out)
}

/// Principal square root of a positive semidefinite Hermitian matrix.
///
/// Eigenvalues below zero (numerical noise) are clamped to zero.
pub fn psd_sqrt<T: Real>(m: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    hermitian_map(m, |lam| lam.max(T::zero()).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::random::{random_hermitian, random_psd, random_unitary};
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    type M = ComplexMatrix<f64>;

    fn pauli_x() -> M {
        M::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap()
    }

    fn pauli_z() -> M {
        M::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0]).unwrap()
    }

    fn max_diff(a: &M, b: &M) -> f64 {
        a.data()
            .iter()
            .zip(b.data())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn kron_of_identities_is_identity() {
        assert_eq!(kron(&M::identity(2), &M::identity(2)), M::identity(4));
    }

    #[test]
    fn kron_xx_flips_both_bits() {
        let xx = kron(&pauli_x(), &pauli_x());
        let mut ket00 = vec![czero(); 4];
        ket00[0] = cone();
        let out = xx.apply(&ket00).unwrap();
        assert_eq!(out[3], cone());
        assert_eq!(out[0], czero());
    }

    #[test]
    fn kron_zx_squares_to_identity() {
        let zx = kron(&pauli_z(), &pauli_x());
        assert_eq!(zx.matmul(&zx).unwrap(), M::identity(4));
    }

    #[test]
    fn kron_is_associative() {
        // small integer entries multiply exactly, so the layouts must agree bit for bit
        let a = M::new(2, 2, vec![Complex::new(1.0, 2.0), Complex::new(0.0, -1.0), Complex::new(3.0, 0.0), Complex::new(-2.0, 1.0)]).unwrap();
        let b = M::from_real(3, 1, &[1.0, -4.0, 2.0]).unwrap();
        let c = M::new(1, 2, vec![Complex::new(0.0, 1.0), Complex::new(5.0, -1.0)]).unwrap();
        assert_eq!(kron(&kron(&a, &b), &c), kron(&a, &kron(&b, &c)));

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a: M = random_unitary(&mut rng, 2);
        let b: M = random_unitary(&mut rng, 3);
        let c: M = random_unitary(&mut rng, 2);
        let left = kron(&kron(&a, &b), &c);
        let right = kron(&a, &kron(&b, &c));
        assert!(max_diff(&left, &right) < 1e-15);
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(M::new(0, 2, vec![]).is_err());
        assert!(M::new(2, 2, vec![czero(); 3]).is_err());
        assert!(M::identity(2).matmul(&M::identity(3)).is_err());
    }

    #[test]
    fn eigh_reconstructs_random_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [1, 2, 3, 5, 8, 16] {
            let h = random_hermitian(&mut rng, n);
            let e = eigh(&h).unwrap();
            assert!(e.vectors.is_unitary(1e-10));
            let d = M::diagonal(&e.values.iter().map(|&x| creal(x)).collect::<Vec<_>>());
            let rec = e
                .vectors
                .matmul(&d)
                .unwrap()
                .matmul(&e.vectors.adjoint())
                .unwrap();
            assert!(max_diff(&rec, &h) < 1e-10, "n={n}");
            assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn eigh_rejects_non_hermitian() {
        let m = M::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(eigh(&m), Err(Error::NotHermitian(_))));
        assert!(matches!(psd_sqrt(&m), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn psd_sqrt_of_identity() {
        let s = psd_sqrt(&M::identity(4)).unwrap();
        assert!(max_diff(&s, &M::identity(4)) < 1e-14);
    }

    #[test]
    fn psd_sqrt_rank_one() {
        let m = M::from_real(2, 2, &[4.0, 0.0, 0.0, 0.0]).unwrap();
        let s = psd_sqrt(&m).unwrap();
        let expected = M::from_real(2, 2, &[2.0, 0.0, 0.0, 0.0]).unwrap();
        assert!(max_diff(&s, &expected) < 1e-14);
    }

    #[test]
    fn psd_sqrt_squares_back() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in [2, 4, 8] {
            let m = random_psd(&mut rng, n);
            let s = psd_sqrt(&m).unwrap();
            let sq = s.matmul(&s).unwrap();
            assert!(sq.sub(&m).unwrap().frobenius_norm() < 1e-8);
            assert!(s.is_hermitian(1e-12));
        }
    }

    #[test]
    fn works_in_single_precision() {
        let m = ComplexMatrix::<f32>::from_real(2, 2, &[2.0, 1.0, 1.0, 2.0]).unwrap();
        let vals = eigvalsh(&m).unwrap();
        assert_abs_diff_eq!(vals[0], 1.0, epsilon = 1e-5);
        assert_abs_diff_eq!(vals[1], 3.0, epsilon = 1e-5);
    }
}
