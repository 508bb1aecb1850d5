//! Random ensembles used for property tests and discriminator initialisation.

use num_complex::Complex;
use rand::Rng;
use rand_distr::StandardNormal;

use super::matrix::ComplexMatrix;
use super::density::DensityMatrix;
use super::state::PureState;
use crate::scalar::{creal, lit, Real};

fn gaussian_complex<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Complex<T> {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex::new(lit(re), lit(im))
}

/// Haar-distributed unitary of dimension `dim` (Gram-Schmidt on a Ginibre matrix).
pub fn random_unitary<T: Real, R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix<T> {
    let mut cols: Vec<Vec<Complex<T>>> = Vec::with_capacity(dim);
    while cols.len() < dim {
        let mut v: Vec<Complex<T>> = (0..dim).map(|_| gaussian_complex(rng)).collect();
        for c in &cols {
            let proj: Complex<T> = c.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (x, y) in v.iter_mut().zip(c) {
                *x -= proj * y;
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        if norm < lit(1e-8) {
            continue;
        }
        for x in &mut v {
            *x /= creal(norm);
        }
        cols.push(v);
    }
    let mut m = ComplexMatrix::zeros(dim, dim);
    for (j, c) in cols.iter().enumerate() {
        for (i, &x) in c.iter().enumerate() {
            m[(i, j)] = x;
        }
    }
    m
}

/// Uniformly random pure state on `nqubits` qubits.
pub fn random_state<T: Real, R: Rng + ?Sized>(rng: &mut R, nqubits: usize) -> PureState<T> {
    let amps: Vec<Complex<T>> = (0..1usize << nqubits).map(|_| gaussian_complex(rng)).collect();
    PureState::normalized(nqubits, amps).expect("gaussian vector is nonzero")
}

/// Random full-rank density matrix (normalized `G G^dagger`).
pub fn random_density<T: Real, R: Rng + ?Sized>(rng: &mut R, nqubits: usize) -> DensityMatrix<T> {
    let dim = 1usize << nqubits;
    let m = random_psd(rng, dim);
    let tr = m.trace().re;
    DensityMatrix::new(nqubits, m.scale(creal(T::one() / tr))).expect("valid by construction")
}

/// Random Hermitian matrix with Gaussian entries.
pub fn random_hermitian<T: Real, R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix<T> {
    let mut m = ComplexMatrix::zeros(dim, dim);
    for i in 0..dim {
        m[(i, i)] = creal(gaussian_complex::<T, R>(rng).re);
        for j in (i + 1)..dim {
            let z = gaussian_complex(rng);
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    m
}

/// Random positive semidefinite matrix `G G^dagger`.
pub fn random_psd<T: Real, R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix<T> {
    let g = ComplexMatrix::new(dim, dim, (0..dim * dim).map(|_| gaussian_complex(rng)).collect())
        .expect("square");
    g.mul_unchecked(&g.adjoint())
}

/// Random probability vector of length `len` (normalized exponential draws).
pub fn random_distribution<T: Real, R: Rng + ?Sized>(rng: &mut R, len: usize) -> Vec<T> {
    let raw: Vec<f64> = (0..len)
        .map(|_| -(1.0 - rng.random::<f64>()).ln())
        .collect();
    let total: f64 = raw.iter().sum();
    raw.iter().map(|x| lit(x / total)).collect()
}
