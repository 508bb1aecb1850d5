use num_complex::Complex;

use crate::error::{Error, Result};
use crate::qsim::{kron, ComplexMatrix, DensityMatrix};
use crate::scalar::{cis, lit, tol, Real};

use super::pauli::{check_distribution, pauli_string, PauliIndex, ProbTable};

/// `rho -> sum_b w_b U_b rho U_b^dagger`.
#[derive(Debug, Clone)]
pub struct RandomUnitaryMap<T: Real> {
    nqubits: usize,
    branches: Vec<(ComplexMatrix<T>, T)>,
}

impl<T: Real> RandomUnitaryMap<T> {
    pub fn new(branches: Vec<(ComplexMatrix<T>, T)>) -> Result<Self> {
        let first = branches
            .first()
            .ok_or_else(|| Error::InvalidArgument("random unitary map without branches".into()))?;
        let dim = first.0.rows();
        if !dim.is_power_of_two() {
            return Err(Error::DimensionMismatch(format!("dimension {dim} is not a power of two")));
        }
        for (u, _) in &branches {
            if !u.is_square() || u.rows() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "branch is {}x{}, expected {dim}x{dim}",
                    u.rows(),
                    u.cols()
                )));
            }
            let dev = u.unitary_deviation();
            if dev > tol::<T>(1e-10) {
                return Err(Error::NotUnitary(dev.to_f64().unwrap_or(f64::NAN)));
            }
        }
        let weights: Vec<T> = branches.iter().map(|b| b.1).collect();
        check_distribution(&weights, weights.len(), "branch weights")?;
        Ok(Self {
            nqubits: dim.trailing_zeros() as usize,
            branches,
        })
    }

    /// The spatial Pauli channel of `table` as an explicit unitary mixture.
    pub fn from_pauli_table(table: &ProbTable<T>) -> Self {
        let n = table.n();
        let branches = table
            .probs()
            .iter()
            .enumerate()
            .map(|(flat, &p)| (pauli_string(&PauliIndex::from_flat(n, flat)), p))
            .collect();
        Self { nqubits: n, branches }
    }

    pub fn nqubits(&self) -> usize {
        self.nqubits
    }

    pub fn branches(&self) -> &[(ComplexMatrix<T>, T)] {
        &self.branches
    }

    pub fn apply(&self, rho: &DensityMatrix<T>) -> Result<DensityMatrix<T>> {
        if rho.nqubits() != self.nqubits {
            return Err(Error::DimensionMismatch(format!(
                "{}-qubit map on a {}-qubit state",
                self.nqubits,
                rho.nqubits()
            )));
        }
        let dim = rho.dim();
        let mut out = ComplexMatrix::zeros(dim, dim);
        for (u, w) in &self.branches {
            if *w == T::zero() {
                continue;
            }
            let term = u.mul_unchecked(rho.matrix()).mul_unchecked(&u.adjoint());
            out.axpy(Complex::new(*w, T::zero()), &term);
        }
        Ok(DensityMatrix::from_matrix_unchecked(self.nqubits, out))
    }
}

/// `diag(1, e^{2 pi i s})`.
pub fn phase_unitary<T: Real>(s: T) -> ComplexMatrix<T> {
    ComplexMatrix::diagonal(&[Complex::new(T::one(), T::zero()), cis(T::TAU() * s)])
}

/// Phase shifts `s_b = b / 2^m` applied to all `n` probes, weighted by `dist`.
pub fn metrology_map<T: Real>(m: usize, dist: &[T], n: usize) -> Result<RandomUnitaryMap<T>> {
    if m < 1 || n < 1 {
        return Err(Error::InvalidArgument(format!("need m >= 1 and n >= 1, got m={m}, n={n}")));
    }
    if m >= usize::BITS as usize - 1 {
        return Err(Error::InvalidArgument(format!("m = {m} is too large")));
    }
    let bins = 1usize << m;
    check_distribution(dist, bins, "phase distribution")?;
    let branches = dist
        .iter()
        .enumerate()
        .map(|(b, &w)| {
            let u = phase_unitary::<T>(lit::<T>(b as f64) / lit(bins as f64));
            let un = (1..n).fold(u.clone(), |acc, _| kron(&acc, &u));
            (un, w)
        })
        .collect();
    Ok(RandomUnitaryMap { nqubits: n, branches })
}

/// `(I ⊗ Phi)(|Omega><Omega|)` with `|Omega> = sum_i |ii> / sqrt(D)`.
pub fn choi_state<T: Real>(map: &RandomUnitaryMap<T>, nqubits: usize) -> Result<DensityMatrix<T>> {
    if map.nqubits() != nqubits {
        return Err(Error::DimensionMismatch(format!(
            "map acts on {} qubits, not {nqubits}",
            map.nqubits()
        )));
    }
    let d = 1usize << nqubits;
    let norm = T::one() / lit::<T>(d as f64).sqrt();
    let mut out = ComplexMatrix::zeros(d * d, d * d);
    let mut v = vec![Complex::new(T::zero(), T::zero()); d * d];
    for (u, w) in map.branches() {
        if *w == T::zero() {
            continue;
        }
        for i in 0..d {
            for j in 0..d {
                v[i * d + j] = u[(j, i)] * norm;
            }
        }
        let outer = ComplexMatrix::outer(&v, &v);
        out.axpy(Complex::new(*w, T::zero()), &outer);
    }
    Ok(DensityMatrix::from_matrix_unchecked(2 * nqubits, out))
}
