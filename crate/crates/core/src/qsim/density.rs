use super::kernels::bit_mask;
use super::matrix::{eigvalsh, psd_sqrt, ComplexMatrix};
use super::state::PureState;
use crate::error::{Error, Result};
use crate::scalar::{creal, lit, tol, Real};

/// Density matrix of `nqubits` qubits: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<T: Real> {
    nqubits: usize,
    matrix: ComplexMatrix<T>,
}

impl<T: Real> DensityMatrix<T> {
    /// Validates Hermiticity and unit trace (1e-10) and eigenvalues >= -1e-9.
    pub fn new(nqubits: usize, matrix: ComplexMatrix<T>) -> Result<Self> {
        let dim = 1usize << nqubits;
        if matrix.rows() != dim || matrix.cols() != dim {
            return Err(Error::DimensionMismatch(format!(
                "{nqubits} qubits need a {dim}x{dim} matrix, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let dev = matrix.hermitian_deviation();
        if dev > tol::<T>(1e-10) {
            return Err(Error::NotHermitian(dev.to_f64().unwrap_or(f64::NAN)));
        }
        let tr = matrix.trace();
        if (tr.re - T::one()).abs() > tol::<T>(1e-10) || tr.im.abs() > tol::<T>(1e-10) {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let min = eigvalsh(&matrix)?[0];
        if min < -tol::<T>(1e-9) {
            return Err(Error::InvalidState(format!("negative eigenvalue {min}")));
        }
        Ok(Self { nqubits, matrix })
    }

    pub(crate) fn from_matrix_unchecked(nqubits: usize, matrix: ComplexMatrix<T>) -> Self {
        debug_assert_eq!(matrix.rows(), 1usize << nqubits);
        Self { nqubits, matrix }
    }

    pub fn from_pure(state: &PureState<T>) -> Self {
        let a = state.amplitudes();
        Self {
            nqubits: state.nqubits(),
            matrix: ComplexMatrix::outer(a, a),
        }
    }

    /// `I / 2^n`.
    pub fn maximally_mixed(nqubits: usize) -> Self {
        let dim = 1usize << nqubits;
        Self {
            nqubits,
            matrix: ComplexMatrix::identity(dim).scale(creal(T::one() / lit(dim as f64))),
        }
    }

    #[inline]
    pub fn nqubits(&self) -> usize {
        self.nqubits
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    #[inline]
    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix<T> {
        self.matrix
    }

    pub fn eigenvalues(&self) -> Vec<T> {
        eigvalsh(&self.matrix).expect("density matrices are Hermitian")
    }

    /// `U rho U^dagger` for a full-register unitary.
    pub fn conjugate(&self, u: &ComplexMatrix<T>) -> Result<Self> {
        let m = u.matmul(&self.matrix)?.matmul(&u.adjoint())?;
        Ok(Self::from_matrix_unchecked(self.nqubits, m))
    }

    /// Reduced state on the qubits in `keep` (output ordered by ascending index).
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        if keep.is_empty() {
            return Err(Error::InvalidTarget(
                "partial trace needs at least one kept qubit".into(),
            ));
        }
        let mut kept = keep.to_vec();
        kept.sort_unstable();
        for w in kept.windows(2) {
            if w[0] == w[1] {
                return Err(Error::InvalidTarget(format!("qubit {} repeated", w[0])));
            }
        }
        if let Some(&bad) = kept.iter().find(|&&q| q >= self.nqubits) {
            return Err(Error::InvalidTarget(format!(
                "qubit {bad} out of range for {} qubits",
                self.nqubits
            )));
        }
        let traced: Vec<usize> = (0..self.nqubits).filter(|q| !kept.contains(q)).collect();
        let nk = kept.len();
        let compose = |local: usize, qubits: &[usize]| -> usize {
            let k = qubits.len();
            qubits
                .iter()
                .enumerate()
                .filter(|(p, _)| local & (1 << (k - 1 - p)) != 0)
                .fold(0, |acc, (_, &q)| acc | bit_mask(self.nqubits, q))
        };
        let kdim = 1usize << nk;
        let kept_idx: Vec<usize> = (0..kdim).map(|a| compose(a, &kept)).collect();
        let traced_idx: Vec<usize> = (0..1usize << traced.len())
            .map(|e| compose(e, &traced))
            .collect();
        let mut out = ComplexMatrix::zeros(kdim, kdim);
        for a in 0..kdim {
            for b in 0..kdim {
                let mut acc = self.matrix[(kept_idx[a], kept_idx[b])] * creal(T::zero());
                for &e in &traced_idx {
                    acc += self.matrix[(kept_idx[a] | e, kept_idx[b] | e)];
                }
                out[(a, b)] = acc;
            }
        }
        Ok(Self::from_matrix_unchecked(nk, out))
    }

    /// Uhlmann fidelity `(Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2`, clamped to [0, 1].
    pub fn fidelity(&self, other: &Self) -> Result<T> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(format!(
                "fidelity between {} and {} qubit states",
                self.nqubits, other.nqubits
            )));
        }
        matrix_fidelity(&self.matrix, &other.matrix)
    }
}

/// Uhlmann fidelity of two PSD matrices of equal dimension.
pub(crate) fn matrix_fidelity<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> Result<T> {
    let s = psd_sqrt(a)?;
    let mut inner = s.mul_unchecked(b).mul_unchecked(&s);
    // symmetrize away round-off before diagonalizing
    let herm = inner.adjoint();
    inner = inner.add(&herm)?.scale(creal(lit(0.5)));
    let spectrum = eigvalsh(&inner)?;
    // eigenvalues at round-off level would contribute O(sqrt(eps)) noise
    let floor = spectrum.last().copied().unwrap_or(T::zero()).max(T::zero()) * tol::<T>(1e-13);
    let root_sum: T = spectrum
        .into_iter()
        .filter(|&l| l > floor)
        .map(|l| l.sqrt())
        .sum();
    Ok((root_sum * root_sum).min(T::one()).max(T::zero()))
}

/// Functional form of [`DensityMatrix::partial_trace`].
pub fn partial_trace<T: Real>(rho: &DensityMatrix<T>, keep: &[usize]) -> Result<DensityMatrix<T>> {
    rho.partial_trace(keep)
}

/// Functional form of [`DensityMatrix::fidelity`].
pub fn fidelity<T: Real>(rho: &DensityMatrix<T>, sigma: &DensityMatrix<T>) -> Result<T> {
    rho.fidelity(sigma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::matrix::kron;
    use crate::qsim::random::{random_density, random_state};
    use crate::scalar::czero;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    type D = DensityMatrix<f64>;

    fn bell() -> D {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        PureState::new(2, vec![creal(h), czero(), czero(), creal(h)])
            .unwrap()
            .to_density()
    }

    #[test]
    fn bell_marginal_is_maximally_mixed() {
        let r = bell().partial_trace(&[0]).unwrap();
        let mm = D::maximally_mixed(1);
        for (a, b) in r.matrix().data().iter().zip(mm.matrix().data()) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn product_state_marginal() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a: D = random_density(&mut rng, 1);
        let b: D = random_density(&mut rng, 2);
        let ab = D::new(3, kron(a.matrix(), b.matrix())).unwrap();
        let ra = ab.partial_trace(&[0]).unwrap();
        let rb = ab.partial_trace(&[1, 2]).unwrap();
        assert!(ra.matrix().sub(a.matrix()).unwrap().frobenius_norm() < 1e-12);
        assert!(rb.matrix().sub(b.matrix()).unwrap().frobenius_norm() < 1e-12);
    }

    #[test]
    fn partial_trace_errors() {
        let b = bell();
        assert!(b.partial_trace(&[]).is_err());
        assert!(b.partial_trace(&[2]).is_err());
        assert!(b.partial_trace(&[0, 0]).is_err());
    }

    #[test]
    fn density_validation() {
        let m = ComplexMatrix::<f64>::from_real(2, 2, &[0.5, 0.0, 0.0, 0.4]).unwrap();
        assert!(D::new(1, m).is_err());
        let neg = ComplexMatrix::<f64>::from_real(2, 2, &[1.5, 0.0, 0.0, -0.5]).unwrap();
        assert!(D::new(1, neg).is_err());
        let ok = ComplexMatrix::<f64>::from_real(2, 2, &[0.5, 0.5, 0.5, 0.5]).unwrap();
        assert!(D::new(1, ok).is_ok());
    }

    #[test]
    fn fidelity_examples() {
        let zero = PureState::<f64>::zero(1).to_density();
        let one = PureState::<f64>::basis(1, 1).to_density();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus = PureState::new(1, vec![creal(h), creal(h)]).unwrap().to_density();
        assert_abs_diff_eq!(zero.fidelity(&zero).unwrap(), 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(zero.fidelity(&one).unwrap(), 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!(zero.fidelity(&plus).unwrap(), 0.5, epsilon = 1e-10);
        assert!(zero.fidelity(&bell()).is_err());
    }

    /// Index-summation oracle for the partial trace over the last qubit.
    fn trace_last(rho: &D) -> Vec<Vec<num_complex::Complex64>> {
        let d = rho.dim() / 2;
        (0..d)
            .map(|a| {
                (0..d)
                    .map(|b| rho.matrix()[(2 * a, 2 * b)] + rho.matrix()[(2 * a + 1, 2 * b + 1)])
                    .collect()
            })
            .collect()
    }

    proptest! {
        #[test]
        fn partial_trace_preserves_trace_and_positivity(seed in any::<u64>(), nq in 2usize..5) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let rho: D = random_density(&mut rng, nq);
            let keep: Vec<usize> = (0..nq - 1).collect();
            let r = rho.partial_trace(&keep).unwrap();
            prop_assert!((r.matrix().trace().re - 1.0).abs() < 1e-10);
            prop_assert!(r.eigenvalues()[0] > -1e-9);
            let oracle = trace_last(&rho);
            for (a, row) in oracle.iter().enumerate() {
                for (b, v) in row.iter().enumerate() {
                    prop_assert!((r.matrix()[(a, b)] - v).norm() < 1e-12);
                }
            }
        }

        #[test]
        fn fidelity_is_symmetric(seed in any::<u64>(), nq in 1usize..4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a: D = random_density(&mut rng, nq);
            let b: D = if seed % 2 == 0 {
                random_density(&mut rng, nq)
            } else {
                random_state::<f64, _>(&mut rng, nq).to_density()
            };
            let fab = a.fidelity(&b).unwrap();
            let fba = b.fidelity(&a).unwrap();
            prop_assert!((fab - fba).abs() < 1e-8);
            prop_assert!((0.0..=1.0).contains(&fab));
            prop_assert!((a.fidelity(&a).unwrap() - 1.0).abs() < 1e-10);
        }
    }
}
