use num_complex::Complex;

use super::density::DensityMatrix;
use super::kernels::{apply_kq, bit_mask};
use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::{cone, czero, creal, tol, Real};

/// Normalized pure state of `nqubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState<T: Real> {
    nqubits: usize,
    amps: Vec<Complex<T>>,
}

impl<T: Real> PureState<T> {
    pub fn new(nqubits: usize, amps: Vec<Complex<T>>) -> Result<Self> {
        Self::check_len(nqubits, amps.len())?;
        let norm = norm_of(&amps);
        if (norm - T::one()).abs() > tol::<T>(1e-10) {
            return Err(Error::InvalidState(format!(
                "state norm {} differs from 1",
                norm
            )));
        }
        Ok(Self { nqubits, amps })
    }

    /// Rescales `amps` to unit norm.
    pub fn normalized(nqubits: usize, mut amps: Vec<Complex<T>>) -> Result<Self> {
        Self::check_len(nqubits, amps.len())?;
        let norm = norm_of(&amps);
        if norm == T::zero() || !norm.is_finite() {
            return Err(Error::InvalidState("cannot normalize zero vector".into()));
        }
        for a in &mut amps {
            *a /= creal(norm);
        }
        Ok(Self { nqubits, amps })
    }

    fn check_len(nqubits: usize, len: usize) -> Result<()> {
        if len != 1usize << nqubits {
            return Err(Error::DimensionMismatch(format!(
                "{nqubits} qubits need {} amplitudes, got {len}",
                1usize << nqubits
            )));
        }
        Ok(())
    }

    /// `|0...0>`.
    pub fn zero(nqubits: usize) -> Self {
        Self::basis(nqubits, 0)
    }

    /// Computational basis state `|index>`.
    pub fn basis(nqubits: usize, index: usize) -> Self {
        let mut amps = vec![czero(); 1usize << nqubits];
        amps[index] = cone();
        Self { nqubits, amps }
    }

    #[inline]
    pub fn nqubits(&self) -> usize {
        self.nqubits
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    #[inline]
    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amps
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex<T>> {
        self.amps
    }

    pub fn norm(&self) -> T {
        norm_of(&self.amps)
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> Result<Complex<T>> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(format!(
                "inner product of {} and {} qubit states",
                self.nqubits, other.nqubits
            )));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Applies `gate` to the ordered `targets`, identity elsewhere.
    pub fn apply_gate(&self, gate: &ComplexMatrix<T>, targets: &[usize]) -> Result<Self> {
        validate_targets(self.nqubits, targets)?;
        let sub = 1usize << targets.len();
        if gate.rows() != sub || gate.cols() != sub {
            return Err(Error::DimensionMismatch(format!(
                "{} targets need a {sub}x{sub} gate, got {}x{}",
                targets.len(),
                gate.rows(),
                gate.cols()
            )));
        }
        let dev = gate.unitary_deviation();
        if dev > tol::<T>(1e-10) {
            return Err(Error::NotUnitary(dev.to_f64().unwrap_or(f64::NAN)));
        }
        let mut out = self.clone();
        apply_kq(&mut out.amps, self.nqubits, targets, gate);
        Ok(out)
    }

    /// Probability of reading `outcome` when measuring `qubit`.
    pub fn projector_expectation(&self, qubit: usize, outcome: u8) -> Result<T> {
        if qubit >= self.nqubits {
            return Err(Error::InvalidTarget(format!(
                "qubit {qubit} out of range for {} qubits",
                self.nqubits
            )));
        }
        if outcome > 1 {
            return Err(Error::InvalidArgument(format!("outcome must be 0 or 1, got {outcome}")));
        }
        Ok(outcome_probability(&self.amps, self.nqubits, qubit, outcome))
    }

    pub fn to_density(&self) -> DensityMatrix<T> {
        DensityMatrix::from_pure(self)
    }
}

pub(crate) fn outcome_probability<T: Real>(
    amps: &[Complex<T>],
    nqubits: usize,
    qubit: usize,
    outcome: u8,
) -> T {
    let mask = bit_mask(nqubits, qubit);
    let want = if outcome == 1 { mask } else { 0 };
    amps.iter()
        .enumerate()
        .filter(|(i, _)| i & mask == want)
        .map(|(_, a)| a.norm_sqr())
        .sum()
}

fn norm_of<T: Real>(amps: &[Complex<T>]) -> T {
    amps.iter().map(|a| a.norm_sqr()).sum::<T>().sqrt()
}

pub(crate) fn validate_targets(nqubits: usize, targets: &[usize]) -> Result<()> {
    if targets.is_empty() {
        return Err(Error::InvalidTarget("empty target list".into()));
    }
    for (i, &t) in targets.iter().enumerate() {
        if t >= nqubits {
            return Err(Error::InvalidTarget(format!(
                "qubit {t} out of range for {nqubits} qubits"
            )));
        }
        if targets[..i].contains(&t) {
            return Err(Error::InvalidTarget(format!("qubit {t} repeated")));
        }
    }
    Ok(())
}

/// Functional form of [`PureState::apply_gate`].
pub fn apply_gate<T: Real>(
    state: &PureState<T>,
    gate: &ComplexMatrix<T>,
    targets: &[usize],
) -> Result<PureState<T>> {
    state.apply_gate(gate, targets)
}

/// Functional form of [`PureState::projector_expectation`].
pub fn projector_expectation<T: Real>(state: &PureState<T>, qubit: usize, outcome: u8) -> Result<T> {
    state.projector_expectation(qubit, outcome)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::matrix::kron;
    use crate::qsim::random::{random_state, random_unitary};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    type S = PureState<f64>;
    type M = ComplexMatrix<f64>;

    fn x() -> M {
        M::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap()
    }

    fn cnot() -> M {
        M::from_real(
            4,
            4,
            &[
                1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0,
            ],
        )
        .unwrap()
    }

    fn plus() -> S {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        S::new(1, vec![creal(h), creal(h)]).unwrap()
    }

    /// Embeds `gate` on `targets` into the full register by permuting a kron product.
    fn embed(gate: &M, targets: &[usize], nqubits: usize) -> M {
        let dim = 1usize << nqubits;
        let k = targets.len();
        let mut full = M::zeros(dim, dim);
        for col in 0..dim {
            let local_in: usize = targets
                .iter()
                .enumerate()
                .map(|(p, &t)| ((col >> (nqubits - 1 - t)) & 1) << (k - 1 - p))
                .sum();
            for local_out in 0..(1 << k) {
                let mut row = col;
                for (p, &t) in targets.iter().enumerate() {
                    let bit = (local_out >> (k - 1 - p)) & 1;
                    let m = 1 << (nqubits - 1 - t);
                    row = if bit == 1 { row | m } else { row & !m };
                }
                full[(row, col)] = gate[(local_out, local_in)];
            }
        }
        full
    }

    #[test]
    fn x_flips_zero() {
        let out = S::zero(1).apply_gate(&x(), &[0]).unwrap();
        assert_eq!(out, S::basis(1, 1));
    }

    #[test]
    fn cnot_makes_bell_state() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let input = S::new(2, vec![creal(h), czero(), creal(h), czero()]).unwrap();
        let bell = input.apply_gate(&cnot(), &[0, 1]).unwrap();
        assert_abs_diff_eq!(bell.amplitudes()[0].re, h, epsilon = 1e-15);
        assert_abs_diff_eq!(bell.amplitudes()[3].re, h, epsilon = 1e-15);
        assert_eq!(bell.amplitudes()[1], czero());
    }

    #[test]
    fn target_errors() {
        let s = S::zero(2);
        assert!(matches!(s.apply_gate(&cnot(), &[0, 0]), Err(Error::InvalidTarget(_))));
        assert!(matches!(s.apply_gate(&x(), &[2]), Err(Error::InvalidTarget(_))));
        assert!(matches!(s.apply_gate(&cnot(), &[0]), Err(Error::DimensionMismatch(_))));
        let not_unitary = M::from_real(2, 2, &[1.0, 1.0, 0.0, 1.0]).unwrap();
        assert!(matches!(s.apply_gate(&not_unitary, &[0]), Err(Error::NotUnitary(_))));
    }

    #[test]
    fn rejects_unnormalized() {
        assert!(S::new(1, vec![cone(), cone()]).is_err());
        assert!(S::new(1, vec![cone()]).is_err());
    }

    #[test]
    fn projector_expectations() {
        assert_eq!(S::zero(1).projector_expectation(0, 0).unwrap(), 1.0);
        assert_abs_diff_eq!(plus().projector_expectation(0, 1).unwrap(), 0.5, epsilon = 1e-15);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let bell = S::new(2, vec![creal(h), czero(), czero(), creal(h)]).unwrap();
        assert_abs_diff_eq!(bell.projector_expectation(1, 0).unwrap(), 0.5, epsilon = 1e-15);
        assert!(bell.projector_expectation(2, 0).is_err());
    }

    proptest! {
        #[test]
        fn gate_application_matches_full_embedding(seed in any::<u64>(), nq in 2usize..5, k in 1usize..3) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let psi: S = random_state(&mut rng, nq);
            let g: M = random_unitary(&mut rng, 1 << k);
            let mut targets: Vec<usize> = (0..nq).collect();
            use rand::seq::SliceRandom;
            targets.shuffle(&mut rng);
            targets.truncate(k);
            let out = psi.apply_gate(&g, &targets).unwrap();
            prop_assert!((out.norm() - 1.0).abs() < 1e-10);
            let oracle = embed(&g, &targets, nq).apply(psi.amplitudes()).unwrap();
            for (a, b) in out.amplitudes().iter().zip(&oracle) {
                prop_assert!((a - b).norm() < 1e-12);
            }
        }

        #[test]
        fn outcome_probabilities_sum_to_one(seed in any::<u64>(), nq in 1usize..5) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let psi: S = random_state(&mut rng, nq);
            for q in 0..nq {
                let p0 = psi.projector_expectation(q, 0).unwrap();
                let p1 = psi.projector_expectation(q, 1).unwrap();
                prop_assert!((p0 + p1 - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn embedding_oracle_agrees_with_kron_for_leading_qubit() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let g: M = random_unitary(&mut rng, 2);
        let full = embed(&g, &[0], 2);
        assert_eq!(full, kron(&g, &M::identity(2)));
    }
}
