use std::fmt;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qsim::{kron, ComplexMatrix, DensityMatrix, Mat2};
use crate::scalar::{cone, czero, lit, tol, Real};

/// Multi-index `(k_1, .., k_n)` of a Pauli string, `0=I, 1=X, 2=Y, 3=Z`.
///
/// The flat index is base 4 with `k_1` as the most significant digit.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PauliIndex {
    digits: Vec<u8>,
}

impl PauliIndex {
    pub fn new(digits: Vec<u8>) -> Result<Self> {
        if let Some(d) = digits.iter().find(|&&d| d > 3) {
            return Err(Error::InvalidArgument(format!("Pauli digit {d} out of range 0..=3")));
        }
        Ok(Self { digits })
    }

    pub fn from_flat(n: usize, mut index: usize) -> Self {
        let mut digits = vec![0u8; n];
        for d in digits.iter_mut().rev() {
            *d = (index % 4) as u8;
            index /= 4;
        }
        Self { digits }
    }

    pub fn flat(&self) -> usize {
        self.digits.iter().fold(0, |acc, &d| acc * 4 + d as usize)
    }

    pub fn n(&self) -> usize {
        self.digits.len()
    }

    pub fn digits(&self) -> &[u8] {
        &self.digits
    }
}

impl fmt::Display for PauliIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &d in &self.digits {
            f.write_str(["I", "X", "Y", "Z"][d as usize])?;
        }
        Ok(())
    }
}

/// Probability vector over the `4^n` Pauli strings on `n` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbTable<T: Real> {
    n: usize,
    probs: Vec<T>,
}

impl<T: Real> ProbTable<T> {
    /// Validates length `4^n`, nonnegative entries and unit sum (1e-10).
    pub fn new(n: usize, probs: Vec<T>) -> Result<Self> {
        check_distribution(&probs, 1usize << (2 * n), "Pauli table")?;
        Ok(Self { n, probs })
    }

    /// Rescales nonnegative weights to unit sum.
    pub fn normalized(n: usize, weights: Vec<T>) -> Result<Self> {
        let total: T = weights.iter().copied().sum();
        if weights.iter().any(|&w| w < T::zero() || !w.is_finite()) || total <= T::zero() {
            return Err(Error::InvalidDistribution(
                "weights must be finite, nonnegative and not all zero".into(),
            ));
        }
        Self::new(n, weights.into_iter().map(|w| w / total).collect())
    }

    pub fn from_f64(n: usize, probs: &[f64]) -> Result<Self> {
        Self::new(n, probs.iter().map(|&p| lit(p)).collect())
    }

    pub(crate) fn from_vec_unchecked(n: usize, probs: Vec<T>) -> Self {
        debug_assert_eq!(probs.len(), 1usize << (2 * n));
        Self { n, probs }
    }

    /// All weight on one Pauli string.
    pub fn delta(n: usize, index: usize) -> Self {
        let mut probs = vec![T::zero(); 1usize << (2 * n)];
        probs[index] = T::one();
        Self { n, probs }
    }

    pub fn uniform(n: usize) -> Self {
        let len = 1usize << (2 * n);
        Self {
            n,
            probs: vec![T::one() / lit(len as f64); len],
        }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn into_probs(self) -> Vec<T> {
        self.probs
    }

    pub fn prob(&self, k: &PauliIndex) -> T {
        self.probs[k.flat()]
    }

    pub fn to_f64_vec(&self) -> Vec<f64> {
        self.probs.iter().map(|p| p.to_f64().unwrap_or(f64::NAN)).collect()
    }

    /// Marginal distribution of the Pauli digit at position `site`.
    pub fn marginal(&self, site: usize) -> Result<ProbTable<T>> {
        if site >= self.n {
            return Err(Error::InvalidArgument(format!(
                "site {site} out of range for {} uses",
                self.n
            )));
        }
        let mut out = vec![T::zero(); 4];
        for (i, &p) in self.probs.iter().enumerate() {
            let digit = (i >> (2 * (self.n - 1 - site))) & 3;
            out[digit] += p;
        }
        Ok(ProbTable::from_vec_unchecked(1, out))
    }

    /// Serializes as whitespace-separated decimals in base-4 index order.
    pub fn to_text(&self) -> String {
        self.to_f64_vec()
            .iter()
            .map(|p| format!("{p}"))
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Parses the format of [`ProbTable::to_text`] (commas are also accepted).
    pub fn from_text(text: &str) -> Result<Self> {
        let values: Vec<f64> = text
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|e| Error::InvalidDistribution(format!("bad entry {s:?}: {e}")))
            })
            .collect::<Result<_>>()?;
        let n = table_uses(values.len())?;
        Self::from_f64(n, &values)
    }
}

/// Number of channel uses `n` for a table of `len = 4^n` entries.
pub fn table_uses(len: usize) -> Result<usize> {
    if len == 0 || !len.is_power_of_two() || !len.trailing_zeros().is_multiple_of(2) {
        return Err(Error::InvalidDistribution(format!(
            "table length {len} is not a power of 4"
        )));
    }
    Ok(len.trailing_zeros() as usize / 2)
}

pub(crate) fn check_distribution<T: Real>(probs: &[T], len: usize, what: &str) -> Result<()> {
    if probs.len() != len {
        return Err(Error::DimensionMismatch(format!(
            "{what} needs {len} entries, got {}",
            probs.len()
        )));
    }
    if let Some(p) = probs.iter().find(|p| !p.is_finite() || **p < T::zero()) {
        return Err(Error::InvalidDistribution(format!("{what} has invalid entry {p}")));
    }
    let total: T = probs.iter().copied().sum();
    if (total - T::one()).abs() > tol::<T>(1e-10) {
        return Err(Error::InvalidDistribution(format!("{what} sums to {total}, not 1")));
    }
    Ok(())
}

/// Single-qubit Pauli matrix `sigma_k`.
pub fn pauli_matrix<T: Real>(k: u8) -> Mat2<T> {
    let o = czero::<T>();
    let l = cone::<T>();
    let i = Complex::new(T::zero(), T::one());
    match k {
        0 => [[l, o], [o, l]],
        1 => [[o, l], [l, o]],
        2 => [[o, -i], [i, o]],
        3 => [[l, o], [o, -l]],
        _ => panic!("Pauli digit {k} out of range"),
    }
}

/// Dense matrix of `sigma_{k_1} ⊗ .. ⊗ sigma_{k_n}`.
pub fn pauli_string<T: Real>(k: &PauliIndex) -> ComplexMatrix<T> {
    k.digits().iter().fold(ComplexMatrix::identity(1), |acc, &d| {
        let p = pauli_matrix::<T>(d);
        kron(
            &acc,
            &ComplexMatrix::new(2, 2, vec![p[0][0], p[0][1], p[1][0], p[1][1]]).expect("2x2"),
        )
    })
}

/// A Pauli string as `P|j> = phase[j] |j ^ flip>`.
struct PauliAction<T: Real> {
    flip: usize,
    phase: Vec<Complex<T>>,
}

fn pauli_action<T: Real>(digits: &[u8]) -> PauliAction<T> {
    let n = digits.len();
    let dim = 1usize << n;
    let mut flip = 0;
    for (q, &d) in digits.iter().enumerate() {
        if d == 1 || d == 2 {
            flip |= 1 << (n - 1 - q);
        }
    }
    let i = Complex::new(T::zero(), T::one());
    let phase = (0..dim)
        .map(|j| {
            digits.iter().enumerate().fold(cone::<T>(), |acc, (q, &d)| {
                let bit = (j >> (n - 1 - q)) & 1;
                match (d, bit) {
                    (2, 0) => acc * i,
                    (2, 1) => acc * (-i),
                    (3, 1) => -acc,
                    _ => acc,
                }
            })
        })
        .collect();
    PauliAction { flip, phase }
}

/// `sum_k p_k sigma_k rho sigma_k` for a spatially correlated Pauli channel.
pub fn apply_pauli_spatial<T: Real>(
    table: &ProbTable<T>,
    rho: &DensityMatrix<T>,
) -> Result<DensityMatrix<T>> {
    if rho.nqubits() != table.n() {
        return Err(Error::DimensionMismatch(format!(
            "{}-use Pauli channel on a {}-qubit state",
            table.n(),
            rho.nqubits()
        )));
    }
    let n = table.n();
    let dim = rho.dim();
    let src = rho.matrix();
    let mut out = ComplexMatrix::zeros(dim, dim);
    for (flat, &p) in table.probs().iter().enumerate() {
        if p == T::zero() {
            continue;
        }
        let k = PauliIndex::from_flat(n, flat);
        let act = pauli_action::<T>(k.digits());
        // (P rho P)_{ab} = phase(a^f) rho_{a^f, b^f} conj(phase(b^f))
        for a in 0..dim {
            let sa = a ^ act.flip;
            let pa = act.phase[sa] * Complex::new(p, T::zero());
            for b in 0..dim {
                let sb = b ^ act.flip;
                out[(a, b)] += pa * src[(sa, sb)] * act.phase[sb].conj();
            }
        }
    }
    Ok(DensityMatrix::from_matrix_unchecked(n, out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::random::{random_density, random_distribution};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn pauli_index_round_trip() {
        let k = PauliIndex::new(vec![2, 0, 3]).unwrap();
        assert_eq!(k.flat(), 2 * 16 + 3);
        assert_eq!(PauliIndex::from_flat(3, k.flat()), k);
        assert_eq!(k.to_string(), "YIZ");
        assert!(PauliIndex::new(vec![4]).is_err());
    }

    #[test]
    fn table_validation() {
        assert!(ProbTable::<f64>::from_f64(1, &[0.5, 0.5, 0.0, 0.0]).is_ok());
        assert!(ProbTable::<f64>::from_f64(1, &[0.5, 0.4, 0.0, 0.0]).is_err());
        assert!(ProbTable::<f64>::from_f64(1, &[1.5, -0.5, 0.0, 0.0]).is_err());
        assert!(ProbTable::<f64>::from_f64(1, &[1.0]).is_err());
        assert!(table_uses(8).is_err());
        assert_eq!(table_uses(16).unwrap(), 2);
    }

    #[test]
    fn text_format_round_trips() {
        let t = ProbTable::<f64>::from_f64(1, &[0.55, 0.2, 0.15, 0.1]).unwrap();
        assert_eq!(t.to_text(), "0.55 0.2 0.15 0.1");
        assert_eq!(ProbTable::from_text(&t.to_text()).unwrap(), t);
        assert_eq!(ProbTable::<f64>::from_text("0.55, 0.2, 0.15, 0.1").unwrap(), t);
        assert!(ProbTable::<f64>::from_text("0.5 0.5 0.1").is_err());
    }

    #[test]
    fn identity_table_is_identity_channel() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let rho: DensityMatrix<f64> = random_density(&mut rng, 2);
        let out = apply_pauli_spatial(&ProbTable::delta(2, 0), &rho).unwrap();
        assert!(out.matrix().sub(rho.matrix()).unwrap().frobenius_norm() < 1e-15);
    }

    #[test]
    fn uniform_single_qubit_table_depolarizes() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let rho: DensityMatrix<f64> = random_density(&mut rng, 1);
        let out = apply_pauli_spatial(&ProbTable::uniform(1), &rho).unwrap();
        let mm = DensityMatrix::<f64>::maximally_mixed(1);
        assert!(out.matrix().sub(mm.matrix()).unwrap().frobenius_norm() < 1e-15);
    }

    #[test]
    fn rejects_mismatched_state() {
        let rho = DensityMatrix::<f64>::maximally_mixed(1);
        assert!(apply_pauli_spatial(&ProbTable::uniform(2), &rho).is_err());
    }

    proptest! {
        #[test]
        fn matches_dense_pauli_sum(seed in any::<u64>(), n in 1usize..3) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let table = ProbTable::new(n, random_distribution(&mut rng, 1 << (2 * n))).unwrap();
            let rho: DensityMatrix<f64> = random_density(&mut rng, n);
            let out = apply_pauli_spatial(&table, &rho).unwrap();
            // oracle: explicit 4^n-term sum of dense products
            let mut oracle = ComplexMatrix::<f64>::zeros(rho.dim(), rho.dim());
            for (flat, &p) in table.probs().iter().enumerate() {
                let s = pauli_string::<f64>(&PauliIndex::from_flat(n, flat));
                let term = s.matmul(rho.matrix()).unwrap().matmul(&s).unwrap();
                oracle = oracle.add(&term.scale(Complex::new(p, 0.0))).unwrap();
            }
            prop_assert!(out.matrix().sub(&oracle).unwrap().frobenius_norm() < 1e-12);
            prop_assert!(DensityMatrix::new(n, out.into_matrix()).is_ok());
        }
    }
}
