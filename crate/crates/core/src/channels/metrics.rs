use crate::error::{Error, Result};
use crate::qsim::{fidelity, matrix_fidelity, ComplexMatrix, DensityMatrix, PureState};
use crate::scalar::{cis, creal, lit, Real};

use super::pauli::ProbTable;

/// `sum_k p_k ln(p_k / q_k)`, `+inf` when `p` puts mass where `q` has none.
pub fn kl_divergence<T: Real>(p: &ProbTable<T>, q: &ProbTable<T>) -> Result<T> {
    if p.n() != q.n() {
        return Err(Error::DimensionMismatch(format!(
            "tables for {} and {} uses",
            p.n(),
            q.n()
        )));
    }
    kl_divergence_dist(p.probs(), q.probs())
}

/// [`kl_divergence`] on raw probability vectors of equal length.
pub fn kl_divergence_dist<T: Real>(p: &[T], q: &[T]) -> Result<T> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch(format!(
            "distributions of length {} and {}",
            p.len(),
            q.len()
        )));
    }
    let mut acc = T::zero();
    for (&pk, &qk) in p.iter().zip(q) {
        if pk <= T::zero() {
            continue;
        }
        if qk <= T::zero() {
            return Ok(T::infinity());
        }
        acc += pk * (pk / qk).ln();
    }
    Ok(acc.max(T::zero()))
}

/// Mean output fidelity of two `n`-qubit channels over computational basis inputs.
pub fn avg_fidelity<T, R, F>(real: R, fake: F, n: usize) -> Result<T>
where
    T: Real,
    R: Fn(&DensityMatrix<T>) -> Result<DensityMatrix<T>>,
    F: Fn(&DensityMatrix<T>) -> Result<DensityMatrix<T>>,
{
    let dim = 1usize << n;
    let mut total = T::zero();
    for i in 0..dim {
        let input = PureState::basis(n, i).to_density();
        let a = real(&input)?;
        let b = fake(&input)?;
        if a.nqubits() != n || b.nqubits() != n {
            return Err(Error::DimensionMismatch(format!(
                "channel outputs on {} and {} qubits, expected {n}",
                a.nqubits(),
                b.nqubits()
            )));
        }
        total += fidelity(&a, &b)?;
    }
    Ok(total / lit(dim as f64))
}

fn flip_mask(n: usize, flat: usize) -> usize {
    // X and Y flip a bit, I and Z do not
    (0..n).fold(0, |acc, q| {
        let d = (flat >> (2 * (n - 1 - q))) & 3;
        acc | (usize::from(d == 1 || d == 2) << (n - 1 - q))
    })
}

/// Closed form of [`avg_fidelity`] for two spatial Pauli channels.
///
/// Pauli strings send basis states to basis states, so every output is
/// diagonal and the bit-flip pattern distribution is input independent.
pub fn pauli_avg_fidelity<T: Real>(p: &ProbTable<T>, q: &ProbTable<T>) -> Result<T> {
    if p.n() != q.n() {
        return Err(Error::DimensionMismatch(format!(
            "tables for {} and {} uses",
            p.n(),
            q.n()
        )));
    }
    let n = p.n();
    let mut a = vec![T::zero(); 1 << n];
    let mut b = vec![T::zero(); 1 << n];
    for (flat, (&pk, &qk)) in p.probs().iter().zip(q.probs()).enumerate() {
        let f = flip_mask(n, flat);
        a[f] += pk;
        b[f] += qk;
    }
    Ok(bhattacharyya_sq(&a, &b))
}

/// Choi-state fidelity of two spatial Pauli channels.
///
/// Pauli Choi states are orthonormal Bell projectors, so the fidelity is
/// the classical one, `(sum_k sqrt(p_k q_k))^2`.
pub fn pauli_choi_fidelity<T: Real>(p: &ProbTable<T>, q: &ProbTable<T>) -> Result<T> {
    if p.n() != q.n() {
        return Err(Error::DimensionMismatch(format!(
            "tables for {} and {} uses",
            p.n(),
            q.n()
        )));
    }
    Ok(bhattacharyya_sq(p.probs(), q.probs()))
}

fn bhattacharyya_sq<T: Real>(a: &[T], b: &[T]) -> T {
    let s: T = a
        .iter()
        .zip(b)
        .map(|(&x, &y)| (x.max(T::zero()) * y.max(T::zero())).sqrt())
        .sum();
    (s * s).min(T::one())
}

/// Choi state of the `n`-probe phase channel, compressed to Hamming weight.
///
/// `U(s)^{⊗n}` only phases `|x>` by `e^{2 pi i s |x|}`, so the Choi state lives
/// on `span{|w>}`, `w = |x|`, with amplitudes `sqrt(C(n, w) / 2^n)`.
fn phase_choi_block<T: Real>(dist: &[T], n: usize) -> ComplexMatrix<T> {
    let bins = dist.len();
    let dim = n + 1;
    let amp: Vec<T> = (0..=n)
        .map(|w| (lit::<T>(binomial(n, w)) / lit::<T>(2f64.powi(n as i32))).sqrt())
        .collect();
    let mut out = ComplexMatrix::zeros(dim, dim);
    for (b, &pb) in dist.iter().enumerate() {
        if pb == T::zero() {
            continue;
        }
        let s: T = lit::<T>(b as f64) / lit(bins as f64);
        for w in 0..dim {
            for v in 0..dim {
                let phase = cis(T::TAU() * s * lit((w as f64) - (v as f64)));
                out[(w, v)] += phase * creal(pb * amp[w] * amp[v]);
            }
        }
    }
    out
}

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Choi-state fidelity of two `n`-probe phase channels on `2^m` bins.
pub fn metrology_choi_fidelity<T: Real>(p: &[T], q: &[T], n: usize) -> Result<T> {
    if p.len() != q.len() || !p.len().is_power_of_two() || p.len() < 2 {
        return Err(Error::DimensionMismatch(format!(
            "phase distributions of length {} and {}",
            p.len(),
            q.len()
        )));
    }
    if n < 1 {
        return Err(Error::InvalidArgument("need at least one probe".into()));
    }
    matrix_fidelity(&phase_choi_block(p, n), &phase_choi_block(q, n))
}
