use num_complex::Complex;

use crate::error::{Error, Result};
use crate::qsim::{eigvalsh, ComplexMatrix};

fn check_mn(m: usize, n: usize) -> Result<()> {
    if m < 1 || n < 1 {
        return Err(Error::InvalidArgument(format!("need m >= 1 and n >= 1, got m={m}, n={n}")));
    }
    Ok(())
}

/// Binomial coefficients `C(n, 0..=n)`, exact.
fn binomials(n: usize) -> Vec<u128> {
    let mut row = vec![1u128];
    for _ in 0..n {
        let mut next = vec![1u128; row.len() + 1];
        for i in 1..row.len() {
            next[i] = row[i - 1] + row[i];
        }
        row = next;
    }
    row
}

/// Eigenvalues `g_k`, `k = 0..2^m`, of the Gram matrix of the `n`-probe
/// branch Choi states of an `m`-bit phase channel.
///
/// With `A_u = sum_{l = u mod 2^m} C(n, l)`, `g_k = 2^{m-2n} sum_u A_u A_{u+k}`
/// (indices mod `2^m`), accumulated in exact integers. Supports `n <= 64`
/// and `m <= 20`.
pub fn gram_eigenvalues(m: usize, n: usize) -> Result<Vec<f64>> {
    check_mn(m, n)?;
    if n > 64 || m > 20 {
        return Err(Error::InvalidArgument(format!(
            "exact accumulation supports n <= 64 and m <= 20, got m={m}, n={n}"
        )));
    }
    let bins = 1usize << m;
    let mut aliased = vec![0u128; bins];
    for (l, c) in binomials(n).into_iter().enumerate() {
        aliased[l % bins] += c;
    }
    let scale = 2f64.powi(m as i32 - 2 * n as i32);
    (0..bins)
        .map(|k| {
            let mut acc = 0u128;
            for u in 0..bins {
                acc = aliased[u]
                    .checked_mul(aliased[(u + k) % bins])
                    .and_then(|x| acc.checked_add(x))
                    .ok_or_else(|| Error::InvalidArgument("Gram accumulation overflow".into()))?;
            }
            Ok(acc as f64 * scale)
        })
        .collect()
}

/// Ascending eigenvalues of `G_st = |<chi_s|chi_t>|^{2n}`, built and
/// diagonalized directly. `m <= 6`.
pub fn brute_force_gram(m: usize, n: usize) -> Result<Vec<f64>> {
    check_mn(m, n)?;
    if m > 6 {
        return Err(Error::InvalidArgument(format!("brute-force Gram needs m <= 6, got {m}")));
    }
    let g = gram_matrix(m, n);
    eigvalsh(&g)
}

/// `G_st = |(1 + e^{2 pi i (t - s) / 2^m}) / 2|^{2n}`.
pub(crate) fn gram_matrix(m: usize, n: usize) -> ComplexMatrix<f64> {
    let bins = 1usize << m;
    let mut g = ComplexMatrix::zeros(bins, bins);
    for s in 0..bins {
        for t in 0..bins {
            let phase = std::f64::consts::TAU * (t as f64 - s as f64) / bins as f64;
            let overlap = (Complex::new(1.0, 0.0) + Complex::from_polar(1.0, phase)) / 2.0;
            g[(s, t)] = Complex::new(overlap.norm_sqr().powi(n as i32), 0.0);
        }
    }
    g
}

/// Whether `n` probes determine an `m`-bit phase distribution: `n >= 2^{m-1}`.
pub fn is_identifiable(m: usize, n: usize) -> bool {
    m >= 1 && n >= 1 && m - 1 < usize::BITS as usize && n >= 1usize << (m - 1)
}
