//! In-place gate kernels on state vectors and operator matrices.
//!
//! Qubit 0 is the most significant bit of the basis index.

use num_complex::Complex;

use super::matrix::ComplexMatrix;
use crate::scalar::{czero, Real};

/// Single-qubit operator as a 2x2 array.
pub type Mat2<T> = [[Complex<T>; 2]; 2];

#[inline]
pub(crate) fn bit_mask(nqubits: usize, qubit: usize) -> usize {
    1usize << (nqubits - 1 - qubit)
}

pub(crate) fn adjoint2<T: Real>(g: &Mat2<T>) -> Mat2<T> {
    [
        [g[0][0].conj(), g[1][0].conj()],
        [g[0][1].conj(), g[1][1].conj()],
    ]
}

#[cfg(test)]
pub(crate) fn mat2_to_matrix<T: Real>(g: &Mat2<T>) -> ComplexMatrix<T> {
    ComplexMatrix::new(2, 2, vec![g[0][0], g[0][1], g[1][0], g[1][1]]).expect("2x2")
}

/// `v <- g v` on `qubit`.
pub(crate) fn apply_1q<T: Real>(v: &mut [Complex<T>], nqubits: usize, qubit: usize, g: &Mat2<T>) {
    let mask = bit_mask(nqubits, qubit);
    for i in 0..v.len() {
        if i & mask != 0 {
            continue;
        }
        let j = i | mask;
        let a = v[i];
        let b = v[j];
        v[i] = g[0][0] * a + g[0][1] * b;
        v[j] = g[1][0] * a + g[1][1] * b;
    }
}

pub(crate) fn apply_cnot<T: Real>(v: &mut [Complex<T>], nqubits: usize, control: usize, target: usize) {
    let cm = bit_mask(nqubits, control);
    let tm = bit_mask(nqubits, target);
    for i in 0..v.len() {
        if i & cm != 0 && i & tm == 0 {
            v.swap(i, i | tm);
        }
    }
}

/// Applies a `2^k x 2^k` gate to the ordered `targets` (first target = most
/// significant bit of the gate index).
pub(crate) fn apply_kq<T: Real>(
    v: &mut [Complex<T>],
    nqubits: usize,
    targets: &[usize],
    gate: &ComplexMatrix<T>,
) {
    let k = targets.len();
    let sub = 1usize << k;
    let masks: Vec<usize> = targets.iter().map(|&q| bit_mask(nqubits, q)).collect();
    let all: usize = masks.iter().fold(0, |acc, m| acc | m);
    let offsets: Vec<usize> = (0..sub)
        .map(|local| {
            masks
                .iter()
                .enumerate()
                .filter(|(pos, _)| local & (1 << (k - 1 - pos)) != 0)
                .fold(0, |acc, (_, m)| acc | m)
        })
        .collect();
    let mut buf = vec![czero::<T>(); sub];
    for base in 0..v.len() {
        if base & all != 0 {
            continue;
        }
        for (b, off) in buf.iter_mut().zip(&offsets) {
            *b = v[base | off];
        }
        for (r, off) in offsets.iter().enumerate() {
            v[base | off] = gate.row(r).iter().zip(&buf).map(|(g, x)| g * x).sum();
        }
    }
}

