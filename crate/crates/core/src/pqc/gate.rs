use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qsim::{ComplexMatrix, Mat2};
use crate::scalar::{czero, lit, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateKind {
    Rx,
    Ry,
    Rz,
    Cnot,
}

impl GateKind {
    pub fn is_rotation(self) -> bool {
        !matches!(self, GateKind::Cnot)
    }
}

/// One gate of a [`ParamCircuit`](super::ParamCircuit).
///
/// Rotations carry one target and a parameter index; CNOT carries
/// `[control, target]` and no parameter.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gate {
    kind: GateKind,
    targets: Vec<usize>,
    param_index: Option<usize>,
}

impl Gate {
    pub fn new(kind: GateKind, targets: Vec<usize>, param_index: Option<usize>) -> Result<Self> {
        match kind {
            GateKind::Cnot => {
                if targets.len() != 2 || targets[0] == targets[1] {
                    return Err(Error::InvalidTarget(format!(
                        "CNOT needs two distinct qubits, got {targets:?}"
                    )));
                }
                if param_index.is_some() {
                    return Err(Error::InvalidArgument("CNOT takes no parameter".into()));
                }
            }
            _ => {
                if targets.len() != 1 {
                    return Err(Error::InvalidTarget(format!(
                        "rotation needs exactly one qubit, got {targets:?}"
                    )));
                }
                if param_index.is_none() {
                    return Err(Error::InvalidArgument("rotation needs a parameter index".into()));
                }
            }
        }
        Ok(Self {
            kind,
            targets,
            param_index,
        })
    }

    pub fn rx(qubit: usize, param: usize) -> Self {
        Self::rotation(GateKind::Rx, qubit, param)
    }

    pub fn ry(qubit: usize, param: usize) -> Self {
        Self::rotation(GateKind::Ry, qubit, param)
    }

    pub fn rz(qubit: usize, param: usize) -> Self {
        Self::rotation(GateKind::Rz, qubit, param)
    }

    pub fn rotation(kind: GateKind, qubit: usize, param: usize) -> Self {
        assert!(kind.is_rotation());
        Self {
            kind,
            targets: vec![qubit],
            param_index: Some(param),
        }
    }

    /// CNOT; panics when `control == target`.
    pub fn cnot(control: usize, target: usize) -> Self {
        assert_ne!(control, target, "CNOT control equals target");
        Self {
            kind: GateKind::Cnot,
            targets: vec![control, target],
            param_index: None,
        }
    }

    #[inline]
    pub fn kind(&self) -> GateKind {
        self.kind
    }

    #[inline]
    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    #[inline]
    pub fn param_index(&self) -> Option<usize> {
        self.param_index
    }

    pub(crate) fn remapped(&self, wires: &[usize], param_offset: usize) -> Self {
        Self {
            kind: self.kind,
            targets: self.targets.iter().map(|&q| wires[q]).collect(),
            param_index: self.param_index.map(|p| p + param_offset),
        }
    }

    /// Gate matrix: 2x2 for rotations, 4x4 for CNOT (control first).
    pub fn matrix<T: Real>(&self, params: &[T]) -> ComplexMatrix<T> {
        match self.kind {
            GateKind::Cnot => ComplexMatrix::from_real(
                4,
                4,
                &[
                    1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0,
                ],
            )
            .expect("4x4"),
            kind => {
                let g = rotation_matrix(kind, params[self.param_index.expect("rotation")]);
                ComplexMatrix::new(2, 2, vec![g[0][0], g[0][1], g[1][0], g[1][1]]).expect("2x2")
            }
        }
    }
}

/// `exp(-i theta sigma / 2)` for the rotation axis of `kind`.
pub fn rotation_matrix<T: Real>(kind: GateKind, theta: T) -> Mat2<T> {
    let half = theta * lit(0.5);
    let (s, c) = half.sin_cos();
    let z = czero::<T>();
    match kind {
        GateKind::Rx => [
            [Complex::new(c, T::zero()), Complex::new(T::zero(), -s)],
            [Complex::new(T::zero(), -s), Complex::new(c, T::zero())],
        ],
        GateKind::Ry => [
            [Complex::new(c, T::zero()), Complex::new(-s, T::zero())],
            [Complex::new(s, T::zero()), Complex::new(c, T::zero())],
        ],
        GateKind::Rz => [
            [Complex::new(c, -s), z],
            [z, Complex::new(c, s)],
        ],
        GateKind::Cnot => panic!("CNOT is not a rotation"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cone;

    fn identity2<T: Real>() -> Mat2<T> {
        [[cone(), czero()], [czero(), cone()]]
    }

    #[test]
    fn gate_invariants() {
        assert!(Gate::new(GateKind::Cnot, vec![0, 0], None).is_err());
        assert!(Gate::new(GateKind::Cnot, vec![0, 1], Some(0)).is_err());
        assert!(Gate::new(GateKind::Rx, vec![0, 1], Some(0)).is_err());
        assert!(Gate::new(GateKind::Ry, vec![0], None).is_err());
        assert!(Gate::new(GateKind::Rz, vec![2], Some(3)).is_ok());
    }

    #[test]
    fn zero_angle_rotations_are_identity() {
        for kind in [GateKind::Rx, GateKind::Ry, GateKind::Rz] {
            assert_eq!(rotation_matrix(kind, 0.0f64), identity2());
        }
    }

    #[test]
    fn rotations_are_unitary() {
        for kind in [GateKind::Rx, GateKind::Ry, GateKind::Rz] {
            let g = Gate::rotation(kind, 0, 0).matrix(&[1.234f64]);
            assert!(g.is_unitary(1e-14));
        }
    }
}
