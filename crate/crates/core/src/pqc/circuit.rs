use num_complex::Complex;

use super::gate::{rotation_matrix, Gate, GateKind};
use crate::error::{Error, Result};
use crate::qsim::kernels::{apply_1q, apply_cnot};
use crate::qsim::{ComplexMatrix, PureState};
use crate::scalar::{cone, czero, Real};

/// Ordered gate list over a real parameter vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamCircuit {
    nqubits: usize,
    gates: Vec<Gate>,
    nparams: usize,
}

impl ParamCircuit {
    pub fn new(nqubits: usize, nparams: usize) -> Self {
        Self {
            nqubits,
            gates: Vec::new(),
            nparams,
        }
    }

    pub fn from_gates(nqubits: usize, nparams: usize, gates: Vec<Gate>) -> Result<Self> {
        let mut c = Self::new(nqubits, nparams);
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        if let Some(&q) = gate.targets().iter().find(|&&q| q >= self.nqubits) {
            return Err(Error::InvalidTarget(format!(
                "qubit {q} out of range for {} qubits",
                self.nqubits
            )));
        }
        if let Some(p) = gate.param_index().filter(|&p| p >= self.nparams) {
            return Err(Error::InvalidArgument(format!(
                "parameter index {p} out of range for {} parameters",
                self.nparams
            )));
        }
        self.gates.push(gate);
        Ok(())
    }

    pub fn extend(&mut self, gates: impl IntoIterator<Item = Gate>) -> Result<()> {
        gates.into_iter().try_for_each(|g| self.push(g))
    }

    #[inline]
    pub fn nqubits(&self) -> usize {
        self.nqubits
    }

    #[inline]
    pub fn nparams(&self) -> usize {
        self.nparams
    }

    #[inline]
    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    /// Rewrites the circuit onto `wires` of a `total_qubits` register with
    /// parameters shifted by `param_offset` inside a `total_params` vector.
    pub fn embed(
        &self,
        wires: &[usize],
        total_qubits: usize,
        param_offset: usize,
        total_params: usize,
    ) -> Result<Self> {
        if wires.len() != self.nqubits {
            return Err(Error::DimensionMismatch(format!(
                "{} wires for a {}-qubit circuit",
                wires.len(),
                self.nqubits
            )));
        }
        if param_offset + self.nparams > total_params {
            return Err(Error::DimensionMismatch("parameter block overflows".into()));
        }
        Self::from_gates(
            total_qubits,
            total_params,
            self.gates.iter().map(|g| g.remapped(wires, param_offset)).collect(),
        )
    }

    fn check_params<T: Real>(&self, params: &[T]) -> Result<()> {
        if params.len() != self.nparams {
            return Err(Error::DimensionMismatch(format!(
                "circuit has {} parameters, got {}",
                self.nparams,
                params.len()
            )));
        }
        Ok(())
    }

    /// Applies the gates in order to `input`.
    pub fn run<T: Real>(&self, params: &[T], input: &PureState<T>) -> Result<PureState<T>> {
        self.check_params(params)?;
        if input.nqubits() != self.nqubits {
            return Err(Error::DimensionMismatch(format!(
                "{}-qubit circuit on a {}-qubit state",
                self.nqubits,
                input.nqubits()
            )));
        }
        let mut out = input.clone();
        self.apply_in_place(params, out.amplitudes_mut());
        Ok(out)
    }

    pub(crate) fn apply_in_place<T: Real>(&self, params: &[T], amps: &mut [Complex<T>]) {
        for g in &self.gates {
            apply_gate_in_place(g, params, amps, self.nqubits);
        }
    }

    /// Full `2^n x 2^n` unitary of the circuit.
    pub fn compile<T: Real>(&self, params: &[T]) -> Result<ComplexMatrix<T>> {
        self.check_params(params)?;
        let dim = 1usize << self.nqubits;
        let mut u = ComplexMatrix::zeros(dim, dim);
        let mut col = vec![czero::<T>(); dim];
        for j in 0..dim {
            col.iter_mut().for_each(|x| *x = czero());
            col[j] = cone();
            self.apply_in_place(params, &mut col);
            for (i, &x) in col.iter().enumerate() {
                u[(i, j)] = x;
            }
        }
        Ok(u)
    }
}

pub(crate) fn apply_gate_in_place<T: Real>(
    g: &Gate,
    params: &[T],
    amps: &mut [Complex<T>],
    nqubits: usize,
) {
    let t = g.targets();
    match g.kind() {
        GateKind::Cnot => apply_cnot(amps, nqubits, t[0], t[1]),
        kind => {
            let m = rotation_matrix(kind, params[g.param_index().expect("rotation")]);
            apply_1q(amps, nqubits, t[0], &m);
        }
    }
}
