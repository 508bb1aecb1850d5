//! Circuit templates: the 15-parameter SU(4) block, staggered layers of
//! blocks, and the pooling QCNN readout.

use serde::{Deserialize, Serialize};

use super::circuit::ParamCircuit;
use super::gate::Gate;
use crate::error::{Error, Result};

/// Rotation parameters per two-qubit block.
pub const SU4_PARAMS: usize = 15;

/// Universal two-qubit block built from three CNOTs and 15 rotations.
///
/// Layout: `(Rz,Ry,Rz)` on each qubit, `CNOT(q2→q1)`, `Rz(q1) Ry(q2)`,
/// `CNOT(q1→q2)`, `Ry(q2)`, `CNOT(q2→q1)`, `(Rz,Ry,Rz)` on each qubit.
/// Parameters occupy `param_offset .. param_offset + 15`.
pub fn su4_block(q1: usize, q2: usize, param_offset: usize) -> Result<Vec<Gate>> {
    if q1 == q2 {
        return Err(Error::InvalidTarget(format!("SU(4) block on a single qubit {q1}")));
    }
    let p = param_offset;
    Ok(vec![
        Gate::rz(q1, p),
        Gate::ry(q1, p + 1),
        Gate::rz(q1, p + 2),
        Gate::rz(q2, p + 3),
        Gate::ry(q2, p + 4),
        Gate::rz(q2, p + 5),
        Gate::cnot(q2, q1),
        Gate::rz(q1, p + 6),
        Gate::ry(q2, p + 7),
        Gate::cnot(q1, q2),
        Gate::ry(q2, p + 8),
        Gate::cnot(q2, q1),
        Gate::rz(q1, p + 9),
        Gate::ry(q1, p + 10),
        Gate::rz(q1, p + 11),
        Gate::rz(q2, p + 12),
        Gate::ry(q2, p + 13),
        Gate::rz(q2, p + 14),
    ])
}

/// Qubit pairs of each layer of a staggered brick pattern.
pub fn brick_pairs(nqubits: usize, depth: usize) -> Vec<Vec<(usize, usize)>> {
    (0..depth)
        .map(|layer| {
            let start = layer % 2;
            (start..nqubits.saturating_sub(1))
                .step_by(2)
                .map(|q| (q, q + 1))
                .collect()
        })
        .collect()
}

/// `depth` staggered layers of SU(4) blocks: odd layers on `(0,1),(2,3),..`,
/// even layers on `(1,2),(3,4),..`.
pub fn layered_ansatz(nqubits: usize, depth: usize) -> Result<ParamCircuit> {
    if nqubits < 2 {
        return Err(Error::InvalidArgument(format!(
            "layered ansatz needs at least 2 qubits, got {nqubits}"
        )));
    }
    if depth < 1 {
        return Err(Error::InvalidArgument("layered ansatz needs depth >= 1".into()));
    }
    let pairs: Vec<(usize, usize)> = brick_pairs(nqubits, depth).into_iter().flatten().collect();
    let mut circuit = ParamCircuit::new(nqubits, SU4_PARAMS * pairs.len());
    for (b, (q1, q2)) in pairs.into_iter().enumerate() {
        circuit.extend(su4_block(q1, q2, b * SU4_PARAMS)?)?;
    }
    Ok(circuit)
}

/// One pooling layer of a QCNN.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QcnnLayer {
    /// Blocks applied in this layer.
    pub pairs: Vec<(usize, usize)>,
    /// Qubits forgotten after this layer; they receive no further gates.
    pub discarded: Vec<usize>,
}

/// Structure of a QCNN readout.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QcnnSpec {
    pub nqubits: usize,
    pub layers: Vec<QcnnLayer>,
    /// The only qubit still active after the last layer.
    pub measure_qubit: usize,
}

impl QcnnSpec {
    /// Active qubits entering each layer, followed by the final survivor set.
    pub fn active_sets(&self) -> Vec<Vec<usize>> {
        let mut active: Vec<usize> = (0..self.nqubits).collect();
        let mut sets = vec![active.clone()];
        for layer in &self.layers {
            active.retain(|q| !layer.discarded.contains(q));
            sets.push(active.clone());
        }
        sets
    }
}

/// QCNN on `nqubits` qubits.
///
/// Each layer pairs adjacent active qubits from the lowest index, applies an
/// SU(4) block per pair and forgets the higher qubit of each pair; an odd
/// qubit out carries over. Layers repeat until only qubit 0 remains.
pub fn qcnn(nqubits: usize) -> Result<(QcnnSpec, ParamCircuit)> {
    if nqubits < 2 {
        return Err(Error::InvalidArgument(format!(
            "QCNN needs at least 2 qubits, got {nqubits}"
        )));
    }
    let mut active: Vec<usize> = (0..nqubits).collect();
    let mut layers = Vec::new();
    let mut gates = Vec::new();
    let mut nblocks = 0;
    while active.len() > 1 {
        let pairs: Vec<(usize, usize)> = active.chunks_exact(2).map(|c| (c[0], c[1])).collect();
        for &(a, b) in &pairs {
            gates.extend(su4_block(a, b, nblocks * SU4_PARAMS)?);
            nblocks += 1;
        }
        let discarded: Vec<usize> = pairs.iter().map(|&(_, b)| b).collect();
        active.retain(|q| !discarded.contains(q));
        layers.push(QcnnLayer { pairs, discarded });
    }
    let spec = QcnnSpec {
        nqubits,
        layers,
        measure_qubit: active[0],
    };
    let circuit = ParamCircuit::from_gates(nqubits, nblocks * SU4_PARAMS, gates)?;
    Ok((spec, circuit))
}
