//! Parameterized circuits over {RX, RY, RZ, CNOT} and their gradients.

mod ansatz;
mod circuit;
mod gate;
mod gradient;

pub use ansatz::{brick_pairs, layered_ansatz, qcnn, su4_block, QcnnLayer, QcnnSpec, SU4_PARAMS};
pub use circuit::ParamCircuit;
pub use gate::{rotation_matrix, Gate, GateKind};
pub use gradient::{central_difference_grad, param_shift_grad};
