//! Dense state-vector and density-matrix simulation.
//!
//! Conventions: qubit 0 is the most significant bit of a basis index, and
//! `kron(a, b)` places `a` on the leading qubits.

pub mod density;
pub(crate) mod kernels;
pub mod matrix;
pub mod random;
pub mod state;

pub use density::{fidelity, partial_trace, DensityMatrix};
pub(crate) use density::matrix_fidelity;
pub use kernels::Mat2;
pub use matrix::{eigh, eigvalsh, kron, psd_sqrt, ComplexMatrix, HermitianEigen};
pub use state::{apply_gate, projector_expectation, PureState};
