//! Pauli and phase noise channels, correlation laws and comparison metrics.

mod correlation;
mod metrics;
mod pauli;
mod random_unitary;

pub use correlation::{
    correlated_table, correlated_table_mu_derivative, factorized_table, CorrelationModel,
};
pub use metrics::{
    avg_fidelity, kl_divergence, kl_divergence_dist, metrology_choi_fidelity, pauli_avg_fidelity,
    pauli_choi_fidelity,
};
pub(crate) use pauli::check_distribution;
pub use pauli::{apply_pauli_spatial, pauli_matrix, pauli_string, table_uses, PauliIndex, ProbTable};
pub use random_unitary::{choi_state, metrology_map, phase_unitary, RandomUnitaryMap};
