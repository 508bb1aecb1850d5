//! Identifiability of phase distributions and the phase-learning game.

mod game;
mod gram;
mod phase;

pub use game::{run_metrology_game, MetrologyConfig, MetrologyOutcome};
pub use gram::{brute_force_gram, gram_eigenvalues, is_identifiable};
pub use phase::phase_estimation_error;
