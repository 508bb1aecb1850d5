use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How the `n` channel uses are arranged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrelationKind {
    /// `n` parallel uses on `n` system qubits.
    Spatial,
    /// `n` sequential uses on one system qubit, probed by a comb.
    Temporal,
}

/// Quantity compared against `fidelity_threshold` after every turn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopMetric {
    /// Mean output fidelity over computational basis inputs.
    AvgFidelity,
    /// Fidelity of the two Choi states.
    ChoiFidelity,
    /// Always play `max_turns` turns.
    Never,
}

/// Hyperparameters of one adversarial run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameConfig {
    pub n_uses: usize,
    pub correlation_kind: CorrelationKind,
    pub ancilla_count: usize,
    pub init_depth: usize,
    /// Depth of each intermediate comb block (temporal only).
    pub mid_depth: usize,
    pub learning_rate_d: f64,
    pub learning_rate_g: f64,
    pub d_steps_per_turn: usize,
    pub g_steps_per_turn: usize,
    pub max_turns: usize,
    pub fidelity_threshold: f64,
    pub stop_metric: StopMetric,
    pub seed: u64,
}

/// Depth of the preparation circuit on `width` qubits.
pub fn default_init_depth(width: usize) -> usize {
    if width <= 3 {
        3
    } else {
        4
    }
}

impl GameConfig {
    /// `n` parallel uses with `n` ancillas.
    pub fn spatial(n: usize) -> Self {
        Self {
            n_uses: n,
            correlation_kind: CorrelationKind::Spatial,
            ancilla_count: n,
            init_depth: default_init_depth(2 * n),
            mid_depth: 1,
            learning_rate_d: 0.05,
            learning_rate_g: 0.05,
            d_steps_per_turn: 20,
            g_steps_per_turn: 1,
            max_turns: 500,
            fidelity_threshold: 0.999,
            stop_metric: StopMetric::AvgFidelity,
            seed: 0,
        }
    }

    /// `n` sequential uses with a single workspace qubit.
    pub fn temporal(n: usize) -> Self {
        Self {
            correlation_kind: CorrelationKind::Temporal,
            ancilla_count: 1,
            init_depth: default_init_depth(2),
            ..Self::spatial(n)
        }
    }

    /// `n` parallel probes with `n` ancillas, stopped on Choi-state fidelity.
    pub fn metrology(n: usize) -> Self {
        Self {
            fidelity_threshold: 0.99999,
            stop_metric: StopMetric::ChoiFidelity,
            ..Self::spatial(n)
        }
    }

    /// Number of system qubits the channel acts on.
    pub fn system_count(&self) -> usize {
        match self.correlation_kind {
            CorrelationKind::Spatial => self.n_uses,
            CorrelationKind::Temporal => 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.n_uses < 1 {
            return bad("n_uses must be at least 1".into());
        }
        if self.n_uses > 8 {
            return bad(format!("n_uses = {} exceeds the supported maximum of 8", self.n_uses));
        }
        if self.system_count() + self.ancilla_count < 2 {
            return bad("system and ancilla qubits together must number at least 2".into());
        }
        if self.init_depth < 1 || self.mid_depth < 1 {
            return bad("circuit depths must be at least 1".into());
        }
        for (name, lr) in [
            ("learning_rate_d", self.learning_rate_d),
            ("learning_rate_g", self.learning_rate_g),
        ] {
            if !(lr > 0.0 && lr < 1.0) {
                return bad(format!("{name} = {lr} outside (0, 1)"));
            }
        }
        if self.d_steps_per_turn < 1 || self.g_steps_per_turn < 1 {
            return bad("step counts per turn must be at least 1".into());
        }
        if !(self.fidelity_threshold > 0.0 && self.fidelity_threshold <= 1.0) {
            return bad(format!(
                "fidelity_threshold = {} outside (0, 1]",
                self.fidelity_threshold
            ));
        }
        Ok(())
    }
}
