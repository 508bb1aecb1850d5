use serde::{Deserialize, Serialize};

/// Figures of merit recorded at the end of one training turn.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TurnRecord {
    pub turn: usize,
    /// Score `S = S_p - S_q` after the turn.
    pub score: f64,
    /// Generator objective `S_q`, the probability of the fake channel being judged real.
    pub gen_objective: f64,
    pub kl: f64,
    /// Mean output fidelity over computational basis inputs.
    pub avg_fidelity: f64,
    /// Fidelity between the Choi states of the real and generated channels.
    pub choi_fidelity: f64,
}

/// Per-turn history of a training run.
///
/// Wall-clock timings are kept apart from the records so that two runs with
/// the same seed compare equal on [`TrainingLog::records`].
#[derive(Debug, Clone, Default)]
pub struct TrainingLog {
    records: Vec<TurnRecord>,
    wall_times: Vec<f64>,
}

impl TrainingLog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, record: TurnRecord, wall_seconds: f64) {
        debug_assert!(self.records.last().is_none_or(|r| r.turn < record.turn));
        self.records.push(record);
        self.wall_times.push(wall_seconds);
    }

    pub fn records(&self) -> &[TurnRecord] {
        &self.records
    }

    /// Seconds since the start of training at the end of each turn.
    pub fn wall_times(&self) -> &[f64] {
        &self.wall_times
    }

    pub fn last(&self) -> Option<&TurnRecord> {
        self.records.last()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}
