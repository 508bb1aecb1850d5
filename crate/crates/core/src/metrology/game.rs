use serde::{Deserialize, Serialize};

use crate::channels::check_distribution;
use crate::error::{Error, Result};
use crate::game::{play, DiscriminatorLayout, GameConfig, GeneratorMode, Probe, Target, TrainingLog};
use crate::scalar::{lit, Real};

/// Phase-distribution learning problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetrologyConfig {
    /// Bits of phase precision; the phase takes values `b / 2^m`.
    pub m: usize,
    /// Parallel probes.
    pub n: usize,
    pub target_dist: Vec<f64>,
}

impl MetrologyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.m < 1 || self.m > 10 || self.n < 1 || self.n > 8 {
            return Err(Error::InvalidConfig(format!(
                "need 1 <= m <= 10 and 1 <= n <= 8, got m={}, n={}",
                self.m, self.n
            )));
        }
        check_distribution(&self.target_dist, 1 << self.m, "target_dist")
            .map_err(|e| Error::InvalidConfig(e.to_string()))
    }
}

/// Learnt phase distribution and the training record.
#[derive(Debug, Clone)]
pub struct MetrologyOutcome<T: Real> {
    pub learnt: Vec<T>,
    pub log: TrainingLog,
    pub converged_turn: Option<usize>,
}

/// Plays the game against the `n`-probe phase channel with a full softmax
/// generator over the `2^m` phase bins.
pub fn run_metrology_game<T: Real>(
    config: &MetrologyConfig,
    game: &GameConfig,
) -> Result<MetrologyOutcome<T>> {
    config.validate()?;
    if game.n_uses != config.n {
        return Err(Error::InvalidConfig(format!(
            "game configured for {} uses, metrology for {} probes",
            game.n_uses, config.n
        )));
    }
    let layout = DiscriminatorLayout::with_probe(game, Probe::Phase { m: config.m, n: config.n })?;
    let target = Target::Phase {
        n: config.n,
        dist: config.target_dist.iter().map(|&p| lit(p)).collect(),
    };
    let out = play(&layout, &target, &GeneratorMode::FullSoftmax, game)?;
    Ok(MetrologyOutcome {
        learnt: out.generator.distribution(1 << config.m)?,
        log: out.log,
        converged_turn: out.converged_turn,
    })
}
