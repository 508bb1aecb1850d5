use std::time::Instant;

use super::config::{GameConfig, StopMetric};
use super::discriminator::{DiscriminatorLayout, DiscriminatorParams, Probe};
use super::generator::{generator_gradient, GeneratorMode, GeneratorParams};
use super::log::{TrainingLog, TurnRecord};
use super::optimizer::{optimistic_adam_in_place, OptimizerState};
use crate::channels::{
    avg_fidelity, kl_divergence_dist, metrology_choi_fidelity, metrology_map, pauli_avg_fidelity,
    pauli_choi_fidelity, ProbTable,
};
use crate::error::{Error, Result};
use crate::rng::SeededRng;
use crate::scalar::{lit, to_f64, Real};

/// Result of an adversarial run.
#[derive(Debug, Clone)]
pub struct TrainOutcome<T: Real> {
    pub generator: GeneratorParams<T>,
    pub discriminator: DiscriminatorParams<T>,
    pub log: TrainingLog,
    /// Turn after which the stop metric first reached the threshold
    /// (`Some(0)` if it already held before training).
    pub converged_turn: Option<usize>,
}

/// Channel the generator tries to reproduce.
#[derive(Debug, Clone)]
pub(crate) enum Target<T: Real> {
    Pauli(ProbTable<T>),
    Phase { n: usize, dist: Vec<T> },
}

/// Figures of merit of a fake distribution against the target.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Metrics {
    pub kl: f64,
    pub avg_fidelity: f64,
    pub choi_fidelity: f64,
}

impl<T: Real> Target<T> {
    fn probs(&self) -> &[T] {
        match self {
            Target::Pauli(t) => t.probs(),
            Target::Phase { dist, .. } => dist,
        }
    }

    pub(crate) fn metrics(&self, q: &[T]) -> Result<Metrics> {
        let kl = kl_divergence_dist(self.probs(), q)?;
        let (avg, choi) = match self {
            Target::Pauli(p) => {
                let qt = ProbTable::normalized(p.n(), q.to_vec())?;
                (pauli_avg_fidelity(p, &qt)?, pauli_choi_fidelity(p, &qt)?)
            }
            Target::Phase { n, dist } => {
                let m = dist.len().trailing_zeros() as usize;
                let real = metrology_map(m, dist, *n)?;
                let fake = metrology_map(m, &renormalize(q), *n)?;
                let avg = avg_fidelity(|r| real.apply(r), |r| fake.apply(r), *n)?;
                (avg, metrology_choi_fidelity(dist, q, *n)?)
            }
        };
        Ok(Metrics {
            kl: to_f64(kl),
            avg_fidelity: to_f64(avg),
            choi_fidelity: to_f64(choi),
        })
    }
}

fn renormalize<T: Real>(q: &[T]) -> Vec<T> {
    let z: T = q.iter().copied().sum();
    q.iter().map(|&x| x / z).collect()
}

fn reached(metric: StopMetric, m: &Metrics, threshold: f64) -> bool {
    match metric {
        StopMetric::AvgFidelity => m.avg_fidelity >= threshold,
        StopMetric::ChoiFidelity => m.choi_fidelity >= threshold,
        StopMetric::Never => false,
    }
}

/// Adversarial reconstruction of the Pauli channel `real_table`.
///
/// Each turn the discriminator takes `d_steps_per_turn` ascent steps on the
/// score, then the generator takes `g_steps_per_turn` descent steps.
pub fn train<T: Real>(
    real_table: &ProbTable<T>,
    mode: &GeneratorMode<T>,
    config: &GameConfig,
) -> Result<TrainOutcome<T>> {
    if real_table.n() != config.n_uses {
        return Err(Error::DimensionMismatch(format!(
            "target table for {} uses, config for {}",
            real_table.n(),
            config.n_uses
        )));
    }
    let layout = DiscriminatorLayout::new(config)?;
    play(&layout, &Target::Pauli(real_table.clone()), mode, config)
}

pub(crate) fn play<T: Real>(
    layout: &DiscriminatorLayout,
    target: &Target<T>,
    mode: &GeneratorMode<T>,
    config: &GameConfig,
) -> Result<TrainOutcome<T>> {
    config.validate()?;
    let comb = layout.comb::<T>()?;
    let len = comb.nbranches();
    let p = target.probs().to_vec();
    if p.len() != len {
        return Err(Error::DimensionMismatch(format!(
            "target has {} entries, discriminator probes {len} branches",
            p.len()
        )));
    }
    if matches!(layout.probe(), Probe::Phase { .. }) && !matches!(mode, GeneratorMode::FullSoftmax) {
        return Err(Error::InvalidConfig(
            "phase distributions are learnt with the full softmax generator only".into(),
        ));
    }

    let mut rng = SeededRng::new(config.seed);
    let mut theta = DiscriminatorParams::<T>::random(layout, &mut rng).flatten();
    let mut gen = GeneratorParams::initial(mode, len)?;
    let mut gen_params = gen.params();
    let mut d_opt = OptimizerState::new(theta.len());
    let mut g_opt = OptimizerState::new(gen_params.len());
    let (lr_d, lr_g) = (lit::<T>(config.learning_rate_d), lit::<T>(config.learning_rate_g));
    let mut log = TrainingLog::new();

    let finish = |theta: &[T], gen: GeneratorParams<T>, log, converged_turn| {
        Ok(TrainOutcome {
            generator: gen,
            discriminator: DiscriminatorParams::from_flat(layout, theta)?,
            log,
            converged_turn,
        })
    };

    let initial = target.metrics(&gen.distribution(len)?)?;
    if reached(config.stop_metric, &initial, config.fidelity_threshold) {
        return finish(&theta, gen, log, Some(0));
    }

    for turn in 1..=config.max_turns {
        let started = Instant::now();
        let q = gen.distribution(len)?;
        let weights: Vec<T> = p.iter().zip(&q).map(|(&a, &b)| a - b).collect();
        for _ in 0..config.d_steps_per_turn {
            let eval = comb.evaluate(&theta, &weights, true);
            if !eval.score.is_finite() || eval.gradient.iter().any(|g| !g.is_finite()) {
                return Err(Error::Diverged {
                    turn,
                    log: Box::new(log),
                });
            }
            optimistic_adam_in_place(&mut theta, &eval.gradient, &mut d_opt, lr_d, true)?;
        }
        let mut scores = comb.branch_scores(&theta);
        for step in 0..config.g_steps_per_turn {
            if step > 0 {
                scores = comb.branch_scores(&theta);
            }
            let grad = generator_gradient(&gen, &scores)?;
            optimistic_adam_in_place(&mut gen_params, &grad, &mut g_opt, lr_g, false)?;
            gen.set_params(&gen_params)?;
        }
        let q = gen.distribution(len)?;
        let s_q: T = q.iter().zip(&scores).map(|(&a, &b)| a * b).sum();
        let s_p: T = p.iter().zip(&scores).map(|(&a, &b)| a * b).sum();
        let score = s_p - s_q;
        if !score.is_finite() || q.iter().any(|x| !x.is_finite()) {
            return Err(Error::Diverged {
                turn,
                log: Box::new(log),
            });
        }
        let m = target.metrics(&q)?;
        log.push(
            TurnRecord {
                turn,
                score: to_f64(score),
                gen_objective: to_f64(s_q),
                kl: m.kl,
                avg_fidelity: m.avg_fidelity,
                choi_fidelity: m.choi_fidelity,
            },
            started.elapsed().as_secs_f64(),
        );
        if reached(config.stop_metric, &m, config.fidelity_threshold) {
            return finish(&theta, gen, log, Some(turn));
        }
    }
    finish(&theta, gen, log, None)
}
