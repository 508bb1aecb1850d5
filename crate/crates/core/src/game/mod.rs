//! The adversarial game between a channel generator and a discriminator.

mod config;
mod discriminator;
mod engine;
mod generator;
mod log;
mod optimizer;
mod train;

pub use config::{default_init_depth, CorrelationKind, GameConfig, StopMetric};
pub use discriminator::{branch_scores, score, DiscriminatorLayout, DiscriminatorParams};
pub(crate) use discriminator::Probe;
pub use generator::{generator_gradient, generator_table, GeneratorMode, GeneratorParams};
pub use log::{TrainingLog, TurnRecord};
pub use optimizer::{optimistic_adam_step, OptimizerState};
pub(crate) use train::{play, Target};
pub use train::{train, TrainOutcome};
