//! Adversarial learning of correlated quantum noise.
//!
//! A generator proposes a Pauli (or phase) channel, a discriminator built
//! from parametrized circuits tries to tell it apart from the real one, and
//! both are trained in turns until the channels agree. Everything is generic
//! over the scalar type; the `*64` aliases fix it to `f64`.

pub mod channels;
pub mod error;
pub mod game;
pub mod metrology;
pub mod pqc;
pub mod qsim;
pub mod rng;
pub mod scalar;

pub use error::{Error, Result};
pub use rng::SeededRng;
pub use scalar::Real;

pub type ComplexMatrix64 = qsim::ComplexMatrix<f64>;
pub type PureState64 = qsim::PureState<f64>;
pub type DensityMatrix64 = qsim::DensityMatrix<f64>;
pub type ProbTable64 = channels::ProbTable<f64>;
pub type CorrelationModel64 = channels::CorrelationModel<f64>;
pub type RandomUnitaryMap64 = channels::RandomUnitaryMap<f64>;
pub type GeneratorMode64 = game::GeneratorMode<f64>;
pub type GeneratorParams64 = game::GeneratorParams<f64>;
pub type DiscriminatorParams64 = game::DiscriminatorParams<f64>;
pub type OptimizerState64 = game::OptimizerState<f64>;
pub type TrainOutcome64 = game::TrainOutcome<f64>;
pub type MetrologyOutcome64 = metrology::MetrologyOutcome<f64>;
