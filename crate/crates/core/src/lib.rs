//! Point processes with Papangelou intensities, and numerical verification
//! of the moment identities they satisfy.
//!
//! Every numerical type is generic over a [`Scalar`] (`f32` or `f64`); the
//! aliases at the crate root fix the scalar for everyday use.

pub mod configuration;
pub mod error;
pub mod estimator;
pub mod fixtures;
pub mod linalg;
pub mod models;
pub mod moments;
pub mod partitions;
pub mod report;
pub mod samplers;
pub mod scalar;
pub mod transform;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Configuration64 = configuration::Configuration<f64>;
pub type Configuration32 = configuration::Configuration<f32>;
pub type GroundSpace64 = configuration::GroundSpace<f64>;
pub type GroundSpace32 = configuration::GroundSpace<f32>;
pub type Model64 = models::Model<f64>;
pub type Model32 = models::Model<f32>;
pub type ExactDistribution64 = models::ExactDistribution<f64>;
pub type ExactDistribution32 = models::ExactDistribution<f32>;
pub type SampleBatch64 = samplers::SampleBatch<f64>;
pub type SampleBatch32 = samplers::SampleBatch<f32>;
pub type ProcessFunction64 = moments::ProcessFunction<f64>;
pub type ProcessFunction32 = moments::ProcessFunction<f32>;
pub type StateFunction64 = moments::StateFunction<f64>;
pub type StateFunction32 = moments::StateFunction<f32>;
pub type IdentityReport64 = report::IdentityReport<f64>;
pub type IdentityReport32 = report::IdentityReport<f32>;
pub type Evaluator64<'a> = moments::Evaluator<'a, f64>;
pub type Evaluator32<'a> = moments::Evaluator<'a, f32>;
