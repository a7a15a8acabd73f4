//! Directed random network model with reciprocity, nodal homophily and
//! sender/receiver nodal effects.
//!
//! Dyads `(x[j1][j2], x[j2][j1])` are independent given the nodal features,
//! so the likelihood factorises into four-category terms. The crate fits the
//! model by maximum likelihood and by adaptive-LASSO penalised likelihood
//! tuned with a network BIC, samples networks from it, and runs seeded
//! replication studies.
//!
//! The numerical core is generic over [`Scalar`] (`f32`, `f64`); the aliases
//! below fix it to `f64`, which is what the I/O layer and the simulation
//! harness use.

pub mod error;
pub mod estimation;
pub mod io;
pub mod linalg;
pub mod model;
pub mod oracle;
pub mod scalar;
pub mod simulation;

pub use error::{Error, ErrorKind, Result};
pub use scalar::Scalar;

pub type ParamVector = model::ParamVector<f64>;
pub type FeatureTable = model::FeatureTable<f64>;
pub type DyadDesign = model::DyadDesign<f64>;
pub type SufficientStats = model::SufficientStats<f64>;
pub type FitOptions = estimation::FitOptions<f64>;
pub type MleResult = estimation::MleResult<f64>;
pub type RmleResult = estimation::RmleResult<f64>;
pub type PathResult = estimation::PathResult<f64>;
pub type InferenceResult = estimation::InferenceResult<f64>;

pub type ParamVectorF32 = model::ParamVector<f32>;
pub type DyadDesignF32 = model::DyadDesign<f32>;
pub type FitOptionsF32 = estimation::FitOptions<f32>;

pub use model::{Adjacency, Category, DyadCategoryVector};
