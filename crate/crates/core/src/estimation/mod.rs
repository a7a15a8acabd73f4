//! Maximum likelihood, adaptive-LASSO fits along a regularisation path,
//! NBIC selection, and Wald inference.

pub mod inference;
pub mod mle;
pub mod options;
pub mod path;
pub mod rmle;

pub use inference::{critical_value, standard_errors, InferenceResult};
pub use mle::{fit_mle, MleResult};
pub use options::{FitOptions, ModelKind, Solver};
pub use path::{fit_path, PathResult};
pub use rmle::{adaptive_weights, fit_rmle, lambda_grid, nbic, soft_threshold, RmleResult};
