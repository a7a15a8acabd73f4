//! Data generation and Monte Carlo replication studies.

pub mod generator;
pub mod metrics;
pub mod study;

pub use generator::{
    draw_category, generate_features, sample_network, FeatureLaw, GeneratorSpec, GroupLaw,
};
pub use metrics::{
    estimation_metrics, selection_metrics, CoordinateMetrics, MetricsReport, SelectionMetrics,
    COVERAGE_Z,
};
pub use study::{
    derive_seed, run_one, run_replications, FitKind, Replication, ReplicationFailure,
    ReplicationSet,
};
