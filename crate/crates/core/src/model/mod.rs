//! The directed dyad model: features, design, probabilities and likelihood.

pub mod design;
pub mod features;
pub mod likelihood;
pub mod params;

pub use design::{build_dyad_design, DyadDesign, DyadRow};
pub use features::{
    compute_magnitude, compute_similarity, FeatureGroup, FeatureTable, GroupSpec, MagnitudeKind,
    SimilarityKind,
};
pub use likelihood::{
    category_design_vector, category_log_weight, dyad_probabilities, log_likelihood,
    observed_information, score, sufficient_statistics, SufficientStats,
};
pub use params::{
    coefficient_label, dyads_from_adjacency, pair_index, pairs, param_len, Adjacency, Block,
    Category, DyadCategoryVector, ParamVector,
};
