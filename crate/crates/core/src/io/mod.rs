//! File formats and the end-to-end pipelines behind the command line:
//! CSV for features, edges and tables, JSON for configs, reports and
//! coefficient vectors.

pub mod config;
pub mod report;
pub mod tables;

pub use config::{
    read_json, to_json_string, write_json, FitConfig, GroupConfig, LambdaPolicy, StudyConfig, ThetaFile,
};
pub use report::{
    run_fit, run_study, save_with, write_coefficients_csv, write_table1_csv, write_table2_csv,
    Coefficient, Diagnostics, FitMethod, FitReport, ModelSummary, PathRow, SoftwareInfo, StudyReport,
};
pub use tables::{
    allowlist_indices, induced_subgraph, load_edge_list, load_features, load_node_list,
    read_edge_list, read_features, read_node_list, save_edge_list, write_edge_list,
};
