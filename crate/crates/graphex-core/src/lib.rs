//! Simulation, estimation and evaluation toolkit for graphex random-graph
//! processes.
//!
//! The crate samples finite graphs from graphex models (five canonical
//! unipartite families plus mirrored bipartite variants), computes
//! tail-index estimators from the degree distribution, predicts unseen
//! edge counts at future sizes, and verifies everything against exact
//! quadrature oracles for the model expectations.
//!
//! Monte Carlo experiment replicates run data-parallel on rayon by
//! default; build with `--no-default-features` for a dependency-light
//! sequential binary with bit-identical results.

pub mod error;
pub mod estimators;
pub mod experiments;
pub mod graph;
pub mod io;
pub mod models;
pub mod prediction;
pub mod quad;
pub mod rng;
pub mod sampler;
pub mod theory;

pub use error::{Error, Result};
pub use estimators::{
    count_n_p, estimate_sigma_bipartite, estimate_sigma_cr, estimate_sigma_nsvr, EstimateReport,
};
pub use experiments::{
    run_real_eval, run_risk_table, run_species_table, run_trace_eval, EstimatorKind,
    ExperimentConfig, ExperimentKind, ResultRow, ResultTable,
};
pub use graph::{BipartiteGraph, DegreeSummary, UndirectedGraph, VertexId};
pub use models::{BipartiteKind, BipartiteModelSpec, ModelKind, ModelSpec};
pub use prediction::{normalized_rmse, predict_edges};
pub use sampler::{p_sample, sample_bipartite, sample_unipartite};
pub use theory::{
    bias_b, expected_dk, expected_m, expected_n_p, gamma_diagnostic, BiasDiagnostics,
};
