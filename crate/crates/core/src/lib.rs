//! Adaptive network sampling: choose survey targets so that the sample's
//! distributions of structural measures match those of the whole network.
//!
//! The score of a sample is a weighted sum of per-measure KL divergences
//! between the network's and the sample's histograms of min-max normalized
//! indegree, outdegree, total degree and local clustering. The sampling
//! loop in [`controller`] grows the sample stage by stage until the score
//! reaches a goal, choosing targets with one of the [`strategy`] functions.

pub mod controller;
pub mod distribution;
pub mod error;
pub mod experiment;
pub mod generate;
pub mod graph;
pub mod measures;
pub mod numfmt;
pub mod profile;
pub mod strategy;

pub use controller::{
    prune_sample, respond, run_mscs, run_mscs_on, run_stage, ControllerConfig, DegreeTable, Engine,
    ResponseModel, RunResult, SampleState, StageRecord,
};
pub use distribution::{
    aggregate_nm, build_histogram, compute_bounds, evaluate_sample, kl_divergence, normalize,
    Distribution, Evaluation, KlDirection, NormalizationBounds, DEFAULT_BINS, DEFAULT_EPSILON,
};
pub use error::{Error, Result};
pub use generate::{GeneratorKind, GeneratorSpec};
pub use graph::{load_edge_list, Graph, GraphBuilder, LoadReport, NodeId};
pub use measures::{
    compute_node_measures, local_clustering, summary_stats, Measure, NodeMeasures, SummaryStats,
};
pub use profile::NetworkProfile;
pub use strategy::{
    select_aggregate_ascending, select_k_bins, select_lowest_measure, select_random, KBinsConfig,
    KBinsIndex, KBinsMode, QuotaBasis, Strategy, TargetSet, WithinBin, DEFAULT_KBINS,
};
