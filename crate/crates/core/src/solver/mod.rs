//! Discrepancy of the hypergraph on `[1, n]`: two-norm lower-bound checks,
//! exact values for small `n`, and heuristic upper bounds.

mod exact;
mod search;
mod twonorm;

pub use exact::{exact_discrepancy, EXACT_CAP};
pub use search::{
    local_search_upper, max_progression_sum, random_coloring_upper, SearchConfig,
};
pub use twonorm::{two_norm, TwoNormReport, TWO_NORM_DENOMINATOR};

use serde::{Deserialize, Serialize};

use crate::hypergraph::canonical::Window;
use crate::hypergraph::Coloring;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Exact,
    Local,
    Random,
}

/// How the maximum over edges was evaluated for the witness coloring.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Evaluation {
    /// Against the stored list of distinct canonical edges.
    Enumerated { edge_count: u64 },
    /// By streaming every tight window once.
    Streamed { windows_scanned: u64, window: Window },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscReport {
    pub n: u64,
    pub method: Method,
    /// Exact for `Method::Exact`; otherwise the max over edges of the witness, an upper bound.
    pub disc_value: u64,
    pub witness_coloring: Coloring,
    /// Points of an edge attaining `disc_value` under the witness.
    pub witness_edge: Vec<u64>,
    pub evaluation: Evaluation,
    pub trials: Option<u64>,
    pub restarts: Option<u64>,
    pub seed: Option<u64>,
}
