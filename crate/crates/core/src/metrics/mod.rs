//! Gender-bias metrics.
//!
//! Each metric is available both as a free function and as a type
//! implementing [`Metric`], whose `compute` takes the metric's natural
//! input: a word, a pair of words, a word list, a WEAT specification or a
//! SemBias dataset. All metrics are pure functions of their inputs; results
//! carry the parameters they were computed with.
//!
//! Metrics that compare against the gender direction assume unit-length
//! rows (see [`Embedding::normalize`](crate::embedding::Embedding::normalize)).
//! Cosine-based quantities are scale-free; the indirect bias `β` is not.

mod direct;
mod proximity;
mod sembias;
mod weat;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::embedding::EmbeddingError;
use crate::geometry::GeometryError;

pub use direct::{direct_bias, DirectBias};
pub use proximity::{
    gipe, indirect_bias, indirect_bias_value, neighbours_analysis, pmn, proximity_bias, proximity_neighbours,
    BetaError, Gipe, IndirectBias, NeighboursAnalysis, Pmn, ProximityBias, ProximityDetail,
};
pub use sembias::{sembias, LabeledPair, SemBias, SemBiasInstance, SemBiasLabel, DEFAULT_ANCHORS};
pub use weat::{
    binomial, exhaustive_p_value, monte_carlo_p_value, weat, weat_with, PValueMethod, Weat, WeatSpec, EXHAUSTIVE_LIMIT,
};

pub const DEFAULT_K: usize = 100;
pub const DEFAULT_THETA: f64 = 0.05;

/// Names accepted by [`crate::cli`] and recorded in results.
pub const METRIC_NAMES: [&str; 8] = [
    "direct-bias",
    "indirect-bias",
    "weat",
    "pmn",
    "proximity-bias",
    "gipe",
    "sembias",
    "neighbours-analysis",
];

#[derive(Debug, Error)]
pub enum MetricError {
    #[error(transparent)]
    Embedding(#[from] EmbeddingError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("none of the requested words are in the vocabulary")]
    AllOutOfVocabulary { skipped: Vec<String> },
    #[error("indirect bias is undefined for {w:?} and {v:?}: their dot product is zero")]
    UndefinedIndirectBias { w: String, v: String },
    #[error("indirect bias is degenerate for {w:?} and {v:?}: a vector lies along the gender direction")]
    DegenerateIndirectBias { w: String, v: String },
    #[error("WEAT effect size is undefined: association scores have zero spread (S = {statistic})")]
    EffectSizeUndefined { statistic: f64 },
    #[error("{word:?} has no usable neighbours")]
    EmptyNeighborSet { word: String },
    #[error("no usable instances ({skipped} skipped)")]
    EmptyDataset { skipped: usize },
    #[error("invalid WEAT specification: {0}")]
    InvalidSpec(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T, E = MetricError> = std::result::Result<T, E>;

/// Per-item scores, e.g. one entry per word or per neighbour.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BreakdownEntry {
    pub item: String,
    pub scores: BTreeMap<String, f64>,
}

/// Outcome of one metric run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricResult {
    pub metric: String,
    pub values: BTreeMap<String, f64>,
    pub parameters: BTreeMap<String, Value>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub breakdown: Vec<BreakdownEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub skipped: Vec<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metadata: BTreeMap<String, Value>,
}

impl MetricResult {
    pub fn new(metric: &str) -> Self {
        MetricResult {
            metric: metric.to_string(),
            values: BTreeMap::new(),
            parameters: BTreeMap::new(),
            breakdown: Vec::new(),
            skipped: Vec::new(),
            metadata: BTreeMap::new(),
        }
    }

    pub fn with_value(mut self, label: &str, value: f64) -> Self {
        self.values.insert(label.to_string(), value);
        self
    }

    pub fn with_parameter(mut self, name: &str, value: impl Into<Value>) -> Self {
        self.parameters.insert(name.to_string(), value.into());
        self
    }

    pub fn with_metadata(mut self, name: &str, value: impl Into<Value>) -> Self {
        self.metadata.insert(name.to_string(), value.into());
        self
    }

    pub fn get(&self, label: &str) -> Option<f64> {
        self.values.get(label).copied()
    }

    /// The headline scalar (`"value"`) of single-valued metrics.
    pub fn value(&self) -> f64 {
        self.get("value")
            .unwrap_or_else(|| panic!("metric {} has no scalar \"value\"", self.metric))
    }

    /// Looks up one score in the breakdown.
    pub fn score(&self, item: &str, label: &str) -> Option<f64> {
        self.breakdown
            .iter()
            .find(|b| b.item == item)
            .and_then(|b| b.scores.get(label).copied())
    }
}

/// Uniform entry point shared by every metric.
pub trait Metric {
    type Input: ?Sized;

    fn name(&self) -> &'static str;

    fn compute(&self, input: &Self::Input) -> Result<MetricResult>;
}

/// Distinct words from `words` split into vocabulary indices and OOV words,
/// both in input order.
pub(crate) fn partition_words<S: AsRef<str>>(
    e: &crate::embedding::Embedding,
    words: &[S],
) -> (Vec<usize>, Vec<String>) {
    let mut seen = std::collections::HashSet::new();
    let mut found = Vec::new();
    let mut skipped = Vec::new();
    for w in words {
        let w = w.as_ref();
        if !seen.insert(w.to_string()) {
            continue;
        }
        match e.lookup(w) {
            Some(i) => found.push(i),
            None => skipped.push(w.to_string()),
        }
    }
    (found, skipped)
}
