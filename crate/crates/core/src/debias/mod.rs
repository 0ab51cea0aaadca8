//! Post-processing debiasers.
//!
//! Each debiaser reads an [`Embedding`] and a target word list and returns a
//! fresh embedding with the same vocabulary, order and dimension. Rows are
//! processed independently against the untouched input, so results do not
//! depend on the rayon pool size.

mod hard;
mod hsr;
mod ran;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::embedding::{Embedding, EmbeddingError};
use crate::geometry::GeometryError;
use crate::metrics::{BreakdownEntry, MetricError};
use crate::numerics::NumericsError;

pub use hard::{equalize_pair, hard_debias, hard_debias_with_direction, HardDebias, HardDebiasConfig};
pub use hsr::{hsr_debias, hsr_residuals, HsrConfig, HsrDebias, HsrSolution};
pub use ran::{ran_debias, RanConfig, RanDebias, RanObjective};

/// A rejection or residual shorter than this is treated as zero.
pub const ZERO_NORM: f64 = 1e-7;

pub const METHOD_NAMES: [&str; 3] = ["hard", "ran", "hsr"];

#[derive(Debug, Error)]
pub enum DebiasError {
    #[error(transparent)]
    Embedding(#[from] EmbeddingError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("none of the target words are in the vocabulary")]
    AllOutOfVocabulary { skipped: Vec<String> },
}

pub type Result<T, E = DebiasError> = std::result::Result<T, E>;

/// What a debiaser did.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DebiasReport {
    pub method: String,
    /// Words whose vectors were rewritten.
    pub processed: Vec<String>,
    /// Requested words missing from the vocabulary.
    pub skipped: Vec<String>,
    /// Words left unchanged because their update collapsed or diverged.
    pub degenerate: Vec<String>,
    pub warnings: Vec<String>,
    pub parameters: BTreeMap<String, Value>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub per_word: Vec<BreakdownEntry>,
}

impl DebiasReport {
    fn new(method: &str) -> Self {
        DebiasReport {
            method: method.to_string(),
            ..Default::default()
        }
    }

    fn warn(&mut self, message: String) {
        log::warn!("{message}");
        self.warnings.push(message);
    }
}

#[derive(Clone, Debug)]
pub struct DebiasOutcome {
    pub embedding: Embedding,
    pub report: DebiasReport,
}

/// Uniform entry point shared by the debiasers.
///
/// `words` lists the vectors to rewrite; `None` means the whole vocabulary
/// minus the words the method keeps fixed.
pub trait Debiaser {
    fn name(&self) -> &'static str;

    fn run(&self, e: &Embedding, words: Option<&[String]>) -> Result<DebiasOutcome>;
}

/// Resolves the target rows: requested words (or the full vocabulary) minus
/// `keep`, deduplicated, in input order. OOV words go to the second list.
fn targets(e: &Embedding, words: Option<&[String]>, keep: &dyn Fn(&str) -> bool) -> (Vec<usize>, Vec<String>) {
    match words {
        Some(words) => {
            let (found, skipped) = crate::metrics::partition_words(e, words);
            (found.into_iter().filter(|&i| !keep(e.word(i))).collect(), skipped)
        }
        None => ((0..e.len()).filter(|&i| !keep(e.word(i))).collect(), Vec::new()),
    }
}
