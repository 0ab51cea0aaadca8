//! Neighbourhood metrics: indirect bias, percent male neighbours, proximity
//! bias and its aggregate GIPE, and the annotated neighbour table.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::embedding::Embedding;
use crate::geometry::{self, cosine_to_direction, knn, reject, BiasDirection, Neighbor, Query};
use crate::numerics;

use super::{partition_words, BreakdownEntry, Metric, MetricError, MetricResult, Result};

/// `|w·v|` at or below this makes `β` undefined.
const ZERO_DOT: f64 = 1e-12;
/// A rejection shorter than this fraction of the original vector is zero.
const ZERO_REJECTION: f64 = 1e-7;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BetaError {
    /// `w·v = 0`.
    Undefined,
    /// `w` or `v` has no component orthogonal to `g`.
    Degenerate,
}

/// `β(w, v) = (w·v − cos(w⊥, v⊥)) / (w·v)` with `x⊥ = x − (x·g)g`.
pub fn indirect_bias_value(w: &[f64], v: &[f64], g: &BiasDirection) -> Result<f64, BetaError> {
    let wv = numerics::dot(w, v);
    if wv.abs() <= ZERO_DOT {
        return Err(BetaError::Undefined);
    }
    let wp = reject(w, g);
    let vp = reject(v, g);
    if numerics::norm(&wp) <= ZERO_REJECTION * numerics::norm(w)
        || numerics::norm(&vp) <= ZERO_REJECTION * numerics::norm(v)
    {
        return Err(BetaError::Degenerate);
    }
    let cos = geometry::cosine(&wp, &vp).map_err(|_| BetaError::Degenerate)?;
    Ok((wv - cos) / wv)
}

fn beta_between(e: &Embedding, g: &BiasDirection, w: usize, v: usize) -> Result<f64, BetaError> {
    indirect_bias_value(&geometry::row_f64(e.row(w)), &geometry::row_f64(e.row(v)), g)
}

fn check_dim(e: &Embedding, g: &BiasDirection) -> Result<()> {
    if g.dim() != e.dim() {
        return Err(geometry::GeometryError::DimensionMismatch {
            expected: e.dim(),
            found: g.dim(),
        }
        .into());
    }
    Ok(())
}

/// Indirect bias between two words.
pub fn indirect_bias(e: &Embedding, g: &BiasDirection, w: &str, v: &str) -> Result<MetricResult> {
    check_dim(e, g)?;
    let wi = e
        .lookup(w)
        .ok_or_else(|| crate::embedding::EmbeddingError::OutOfVocabulary(w.into()))?;
    let vi = e
        .lookup(v)
        .ok_or_else(|| crate::embedding::EmbeddingError::OutOfVocabulary(v.into()))?;
    let beta = beta_between(e, g, wi, vi).map_err(|err| match err {
        BetaError::Undefined => MetricError::UndefinedIndirectBias {
            w: w.into(),
            v: v.into(),
        },
        BetaError::Degenerate => MetricError::DegenerateIndirectBias {
            w: w.into(),
            v: v.into(),
        },
    })?;
    Ok(MetricResult::new("indirect-bias")
        .with_value("value", beta)
        .with_parameter("w", w)
        .with_parameter("v", v))
}

/// A word's neighbours with their indirect bias (`None` when degenerate).
#[derive(Clone, Debug)]
pub struct ProximityDetail {
    pub word: String,
    pub neighbours: Vec<(Neighbor, Option<f64>)>,
    pub theta: f64,
}

impl ProximityDetail {
    pub fn usable(&self) -> usize {
        self.neighbours.iter().filter(|(_, b)| b.is_some()).count()
    }

    pub fn degenerate(&self) -> Vec<String> {
        self.neighbours
            .iter()
            .filter(|(_, b)| b.is_none())
            .map(|(n, _)| n.word.clone())
            .collect()
    }

    /// Neighbours with `|β| ≥ θ`.
    pub fn flagged(&self) -> impl Iterator<Item = &Neighbor> {
        self.neighbours
            .iter()
            .filter(|(_, b)| b.is_some_and(|b| b.abs() >= self.theta))
            .map(|(n, _)| n)
    }

    /// `η(w)`, the flagged share of usable neighbours.
    pub fn eta(&self) -> Result<f64> {
        let usable = self.usable();
        if usable == 0 {
            return Err(MetricError::EmptyNeighborSet {
                word: self.word.clone(),
            });
        }
        Ok(self.flagged().count() as f64 / usable as f64)
    }
}

/// The `k` nearest neighbours of `word` annotated with `β(word, ·)`.
pub fn proximity_neighbours(
    e: &Embedding,
    g: &BiasDirection,
    word: &str,
    k: usize,
    theta: f64,
) -> Result<ProximityDetail> {
    check_dim(e, g)?;
    if !(theta >= 0.0) {
        return Err(MetricError::InvalidParameter(format!(
            "theta must be non-negative, got {theta}"
        )));
    }
    let wi = e
        .lookup(word)
        .ok_or_else(|| crate::embedding::EmbeddingError::OutOfVocabulary(word.into()))?;
    let list = knn(e, Query::Word(word), k, &[] as &[&str])?;
    let neighbours = list
        .entries
        .into_iter()
        .map(|n| {
            let beta = beta_between(e, g, wi, n.index).ok();
            (n, beta)
        })
        .collect();
    Ok(ProximityDetail {
        word: word.to_string(),
        neighbours,
        theta,
    })
}

/// Percent male neighbours: share of the `k` nearest neighbours whose
/// cosine with `g` is negative.
pub fn pmn(e: &Embedding, g: &BiasDirection, word: &str, k: usize) -> Result<MetricResult> {
    check_dim(e, g)?;
    let list = knn(e, Query::Word(word), k, &[] as &[&str])?;
    if list.is_empty() {
        return Err(MetricError::EmptyNeighborSet { word: word.into() });
    }
    let mut male = 0usize;
    for n in &list.entries {
        if cosine_to_direction(e, n.index, g)? < 0.0 {
            male += 1;
        }
    }
    Ok(MetricResult::new("pmn")
        .with_value("value", male as f64 / list.len() as f64)
        .with_parameter("word", word)
        .with_parameter("k", k)
        .with_metadata("neighbours_used", list.len()))
}

/// Proximity bias `η(w)`: the share of `w`'s usable neighbours with
/// `|β(w, v)| ≥ θ`. Neighbours with degenerate `β` are left out of both
/// counts and listed in the metadata.
pub fn proximity_bias(e: &Embedding, g: &BiasDirection, word: &str, k: usize, theta: f64) -> Result<MetricResult> {
    let detail = proximity_neighbours(e, g, word, k, theta)?;
    let eta = detail.eta()?;
    Ok(MetricResult::new("proximity-bias")
        .with_value("value", eta)
        .with_parameter("word", word)
        .with_parameter("k", k)
        .with_parameter("theta", theta)
        .with_metadata("neighbours", detail.neighbours.len())
        .with_metadata("usable_neighbours", detail.usable())
        .with_metadata("degenerate_neighbours", detail.degenerate()))
}

/// GIPE: unweighted mean of `η(w)` over the in-vocabulary words.
///
/// Words are evaluated in parallel on the current rayon pool; the mean is
/// accumulated in input order, so the result does not depend on the number
/// of threads.
pub fn gipe<S: AsRef<str> + Sync>(
    e: &Embedding,
    g: &BiasDirection,
    words: &[S],
    k: usize,
    theta: f64,
) -> Result<MetricResult> {
    check_dim(e, g)?;
    let (found, mut skipped) = partition_words(e, words);
    let etas: Vec<Result<f64>> = found
        .par_iter()
        .map(|&i| proximity_neighbours(e, g, e.word(i), k, theta).and_then(|d| d.eta()))
        .collect();

    let mut breakdown = Vec::with_capacity(found.len());
    let mut no_neighbours = Vec::new();
    let mut total = 0.0;
    for (&i, eta) in found.iter().zip(etas) {
        let word = e.word(i).to_string();
        match eta {
            Ok(eta) => {
                total += eta;
                breakdown.push(BreakdownEntry {
                    item: word,
                    scores: BTreeMap::from([("eta".to_string(), eta)]),
                });
            }
            Err(MetricError::EmptyNeighborSet { .. }) => no_neighbours.push(word),
            Err(other) => return Err(other),
        }
    }
    if breakdown.is_empty() {
        skipped.extend(no_neighbours);
        return Err(MetricError::AllOutOfVocabulary { skipped });
    }
    let mut result = MetricResult::new("gipe")
        .with_value("value", total / breakdown.len() as f64)
        .with_parameter("k", k)
        .with_parameter("theta", theta)
        .with_metadata("aggregation", "unweighted-mean")
        .with_metadata("words_used", breakdown.len());
    if !no_neighbours.is_empty() {
        result = result.with_metadata("no_usable_neighbours", no_neighbours);
    }
    result.breakdown = breakdown;
    result.skipped = skipped;
    Ok(result)
}

/// Nearest-neighbour table of `word`: cosine to the word, cosine to `g`
/// and `|β|` per neighbour. `|β|` is absent for degenerate pairs.
pub fn neighbours_analysis(e: &Embedding, g: &BiasDirection, word: &str, k: usize) -> Result<MetricResult> {
    let detail = proximity_neighbours(e, g, word, k, 0.0)?;
    let mut breakdown = Vec::with_capacity(detail.neighbours.len());
    for (n, beta) in &detail.neighbours {
        let mut scores = BTreeMap::new();
        scores.insert("cosine".to_string(), n.cosine);
        scores.insert("g_cosine".to_string(), cosine_to_direction(e, n.index, g)?);
        if let Some(b) = beta {
            scores.insert("indirect_bias".to_string(), b.abs());
        }
        breakdown.push(BreakdownEntry {
            item: n.word.clone(),
            scores,
        });
    }
    let mut result = MetricResult::new("neighbours-analysis")
        .with_value("neighbours", breakdown.len() as f64)
        .with_parameter("word", word)
        .with_parameter("k", k);
    let degenerate = detail.degenerate();
    if !degenerate.is_empty() {
        result = result.with_metadata("degenerate_neighbours", degenerate);
    }
    result.breakdown = breakdown;
    Ok(result)
}

pub struct IndirectBias<'a> {
    pub embedding: &'a Embedding,
    pub direction: &'a BiasDirection,
}

impl Metric for IndirectBias<'_> {
    type Input = (String, String);

    fn name(&self) -> &'static str {
        "indirect-bias"
    }

    fn compute(&self, (w, v): &(String, String)) -> Result<MetricResult> {
        indirect_bias(self.embedding, self.direction, w, v)
    }
}

pub struct Pmn<'a> {
    pub embedding: &'a Embedding,
    pub direction: &'a BiasDirection,
    pub k: usize,
}

impl Metric for Pmn<'_> {
    type Input = str;

    fn name(&self) -> &'static str {
        "pmn"
    }

    fn compute(&self, word: &str) -> Result<MetricResult> {
        pmn(self.embedding, self.direction, word, self.k)
    }
}

pub struct ProximityBias<'a> {
    pub embedding: &'a Embedding,
    pub direction: &'a BiasDirection,
    pub k: usize,
    pub theta: f64,
}

impl Metric for ProximityBias<'_> {
    type Input = str;

    fn name(&self) -> &'static str {
        "proximity-bias"
    }

    fn compute(&self, word: &str) -> Result<MetricResult> {
        proximity_bias(self.embedding, self.direction, word, self.k, self.theta)
    }
}

pub struct Gipe<'a> {
    pub embedding: &'a Embedding,
    pub direction: &'a BiasDirection,
    pub k: usize,
    pub theta: f64,
}

impl Metric for Gipe<'_> {
    type Input = [String];

    fn name(&self) -> &'static str {
        "gipe"
    }

    fn compute(&self, words: &[String]) -> Result<MetricResult> {
        gipe(self.embedding, self.direction, words, self.k, self.theta)
    }
}

pub struct NeighboursAnalysis<'a> {
    pub embedding: &'a Embedding,
    pub direction: &'a BiasDirection,
    pub k: usize,
}

impl Metric for NeighboursAnalysis<'_> {
    type Input = str;

    fn name(&self) -> &'static str {
        "neighbours-analysis"
    }

    fn compute(&self, word: &str) -> Result<MetricResult> {
        neighbours_analysis(self.embedding, self.direction, word, self.k)
    }
}
