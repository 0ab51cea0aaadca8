//! SemBias: which of four word pairs lines up best with the gender
//! direction `v(a) − v(b)`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::embedding::{Embedding, EmbeddingError};
use crate::geometry::{self, row_f64, GeometryError};
use crate::numerics;

use super::{BreakdownEntry, Metric, MetricError, MetricResult, Result};

pub const DEFAULT_ANCHORS: (&str, &str) = ("he", "she");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SemBiasLabel {
    /// Gender-definitional, e.g. king/queen.
    Definition,
    /// Gender-stereotypical, e.g. doctor/nurse.
    Stereotype,
    /// Unrelated to gender.
    None,
}

impl SemBiasLabel {
    pub const ALL: [SemBiasLabel; 3] = [Self::Definition, Self::Stereotype, Self::None];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Definition => "definition",
            Self::Stereotype => "stereotype",
            Self::None => "none",
        }
    }

    fn expected_count(self) -> usize {
        match self {
            Self::Definition | Self::Stereotype => 1,
            Self::None => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabeledPair {
    pub a: String,
    pub b: String,
    pub label: SemBiasLabel,
}

/// Four labeled pairs: one definition, one stereotype, two none.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SemBiasInstance {
    pub pairs: Vec<LabeledPair>,
}

impl SemBiasInstance {
    pub fn new(pairs: Vec<LabeledPair>) -> Result<Self> {
        let instance = SemBiasInstance { pairs };
        instance.validate()?;
        Ok(instance)
    }

    pub fn validate(&self) -> Result<()> {
        if self.pairs.len() != 4 {
            return Err(MetricError::InvalidSpec(format!(
                "a SemBias instance has 4 pairs, found {}",
                self.pairs.len()
            )));
        }
        for label in SemBiasLabel::ALL {
            let found = self.pairs.iter().filter(|p| p.label == label).count();
            if found != label.expected_count() {
                return Err(MetricError::InvalidSpec(format!(
                    "expected {} {} pair(s), found {found}",
                    label.expected_count(),
                    label.as_str()
                )));
            }
        }
        Ok(())
    }

    pub fn words(&self) -> impl Iterator<Item = &String> {
        self.pairs.iter().flat_map(|p| [&p.a, &p.b])
    }
}

fn difference(e: &Embedding, a: usize, b: usize) -> Vec<f64> {
    row_f64(e.row(a))
        .into_iter()
        .zip(row_f64(e.row(b)))
        .map(|(x, y)| x - y)
        .collect()
}

/// Share of instances whose best-aligned pair carries each label.
///
/// Each pair `(x, y)` is scored by `cos(v(x) − v(y), v(a) − v(b))` and the
/// highest score wins, the earlier pair on ties. Instances with an
/// out-of-vocabulary word are skipped; pairs with identical vectors cannot
/// be selected.
pub fn sembias(e: &Embedding, dataset: &[SemBiasInstance], anchors: (&str, &str)) -> Result<MetricResult> {
    let index = |w: &str| {
        e.lookup(w)
            .ok_or_else(|| EmbeddingError::OutOfVocabulary(w.to_string()))
    };
    let ia = index(anchors.0)?;
    let ib = index(anchors.1)?;
    let direction = difference(e, ia, ib);
    if numerics::norm(&direction) == 0.0 {
        return Err(GeometryError::ZeroDifference {
            a: anchors.0.into(),
            b: anchors.1.into(),
        }
        .into());
    }

    let mut counts: BTreeMap<SemBiasLabel, usize> = BTreeMap::new();
    let mut breakdown = Vec::new();
    let mut skipped_instances = 0usize;
    let mut oov: Vec<String> = Vec::new();
    let mut ties = 0usize;
    for (n, instance) in dataset.iter().enumerate() {
        instance.validate()?;
        let missing: Vec<&String> = instance.words().filter(|w| !e.contains(w)).collect();
        if !missing.is_empty() {
            skipped_instances += 1;
            for w in missing {
                if !oov.contains(w) {
                    oov.push(w.clone());
                }
            }
            continue;
        }
        let scores: Vec<Option<f64>> = instance
            .pairs
            .iter()
            .map(|p| {
                let d = difference(e, e.lookup(&p.a).unwrap(), e.lookup(&p.b).unwrap());
                geometry::cosine(&d, &direction).ok()
            })
            .collect();
        let mut best: Option<(usize, f64)> = None;
        for (i, s) in scores.iter().enumerate() {
            if let Some(s) = *s {
                if best.is_none_or(|(_, b)| s > b) {
                    best = Some((i, s));
                }
            }
        }
        let Some((winner, top)) = best else {
            skipped_instances += 1;
            continue;
        };
        if scores.iter().flatten().filter(|&&s| s == top).count() > 1 {
            ties += 1;
        }
        let label = instance.pairs[winner].label;
        *counts.entry(label).or_default() += 1;
        let mut entry = BTreeMap::new();
        for (p, s) in instance.pairs.iter().zip(&scores) {
            if let Some(s) = s {
                entry.insert(format!("{}:{}/{}", p.label.as_str(), p.a, p.b), *s);
            }
        }
        breakdown.push(BreakdownEntry {
            item: format!("instance-{}:{}", n + 1, label.as_str()),
            scores: entry,
        });
    }

    let used = breakdown.len();
    if used == 0 {
        return Err(MetricError::EmptyDataset {
            skipped: skipped_instances,
        });
    }
    let mut result = MetricResult::new("sembias")
        .with_parameter("anchors", vec![anchors.0, anchors.1])
        .with_metadata("instances_used", used)
        .with_metadata("instances_skipped", skipped_instances)
        .with_metadata("ties", ties)
        .with_metadata("scale", "fraction");
    for label in SemBiasLabel::ALL {
        let count = counts.get(&label).copied().unwrap_or(0);
        result = result.with_value(label.as_str(), count as f64 / used as f64);
    }
    result.breakdown = breakdown;
    result.skipped = oov;
    Ok(result)
}

pub struct SemBias<'a> {
    pub embedding: &'a Embedding,
    pub anchors: (&'a str, &'a str),
}

impl Metric for SemBias<'_> {
    type Input = [SemBiasInstance];

    fn name(&self) -> &'static str {
        "sembias"
    }

    fn compute(&self, dataset: &[SemBiasInstance]) -> Result<MetricResult> {
        sembias(self.embedding, dataset, self.anchors)
    }
}
