//! Plugging a new metric into the shared `Metric` interface: the mean
//! signed gender cosine of a word list, which shows which side a list
//! leans toward rather than how far.

use std::collections::BTreeMap;

use fairvec::embedding::{Embedding, Format};
use fairvec::geometry::{cosine_to_direction, direction_pca, BiasDirection};
use fairvec::lexicons;
use fairvec::metrics::{BreakdownEntry, Metric, MetricError, MetricResult};

struct SignedLean<'a> {
    embedding: &'a Embedding,
    direction: &'a BiasDirection,
}

impl Metric for SignedLean<'_> {
    type Input = [String];

    fn name(&self) -> &'static str {
        "signed-lean"
    }

    fn compute(&self, words: &[String]) -> Result<MetricResult, MetricError> {
        let mut result = MetricResult::new(self.name());
        let mut total = 0.0;
        for w in words {
            match self.embedding.lookup(w) {
                Some(i) => {
                    let c = cosine_to_direction(self.embedding, i, self.direction)?;
                    total += c;
                    result.breakdown.push(BreakdownEntry {
                        item: w.clone(),
                        scores: BTreeMap::from([("cosine".to_string(), c)]),
                    });
                }
                None => result.skipped.push(w.clone()),
            }
        }
        if result.breakdown.is_empty() {
            return Err(MetricError::AllOutOfVocabulary {
                skipped: result.skipped,
            });
        }
        let n = result.breakdown.len() as f64;
        Ok(result.with_value("value", total / n))
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let e = Embedding::load(
        concat!(env!("CARGO_MANIFEST_DIR"), "/data/occupations.txt"),
        Format::Text,
    )?
    .normalize()?;
    let g = direction_pca(&e, &lexicons::definitional_pairs())?;
    let metric = SignedLean {
        embedding: &e,
        direction: &g,
    };
    for list in [
        ["nurse", "receptionist", "homemaker"],
        ["engineer", "surgeon", "programmer"],
    ] {
        let words: Vec<String> = list.map(String::from).to_vec();
        println!("{:?}: {:+.4}", list, metric.compute(&words)?.value());
    }
    Ok(())
}
