use std::collections::BTreeMap;

use crate::embedding::Embedding;
use crate::geometry::{cosine_to_direction, BiasDirection, GeometryError};

use super::{partition_words, BreakdownEntry, Metric, MetricError, MetricResult, Result};

/// Direct bias `DB = (1/|N|)·Σ |cos(w, g)|^c` over the in-vocabulary words.
///
/// OOV words (and zero rows, which have no cosine) are listed in `skipped`.
pub fn direct_bias<S: AsRef<str>>(
    e: &Embedding,
    g: &BiasDirection,
    words: &[S],
    strictness: f64,
) -> Result<MetricResult> {
    if !(strictness >= 0.0) || !strictness.is_finite() {
        return Err(MetricError::InvalidParameter(format!(
            "strictness c must be a finite non-negative number, got {strictness}"
        )));
    }
    let (found, mut skipped) = partition_words(e, words);
    let mut breakdown = Vec::with_capacity(found.len());
    let mut total = 0.0;
    let mut used = 0usize;
    for i in found {
        let cos = match cosine_to_direction(e, i, g) {
            Ok(c) => c,
            Err(GeometryError::ZeroVector) => {
                skipped.push(e.word(i).to_string());
                continue;
            }
            Err(other) => return Err(other.into()),
        };
        let score = if strictness == 1.0 {
            cos.abs()
        } else {
            cos.abs().powf(strictness)
        };
        total += score;
        used += 1;
        breakdown.push(BreakdownEntry {
            item: e.word(i).to_string(),
            scores: BTreeMap::from([("cosine".to_string(), cos), ("score".to_string(), score)]),
        });
    }
    if used == 0 {
        return Err(MetricError::AllOutOfVocabulary { skipped });
    }
    let mut result = MetricResult::new("direct-bias")
        .with_value("value", total / used as f64)
        .with_parameter("c", strictness)
        .with_metadata("words_used", used);
    result.breakdown = breakdown;
    result.skipped = skipped;
    Ok(result)
}

pub struct DirectBias<'a> {
    pub embedding: &'a Embedding,
    pub direction: &'a BiasDirection,
    pub strictness: f64,
}

impl Metric for DirectBias<'_> {
    type Input = [String];

    fn name(&self) -> &'static str {
        "direct-bias"
    }

    fn compute(&self, words: &[String]) -> Result<MetricResult> {
        direct_bias(self.embedding, self.direction, words, self.strictness)
    }
}

#[cfg(test)]
mod tests {
    use approx::assert_abs_diff_eq;

    use super::*;

    fn setup() -> (Embedding, BiasDirection) {
        let s = (0.75f32).sqrt();
        let e = Embedding::from_rows([
            ("ortho", vec![0.0, 1.0]),
            ("along", vec![1.0, 0.0]),
            ("half", vec![0.5, s]),
        ])
        .unwrap();
        (e, BiasDirection::from_vector(vec![1.0, 0.0]).unwrap())
    }

    #[test]
    fn orthogonal_collinear_and_power() {
        let (e, g) = setup();
        assert_eq!(direct_bias(&e, &g, &["ortho"], 1.0).unwrap().value(), 0.0);
        assert_eq!(direct_bias(&e, &g, &["along"], 1.0).unwrap().value(), 1.0);
        assert_abs_diff_eq!(
            direct_bias(&e, &g, &["half"], 2.0).unwrap().value(),
            0.25,
            epsilon = 1e-7
        );
    }

    #[test]
    fn skips_oov_and_fails_when_nothing_left() {
        let (e, g) = setup();
        let r = direct_bias(&e, &g, &["along", "zzz"], 1.0).unwrap();
        assert_eq!(r.skipped, vec!["zzz"]);
        assert_eq!(r.value(), 1.0);
        assert!(matches!(
            direct_bias(&e, &g, &["zzz"], 1.0),
            Err(MetricError::AllOutOfVocabulary { .. })
        ));
        assert!(matches!(
            direct_bias(&e, &g, &["along"], -1.0),
            Err(MetricError::InvalidParameter(_))
        ));
    }

    #[test]
    fn monotone_in_strictness() {
        let (e, g) = setup();
        let words = ["ortho", "along", "half"];
        let mut last = f64::INFINITY;
        for c in [0.0, 0.5, 1.0, 2.0, 4.0] {
            let v = direct_bias(&e, &g, &words, c).unwrap().value();
            assert!((0.0..=1.0).contains(&v));
            assert!(v <= last + 1e-15);
            last = v;
        }
    }
}
