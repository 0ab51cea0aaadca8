//! Word Embedding Association Test.

use std::collections::{BTreeMap, HashMap, HashSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::embedding::{Embedding, EmbeddingError};
use crate::geometry::row_f64;
use crate::numerics;

use super::{BreakdownEntry, Metric, MetricError, MetricResult, Result};

/// Bipartitions are enumerated exhaustively up to this many.
pub const EXHAUSTIVE_LIMIT: u64 = 20_000;

/// Target sets `X`, `Y` and attribute sets `A`, `B`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeatSpec {
    #[serde(default)]
    pub name: String,
    #[serde(rename = "X")]
    pub x: Vec<String>,
    #[serde(rename = "Y")]
    pub y: Vec<String>,
    #[serde(rename = "A")]
    pub a: Vec<String>,
    #[serde(rename = "B")]
    pub b: Vec<String>,
}

impl WeatSpec {
    /// Checks set sizes only; see [`WeatSpec::check_disjoint`].
    pub fn new(
        name: impl Into<String>,
        x: Vec<String>,
        y: Vec<String>,
        a: Vec<String>,
        b: Vec<String>,
    ) -> Result<Self> {
        let spec = WeatSpec {
            name: name.into(),
            x,
            y,
            a,
            b,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.x.is_empty() {
            return Err(MetricError::InvalidSpec("target set X is empty".into()));
        }
        if self.x.len() != self.y.len() {
            return Err(MetricError::InvalidSpec(format!(
                "target sets differ in size: |X| = {}, |Y| = {}",
                self.x.len(),
                self.y.len()
            )));
        }
        if self.a.is_empty() || self.b.is_empty() {
            return Err(MetricError::InvalidSpec(format!(
                "attribute sets must be nonempty: |A| = {}, |B| = {}",
                self.a.len(),
                self.b.len()
            )));
        }
        Ok(())
    }

    /// `X ∩ Y = ∅` and `A ∩ B = ∅`.
    pub fn check_disjoint(&self) -> Result<()> {
        for (first, second, left, right) in [("X", "Y", &self.x, &self.y), ("A", "B", &self.a, &self.b)] {
            let left: HashSet<&String> = left.iter().collect();
            if let Some(w) = right.iter().find(|w| left.contains(w)) {
                return Err(MetricError::InvalidSpec(format!(
                    "{w:?} appears in both {first} and {second}"
                )));
            }
        }
        Ok(())
    }

    pub fn words(&self) -> impl Iterator<Item = &String> {
        self.x.iter().chain(&self.y).chain(&self.a).chain(&self.b)
    }

    pub fn words_mut(&mut self) -> impl Iterator<Item = &mut String> {
        self.x
            .iter_mut()
            .chain(self.y.iter_mut())
            .chain(self.a.iter_mut())
            .chain(self.b.iter_mut())
    }

    /// The same test with `X` and `Y` exchanged.
    pub fn swap_targets(&self) -> Self {
        WeatSpec {
            x: self.y.clone(),
            y: self.x.clone(),
            ..self.clone()
        }
    }

    /// The same test with `A` and `B` exchanged.
    pub fn swap_attributes(&self) -> Self {
        WeatSpec {
            a: self.b.clone(),
            b: self.a.clone(),
            ..self.clone()
        }
    }
}

/// How the permutation p-value is obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PValueMethod {
    /// Exhaustive when there are at most [`EXHAUSTIVE_LIMIT`] bipartitions.
    Auto,
    Exhaustive,
    MonteCarlo,
}

/// `C(n, k)`, saturating at `u64::MAX`.
pub fn binomial(n: u64, k: u64) -> u64 {
    let k = k.min(n - k.min(n));
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * u128::from(n - i) / u128::from(i + 1);
        if acc > u128::from(u64::MAX) {
            return u64::MAX;
        }
    }
    acc as u64
}

struct Unit(Vec<f64>);

impl Unit {
    fn of(e: &Embedding, word: &str) -> Result<Self> {
        let row = row_f64(e.row_of(word)?);
        let n = numerics::norm(&row);
        if n == 0.0 {
            return Err(EmbeddingError::ZeroVector(word.to_string()).into());
        }
        Ok(Unit(row.into_iter().map(|x| x / n).collect()))
    }
}

/// `s(w) = mean_A cos(w, a) − mean_B cos(w, b)`.
fn association(w: &Unit, a: &[&Unit], b: &[&Unit]) -> f64 {
    let mean = |set: &[&Unit]| {
        let mut total = 0.0;
        for u in set {
            total += numerics::dot(&w.0, &u.0);
        }
        total / set.len() as f64
    };
    mean(a) - mean(b)
}

/// Sum independent of order and of a global sign flip: positive and
/// negative parts are each accumulated in ascending magnitude.
fn canonical_sum(values: impl Iterator<Item = f64>) -> f64 {
    let (mut pos, mut neg): (Vec<f64>, Vec<f64>) = (Vec::new(), Vec::new());
    for v in values {
        if v >= 0.0 {
            pos.push(v);
        } else {
            neg.push(-v);
        }
    }
    pos.sort_by(f64::total_cmp);
    neg.sort_by(f64::total_cmp);
    pos.iter().sum::<f64>() - neg.iter().sum::<f64>()
}

/// Population standard deviation.
fn population_sd(values: &[f64]) -> f64 {
    let m = values.len() as f64;
    let mean = canonical_sum(values.iter().copied()) / m;
    let mut squares: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
    squares.sort_by(f64::total_cmp);
    (squares.iter().sum::<f64>() / m).sqrt()
}

/// `Σ_{chosen} s − Σ_{rest} s`, summed in pool order.
fn split_statistic(pool: &[f64], chosen: impl Fn(usize) -> bool) -> f64 {
    let mut left = 0.0;
    let mut right = 0.0;
    for (i, s) in pool.iter().enumerate() {
        if chosen(i) {
            left += s;
        } else {
            right += s;
        }
    }
    left - right
}

/// Share of equal-size bipartitions of `pool` whose statistic exceeds
/// `observed`, over all `C(2n, n)` of them.
pub fn exhaustive_p_value(pool: &[f64], observed: f64) -> f64 {
    let m = pool.len();
    assert!(
        m.is_multiple_of(2) && m <= 24,
        "pool must have an even size of at most 24"
    );
    let n = (m / 2) as u32;
    let margin = tie_margin(pool);
    let mut above = 0u64;
    let mut total = 0u64;
    for mask in 0u64..(1u64 << m) {
        if mask.count_ones() != n {
            continue;
        }
        total += 1;
        if split_statistic(pool, |i| mask >> i & 1 == 1) > observed + margin {
            above += 1;
        }
    }
    above as f64 / total as f64
}

/// Share of `draws` random equal-size bipartitions whose statistic
/// exceeds `observed`.
pub fn monte_carlo_p_value(pool: &[f64], observed: f64, draws: usize, seed: u64) -> f64 {
    let n = pool.len() / 2;
    let margin = tie_margin(pool);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..pool.len()).collect();
    let mut chosen = vec![false; pool.len()];
    let mut above = 0usize;
    for _ in 0..draws {
        order.shuffle(&mut rng);
        chosen.iter_mut().for_each(|c| *c = false);
        for &i in &order[..n] {
            chosen[i] = true;
        }
        if split_statistic(pool, |i| chosen[i]) > observed + margin {
            above += 1;
        }
    }
    above as f64 / draws as f64
}

/// Rounding slack so that splits equal to the observed one do not count
/// as exceeding it.
fn tie_margin(pool: &[f64]) -> f64 {
    1e-12 * pool.iter().map(|s| s.abs()).sum::<f64>().max(f64::MIN_POSITIVE)
}

/// Runs WEAT with the p-value method chosen automatically.
pub fn weat(e: &Embedding, spec: &WeatSpec, permutations: usize, seed: u64) -> Result<MetricResult> {
    weat_with(e, spec, permutations, seed, PValueMethod::Auto)
}

/// Runs WEAT. Every word must be in the vocabulary.
///
/// Values: `statistic` (S), `effect_size` (d, using the population standard
/// deviation of `s` over `X ∪ Y`) and `p_value` (one-sided, strict).
pub fn weat_with(
    e: &Embedding,
    spec: &WeatSpec,
    permutations: usize,
    seed: u64,
    method: PValueMethod,
) -> Result<MetricResult> {
    spec.validate()?;
    let mut units: HashMap<&str, Unit> = HashMap::new();
    for w in spec.words() {
        if !units.contains_key(w.as_str()) {
            units.insert(w, Unit::of(e, w)?);
        }
    }
    let a: Vec<&Unit> = spec.a.iter().map(|w| &units[w.as_str()]).collect();
    let b: Vec<&Unit> = spec.b.iter().map(|w| &units[w.as_str()]).collect();
    let s_x: Vec<f64> = spec.x.iter().map(|w| association(&units[w.as_str()], &a, &b)).collect();
    let s_y: Vec<f64> = spec.y.iter().map(|w| association(&units[w.as_str()], &a, &b)).collect();

    let n = s_x.len();
    let sum_x: f64 = s_x.iter().sum();
    let sum_y: f64 = s_y.iter().sum();
    let statistic = sum_x - sum_y;

    let pool: Vec<f64> = s_x.iter().chain(&s_y).copied().collect();
    let sigma = population_sd(&pool);
    if sigma == 0.0 {
        return Err(MetricError::EffectSizeUndefined { statistic });
    }
    let effect_size = (sum_x / n as f64 - sum_y / n as f64) / sigma;

    let splits = binomial(2 * n as u64, n as u64);
    let exhaustive = match method {
        PValueMethod::Auto => splits <= EXHAUSTIVE_LIMIT,
        PValueMethod::Exhaustive => {
            if 2 * n > 24 {
                return Err(MetricError::InvalidParameter(format!(
                    "exhaustive enumeration needs |X ∪ Y| ≤ 24, got {}",
                    2 * n
                )));
            }
            true
        }
        PValueMethod::MonteCarlo => false,
    };
    if !exhaustive && permutations == 0 {
        return Err(MetricError::InvalidParameter(
            "Monte-Carlo p-value needs at least one permutation".into(),
        ));
    }
    let p_value = if exhaustive {
        exhaustive_p_value(&pool, statistic)
    } else {
        monte_carlo_p_value(&pool, statistic, permutations, seed)
    };

    let mut breakdown = Vec::with_capacity(2 * n);
    for (set, words, scores) in [("X", &spec.x, &s_x), ("Y", &spec.y, &s_y)] {
        for (w, s) in words.iter().zip(scores) {
            breakdown.push(BreakdownEntry {
                item: format!("{set}:{w}"),
                scores: BTreeMap::from([("association".to_string(), *s)]),
            });
        }
    }
    let mut result = MetricResult::new("weat")
        .with_value("statistic", statistic)
        .with_value("effect_size", effect_size)
        .with_value("p_value", p_value)
        .with_parameter("permutations", permutations)
        .with_parameter("seed", seed)
        .with_parameter("p_method", if exhaustive { "exhaustive" } else { "monte-carlo" })
        .with_metadata("name", spec.name.as_str())
        .with_metadata("sigma", "population")
        .with_metadata("bipartitions", if exhaustive { splits as usize } else { permutations });
    result.breakdown = breakdown;
    Ok(result)
}

pub struct Weat<'a> {
    pub embedding: &'a Embedding,
    pub permutations: usize,
    pub seed: u64,
}

impl Metric for Weat<'_> {
    type Input = WeatSpec;

    fn name(&self) -> &'static str {
        "weat"
    }

    fn compute(&self, spec: &WeatSpec) -> Result<MetricResult> {
        weat(self.embedding, spec, self.permutations, self.seed)
    }
}

#[cfg(test)]
mod tests {
    use approx::assert_abs_diff_eq;

    use super::*;

    fn words(list: &[&str]) -> Vec<String> {
        list.iter().map(|w| w.to_string()).collect()
    }

    fn toy() -> Embedding {
        Embedding::from_rows([("x", vec![1.0f32, 0.0]), ("y", vec![0.0, 1.0])]).unwrap()
    }

    #[test]
    fn two_dimensional_hand_case() {
        let spec = WeatSpec::new("toy", words(&["x"]), words(&["y"]), words(&["x"]), words(&["y"])).unwrap();
        let r = weat(&toy(), &spec, 1000, 0).unwrap();
        assert_eq!(r.get("statistic"), Some(2.0));
        assert_eq!(r.get("effect_size"), Some(2.0));
        assert_eq!(r.get("p_value"), Some(0.0));
        assert_eq!(r.parameters["p_method"], "exhaustive");
    }

    #[test]
    fn cancellation_and_degenerate() {
        let e = toy();
        let same = WeatSpec::new("same", words(&["x"]), words(&["x"]), words(&["x"]), words(&["y"])).unwrap();
        // σ of {1, 1} is zero, so the statistic travels in the error
        match weat(&e, &same, 10, 0) {
            Err(MetricError::EffectSizeUndefined { statistic }) => assert_eq!(statistic, 0.0),
            other => panic!("unexpected {other:?}"),
        }
        let ab = WeatSpec::new("ab", words(&["x"]), words(&["y"]), words(&["x"]), words(&["x"])).unwrap();
        assert!(matches!(
            weat(&e, &ab, 10, 0),
            Err(MetricError::EffectSizeUndefined { statistic }) if statistic == 0.0
        ));
    }

    #[test]
    fn oov_is_an_error() {
        let spec = WeatSpec::new("oov", words(&["x"]), words(&["zzz"]), words(&["x"]), words(&["y"])).unwrap();
        assert!(matches!(
            weat(&toy(), &spec, 10, 0),
            Err(MetricError::Embedding(EmbeddingError::OutOfVocabulary(_)))
        ));
    }

    #[test]
    fn spec_checks() {
        assert!(WeatSpec::new("", vec![], vec![], words(&["a"]), words(&["b"])).is_err());
        assert!(WeatSpec::new("", words(&["a"]), words(&["b", "c"]), words(&["a"]), words(&["b"])).is_err());
        assert!(WeatSpec::new("", words(&["a"]), words(&["b"]), vec![], words(&["b"])).is_err());
        let overlap = WeatSpec::new("", words(&["a"]), words(&["a"]), words(&["c"]), words(&["d"])).unwrap();
        assert!(overlap.check_disjoint().is_err());
        let missing_b = r#"{"name": "t", "X": ["a"], "Y": ["b"], "A": ["c"]}"#;
        let err = serde_json::from_str::<WeatSpec>(missing_b).unwrap_err().to_string();
        assert!(err.contains("`B`"), "{err}");
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(4, 2), 6);
        assert_eq!(binomial(16, 8), 12_870);
        assert_eq!(binomial(18, 9), 48_620);
        assert_eq!(binomial(5, 0), 1);
    }

    /// Brute-force p over explicit index subsets, independent of the
    /// bitmask loop.
    fn p_oracle(pool: &[f64], observed: f64) -> f64 {
        fn subsets(start: usize, m: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if left == 0 {
                out.push(cur.clone());
                return;
            }
            for i in start..m {
                cur.push(i);
                subsets(i + 1, m, left - 1, cur, out);
                cur.pop();
            }
        }
        let mut all = Vec::new();
        subsets(0, pool.len(), pool.len() / 2, &mut Vec::new(), &mut all);
        let above = all
            .iter()
            .filter(|sub| {
                let inside: f64 = sub.iter().map(|&i| pool[i]).sum();
                let total: f64 = pool.iter().sum();
                inside - (total - inside) > observed + 1e-9
            })
            .count();
        above as f64 / all.len() as f64
    }

    #[test]
    fn exhaustive_matches_oracle_and_monte_carlo() {
        let pool = [0.31, -0.12, 0.05, 0.44, -0.27, 0.18, 0.02, -0.4];
        let observed = (0.31 - 0.12 + 0.05 + 0.44) - (-0.27 + 0.18 + 0.02 - 0.4);
        let exact = exhaustive_p_value(&pool, observed);
        assert_abs_diff_eq!(exact, p_oracle(&pool, observed), epsilon = 1e-15);
        let mc = monte_carlo_p_value(&pool, observed, 10_000, 7);
        assert!((mc - exact).abs() < 0.02, "{mc} vs {exact}");
    }

    #[test]
    fn population_sd_known_values() {
        assert_eq!(population_sd(&[1.0, -1.0]), 1.0);
        assert_abs_diff_eq!(
            population_sd(&[2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0]),
            2.0,
            epsilon = 1e-15
        );
    }
}
