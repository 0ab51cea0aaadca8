//! Repulsion-attraction-neutralization debiasing.
//!
//! Each target word is moved on the unit sphere to minimize
//!
//! ```text
//! F(x) = λ₁·mean_{v∈Ω} |cos(x, v)| + λ₂·(1 − cos(x, w₀)) + λ₃·|cos(x, g)|
//! ```
//!
//! where `w₀` is its original vector and `Ω` holds the original neighbours
//! with indirect bias `|β| ≥ θ`.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::embedding::Embedding;
use crate::geometry::{row_f64, BiasDirection};
use crate::metrics::{proximity_neighbours, BreakdownEntry, DEFAULT_K, DEFAULT_THETA};
use crate::numerics::{dot, minimize, norm, Objective, OptimizerConfig, Projection};

use super::{targets, DebiasError, DebiasOutcome, DebiasReport, Debiaser, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RanConfig {
    /// Weight of the repulsion term.
    pub lambda_repulsion: f64,
    /// Weight of the attraction to the original vector.
    pub lambda_attraction: f64,
    /// Weight of the neutralization term.
    pub lambda_neutralization: f64,
    pub k: usize,
    pub theta: f64,
    pub optimizer: OptimizerConfig,
}

impl Default for RanConfig {
    fn default() -> Self {
        RanConfig {
            lambda_repulsion: 1.0 / 3.0,
            lambda_attraction: 1.0 / 3.0,
            lambda_neutralization: 1.0 / 3.0,
            k: DEFAULT_K,
            theta: DEFAULT_THETA,
            optimizer: OptimizerConfig {
                projection: Projection::UnitSphere,
                ..OptimizerConfig::default()
            },
        }
    }
}

impl RanConfig {
    pub fn validate(&self) -> Result<()> {
        let weights = [
            self.lambda_repulsion,
            self.lambda_attraction,
            self.lambda_neutralization,
        ];
        if weights.iter().any(|l| !(*l >= 0.0) || !l.is_finite()) {
            return Err(DebiasError::InvalidConfig(
                "RAN weights must be finite and non-negative".into(),
            ));
        }
        if !(weights.iter().sum::<f64>() > 0.0) {
            return Err(DebiasError::InvalidConfig("RAN weights must not all be zero".into()));
        }
        if !(self.theta >= 0.0) {
            return Err(DebiasError::InvalidConfig("theta must be non-negative".into()));
        }
        self.optimizer.validate()?;
        Ok(())
    }
}

fn unit(v: &[f64]) -> Vec<f64> {
    let n = norm(v);
    v.iter().map(|x| x / n).collect()
}

/// `d cos(x, û) / dx = û/‖x‖ − cos(x, û)·x/‖x‖²` for unit `û`.
fn cosine_and_gradient<'a>(x: &'a [f64], xn: f64, u: &'a [f64]) -> (f64, impl Iterator<Item = f64> + 'a) {
    let c = dot(x, u) / xn;
    let grad = x.iter().zip(u).map(move |(xi, ui)| ui / xn - c * xi / (xn * xn));
    (c, grad)
}

/// The per-word RAN objective. Vectors are stored at unit length.
#[derive(Clone, Debug)]
pub struct RanObjective {
    repel: Vec<Vec<f64>>,
    origin: Vec<f64>,
    direction: Vec<f64>,
    weights: [f64; 3],
}

impl RanObjective {
    pub fn new(origin: &[f64], repel: &[Vec<f64>], g: &BiasDirection, cfg: &RanConfig) -> Self {
        RanObjective {
            repel: repel.iter().map(|v| unit(v)).collect(),
            origin: unit(origin),
            direction: g.values().to_vec(),
            weights: [cfg.lambda_repulsion, cfg.lambda_attraction, cfg.lambda_neutralization],
        }
    }

    pub fn repulsion_size(&self) -> usize {
        self.repel.len()
    }
}

impl Objective for RanObjective {
    fn value(&self, x: &[f64]) -> f64 {
        let xn = norm(x);
        let [l1, l2, l3] = self.weights;
        let mut f = 0.0;
        if !self.repel.is_empty() {
            let total: f64 = self.repel.iter().map(|v| (dot(x, v) / xn).abs()).sum();
            f += l1 * total / self.repel.len() as f64;
        }
        f += l2 * (1.0 - dot(x, &self.origin) / xn);
        f += l3 * (dot(x, &self.direction) / xn).abs();
        f
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let xn = norm(x);
        let [l1, l2, l3] = self.weights;
        let mut grad = vec![0.0; x.len()];
        if !self.repel.is_empty() {
            let w = l1 / self.repel.len() as f64;
            for v in &self.repel {
                let (c, dc) = cosine_and_gradient(x, xn, v);
                let s = w * sign(c);
                grad.iter_mut().zip(dc).for_each(|(g, d)| *g += s * d);
            }
        }
        let (_, dc) = cosine_and_gradient(x, xn, &self.origin);
        grad.iter_mut().zip(dc).for_each(|(g, d)| *g -= l2 * d);
        let (c, dc) = cosine_and_gradient(x, xn, &self.direction);
        let s = l3 * sign(c);
        grad.iter_mut().zip(dc).for_each(|(g, d)| *g += s * d);
        grad
    }
}

/// Subgradient of `|c|`, zero at the kink.
fn sign(c: f64) -> f64 {
    if c > 0.0 {
        1.0
    } else if c < 0.0 {
        -1.0
    } else {
        0.0
    }
}

struct WordRun {
    row: Option<Vec<f64>>,
    initial: f64,
    value: f64,
    iterations: usize,
    repulsion: usize,
    diverged: bool,
}

/// RAN debiasing of `words` (or the full vocabulary) against `g`.
///
/// Repulsion sets come from the input embedding and each word is optimized
/// independently, in parallel. Words whose optimization diverges keep their
/// original vector and are listed as degenerate.
pub fn ran_debias(
    e: &Embedding,
    words: Option<&[String]>,
    g: &BiasDirection,
    cfg: &RanConfig,
) -> Result<DebiasOutcome> {
    cfg.validate()?;
    let optimizer = OptimizerConfig {
        projection: Projection::UnitSphere,
        ..cfg.optimizer
    };
    let mut report = DebiasReport::new("ran");
    let (rows, skipped) = targets(e, words, &|_| false);
    report.skipped = skipped;
    if rows.is_empty() && !report.skipped.is_empty() {
        return Err(DebiasError::AllOutOfVocabulary {
            skipped: report.skipped,
        });
    }
    for (name, value) in [
        ("lambda_repulsion", cfg.lambda_repulsion),
        ("lambda_attraction", cfg.lambda_attraction),
        ("lambda_neutralization", cfg.lambda_neutralization),
        ("theta", cfg.theta),
        ("learning_rate", optimizer.learning_rate),
        ("tolerance", optimizer.tolerance),
    ] {
        report.parameters.insert(name.into(), value.into());
    }
    report.parameters.insert("k".into(), cfg.k.into());
    report
        .parameters
        .insert("max_iterations".into(), optimizer.max_iterations.into());

    let runs: Vec<Result<WordRun>> = rows
        .par_iter()
        .map(|&i| {
            let origin = row_f64(e.row(i));
            if norm(&origin) == 0.0 {
                return Ok(WordRun {
                    row: None,
                    initial: f64::NAN,
                    value: f64::NAN,
                    iterations: 0,
                    repulsion: 0,
                    diverged: true,
                });
            }
            let detail = proximity_neighbours(e, g, e.word(i), cfg.k, cfg.theta)?;
            let repel: Vec<Vec<f64>> = detail.flagged().map(|n| row_f64(e.row(n.index))).collect();
            let objective = RanObjective::new(&origin, &repel, g, cfg);
            let initial = objective.value(&unit(&origin));
            Ok(match minimize(&objective, &origin, &optimizer) {
                Ok(m) => WordRun {
                    row: Some(m.x),
                    initial,
                    value: m.value,
                    iterations: m.trace.len() - 1,
                    repulsion: repel.len(),
                    diverged: false,
                },
                Err(_) => WordRun {
                    row: None,
                    initial,
                    value: f64::NAN,
                    iterations: 0,
                    repulsion: repel.len(),
                    diverged: true,
                },
            })
        })
        .collect();

    let mut matrix = e.matrix().to_owned();
    for (&i, run) in rows.iter().zip(runs) {
        let run = run?;
        let word = e.word(i).to_string();
        match run.row {
            Some(row) => {
                matrix.row_mut(i).iter_mut().zip(row).for_each(|(m, x)| *m = x as f32);
                report.per_word.push(BreakdownEntry {
                    item: word.clone(),
                    scores: BTreeMap::from([
                        ("initial".to_string(), run.initial),
                        ("final".to_string(), run.value),
                        ("iterations".to_string(), run.iterations as f64),
                        ("repulsion".to_string(), run.repulsion as f64),
                    ]),
                });
                report.processed.push(word);
            }
            None => {
                debug_assert!(run.diverged);
                report.warn(format!("optimization diverged for {word:?}; original vector kept"));
                report.degenerate.push(word);
            }
        }
    }
    Ok(DebiasOutcome {
        embedding: e.with_matrix(matrix)?,
        report,
    })
}

#[derive(Clone, Debug)]
pub struct RanDebias {
    pub config: RanConfig,
    pub direction: crate::geometry::DirectionSource,
    /// Left out when no word list is given.
    pub gender_specific: Vec<String>,
}

impl Default for RanDebias {
    fn default() -> Self {
        RanDebias {
            config: RanConfig::default(),
            direction: crate::geometry::DirectionSource::PcaPairs {
                pairs: crate::lexicons::definitional_pairs(),
            },
            gender_specific: crate::lexicons::gender_specific(),
        }
    }
}

impl Debiaser for RanDebias {
    fn name(&self) -> &'static str {
        "ran"
    }

    fn run(&self, e: &Embedding, words: Option<&[String]>) -> Result<DebiasOutcome> {
        let g = self.direction.build(e)?;
        match words {
            Some(words) => ran_debias(e, Some(words), &g, &self.config),
            None => {
                let exempt: std::collections::HashSet<&str> = self.gender_specific.iter().map(String::as_str).collect();
                let words: Vec<String> = e
                    .vocab()
                    .iter()
                    .filter(|w| !exempt.contains(w.as_str()))
                    .cloned()
                    .collect();
                ran_debias(e, Some(&words), &g, &self.config)
            }
        }
    }
}
