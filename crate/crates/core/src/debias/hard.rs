//! Hard debiasing: neutralize, then equalize.

use std::collections::HashSet;

use ndarray::Array2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::embedding::Embedding;
use crate::geometry::{reject, row_f64, BiasDirection, DirectionSource};
use crate::lexicons;
use crate::numerics::{dot, norm};

use super::{targets, DebiasOutcome, DebiasReport, Debiaser, Result, ZERO_NORM};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HardDebiasConfig {
    /// (female, male) pairs made symmetric about the neutral subspace.
    pub equalize_pairs: Vec<(String, String)>,
    /// Words never neutralized.
    pub gender_specific: Vec<String>,
    pub direction: DirectionSource,
}

impl Default for HardDebiasConfig {
    /// Bundled equalize pairs and gender-specific words; direction from the
    /// bundled definitional pairs.
    fn default() -> Self {
        HardDebiasConfig {
            equalize_pairs: lexicons::equalize_pairs(),
            gender_specific: lexicons::gender_specific(),
            direction: DirectionSource::PcaPairs {
                pairs: lexicons::definitional_pairs(),
            },
        }
    }
}

/// The equalized pair `(e₁', e₂')` for raw vectors `e1`, `e2`, or `None`
/// when both share the same component along `g`.
pub fn equalize_pair(e1: &[f64], e2: &[f64], g: &BiasDirection) -> Option<(Vec<f64>, Vec<f64>)> {
    let gv = g.values();
    let mu: Vec<f64> = e1.iter().zip(e2).map(|(a, b)| (a + b) / 2.0).collect();
    let nu = reject(&mu, g);
    let scale = (1.0 - dot(&nu, &nu)).max(0.0).sqrt();
    let mu_g = dot(&mu, gv);
    let member = |w: &[f64]| -> Option<Vec<f64>> {
        // (w_g − μ_g) = (w·g − μ·g)·g, whose norm is |w·g − μ·g|
        let offset = dot(w, gv) - mu_g;
        if offset.abs() <= f64::EPSILON * (1.0 + mu_g.abs()) {
            return None;
        }
        let sign = offset.signum();
        Some(nu.iter().zip(gv).map(|(n, gi)| n + scale * sign * gi).collect())
    };
    Some((member(e1)?, member(e2)?))
}

/// Hard debiasing with the direction built from `cfg.direction`.
pub fn hard_debias(e: &Embedding, words: Option<&[String]>, cfg: &HardDebiasConfig) -> Result<DebiasOutcome> {
    let g = cfg.direction.build(e)?;
    hard_debias_with_direction(e, words, cfg, &g)
}

/// Hard debiasing against a given direction.
///
/// Targets (`words`, or the whole vocabulary) minus gender-specific words
/// and equalize-pair members are projected off `g` and renormalized; then
/// every in-vocabulary equalize pair is made symmetric about the neutral
/// subspace. All other rows are copied bit for bit.
pub fn hard_debias_with_direction(
    e: &Embedding,
    words: Option<&[String]>,
    cfg: &HardDebiasConfig,
    g: &BiasDirection,
) -> Result<DebiasOutcome> {
    if g.dim() != e.dim() {
        return Err(crate::geometry::GeometryError::DimensionMismatch {
            expected: e.dim(),
            found: g.dim(),
        }
        .into());
    }
    let mut report = DebiasReport::new("hard");
    report
        .parameters
        .insert("direction".into(), serde_json::to_value(g.method()).unwrap_or_default());
    report
        .parameters
        .insert("equalize_pairs".into(), cfg.equalize_pairs.len().into());
    report
        .parameters
        .insert("gender_specific".into(), cfg.gender_specific.len().into());
    report
        .parameters
        .insert("all_vocabulary".into(), words.is_none().into());

    let mut exempt: HashSet<&str> = cfg.gender_specific.iter().map(String::as_str).collect();
    for (a, b) in &cfg.equalize_pairs {
        exempt.insert(a);
        exempt.insert(b);
    }
    let (rows, skipped) = targets(e, words, &|w| exempt.contains(w));
    report.skipped = skipped;

    let neutral: Vec<Option<Vec<f32>>> = rows
        .par_iter()
        .map(|&i| {
            let w = row_f64(e.row(i));
            let r = reject(&w, g);
            let n = norm(&r);
            (n >= ZERO_NORM).then(|| r.iter().map(|x| (x / n) as f32).collect())
        })
        .collect();

    let mut matrix: Array2<f32> = e.matrix().to_owned();
    for (&i, row) in rows.iter().zip(neutral) {
        match row {
            Some(row) => {
                matrix.row_mut(i).iter_mut().zip(row).for_each(|(m, x)| *m = x);
                report.processed.push(e.word(i).to_string());
            }
            None => report.degenerate.push(e.word(i).to_string()),
        }
    }
    if !report.degenerate.is_empty() {
        let message = format!(
            "{} word(s) lie along the gender direction and were left unchanged",
            report.degenerate.len()
        );
        report.warn(message);
    }

    let mut equalized = 0usize;
    for (a, b) in &cfg.equalize_pairs {
        let (Some(ia), Some(ib)) = (e.lookup(a), e.lookup(b)) else {
            continue;
        };
        if ia == ib {
            continue;
        }
        match equalize_pair(&row_f64(e.row(ia)), &row_f64(e.row(ib)), g) {
            Some((na, nb)) => {
                for (i, v) in [(ia, na), (ib, nb)] {
                    matrix.row_mut(i).iter_mut().zip(v).for_each(|(m, x)| *m = x as f32);
                    report.processed.push(e.word(i).to_string());
                }
                equalized += 1;
            }
            None => report.warn(format!(
                "equalize pair ({a}, {b}) has no gender contrast and was skipped"
            )),
        }
    }
    report.parameters.insert("pairs_equalized".into(), equalized.into());

    Ok(DebiasOutcome {
        embedding: e.with_matrix(matrix)?,
        report,
    })
}

#[derive(Clone, Debug, Default)]
pub struct HardDebias {
    pub config: HardDebiasConfig,
}

impl Debiaser for HardDebias {
    fn name(&self) -> &'static str {
        "hard"
    }

    fn run(&self, e: &Embedding, words: Option<&[String]>) -> Result<DebiasOutcome> {
        hard_debias(e, words, &self.config)
    }
}
