//! Half-sibling regression debiasing.
//!
//! Target vectors are regressed on the definitional word vectors, with the
//! embedding dimensions as samples, and the fitted part is subtracted.

use std::collections::HashSet;

use ndarray::{Array2, Axis};
use serde::{Deserialize, Serialize};

use crate::embedding::Embedding;
use crate::lexicons;
use crate::numerics::ridge_solve;

use super::{targets, DebiasError, DebiasOutcome, DebiasReport, Debiaser, Result, ZERO_NORM};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HsrConfig {
    /// Regressors; never modified.
    pub definitional: Vec<String>,
    /// Ridge penalty.
    pub alpha: f64,
}

impl Default for HsrConfig {
    /// Both members of every bundled definitional pair, `α = 1`.
    fn default() -> Self {
        let mut definitional = Vec::new();
        for (f, m) in lexicons::definitional_pairs() {
            definitional.push(f);
            definitional.push(m);
        }
        HsrConfig {
            definitional,
            alpha: 1.0,
        }
    }
}

/// Ridge coefficients and residuals of one regression.
#[derive(Clone, Debug)]
pub struct HsrSolution {
    /// `n_d × n_t`.
    pub coefficients: Array2<f64>,
    /// `D × n_t`: `N − G·W` before renormalization.
    pub residuals: Array2<f64>,
}

/// Solves `min ‖N − G·W‖² + α‖W‖²` for `G` (`D × n_d`) and `N` (`D × n_t`).
pub fn hsr_residuals(definitional: &Array2<f64>, targets: &Array2<f64>, alpha: f64) -> Result<HsrSolution> {
    let coefficients = ridge_solve(definitional.view(), targets.view(), alpha)?;
    let residuals = targets - &definitional.dot(&coefficients);
    Ok(HsrSolution {
        coefficients,
        residuals,
    })
}

fn columns(e: &Embedding, rows: &[usize]) -> Array2<f64> {
    let mut m = Array2::zeros((e.dim(), rows.len()));
    for (j, &i) in rows.iter().enumerate() {
        for (d, &x) in e.row(i).iter().enumerate() {
            m[[d, j]] = f64::from(x);
        }
    }
    m
}

/// HSR debiasing of `words` (or every non-definitional word).
///
/// Residual columns are renormalized to unit length; collapsed residuals
/// keep the original vector and are reported as degenerate.
pub fn hsr_debias(e: &Embedding, words: Option<&[String]>, cfg: &HsrConfig) -> Result<DebiasOutcome> {
    if !(cfg.alpha >= 0.0) || !cfg.alpha.is_finite() {
        return Err(DebiasError::InvalidConfig(format!(
            "alpha must be finite and non-negative, got {}",
            cfg.alpha
        )));
    }
    let mut report = DebiasReport::new("hsr");
    report.parameters.insert("alpha".into(), cfg.alpha.into());

    let (regressors, missing) = crate::metrics::partition_words(e, &cfg.definitional);
    if !missing.is_empty() {
        report.warn(format!(
            "{} definitional word(s) not in vocabulary: {}",
            missing.len(),
            missing.join(", ")
        ));
    }
    if regressors.len() < 2 {
        return Err(DebiasError::InvalidConfig(format!(
            "HSR needs at least 2 in-vocabulary definitional words, found {}",
            regressors.len()
        )));
    }
    report
        .parameters
        .insert("definitional_words".into(), regressors.len().into());

    let fixed: HashSet<&str> = regressors.iter().map(|&i| e.word(i)).collect();
    let (rows, skipped) = targets(e, words, &|w| fixed.contains(w));
    report.skipped = skipped;
    if rows.is_empty() {
        if !report.skipped.is_empty() {
            return Err(DebiasError::AllOutOfVocabulary {
                skipped: report.skipped,
            });
        }
        return Ok(DebiasOutcome {
            embedding: e.clone(),
            report,
        });
    }

    let g = columns(e, &regressors);
    let n = columns(e, &rows);
    let solution = hsr_residuals(&g, &n, cfg.alpha)?;

    let mut matrix = e.matrix().to_owned();
    for (j, residual) in solution.residuals.axis_iter(Axis(1)).enumerate() {
        let i = rows[j];
        let original = n.column(j);
        let rn = residual.dot(&residual).sqrt();
        let on = original.dot(&original).sqrt();
        if !(rn > ZERO_NORM * on.max(f64::MIN_POSITIVE)) {
            report.degenerate.push(e.word(i).to_string());
            continue;
        }
        matrix
            .row_mut(i)
            .iter_mut()
            .zip(residual)
            .for_each(|(m, x)| *m = (x / rn) as f32);
        report.processed.push(e.word(i).to_string());
    }
    if !report.degenerate.is_empty() {
        let message = format!(
            "{} target(s) lie in the definitional span and were left unchanged",
            report.degenerate.len()
        );
        report.warn(message);
    }
    Ok(DebiasOutcome {
        embedding: e.with_matrix(matrix)?,
        report,
    })
}

#[derive(Clone, Debug, Default)]
pub struct HsrDebias {
    pub config: HsrConfig,
}

impl Debiaser for HsrDebias {
    fn name(&self) -> &'static str {
        "hsr"
    }

    fn run(&self, e: &Embedding, words: Option<&[String]>) -> Result<DebiasOutcome> {
        hsr_debias(e, words, &self.config)
    }
}

#[cfg(test)]
mod tests {
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    use super::*;

    fn config(words: &[&str], alpha: f64) -> HsrConfig {
        HsrConfig {
            definitional: words.iter().map(|w| w.to_string()).collect(),
            alpha,
        }
    }

    #[test]
    fn three_dimensional_hand_case() {
        let g = array![[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]];
        let s = 1.0 / 3f64.sqrt();
        let n = array![[s], [s], [s]];
        let sol = hsr_residuals(&g, &n, 1.0).unwrap();
        // (GᵀG + I)W = Gᵀn → W = (1/√3)/2 per row
        let w = 1.0 / (2.0 * 3f64.sqrt());
        assert_abs_diff_eq!(sol.coefficients[[0, 0]], w, epsilon = 1e-15);
        assert_abs_diff_eq!(sol.coefficients[[1, 0]], w, epsilon = 1e-15);
        let r = sol.residuals.column(0).to_vec();
        let rn = r.iter().map(|x| x * x).sum::<f64>().sqrt();
        let expected = [1.0 / 6f64.sqrt(), 1.0 / 6f64.sqrt(), 2.0 / 6f64.sqrt()];
        for (a, b) in r.iter().map(|x| x / rn).zip(expected) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
    }

    fn toy() -> Embedding {
        Embedding::from_rows([
            ("he", vec![1.0f32, 0.0, 0.0]),
            ("she", vec![0.0, 1.0, 0.0]),
            ("table", vec![0.0, 0.0, 1.0]),
            ("nurse", vec![0.57735026, 0.57735026, 0.57735026]),
        ])
        .unwrap()
    }

    #[test]
    fn orthogonal_target_unchanged() {
        let e = toy();
        let out = hsr_debias(&e, Some(&["table".to_string()]), &config(&["he", "she"], 1.0)).unwrap();
        assert_eq!(out.embedding.row(2), e.row(2));
        assert_eq!(out.embedding.row(0), e.row(0));
    }

    #[test]
    fn huge_alpha_is_identity() {
        let e = toy();
        let out = hsr_debias(&e, None, &config(&["he", "she"], 1e12)).unwrap();
        for (a, b) in out.embedding.row(3).iter().zip(e.row(3)) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-4);
        }
        assert_eq!(out.report.processed, vec!["table", "nurse"]);
    }

    #[test]
    fn full_span_collapses_and_is_reported() {
        let e = toy();
        let out = hsr_debias(&e, Some(&["nurse".to_string()]), &config(&["he", "she", "table"], 0.0)).unwrap();
        assert_eq!(out.report.degenerate, vec!["nurse"]);
        assert_eq!(out.embedding.row(3), e.row(3));
    }

    #[test]
    fn needs_two_definitional_words() {
        assert!(hsr_debias(&toy(), None, &config(&["he", "zzz"], 1.0)).is_err());
        assert!(matches!(
            hsr_debias(&toy(), Some(&["zzz".to_string()]), &config(&["he", "she"], 1.0)),
            Err(DebiasError::AllOutOfVocabulary { .. })
        ));
    }
}
