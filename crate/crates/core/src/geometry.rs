//! Gender direction construction, projection arithmetic, exact nearest
//! neighbours and analogy queries.
//!
//! Every [`BiasDirection`] is a unit vector oriented female-positive: when
//! both `she` and `he` are in the vocabulary, `cos(g, v(she) − v(he)) ≥ 0`.

use std::cmp::Ordering;
use std::collections::HashSet;

use ndarray::Array2;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::embedding::{Embedding, EmbeddingError};
use crate::numerics::{self, NumericsError};

pub const FEMALE_ANCHOR: &str = "she";
pub const MALE_ANCHOR: &str = "he";

/// Differences shorter than this are treated as zero.
const ZERO_NORM: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error(transparent)]
    Embedding(#[from] EmbeddingError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("{a:?} and {b:?} have identical vectors")]
    ZeroDifference { a: String, b: String },
    #[error("need at least {required} in-vocabulary pairs, found {usable}")]
    TooFewPairs { usable: usize, required: usize },
    #[error("cosine is undefined for a zero vector")]
    ZeroVector,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("no candidate words remain")]
    NoCandidates,
}

pub type Result<T, E = GeometryError> = std::result::Result<T, E>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DirectionMethod {
    PairDiff,
    PcaPairs,
    /// Supplied directly by the caller.
    Explicit,
}

/// Unit-length gender direction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BiasDirection {
    values: Vec<f64>,
    method: DirectionMethod,
}

impl BiasDirection {
    /// Normalizes `values` into a direction.
    pub fn from_vector(values: Vec<f64>) -> Result<Self> {
        let n = numerics::norm(&values);
        if !(n > ZERO_NORM) || !n.is_finite() {
            return Err(GeometryError::ZeroVector);
        }
        Ok(BiasDirection {
            values: values.into_iter().map(|x| x / n).collect(),
            method: DirectionMethod::Explicit,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn method(&self) -> DirectionMethod {
        self.method
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// The opposite direction.
    pub fn negated(&self) -> Self {
        BiasDirection {
            values: self.values.iter().map(|x| -x).collect(),
            method: self.method,
        }
    }

    fn check_dim(&self, e: &Embedding) -> Result<()> {
        if self.dim() != e.dim() {
            return Err(GeometryError::DimensionMismatch {
                expected: e.dim(),
                found: self.dim(),
            });
        }
        Ok(())
    }

    /// Flips the sign if it disagrees with `v(she) − v(he)`, or with
    /// `fallback` when the anchors are missing.
    fn orient(mut self, e: &Embedding, fallback: Option<&[f64]>) -> Self {
        let anchor = match (e.lookup(FEMALE_ANCHOR), e.lookup(MALE_ANCHOR)) {
            (Some(f), Some(m)) => Some(difference(e.row(f), e.row(m))),
            _ => fallback.map(<[f64]>::to_vec),
        };
        if let Some(anchor) = anchor {
            if numerics::dot(&self.values, &anchor) < 0.0 {
                self.values.iter_mut().for_each(|x| *x = -*x);
            }
        }
        self
    }
}

/// How to build the gender direction from an embedding.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "method")]
pub enum DirectionSource {
    /// First principal component of per-pair centered definitional pairs.
    PcaPairs { pairs: Vec<(String, String)> },
    /// Normalized difference of one (female, male) pair.
    PairDiff { female: String, male: String },
}

impl DirectionSource {
    pub fn build(&self, e: &Embedding) -> Result<BiasDirection> {
        match self {
            DirectionSource::PcaPairs { pairs } => direction_pca(e, pairs),
            DirectionSource::PairDiff { female, male } => direction_pair_diff(e, female, male),
        }
    }
}

pub fn row_f64(row: &[f32]) -> Vec<f64> {
    row.iter().map(|&x| f64::from(x)).collect()
}

fn difference(a: &[f32], b: &[f32]) -> Vec<f64> {
    a.iter().zip(b).map(|(&x, &y)| f64::from(x) - f64::from(y)).collect()
}

/// `Σ aᵢ·bᵢ` in f64 with a fixed four-lane accumulation order.
#[inline]
pub(crate) fn dot_mixed(a: &[f32], b: &[f64]) -> f64 {
    let mut acc = [0.0f64; 4];
    let chunks = a.len() / 4;
    for c in 0..chunks {
        let i = c * 4;
        acc[0] += f64::from(a[i]) * b[i];
        acc[1] += f64::from(a[i + 1]) * b[i + 1];
        acc[2] += f64::from(a[i + 2]) * b[i + 2];
        acc[3] += f64::from(a[i + 3]) * b[i + 3];
    }
    let mut tail = 0.0;
    for i in chunks * 4..a.len() {
        tail += f64::from(a[i]) * b[i];
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// `(v(a) − v(b)) / ‖·‖`, oriented female-positive.
pub fn direction_pair_diff(e: &Embedding, a: &str, b: &str) -> Result<BiasDirection> {
    let diff = difference(e.row_of(a)?, e.row_of(b)?);
    let n = numerics::norm(&diff);
    if n <= ZERO_NORM {
        return Err(GeometryError::ZeroDifference {
            a: a.to_string(),
            b: b.to_string(),
        });
    }
    let g = BiasDirection {
        values: diff.iter().map(|x| x / n).collect(),
        method: DirectionMethod::PairDiff,
    };
    Ok(g.orient(e, Some(&diff)))
}

/// First principal component of the definitional pairs, each pair centered
/// on its own mean. Out-of-vocabulary pairs are skipped.
pub fn direction_pca<S: AsRef<str>>(e: &Embedding, pairs: &[(S, S)]) -> Result<BiasDirection> {
    let usable: Vec<(&[f32], &[f32])> = pairs
        .iter()
        .filter_map(|(f, m)| match (e.row_of(f.as_ref()), e.row_of(m.as_ref())) {
            (Ok(f), Ok(m)) => Some((f, m)),
            _ => {
                log::debug!("skipping definitional pair ({}, {})", f.as_ref(), m.as_ref());
                None
            }
        })
        .collect();
    if usable.len() < 2 {
        return Err(GeometryError::TooFewPairs {
            usable: usable.len(),
            required: 2,
        });
    }

    let d = e.dim();
    let mut rows = Array2::<f64>::zeros((2 * usable.len(), d));
    for (i, (f, m)) in usable.iter().enumerate() {
        for j in 0..d {
            let fj = f64::from(f[j]);
            let mj = f64::from(m[j]);
            let mean = (fj + mj) / 2.0;
            rows[[2 * i, j]] = fj - mean;
            rows[[2 * i + 1, j]] = mj - mean;
        }
    }
    let axes = numerics::principal_axes(rows.view(), 1, false)?;
    let values: Vec<f64> = axes.components.column(0).to_vec();
    let fallback = difference(usable[0].0, usable[0].1);
    let g = BiasDirection {
        values,
        method: DirectionMethod::PcaPairs,
    };
    Ok(g.orient(e, Some(&fallback)))
}

/// `u·v / (‖u‖‖v‖)` clamped to `[−1, 1]`.
pub fn cosine(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(GeometryError::DimensionMismatch {
            expected: u.len(),
            found: v.len(),
        });
    }
    let nu = numerics::norm(u);
    let nv = numerics::norm(v);
    if nu == 0.0 || nv == 0.0 {
        return Err(GeometryError::ZeroVector);
    }
    Ok((numerics::dot(u, v) / (nu * nv)).clamp(-1.0, 1.0))
}

/// Cosine between row `index` of `e` and the direction `g`.
pub fn cosine_to_direction(e: &Embedding, index: usize, g: &BiasDirection) -> Result<f64> {
    g.check_dim(e)?;
    let n = e.norm(index);
    if n == 0.0 {
        return Err(GeometryError::ZeroVector);
    }
    Ok((dot_mixed(e.row(index), &g.values) / n).clamp(-1.0, 1.0))
}

/// `w − (w·g)g`.
pub fn reject(w: &[f64], g: &BiasDirection) -> Vec<f64> {
    let p = numerics::dot(w, &g.values);
    w.iter().zip(&g.values).map(|(x, gi)| x - p * gi).collect()
}

/// Exact neighbour entry.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Neighbor {
    pub word: String,
    pub index: usize,
    pub cosine: f64,
}

/// Nearest neighbours by descending cosine, ties by ascending vocabulary
/// index.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NeighborList {
    pub query: String,
    pub entries: Vec<Neighbor>,
}

impl NeighborList {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|n| n.word.as_str())
    }
}

#[derive(Clone, Copy, Debug)]
pub enum Query<'a> {
    Word(&'a str),
    Vector(&'a [f64]),
}

impl<'a> From<&'a str> for Query<'a> {
    fn from(word: &'a str) -> Self {
        Query::Word(word)
    }
}

impl<'a> From<&'a [f64]> for Query<'a> {
    fn from(v: &'a [f64]) -> Self {
        Query::Vector(v)
    }
}

fn rank(a: &(f64, usize), b: &(f64, usize)) -> Ordering {
    b.0.total_cmp(&a.0).then(a.1.cmp(&b.1))
}

/// Exact top-`k` neighbours by cosine over a full scan.
///
/// The query word and every word in `exclude` are never returned; zero
/// rows have no cosine and are skipped. Asking for more neighbours than
/// exist yields a shorter list.
pub fn knn<S: AsRef<str>>(e: &Embedding, query: Query<'_>, k: usize, exclude: &[S]) -> Result<NeighborList> {
    let mut skip: HashSet<usize> = exclude.iter().filter_map(|w| e.lookup(w.as_ref())).collect();
    let (label, q) = match query {
        Query::Word(word) => {
            let i = e
                .lookup(word)
                .ok_or_else(|| EmbeddingError::OutOfVocabulary(word.to_string()))?;
            skip.insert(i);
            (word.to_string(), row_f64(e.row(i)))
        }
        Query::Vector(v) => {
            if v.len() != e.dim() {
                return Err(GeometryError::DimensionMismatch {
                    expected: e.dim(),
                    found: v.len(),
                });
            }
            ("<vector>".to_string(), v.to_vec())
        }
    };
    let qn = numerics::norm(&q);
    if qn == 0.0 {
        return Err(GeometryError::ZeroVector);
    }
    let q: Vec<f64> = q.iter().map(|x| x / qn).collect();

    let mut scored: Vec<(f64, usize)> = (0..e.len())
        .filter(|i| !skip.contains(i) && e.norm(*i) > 0.0)
        .map(|i| ((dot_mixed(e.row(i), &q) / e.norm(i)).clamp(-1.0, 1.0), i))
        .collect();
    if k == 0 {
        scored.clear();
    } else if k < scored.len() {
        scored.select_nth_unstable_by(k - 1, rank);
        scored.truncate(k);
    }
    scored.sort_unstable_by(rank);

    Ok(NeighborList {
        query: label,
        entries: scored
            .into_iter()
            .map(|(cosine, index)| Neighbor {
                word: e.word(index).to_string(),
                index,
                cosine,
            })
            .collect(),
    })
}

/// `a : b :: a2 : ?` answered by the word maximizing
/// `cos(w, v(b) − v(a) + v(a2))` over the vocabulary minus the inputs.
///
/// When `a == a2` the offset cancels and the target is `v(b)` itself, so
/// only `a` is excluded and the answer is `b`.
pub fn analogy(e: &Embedding, a: &str, b: &str, a2: &str) -> Result<String> {
    let va = e.row_of(a)?;
    let vb = e.row_of(b)?;
    let vc = e.row_of(a2)?;
    let target: Vec<f64> = (0..e.dim())
        .map(|j| f64::from(vb[j]) - f64::from(va[j]) + f64::from(vc[j]))
        .collect();
    let exclude: Vec<&str> = if a == a2 { vec![a] } else { vec![a, b, a2] };
    let best = knn(e, Query::Vector(&target), 1, &exclude)?;
    best.entries
        .into_iter()
        .next()
        .map(|n| n.word)
        .ok_or(GeometryError::NoCandidates)
}

#[cfg(test)]
mod tests {
    use approx::assert_abs_diff_eq;

    use super::*;

    const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

    fn emb(rows: &[(&str, &[f32])]) -> Embedding {
        Embedding::from_rows(rows.iter().map(|(w, v)| (*w, v.to_vec()))).unwrap()
    }

    #[test]
    fn pair_diff_she_he() {
        let e = emb(&[("she", &[0.0, 1.0]), ("he", &[1.0, 0.0])]);
        let g = direction_pair_diff(&e, "she", "he").unwrap();
        assert_abs_diff_eq!(g.values()[0], -H, epsilon = 1e-12);
        assert_abs_diff_eq!(g.values()[1], H, epsilon = 1e-12);
        // reversed arguments are re-oriented by the anchors
        let r = direction_pair_diff(&e, "he", "she").unwrap();
        assert_eq!(r.values(), g.values());
        assert!(matches!(
            direction_pair_diff(&e, "she", "she"),
            Err(GeometryError::ZeroDifference { .. })
        ));
        assert!(matches!(
            direction_pair_diff(&e, "she", "zzz"),
            Err(GeometryError::Embedding(EmbeddingError::OutOfVocabulary(_)))
        ));
    }

    #[test]
    fn pca_direction_two_pairs() {
        let e = emb(&[
            ("f1", &[0.0, 1.0]),
            ("m1", &[1.0, 0.0]),
            ("f2", &[0.0, 0.9]),
            ("m2", &[0.9, 0.0]),
        ]);
        let g = direction_pca(&e, &[("f1", "m1"), ("f2", "m2"), ("zz", "m1")]).unwrap();
        assert_abs_diff_eq!(g.values()[0], -H, epsilon = 1e-3);
        assert_abs_diff_eq!(g.values()[1], H, epsilon = 1e-3);
        assert_eq!(g.method(), DirectionMethod::PcaPairs);

        let dup = direction_pca(&e, &[("f1", "m1"), ("f1", "m1")]).unwrap();
        let diff = direction_pair_diff(&e, "f1", "m1").unwrap();
        for (a, b) in dup.values().iter().zip(diff.values()) {
            assert_abs_diff_eq!(a.abs(), b.abs(), epsilon = 1e-12);
        }
        assert!(matches!(
            direction_pca(&e, &[("f1", "m1"), ("x", "y")]),
            Err(GeometryError::TooFewPairs { usable: 1, .. })
        ));
    }

    #[test]
    fn cosine_cases() {
        assert_abs_diff_eq!(cosine(&[0.3, 0.4], &[0.3, 0.4]).unwrap(), 1.0, epsilon = 1e-15);
        assert_eq!(cosine(&[1.0, 0.0], &[0.0, 2.0]).unwrap(), 0.0);
        assert_abs_diff_eq!(cosine(&[1.0, 1.0], &[1.0, 0.0]).unwrap(), H, epsilon = 1e-15);
        assert!(matches!(
            cosine(&[0.0, 0.0], &[1.0, 0.0]),
            Err(GeometryError::ZeroVector)
        ));
    }

    #[test]
    fn reject_cases() {
        let g = BiasDirection::from_vector(vec![1.0, 0.0]).unwrap();
        assert_eq!(reject(&[0.6, 0.8], &g), vec![0.0, 0.8]);
        assert_eq!(reject(&[0.0, 0.8], &g), vec![0.0, 0.8]);
        assert_eq!(reject(&[1.0, 0.0], &g), vec![0.0, 0.0]);
    }

    #[test]
    fn knn_tie_break_and_exclusion() {
        let e = emb(&[
            ("a", &[1.0, 0.0, 0.0]),
            ("b", &[0.0, 1.0, 0.0]),
            ("c", &[0.0, 0.0, 1.0]),
        ]);
        let n = knn(&e, Query::Word("a"), 2, &[] as &[&str]).unwrap();
        assert_eq!(n.words().collect::<Vec<_>>(), vec!["b", "c"]);
        assert!(n.entries.iter().all(|x| x.cosine == 0.0));
        let n = knn(&e, "a".into(), 10, &["b"]).unwrap();
        assert_eq!(n.words().collect::<Vec<_>>(), vec!["c"]);
        assert!(knn(&e, "zzz".into(), 1, &[] as &[&str]).is_err());
    }

    #[test]
    fn knn_planted() {
        let c99 = 0.99f32;
        let s99 = (1.0 - c99 * c99).sqrt();
        let s50 = (1.0f32 - 0.25).sqrt();
        let e = emb(&[
            ("a", &[1.0, 0.0, 0.0]),
            ("d", &[0.0, 0.0, 1.0]),
            ("c", &[0.5, 0.0, s50]),
            ("b", &[c99, s99, 0.0]),
        ]);
        let n = knn(&e, "a".into(), 2, &[] as &[&str]).unwrap();
        assert_eq!(n.words().collect::<Vec<_>>(), vec!["b", "c"]);
        let n = knn(&e, "a".into(), 2, &["b"]).unwrap();
        assert_eq!(n.words().collect::<Vec<_>>(), vec!["c", "d"]);
    }

    #[test]
    fn analogy_king_queen() {
        let s = std::f32::consts::FRAC_1_SQRT_2;
        let e = emb(&[
            ("man", &[1.0, 0.0, 0.0]),
            ("woman", &[0.0, 1.0, 0.0]),
            ("king", &[s, 0.0, s]),
            ("queen", &[0.0, s, s]),
        ]);
        assert_eq!(analogy(&e, "man", "king", "woman").unwrap(), "queen");
        assert_eq!(analogy(&e, "man", "king", "man").unwrap(), "king");
        assert!(analogy(&e, "man", "zzz", "woman").is_err());
    }
}
