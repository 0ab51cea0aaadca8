//! Word-level and embedding-level bias reports.
//!
//! Report numbers are taken from the same calls the metrics module exposes,
//! so a report value and the standalone metric agree bit for bit.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::embedding::{Embedding, EmbeddingError};
use crate::geometry::{cosine_to_direction, BiasDirection, GeometryError};
use crate::metrics::{direct_bias, neighbours_analysis, proximity_bias, MetricError, DEFAULT_K, DEFAULT_THETA};
use crate::viz::{self, VizError};

#[derive(Debug, Error)]
pub enum ReportError {
    #[error(transparent)]
    Embedding(#[from] EmbeddingError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Viz(#[from] VizError),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = ReportError> = std::result::Result<T, E>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportKind {
    Word,
    Global,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub label: String,
    /// `None` where a value is undefined.
    pub cells: Vec<Option<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum SectionPayload {
    Scalar { value: f64 },
    Table { columns: Vec<String>, rows: Vec<TableRow> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Section {
    pub title: String,
    #[serde(flatten)]
    pub payload: SectionPayload,
}

impl Section {
    pub fn scalar(title: &str, value: f64) -> Self {
        Section {
            title: title.to_string(),
            payload: SectionPayload::Scalar { value },
        }
    }

    pub fn value(&self) -> Option<f64> {
        match self.payload {
            SectionPayload::Scalar { value } => Some(value),
            SectionPayload::Table { .. } => None,
        }
    }

    pub fn rows(&self) -> &[TableRow] {
        match &self.payload {
            SectionPayload::Table { rows, .. } => rows,
            SectionPayload::Scalar { .. } => &[],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub kind: ReportKind,
    pub subject: String,
    pub sections: Vec<Section>,
    #[serde(default)]
    pub attachments: Vec<PathBuf>,
    #[serde(default)]
    pub metadata: BTreeMap<String, Value>,
}

impl ReportDocument {
    pub fn section(&self, title: &str) -> Option<&Section> {
        self.sections.iter().find(|s| s.title == title)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WordReportOptions {
    pub k: usize,
    pub theta: f64,
}

impl Default for WordReportOptions {
    fn default() -> Self {
        WordReportOptions {
            k: DEFAULT_K,
            theta: DEFAULT_THETA,
        }
    }
}

pub const DIRECT_BIAS: &str = "direct bias";
pub const PROXIMITY_BIAS: &str = "proximity bias";
pub const NEIGHBOURS: &str = "neighbours";
pub const MOST_BIASED: &str = "most biased";
pub const LEAST_BIASED: &str = "least biased";
pub const VOCABULARY_DIRECT_BIAS: &str = "vocabulary direct bias";

/// A file-name-safe form of `word`.
pub fn sanitize(word: &str) -> String {
    let mut out: String = word
        .chars()
        .map(|c| {
            if c.is_alphanumeric() || c == '-' || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect();
    if out.is_empty() {
        out.push_str("word");
    }
    out
}

/// Direct bias, proximity bias and the neighbour table of one word.
///
/// With `out_dir`, also writes `<word>-neighbors.svg` and `<word>-cloud.svg`
/// there, replacing existing files.
pub fn word_report(
    e: &Embedding,
    g: &BiasDirection,
    word: &str,
    options: &WordReportOptions,
    out_dir: Option<&Path>,
) -> Result<ReportDocument> {
    let k = options.k;
    let mut doc = ReportDocument {
        kind: ReportKind::Word,
        subject: word.to_string(),
        sections: Vec::new(),
        attachments: Vec::new(),
        metadata: BTreeMap::new(),
    };
    doc.metadata.insert("k".into(), k.into());
    doc.metadata.insert("theta".into(), options.theta.into());
    doc.metadata.insert("c".into(), 1.0.into());

    let direct = direct_bias(e, g, &[word], 1.0)?;
    doc.sections.push(Section::scalar(DIRECT_BIAS, direct.value()));

    match proximity_bias(e, g, word, k, options.theta) {
        Ok(eta) => {
            doc.sections.push(Section::scalar(PROXIMITY_BIAS, eta.value()));
            if let Some(d) = eta.metadata.get("degenerate_neighbours") {
                if d.as_array().is_some_and(|a| !a.is_empty()) {
                    doc.metadata.insert("degenerate_neighbours".into(), d.clone());
                }
            }
        }
        Err(MetricError::EmptyNeighborSet { .. }) => {
            doc.metadata.insert(
                "proximity_bias".into(),
                "undefined: no neighbour has a defined indirect bias".into(),
            );
        }
        Err(other) => return Err(other.into()),
    }

    let table = neighbours_analysis(e, g, word, k)?;
    let columns = ["cosine", "g_cosine", "indirect_bias"];
    let rows = table
        .breakdown
        .iter()
        .map(|b| TableRow {
            label: b.item.clone(),
            cells: columns.iter().map(|c| b.scores.get(*c).copied()).collect(),
        })
        .collect();
    doc.sections.push(Section {
        title: NEIGHBOURS.into(),
        payload: SectionPayload::Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows,
        },
    });

    if let Some(dir) = out_dir {
        let stem = sanitize(word);
        let scatter = dir.join(format!("{stem}-neighbors.svg"));
        doc.attachments.push(viz::neighbor_scatter(e, g, word, k, &scatter)?);
        let weights: Vec<(String, f64)> = table
            .breakdown
            .iter()
            .map(|b| (b.item.clone(), b.scores["cosine"].max(0.0)))
            .collect();
        let cloud = dir.join(format!("{stem}-cloud.svg"));
        if weights.is_empty() {
            doc.attachments.push(viz::word_cloud(&[(word, 1.0)], &cloud)?);
        } else {
            doc.attachments.push(viz::word_cloud(&weights, &cloud)?);
        }
    }
    Ok(doc)
}

/// The `n` most and least biased words by `|cos(w, g)|` and the direct bias
/// over the whole vocabulary, from one pass over the rows.
pub fn global_report(e: &Embedding, g: &BiasDirection, n: usize, subject: &str) -> Result<ReportDocument> {
    if n == 0 {
        return Err(ReportError::InvalidArgument("n must be at least 1".into()));
    }
    let mut scored: Vec<(f64, f64, usize)> = Vec::with_capacity(e.len());
    let mut zero_rows = Vec::new();
    let mut total = 0.0;
    for i in 0..e.len() {
        match cosine_to_direction(e, i, g) {
            Ok(cos) => {
                let score = cos.abs();
                total += score;
                scored.push((score, cos, i));
            }
            Err(GeometryError::ZeroVector) => zero_rows.push(e.word(i).to_string()),
            Err(other) => return Err(other.into()),
        }
    }
    if scored.is_empty() {
        return Err(MetricError::AllOutOfVocabulary { skipped: zero_rows }.into());
    }
    let projections = e.len();
    let aggregate = total / scored.len() as f64;
    let take = n.min(scored.len());

    let most = top(&scored, take, |a, b| b.0.total_cmp(&a.0).then(a.2.cmp(&b.2)));
    let least = top(&scored, take, |a, b| a.0.total_cmp(&b.0).then(a.2.cmp(&b.2)));
    let table = |rows: Vec<(f64, f64, usize)>| SectionPayload::Table {
        columns: vec!["score".into(), "cosine".into()],
        rows: rows
            .into_iter()
            .map(|(score, cos, i)| TableRow {
                label: e.word(i).to_string(),
                cells: vec![Some(score), Some(cos)],
            })
            .collect(),
    };

    let mut doc = ReportDocument {
        kind: ReportKind::Global,
        subject: subject.to_string(),
        sections: vec![
            Section {
                title: MOST_BIASED.into(),
                payload: table(most),
            },
            Section {
                title: LEAST_BIASED.into(),
                payload: table(least),
            },
            Section::scalar(VOCABULARY_DIRECT_BIAS, aggregate),
        ],
        attachments: Vec::new(),
        metadata: BTreeMap::new(),
    };
    doc.metadata.insert("n".into(), n.into());
    doc.metadata.insert("vocabulary".into(), e.len().into());
    doc.metadata.insert("projections".into(), projections.into());
    doc.metadata.insert(
        "vocabulary_direct_bias".into(),
        "mean |cos(w, g)| over the vocabulary; an aggregate added by this tool".into(),
    );
    if take < n {
        doc.metadata.insert("truncated".into(), true.into());
        doc.metadata.insert(
            "note".into(),
            format!("n = {n} exceeds the {take} scorable words; lists truncated").into(),
        );
    }
    if !zero_rows.is_empty() {
        doc.metadata.insert("zero_rows".into(), zero_rows.into());
    }
    Ok(doc)
}

/// The first `n` entries under `order`, via partial selection.
fn top<T: Copy>(items: &[T], n: usize, order: impl Fn(&T, &T) -> std::cmp::Ordering) -> Vec<T> {
    let mut v = items.to_vec();
    if n < v.len() {
        v.select_nth_unstable_by(n, &order);
        v.truncate(n);
    }
    v.sort_by(order);
    v
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RenderFormat {
    Text,
    Json,
}

impl std::str::FromStr for RenderFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "text" => Ok(RenderFormat::Text),
            "json" => Ok(RenderFormat::Json),
            other => Err(format!("unknown report format {other:?} (expected text or json)")),
        }
    }
}

pub fn render(doc: &ReportDocument, format: RenderFormat) -> String {
    match format {
        RenderFormat::Json => {
            let mut s = serde_json::to_string_pretty(doc).expect("report documents serialize");
            s.push('\n');
            s
        }
        RenderFormat::Text => render_text(doc),
    }
}

fn cell(x: Option<f64>) -> String {
    x.map_or_else(|| "-".to_string(), |v| format!("{v:.6}"))
}

fn render_text(doc: &ReportDocument) -> String {
    let mut out = String::new();
    let kind = match doc.kind {
        ReportKind::Word => "Word report",
        ReportKind::Global => "Global report",
    };
    let _ = writeln!(out, "{kind}: {}", doc.subject);
    for section in &doc.sections {
        let _ = writeln!(out);
        match &section.payload {
            SectionPayload::Scalar { value } => {
                let _ = writeln!(out, "{:<24} {value:.6}", section.title);
            }
            SectionPayload::Table { columns, rows } => {
                let _ = writeln!(out, "{}", section.title);
                let label_width = rows
                    .iter()
                    .map(|r| r.label.chars().count())
                    .chain([4])
                    .max()
                    .unwrap_or(4);
                let widths: Vec<usize> = columns.iter().map(|c| c.len().max(10)).collect();
                let _ = write!(out, "  {:<label_width$}", "word");
                for (c, w) in columns.iter().zip(&widths) {
                    let _ = write!(out, "  {c:>w$}");
                }
                let _ = writeln!(out);
                for row in rows {
                    let _ = write!(out, "  {:<label_width$}", row.label);
                    for (v, w) in row.cells.iter().zip(&widths) {
                        let _ = write!(out, "  {:>w$}", cell(*v));
                    }
                    let _ = writeln!(out);
                }
            }
        }
    }
    if !doc.attachments.is_empty() {
        let _ = writeln!(out);
        let _ = writeln!(out, "attachments");
        for a in &doc.attachments {
            let _ = writeln!(out, "  {}", a.display());
        }
    }
    if !doc.metadata.is_empty() {
        let _ = writeln!(out);
        for (key, value) in &doc.metadata {
            let _ = writeln!(out, "{key}: {value}");
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g2() -> BiasDirection {
        BiasDirection::from_vector(vec![1.0, 0.0]).unwrap()
    }

    #[test]
    fn global_two_words() {
        let e = Embedding::from_rows([("a", vec![1.0f32, 0.0]), ("b", vec![0.0, 1.0])]).unwrap();
        let doc = global_report(&e, &g2(), 1, "toy").unwrap();
        let most = doc.section(MOST_BIASED).unwrap().rows();
        let least = doc.section(LEAST_BIASED).unwrap().rows();
        assert_eq!((most[0].label.as_str(), most[0].cells[0]), ("a", Some(1.0)));
        assert_eq!((least[0].label.as_str(), least[0].cells[0]), ("b", Some(0.0)));
        let db = direct_bias(&e, &g2(), e.vocab(), 1.0).unwrap().value();
        assert_eq!(doc.section(VOCABULARY_DIRECT_BIAS).unwrap().value(), Some(db));
    }

    #[test]
    fn ties_follow_vocabulary_order_and_truncation_is_noted() {
        let e = Embedding::from_rows([("c", vec![0.6f32, 0.8]), ("a", vec![0.6, 0.8]), ("b", vec![0.6, 0.8])]).unwrap();
        let doc = global_report(&e, &g2(), 5, "ties").unwrap();
        let labels: Vec<&str> = doc
            .section(MOST_BIASED)
            .unwrap()
            .rows()
            .iter()
            .map(|r| r.label.as_str())
            .collect();
        assert_eq!(labels, ["c", "a", "b"]);
        assert_eq!(doc.metadata["truncated"], true);
        assert_eq!(doc.metadata["projections"], 3);
        assert!(global_report(&e, &g2(), 0, "x").is_err());
    }

    #[test]
    fn render_round_trips() {
        let e = Embedding::from_rows([("a", vec![1.0f32, 0.0]), ("b", vec![0.6, 0.8])]).unwrap();
        let doc = word_report(&e, &g2(), "b", &WordReportOptions::default(), None).unwrap();
        let json = render(&doc, RenderFormat::Json);
        assert_eq!(json, render(&doc, RenderFormat::Json));
        let back: ReportDocument = serde_json::from_str(&json).unwrap();
        assert_eq!(back, doc);
        let text = render(&doc, RenderFormat::Text);
        assert!(text.starts_with("Word report: b"));
        let empty = ReportDocument {
            kind: ReportKind::Global,
            subject: String::new(),
            sections: vec![],
            attachments: vec![],
            metadata: BTreeMap::new(),
        };
        assert!(serde_json::from_str::<ReportDocument>(&render(&empty, RenderFormat::Json)).is_ok());
        assert_eq!(render(&empty, RenderFormat::Text), "Global report: \n");
    }

    #[test]
    fn word_report_attachments() {
        let dir = tempfile::tempdir().unwrap();
        let e = Embedding::from_rows([
            ("nurse", vec![0.6f32, 0.8, 0.0]),
            ("doctor", vec![-0.6, 0.8, 0.0]),
            ("table", vec![0.0, 0.6, 0.8]),
        ])
        .unwrap();
        let g = BiasDirection::from_vector(vec![1.0, 0.0, 0.0]).unwrap();
        let doc = word_report(&e, &g, "nurse", &WordReportOptions::default(), Some(dir.path())).unwrap();
        assert_eq!(doc.attachments.len(), 2);
        assert!(dir.path().join("nurse-neighbors.svg").exists());
        assert!(dir.path().join("nurse-cloud.svg").exists());
        assert_eq!(sanitize("a/b c"), "a_b_c");
        assert_eq!(sanitize(""), "word");
    }
}
