//! Word embedding storage, lookup and persistence.
//!
//! An [`Embedding`] is an immutable vocabulary plus a dense row-major
//! `V × D` matrix of `f32` values. Three on-disk formats are supported:
//!
//! * text: one `word v1 v2 ... vD` record per line, with an optional
//!   `V D` header line (GloVe and word2vec-text files both load);
//! * word2vec binary: an ASCII `V D\n` header followed by, per word, the
//!   word bytes, a space, `D` little-endian `f32` values and an optional
//!   newline;
//! * vocab + npy: a newline separated `.vocab` file next to a version 1.0
//!   `.npy` array of shape `(V, D)`.
//!
//! Loading never normalizes. Call [`Embedding::normalize`] explicitly; the
//! metrics and debiasers document which form they assume.

mod npy;
pub mod registry;
mod text;
mod word2vec;

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use ndarray::{Array2, ArrayView2, Axis};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use registry::{fetch_pretrained, Registry, RegistryEntry};

/// Tolerance on row norms for an embedding to count as normalized.
pub const NORMALIZED_TOLERANCE: f64 = 1e-5;

#[derive(Debug, Error)]
pub enum EmbeddingError {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("line {line}: {detail}")]
    Parse { line: usize, detail: String },
    #[error("row for {word:?} has {found} components, expected {expected}")]
    RowLength {
        word: String,
        expected: usize,
        found: usize,
    },
    #[error("non-finite value in component {column} of {word:?}")]
    NonFinite { word: String, column: usize },
    #[error("unsupported npy dtype {0:?} (expected little-endian f4 or f8)")]
    NpyDtype(String),
    #[error("invalid npy file: {0}")]
    Npy(String),
    #[error("vocabulary has {vocab} words but the matrix has {rows} rows")]
    ShapeMismatch { vocab: usize, rows: usize },
    #[error("duplicate word {0:?}")]
    DuplicateWord(String),
    #[error("word {0:?} is not in the vocabulary")]
    OutOfVocabulary(String),
    #[error("word {0:?} has a zero vector")]
    ZeroVector(String),
    #[error("cannot infer the embedding format of {0}")]
    UnknownFormat(PathBuf),
    #[error("word {0:?} cannot be written: words must be non-empty and contain no whitespace")]
    InvalidWord(String),
}

pub type Result<T, E = EmbeddingError> = std::result::Result<T, E>;

/// On-disk embedding format.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Auto,
    Text,
    #[serde(rename = "word2vec-bin")]
    Word2VecBin,
    VocabNpy,
}

impl Format {
    /// Infers the format from the file name, `Auto` is never returned.
    pub fn sniff(path: &Path) -> Result<Format> {
        let ext = path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase);
        match ext.as_deref() {
            Some("txt") | Some("vec") => Ok(Format::Text),
            Some("bin") => Ok(Format::Word2VecBin),
            Some("npy") | Some("vocab") => Ok(Format::VocabNpy),
            _ => {
                let (vocab, npy) = vocab_npy_paths(path);
                if vocab.exists() && npy.exists() {
                    Ok(Format::VocabNpy)
                } else {
                    Err(EmbeddingError::UnknownFormat(path.to_path_buf()))
                }
            }
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Format::Auto => "auto",
            Format::Text => "text",
            Format::Word2VecBin => "word2vec-bin",
            Format::VocabNpy => "vocab-npy",
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "auto" => Ok(Format::Auto),
            "text" | "txt" => Ok(Format::Text),
            "word2vec-bin" | "bin" => Ok(Format::Word2VecBin),
            "vocab-npy" | "npy" => Ok(Format::VocabNpy),
            other => Err(format!(
                "unknown format {other:?} (expected auto, text, word2vec-bin or vocab-npy)"
            )),
        }
    }
}

/// The `.vocab` and `.npy` paths belonging to `path`.
///
/// `emb.npy`, `emb.vocab` and `emb` all resolve to the pair
/// `emb.vocab` + `emb.npy`.
pub fn vocab_npy_paths(path: &Path) -> (PathBuf, PathBuf) {
    let ext = path.extension().and_then(|e| e.to_str());
    match ext {
        Some("npy") | Some("vocab") => (path.with_extension("vocab"), path.with_extension("npy")),
        _ => {
            let mut vocab = path.as_os_str().to_owned();
            vocab.push(".vocab");
            let mut npy = path.as_os_str().to_owned();
            npy.push(".npy");
            (PathBuf::from(vocab), PathBuf::from(npy))
        }
    }
}

/// A copy of one embedding row.
#[derive(Clone, Debug, PartialEq)]
pub struct WordVector {
    pub word: String,
    pub values: Vec<f32>,
}

/// Immutable vocabulary + vector matrix.
#[derive(Clone, Debug)]
pub struct Embedding {
    vocab: Vec<String>,
    index: HashMap<String, usize>,
    matrix: Array2<f32>,
    norms: Vec<f64>,
    normalized: bool,
}

impl PartialEq for Embedding {
    fn eq(&self, other: &Self) -> bool {
        self.vocab == other.vocab
            && self.matrix.dim() == other.matrix.dim()
            && self
                .matrix
                .iter()
                .zip(other.matrix.iter())
                .all(|(a, b)| a.to_bits() == b.to_bits())
    }
}

impl Embedding {
    /// Builds an embedding, rejecting duplicate words and non-finite values.
    pub fn new(vocab: Vec<String>, matrix: Array2<f32>) -> Result<Self> {
        if vocab.len() != matrix.nrows() {
            return Err(EmbeddingError::ShapeMismatch {
                vocab: vocab.len(),
                rows: matrix.nrows(),
            });
        }
        let mut index = HashMap::with_capacity(vocab.len());
        for (i, word) in vocab.iter().enumerate() {
            if index.insert(word.clone(), i).is_some() {
                return Err(EmbeddingError::DuplicateWord(word.clone()));
            }
        }
        let matrix = matrix.as_standard_layout().into_owned();
        let mut norms = Vec::with_capacity(vocab.len());
        for (word, row) in vocab.iter().zip(matrix.outer_iter()) {
            if let Some(column) = row.iter().position(|x| !x.is_finite()) {
                return Err(EmbeddingError::NonFinite {
                    word: word.clone(),
                    column,
                });
            }
            norms.push(row.iter().map(|&x| f64::from(x) * f64::from(x)).sum::<f64>().sqrt());
        }
        let normalized = norms.iter().all(|n| (n - 1.0).abs() <= NORMALIZED_TOLERANCE);
        Ok(Embedding {
            vocab,
            index,
            matrix,
            norms,
            normalized,
        })
    }

    /// Builds an embedding from `(word, vector)` rows.
    pub fn from_rows<S, I>(rows: I) -> Result<Self>
    where
        S: Into<String>,
        I: IntoIterator<Item = (S, Vec<f32>)>,
    {
        let mut vocab = Vec::new();
        let mut values = Vec::new();
        let mut dim = None;
        for (word, row) in rows {
            let word = word.into();
            let expected = *dim.get_or_insert(row.len());
            if row.len() != expected {
                return Err(EmbeddingError::RowLength {
                    word,
                    expected,
                    found: row.len(),
                });
            }
            vocab.push(word);
            values.extend(row);
        }
        let dim = dim.unwrap_or(0);
        let matrix = Array2::from_shape_vec((vocab.len(), dim), values).expect("row lengths checked above");
        Embedding::new(vocab, matrix)
    }

    /// An embedding with no words and dimension `dim`.
    pub fn empty(dim: usize) -> Self {
        Embedding::new(Vec::new(), Array2::zeros((0, dim))).expect("empty embedding is valid")
    }

    pub fn len(&self) -> usize {
        self.vocab.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vocab.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn vocab(&self) -> &[String] {
        &self.vocab
    }

    pub fn matrix(&self) -> ArrayView2<'_, f32> {
        self.matrix.view()
    }

    /// True when every row has unit norm (within [`NORMALIZED_TOLERANCE`]).
    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn lookup(&self, word: &str) -> Option<usize> {
        self.index.get(word).copied()
    }

    pub fn contains(&self, word: &str) -> bool {
        self.index.contains_key(word)
    }

    pub fn word(&self, index: usize) -> &str {
        &self.vocab[index]
    }

    /// Row `index` as a contiguous slice.
    pub fn row(&self, index: usize) -> &[f32] {
        self.matrix
            .row(index)
            .to_slice()
            .expect("matrix is kept in standard layout")
    }

    /// Euclidean norm of row `index`, computed in f64 at construction.
    pub fn norm(&self, index: usize) -> f64 {
        self.norms[index]
    }

    /// The row for `word`, or an out-of-vocabulary error naming it.
    pub fn row_of(&self, word: &str) -> Result<&[f32]> {
        self.lookup(word)
            .map(|i| self.row(i))
            .ok_or_else(|| EmbeddingError::OutOfVocabulary(word.to_string()))
    }

    /// Vector lookup.
    pub fn v(&self, word: &str) -> Result<WordVector> {
        Ok(WordVector {
            word: word.to_string(),
            values: self.row_of(word)?.to_vec(),
        })
    }

    /// A copy with every row scaled to unit length.
    pub fn normalize(&self) -> Result<Embedding> {
        let mut matrix = self.matrix.clone();
        for (i, mut row) in matrix.axis_iter_mut(Axis(0)).enumerate() {
            let norm = self.norms[i];
            if norm == 0.0 {
                return Err(EmbeddingError::ZeroVector(self.vocab[i].clone()));
            }
            row.mapv_inplace(|x| (f64::from(x) / norm) as f32);
        }
        Embedding::new(self.vocab.clone(), matrix)
    }

    /// Restricts the embedding to the requested in-vocabulary words, kept in
    /// their original vocabulary order. Returns the skipped OOV words too.
    pub fn subset<S: AsRef<str>>(&self, words: &[S]) -> (Embedding, Vec<String>) {
        let mut keep = HashSet::new();
        let mut skipped = Vec::new();
        for word in words {
            let word = word.as_ref();
            match self.lookup(word) {
                Some(i) => {
                    keep.insert(i);
                }
                None => {
                    if !skipped.iter().any(|s| s == word) {
                        skipped.push(word.to_string());
                    }
                }
            }
        }
        let mut rows: Vec<usize> = keep.into_iter().collect();
        rows.sort_unstable();
        let vocab = rows.iter().map(|&i| self.vocab[i].clone()).collect();
        let matrix = self.matrix.select(Axis(0), &rows);
        let subset = Embedding::new(vocab, matrix).expect("rows of a valid embedding");
        (subset, skipped)
    }

    /// A new embedding sharing this vocabulary with `matrix` as its values.
    pub fn with_matrix(&self, matrix: Array2<f32>) -> Result<Embedding> {
        if matrix.dim() != self.matrix.dim() {
            return Err(EmbeddingError::ShapeMismatch {
                vocab: self.len(),
                rows: matrix.nrows(),
            });
        }
        Embedding::new(self.vocab.clone(), matrix)
    }

    /// Reads an embedding from disk.
    pub fn load(path: impl AsRef<Path>, format: Format) -> Result<Embedding> {
        let path = path.as_ref();
        let format = match format {
            Format::Auto => Format::sniff(path)?,
            other => other,
        };
        match format {
            Format::Text => {
                let reader = BufReader::new(open(path)?);
                text::read(reader).map_err(|e| with_path(e, path))
            }
            Format::Word2VecBin => {
                let mut reader = BufReader::new(open(path)?);
                word2vec::read(&mut reader).map_err(|e| with_path(e, path))
            }
            Format::VocabNpy => {
                let (vocab_path, npy_path) = vocab_npy_paths(path);
                let vocab =
                    text::read_vocab(BufReader::new(open(&vocab_path)?)).map_err(|e| with_path(e, &vocab_path))?;
                let matrix = npy::read(&mut BufReader::new(open(&npy_path)?)).map_err(|e| with_path(e, &npy_path))?;
                assemble(vocab, matrix)
            }
            Format::Auto => unreachable!("resolved above"),
        }
    }

    /// Writes the embedding so that [`Embedding::load`] reproduces it bit-exactly.
    pub fn save(&self, path: impl AsRef<Path>, format: Format) -> Result<()> {
        let path = path.as_ref();
        if let Some(bad) = self
            .vocab
            .iter()
            .find(|w| w.is_empty() || w.chars().any(char::is_whitespace))
        {
            return Err(EmbeddingError::InvalidWord(bad.clone()));
        }
        let format = match format {
            Format::Auto => Format::sniff(path).unwrap_or(Format::Text),
            other => other,
        };
        match format {
            Format::Text => write_file(path, |w| text::write(self, w)),
            Format::Word2VecBin => write_file(path, |w| word2vec::write(self, w)),
            Format::VocabNpy => {
                let (vocab_path, npy_path) = vocab_npy_paths(path);
                write_file(&vocab_path, |w| text::write_vocab(self, w))?;
                write_file(&npy_path, |w| npy::write(self.matrix.view(), w))
            }
            Format::Auto => unreachable!("resolved above"),
        }
    }
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|source| EmbeddingError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write_file<F>(path: &Path, body: F) -> Result<()>
where
    F: FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
{
    let io_err = |source| EmbeddingError::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = File::create(path).map_err(io_err)?;
    let mut writer = BufWriter::new(file);
    body(&mut writer).map_err(io_err)?;
    writer.flush().map_err(io_err)
}

/// Attaches the file path to bare I/O errors raised by the format readers.
fn with_path(err: EmbeddingError, path: &Path) -> EmbeddingError {
    match err {
        EmbeddingError::Io { source, .. } => EmbeddingError::Io {
            path: path.to_path_buf(),
            source,
        },
        other => other,
    }
}

pub(crate) fn io_error(source: std::io::Error) -> EmbeddingError {
    EmbeddingError::Io {
        path: PathBuf::new(),
        source,
    }
}

/// Pairs a vocabulary with matrix rows, dropping duplicate words after the
/// first occurrence.
pub(crate) fn assemble(vocab: Vec<String>, matrix: Array2<f32>) -> Result<Embedding> {
    if vocab.len() != matrix.nrows() {
        return Err(EmbeddingError::ShapeMismatch {
            vocab: vocab.len(),
            rows: matrix.nrows(),
        });
    }
    let mut seen = HashSet::with_capacity(vocab.len());
    let mut keep = Vec::with_capacity(vocab.len());
    for (i, word) in vocab.iter().enumerate() {
        if seen.insert(word.as_str()) {
            keep.push(i);
        } else {
            log::warn!("duplicate word {word:?} at row {i}; keeping the first occurrence");
        }
    }
    if keep.len() == vocab.len() {
        return Embedding::new(vocab, matrix);
    }
    let words = keep.iter().map(|&i| vocab[i].clone()).collect();
    Embedding::new(words, matrix.select(Axis(0), &keep))
}
