//! Word-list resources: definitional pairs, equalize pairs, gender-specific
//! words, WEAT specifications and SemBias datasets.
//!
//! Bundled resources are compiled into the binary:
//!
//! | name                 | kind        | contents |
//! |----------------------|-------------|----------|
//! | `definitional-pairs` | pair-list   | 10 (female, male) pairs, `(she, he)` first |
//! | `equalize-pairs`     | pair-list   | 47 gendered (female, male) pairs symmetrized by hard debiasing |
//! | `gender-specific`    | word-list   | 205 words whose gender is part of their meaning |
//! | `weat-career-family` | weat-spec   | male/female first names vs career/family attributes |
//! | `sembias-sample`     | sembias-set | 12 hand-written instances for smoke tests |
//!
//! The pair and word lists are lowercased, de-duplicated versions of the
//! lists commonly distributed with hard-debiasing code; the WEAT set is the
//! standard career/family test with lowercased names. The SemBias sample is
//! original to this crate; the published dataset is loaded from a user path.
//!
//! Files on disk use JSON for structured kinds (`[[a, b], ...]`,
//! `{name, X, Y, A, B}`, `[{pairs: [{a, b, label}, ...]}]`) and newline
//! separated UTF-8 for plain word lists.

use std::collections::HashSet;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::embedding::Embedding;
use crate::metrics::{SemBiasInstance, WeatSpec};

/// Version of the bundled resource set; bump when any bundled file changes.
pub const BUNDLED_VERSION: &str = "1";

pub const BUNDLED_NAMES: [&str; 5] = [
    "definitional-pairs",
    "equalize-pairs",
    "gender-specific",
    "weat-career-family",
    "sembias-sample",
];

const DEFINITIONAL_PAIRS: &str = include_str!("../../data/definitional_pairs.json");
const EQUALIZE_PAIRS: &str = include_str!("../../data/equalize_pairs.json");
const GENDER_SPECIFIC: &str = include_str!("../../data/gender_specific.json");
const WEAT_CAREER_FAMILY: &str = include_str!("../../data/weat_career_family.json");
const SEMBIAS_SAMPLE: &str = include_str!("../../data/sembias_sample.json");

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("unknown bundled lexicon {name:?}; available: {}", BUNDLED_NAMES.join(", "))]
    UnknownBundled { name: String },
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{origin}: line {line}, column {column}: {detail}")]
    Schema {
        origin: String,
        line: usize,
        column: usize,
        detail: String,
    },
    #[error("{origin}: {detail}")]
    Invariant { origin: String, detail: String },
}

pub type Result<T, E = LexiconError> = std::result::Result<T, E>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LexiconKind {
    WordList,
    PairList,
    WeatSpec,
    SembiasSet,
}

impl FromStr for LexiconKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "word-list" => Ok(LexiconKind::WordList),
            "pair-list" => Ok(LexiconKind::PairList),
            "weat-spec" => Ok(LexiconKind::WeatSpec),
            "sembias-set" => Ok(LexiconKind::SembiasSet),
            other => Err(format!("unknown lexicon kind {other:?}")),
        }
    }
}

impl fmt::Display for LexiconKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LexiconKind::WordList => "word-list",
            LexiconKind::PairList => "pair-list",
            LexiconKind::WeatSpec => "weat-spec",
            LexiconKind::SembiasSet => "sembias-set",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Payload {
    Words(Vec<String>),
    Pairs(Vec<(String, String)>),
    Weat(WeatSpec),
    SemBias(Vec<SemBiasInstance>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Source {
    Bundled,
    File(PathBuf),
    Memory,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Lexicon {
    pub name: String,
    pub payload: Payload,
    pub source: Source,
    /// `(original, folded)` for every word changed by case folding.
    pub folded: Vec<(String, String)>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LoadOptions {
    /// Lowercase every word. Off by default.
    pub case_fold: bool,
}

impl Lexicon {
    pub fn kind(&self) -> LexiconKind {
        match self.payload {
            Payload::Words(_) => LexiconKind::WordList,
            Payload::Pairs(_) => LexiconKind::PairList,
            Payload::Weat(_) => LexiconKind::WeatSpec,
            Payload::SemBias(_) => LexiconKind::SembiasSet,
        }
    }

    /// Every distinct word in order of first appearance.
    pub fn words(&self) -> Vec<String> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        let mut push = |w: &String| {
            if seen.insert(w.clone()) {
                out.push(w.clone());
            }
        };
        match &self.payload {
            Payload::Words(ws) => ws.iter().for_each(&mut push),
            Payload::Pairs(ps) => ps.iter().for_each(|(a, b)| {
                push(a);
                push(b);
            }),
            Payload::Weat(spec) => spec.words().for_each(&mut push),
            Payload::SemBias(set) => set.iter().flat_map(|i| i.words()).for_each(&mut push),
        }
        out
    }

    pub fn as_words(&self) -> Option<&[String]> {
        match &self.payload {
            Payload::Words(w) => Some(w),
            _ => None,
        }
    }

    pub fn as_pairs(&self) -> Option<&[(String, String)]> {
        match &self.payload {
            Payload::Pairs(p) => Some(p),
            _ => None,
        }
    }

    pub fn as_weat(&self) -> Option<&WeatSpec> {
        match &self.payload {
            Payload::Weat(w) => Some(w),
            _ => None,
        }
    }

    pub fn as_sembias(&self) -> Option<&[SemBiasInstance]> {
        match &self.payload {
            Payload::SemBias(s) => Some(s),
            _ => None,
        }
    }

    /// Checks the per-kind invariants.
    pub fn validate(&self) -> Result<()> {
        let fail = |detail: String| LexiconError::Invariant {
            origin: self.name.clone(),
            detail,
        };
        match &self.payload {
            Payload::Words(words) => {
                if let Some(i) = words.iter().position(|w| w.is_empty()) {
                    return Err(fail(format!("entry {} is an empty word", i + 1)));
                }
            }
            Payload::Pairs(pairs) => {
                for (i, (a, b)) in pairs.iter().enumerate() {
                    if a.is_empty() || b.is_empty() {
                        return Err(fail(format!("pair {} has an empty word", i + 1)));
                    }
                    if a == b {
                        return Err(fail(format!("pair {} repeats {a:?}", i + 1)));
                    }
                }
            }
            Payload::Weat(spec) => {
                spec.validate().map_err(|e| fail(e.to_string()))?;
                spec.check_disjoint().map_err(|e| fail(e.to_string()))?;
            }
            Payload::SemBias(set) => {
                for (i, instance) in set.iter().enumerate() {
                    instance
                        .validate()
                        .map_err(|e| fail(format!("instance {}: {e}", i + 1)))?;
                }
            }
        }
        Ok(())
    }

    /// The file representation read back by [`load_lexicon`].
    pub fn serialize(&self) -> String {
        match &self.payload {
            Payload::Words(words) => {
                let mut out = String::new();
                for w in words {
                    out.push_str(w);
                    out.push('\n');
                }
                out
            }
            Payload::Pairs(p) => to_json(p),
            Payload::Weat(w) => to_json(w),
            Payload::SemBias(s) => to_json(s),
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("lexicon payloads serialize");
    s.push('\n');
    s
}

fn schema_error(origin: &str, err: serde_json::Error) -> LexiconError {
    LexiconError::Schema {
        origin: origin.to_string(),
        line: err.line(),
        column: err.column(),
        detail: err.to_string(),
    }
}

/// Parses lexicon text of the given kind and validates it.
pub fn parse_lexicon(
    text: &str,
    kind: LexiconKind,
    name: &str,
    source: Source,
    options: LoadOptions,
) -> Result<Lexicon> {
    let payload = match kind {
        LexiconKind::WordList => {
            let mut words = Vec::new();
            for (i, line) in text.lines().enumerate() {
                let word = line.trim();
                if word.is_empty() {
                    continue;
                }
                if word.contains(char::is_whitespace) {
                    return Err(LexiconError::Schema {
                        origin: name.to_string(),
                        line: i + 1,
                        column: 1,
                        detail: format!("{word:?} contains whitespace; expected one word per line"),
                    });
                }
                words.push(word.to_string());
            }
            Payload::Words(words)
        }
        LexiconKind::PairList => Payload::Pairs(serde_json::from_str(text).map_err(|e| schema_error(name, e))?),
        LexiconKind::WeatSpec => Payload::Weat(serde_json::from_str(text).map_err(|e| schema_error(name, e))?),
        LexiconKind::SembiasSet => Payload::SemBias(serde_json::from_str(text).map_err(|e| schema_error(name, e))?),
    };
    let mut lexicon = Lexicon {
        name: name.to_string(),
        payload,
        source,
        folded: Vec::new(),
    };
    if options.case_fold {
        lexicon.fold_case();
    }
    lexicon.validate()?;
    Ok(lexicon)
}

impl Lexicon {
    fn fold_case(&mut self) {
        let mut folded = Vec::new();
        let mut fold = |w: &mut String| {
            let lower = w.to_lowercase();
            if lower != *w {
                folded.push((w.clone(), lower.clone()));
                *w = lower;
            }
        };
        match &mut self.payload {
            Payload::Words(ws) => ws.iter_mut().for_each(&mut fold),
            Payload::Pairs(ps) => ps.iter_mut().for_each(|(a, b)| {
                fold(a);
                fold(b);
            }),
            Payload::Weat(spec) => spec.words_mut().for_each(&mut fold),
            Payload::SemBias(set) => set.iter_mut().flat_map(|i| i.pairs.iter_mut()).for_each(|p| {
                fold(&mut p.a);
                fold(&mut p.b);
            }),
        }
        self.folded = folded;
    }
}

/// Reads and validates a lexicon file.
pub fn load_lexicon(path: &Path, kind: LexiconKind, options: LoadOptions) -> Result<Lexicon> {
    let text = std::fs::read_to_string(path).map_err(|source| LexiconError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let name = path.display().to_string();
    parse_lexicon(&text, kind, &name, Source::File(path.to_path_buf()), options)
}

/// One of the compiled-in resources listed in [`BUNDLED_NAMES`].
pub fn bundled(name: &str) -> Result<Lexicon> {
    let (text, kind) = match name {
        "definitional-pairs" => (DEFINITIONAL_PAIRS, LexiconKind::PairList),
        "equalize-pairs" => (EQUALIZE_PAIRS, LexiconKind::PairList),
        "weat-career-family" => (WEAT_CAREER_FAMILY, LexiconKind::WeatSpec),
        "sembias-sample" => (SEMBIAS_SAMPLE, LexiconKind::SembiasSet),
        "gender-specific" => {
            let words: Vec<String> = serde_json::from_str(GENDER_SPECIFIC).map_err(|e| schema_error(name, e))?;
            let lexicon = Lexicon {
                name: name.to_string(),
                payload: Payload::Words(words),
                source: Source::Bundled,
                folded: Vec::new(),
            };
            lexicon.validate()?;
            return Ok(lexicon);
        }
        _ => return Err(LexiconError::UnknownBundled { name: name.to_string() }),
    };
    parse_lexicon(text, kind, name, Source::Bundled, LoadOptions::default())
}

/// Raw bytes of a bundled resource, for hashing.
pub fn bundled_bytes(name: &str) -> Option<&'static [u8]> {
    let text = match name {
        "definitional-pairs" => DEFINITIONAL_PAIRS,
        "equalize-pairs" => EQUALIZE_PAIRS,
        "gender-specific" => GENDER_SPECIFIC,
        "weat-career-family" => WEAT_CAREER_FAMILY,
        "sembias-sample" => SEMBIAS_SAMPLE,
        _ => return None,
    };
    Some(text.as_bytes())
}

fn bundled_pairs(name: &str) -> Vec<(String, String)> {
    bundled(name)
        .ok()
        .and_then(|l| l.as_pairs().map(<[_]>::to_vec))
        .expect("bundled pair list is valid")
}

/// The 10 standard (female, male) definitional pairs.
pub fn definitional_pairs() -> Vec<(String, String)> {
    bundled_pairs("definitional-pairs")
}

pub fn equalize_pairs() -> Vec<(String, String)> {
    bundled_pairs("equalize-pairs")
}

pub fn gender_specific() -> Vec<String> {
    bundled("gender-specific")
        .ok()
        .and_then(|l| l.as_words().map(<[_]>::to_vec))
        .expect("bundled word list is valid")
}

pub fn weat_career_family() -> WeatSpec {
    bundled("weat-career-family")
        .ok()
        .and_then(|l| l.as_weat().cloned())
        .expect("bundled WEAT spec is valid")
}

pub fn sembias_sample() -> Vec<SemBiasInstance> {
    bundled("sembias-sample")
        .ok()
        .and_then(|l| l.as_sembias().map(<[_]>::to_vec))
        .expect("bundled SemBias sample is valid")
}

/// Partition of a lexicon's distinct words by vocabulary membership.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Coverage {
    pub in_vocab: Vec<String>,
    pub oov: Vec<String>,
}

impl Coverage {
    pub fn total(&self) -> usize {
        self.in_vocab.len() + self.oov.len()
    }
}

pub fn coverage(lexicon: &Lexicon, e: &Embedding) -> Coverage {
    let (in_vocab, oov) = lexicon.words().into_iter().partition(|w| e.contains(w));
    Coverage { in_vocab, oov }
}
