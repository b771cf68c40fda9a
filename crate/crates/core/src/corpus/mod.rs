//! Raw text ingestion: normalization, sentence segmentation and the
//! parallel-pair JSONL format.

use std::fmt;
use std::io;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

mod normalize;
mod pairs;
mod segment;

pub use normalize::{normalize, normalize_bytes};
pub use pairs::{
    load_pairs, store_pairs, write_pair, LenientPairs, LoadReport, PairReader, ParallelPair, Strictness,
    DEFAULT_MAX_FAILURE_RATIO,
};
pub use segment::{segment, span_texts, Segmenter, SentenceSpan, DEFAULT_ABBREVIATIONS};

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("invalid UTF-8 at byte offset {offset}")]
    InvalidEncoding { offset: usize },
    #[error("text is empty after normalization")]
    EmptyText,
    #[error("line {line}: invalid UTF-8 at byte offset {offset}")]
    LineEncoding { line: usize, offset: usize },
    #[error("line {line}: malformed JSON: {source}")]
    Json { line: usize, source: serde_json::Error },
    #[error("line {line}: missing required field `{field}`")]
    MissingField { line: usize, field: &'static str },
    #[error("line {line}: field `{field}` is empty")]
    EmptyField { line: usize, field: &'static str },
    #[error("line {line}: field `{field}` = {value} is outside [0, 100]")]
    InvalidScore { line: usize, field: &'static str, value: f64 },
    #[error("unsupported language tag `{0}` (expected `ne` or `en`)")]
    UnknownLang(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl From<crate::jsonl::LineFault> for CorpusError {
    fn from(f: crate::jsonl::LineFault) -> Self {
        match f {
            crate::jsonl::LineFault::Encoding { line, offset } => Self::LineEncoding { line, offset },
            crate::jsonl::LineFault::Io(e) => Self::Io(e),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Lang {
    Ne,
    En,
}

impl Lang {
    pub fn as_str(self) -> &'static str {
        match self {
            Lang::Ne => "ne",
            Lang::En => "en",
        }
    }

    pub fn other(self) -> Lang {
        match self {
            Lang::Ne => Lang::En,
            Lang::En => Lang::Ne,
        }
    }
}

impl fmt::Display for Lang {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Lang {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ne" => Ok(Lang::Ne),
            "en" => Ok(Lang::En),
            other => Err(CorpusError::UnknownLang(other.to_owned())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub lang: Lang,
    pub text: String,
    pub source: String,
}

impl Document {
    /// Builds a document from raw text, normalizing it first.
    pub fn new(
        id: impl Into<String>,
        lang: Lang,
        raw_text: &str,
        source: impl Into<String>,
    ) -> Result<Self, CorpusError> {
        let text = normalize(raw_text);
        if text.is_empty() {
            return Err(CorpusError::EmptyText);
        }
        Ok(Self { id: id.into(), lang, text, source: source.into() })
    }
}
