//! Streaming reader and writer for the parallel-pair JSONL format.

use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{CorpusError, Lang, Segmenter, SentenceSpan};
use crate::jsonl::{self, Lines};

/// Share of malformed lines above which a lenient load is considered failed.
pub const DEFAULT_MAX_FAILURE_RATIO: f64 = 0.01;

/// Failures kept verbatim in a [`LoadReport`]; the rest are only counted.
const KEPT_FAILURES: usize = 1000;

#[derive(Debug, Clone, PartialEq)]
pub struct ParallelPair {
    pub id: String,
    pub ne_text: String,
    pub en_text: String,
    pub source: String,
    pub ne_sentences: Vec<SentenceSpan>,
    pub en_sentences: Vec<SentenceSpan>,
    pub chrfpp: Option<f64>,
    pub backtranslation: Option<String>,
}

impl ParallelPair {
    /// Builds a pair and segments both sides.
    pub fn new(
        id: impl Into<String>,
        ne_text: impl Into<String>,
        en_text: impl Into<String>,
        source: impl Into<String>,
        segmenter: &Segmenter,
    ) -> Result<Self, CorpusError> {
        let ne_text = ne_text.into();
        let en_text = en_text.into();
        Ok(Self {
            id: id.into(),
            ne_sentences: segmenter.segment(Lang::Ne, &ne_text)?,
            en_sentences: segmenter.segment(Lang::En, &en_text)?,
            ne_text,
            en_text,
            source: source.into(),
            chrfpp: None,
            backtranslation: None,
        })
    }

    pub fn text(&self, lang: Lang) -> &str {
        match lang {
            Lang::Ne => &self.ne_text,
            Lang::En => &self.en_text,
        }
    }

    pub fn sentences(&self, lang: Lang) -> &[SentenceSpan] {
        match lang {
            Lang::Ne => &self.ne_sentences,
            Lang::En => &self.en_sentences,
        }
    }

    pub fn is_aligned(&self) -> bool {
        self.ne_sentences.len() == self.en_sentences.len()
    }
}

#[derive(Deserialize)]
struct RawPair {
    id: Option<String>,
    ne_text: Option<String>,
    en_text: Option<String>,
    source: Option<String>,
    chrfpp: Option<f64>,
    backtranslation: Option<String>,
}

#[derive(Serialize)]
struct PairOut<'a> {
    id: &'a str,
    ne_text: &'a str,
    en_text: &'a str,
    source: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    chrfpp: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    backtranslation: Option<&'a str>,
}

fn parse_pair(line: usize, text: &str, segmenter: &Segmenter) -> Result<ParallelPair, CorpusError> {
    let raw: RawPair = serde_json::from_str(text).map_err(|source| CorpusError::Json { line, source })?;
    let required = |v: Option<String>, field| v.ok_or(CorpusError::MissingField { line, field });
    let id = required(raw.id, "id")?;
    let ne_text = required(raw.ne_text, "ne_text")?;
    let en_text = required(raw.en_text, "en_text")?;
    let source = required(raw.source, "source")?;
    for (field, value) in [("ne_text", &ne_text), ("en_text", &en_text)] {
        if value.trim().is_empty() {
            return Err(CorpusError::EmptyField { line, field });
        }
    }
    if let Some(value) = raw.chrfpp {
        if !(0.0..=100.0).contains(&value) {
            return Err(CorpusError::InvalidScore { line, field: "chrfpp", value });
        }
    }
    let mut pair = ParallelPair::new(id, ne_text, en_text, source, segmenter)?;
    pair.chrfpp = raw.chrfpp;
    pair.backtranslation = raw.backtranslation;
    Ok(pair)
}

/// Strict mode stops at the first malformed line; lenient mode skips it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strictness {
    Strict,
    Lenient,
}

/// Reads parallel pairs one line at a time.
pub struct PairReader<R> {
    lines: Lines<R>,
    segmenter: Segmenter,
}

impl<R: BufRead> PairReader<R> {
    pub fn new(reader: R, segmenter: Segmenter) -> Self {
        Self { lines: Lines::new(reader), segmenter }
    }

    /// Skips malformed lines, collecting them into a [`LoadReport`].
    pub fn lenient(self) -> LenientPairs<R> {
        LenientPairs { inner: self, report: LoadReport::default() }
    }
}

impl<R: BufRead> Iterator for PairReader<R> {
    type Item = Result<ParallelPair, CorpusError>;

    fn next(&mut self) -> Option<Self::Item> {
        let line = match self.lines.next()? {
            Ok(line) => line,
            Err(fault) => return Some(Err(fault.into())),
        };
        Some(parse_pair(line.number, &line.text, &self.segmenter))
    }
}

#[derive(Debug, Default, Serialize)]
pub struct LoadReport {
    pub total: usize,
    pub loaded: usize,
    pub failed: usize,
    pub failures: Vec<String>,
}

impl LoadReport {
    pub fn failure_ratio(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.failed as f64 / self.total as f64
        }
    }

    pub fn exceeds(&self, max_ratio: f64) -> bool {
        self.failure_ratio() > max_ratio
    }

    fn record(&mut self, err: &CorpusError) {
        self.failed += 1;
        if self.failures.len() < KEPT_FAILURES {
            self.failures.push(err.to_string());
        }
    }
}

pub struct LenientPairs<R> {
    inner: PairReader<R>,
    report: LoadReport,
}

impl<R> LenientPairs<R> {
    pub fn report(&self) -> &LoadReport {
        &self.report
    }

    pub fn into_report(self) -> LoadReport {
        self.report
    }
}

impl<R: BufRead> Iterator for LenientPairs<R> {
    type Item = ParallelPair;

    fn next(&mut self) -> Option<ParallelPair> {
        loop {
            let item = self.inner.next()?;
            self.report.total += 1;
            match item {
                Ok(pair) => {
                    self.report.loaded += 1;
                    return Some(pair);
                }
                // I/O failures are not per-line problems; stop the stream.
                Err(CorpusError::Io(e)) => {
                    self.report.record(&CorpusError::Io(e));
                    return None;
                }
                Err(e) => self.report.record(&e),
            }
        }
    }
}

pub fn load_pairs(path: impl AsRef<Path>, segmenter: Segmenter) -> Result<PairReader<BufReader<File>>, CorpusError> {
    Ok(PairReader::new(BufReader::new(File::open(path)?), segmenter))
}

/// Writes one pair in schema key order. Scores are rounded to 4 decimals.
pub fn write_pair<W: Write>(out: &mut W, pair: &ParallelPair) -> io::Result<()> {
    jsonl::write_line(
        out,
        &PairOut {
            id: &pair.id,
            ne_text: &pair.ne_text,
            en_text: &pair.en_text,
            source: &pair.source,
            chrfpp: pair.chrfpp.map(jsonl::round4),
            backtranslation: pair.backtranslation.as_deref(),
        },
    )
}

pub fn store_pairs<'a, W: Write>(out: &mut W, pairs: impl IntoIterator<Item = &'a ParallelPair>) -> io::Result<()> {
    for pair in pairs {
        write_pair(out, pair)?;
    }
    out.flush()
}
