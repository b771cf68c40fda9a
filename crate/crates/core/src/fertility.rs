//! Token fertility (tokens per whitespace word) and token-to-word alignment.

use std::collections::BTreeMap;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum FertilityError {
    #[error("token {index} range {start}..{end} lies outside text of {len} chars")]
    OutOfText { index: usize, start: usize, end: usize, len: usize },
    #[error("token {index} range {start}..{end} overlaps the previous token")]
    Overlap { index: usize, start: usize, end: usize },
    #[error("token and offset lists differ in length ({tokens} vs {offsets})")]
    LengthMismatch { tokens: usize, offsets: usize },
    #[error("word {0} is not covered by any token")]
    UncoveredWord(usize),
}

/// Tokens with their char ranges in the source text.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TokenOffsets {
    pub tokens: Vec<String>,
    pub offsets: Vec<(usize, usize)>,
}

impl TokenOffsets {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

// Wire form: [[token, start, end], ...]
impl Serialize for TokenOffsets {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.tokens.iter().zip(&self.offsets).map(|(t, (a, b))| (t, a, b)))
    }
}

impl<'de> Deserialize<'de> for TokenOffsets {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let triples: Vec<(String, usize, usize)> = Vec::deserialize(d)?;
        let (tokens, offsets) = triples.into_iter().map(|(t, a, b)| (t, (a, b))).unzip();
        Ok(Self { tokens, offsets })
    }
}

/// A word and the half-open range of token indices that make it up.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordSpan {
    pub word: String,
    pub tok_start: usize,
    pub tok_end: usize,
}

impl WordSpan {
    pub fn len(&self) -> usize {
        self.tok_end - self.tok_start
    }

    pub fn is_empty(&self) -> bool {
        self.tok_end == self.tok_start
    }
}

/// Char ranges of whitespace-delimited words.
pub fn word_ranges(text: &str) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut start = None;
    let mut n = 0;
    for (i, c) in text.chars().enumerate() {
        match (c.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push((s, i));
                start = None;
            }
            _ => {}
        }
        n = i + 1;
    }
    if let Some(s) = start {
        out.push((s, n));
    }
    out
}

/// Groups tokens into words.
///
/// A token belongs to the word holding its first non-whitespace char. Tokens
/// with no such char (pure whitespace or zero-width, e.g. a BOS marker) join
/// the next word, or the last word if none follows.
pub fn align_tokens_to_words(text: &str, toks: &TokenOffsets) -> Result<Vec<WordSpan>, FertilityError> {
    if toks.tokens.len() != toks.offsets.len() {
        return Err(FertilityError::LengthMismatch { tokens: toks.tokens.len(), offsets: toks.offsets.len() });
    }
    let chars: Vec<char> = text.chars().collect();
    let words = word_ranges(text);
    let mut owner = Vec::with_capacity(toks.len());
    let mut prev_end = 0;
    for (index, &(start, end)) in toks.offsets.iter().enumerate() {
        if start > end || end > chars.len() {
            return Err(FertilityError::OutOfText { index, start, end, len: chars.len() });
        }
        if start < prev_end {
            return Err(FertilityError::Overlap { index, start, end });
        }
        prev_end = end;
        let anchor = (start..end).find(|&i| !chars[i].is_whitespace());
        let word = match anchor {
            Some(pos) => words.partition_point(|&(_, e)| e <= pos),
            None => words.partition_point(|&(_, e)| e <= start).min(words.len().saturating_sub(1)),
        };
        owner.push(word);
    }
    let mut spans: Vec<WordSpan> = Vec::with_capacity(words.len());
    for (w, &(ws, we)) in words.iter().enumerate() {
        let tok_start = spans.last().map_or(0, |s| s.tok_end);
        let tok_end = tok_start + owner[tok_start..].iter().take_while(|&&o| o == w).count();
        if tok_end == tok_start {
            return Err(FertilityError::UncoveredWord(w));
        }
        spans.push(WordSpan { word: chars[ws..we].iter().collect(), tok_start, tok_end });
    }
    if spans.last().map_or(0, |s| s.tok_end) != toks.len() {
        // only reachable when the text has no words but there are tokens
        return Err(FertilityError::UncoveredWord(0));
    }
    Ok(spans)
}

/// Standalone fertility input line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FertilityRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lang: Option<String>,
    pub text: String,
    pub tokens: TokenOffsets,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub tokens: u64,
    pub words: u64,
}

impl Counts {
    pub fn fertility(&self) -> Option<f64> {
        (self.words > 0).then(|| self.tokens as f64 / self.words as f64)
    }

    fn add(&mut self, other: Counts) {
        self.tokens += other.tokens;
        self.words += other.words;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DocFertility {
    pub index: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lang: Option<String>,
    pub tokens: u64,
    pub words: u64,
    pub fertility: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedDoc {
    pub index: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LangFertility {
    pub docs: u64,
    pub tokens: u64,
    pub words: u64,
    pub fertility: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FertilityReport {
    pub documents: Vec<DocFertility>,
    pub skipped: Vec<SkippedDoc>,
    pub total_tokens: u64,
    pub total_words: u64,
    pub fertility: Option<f64>,
    pub by_lang: BTreeMap<String, LangFertility>,
}

/// Running totals; merging accumulators is associative and order-free.
#[derive(Debug, Clone, Default)]
pub struct FertilityAccumulator {
    next_index: usize,
    documents: Vec<DocFertility>,
    skipped: Vec<SkippedDoc>,
    total: Counts,
    by_lang: BTreeMap<String, (u64, Counts)>,
}

impl FertilityAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, record: &FertilityRecord) {
        let index = self.next_index;
        self.next_index += 1;
        let counts = Counts { tokens: record.tokens.len() as u64, words: word_ranges(&record.text).len() as u64 };
        let Some(fertility) = counts.fertility() else {
            self.skipped.push(SkippedDoc { index, reason: "zero_words".into() });
            return;
        };
        self.total.add(counts);
        if let Some(lang) = &record.lang {
            let entry = self.by_lang.entry(lang.clone()).or_default();
            entry.0 += 1;
            entry.1.add(counts);
        }
        self.documents.push(DocFertility {
            index,
            id: record.id.clone(),
            lang: record.lang.clone(),
            tokens: counts.tokens,
            words: counts.words,
            fertility,
        });
    }

    /// Appends another shard; its document indices continue after this one's.
    pub fn merge(&mut self, other: FertilityAccumulator) {
        let shift = self.next_index;
        self.next_index += other.next_index;
        self.documents.extend(other.documents.into_iter().map(|mut d| {
            d.index += shift;
            d
        }));
        self.skipped.extend(other.skipped.into_iter().map(|mut s| {
            s.index += shift;
            s
        }));
        self.total.add(other.total);
        for (lang, (docs, counts)) in other.by_lang {
            let entry = self.by_lang.entry(lang).or_default();
            entry.0 += docs;
            entry.1.add(counts);
        }
    }

    pub fn finish(self) -> FertilityReport {
        FertilityReport {
            documents: self.documents,
            skipped: self.skipped,
            total_tokens: self.total.tokens,
            total_words: self.total.words,
            fertility: self.total.fertility(),
            by_lang: self
                .by_lang
                .into_iter()
                .map(|(lang, (docs, c))| {
                    let fertility = c.fertility().unwrap_or(0.0);
                    (lang, LangFertility { docs, tokens: c.tokens, words: c.words, fertility })
                })
                .collect(),
        }
    }
}

pub fn fertility_stats<'a>(records: impl IntoIterator<Item = &'a FertilityRecord>) -> FertilityReport {
    let mut acc = FertilityAccumulator::new();
    for r in records {
        acc.add(r);
    }
    acc.finish()
}
