//! Rule-based sentence segmentation for Nepali (Devanagari) and English.

use std::collections::HashSet;
use std::path::Path;

use super::{CorpusError, Document, Lang};

/// Abbreviations that never end an English sentence.
pub const DEFAULT_ABBREVIATIONS: &[&str] = &["Dr.", "Mr.", "Mrs.", "Ms.", "St.", "etc.", "e.g.", "i.e."];

const CLOSERS: &[char] = &['"', '\'', ')', ']', '}', '\u{201d}', '\u{2019}', '\u{bb}'];
const OPENERS: &[char] = &['"', '\'', '(', '[', '{', '\u{201c}', '\u{2018}', '\u{ab}'];

/// A sentence as a half-open range of char offsets into its document.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct SentenceSpan {
    pub start: usize,
    pub end: usize,
    pub index: usize,
}

impl SentenceSpan {
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }
}

fn is_terminator(lang: Lang, c: char) -> bool {
    match lang {
        Lang::Ne => matches!(c, '\u{964}' | '\u{965}' | '?' | '!' | '.'),
        Lang::En => matches!(c, '.' | '?' | '!'),
    }
}

#[derive(Debug, Clone)]
pub struct Segmenter {
    abbreviations: HashSet<String>,
}

impl Default for Segmenter {
    fn default() -> Self {
        Self::new(DEFAULT_ABBREVIATIONS.iter().map(|s| s.to_string()))
    }
}

impl Segmenter {
    pub fn new(abbreviations: impl IntoIterator<Item = String>) -> Self {
        Self { abbreviations: abbreviations.into_iter().collect() }
    }

    /// Parses a stop-list: one abbreviation per line, `#` starts a comment.
    pub fn from_stoplist(text: &str) -> Self {
        Self::new(
            text.lines().map(|l| l.split('#').next().unwrap_or("").trim()).filter(|l| !l.is_empty()).map(str::to_owned),
        )
    }

    pub fn load_stoplist(path: impl AsRef<Path>) -> Result<Self, CorpusError> {
        Ok(Self::from_stoplist(&std::fs::read_to_string(path)?))
    }

    pub fn is_abbreviation(&self, token: &str) -> bool {
        self.abbreviations.contains(token)
    }

    pub fn segment_doc(&self, doc: &Document) -> Result<Vec<SentenceSpan>, CorpusError> {
        self.segment(doc.lang, &doc.text)
    }

    /// Splits `text` into sentence spans.
    ///
    /// A sentence ends after a run of terminators (plus any closing quotes or
    /// brackets) that is followed by whitespace or the end of the text. For
    /// English, a lone `.` ending a stop-listed token does not end a sentence.
    pub fn segment(&self, lang: Lang, text: &str) -> Result<Vec<SentenceSpan>, CorpusError> {
        let chars: Vec<char> = text.chars().collect();
        if chars.iter().all(|c| c.is_whitespace()) {
            return Err(CorpusError::EmptyText);
        }
        let n = chars.len();
        let mut spans = Vec::new();
        let mut start: Option<usize> = None;
        let mut i = 0;
        while i < n {
            let c = chars[i];
            let s = match start {
                Some(s) => s,
                None if c.is_whitespace() => {
                    i += 1;
                    continue;
                }
                None => *start.insert(i),
            };
            if !is_terminator(lang, c) {
                i += 1;
                continue;
            }
            let mut j = i + 1;
            while j < n && is_terminator(lang, chars[j]) {
                j += 1;
            }
            while j < n && CLOSERS.contains(&chars[j]) {
                j += 1;
            }
            let at_boundary = j == n || chars[j].is_whitespace();
            let lone_dot = c == '.' && (i + 1 == n || !is_terminator(lang, chars[i + 1]));
            let abbreviated = lang == Lang::En && lone_dot && self.abbreviation_before(&chars, s, i);
            if at_boundary && !abbreviated {
                spans.push(SentenceSpan { start: s, end: j, index: spans.len() });
                start = None;
            }
            i = j;
        }
        if let Some(s) = start {
            let end = chars.iter().rposition(|c| !c.is_whitespace()).map_or(n, |p| p + 1);
            spans.push(SentenceSpan { start: s, end, index: spans.len() });
        }
        Ok(spans)
    }

    fn abbreviation_before(&self, chars: &[char], sentence_start: usize, dot: usize) -> bool {
        let mut tok_start = dot;
        while tok_start > sentence_start && !chars[tok_start - 1].is_whitespace() {
            tok_start -= 1;
        }
        while tok_start < dot && OPENERS.contains(&chars[tok_start]) {
            tok_start += 1;
        }
        let token: String = chars[tok_start..=dot].iter().collect();
        self.is_abbreviation(&token)
    }
}

/// Segments a document with the default English stop-list.
pub fn segment(doc: &Document) -> Result<Vec<SentenceSpan>, CorpusError> {
    Segmenter::default().segment_doc(doc)
}

/// Resolves char-offset spans to string slices of `text`.
pub fn span_texts<'a>(text: &'a str, spans: &[SentenceSpan]) -> Vec<&'a str> {
    let mut byte_at: Vec<usize> = text.char_indices().map(|(b, _)| b).collect();
    byte_at.push(text.len());
    spans.iter().map(|s| &text[byte_at[s.start]..byte_at[s.end]]).collect()
}
