//! Script-based check that a bilingual paragraph really alternates language.
//!
//! This deliberately does not reuse the segmenter: it re-splits the text at
//! any terminator followed by whitespace, labels each piece by the majority
//! script of its letters, and merges neighbouring pieces with the same label.
//! A correctly interleaved paragraph of `n` sentences yields exactly `n`
//! alternating runs starting with the lead language.

use crate::corpus::Lang;

fn is_devanagari(c: char) -> bool {
    matches!(c, '\u{900}'..='\u{97f}' | '\u{a8e0}'..='\u{a8ff}')
}

fn is_latin(c: char) -> bool {
    c.is_ascii_alphabetic() || matches!(c, '\u{c0}'..='\u{24f}')
}

/// Labels text by the majority script of its letters; `None` on a tie.
pub fn classify_script(text: &str) -> Option<Lang> {
    let (mut deva, mut latin) = (0usize, 0usize);
    for c in text.chars() {
        if is_devanagari(c) {
            // digits and danda sit in the block but are not letters
            if !matches!(c, '\u{964}'..='\u{96f}') {
                deva += 1;
            }
        } else if is_latin(c) {
            latin += 1;
        }
    }
    match deva.cmp(&latin) {
        std::cmp::Ordering::Greater => Some(Lang::Ne),
        std::cmp::Ordering::Less => Some(Lang::En),
        std::cmp::Ordering::Equal => None,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlternationViolation {
    #[error("paragraph starts in {found}, expected {expected}")]
    WrongLead { expected: Lang, found: Lang },
    #[error("expected {expected} alternating sentences, found {found} language runs")]
    RunCount { expected: usize, found: usize },
    #[error("paragraph has no classifiable text")]
    Unclassified,
}

fn pieces(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut start = 0;
    let mut prev_terminal = false;
    for (i, c) in text.char_indices() {
        if c.is_whitespace() && prev_terminal {
            out.push(&text[start..i]);
            start = i;
        }
        prev_terminal = matches!(c, '.' | '?' | '!' | '\u{964}' | '\u{965}')
            || (prev_terminal && matches!(c, '"' | '\'' | ')' | ']' | '\u{201d}' | '\u{2019}'));
    }
    out.push(&text[start..]);
    out
}

/// Language runs of a paragraph, in order.
pub fn language_runs(text: &str) -> Vec<Lang> {
    let mut runs: Vec<Lang> = Vec::new();
    for piece in pieces(text) {
        if let Some(lang) = classify_script(piece) {
            if runs.last() != Some(&lang) {
                runs.push(lang);
            }
        }
    }
    runs
}

pub fn check_alternation(text: &str, lead: Lang, expected_sentences: usize) -> Result<(), AlternationViolation> {
    let runs = language_runs(text);
    let first = *runs.first().ok_or(AlternationViolation::Unclassified)?;
    if first != lead {
        return Err(AlternationViolation::WrongLead { expected: lead, found: first });
    }
    if runs.len() != expected_sentences {
        return Err(AlternationViolation::RunCount { expected: expected_sentences, found: runs.len() });
    }
    Ok(())
}
