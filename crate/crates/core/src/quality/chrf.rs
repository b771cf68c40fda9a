//! Sentence-level chrF++.
//!
//! Each n-gram order contributes an F-beta score. Character orders run over
//! the text with all whitespace removed; word orders run over whitespace
//! tokens with one leading or trailing ASCII punctuation mark split off.
//! The final score is 100 times the mean F over orders that have at least
//! one reference n-gram.

use std::collections::HashMap;
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use super::QualityError;

const PUNCTUATION: &str = "!\"#$%&'()*+,-./:;<=>?@[\\]^_`{|}~";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChrfParams {
    pub char_n_max: usize,
    pub word_n_max: usize,
    pub beta: f64,
}

impl Default for ChrfParams {
    fn default() -> Self {
        Self { char_n_max: 6, word_n_max: 2, beta: 2.0 }
    }
}

impl ChrfParams {
    pub fn validate(&self) -> Result<(), QualityError> {
        if self.char_n_max < 1 {
            return Err(QualityError::InvalidParams("char_n_max must be >= 1".into()));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(QualityError::InvalidParams(format!(
                "beta must be a positive finite number, got {}",
                self.beta
            )));
        }
        Ok(())
    }

    fn orders(&self) -> usize {
        self.char_n_max + self.word_n_max
    }
}

/// Hypothesis, reference and matched n-gram counts for one order.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderStats {
    pub hyp: u64,
    pub reference: u64,
    pub matched: u64,
}

impl OrderStats {
    fn f_score(&self, beta_sq: f64) -> f64 {
        if self.hyp == 0 || self.matched == 0 {
            return 0.0;
        }
        let precision = self.matched as f64 / self.hyp as f64;
        let recall = self.matched as f64 / self.reference as f64;
        (1.0 + beta_sq) * precision * recall / (beta_sq * precision + recall)
    }
}

/// Word tokens with edge punctuation separated, as in the reference chrF++ tool.
pub fn word_tokens(text: &str) -> Vec<&str> {
    let is_punct = |c: char| PUNCTUATION.contains(c);
    let mut out = Vec::new();
    for word in text.split_whitespace() {
        let mut chars = word.chars();
        let first = chars.next();
        let last = chars.next_back();
        match (first, last) {
            (Some(_), None) => out.push(word),
            (_, Some(l)) if is_punct(l) => {
                let cut = word.len() - l.len_utf8();
                out.push(&word[..cut]);
                out.push(&word[cut..]);
            }
            (Some(f), Some(_)) if is_punct(f) => {
                let cut = f.len_utf8();
                out.push(&word[..cut]);
                out.push(&word[cut..]);
            }
            _ => out.push(word),
        }
    }
    out
}

fn ngram_counts<T: Hash + Eq>(items: &[T], n: usize) -> HashMap<&[T], u64> {
    let mut counts = HashMap::new();
    if n == 0 || items.len() < n {
        return counts;
    }
    for gram in items.windows(n) {
        *counts.entry(gram).or_insert(0) += 1;
    }
    counts
}

fn order_stats<T: Hash + Eq>(hyp: &[T], reference: &[T], n: usize) -> OrderStats {
    let h = ngram_counts(hyp, n);
    let r = ngram_counts(reference, n);
    let matched = h.iter().map(|(gram, &c)| r.get(gram).map_or(0, |&rc| c.min(rc))).sum();
    OrderStats { hyp: h.values().sum(), reference: r.values().sum(), matched }
}

/// Per-order statistics: character orders first, then word orders.
pub fn sentence_stats(hypothesis: &str, reference: &str, params: &ChrfParams) -> Vec<OrderStats> {
    let strip = |s: &str| s.chars().filter(|c| !c.is_whitespace()).collect::<Vec<char>>();
    let (hyp_chars, ref_chars) = (strip(hypothesis), strip(reference));
    let (hyp_words, ref_words) = (word_tokens(hypothesis), word_tokens(reference));
    let mut stats = Vec::with_capacity(params.orders());
    for n in 1..=params.char_n_max {
        stats.push(order_stats(&hyp_chars, &ref_chars, n));
    }
    for n in 1..=params.word_n_max {
        stats.push(order_stats(&hyp_words, &ref_words, n));
    }
    stats
}

/// Combines per-order statistics into a 0-100 score.
///
/// Returns `None` when no order has reference n-grams.
pub fn score_from_stats(stats: &[OrderStats], beta: f64) -> Option<f64> {
    let beta_sq = beta * beta;
    let (sum, orders) =
        stats.iter().filter(|s| s.reference > 0).fold((0.0, 0usize), |(sum, k), s| (sum + s.f_score(beta_sq), k + 1));
    (orders > 0).then(|| 100.0 * sum / orders as f64)
}

/// Scores `hypothesis` against `reference` with chrF++.
pub fn chrfpp(hypothesis: &str, reference: &str, params: &ChrfParams) -> Result<f64, QualityError> {
    params.validate()?;
    if reference.trim().is_empty() {
        return Err(QualityError::EmptyReference);
    }
    let stats = sentence_stats(hypothesis, reference, params);
    score_from_stats(&stats, params.beta).ok_or(QualityError::EmptyReference)
}

/// Corpus-level score from summed per-sentence statistics.
pub fn corpus_chrfpp<'a>(
    pairs: impl IntoIterator<Item = (&'a str, &'a str)>,
    params: &ChrfParams,
) -> Result<f64, QualityError> {
    params.validate()?;
    let mut total = vec![OrderStats::default(); params.orders()];
    for (hyp, reference) in pairs {
        for (acc, s) in total.iter_mut().zip(sentence_stats(hyp, reference, params)) {
            acc.hyp += s.hyp;
            acc.reference += s.reference;
            acc.matched += s.matched;
        }
    }
    score_from_stats(&total, params.beta).ok_or(QualityError::EmptyReference)
}
