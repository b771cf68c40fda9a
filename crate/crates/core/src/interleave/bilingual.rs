//! Alternating-language paragraphs for bilingual next-token prediction.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::InterleaveError;
use crate::corpus::{span_texts, Lang, ParallelPair};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LeadPolicy {
    FixedNe,
    FixedEn,
    /// Pair `k` leads with Nepali when `k` is even.
    #[default]
    AlternateByIndex,
}

impl LeadPolicy {
    pub fn lead_for(self, index: usize) -> Lang {
        match self {
            LeadPolicy::FixedNe => Lang::Ne,
            LeadPolicy::FixedEn => Lang::En,
            LeadPolicy::AlternateByIndex if index.is_multiple_of(2) => Lang::Ne,
            LeadPolicy::AlternateByIndex => Lang::En,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            LeadPolicy::FixedNe => "fixed-ne",
            LeadPolicy::FixedEn => "fixed-en",
            LeadPolicy::AlternateByIndex => "alternate-by-index",
        }
    }
}

impl FromStr for LeadPolicy {
    type Err = InterleaveError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ne" | "fixed-ne" => Ok(LeadPolicy::FixedNe),
            "en" | "fixed-en" => Ok(LeadPolicy::FixedEn),
            "alternate" | "alternate-by-index" => Ok(LeadPolicy::AlternateByIndex),
            other => Err(InterleaveError::InvalidPolicy(other.to_owned())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BilingualParagraph {
    pub text: String,
    pub lead_lang: Lang,
    pub pair_id: String,
    #[serde(skip)]
    pub sentence_count: usize,
}

/// Merges an aligned pair into one paragraph whose sentences alternate language.
///
/// Odd positions (1-based) come from `lead`, even positions from the other
/// language, and each aligned index is used exactly once.
pub fn interleave_pair(pair: &ParallelPair, lead: Lang) -> Result<BilingualParagraph, InterleaveError> {
    let (ne, en) = (pair.ne_sentences.len(), pair.en_sentences.len());
    if ne != en || ne == 0 {
        return Err(InterleaveError::Unaligned { pair_id: pair.id.clone(), ne, en });
    }
    let lead_texts = span_texts(pair.text(lead), pair.sentences(lead));
    let other = lead.other();
    let other_texts = span_texts(pair.text(other), pair.sentences(other));
    let mut text = String::with_capacity(pair.ne_text.len() + pair.en_text.len());
    for i in 0..ne {
        if i > 0 {
            text.push(' ');
        }
        text.push_str(if i % 2 == 0 { lead_texts[i] } else { other_texts[i] });
    }
    Ok(BilingualParagraph { text, lead_lang: lead, pair_id: pair.id.clone(), sentence_count: ne })
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DropReport {
    pub total: u64,
    pub emitted: u64,
    pub dropped_unaligned: u64,
}

impl DropReport {
    pub fn merge(&mut self, other: &DropReport) {
        self.total += other.total;
        self.emitted += other.emitted;
        self.dropped_unaligned += other.dropped_unaligned;
    }
}

/// Streaming corpus builder; the lead language is chosen from the input index.
#[derive(Debug, Clone)]
pub struct BilingualBuilder {
    policy: LeadPolicy,
    next_index: usize,
    report: DropReport,
}

impl BilingualBuilder {
    pub fn new(policy: LeadPolicy) -> Self {
        Self::starting_at(policy, 0)
    }

    /// Starts the index count at `offset`, for shards taken from a larger stream.
    pub fn starting_at(policy: LeadPolicy, offset: usize) -> Self {
        Self { policy, next_index: offset, report: DropReport::default() }
    }

    /// Returns the paragraph, or the rejection if the pair was dropped.
    pub fn push(&mut self, pair: &ParallelPair) -> Result<BilingualParagraph, InterleaveError> {
        let lead = self.policy.lead_for(self.next_index);
        self.next_index += 1;
        self.report.total += 1;
        let out = interleave_pair(pair, lead);
        match out {
            Ok(_) => self.report.emitted += 1,
            Err(_) => self.report.dropped_unaligned += 1,
        }
        out
    }

    pub fn report(&self) -> &DropReport {
        &self.report
    }

    pub fn into_report(self) -> DropReport {
        self.report
    }
}

pub fn build_bilingual_corpus<'a>(
    pairs: impl IntoIterator<Item = &'a ParallelPair>,
    policy: LeadPolicy,
) -> (Vec<BilingualParagraph>, DropReport) {
    let mut builder = BilingualBuilder::new(policy);
    let paragraphs = pairs.into_iter().filter_map(|p| builder.push(p).ok()).collect();
    (paragraphs, builder.into_report())
}
