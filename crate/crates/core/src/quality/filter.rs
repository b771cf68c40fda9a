//! Round-trip (backtranslation) quality filter for synthetic instructions.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{chrfpp, ChrfParams, QualityError};
use crate::corpus::normalize;
use crate::jsonl::round4;

/// The cut-off used for the synthetic instruction sets.
pub const DEFAULT_CUTOFF: f64 = 50.0;

/// A translated instruction sample together with its round-trip evidence.
///
/// `original` is the source-language text the sample was translated from and
/// `backtranslation` is the translated sample carried back into that language.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstructionTriplet {
    pub id: String,
    pub instruction: String,
    #[serde(default)]
    pub input: String,
    pub output: String,
    pub original: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub backtranslation: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chrfpp: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiscardReason {
    BelowCutoff,
    MissingBacktranslation,
    EmptyOriginal,
}

impl DiscardReason {
    pub fn code(self) -> &'static str {
        match self {
            DiscardReason::BelowCutoff => "below_cutoff",
            DiscardReason::MissingBacktranslation => "missing_backtranslation",
            DiscardReason::EmptyOriginal => "empty_original",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterReport {
    pub total: u64,
    pub kept: u64,
    pub discarded: u64,
    pub cutoff: f64,
    /// Bin `k` counts scores in `[k, k + 1)`; bin 100 holds exact 100s.
    /// Unscored samples land in bin 0.
    pub score_histogram: Vec<u64>,
    pub discard_reasons: BTreeMap<DiscardReason, u64>,
}

impl FilterReport {
    pub fn new(cutoff: f64) -> Self {
        Self {
            total: 0,
            kept: 0,
            discarded: 0,
            cutoff,
            score_histogram: vec![0; 101],
            discard_reasons: BTreeMap::new(),
        }
    }

    pub fn merge(&mut self, other: &FilterReport) {
        self.total += other.total;
        self.kept += other.kept;
        self.discarded += other.discarded;
        for (a, b) in self.score_histogram.iter_mut().zip(&other.score_histogram) {
            *a += b;
        }
        for (reason, n) in &other.discard_reasons {
            *self.discard_reasons.entry(*reason).or_insert(0) += n;
        }
    }
}

/// Outcome of scoring one triplet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Verdict {
    Keep(f64),
    Discard(DiscardReason, Option<f64>),
}

/// Round-trip score of a triplet, rounded to the serialized precision.
pub fn roundtrip_score(t: &InstructionTriplet, params: &ChrfParams) -> Result<f64, DiscardReason> {
    let bt = t.backtranslation.as_deref().ok_or(DiscardReason::MissingBacktranslation)?;
    let reference = normalize(&t.original);
    if reference.is_empty() {
        return Err(DiscardReason::EmptyOriginal);
    }
    chrfpp(&normalize(bt), &reference, params).map(round4).map_err(|_| DiscardReason::EmptyOriginal)
}

/// Keeps triplets whose round-trip chrF++ is at least the cut-off.
///
/// Scores are computed in parallel; output order follows input order.
#[derive(Debug, Clone)]
pub struct RoundTripFilter {
    cutoff: f64,
    params: ChrfParams,
    report: FilterReport,
}

impl RoundTripFilter {
    pub fn new(cutoff: f64, params: ChrfParams) -> Result<Self, QualityError> {
        if !(0.0..=100.0).contains(&cutoff) {
            return Err(QualityError::InvalidCutoff(cutoff));
        }
        params.validate()?;
        Ok(Self { cutoff, params, report: FilterReport::new(cutoff) })
    }

    pub fn verdict(&self, t: &InstructionTriplet) -> Verdict {
        match roundtrip_score(t, &self.params) {
            Ok(score) if score >= self.cutoff => Verdict::Keep(score),
            Ok(score) => Verdict::Discard(DiscardReason::BelowCutoff, Some(score)),
            Err(reason) => Verdict::Discard(reason, None),
        }
    }

    /// Filters one chunk, updating the running report.
    pub fn process(&mut self, chunk: Vec<InstructionTriplet>) -> Vec<InstructionTriplet> {
        let verdicts: Vec<Verdict> = chunk.par_iter().map(|t| self.verdict(t)).collect();
        let mut kept = Vec::new();
        for (mut t, verdict) in chunk.into_iter().zip(verdicts) {
            self.report.total += 1;
            match verdict {
                Verdict::Keep(score) => {
                    self.report.kept += 1;
                    self.report.score_histogram[score_bin(score)] += 1;
                    t.chrfpp = Some(score);
                    kept.push(t);
                }
                Verdict::Discard(reason, score) => {
                    self.report.discarded += 1;
                    self.report.score_histogram[score.map_or(0, score_bin)] += 1;
                    *self.report.discard_reasons.entry(reason).or_insert(0) += 1;
                }
            }
        }
        kept
    }

    pub fn report(&self) -> &FilterReport {
        &self.report
    }

    pub fn into_report(self) -> FilterReport {
        self.report
    }
}

fn score_bin(score: f64) -> usize {
    (score.floor().max(0.0) as usize).min(100)
}

/// Filters a whole collection at once.
pub fn roundtrip_filter(
    triplets: impl IntoIterator<Item = InstructionTriplet>,
    cutoff: f64,
    params: &ChrfParams,
) -> Result<(Vec<InstructionTriplet>, FilterReport), QualityError> {
    let mut filter = RoundTripFilter::new(cutoff, *params)?;
    let kept = filter.process(triplets.into_iter().collect());
    Ok((kept, filter.into_report()))
}
