//! chrF++ scoring and the backtranslation round-trip filter.

mod chrf;
mod filter;

pub use chrf::{chrfpp, corpus_chrfpp, score_from_stats, sentence_stats, word_tokens, ChrfParams, OrderStats};
pub use filter::{
    roundtrip_filter, roundtrip_score, DiscardReason, FilterReport, InstructionTriplet, RoundTripFilter, Verdict,
    DEFAULT_CUTOFF,
};

#[derive(Debug, thiserror::Error)]
pub enum QualityError {
    #[error("invalid chrF parameters: {0}")]
    InvalidParams(String),
    #[error("reference is empty")]
    EmptyReference,
    #[error("cut-off {0} is outside [0, 100]")]
    InvalidCutoff(f64),
}
