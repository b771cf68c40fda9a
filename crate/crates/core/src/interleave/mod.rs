//! Pretraining corpora: translation-task records, alternating-language
//! paragraphs and the manifests that describe them.

mod bilingual;
mod manifest;
mod split;
mod translate;
mod validate;

pub use bilingual::{
    build_bilingual_corpus, interleave_pair, BilingualBuilder, BilingualParagraph, DropReport, LeadPolicy,
};
pub use manifest::{emit_manifest, Stage, TrainingManifest, QUANTIZATION};
pub use split::{sample_in_order, CorpusSplit, STAGE_PAIRS};
pub use translate::{
    make_translation_record, make_translation_records, PromptTemplate, Skipped, TranslationRecord, DEFAULT_TEMPLATE,
    PLACEHOLDER,
};
pub use validate::{check_alternation, classify_script, language_runs, AlternationViolation};

#[derive(Debug, thiserror::Error)]
pub enum InterleaveError {
    #[error("invalid prompt template: {0}")]
    InvalidTemplate(String),
    #[error("unknown lead policy `{0}` (expected alternate, ne or en)")]
    InvalidPolicy(String),
    #[error("unknown stage `{0}`")]
    InvalidStage(String),
    #[error("pair {pair_id} is unaligned: {ne} Nepali vs {en} English sentences")]
    Unaligned { pair_id: String, ne: usize, en: usize },
    #[error("corpus file {path}: {source}")]
    MissingCorpus { path: String, source: std::io::Error },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
