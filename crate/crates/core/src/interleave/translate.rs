//! English-to-Nepali translation-task records.

use serde::{Deserialize, Serialize};

use super::InterleaveError;
use crate::corpus::ParallelPair;

pub const PLACEHOLDER: &str = "{src}";

pub const DEFAULT_TEMPLATE: &str = "Translate the following English text to Nepali.\n\nEnglish:\n{src}\n\nNepali:\n";

/// A prompt template with exactly one `{src}` placeholder.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptTemplate {
    head: String,
    tail: String,
}

impl PromptTemplate {
    pub fn parse(template: &str) -> Result<Self, InterleaveError> {
        let n = template.matches(PLACEHOLDER).count();
        if n != 1 {
            return Err(InterleaveError::InvalidTemplate(format!(
                "expected exactly one {PLACEHOLDER} placeholder, found {n}"
            )));
        }
        let (head, tail) = template.split_once(PLACEHOLDER).expect("counted above");
        Ok(Self { head: head.to_owned(), tail: tail.to_owned() })
    }

    pub fn render(&self, source: &str) -> String {
        let mut out = String::with_capacity(self.head.len() + source.len() + self.tail.len());
        out.push_str(&self.head);
        out.push_str(source);
        out.push_str(&self.tail);
        out
    }
}

impl Default for PromptTemplate {
    fn default() -> Self {
        Self::parse(DEFAULT_TEMPLATE).expect("default template is valid")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranslationRecord {
    pub prompt: String,
    pub target: String,
    pub pair_id: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Skipped {
    pub pair_id: String,
    pub reason: &'static str,
}

/// The synthetic English side goes in the prompt; the organic Nepali side is the target.
pub fn make_translation_record(pair: &ParallelPair, template: &PromptTemplate) -> Result<TranslationRecord, Skipped> {
    if pair.en_text.trim().is_empty() || pair.ne_text.trim().is_empty() {
        return Err(Skipped { pair_id: pair.id.clone(), reason: "empty_side" });
    }
    Ok(TranslationRecord {
        prompt: template.render(&pair.en_text),
        target: pair.ne_text.clone(),
        pair_id: pair.id.clone(),
    })
}

pub fn make_translation_records<'t, I>(
    pairs: I,
    template: &'t PromptTemplate,
) -> impl Iterator<Item = Result<TranslationRecord, Skipped>> + 't
where
    I: IntoIterator<Item = ParallelPair>,
    I::IntoIter: 't,
{
    pairs.into_iter().map(move |p| make_translation_record(&p, template))
}
