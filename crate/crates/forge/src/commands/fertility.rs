use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use forge_core::fertility::{
    align_tokens_to_words, word_ranges, FertilityAccumulator, FertilityRecord, LangFertility, SkippedDoc,
};
use forge_core::jsonl::write_line;
use serde::Serialize;

use super::intake;
use crate::cli::Leniency;
use crate::config::Config;
use crate::error::CliResult;
use crate::io::{create_output, for_each_record, write_json};

#[derive(Serialize)]
struct Summary {
    documents: usize,
    skipped: Vec<SkippedDoc>,
    total_tokens: u64,
    total_words: u64,
    fertility: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    by_lang: Option<BTreeMap<String, LangFertility>>,
}

pub fn fertility(
    cfg: &Config,
    input: &Path,
    by_lang: bool,
    per_doc: Option<&Path>,
    out: Option<&Path>,
    leniency: &Leniency,
) -> CliResult {
    let mut intake = intake(cfg, leniency)?;
    let mut acc = FertilityAccumulator::new();
    for_each_record(input, &mut intake, |intake, line, record: FertilityRecord| {
        // zero-word documents are reported as skipped by the accumulator
        if !word_ranges(&record.text).is_empty() {
            if let Err(e) = align_tokens_to_words(&record.text, &record.tokens) {
                return intake.reject(format!("line {line}: {e}"));
            }
        }
        intake.accept();
        acc.add(&record);
        Ok(())
    })?;
    let report = acc.finish();
    if let Some(path) = per_doc {
        let mut w = create_output(Some(path))?;
        for d in &report.documents {
            write_line(&mut w, d)?;
        }
        w.flush()?;
    }
    write_json(
        out,
        &Summary {
            documents: report.documents.len(),
            skipped: report.skipped,
            total_tokens: report.total_tokens,
            total_words: report.total_words,
            fertility: report.fertility,
            by_lang: by_lang.then_some(report.by_lang),
        },
    )?;
    intake.finish("fertility")
}
