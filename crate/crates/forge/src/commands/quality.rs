use std::fs;
use std::io::Write;
use std::path::Path;

use forge_core::corpus::normalize;
use forge_core::jsonl::{round4, write_line};
use forge_core::quality::{chrfpp, corpus_chrfpp, ChrfParams, InstructionTriplet, RoundTripFilter, DEFAULT_CUTOFF};
use rayon::prelude::*;
use serde::Serialize;

use super::intake;
use crate::cli::Leniency;
use crate::config::Config;
use crate::error::{CliError, CliResult};
use crate::io::{create_output, for_each_record, write_json};

const CHUNK: usize = 8192;

fn params(cfg: &Config, (char_n, word_n, beta): (Option<usize>, Option<usize>, Option<f64>)) -> CliResult<ChrfParams> {
    let d = ChrfParams::default();
    let p = ChrfParams {
        char_n_max: cfg.pick(char_n, "chrf.char_n", d.char_n_max)?,
        word_n_max: cfg.pick(word_n, "chrf.word_n", d.word_n_max)?,
        beta: cfg.pick(beta, "chrf.beta", d.beta)?,
    };
    p.validate()?;
    Ok(p)
}

/// Lines of a UTF-8 text file, blank lines included.
fn text_lines(path: &Path) -> CliResult<Vec<String>> {
    let bytes = fs::read(path).map_err(|e| CliError::io(format!("cannot read {}: {e}", path.display())))?;
    let text = String::from_utf8(bytes).map_err(|e| {
        CliError::validation(format!(
            "{}: invalid UTF-8 at byte offset {}",
            path.display(),
            e.utf8_error().valid_up_to()
        ))
    })?;
    Ok(text.lines().map(normalize).collect())
}

#[derive(Serialize)]
struct ChrfOutput {
    segments: usize,
    chrfpp: f64,
    sentences: Vec<Option<f64>>,
}

pub fn chrf(
    cfg: &Config,
    hyp: &Path,
    reference: &Path,
    overrides: (Option<usize>, Option<usize>, Option<f64>),
    out: Option<&Path>,
) -> CliResult {
    let p = params(cfg, overrides)?;
    let hyps = text_lines(hyp)?;
    let refs = text_lines(reference)?;
    if hyps.len() != refs.len() {
        return Err(CliError::validation(format!(
            "{} hypothesis lines but {} reference lines",
            hyps.len(),
            refs.len()
        )));
    }
    let sentences: Vec<Option<f64>> =
        hyps.par_iter().zip(refs.par_iter()).map(|(h, r)| chrfpp(h, r, &p).ok().map(round4)).collect();
    let corpus = corpus_chrfpp(hyps.iter().map(String::as_str).zip(refs.iter().map(String::as_str)), &p)?;
    write_json(out, &ChrfOutput { segments: hyps.len(), chrfpp: round4(corpus), sentences })
}

pub fn filter(
    cfg: &Config,
    input: &Path,
    cutoff: Option<f64>,
    out: Option<&Path>,
    report: Option<&Path>,
    leniency: &Leniency,
) -> CliResult {
    let cutoff = cfg.pick(cutoff, "filter.cutoff", DEFAULT_CUTOFF)?;
    let mut filter = RoundTripFilter::new(cutoff, params(cfg, (None, None, None))?)?;
    let mut intake = intake(cfg, leniency)?;
    let mut writer = create_output(out)?;
    let mut chunk = Vec::with_capacity(CHUNK);
    let flush = |filter: &mut RoundTripFilter, chunk: &mut Vec<InstructionTriplet>, w: &mut dyn Write| -> CliResult {
        for t in filter.process(std::mem::take(chunk)) {
            write_line(w, &t)?;
        }
        Ok(())
    };
    for_each_record(input, &mut intake, |intake, _, t: InstructionTriplet| {
        intake.accept();
        chunk.push(t);
        if chunk.len() == CHUNK {
            flush(&mut filter, &mut chunk, &mut writer)?;
        }
        Ok(())
    })?;
    flush(&mut filter, &mut chunk, &mut writer)?;
    writer.flush()?;
    let r = filter.into_report();
    tracing::info!(total = r.total, kept = r.kept, discarded = r.discarded, cutoff, "filtered");
    if let Some(path) = report {
        write_json(Some(path), &r)?;
    }
    intake.finish("filter")
}
