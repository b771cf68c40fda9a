use std::io::Write;
use std::path::{Path, PathBuf};

use forge_core::corpus::{span_texts, CorpusError, Document, Lang, PairReader, ParallelPair, Segmenter};
use forge_core::jsonl::write_line;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{intake, segmenter};
use crate::cli::Leniency;
use crate::config::Config;
use crate::error::{CliError, CliResult};
use crate::io::{create_output, for_each_record, open_input, write_json, Intake};

const CHUNK: usize = 4096;

#[derive(Deserialize)]
struct RawDocument {
    id: String,
    text: String,
    #[serde(default)]
    lang: Option<Lang>,
    #[serde(default)]
    source: Option<String>,
}

#[derive(Serialize)]
struct Sentence<'a> {
    index: usize,
    start: usize,
    end: usize,
    text: &'a str,
}

#[derive(Serialize)]
struct Segmented<'a> {
    id: &'a str,
    lang: Lang,
    #[serde(skip_serializing_if = "str::is_empty")]
    source: &'a str,
    text: &'a str,
    sentences: Vec<Sentence<'a>>,
}

fn segment_chunk(
    chunk: &mut Vec<(usize, RawDocument)>,
    lang: Lang,
    seg: &Segmenter,
    intake: &mut Intake,
    out: &mut dyn Write,
) -> CliResult {
    let results: Vec<_> = chunk
        .par_iter()
        .map(|(_, raw)| {
            if let Some(found) = raw.lang.filter(|l| *l != lang) {
                return Err(format!("document {} is tagged {found}, expected {lang}", raw.id));
            }
            let source = raw.source.clone().unwrap_or_default();
            let doc = Document::new(raw.id.clone(), lang, &raw.text, source).map_err(|e| e.to_string())?;
            let spans = seg.segment_doc(&doc).map_err(|e| e.to_string())?;
            Ok((doc, spans))
        })
        .collect();
    for ((line, _), result) in chunk.iter().zip(results) {
        match result {
            Ok((doc, spans)) => {
                intake.accept();
                let texts = span_texts(&doc.text, &spans);
                let sentences = spans
                    .iter()
                    .zip(texts)
                    .map(|(s, text)| Sentence { index: s.index, start: s.start, end: s.end, text })
                    .collect();
                write_line(out, &Segmented { id: &doc.id, lang, source: &doc.source, text: &doc.text, sentences })?;
            }
            Err(e) => intake.reject(format!("line {line}: {e}"))?,
        }
    }
    chunk.clear();
    Ok(())
}

pub fn segment(
    cfg: &Config,
    lang: &str,
    input: &Path,
    out: Option<&Path>,
    stoplist: Option<PathBuf>,
    leniency: &Leniency,
) -> CliResult {
    let lang: Lang = lang.parse().map_err(CliError::validation)?;
    let seg = segmenter(cfg, stoplist)?;
    let mut intake = intake(cfg, leniency)?;
    let mut writer = create_output(out)?;
    let mut chunk = Vec::with_capacity(CHUNK);
    for_each_record(input, &mut intake, |intake, line, raw: RawDocument| {
        chunk.push((line, raw));
        if chunk.len() == CHUNK {
            segment_chunk(&mut chunk, lang, &seg, intake, &mut writer)?;
        }
        Ok(())
    })?;
    segment_chunk(&mut chunk, lang, &seg, &mut intake, &mut writer)?;
    writer.flush()?;
    tracing::info!(documents = intake.total - intake.failed, skipped = intake.failed, "segmented");
    intake.finish("segment")
}

/// Drains a pair reader through `intake`; a fatal problem is kept in `error`.
pub struct PairStream<'a, R> {
    reader: PairReader<R>,
    intake: &'a mut Intake,
    pub error: Option<CliError>,
}

impl<'a, R: std::io::BufRead> PairStream<'a, R> {
    pub fn new(reader: PairReader<R>, intake: &'a mut Intake) -> Self {
        Self { reader, intake, error: None }
    }
}

impl<R: std::io::BufRead> Iterator for PairStream<'_, R> {
    type Item = ParallelPair;

    fn next(&mut self) -> Option<ParallelPair> {
        if self.error.is_some() {
            return None;
        }
        loop {
            match self.reader.next()? {
                Ok(pair) => {
                    self.intake.accept();
                    return Some(pair);
                }
                Err(CorpusError::Io(e)) => {
                    self.error = Some(CliError::io(e));
                    return None;
                }
                Err(e) => {
                    if let Err(fatal) = self.intake.reject(e) {
                        self.error = Some(fatal);
                        return None;
                    }
                }
            }
        }
    }
}

pub fn open_pairs(path: &Path, seg: Segmenter) -> CliResult<PairReader<std::io::BufReader<std::fs::File>>> {
    Ok(PairReader::new(open_input(path)?, seg))
}

#[derive(Serialize)]
struct ValidationSummary<'a> {
    total: usize,
    loaded: usize,
    failed: usize,
    aligned: usize,
    unaligned: usize,
    failure_ratio: f64,
    failures: &'a [String],
}

pub fn validate(cfg: &Config, input: &Path, stoplist: Option<PathBuf>, leniency: &Leniency) -> CliResult {
    let seg = segmenter(cfg, stoplist)?;
    let mut intake = intake(cfg, leniency)?;
    let (mut aligned, mut unaligned) = (0, 0);
    let mut stream = PairStream::new(open_pairs(input, seg)?, &mut intake);
    for pair in stream.by_ref() {
        if pair.is_aligned() {
            aligned += 1;
        } else {
            unaligned += 1;
        }
    }
    if let Some(e) = stream.error.take() {
        return Err(e);
    }
    write_json(
        None,
        &ValidationSummary {
            total: intake.total,
            loaded: intake.total - intake.failed,
            failed: intake.failed,
            aligned,
            unaligned,
            failure_ratio: intake.failure_ratio(),
            failures: &intake.failures,
        },
    )?;
    intake.finish("validate")
}
