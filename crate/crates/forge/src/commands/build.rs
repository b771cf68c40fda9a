use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use forge_core::corpus::ParallelPair;
use forge_core::interleave::{
    emit_manifest, make_translation_record, sample_in_order, BilingualBuilder, InterleaveError, LeadPolicy,
    PromptTemplate, Stage, STAGE_PAIRS,
};
use forge_core::jsonl::write_line;

use super::corpus::{open_pairs, PairStream};
use super::{intake, segmenter};
use crate::cli::{Leniency, Selection};
use crate::config::Config;
use crate::error::{CliError, CliResult};
use crate::io::{create_output, write_json, Intake};

#[derive(Clone, Copy)]
enum Part {
    Translate,
    Bilingual,
}

struct Window {
    offset: usize,
    limit: usize,
    sample: Option<usize>,
    seed: u64,
}

impl Window {
    fn resolve(cfg: &Config, sel: &Selection, part: Part) -> CliResult<Self> {
        let stage_pairs = cfg.pick(None, "split.stage_pairs", STAGE_PAIRS)?;
        let (key, default_offset) = match part {
            Part::Translate => ("split.translate_offset", 0),
            Part::Bilingual => ("split.bilingual_offset", stage_pairs),
        };
        Ok(Self {
            offset: cfg.pick(sel.offset, key, default_offset)?,
            limit: sel.limit.unwrap_or(stage_pairs),
            sample: sel.sample,
            seed: cfg.pick(sel.seed, "seed", 0)?,
        })
    }

    /// Feeds the selected pairs to `f`, in input order.
    fn apply(
        &self,
        input: &Path,
        cfg: &Config,
        stoplist: Option<PathBuf>,
        intake: &mut Intake,
        mut f: impl FnMut(ParallelPair) -> CliResult,
    ) -> CliResult {
        let mut stream = PairStream::new(open_pairs(input, segmenter(cfg, stoplist)?)?, intake);
        let mut seen = 0usize;
        let mut window = stream.by_ref().inspect(|_| seen += 1).skip(self.offset).take(self.limit);
        match self.sample {
            Some(k) => sample_in_order(window, k, self.seed).into_iter().try_for_each(&mut f)?,
            None => window.try_for_each(&mut f)?,
        }
        if let Some(e) = stream.error.take() {
            return Err(e);
        }
        if seen <= self.offset && self.offset > 0 {
            tracing::warn!(offset = self.offset, pairs = seen, "input ends before the selected offset");
        }
        Ok(())
    }
}

fn template(cfg: &Config, flag: Option<PathBuf>) -> CliResult<PromptTemplate> {
    match cfg.pick_path(flag, "template") {
        Some(path) => {
            let text = fs::read_to_string(&path)
                .map_err(|e| CliError::io(format!("cannot read template {}: {e}", path.display())))?;
            Ok(PromptTemplate::parse(&text)?)
        }
        None => Ok(PromptTemplate::default()),
    }
}

pub fn make_translate(
    cfg: &Config,
    input: &Path,
    out: Option<&Path>,
    template_flag: Option<PathBuf>,
    stoplist: Option<PathBuf>,
    selection: &Selection,
    leniency: &Leniency,
) -> CliResult {
    let template = template(cfg, template_flag)?;
    let window = Window::resolve(cfg, selection, Part::Translate)?;
    let mut intake = intake(cfg, leniency)?;
    let mut writer = create_output(out)?;
    let (mut written, mut skipped) = (0u64, 0u64);
    window.apply(input, cfg, stoplist, &mut intake, |pair| {
        match make_translation_record(&pair, &template) {
            Ok(record) => {
                write_line(&mut writer, &record)?;
                written += 1;
            }
            Err(s) => {
                tracing::warn!(pair_id = %s.pair_id, reason = s.reason, "skipped pair");
                skipped += 1;
            }
        }
        Ok(())
    })?;
    writer.flush()?;
    tracing::info!(records = written, skipped, "translation records written");
    intake.finish("make-translate")
}

fn lead_policy(cfg: &Config, flag: Option<String>) -> CliResult<LeadPolicy> {
    Ok(cfg.pick(flag, "lead", "alternate".to_owned())?.parse::<LeadPolicy>()?)
}

#[allow(clippy::too_many_arguments)]
pub fn make_bilingual(
    cfg: &Config,
    input: &Path,
    out: Option<&Path>,
    lead: Option<String>,
    report: Option<&Path>,
    stoplist: Option<PathBuf>,
    selection: &Selection,
    leniency: &Leniency,
) -> CliResult {
    let policy = lead_policy(cfg, lead)?;
    let window = Window::resolve(cfg, selection, Part::Bilingual)?;
    let mut intake = intake(cfg, leniency)?;
    let mut writer = create_output(out)?;
    let mut builder = BilingualBuilder::starting_at(policy, window.offset);
    window.apply(input, cfg, stoplist, &mut intake, |pair| {
        match builder.push(&pair) {
            Ok(paragraph) => write_line(&mut writer, &paragraph)?,
            Err(InterleaveError::Unaligned { pair_id, ne, en }) => {
                tracing::info!(pair_id = %pair_id, reason = "unaligned", ne, en, "dropped pair");
            }
            Err(e) => return Err(e.into()),
        }
        Ok(())
    })?;
    writer.flush()?;
    let drops = builder.into_report();
    tracing::info!(
        total = drops.total,
        emitted = drops.emitted,
        dropped_unaligned = drops.dropped_unaligned,
        lead_policy = policy.as_str(),
        "bilingual paragraphs written"
    );
    if let Some(path) = report {
        write_json(Some(path), &drops)?;
    }
    intake.finish("make-bilingual")
}

pub fn manifest(cfg: &Config, stage: &str, corpora: &[PathBuf], lead: Option<String>, out: Option<&Path>) -> CliResult {
    let stage: Stage = stage.parse()?;
    let mut m = emit_manifest(stage, corpora)?;
    if stage == Stage::PretrainBilingual || lead.is_some() {
        m.lead_policy = Some(lead_policy(cfg, lead)?.as_str().to_owned());
    }
    write_json(out, &m)
}
