mod attn;
mod build;
mod corpus;
mod fertility;
mod quality;
mod report;

use std::path::PathBuf;

use forge_core::corpus::{CorpusError, Segmenter, DEFAULT_MAX_FAILURE_RATIO};

use crate::cli::{Command, Leniency};
use crate::config::Config;
use crate::error::{CliError, CliResult};
use crate::io::Intake;

pub fn run(command: Command, cfg: &Config) -> CliResult {
    match command {
        Command::Segment { lang, input, out, stoplist, leniency } => {
            corpus::segment(cfg, &lang, &input, out.as_deref(), stoplist, &leniency)
        }
        Command::Validate { input, stoplist, leniency } => corpus::validate(cfg, &input, stoplist, &leniency),
        Command::Chrf { hyp, reference, char_n, word_n, beta, out } => {
            quality::chrf(cfg, &hyp, &reference, (char_n, word_n, beta), out.as_deref())
        }
        Command::Filter { input, cutoff, out, report, leniency } => {
            quality::filter(cfg, &input, cutoff, out.as_deref(), report.as_deref(), &leniency)
        }
        Command::MakeTranslate { input, out, template, stoplist, selection, leniency } => {
            build::make_translate(cfg, &input, out.as_deref(), template, stoplist, &selection, &leniency)
        }
        Command::MakeBilingual { input, out, lead, report, stoplist, selection, leniency } => {
            build::make_bilingual(cfg, &input, out.as_deref(), lead, report.as_deref(), stoplist, &selection, &leniency)
        }
        Command::Manifest { stage, corpora, lead, out } => build::manifest(cfg, &stage, &corpora, lead, out.as_deref()),
        Command::Fertility { input, by_lang, per_doc, out, leniency } => {
            fertility::fertility(cfg, &input, by_lang, per_doc.as_deref(), out.as_deref(), &leniency)
        }
        Command::Attn(cmd) => attn::run(cfg, cmd),
        Command::Report(cmd) => report::run(cfg, cmd),
    }
}

fn intake(cfg: &Config, leniency: &Leniency) -> CliResult<Intake> {
    let strict = leniency.strict || cfg.get::<bool>("strict")?.unwrap_or(false);
    let ratio = cfg.pick(leniency.max_failure_ratio, "max_failure_ratio", DEFAULT_MAX_FAILURE_RATIO)?;
    if !(0.0..=1.0).contains(&ratio) {
        return Err(CliError::validation(format!("max failure ratio {ratio} outside [0, 1]")));
    }
    Ok(Intake::new(strict, ratio))
}

fn segmenter(cfg: &Config, flag: Option<PathBuf>) -> CliResult<Segmenter> {
    match cfg.pick_path(flag, "stoplist") {
        Some(path) => Segmenter::load_stoplist(&path).map_err(|e| match e {
            CorpusError::Io(io) => CliError::io(format!("cannot read stop-list {}: {io}", path.display())),
            other => CliError::from(other),
        }),
        None => Ok(Segmenter::default()),
    }
}
