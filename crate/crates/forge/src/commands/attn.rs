use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use forge_core::attnmap::{
    compare_concepts, concept, load_tensor, pool, relation_heatmap, render_heatmap, ConceptHeatmap, PoolMode,
    RelationAnnotation, WordAttention,
};
use forge_core::jsonl::Records;

use crate::cli::{AttnCommand, Mode};
use crate::config::Config;
use crate::error::{CliError, CliResult};
use crate::io::{open_input, read_json, write_json, write_json_line};

const DEFAULT_TOP_K: usize = 10;

fn mode(cfg: &Config, flag: Option<Mode>) -> CliResult<PoolMode> {
    Ok(match flag {
        Some(Mode::Max) => PoolMode::Max,
        Some(Mode::Mean) => PoolMode::Mean,
        None => cfg.get::<PoolMode>("attn.mode")?.unwrap_or(PoolMode::Max),
    })
}

pub fn run(cfg: &Config, cmd: AttnCommand) -> CliResult {
    match cmd {
        AttnCommand::Pool { input, mode: m, out } => {
            let w = pool(&load_tensor(&input)?, mode(cfg, m)?);
            write_json_line(out.as_deref(), &w)
        }
        AttnCommand::Concept { annotations, tensors, relation, mode: m, out } => {
            let dir = tensors.unwrap_or_else(|| annotations.parent().map(Path::to_path_buf).unwrap_or_default());
            let c = concept_from_annotations(&annotations, &dir, relation.as_deref(), mode(cfg, m)?)?;
            write_json(out.as_deref(), &c)
        }
        AttnCommand::Render { input, out } => {
            let c: ConceptHeatmap = read_json(&input)?;
            let paths = render_heatmap(&c, &out)?;
            tracing::info!(image = %paths.image.display(), csv = %paths.csv.display(), "rendered heatmap");
            Ok(())
        }
        AttnCommand::Compare { a, b, top_k, out } => {
            let top_k = cfg.pick(top_k, "attn.top_k", DEFAULT_TOP_K)?;
            let (a, b): (ConceptHeatmap, ConceptHeatmap) = (read_json(&a)?, read_json(&b)?);
            if a.relation != b.relation || a.lang != b.lang {
                tracing::info!(a = %a.relation, b = %b.relation, a_lang = %a.lang, b_lang = %b.lang, "comparing different concepts");
            }
            write_json(out.as_deref(), &compare_concepts(&a, &b, top_k)?)
        }
    }
}

fn concept_from_annotations(
    path: &Path,
    dir: &Path,
    relation: Option<&str>,
    mode: PoolMode,
) -> CliResult<ConceptHeatmap> {
    let mut anns = Vec::new();
    for item in Records::<_, RelationAnnotation>::new(open_input(path)?) {
        anns.push(item.map_err(|e| CliError::from(e).context(path.display()))?.1);
    }
    let relations: BTreeSet<&str> = anns.iter().map(|a| a.relation.as_str()).collect();
    let relation = match relation {
        Some(r) => r.to_owned(),
        None if relations.len() == 1 => relations.iter().next().unwrap().to_string(),
        None => {
            return Err(CliError::validation(format!(
                "annotations mix relations {relations:?}; choose one with --relation"
            )))
        }
    };
    let mut pooled: BTreeMap<String, WordAttention> = BTreeMap::new();
    let mut maps = Vec::new();
    for a in anns.iter().filter(|a| a.relation == relation) {
        if !pooled.contains_key(&a.sentence_id) {
            let tensor_path: PathBuf = dir.join(format!("{}.atnt", a.sentence_id));
            pooled.insert(a.sentence_id.clone(), pool(&load_tensor(&tensor_path)?, mode));
        }
        let w = &pooled[&a.sentence_id];
        maps.push(relation_heatmap(w, a).map_err(|e| CliError::from(e).context(&a.sentence_id))?);
    }
    let langs: BTreeSet<&str> = pooled.values().map(|w| w.lang.as_str()).collect();
    if langs.len() > 1 {
        return Err(CliError::validation(format!("tensors mix languages {langs:?}")));
    }
    let lang = langs.into_iter().next().unwrap_or_default().to_owned();
    tracing::info!(relation = %relation, pairs = maps.len(), sentences = pooled.len(), pooling = %mode, "aggregated concept");
    Ok(concept(&maps, relation, lang)?)
}
