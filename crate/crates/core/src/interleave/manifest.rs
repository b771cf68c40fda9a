//! Training manifests describing each emitted corpus.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::InterleaveError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    PretrainTranslate,
    PretrainBilingual,
    Finetune,
}

impl Stage {
    pub fn lora_rank(self) -> u32 {
        match self {
            Stage::PretrainTranslate | Stage::PretrainBilingual => 128,
            Stage::Finetune => 16,
        }
    }

    pub fn approx_trainable_params(self) -> u64 {
        match self {
            Stage::PretrainTranslate | Stage::PretrainBilingual => 335_000_000,
            Stage::Finetune => 41_000_000,
        }
    }
}

impl FromStr for Stage {
    type Err = InterleaveError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pretrain_translate" | "pretrain-translate" => Ok(Stage::PretrainTranslate),
            "pretrain_bilingual" | "pretrain-bilingual" => Ok(Stage::PretrainBilingual),
            "finetune" => Ok(Stage::Finetune),
            other => Err(InterleaveError::InvalidStage(other.to_owned())),
        }
    }
}

pub const QUANTIZATION: &str = "4-bit";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrainingManifest {
    pub stage: Stage,
    pub lora_rank: u32,
    pub approx_trainable_params: u64,
    pub num_records: u64,
    pub corpus_paths: Vec<String>,
    pub quantization: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lead_policy: Option<String>,
}

fn count_records(path: &Path) -> Result<u64, InterleaveError> {
    let file =
        File::open(path).map_err(|e| InterleaveError::MissingCorpus { path: path.display().to_string(), source: e })?;
    let mut n = 0;
    for line in BufReader::new(file).split(b'\n') {
        if !line?.iter().all(u8::is_ascii_whitespace) {
            n += 1;
        }
    }
    Ok(n)
}

/// Builds the manifest for `stage`, counting records in the written corpora.
pub fn emit_manifest<P: AsRef<Path>>(stage: Stage, corpora: &[P]) -> Result<TrainingManifest, InterleaveError> {
    let mut num_records = 0;
    let mut corpus_paths = Vec::with_capacity(corpora.len());
    for path in corpora {
        let path = path.as_ref();
        num_records += count_records(path)?;
        corpus_paths.push(path.display().to_string());
    }
    Ok(TrainingManifest {
        stage,
        lora_rank: stage.lora_rank(),
        approx_trainable_params: stage.approx_trainable_params(),
        num_records,
        corpus_paths,
        quantization: QUANTIZATION.to_owned(),
        lead_policy: None,
    })
}
