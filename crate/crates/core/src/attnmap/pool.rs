//! Token-to-word attention pooling.
//!
//! Both the query and key axes are pooled with the same mode, so word cell
//! `(i, j)` summarizes the block of token attentions from word `i`'s tokens
//! to word `j`'s tokens.

use std::fmt;
use std::str::FromStr;

use ndarray::Array4;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{AttentionTensor, AttnError};
use crate::fertility::WordSpan;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PoolMode {
    Max,
    Mean,
}

impl FromStr for PoolMode {
    type Err = AttnError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "max" => Ok(PoolMode::Max),
            "mean" => Ok(PoolMode::Mean),
            other => Err(AttnError::Shape(format!("unknown pooling mode `{other}`"))),
        }
    }
}

impl fmt::Display for PoolMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PoolMode::Max => "max",
            PoolMode::Mean => "mean",
        })
    }
}

/// Word-level attention, `layers x heads x words x words`.
#[derive(Debug, Clone, PartialEq)]
pub struct WordAttention {
    pub values: Array4<f64>,
    pub pooling: PoolMode,
    pub words: Vec<String>,
    pub lang: String,
}

impl WordAttention {
    pub fn layers(&self) -> usize {
        self.values.dim().0
    }

    pub fn heads(&self) -> usize {
        self.values.dim().1
    }

    pub fn word_count(&self) -> usize {
        self.values.dim().2
    }
}

/// Wire form: `values[layer][head]` is a row-major `words x words` list.
#[derive(Serialize, Deserialize)]
struct WordAttentionWire {
    pooling: PoolMode,
    lang: String,
    words: Vec<String>,
    layers: usize,
    heads: usize,
    values: Vec<Vec<Vec<f64>>>,
}

impl Serialize for WordAttention {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let (layers, heads, _, _) = self.values.dim();
        let values = (0..layers)
            .map(|l| {
                (0..heads).map(|h| self.values.slice(ndarray::s![l, h, .., ..]).iter().copied().collect()).collect()
            })
            .collect();
        WordAttentionWire {
            pooling: self.pooling,
            lang: self.lang.clone(),
            words: self.words.clone(),
            layers,
            heads,
            values,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for WordAttention {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let w = WordAttentionWire::deserialize(d)?;
        let n = w.words.len();
        let shape_ok = w.values.len() == w.layers
            && w.values.iter().all(|l| l.len() == w.heads && l.iter().all(|h| h.len() == n * n));
        if !shape_ok {
            return Err(D::Error::custom("values do not match layers x heads x words x words"));
        }
        let flat = w.values.into_iter().flatten().flatten().collect();
        let values = Array4::from_shape_vec((w.layers, w.heads, n, n), flat).map_err(D::Error::custom)?;
        Ok(Self { values, pooling: w.pooling, words: w.words, lang: w.lang })
    }
}

fn pool_block(values: &Array4<f32>, l: usize, h: usize, qi: &WordSpan, kj: &WordSpan, mode: PoolMode) -> f64 {
    match mode {
        PoolMode::Max => {
            let mut best = f32::NEG_INFINITY;
            for q in qi.tok_start..qi.tok_end {
                for k in kj.tok_start..kj.tok_end {
                    best = best.max(values[[l, h, q, k]]);
                }
            }
            f64::from(best)
        }
        PoolMode::Mean => {
            let mut sum = 0.0f64;
            for q in qi.tok_start..qi.tok_end {
                for k in kj.tok_start..kj.tok_end {
                    sum += f64::from(values[[l, h, q, k]]);
                }
            }
            sum / (qi.len() * kj.len()) as f64
        }
    }
}

/// Pools raw token attention over the given word spans.
pub fn pool_values(values: &Array4<f32>, spans: &[WordSpan], mode: PoolMode) -> Array4<f64> {
    let (layers, heads, _, _) = values.dim();
    let w = spans.len();
    Array4::from_shape_fn((layers, heads, w, w), |(l, h, i, j)| pool_block(values, l, h, &spans[i], &spans[j], mode))
}

pub fn pool(t: &AttentionTensor, mode: PoolMode) -> WordAttention {
    let meta = t.meta();
    WordAttention {
        values: pool_values(t.values(), &meta.words, mode),
        pooling: mode,
        words: meta.words.iter().map(|w| w.word.clone()).collect(),
        lang: meta.lang.clone(),
    }
}

/// Sample variance across all cells of max- and mean-pooled outputs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarianceReport {
    pub cells: usize,
    pub max_pooled: f64,
    pub mean_pooled: f64,
}

pub fn sample_variance<'a>(values: impl IntoIterator<Item = &'a f64>) -> f64 {
    let v: Vec<f64> = values.into_iter().copied().collect();
    if v.len() < 2 {
        return 0.0;
    }
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (v.len() - 1) as f64
}

pub fn pooling_variance(t: &AttentionTensor) -> VarianceReport {
    let max = pool(t, PoolMode::Max);
    let mean = pool(t, PoolMode::Mean);
    VarianceReport {
        cells: max.values.len(),
        max_pooled: sample_variance(max.values.iter()),
        mean_pooled: sample_variance(mean.values.iter()),
    }
}
