//! Relation-specific layer x head slices and their averages ("concepts").

use ndarray::Array2;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{AttnError, WordAttention};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationAnnotation {
    pub sentence_id: String,
    pub from_word: usize,
    pub to_word: usize,
    pub relation: String,
}

/// Attention from `ann.from_word` to `ann.to_word` in every layer and head.
pub fn relation_heatmap(w: &WordAttention, ann: &RelationAnnotation) -> Result<Array2<f64>, AttnError> {
    let words = w.word_count();
    if ann.from_word >= words || ann.to_word >= words {
        return Err(AttnError::IndexOutOfRange { from: ann.from_word, to: ann.to_word, words });
    }
    if ann.from_word == ann.to_word {
        return Err(AttnError::SelfRelation(ann.from_word));
    }
    Ok(w.values.slice(ndarray::s![.., .., ann.from_word, ann.to_word]).to_owned())
}

/// Element-wise mean of relation heatmaps, `layers x heads`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConceptHeatmap {
    pub values: Array2<f64>,
    pub n_pairs: usize,
    pub relation: String,
    pub lang: String,
}

impl ConceptHeatmap {
    pub fn layers(&self) -> usize {
        self.values.nrows()
    }

    pub fn heads(&self) -> usize {
        self.values.ncols()
    }
}

#[derive(Serialize, Deserialize)]
struct ConceptWire {
    relation: String,
    lang: String,
    n_pairs: usize,
    layers: usize,
    heads: usize,
    values: Vec<Vec<f64>>,
}

impl Serialize for ConceptHeatmap {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ConceptWire {
            relation: self.relation.clone(),
            lang: self.lang.clone(),
            n_pairs: self.n_pairs,
            layers: self.layers(),
            heads: self.heads(),
            values: self.values.rows().into_iter().map(|r| r.to_vec()).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ConceptHeatmap {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let w = ConceptWire::deserialize(d)?;
        if w.values.len() != w.layers || w.values.iter().any(|r| r.len() != w.heads) {
            return Err(D::Error::custom("values do not match layers x heads"));
        }
        let flat = w.values.into_iter().flatten().collect();
        let values = Array2::from_shape_vec((w.layers, w.heads), flat).map_err(D::Error::custom)?;
        Ok(Self { values, n_pairs: w.n_pairs, relation: w.relation, lang: w.lang })
    }
}

/// Averages heatmaps in double precision.
pub fn concept(
    heatmaps: &[Array2<f64>],
    relation: impl Into<String>,
    lang: impl Into<String>,
) -> Result<ConceptHeatmap, AttnError> {
    let first = heatmaps.first().ok_or(AttnError::EmptyConcept)?;
    let dim = first.dim();
    let mut sum = Array2::<f64>::zeros(dim);
    for m in heatmaps {
        if m.dim() != dim {
            return Err(AttnError::DimMismatch { expected: dim, found: m.dim() });
        }
        sum += m;
    }
    Ok(ConceptHeatmap {
        values: sum / heatmaps.len() as f64,
        n_pairs: heatmaps.len(),
        relation: relation.into(),
        lang: lang.into(),
    })
}
