//! Similarity between two concept heatmaps.

use serde::{Deserialize, Serialize};

use super::{AttnError, ConceptHeatmap};
use ndarray::Array2;

/// Layers per band in the band-mean table.
pub const LAYER_BAND: usize = 8;

/// A layer/head cell; both indices are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeadScore {
    pub layer: usize,
    pub head: usize,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandMeans {
    pub first_layer: usize,
    pub last_layer: usize,
    pub a: f64,
    pub b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityReport {
    /// `None` when either matrix is all zeros.
    pub cosine: Option<f64>,
    pub bands: Vec<BandMeans>,
    pub top_a: Vec<HeadScore>,
    pub top_b: Vec<HeadScore>,
}

/// The `k` strongest cells, ties broken by (layer, head).
pub fn top_heads(m: &Array2<f64>, k: usize) -> Vec<HeadScore> {
    let mut cells: Vec<HeadScore> =
        m.indexed_iter().map(|((l, h), &value)| HeadScore { layer: l + 1, head: h + 1, value }).collect();
    cells.sort_by(|x, y| y.value.total_cmp(&x.value).then(x.layer.cmp(&y.layer)).then(x.head.cmp(&y.head)));
    cells.truncate(k);
    cells
}

pub fn cosine(a: &Array2<f64>, b: &Array2<f64>) -> Option<f64> {
    let dot: f64 = a.iter().zip(b.iter()).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    (na > 0.0 && nb > 0.0).then(|| dot / (na * nb))
}

fn band_mean(m: &Array2<f64>, rows: std::ops::Range<usize>) -> f64 {
    let band = m.slice(ndarray::s![rows, ..]);
    band.sum() / band.len() as f64
}

pub fn compare_concepts(a: &ConceptHeatmap, b: &ConceptHeatmap, top_k: usize) -> Result<SimilarityReport, AttnError> {
    if a.values.dim() != b.values.dim() {
        return Err(AttnError::DimMismatch { expected: a.values.dim(), found: b.values.dim() });
    }
    let layers = a.layers();
    let bands = (0..layers)
        .step_by(LAYER_BAND)
        .map(|start| {
            let end = (start + LAYER_BAND).min(layers);
            BandMeans {
                first_layer: start + 1,
                last_layer: end,
                a: band_mean(&a.values, start..end),
                b: band_mean(&b.values, start..end),
            }
        })
        .collect();
    Ok(SimilarityReport {
        cosine: cosine(&a.values, &b.values),
        bands,
        top_a: top_heads(&a.values, top_k),
        top_b: top_heads(&b.values, top_k),
    })
}
