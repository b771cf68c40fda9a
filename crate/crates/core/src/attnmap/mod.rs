//! Attention dumps: loading, word-level pooling, relation heatmaps and
//! averaged concept heatmaps.

mod compare;
mod concept;
mod pool;
mod render;
mod tensor;

pub use compare::{compare_concepts, cosine, top_heads, BandMeans, HeadScore, SimilarityReport, LAYER_BAND};
pub use concept::{concept, relation_heatmap, ConceptHeatmap, RelationAnnotation};
pub use pool::{pool, pool_values, pooling_variance, sample_variance, PoolMode, VarianceReport, WordAttention};
pub use render::{
    cell_color, heatmap_csv, heatmap_ppm, parse_heatmap_csv, render_heatmap, RenderedPaths, DARKEST, DEFAULT_CELL_PX,
    LIGHTEST,
};
pub use tensor::{
    decode, encode, load_tensor, sidecar_path, store_tensor, validate_values, AttentionTensor, TensorMeta, MAGIC,
    ROW_SUM_TOLERANCE, VERSION,
};

#[derive(Debug, thiserror::Error)]
pub enum AttnError {
    #[error("not an ATNT file (bad magic)")]
    BadMagic,
    #[error("unsupported ATNT version {0}")]
    UnsupportedVersion(u8),
    #[error("dimensions {layers}x{heads}x{seq}x{seq} overflow")]
    DimOverflow { layers: usize, heads: usize, seq: usize },
    #[error("expected {expected} bytes, found {found}")]
    Truncated { expected: usize, found: usize },
    #[error("NaN at layer {layer}, head {head}, query {query}, key {key}")]
    NaN { layer: usize, head: usize, query: usize, key: usize },
    #[error("value {value} outside [0, 1] at layer {layer}, head {head}, query {query}, key {key}")]
    OutOfRange { layer: usize, head: usize, query: usize, key: usize, value: f32 },
    #[error("non-stochastic row: layer {layer}, head {head}, query {query} sums to {sum}")]
    NonStochasticRow { layer: usize, head: usize, query: usize, sum: f64 },
    #[error("sidecar: {0}")]
    Sidecar(String),
    #[error("cannot read sidecar {path}: {source}")]
    SidecarIo { path: String, source: std::io::Error },
    #[error("bad shape: {0}")]
    Shape(String),
    #[error("relation {from} -> {to} out of range for {words} words")]
    IndexOutOfRange { from: usize, to: usize, words: usize },
    #[error("relation from word {0} to itself")]
    SelfRelation(usize),
    #[error("dimension mismatch: expected {expected:?}, found {found:?}")]
    DimMismatch { expected: (usize, usize), found: (usize, usize) },
    #[error("cannot average an empty list of heatmaps")]
    EmptyConcept,
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
