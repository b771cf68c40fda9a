//! The `ATNT` attention dump and its JSON sidecar.
//!
//! Layout: magic `ATNT`, `u8` version 1, then `u32` layers, heads and
//! sequence length (little-endian), followed by `layers * heads * seq * seq`
//! little-endian `f32` values in (layer, head, query, key) order.

use std::fs;
use std::path::{Path, PathBuf};

use ndarray::Array4;
use serde::{Deserialize, Serialize};

use super::AttnError;
use crate::fertility::WordSpan;

pub const MAGIC: &[u8; 4] = b"ATNT";
pub const VERSION: u8 = 1;
const HEADER_LEN: usize = 4 + 1 + 3 * 4;

/// Allowed deviation of a softmax row sum from 1.
pub const ROW_SUM_TOLERANCE: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TensorMeta {
    pub tokens: Vec<String>,
    pub offsets: Vec<(usize, usize)>,
    pub words: Vec<WordSpan>,
    pub lang: String,
    pub text: String,
}

impl TensorMeta {
    fn validate(&self, seq: usize) -> Result<(), AttnError> {
        if self.tokens.len() != seq {
            return Err(AttnError::Sidecar(format!(
                "sidecar lists {} tokens but tensor has seq = {seq}",
                self.tokens.len()
            )));
        }
        if self.offsets.len() != self.tokens.len() {
            return Err(AttnError::Sidecar(format!("{} offsets for {} tokens", self.offsets.len(), self.tokens.len())));
        }
        let mut next = 0;
        for (i, w) in self.words.iter().enumerate() {
            if w.tok_start != next || w.tok_end <= w.tok_start {
                return Err(AttnError::Sidecar(format!(
                    "word {i} spans tokens {}..{}, expected a non-empty span starting at {next}",
                    w.tok_start, w.tok_end
                )));
            }
            next = w.tok_end;
        }
        if next != seq {
            return Err(AttnError::Sidecar(format!("words cover {next} of {seq} tokens")));
        }
        Ok(())
    }
}

/// A validated `layers x heads x seq x seq` attention dump.
#[derive(Debug, Clone, PartialEq)]
pub struct AttentionTensor {
    values: Array4<f32>,
    meta: TensorMeta,
}

impl AttentionTensor {
    pub fn new(values: Array4<f32>, meta: TensorMeta) -> Result<Self, AttnError> {
        let (_, _, q, k) = values.dim();
        if q != k {
            return Err(AttnError::Shape(format!("query axis {q} != key axis {k}")));
        }
        validate_values(&values)?;
        meta.validate(q)?;
        Ok(Self { values, meta })
    }

    pub fn values(&self) -> &Array4<f32> {
        &self.values
    }

    pub fn meta(&self) -> &TensorMeta {
        &self.meta
    }

    pub fn layers(&self) -> usize {
        self.values.dim().0
    }

    pub fn heads(&self) -> usize {
        self.values.dim().1
    }

    pub fn seq(&self) -> usize {
        self.values.dim().2
    }
}

/// Checks range, NaN and row-stochasticity of raw attention values.
pub fn validate_values(values: &Array4<f32>) -> Result<(), AttnError> {
    let (layers, heads, seq, _) = values.dim();
    for l in 0..layers {
        for h in 0..heads {
            for q in 0..seq {
                let mut sum = 0.0f64;
                for k in 0..seq {
                    let v = values[[l, h, q, k]];
                    if v.is_nan() {
                        return Err(AttnError::NaN { layer: l, head: h, query: q, key: k });
                    }
                    if !(0.0..=1.0).contains(&v) {
                        return Err(AttnError::OutOfRange { layer: l, head: h, query: q, key: k, value: v });
                    }
                    sum += f64::from(v);
                }
                if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
                    return Err(AttnError::NonStochasticRow { layer: l, head: h, query: q, sum });
                }
            }
        }
    }
    Ok(())
}

pub fn decode(bytes: &[u8]) -> Result<Array4<f32>, AttnError> {
    if bytes.len() < HEADER_LEN {
        return Err(AttnError::Truncated { expected: HEADER_LEN, found: bytes.len() });
    }
    if &bytes[..4] != MAGIC {
        return Err(AttnError::BadMagic);
    }
    if bytes[4] != VERSION {
        return Err(AttnError::UnsupportedVersion(bytes[4]));
    }
    let dim = |i: usize| {
        let at = 5 + 4 * i;
        u32::from_le_bytes(bytes[at..at + 4].try_into().expect("4 bytes")) as usize
    };
    let (layers, heads, seq) = (dim(0), dim(1), dim(2));
    let count = layers
        .checked_mul(heads)
        .and_then(|n| n.checked_mul(seq))
        .and_then(|n| n.checked_mul(seq))
        .ok_or(AttnError::DimOverflow { layers, heads, seq })?;
    let expected = count.checked_mul(4).and_then(|n| n.checked_add(HEADER_LEN)).ok_or(AttnError::DimOverflow {
        layers,
        heads,
        seq,
    })?;
    if bytes.len() != expected {
        return Err(AttnError::Truncated { expected, found: bytes.len() });
    }
    let data: Vec<f32> =
        bytes[HEADER_LEN..].chunks_exact(4).map(|c| f32::from_le_bytes(c.try_into().expect("4 bytes"))).collect();
    Ok(Array4::from_shape_vec((layers, heads, seq, seq), data).expect("length checked"))
}

pub fn encode(values: &Array4<f32>) -> Vec<u8> {
    let (layers, heads, seq, _) = values.dim();
    let mut out = Vec::with_capacity(HEADER_LEN + 4 * values.len());
    out.extend_from_slice(MAGIC);
    out.push(VERSION);
    for d in [layers, heads, seq] {
        out.extend_from_slice(&(d as u32).to_le_bytes());
    }
    for v in values.iter() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

/// `dir/name.atnt` -> `dir/name.meta.json`.
pub fn sidecar_path(path: &Path) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}.meta.json"))
}

pub fn load_tensor(path: impl AsRef<Path>) -> Result<AttentionTensor, AttnError> {
    let path = path.as_ref();
    let values = decode(&fs::read(path)?)?;
    let meta_path = sidecar_path(path);
    let meta_text = fs::read_to_string(&meta_path)
        .map_err(|source| AttnError::SidecarIo { path: meta_path.display().to_string(), source })?;
    let meta: TensorMeta = serde_json::from_str(&meta_text)?;
    AttentionTensor::new(values, meta)
}

pub fn store_tensor(path: impl AsRef<Path>, tensor: &AttentionTensor) -> Result<(), AttnError> {
    let path = path.as_ref();
    fs::write(path, encode(&tensor.values))?;
    fs::write(sidecar_path(path), serde_json::to_vec(&tensor.meta)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn meta(tokens: &[&str], words: &[(usize, usize)]) -> TensorMeta {
        TensorMeta {
            tokens: tokens.iter().map(|t| t.to_string()).collect(),
            offsets: (0..tokens.len()).map(|i| (i, i + 1)).collect(),
            words: words.iter().map(|&(a, b)| WordSpan { word: "w".into(), tok_start: a, tok_end: b }).collect(),
            lang: "ne".into(),
            text: "ab".into(),
        }
    }

    fn minimal() -> Array4<f32> {
        Array4::from_shape_vec((1, 1, 2, 2), vec![0.5, 0.5, 1.0, 0.0]).unwrap()
    }

    #[test]
    fn minimal_tensor_round_trips() {
        let bytes = encode(&minimal());
        assert_eq!(&bytes[..5], b"ATNT\x01");
        assert_eq!(bytes.len(), 17 + 16);
        let back = decode(&bytes).unwrap();
        assert_eq!(back, minimal());
        assert_eq!(encode(&back), bytes);
        let t = AttentionTensor::new(back, meta(&["a", "b"], &[(0, 2)])).unwrap();
        assert_eq!(t.meta().words.len(), 1);
    }

    #[test]
    fn non_stochastic_row_is_rejected() {
        let v = Array4::from_shape_vec((1, 1, 2, 2), vec![0.5, 0.4, 1.0, 0.0]).unwrap();
        let err = validate_values(&v).unwrap_err();
        assert!(matches!(err, AttnError::NonStochasticRow { query: 0, .. }));
        assert!(err.to_string().contains("non-stochastic row"));
    }

    #[test]
    fn row_sum_tolerance_is_inclusive_of_rounding() {
        let v = Array4::from_shape_vec((1, 1, 2, 2), vec![0.5, 0.4995, 1.0, 0.0]).unwrap();
        assert!(validate_values(&v).is_ok());
    }

    #[test]
    fn nan_and_range_are_rejected() {
        let v = Array4::from_shape_vec((1, 1, 1, 1), vec![f32::NAN]).unwrap();
        assert!(matches!(validate_values(&v), Err(AttnError::NaN { .. })));
        let v = Array4::from_shape_vec((1, 1, 2, 2), vec![1.5, -0.5, 1.0, 0.0]).unwrap();
        assert!(matches!(validate_values(&v), Err(AttnError::OutOfRange { .. })));
    }

    #[test]
    fn header_errors() {
        let mut bytes = encode(&minimal());
        bytes[0] = b'X';
        assert!(matches!(decode(&bytes), Err(AttnError::BadMagic)));
        let mut bytes = encode(&minimal());
        bytes[4] = 2;
        assert!(matches!(decode(&bytes), Err(AttnError::UnsupportedVersion(2))));
        let mut bytes = encode(&minimal());
        bytes.pop();
        assert!(matches!(decode(&bytes), Err(AttnError::Truncated { .. })));
        let mut huge = b"ATNT\x01".to_vec();
        for _ in 0..3 {
            huge.extend_from_slice(&u32::MAX.to_le_bytes());
        }
        assert!(matches!(decode(&huge), Err(AttnError::DimOverflow { .. }) | Err(AttnError::Truncated { .. })));
    }

    #[test]
    fn sidecar_token_count_must_match() {
        let err = AttentionTensor::new(minimal(), meta(&["a"], &[(0, 1)])).unwrap_err();
        assert!(matches!(err, AttnError::Sidecar(_)));
        let err = AttentionTensor::new(minimal(), meta(&["a", "b"], &[(0, 1)])).unwrap_err();
        assert!(err.to_string().contains("cover 1 of 2"));
    }

    #[test]
    fn sidecar_path_replaces_extension() {
        assert_eq!(sidecar_path(Path::new("/d/s1.atnt")), PathBuf::from("/d/s1.meta.json"));
    }
}
