#![allow(dead_code)]

use std::path::PathBuf;

use forge_core::attnmap::{AttentionTensor, TensorMeta};
use forge_core::corpus::{ParallelPair, Segmenter};
use forge_core::fertility::WordSpan;
use ndarray::Array4;
use rand::seq::SliceRandom;
use rand::Rng;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

const NE_WORDS: &[&str] = &[
    "नेपाल",
    "हिमाल",
    "पानी",
    "गाउँ",
    "सहर",
    "विद्यालय",
    "किसान",
    "बजार",
    "नदी",
    "बाटो",
    "पुर्‍याउन",
    "संवत्‌को",
    "सुन्दर",
    "ठूलो",
    "राम्रो",
    "छ",
    "थियो",
    "गयो",
    "आयो",
    "भन्छन्",
];
const EN_WORDS: &[&str] = &[
    "river",
    "valley",
    "market",
    "school",
    "farmer",
    "road",
    "village",
    "city",
    "mountain",
    "water",
    "large",
    "beautiful",
    "quiet",
    "is",
    "was",
    "went",
    "came",
    "they",
    "the",
    "of",
];

fn sentence(rng: &mut impl Rng, words: &[&str], terminators: &[&str]) -> String {
    let n = rng.gen_range(2..9);
    let mut s: Vec<&str> = (0..n).map(|_| *words.choose(rng).unwrap()).collect();
    if words == EN_WORDS {
        s[0] = ["The", "A", "Farmers", "Nepal", "Rivers"].choose(rng).unwrap();
    }
    format!("{}{}", s.join(" "), terminators.choose(rng).unwrap())
}

/// Nepali and English texts with `n` sentences each.
pub fn synthetic_texts(rng: &mut impl Rng, n: usize) -> (String, String) {
    let ne: Vec<String> = (0..n).map(|_| sentence(rng, NE_WORDS, &["।", "।", "?", "!"])).collect();
    let en: Vec<String> = (0..n).map(|_| sentence(rng, EN_WORDS, &[".", ".", "?", "!"])).collect();
    (ne.join(" "), en.join(" "))
}

pub fn synthetic_pair(rng: &mut impl Rng, id: usize, seg: &Segmenter) -> ParallelPair {
    let n = rng.gen_range(1..6);
    let (ne, en) = synthetic_texts(rng, n);
    ParallelPair::new(format!("p{id}"), ne, en, "synthetic", seg).unwrap()
}

/// Random contiguous partition of `seq` tokens into non-empty words.
pub fn random_spans(rng: &mut impl Rng, seq: usize) -> Vec<WordSpan> {
    let mut spans = Vec::new();
    let mut start = 0;
    while start < seq {
        let end = rng.gen_range(start + 1..=seq.min(start + 4));
        spans.push(WordSpan { word: format!("w{}", spans.len()), tok_start: start, tok_end: end });
        start = end;
    }
    spans
}

/// Row-stochastic random values, `layers x heads x seq x seq`.
pub fn random_values(rng: &mut impl Rng, layers: usize, heads: usize, seq: usize) -> Array4<f32> {
    let mut v = Array4::<f32>::zeros((layers, heads, seq, seq));
    for l in 0..layers {
        for h in 0..heads {
            for q in 0..seq {
                let raw: Vec<f64> = (0..seq).map(|_| rng.gen::<f64>() + 1e-3).collect();
                let total: f64 = raw.iter().sum();
                for k in 0..seq {
                    v[[l, h, q, k]] = (raw[k] / total) as f32;
                }
            }
        }
    }
    v
}

pub fn random_tensor(rng: &mut impl Rng, layers: usize, heads: usize, seq: usize) -> AttentionTensor {
    let values = random_values(rng, layers, heads, seq);
    let words = random_spans(rng, seq);
    let meta = TensorMeta {
        tokens: (0..seq).map(|i| format!("t{i}")).collect(),
        offsets: (0..seq).map(|i| (i, i + 1)).collect(),
        words,
        lang: "ne".into(),
        text: String::new(),
    };
    AttentionTensor::new(values, meta).unwrap()
}
