//! Zero-shot vs k-shot benchmark tables with percent changes.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::EvalError;

/// Row order used when a benchmark appears in this list; others follow alphabetically.
pub const BENCHMARK_ORDER: &[&str] =
    &["MMLU", "ARC-Easy", "ARC-Challenge", "Winogrande", "TruthfulQA MC1", "TruthfulQA MC2"];

pub const DEFAULT_K: u32 = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchScore {
    pub benchmark: String,
    pub model: String,
    pub shots: u32,
    pub score: f64,
}

/// Rounds to `decimals` places, ties away from zero.
///
/// Values within 1e-9 of a tie (in scaled units) count as ties, so binary
/// representation error does not flip a printed half.
pub fn round_half_away(x: f64, decimals: i32) -> f64 {
    let scale = 10f64.powi(decimals);
    let scaled = x * scale;
    let floor = scaled.abs().floor();
    let frac = scaled.abs() - floor;
    let mag = if (frac - 0.5).abs() < 1e-9 { floor + 1.0 } else { scaled.abs().round() };
    let r = scaled.signum() * mag / scale;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// Percent change from `zero_shot` to `k_shot`, rounded to 2 decimals.
/// Undefined (`None`) unless `zero_shot > 0`.
pub fn pct_change(zero_shot: f64, k_shot: f64) -> Option<f64> {
    (zero_shot > 0.0).then(|| round_half_away(100.0 * (k_shot - zero_shot) / zero_shot, 2))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelCell {
    pub zero_shot: Option<f64>,
    pub k_shot: Option<f64>,
    pub change: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub benchmark: String,
    /// One cell per entry of [`BenchTable::models`].
    pub cells: Vec<ModelCell>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchTable {
    pub k: u32,
    pub models: Vec<String>,
    pub rows: Vec<BenchRow>,
    /// Mean of the defined percent changes per model, rounded to 2 decimals.
    pub mean_change: Vec<Option<f64>>,
}

fn benchmark_rank(name: &str) -> (usize, &str) {
    let pos = BENCHMARK_ORDER.iter().position(|b| *b == name);
    (pos.unwrap_or(BENCHMARK_ORDER.len()), name)
}

/// Builds the table. Models are listed in `model_order` when given (unknown
/// models are appended alphabetically), otherwise alphabetically.
pub fn bench_table(scores: &[BenchScore], k: u32, model_order: &[String]) -> Result<BenchTable, EvalError> {
    let mut cells: BTreeMap<(&str, &str, u32), f64> = BTreeMap::new();
    for s in scores {
        if !(0.0..=1.0).contains(&s.score) {
            return Err(EvalError::BenchScoreOutOfRange {
                benchmark: s.benchmark.clone(),
                model: s.model.clone(),
                score: s.score,
            });
        }
        if cells.insert((&s.benchmark, &s.model, s.shots), s.score).is_some() {
            return Err(EvalError::DuplicateCell {
                benchmark: s.benchmark.clone(),
                model: s.model.clone(),
                shots: s.shots,
            });
        }
    }
    let present: BTreeSet<&str> = scores.iter().map(|s| s.model.as_str()).collect();
    let mut models: Vec<String> = model_order.iter().filter(|m| present.contains(m.as_str())).cloned().collect();
    models.extend(present.iter().filter(|m| !model_order.iter().any(|o| o == *m)).map(|m| m.to_string()));

    let mut benchmarks: Vec<&str> =
        scores.iter().map(|s| s.benchmark.as_str()).collect::<BTreeSet<_>>().into_iter().collect();
    benchmarks.sort_by_key(|b| benchmark_rank(b));

    let rows: Vec<BenchRow> = benchmarks
        .iter()
        .map(|&b| BenchRow {
            benchmark: b.to_owned(),
            cells: models
                .iter()
                .map(|m| {
                    let zero_shot = cells.get(&(b, m.as_str(), 0)).copied();
                    let k_shot = cells.get(&(b, m.as_str(), k)).copied();
                    let change = match (zero_shot, k_shot) {
                        (Some(z), Some(ks)) => pct_change(z, ks),
                        _ => None,
                    };
                    ModelCell { zero_shot, k_shot, change }
                })
                .collect(),
        })
        .collect();
    let mean_change = (0..models.len())
        .map(|i| {
            let changes: Vec<f64> = rows.iter().filter_map(|r| r.cells[i].change).collect();
            (!changes.is_empty()).then(|| round_half_away(changes.iter().sum::<f64>() / changes.len() as f64, 2))
        })
        .collect();
    Ok(BenchTable { k, models, rows, mean_change })
}

fn fmt_score(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_owned(), |x| format!("{x:.4}"))
}

fn fmt_change(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_owned(), |x| format!("{x:+.2}"))
}

impl BenchTable {
    fn header(&self) -> Vec<String> {
        let mut h = vec!["Benchmark".to_owned()];
        for m in &self.models {
            h.push(format!("{m} 0-shot"));
            h.push(format!("{m} {}-shot", self.k));
            h.push(format!("{m} % change"));
        }
        h
    }

    fn body(&self) -> Vec<Vec<String>> {
        let mut out: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| {
                let mut line = vec![r.benchmark.clone()];
                for c in &r.cells {
                    line.extend([fmt_score(c.zero_shot), fmt_score(c.k_shot), fmt_change(c.change)]);
                }
                line
            })
            .collect();
        if !self.rows.is_empty() {
            let mut line = vec!["Mean % change".to_owned()];
            for m in &self.mean_change {
                line.extend(["".to_owned(), "".to_owned(), fmt_change(*m)]);
            }
            out.push(line);
        }
        out
    }

    pub fn to_markdown(&self) -> String {
        super::markdown(&self.header(), &self.body())
    }

    pub fn to_csv(&self) -> Result<String, EvalError> {
        super::csv_text(&self.header(), &self.body())
    }
}
