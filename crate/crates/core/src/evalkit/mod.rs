//! Benchmark percent-change tables and generation-score distributions.

mod bench;
mod genscore;

pub use bench::{
    bench_table, pct_change, round_half_away, BenchRow, BenchScore, BenchTable, ModelCell, BENCHMARK_ORDER, DEFAULT_K,
};
pub use genscore::{
    gen_score_stats, quartiles, AttributeStats, GenReport, GenScoreRecord, Outlier, Rejection, ATTRIBUTES, MAX_SCORE,
};

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error("{benchmark}/{model}: score {score} outside [0, 1]")]
    BenchScoreOutOfRange { benchmark: String, model: String, score: f64 },
    #[error("duplicate score for {benchmark}/{model} at {shots} shots")]
    DuplicateCell { benchmark: String, model: String, shots: u32 },
    #[error("record {id} rejected: {reason}")]
    Rejected { id: String, reason: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

fn markdown(header: &[String], rows: &[Vec<String>]) -> String {
    let mut out = format!("| {} |\n", header.join(" | "));
    out.push_str(&format!("|{}\n", "---|".repeat(header.len())));
    for r in rows {
        out.push_str(&format!("| {} |\n", r.join(" | ")));
    }
    out
}

fn csv_text(header: &[String], rows: &[Vec<String>]) -> Result<String, EvalError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    let bytes = w.into_inner().map_err(|e| EvalError::Csv(e.into_error().into()))?;
    Ok(String::from_utf8(bytes).expect("csv of UTF-8 strings"))
}
