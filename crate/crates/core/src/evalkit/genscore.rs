//! Distribution statistics for 0-10 generation quality scores.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::EvalError;

pub const ATTRIBUTES: [&str; 5] = ["correctness", "grammar", "usability", "hallucination", "overall"];
pub const MAX_SCORE: u8 = 10;

/// Wire form of one judged generation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenScoreRecord {
    pub id: String,
    pub model: String,
    #[serde(default)]
    pub empty: bool,
    #[serde(default)]
    pub scores: BTreeMap<String, i64>,
}

impl GenScoreRecord {
    /// Scores in [`ATTRIBUTES`] order. Empty generations score 0 on everything.
    pub fn attribute_scores(&self) -> Result<[u8; 5], EvalError> {
        if let Some(unknown) = self.scores.keys().find(|k| !ATTRIBUTES.contains(&k.as_str())) {
            return Err(EvalError::Rejected { id: self.id.clone(), reason: format!("unknown attribute `{unknown}`") });
        }
        if self.empty {
            return Ok([0; 5]);
        }
        let mut out = [0u8; 5];
        for (slot, attr) in out.iter_mut().zip(ATTRIBUTES) {
            let v = *self.scores.get(attr).ok_or_else(|| EvalError::Rejected {
                id: self.id.clone(),
                reason: format!("missing attribute `{attr}`"),
            })?;
            if !(0..=i64::from(MAX_SCORE)).contains(&v) {
                return Err(EvalError::Rejected {
                    id: self.id.clone(),
                    reason: format!("{attr} = {v} is outside 0..=10"),
                });
            }
            *slot = v as u8;
        }
        Ok(out)
    }
}

/// Quartiles of sorted data: the median, then the medians of the lower and
/// upper halves with the middle element excluded when the count is odd.
pub fn quartiles(sorted: &[f64]) -> Option<(f64, f64, f64)> {
    fn median(s: &[f64]) -> f64 {
        let n = s.len();
        if n % 2 == 1 {
            s[n / 2]
        } else {
            (s[n / 2 - 1] + s[n / 2]) / 2.0
        }
    }
    let n = sorted.len();
    if n == 0 {
        return None;
    }
    let med = median(sorted);
    if n == 1 {
        return Some((med, med, med));
    }
    let half = n / 2;
    Some((median(&sorted[..half]), med, median(&sorted[n - half..])))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Outlier {
    pub id: String,
    pub score: u8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributeStats {
    pub model: String,
    pub attribute: String,
    pub n: u64,
    pub histogram: [u64; 11],
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
    pub iqr: f64,
    pub lower_fence: f64,
    pub upper_fence: f64,
    pub outliers: Vec<Outlier>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rejection {
    pub id: String,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct GenReport {
    pub stats: Vec<AttributeStats>,
    pub records: BTreeMap<String, u64>,
    pub empty_generations: BTreeMap<String, u64>,
    pub rejected: Vec<Rejection>,
}

fn attribute_stats(model: &str, attribute: &str, scores: &[(&str, u8)]) -> AttributeStats {
    let mut histogram = [0u64; 11];
    for (_, s) in scores {
        histogram[usize::from(*s)] += 1;
    }
    let mut sorted: Vec<f64> = scores.iter().map(|(_, s)| f64::from(*s)).collect();
    sorted.sort_by(f64::total_cmp);
    let (q1, median, q3) = quartiles(&sorted).expect("non-empty group");
    let iqr = q3 - q1;
    let (lower_fence, upper_fence) = (q1 - 1.5 * iqr, q3 + 1.5 * iqr);
    let outliers = scores
        .iter()
        .filter(|(_, s)| f64::from(*s) < lower_fence || f64::from(*s) > upper_fence)
        .map(|(id, s)| Outlier { id: (*id).to_owned(), score: *s })
        .collect();
    AttributeStats {
        model: model.to_owned(),
        attribute: attribute.to_owned(),
        n: scores.len() as u64,
        histogram,
        median,
        q1,
        q3,
        iqr,
        lower_fence,
        upper_fence,
        outliers,
    }
}

/// Per (model, attribute) distribution statistics; invalid records are
/// listed in `rejected` and left out of every statistic.
pub fn gen_score_stats<'a>(records: impl IntoIterator<Item = &'a GenScoreRecord>) -> GenReport {
    let mut report = GenReport::default();
    let mut by_model: BTreeMap<&str, Vec<(&str, [u8; 5])>> = BTreeMap::new();
    for r in records {
        match r.attribute_scores() {
            Ok(scores) => {
                by_model.entry(&r.model).or_default().push((&r.id, scores));
                *report.records.entry(r.model.clone()).or_insert(0) += 1;
                let empty = report.empty_generations.entry(r.model.clone()).or_insert(0);
                if r.empty {
                    *empty += 1;
                }
            }
            Err(e) => report.rejected.push(Rejection {
                id: r.id.clone(),
                reason: match e {
                    EvalError::Rejected { reason, .. } => reason,
                    other => other.to_string(),
                },
            }),
        }
    }
    for (model, rows) in &by_model {
        for (a, attr) in ATTRIBUTES.iter().enumerate() {
            let column: Vec<(&str, u8)> = rows.iter().map(|(id, s)| (*id, s[a])).collect();
            report.stats.push(attribute_stats(model, attr, &column));
        }
    }
    report
}

impl GenReport {
    fn header() -> Vec<String> {
        let mut h: Vec<String> = ["Model", "Attribute", "N", "Median", "Q1", "Q3", "IQR", "Outliers"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        h.extend((0..=MAX_SCORE).map(|b| format!("n={b}")));
        h
    }

    fn body(&self) -> Vec<Vec<String>> {
        self.stats
            .iter()
            .map(|s| {
                let mut line = vec![
                    s.model.clone(),
                    s.attribute.clone(),
                    s.n.to_string(),
                    format!("{:.2}", s.median),
                    format!("{:.2}", s.q1),
                    format!("{:.2}", s.q3),
                    format!("{:.2}", s.iqr),
                    s.outliers.len().to_string(),
                ];
                line.extend(s.histogram.iter().map(u64::to_string));
                line
            })
            .collect()
    }

    pub fn to_markdown(&self) -> String {
        let mut out = super::markdown(&Self::header(), &self.body());
        if !self.empty_generations.is_empty() {
            out.push('\n');
            out.push_str(&super::markdown(
                &["Model".to_owned(), "Records".to_owned(), "Empty generations".to_owned()],
                &self
                    .empty_generations
                    .iter()
                    .map(|(m, e)| vec![m.clone(), self.records[m].to_string(), e.to_string()])
                    .collect::<Vec<_>>(),
            ));
        }
        out
    }

    pub fn to_csv(&self) -> Result<String, EvalError> {
        super::csv_text(&Self::header(), &self.body())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(id: &str, empty: bool, v: i64) -> GenScoreRecord {
        GenScoreRecord {
            id: id.into(),
            model: "m".into(),
            empty,
            scores: if empty { BTreeMap::new() } else { ATTRIBUTES.iter().map(|a| (a.to_string(), v)).collect() },
        }
    }

    #[test]
    fn small_sample_median_and_histogram() {
        let recs = [rec("a", false, 0), rec("b", false, 0), rec("c", false, 10)];
        let report = gen_score_stats(&recs);
        let s = &report.stats[0];
        assert_eq!(s.median, 0.0);
        assert_eq!(s.histogram[0], 2);
        assert_eq!(s.histogram[10], 1);
        assert_eq!(s.histogram.iter().sum::<u64>(), 3);
    }

    #[test]
    fn all_empty_generations_have_zero_medians() {
        let recs: Vec<_> = (0..7).map(|i| rec(&i.to_string(), true, 0)).collect();
        let report = gen_score_stats(&recs);
        assert_eq!(report.stats.len(), 5);
        assert!(report.stats.iter().all(|s| s.median == 0.0));
        assert_eq!(report.empty_generations["m"], 7);
    }

    #[test]
    fn empty_generation_scores_are_forced_to_zero() {
        let mut r = rec("x", false, 9);
        r.empty = true;
        assert_eq!(r.attribute_scores().unwrap(), [0; 5]);
    }

    #[test]
    fn out_of_range_record_is_rejected_by_id() {
        let recs = [rec("ok", false, 5), rec("bad", false, 11)];
        let report = gen_score_stats(&recs);
        assert_eq!(report.rejected.len(), 1);
        assert_eq!(report.rejected[0].id, "bad");
        assert_eq!(report.stats[0].n, 1);
    }

    #[test]
    fn quartile_convention() {
        assert_eq!(quartiles(&[1.0, 2.0, 3.0, 4.0]), Some((1.5, 2.5, 3.5)));
        assert_eq!(quartiles(&[1.0, 2.0, 3.0, 4.0, 5.0]), Some((1.5, 3.0, 4.5)));
        assert_eq!(quartiles(&[7.0]), Some((7.0, 7.0, 7.0)));
        assert_eq!(quartiles(&[]), None);
    }

    #[test]
    fn outliers_fall_outside_fences() {
        let mut recs: Vec<_> = (0..9).map(|i| rec(&i.to_string(), false, 5)).collect();
        recs.push(rec("far", false, 0));
        let s = &gen_score_stats(&recs).stats[0];
        assert_eq!(s.iqr, 0.0);
        assert_eq!(s.outliers, vec![Outlier { id: "far".into(), score: 0 }]);
    }
}
