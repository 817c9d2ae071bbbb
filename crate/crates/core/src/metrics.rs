//! Confusion accounting, sensitivity/specificity/accuracy/F-score, and the
//! empirical ROC curve with its Mann–Whitney AUC.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricsError {
    #[error("{predictions} predictions but {truth} truth labels")]
    LengthMismatch { predictions: usize, truth: usize },
    #[error("nothing to evaluate")]
    Empty,
    #[error("ROC needs at least one positive and one negative sample ({positives} positive, {negatives} negative)")]
    OneClassOnly { positives: usize, negatives: usize },
    #[error("malformed ROC file: {0}")]
    Parse(String),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    pub fn_: u64,
}

/// `num / den`, or 0 when the denominator is 0.
fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

impl ConfusionCounts {
    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.tn + self.fn_
    }

    pub fn sensitivity(&self) -> f64 {
        ratio(self.tp, self.tp + self.fn_)
    }

    pub fn specificity(&self) -> f64 {
        ratio(self.tn, self.tn + self.fp)
    }

    pub fn accuracy(&self) -> f64 {
        ratio(self.tp + self.tn, self.total())
    }

    pub fn fscore(&self) -> f64 {
        ratio(2 * self.tp, 2 * self.tp + self.fn_ + self.fp)
    }

    /// Counts seen from the other class's side.
    pub fn inverted(&self) -> ConfusionCounts {
        ConfusionCounts {
            tp: self.tn,
            fp: self.fn_,
            tn: self.tp,
            fn_: self.fp,
        }
    }

    pub fn record(&mut self, predicted_positive: bool, actually_positive: bool) {
        match (predicted_positive, actually_positive) {
            (true, true) => self.tp += 1,
            (true, false) => self.fp += 1,
            (false, false) => self.tn += 1,
            (false, true) => self.fn_ += 1,
        }
    }
}

/// Counts over label sequences, treating `positive_class` as positive and
/// every other label as negative.
pub fn confusion(
    predictions: &[usize],
    truth: &[usize],
    positive_class: usize,
) -> Result<ConfusionCounts, MetricsError> {
    if predictions.len() != truth.len() {
        return Err(MetricsError::LengthMismatch {
            predictions: predictions.len(),
            truth: truth.len(),
        });
    }
    if predictions.is_empty() {
        return Err(MetricsError::Empty);
    }
    let mut counts = ConfusionCounts::default();
    for (&p, &t) in predictions.iter().zip(truth) {
        counts.record(p == positive_class, t == positive_class);
    }
    Ok(counts)
}

pub fn specificity(counts: &ConfusionCounts) -> f64 {
    counts.specificity()
}

pub fn sensitivity(counts: &ConfusionCounts) -> f64 {
    counts.sensitivity()
}

pub fn accuracy(counts: &ConfusionCounts) -> f64 {
    counts.accuracy()
}

pub fn fscore(counts: &ConfusionCounts) -> f64 {
    counts.fscore()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocCurve {
    /// `(false positive rate, true positive rate)` from `(0,0)` to `(1,1)`.
    pub points: Vec<(f64, f64)>,
    pub auc: f64,
}

/// Empirical ROC curve and Mann–Whitney AUC with half credit for ties.
///
/// `truth[i]` marks sample `i` as positive.
pub fn roc_auc(scores: &[f64], truth: &[bool]) -> Result<RocCurve, MetricsError> {
    if scores.len() != truth.len() {
        return Err(MetricsError::LengthMismatch {
            predictions: scores.len(),
            truth: truth.len(),
        });
    }
    let positives = truth.iter().filter(|&&t| t).count();
    let negatives = truth.len() - positives;
    if positives == 0 || negatives == 0 {
        return Err(MetricsError::OneClassOnly {
            positives,
            negatives,
        });
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    // Descending by score; NaN sorts last.
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));

    let (p, n) = (positives as u64, negatives as u64);
    let mut points = vec![(0.0, 0.0)];
    let (mut tp, mut fp) = (0u64, 0u64);
    // Twice the Mann–Whitney U statistic, kept integral so ties are exact.
    let mut twice_u: u128 = 0;
    let mut i = 0;
    while i < order.len() {
        let threshold = scores[order[i]];
        let (mut group_pos, mut group_neg) = (0u64, 0u64);
        while i < order.len() && scores[order[i]].total_cmp(&threshold).is_eq() {
            if truth[order[i]] {
                group_pos += 1;
            } else {
                group_neg += 1;
            }
            i += 1;
        }
        // Positives in this group beat every negative scored strictly lower.
        twice_u += 2 * group_pos as u128 * (n - fp - group_neg) as u128
            + group_pos as u128 * group_neg as u128;
        tp += group_pos;
        fp += group_neg;
        points.push((fp as f64 / n as f64, tp as f64 / p as f64));
    }
    let auc = twice_u as f64 / (2 * p as u128 * n as u128) as f64;
    Ok(RocCurve { points, auc })
}

impl RocCurve {
    /// Two-column `fpr,tpr` text with an `# auc=` footer.
    pub fn to_text(&self) -> String {
        let mut out = String::from("# fpr,tpr\n");
        for (fpr, tpr) in &self.points {
            let _ = writeln!(out, "{fpr},{tpr}");
        }
        let _ = writeln!(out, "# auc={}", self.auc);
        out
    }

    pub fn from_text(text: &str) -> Result<RocCurve, MetricsError> {
        let mut points = Vec::new();
        let mut auc = None;
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            if let Some(comment) = line.strip_prefix('#') {
                if let Some(value) = comment.trim().strip_prefix("auc=") {
                    auc = Some(parse_f64(value)?);
                }
                continue;
            }
            let (fpr, tpr) = line
                .split_once(',')
                .ok_or_else(|| MetricsError::Parse(format!("expected `fpr,tpr`, got `{line}`")))?;
            points.push((parse_f64(fpr)?, parse_f64(tpr)?));
        }
        let auc = auc.ok_or_else(|| MetricsError::Parse("missing `# auc=` footer".into()))?;
        Ok(RocCurve { points, auc })
    }

    /// Starts at `(0,0)`, ends at `(1,1)`, non-decreasing in both axes.
    pub fn is_well_formed(&self) -> bool {
        self.points.first() == Some(&(0.0, 0.0))
            && self.points.last() == Some(&(1.0, 1.0))
            && self
                .points
                .windows(2)
                .all(|w| w[1].0 >= w[0].0 && w[1].1 >= w[0].1)
            && (0.0..=1.0).contains(&self.auc)
    }
}

fn parse_f64(s: &str) -> Result<f64, MetricsError> {
    s.trim()
        .parse()
        .map_err(|_| MetricsError::Parse(format!("not a number: `{s}`")))
}
