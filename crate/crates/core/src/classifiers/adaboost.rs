use crate::domain::{Classifier, DiscriminatorScores, FeatureVector, LabeledData, N_FEATURES};
use crate::registry::{ParamError, Params};

use super::{class_frequencies, Learner};

/// Multiclass AdaBoost (SAMME) over depth-1 stumps.
///
/// Scores are the positive part of each class's accumulated stump weight,
/// normalized to sum one.
#[derive(Debug, Clone, PartialEq)]
pub struct AdaBoost {
    pub n_rounds: usize,
}

impl Default for AdaBoost {
    fn default() -> Self {
        AdaBoost { n_rounds: 50 }
    }
}

impl AdaBoost {
    pub fn from_params(params: &Params) -> Result<Self, ParamError> {
        params.check_keys("adaboost", &["n_rounds"])?;
        Ok(AdaBoost {
            n_rounds: params.integer("n_rounds", 1)?.map_or(50, |n| n as usize),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Stump {
    feature: usize,
    threshold: f64,
    left: usize,
    right: usize,
    alpha: f64,
}

impl Stump {
    fn predict(&self, x: &FeatureVector) -> usize {
        if x.get(self.feature) <= self.threshold {
            self.left
        } else {
            self.right
        }
    }
}

// Error floor so a perfect stump gets a large but finite weight.
const MIN_ERROR: f64 = 1e-10;

fn argmax(values: &[f64]) -> usize {
    crate::domain::argmax_lowest(values)
}

/// Stump with the lowest weighted error; first best wins ties.
fn best_stump(data: &LabeledData, order: &[Vec<usize>], weights: &[f64]) -> Option<(Stump, f64)> {
    let m = data.n_classes();
    let samples = data.samples();
    let labels = data.labels();
    let mut total = vec![0.0; m];
    for (&y, &w) in labels.iter().zip(weights) {
        total[y] += w;
    }
    let total_w: f64 = total.iter().sum();
    let mut best: Option<(Stump, f64)> = None;
    for (feature, sorted) in order.iter().enumerate() {
        let mut left = vec![0.0; m];
        for i in 0..sorted.len() - 1 {
            let r = sorted[i];
            left[labels[r]] += weights[r];
            let lo = samples[r].get(feature);
            let hi = samples[sorted[i + 1]].get(feature);
            if lo >= hi {
                continue;
            }
            let right: Vec<f64> = total.iter().zip(&left).map(|(t, l)| t - l).collect();
            let (lc, rc) = (argmax(&left), argmax(&right));
            let error = total_w - left[lc] - right[rc];
            if best.as_ref().is_none_or(|(_, e)| error < *e) {
                let mut threshold = lo + (hi - lo) / 2.0;
                if threshold >= hi {
                    threshold = lo;
                }
                best = Some((
                    Stump {
                        feature,
                        threshold,
                        left: lc,
                        right: rc,
                        alpha: 0.0,
                    },
                    error / total_w,
                ));
            }
        }
    }
    best
}

impl Learner for AdaBoost {
    fn kind(&self) -> &'static str {
        "adaboost"
    }

    fn describe(&self) -> String {
        format!("adaboost(n_rounds={})", self.n_rounds)
    }

    fn fit(&self, data: &LabeledData) -> Box<dyn Classifier> {
        let n = data.len();
        let m = data.n_classes();
        let samples = data.samples();
        let labels = data.labels();
        let order: Vec<Vec<usize>> = (0..N_FEATURES)
            .map(|f| {
                let mut idx: Vec<usize> = (0..n).collect();
                idx.sort_by(|&a, &b| samples[a].get(f).total_cmp(&samples[b].get(f)).then(a.cmp(&b)));
                idx
            })
            .collect();
        let chance_error = 1.0 - 1.0 / m as f64;
        let mut weights = vec![1.0 / n as f64; n];
        let mut stumps = Vec::new();
        for _ in 0..self.n_rounds {
            let Some((mut stump, error)) = best_stump(data, &order, &weights) else {
                break;
            };
            if error >= chance_error {
                break;
            }
            let error = error.max(MIN_ERROR);
            stump.alpha = ((1.0 - error) / error).ln() + (m as f64 - 1.0).ln();
            let mut sum = 0.0;
            for (i, w) in weights.iter_mut().enumerate() {
                if stump.predict(&samples[i]) != labels[i] {
                    *w *= stump.alpha.exp();
                }
                sum += *w;
            }
            weights.iter_mut().for_each(|w| *w /= sum);
            let perfect = error <= MIN_ERROR;
            stumps.push(stump);
            if perfect {
                break;
            }
        }
        let prior = class_frequencies(labels.iter().copied(), m);
        if stumps.is_empty() {
            log::warn!("{}: no usable stump, falling back to class priors", self.describe());
        }
        Box::new(AdaBoostModel {
            name: self.describe(),
            n_classes: m,
            stumps,
            prior,
        })
    }
}

#[derive(Debug, Clone)]
pub struct AdaBoostModel {
    name: String,
    n_classes: usize,
    stumps: Vec<Stump>,
    prior: Vec<f64>,
}

impl AdaBoostModel {
    pub fn n_stumps(&self) -> usize {
        self.stumps.len()
    }
}

impl Classifier for AdaBoostModel {
    fn name(&self) -> &str {
        &self.name
    }

    fn n_classes(&self) -> usize {
        self.n_classes
    }

    fn score(&self, x: &FeatureVector) -> DiscriminatorScores {
        if self.stumps.is_empty() {
            return DiscriminatorScores::from_weights(self.prior.clone());
        }
        let mut votes = vec![0.0; self.n_classes];
        for s in &self.stumps {
            votes[s.predict(x)] += s.alpha;
        }
        DiscriminatorScores::from_weights(votes.into_iter().map(|v: f64| v.max(0.0)).collect())
    }
}
