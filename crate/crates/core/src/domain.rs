//! Domain types shared by every other module: feature vectors in the
//! 19-column screening schema, graded records, discriminator scores and the
//! classifier contract.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Number of screening features per record (`chi0` .. `chi18`).
pub const N_FEATURES: usize = 19;

/// Tolerance on the unit-sum invariant of [`DiscriminatorScores`].
pub const SCORE_SUM_TOLERANCE: f64 = 1e-9;

/// Index of a class label in a label set of size `M`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ClassLabel(pub usize);

impl ClassLabel {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "class {}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FeatureError {
    #[error("expected {expected} feature values, found {found}")]
    Arity { expected: usize, found: usize },
    #[error("chi{index} = {value} is out of range: {reason}")]
    Range {
        index: usize,
        value: f64,
        reason: &'static str,
    },
    #[error("chi{index} is not finite ({value})")]
    NonFinite { index: usize, value: f64 },
}

/// A validated 19-dimensional screening record.
///
/// * `chi0` image quality in `[0, 1]`
/// * `chi1` pre-screening flag, `0` or `1`
/// * `chi2`..`chi7` microaneurysm counts at increasing detector confidence
/// * `chi8`..`chi16` normalized exudate measures
/// * `chi17` normalized macula to optic disc distance
/// * `chi18` AM/FM confidence of disease
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureVector([f64; N_FEATURES]);

impl FeatureVector {
    pub fn new(raw: &[f64]) -> Result<Self, FeatureError> {
        validate_feature_vector(raw)
    }

    pub fn values(&self) -> &[f64; N_FEATURES] {
        &self.0
    }

    pub fn get(&self, index: usize) -> f64 {
        self.0[index]
    }
}

/// Checks arity, finiteness and per-feature ranges.
pub fn validate_feature_vector(raw: &[f64]) -> Result<FeatureVector, FeatureError> {
    if raw.len() != N_FEATURES {
        return Err(FeatureError::Arity {
            expected: N_FEATURES,
            found: raw.len(),
        });
    }
    for (index, &value) in raw.iter().enumerate() {
        if !value.is_finite() {
            return Err(FeatureError::NonFinite { index, value });
        }
        let reason = match index {
            0 if !(0.0..=1.0).contains(&value) => Some("quality score must lie in [0, 1]"),
            1 if value != 0.0 && value != 1.0 => Some("pre-screening flag must be 0 or 1"),
            2.. if value < 0.0 => Some("must be non-negative"),
            _ => None,
        };
        if let Some(reason) = reason {
            return Err(FeatureError::Range {
                index,
                value,
                reason,
            });
        }
    }
    let mut values = [0.0; N_FEATURES];
    values.copy_from_slice(raw);
    Ok(FeatureVector(values))
}

/// Four-level retinopathy grade.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Grade {
    R0,
    R1,
    R2,
    R3,
}

impl Grade {
    pub const ALL: [Grade; 4] = [Grade::R0, Grade::R1, Grade::R2, Grade::R3];

    pub fn from_index(index: u8) -> Option<Grade> {
        Grade::ALL.get(index as usize).copied()
    }

    pub fn index(self) -> u8 {
        self as u8
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradedRecord {
    pub features: FeatureVector,
    pub grade: Grade,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScoreError {
    #[error("discriminator scores need at least two classes, got {0}")]
    TooFewClasses(usize),
    #[error("score {value} for class {class} is outside [0, 1]")]
    OutOfRange { class: usize, value: f64 },
    #[error("scores sum to {0}, expected 1")]
    NotNormalized(f64),
}

/// Per-class discriminator values of one classifier on one input. Always a
/// normalized posterior: every entry in `[0, 1]`, summing to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DiscriminatorScores(Vec<f64>);

impl DiscriminatorScores {
    pub fn new(scores: Vec<f64>) -> Result<Self, ScoreError> {
        if scores.len() < 2 {
            return Err(ScoreError::TooFewClasses(scores.len()));
        }
        for (class, &value) in scores.iter().enumerate() {
            if !(0.0..=1.0).contains(&value) {
                return Err(ScoreError::OutOfRange { class, value });
            }
        }
        let sum: f64 = scores.iter().sum();
        if (sum - 1.0).abs() > SCORE_SUM_TOLERANCE {
            return Err(ScoreError::NotNormalized(sum));
        }
        Ok(DiscriminatorScores(scores))
    }

    /// Scales non-negative weights to sum one; an all-zero input becomes uniform.
    pub fn from_weights(mut weights: Vec<f64>) -> Self {
        debug_assert!(weights.len() >= 2);
        let total: f64 = weights.iter().sum();
        if total > 0.0 && total.is_finite() {
            weights.iter_mut().for_each(|w| *w /= total);
        } else {
            let uniform = 1.0 / weights.len() as f64;
            weights.iter_mut().for_each(|w| *w = uniform);
        }
        DiscriminatorScores(weights)
    }

    pub fn one_hot(n_classes: usize, class: usize) -> Self {
        let mut scores = vec![0.0; n_classes];
        scores[class] = 1.0;
        DiscriminatorScores(scores)
    }

    pub fn n_classes(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn get(&self, class: usize) -> f64 {
        self.0[class]
    }

    pub fn decide(&self) -> ClassLabel {
        decide_scores(&self.0)
    }
}

/// Index of the largest value; the lowest index wins ties.
pub fn argmax_lowest(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Decision rule of a discriminator-based classifier.
pub fn decide_scores(scores: &[f64]) -> ClassLabel {
    ClassLabel(argmax_lowest(scores))
}

/// A trained, immutable classifier exposing per-class discriminator scores.
pub trait Classifier: Send + Sync + fmt::Debug {
    fn name(&self) -> &str;

    fn n_classes(&self) -> usize;

    fn score(&self, x: &FeatureVector) -> DiscriminatorScores;

    fn decide(&self, x: &FeatureVector) -> ClassLabel {
        self.score(x).decide()
    }
}

/// Decision of `classifier` on `x`.
pub fn decide(classifier: &dyn Classifier, x: &FeatureVector) -> ClassLabel {
    classifier.decide(x)
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DataError {
    #[error("dataset is empty")]
    Empty,
    #[error("{samples} samples but {labels} labels")]
    LengthMismatch { samples: usize, labels: usize },
    #[error("label {label} is outside a label set of size {n_classes}")]
    LabelOutOfRange { label: usize, n_classes: usize },
    #[error("a label set needs at least two classes, got {0}")]
    TooFewClasses(usize),
}

/// Feature vectors with class labels in `0..n_classes`. `ids` carry the
/// originating record index so splits stay auditable.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledData {
    samples: Vec<FeatureVector>,
    labels: Vec<usize>,
    ids: Vec<usize>,
    n_classes: usize,
}

impl LabeledData {
    pub fn new(
        samples: Vec<FeatureVector>,
        labels: Vec<usize>,
        n_classes: usize,
    ) -> Result<Self, DataError> {
        let ids = (0..samples.len()).collect();
        Self::with_ids(samples, labels, ids, n_classes)
    }

    pub fn with_ids(
        samples: Vec<FeatureVector>,
        labels: Vec<usize>,
        ids: Vec<usize>,
        n_classes: usize,
    ) -> Result<Self, DataError> {
        if n_classes < 2 {
            return Err(DataError::TooFewClasses(n_classes));
        }
        if samples.len() != labels.len() || samples.len() != ids.len() {
            return Err(DataError::LengthMismatch {
                samples: samples.len(),
                labels: labels.len(),
            });
        }
        if let Some(&label) = labels.iter().find(|&&l| l >= n_classes) {
            return Err(DataError::LabelOutOfRange { label, n_classes });
        }
        Ok(LabeledData {
            samples,
            labels,
            ids,
            n_classes,
        })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn samples(&self) -> &[FeatureVector] {
        &self.samples
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn ids(&self) -> &[usize] {
        &self.ids
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n_classes];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }

    /// Rows at the given positions (positions, not ids), in that order.
    pub fn subset(&self, positions: &[usize]) -> LabeledData {
        LabeledData {
            samples: positions.iter().map(|&p| self.samples[p]).collect(),
            labels: positions.iter().map(|&p| self.labels[p]).collect(),
            ids: positions.iter().map(|&p| self.ids[p]).collect(),
            n_classes: self.n_classes,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decide_picks_argmax() {
        assert_eq!(decide_scores(&[0.8, 0.2]), ClassLabel(0));
        assert_eq!(decide_scores(&[0.1, 0.2, 0.7]), ClassLabel(2));
    }

    #[test]
    fn decide_ties_go_to_lowest_index() {
        assert_eq!(decide_scores(&[0.5, 0.5]), ClassLabel(0));
        assert_eq!(decide_scores(&[0.2, 0.4, 0.4]), ClassLabel(1));
    }

    #[test]
    fn zeros_are_a_valid_vector() {
        assert!(validate_feature_vector(&[0.0; 19]).is_ok());
    }

    #[test]
    fn prescreening_flag_must_be_binary() {
        let mut raw = [0.0; 19];
        raw[1] = 2.0;
        assert!(matches!(
            validate_feature_vector(&raw),
            Err(FeatureError::Range { index: 1, .. })
        ));
    }

    #[test]
    fn arity_is_checked() {
        assert_eq!(
            validate_feature_vector(&[0.0; 18]),
            Err(FeatureError::Arity {
                expected: 19,
                found: 18
            })
        );
    }

    #[test]
    fn quality_and_counts_are_range_checked() {
        let mut raw = [0.0; 19];
        raw[0] = 1.5;
        assert!(matches!(
            validate_feature_vector(&raw),
            Err(FeatureError::Range { index: 0, .. })
        ));
        raw[0] = 0.5;
        raw[7] = -1.0;
        assert!(matches!(
            validate_feature_vector(&raw),
            Err(FeatureError::Range { index: 7, .. })
        ));
        raw[7] = f64::NAN;
        assert!(matches!(
            validate_feature_vector(&raw),
            Err(FeatureError::NonFinite { index: 7, .. })
        ));
    }

    #[test]
    fn scores_must_be_normalized() {
        assert!(DiscriminatorScores::new(vec![0.3, 0.7]).is_ok());
        assert!(matches!(
            DiscriminatorScores::new(vec![0.3, 0.6]),
            Err(ScoreError::NotNormalized(_))
        ));
        assert!(matches!(
            DiscriminatorScores::new(vec![1.2, -0.2]),
            Err(ScoreError::OutOfRange { class: 0, .. })
        ));
        assert_eq!(
            DiscriminatorScores::from_weights(vec![0.0, 0.0]).as_slice(),
            &[0.5, 0.5]
        );
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn score_vec() -> impl Strategy<Value = Vec<f64>> {
            prop::collection::vec(0.0f64..1.0, 2..6)
        }

        proptest! {
            #[test]
            fn permuting_classes_permutes_the_decision(
                scores in score_vec(),
                seed in any::<u64>(),
            ) {
                // Deterministic permutation from the seed.
                let m = scores.len();
                let mut perm: Vec<usize> = (0..m).collect();
                let mut s = seed;
                for i in (1..m).rev() {
                    s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    perm.swap(i, (s >> 33) as usize % (i + 1));
                }
                // permuted[perm[i]] = scores[i]
                let mut permuted = vec![0.0; m];
                for i in 0..m {
                    permuted[perm[i]] = scores[i];
                }
                let original = decide_scores(&scores).index();
                let moved = decide_scores(&permuted).index();
                prop_assert_eq!(permuted[moved], scores[original]);
                let lowest_max = (0..m)
                    .filter(|&j| permuted[j] == permuted[moved])
                    .min()
                    .unwrap();
                prop_assert_eq!(moved, lowest_max);
            }

            #[test]
            fn decision_is_invariant_under_increasing_transforms(scores in score_vec()) {
                let transformed: Vec<f64> = scores.iter().map(|s| (3.0 * s).exp() + 7.0).collect();
                prop_assert_eq!(decide_scores(&scores), decide_scores(&transformed));
            }
        }
    }
}
