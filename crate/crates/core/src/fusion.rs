//! Fusion of member classifier outputs: majority and weighted majority
//! voting, and the algebraic mean/product/min/max rules.
//!
//! Combiners work on raw score rows (one row of per-class discriminator
//! values per member) so cached predictions can be fused without touching
//! the models again. [`Ensemble`] wraps live classifiers for direct use.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::{argmax_lowest, ClassLabel, Classifier, FeatureVector};
use crate::registry::{Registry, UnknownName};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FusionError {
    #[error("an ensemble needs at least one member")]
    EmptyEnsemble,
    #[error("member {member} has {found} classes, expected {expected}")]
    LabelSetMismatch {
        member: usize,
        expected: usize,
        found: usize,
    },
    #[error("weighted majority voting needs member weights")]
    MissingWeights,
    #[error("{weights} weights for {members} members")]
    WeightCount { weights: usize, members: usize },
    #[error("weights must be finite and non-negative with at least one positive entry")]
    BadWeights,
    #[error("positive scores need a two-class label set, got {0} classes")]
    NotBinary(usize),
    #[error("operation requires strategy {expected}, ensemble uses `{found}`")]
    WrongStrategy {
        expected: &'static str,
        found: &'static str,
    },
    #[error("product floor must lie in [0, 1), got {0}")]
    BadFloor(f64),
    #[error(transparent)]
    Unknown(#[from] UnknownName),
}

/// Combines one score row per member into a class decision.
pub trait Combiner: Send + Sync + fmt::Debug {
    /// Config/CLI name.
    fn name(&self) -> &'static str;

    fn needs_weights(&self) -> bool {
        false
    }

    /// Fused decision; ties go to the lowest class index. `weights` is
    /// present whenever [`Combiner::needs_weights`] holds.
    fn decide(&self, rows: &[&[f64]], weights: Option<&[f64]>) -> ClassLabel;

    /// Monotone confidence in `positive` for ROC analysis.
    fn positive_score(&self, rows: &[&[f64]], weights: Option<&[f64]>, positive: usize) -> f64;
}

/// Options shared by combiner constructors.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct FusionOptions {
    /// Lower bound applied to every discriminator value before the product
    /// rule. `0` (the default) reproduces the unsmoothed rule.
    pub product_floor: f64,
}

pub type CombinerCtor = fn(&FusionOptions) -> Box<dyn Combiner>;

pub const STRATEGY_NAMES: [&str; 6] = ["maj", "wmaj", "avg", "pro", "min", "max"];

pub fn combiner_registry() -> Registry<CombinerCtor> {
    Registry::<CombinerCtor>::new("fusion strategy")
        .with("maj", |_| Box::new(MajorityVote))
        .with("wmaj", |_| Box::new(WeightedMajorityVote))
        .with("avg", |_| Box::new(Algebraic::Mean))
        .with("pro", |o| Box::new(Algebraic::Product { floor: o.product_floor }))
        .with("min", |_| Box::new(Algebraic::Min))
        .with("max", |_| Box::new(Algebraic::Max))
}

pub fn build_combiner(name: &str, options: &FusionOptions) -> Result<Arc<dyn Combiner>, FusionError> {
    if !(0.0..1.0).contains(&options.product_floor) {
        return Err(FusionError::BadFloor(options.product_floor));
    }
    let ctor = *combiner_registry().get(name)?;
    Ok(Arc::from(ctor(options)))
}

fn vote_tally(rows: &[&[f64]], weight_of: impl Fn(usize) -> f64) -> Vec<f64> {
    let m = rows[0].len();
    let mut tally = vec![0.0; m];
    for (j, row) in rows.iter().enumerate() {
        tally[argmax_lowest(row)] += weight_of(j);
    }
    tally
}

#[derive(Debug, Clone, Copy)]
pub struct MajorityVote;

impl Combiner for MajorityVote {
    fn name(&self) -> &'static str {
        "maj"
    }

    fn decide(&self, rows: &[&[f64]], _: Option<&[f64]>) -> ClassLabel {
        ClassLabel(argmax_lowest(&vote_tally(rows, |_| 1.0)))
    }

    fn positive_score(&self, rows: &[&[f64]], _: Option<&[f64]>, positive: usize) -> f64 {
        vote_tally(rows, |_| 1.0)[positive] / rows.len() as f64
    }
}

#[derive(Debug, Clone, Copy)]
pub struct WeightedMajorityVote;

impl Combiner for WeightedMajorityVote {
    fn name(&self) -> &'static str {
        "wmaj"
    }

    fn needs_weights(&self) -> bool {
        true
    }

    fn decide(&self, rows: &[&[f64]], weights: Option<&[f64]>) -> ClassLabel {
        let w = weights.expect("weighted majority voting without weights");
        ClassLabel(argmax_lowest(&vote_tally(rows, |j| w[j])))
    }

    fn positive_score(&self, rows: &[&[f64]], weights: Option<&[f64]>, positive: usize) -> f64 {
        let w = weights.expect("weighted majority voting without weights");
        let total: f64 = w.iter().sum();
        if total > 0.0 {
            vote_tally(rows, |j| w[j])[positive] / total
        } else {
            0.0
        }
    }
}

/// Class-wise aggregation of discriminator values followed by argmax.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Algebraic {
    Mean,
    Product { floor: f64 },
    Min,
    Max,
}

impl Algebraic {
    fn aggregate(&self, rows: &[&[f64]], class: usize) -> f64 {
        let values = rows.iter().map(|r| r[class]);
        match *self {
            Algebraic::Mean => values.sum::<f64>() / rows.len() as f64,
            Algebraic::Product { floor } => values.map(|v| v.max(floor)).product(),
            Algebraic::Min => values.fold(f64::INFINITY, f64::min),
            Algebraic::Max => values.fold(f64::NEG_INFINITY, f64::max),
        }
    }

    pub fn aggregated(&self, rows: &[&[f64]]) -> Vec<f64> {
        (0..rows[0].len()).map(|c| self.aggregate(rows, c)).collect()
    }
}

impl Combiner for Algebraic {
    fn name(&self) -> &'static str {
        match self {
            Algebraic::Mean => "avg",
            Algebraic::Product { .. } => "pro",
            Algebraic::Min => "min",
            Algebraic::Max => "max",
        }
    }

    fn decide(&self, rows: &[&[f64]], _: Option<&[f64]>) -> ClassLabel {
        ClassLabel(argmax_lowest(&self.aggregated(rows)))
    }

    fn positive_score(&self, rows: &[&[f64]], _: Option<&[f64]>, positive: usize) -> f64 {
        let value = self.aggregate(rows, positive);
        match self {
            // Geometric mean keeps products of different ensemble sizes on one scale.
            Algebraic::Product { .. } => value.powf(1.0 / rows.len() as f64),
            _ => value,
        }
    }
}

/// Checks weights for `members` members: finite, non-negative, one positive.
pub fn check_weights(weights: &[f64], members: usize) -> Result<(), FusionError> {
    if weights.len() != members {
        return Err(FusionError::WeightCount {
            weights: weights.len(),
            members,
        });
    }
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) || !weights.iter().any(|w| *w > 0.0) {
        return Err(FusionError::BadWeights);
    }
    Ok(())
}

/// Member classifiers together with a fusion strategy.
#[derive(Debug, Clone)]
pub struct Ensemble {
    members: Vec<Arc<dyn Classifier>>,
    combiner: Arc<dyn Combiner>,
    weights: Option<Vec<f64>>,
}

impl Ensemble {
    pub fn new(
        members: Vec<Arc<dyn Classifier>>,
        combiner: Arc<dyn Combiner>,
        weights: Option<Vec<f64>>,
    ) -> Result<Self, FusionError> {
        let Some(first) = members.first() else {
            return Err(FusionError::EmptyEnsemble);
        };
        let expected = first.n_classes();
        if let Some((member, c)) = members
            .iter()
            .enumerate()
            .find(|(_, c)| c.n_classes() != expected)
        {
            return Err(FusionError::LabelSetMismatch {
                member,
                expected,
                found: c.n_classes(),
            });
        }
        match &weights {
            Some(w) => check_weights(w, members.len())?,
            None if combiner.needs_weights() => return Err(FusionError::MissingWeights),
            None => {}
        }
        Ok(Ensemble {
            members,
            combiner,
            weights,
        })
    }

    pub fn members(&self) -> &[Arc<dyn Classifier>] {
        &self.members
    }

    pub fn strategy(&self) -> &'static str {
        self.combiner.name()
    }

    pub fn weights(&self) -> Option<&[f64]> {
        self.weights.as_deref()
    }

    pub fn n_classes(&self) -> usize {
        self.members[0].n_classes()
    }

    fn rows(&self, x: &FeatureVector) -> Vec<Vec<f64>> {
        self.members
            .iter()
            .map(|m| m.score(x).as_slice().to_vec())
            .collect()
    }

    pub fn decide(&self, x: &FeatureVector) -> ClassLabel {
        let rows = self.rows(x);
        let refs: Vec<&[f64]> = rows.iter().map(Vec::as_slice).collect();
        self.combiner.decide(&refs, self.weights())
    }

    pub fn positive_score(&self, x: &FeatureVector, positive: ClassLabel) -> Result<f64, FusionError> {
        if self.n_classes() != 2 {
            return Err(FusionError::NotBinary(self.n_classes()));
        }
        let rows = self.rows(x);
        let refs: Vec<&[f64]> = rows.iter().map(Vec::as_slice).collect();
        Ok(self.combiner.positive_score(&refs, self.weights(), positive.index()))
    }

    fn require(&self, allowed: &[&str], expected: &'static str) -> Result<(), FusionError> {
        if allowed.contains(&self.strategy()) {
            Ok(())
        } else {
            Err(FusionError::WrongStrategy {
                expected,
                found: self.strategy(),
            })
        }
    }
}

/// Discriminator scores of every pool member on a fixed sample set, so that
/// any member subset can be fused without re-scoring.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreTable {
    n_members: usize,
    n_samples: usize,
    n_classes: usize,
    // [member][sample][class], row-major
    values: Vec<f64>,
}

/// Fused output of a member subset over a [`ScoreTable`].
#[derive(Debug, Clone, PartialEq)]
pub struct FusedOutputs {
    pub predictions: Vec<usize>,
    /// Confidence in class 1; empty unless the label set is binary.
    pub positive_scores: Vec<f64>,
}

impl ScoreTable {
    pub fn from_members(members: &[Arc<dyn Classifier>], samples: &[FeatureVector]) -> Self {
        let n_classes = members.first().map_or(2, |m| m.n_classes());
        let mut values = Vec::with_capacity(members.len() * samples.len() * n_classes);
        for m in members {
            for x in samples {
                values.extend_from_slice(m.score(x).as_slice());
            }
        }
        ScoreTable {
            n_members: members.len(),
            n_samples: samples.len(),
            n_classes,
            values,
        }
    }

    /// Builds a table from `rows[member][sample]` score rows.
    pub fn from_rows(rows: &[Vec<Vec<f64>>]) -> Self {
        let n_members = rows.len();
        let n_samples = rows.first().map_or(0, Vec::len);
        let n_classes = rows
            .first()
            .and_then(|r| r.first())
            .map_or(2, Vec::len);
        let mut values = Vec::with_capacity(n_members * n_samples * n_classes);
        for member in rows {
            assert_eq!(member.len(), n_samples, "ragged score table");
            for row in member {
                assert_eq!(row.len(), n_classes, "ragged score table");
                values.extend_from_slice(row);
            }
        }
        ScoreTable {
            n_members,
            n_samples,
            n_classes,
            values,
        }
    }

    pub fn n_members(&self) -> usize {
        self.n_members
    }

    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn row(&self, member: usize, sample: usize) -> &[f64] {
        let start = (member * self.n_samples + sample) * self.n_classes;
        &self.values[start..start + self.n_classes]
    }

    /// Decision of a single member on every sample.
    pub fn member_decisions(&self, member: usize) -> Vec<usize> {
        (0..self.n_samples)
            .map(|s| argmax_lowest(self.row(member, s)))
            .collect()
    }

    /// Fuses the members listed in `subset`. `weights` are indexed by pool
    /// member and restricted to the subset.
    pub fn fuse(&self, subset: &[usize], combiner: &dyn Combiner, weights: Option<&[f64]>) -> FusedOutputs {
        let sub_weights: Option<Vec<f64>> = weights.map(|w| subset.iter().map(|&j| w[j]).collect());
        let binary = self.n_classes == 2;
        let mut predictions = Vec::with_capacity(self.n_samples);
        let mut positive_scores = Vec::with_capacity(if binary { self.n_samples } else { 0 });
        let mut rows: Vec<&[f64]> = Vec::with_capacity(subset.len());
        for s in 0..self.n_samples {
            rows.clear();
            rows.extend(subset.iter().map(|&j| self.row(j, s)));
            predictions.push(combiner.decide(&rows, sub_weights.as_deref()).index());
            if binary {
                positive_scores.push(combiner.positive_score(&rows, sub_weights.as_deref(), 1));
            }
        }
        FusedOutputs {
            predictions,
            positive_scores,
        }
    }

    /// Decisions only; cheaper than [`ScoreTable::fuse`] inside searches.
    pub fn fuse_decisions(&self, subset: &[usize], combiner: &dyn Combiner, weights: Option<&[f64]>) -> Vec<usize> {
        let sub_weights: Option<Vec<f64>> = weights.map(|w| subset.iter().map(|&j| w[j]).collect());
        let mut rows: Vec<&[f64]> = Vec::with_capacity(subset.len());
        (0..self.n_samples)
            .map(|s| {
                rows.clear();
                rows.extend(subset.iter().map(|&j| self.row(j, s)));
                combiner.decide(&rows, sub_weights.as_deref()).index()
            })
            .collect()
    }
}

/// Majority vote of the members' decisions.
pub fn fuse_majority(ensemble: &Ensemble, x: &FeatureVector) -> Result<ClassLabel, FusionError> {
    ensemble.require(&["maj"], "maj")?;
    Ok(ensemble.decide(x))
}

/// Weighted majority vote.
pub fn fuse_weighted_majority(ensemble: &Ensemble, x: &FeatureVector) -> Result<ClassLabel, FusionError> {
    ensemble.require(&["wmaj"], "wmaj")?;
    if ensemble.weights.is_none() {
        return Err(FusionError::MissingWeights);
    }
    Ok(ensemble.decide(x))
}

/// Mean/product/min/max rule, per the ensemble's strategy.
pub fn fuse_algebraic(ensemble: &Ensemble, x: &FeatureVector) -> Result<ClassLabel, FusionError> {
    ensemble.require(&["avg", "pro", "min", "max"], "avg|pro|min|max")?;
    Ok(ensemble.decide(x))
}

pub fn fused_positive_score(
    ensemble: &Ensemble,
    x: &FeatureVector,
    positive: ClassLabel,
) -> Result<f64, FusionError> {
    ensemble.positive_score(x, positive)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{DiscriminatorScores, N_FEATURES};

    /// Emits a fixed score row regardless of input.
    #[derive(Debug)]
    struct Fixed(Vec<f64>);

    impl Classifier for Fixed {
        fn name(&self) -> &str {
            "fixed"
        }
        fn n_classes(&self) -> usize {
            self.0.len()
        }
        fn score(&self, _: &FeatureVector) -> DiscriminatorScores {
            DiscriminatorScores::new(self.0.clone()).unwrap()
        }
    }

    fn x() -> FeatureVector {
        FeatureVector::new(&[0.0; N_FEATURES]).unwrap()
    }

    fn ensemble(rows: &[&[f64]], strategy: &str, weights: Option<Vec<f64>>) -> Ensemble {
        let members = rows
            .iter()
            .map(|r| Arc::new(Fixed(r.to_vec())) as Arc<dyn Classifier>)
            .collect();
        Ensemble::new(
            members,
            build_combiner(strategy, &FusionOptions::default()).unwrap(),
            weights,
        )
        .unwrap()
    }

    const A: &[f64] = &[0.9, 0.1];
    const B: &[f64] = &[0.2, 0.8];

    #[test]
    fn majority_examples() {
        assert_eq!(fuse_majority(&ensemble(&[A, A, B], "maj", None), &x()).unwrap(), ClassLabel(0));
        assert_eq!(fuse_majority(&ensemble(&[B, B, A], "maj", None), &x()).unwrap(), ClassLabel(1));
        assert_eq!(fuse_majority(&ensemble(&[B, A], "maj", None), &x()).unwrap(), ClassLabel(0));
        assert_eq!(fuse_majority(&ensemble(&[B], "maj", None), &x()).unwrap(), ClassLabel(1));
    }

    #[test]
    fn weighted_majority_examples() {
        let e = ensemble(&[A, B, B], "wmaj", Some(vec![0.6, 0.3, 0.1]));
        assert_eq!(fuse_weighted_majority(&e, &x()).unwrap(), ClassLabel(0));
        let e = ensemble(&[B, A], "wmaj", Some(vec![0.5, 0.5]));
        assert_eq!(fuse_weighted_majority(&e, &x()).unwrap(), ClassLabel(0));
    }

    #[test]
    fn weighted_majority_requires_weights() {
        let members = vec![Arc::new(Fixed(A.to_vec())) as Arc<dyn Classifier>];
        let wmaj = build_combiner("wmaj", &FusionOptions::default()).unwrap();
        assert_eq!(
            Ensemble::new(members.clone(), wmaj.clone(), None).unwrap_err(),
            FusionError::MissingWeights
        );
        assert_eq!(
            Ensemble::new(members.clone(), wmaj.clone(), Some(vec![0.0])).unwrap_err(),
            FusionError::BadWeights
        );
        assert!(matches!(
            Ensemble::new(members, wmaj, Some(vec![1.0, 1.0])),
            Err(FusionError::WeightCount { .. })
        ));
    }

    #[test]
    fn algebraic_examples() {
        let avg = ensemble(&[&[0.8, 0.2], &[0.4, 0.6]], "avg", None);
        assert_eq!(fuse_algebraic(&avg, &x()).unwrap(), ClassLabel(0));
        // One zero vetoes the class under the product rule.
        let pro = ensemble(&[&[0.0, 1.0], &[0.9, 0.1]], "pro", None);
        assert_eq!(fuse_algebraic(&pro, &x()).unwrap(), ClassLabel(1));
        let min = ensemble(&[&[0.7, 0.3], &[0.6, 0.4]], "min", None);
        assert_eq!(fuse_algebraic(&min, &x()).unwrap(), ClassLabel(0));
        let max = ensemble(&[&[0.7, 0.3], &[0.1, 0.9]], "max", None);
        assert_eq!(fuse_algebraic(&max, &x()).unwrap(), ClassLabel(1));
    }

    #[test]
    fn product_floor_softens_vetoes() {
        let rows: &[&[f64]] = &[&[0.0, 1.0], &[0.9, 0.1], &[0.9, 0.1]];
        let plain = Algebraic::Product { floor: 0.0 };
        let floored = Algebraic::Product { floor: 0.05 };
        assert_eq!(plain.decide(rows, None), ClassLabel(1));
        // 0.05*0.81 = 0.0405 > 1*0.01
        assert_eq!(floored.decide(rows, None), ClassLabel(0));
        assert!(build_combiner("pro", &FusionOptions { product_floor: 1.5 }).is_err());
    }

    #[test]
    fn positive_score_examples() {
        let maj = ensemble(&[B, B, A], "maj", None);
        assert_eq!(fused_positive_score(&maj, &x(), ClassLabel(1)).unwrap(), 2.0 / 3.0);
        let rows: &[&[f64]] = &[&[0.8, 0.2], &[0.4, 0.6]];
        let avg = ensemble(rows, "avg", None);
        assert!((fused_positive_score(&avg, &x(), ClassLabel(1)).unwrap() - 0.4).abs() < 1e-15);
        let pro = ensemble(rows, "pro", None);
        // Oracle: sqrt(0.2 * 0.6).
        let expected = (0.2f64 * 0.6).sqrt();
        assert!((fused_positive_score(&pro, &x(), ClassLabel(1)).unwrap() - expected).abs() < 1e-15);
        assert!((expected - 0.3464).abs() < 1e-4);
        let wmaj = ensemble(&[B, B, A], "wmaj", Some(vec![0.2, 0.2, 0.6]));
        assert!((fused_positive_score(&wmaj, &x(), ClassLabel(1)).unwrap() - 0.4).abs() < 1e-15);
    }

    #[test]
    fn positive_score_needs_two_classes() {
        let e = ensemble(&[&[0.2, 0.3, 0.5]], "avg", None);
        assert_eq!(
            fused_positive_score(&e, &x(), ClassLabel(1)).unwrap_err(),
            FusionError::NotBinary(3)
        );
    }

    #[test]
    fn strategy_preconditions_are_enforced() {
        let e = ensemble(&[A], "avg", None);
        assert!(matches!(fuse_majority(&e, &x()), Err(FusionError::WrongStrategy { .. })));
        assert!(matches!(fuse_weighted_majority(&e, &x()), Err(FusionError::WrongStrategy { .. })));
        let e = ensemble(&[A], "maj", None);
        assert!(matches!(fuse_algebraic(&e, &x()), Err(FusionError::WrongStrategy { .. })));
    }

    #[test]
    fn mixed_label_sets_are_rejected() {
        let members = vec![
            Arc::new(Fixed(A.to_vec())) as Arc<dyn Classifier>,
            Arc::new(Fixed(vec![0.2, 0.3, 0.5])) as Arc<dyn Classifier>,
        ];
        let avg = build_combiner("avg", &FusionOptions::default()).unwrap();
        assert!(matches!(
            Ensemble::new(members, avg, None),
            Err(FusionError::LabelSetMismatch { member: 1, .. })
        ));
    }

    #[test]
    fn score_table_fusion_matches_live_ensemble() {
        let rows: &[&[f64]] = &[&[0.8, 0.2], &[0.4, 0.6], &[0.3, 0.7]];
        let members: Vec<Arc<dyn Classifier>> = rows
            .iter()
            .map(|r| Arc::new(Fixed(r.to_vec())) as Arc<dyn Classifier>)
            .collect();
        let table = ScoreTable::from_members(&members, &[x(), x()]);
        assert_eq!(table.row(1, 0), &[0.4, 0.6]);
        for name in STRATEGY_NAMES {
            let c = build_combiner(name, &FusionOptions::default()).unwrap();
            let w = vec![0.5, 0.2, 0.3];
            let weights = c.needs_weights().then(|| w.clone());
            let subset = [0, 2];
            let live = Ensemble::new(
                subset.iter().map(|&j| members[j].clone()).collect(),
                c.clone(),
                weights.as_ref().map(|w| subset.iter().map(|&j| w[j]).collect()),
            )
            .unwrap();
            let fused = table.fuse(&subset, c.as_ref(), weights.as_deref());
            assert_eq!(fused.predictions, vec![live.decide(&x()).index(); 2]);
            assert_eq!(fused.positive_scores[0], live.positive_score(&x(), ClassLabel(1)).unwrap());
            assert_eq!(table.fuse_decisions(&subset, c.as_ref(), weights.as_deref()), fused.predictions);
        }
    }

    #[test]
    fn unknown_strategy_names_the_vocabulary() {
        let err = build_combiner("median", &FusionOptions::default()).unwrap_err();
        assert!(err.to_string().contains("maj, wmaj, avg, pro, min, max"));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn rows(m: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
            prop::collection::vec(
                prop::collection::vec(0.0f64..1.0, m).prop_map(|r| {
                    DiscriminatorScores::from_weights(r).as_slice().to_vec()
                }),
                1..6,
            )
        }

        proptest! {
            #[test]
            fn algebraic_rules_ignore_member_order(rows in rows(3), shift in 0usize..6) {
                let refs: Vec<&[f64]> = rows.iter().map(Vec::as_slice).collect();
                let mut rotated = refs.clone();
                let k = shift % rotated.len();
                rotated.rotate_left(k);
                for rule in [Algebraic::Mean, Algebraic::Product { floor: 0.0 }, Algebraic::Min, Algebraic::Max] {
                    let a = rule.aggregated(&refs);
                    let b = rule.aggregated(&rotated);
                    prop_assert_eq!(rule.decide(&refs, None), rule.decide(&rotated, None));
                    for (x, y) in a.iter().zip(&b) {
                        prop_assert!((x - y).abs() <= 1e-12);
                    }
                }
            }

            #[test]
            fn weight_scaling_and_equal_weights(
                rows in rows(2),
                raw in prop::collection::vec(0.01f64..1.0, 6),
                scale in 0.01f64..100.0,
            ) {
                let refs: Vec<&[f64]> = rows.iter().map(Vec::as_slice).collect();
                let w = &raw[..refs.len()];
                let scaled: Vec<f64> = w.iter().map(|v| v * scale).collect();
                let wmaj = WeightedMajorityVote;
                prop_assert_eq!(wmaj.decide(&refs, Some(w)), wmaj.decide(&refs, Some(&scaled)));
                let equal = vec![0.3; refs.len()];
                prop_assert_eq!(wmaj.decide(&refs, Some(&equal)), MajorityVote.decide(&refs, None));
            }

            #[test]
            fn single_member_decides_alone(row in rows(4).prop_map(|mut r| r.remove(0))) {
                let refs: Vec<&[f64]> = vec![&row];
                let own = ClassLabel(argmax_lowest(&row));
                for name in STRATEGY_NAMES {
                    let c = build_combiner(name, &FusionOptions::default()).unwrap();
                    prop_assert_eq!(c.decide(&refs, Some(&[0.7])), own, "{}", name);
                }
            }
        }
    }
}
