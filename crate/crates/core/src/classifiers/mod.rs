//! Reference learners behind the [`Classifier`] contract.
//!
//! Every learner is registered by name in [`learner_registry`] and built from
//! a [`LearnerSpec`] (kind + numeric hyperparameters), so a pool of
//! heterogeneous models can be described in a config file.

mod adaboost;
mod forest;
mod knn;
mod naive_bayes;
mod standardize;
mod tree;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::{Classifier, DiscriminatorScores, FeatureVector, LabeledData};
use crate::registry::{ParamError, Params, Registry, UnknownName};

pub use adaboost::{AdaBoost, AdaBoostModel};
pub use forest::{RandomForest, RandomForestModel};
pub use knn::{Knn, KnnModel};
pub use naive_bayes::{GaussianNaiveBayes, NaiveBayesModel};
pub use standardize::Standardizer;
pub use tree::{DecisionTree, TreeModel, TreeParams};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TrainError {
    #[error("training data is empty")]
    Empty,
    #[error("class {class} has no training samples")]
    EmptyClass { class: usize },
    #[error(transparent)]
    UnknownKind(#[from] UnknownName),
    #[error(transparent)]
    Param(#[from] ParamError),
}

/// A training algorithm with fixed hyperparameters.
pub trait Learner: Send + Sync + fmt::Debug {
    /// Registry name of the algorithm.
    fn kind(&self) -> &'static str;

    /// Short description including hyperparameters, e.g. `knn(k=5)`.
    fn describe(&self) -> String;

    /// Fits a model. Callers go through [`train`], which checks that the data
    /// is non-empty and every class is present.
    fn fit(&self, data: &LabeledData) -> Box<dyn Classifier>;
}

pub type LearnerCtor = fn(&Params) -> Result<Box<dyn Learner>, ParamError>;

/// Built-in learners: `knn`, `naive_bayes`, `decision_tree`, `random_forest`,
/// `adaboost`.
pub fn learner_registry() -> Registry<LearnerCtor> {
    Registry::<LearnerCtor>::new("learner")
        .with("knn", |p| Ok(Box::new(Knn::from_params(p)?)))
        .with("naive_bayes", |p| Ok(Box::new(GaussianNaiveBayes::from_params(p)?)))
        .with("decision_tree", |p| Ok(Box::new(DecisionTree::from_params(p)?)))
        .with("random_forest", |p| Ok(Box::new(RandomForest::from_params(p)?)))
        .with("adaboost", |p| Ok(Box::new(AdaBoost::from_params(p)?)))
}

/// Learner kind plus hyperparameters, as written in a config file.
#[derive(Debug, Clone, PartialEq)]
pub struct LearnerSpec {
    pub kind: String,
    pub params: Params,
}

impl LearnerSpec {
    pub fn new(kind: &str, params: Params) -> Self {
        LearnerSpec {
            kind: kind.to_string(),
            params,
        }
    }

    pub fn build(&self) -> Result<Box<dyn Learner>, TrainError> {
        self.build_with(&learner_registry())
    }

    pub fn build_with(&self, registry: &Registry<LearnerCtor>) -> Result<Box<dyn Learner>, TrainError> {
        let ctor = registry.get(&self.kind)?;
        Ok(ctor(&self.params)?)
    }
}

impl Serialize for LearnerSpec {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = serializer.serialize_map(None)?;
        map.serialize_entry("kind", &self.kind)?;
        for (k, v) in self.params.iter() {
            map.serialize_entry(k, &v)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for LearnerSpec {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let mut map = std::collections::BTreeMap::<String, serde_json::Value>::deserialize(deserializer)?;
        let kind = match map.remove("kind") {
            Some(serde_json::Value::String(kind)) => kind,
            _ => return Err(D::Error::custom("learner entry needs a string `kind`")),
        };
        let params = map
            .into_iter()
            .map(|(k, v)| match v.as_f64() {
                Some(x) => Ok((k, x)),
                None => Err(D::Error::custom(format!("hyperparameter `{k}` must be numeric"))),
            })
            .collect::<Result<Params, _>>()?;
        Ok(LearnerSpec { kind, params })
    }
}

/// Checks the training preconditions shared by every learner.
pub fn check_training_data(data: &LabeledData) -> Result<(), TrainError> {
    if data.is_empty() {
        return Err(TrainError::Empty);
    }
    if let Some(class) = data.class_counts().iter().position(|&c| c == 0) {
        return Err(TrainError::EmptyClass { class });
    }
    Ok(())
}

/// Builds the learner described by `spec` and fits it to `data`.
pub fn train(spec: &LearnerSpec, data: &LabeledData) -> Result<Arc<dyn Classifier>, TrainError> {
    let learner = spec.build()?;
    fit_checked(learner.as_ref(), data)
}

pub fn fit_checked(learner: &dyn Learner, data: &LabeledData) -> Result<Arc<dyn Classifier>, TrainError> {
    check_training_data(data)?;
    Ok(Arc::from(learner.fit(data)))
}

/// Scores of `classifier` on `x`.
pub fn score(classifier: &dyn Classifier, x: &FeatureVector) -> DiscriminatorScores {
    classifier.score(x)
}

/// Class frequencies of `labels`, the fallback model when no split exists.
pub(crate) fn class_frequencies(labels: impl IntoIterator<Item = usize>, n_classes: usize) -> Vec<f64> {
    let mut counts = vec![0.0; n_classes];
    let mut total = 0.0;
    for l in labels {
        counts[l] += 1.0;
        total += 1.0;
    }
    if total > 0.0 {
        counts.iter_mut().for_each(|c| *c /= total);
    }
    counts
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    fn all_specs() -> Vec<LearnerSpec> {
        vec![
            LearnerSpec::new("knn", Params::new().set("k", 3.0)),
            LearnerSpec::new("naive_bayes", Params::new()),
            LearnerSpec::new("decision_tree", Params::new().set("max_depth", 4.0)),
            LearnerSpec::new(
                "random_forest",
                Params::new().set("n_trees", 7.0).set("seed", 11.0),
            ),
            LearnerSpec::new("adaboost", Params::new().set("n_rounds", 15.0)),
        ]
    }

    #[test]
    fn every_learner_emits_normalized_scores() {
        let data = separable();
        for spec in all_specs() {
            let model = train(&spec, &data).unwrap();
            assert_eq!(model.n_classes(), 2);
            for x in probe_grid() {
                let s = model.score(&x);
                assert!(
                    DiscriminatorScores::new(s.as_slice().to_vec()).is_ok(),
                    "{} emitted {:?}",
                    spec.kind,
                    s
                );
            }
        }
    }

    #[test]
    fn retraining_is_deterministic() {
        let data = separable();
        for spec in all_specs() {
            let a = train(&spec, &data).unwrap();
            let b = train(&spec, &data).unwrap();
            for x in probe_grid() {
                assert_eq!(a.score(&x), b.score(&x), "{}", spec.kind);
            }
        }
    }

    #[test]
    fn missing_class_is_rejected() {
        let data = LabeledData::new(vec![fv(&[1.0]), fv(&[2.0])], vec![0, 0], 2).unwrap();
        for spec in all_specs() {
            assert_eq!(
                train(&spec, &data).unwrap_err(),
                TrainError::EmptyClass { class: 1 }
            );
        }
    }

    #[test]
    fn unknown_kind_and_params_are_rejected() {
        let data = separable();
        assert!(matches!(
            train(&LearnerSpec::new("svm", Params::new()), &data),
            Err(TrainError::UnknownKind(_))
        ));
        assert!(matches!(
            train(&LearnerSpec::new("knn", Params::new().set("depth", 2.0)), &data),
            Err(TrainError::Param(ParamError::Unknown { .. }))
        ));
        assert!(matches!(
            train(&LearnerSpec::new("knn", Params::new().set("k", 0.0)), &data),
            Err(TrainError::Param(ParamError::Invalid { .. }))
        ));
    }

    #[test]
    fn spec_serde_round_trip() {
        let spec = LearnerSpec::new("random_forest", Params::new().set("n_trees", 3.0).set("seed", 2.0));
        let json = serde_json::to_string(&spec).unwrap();
        assert_eq!(json, r#"{"kind":"random_forest","n_trees":3.0,"seed":2.0}"#);
        let back: LearnerSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, spec);
    }

    #[test]
    fn constant_features_fall_back_to_priors() {
        let x = fv(&[1.0, 1.0]);
        let data = LabeledData::new(vec![x, x, x, x], vec![0, 1, 1, 1], 2).unwrap();
        for (kind, params) in [
            ("decision_tree", Params::new()),
            ("random_forest", Params::new().set("bootstrap", 0.0)),
            ("adaboost", Params::new()),
        ] {
            let model = train(&LearnerSpec::new(kind, params), &data).unwrap();
            let s = model.score(&x);
            assert!((s.get(1) - 0.75).abs() < 1e-12, "{kind}: {s:?}");
        }
    }
}
