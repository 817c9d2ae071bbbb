use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::domain::{Classifier, DiscriminatorScores, FeatureVector, LabeledData, N_FEATURES};
use crate::registry::{ParamError, Params};

use super::tree::{grow, TreeModel, TreeParams};
use super::Learner;

/// Bagged CART trees with per-split feature subsampling. Scores are the mean
/// of the trees' leaf frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomForest {
    pub n_trees: usize,
    pub seed: u64,
    pub bootstrap: bool,
    pub tree: TreeParams,
}

impl Default for RandomForest {
    fn default() -> Self {
        RandomForest {
            n_trees: 50,
            seed: 0,
            bootstrap: true,
            tree: TreeParams {
                // round(sqrt(19))
                max_features: Some(4),
                ..TreeParams::default()
            },
        }
    }
}

impl RandomForest {
    pub fn from_params(params: &Params) -> Result<Self, ParamError> {
        params.check_keys(
            "random_forest",
            &["n_trees", "seed", "bootstrap", "max_depth", "min_leaf", "max_features"],
        )?;
        let defaults = RandomForest::default();
        let mut tree = TreeParams::read(params)?;
        if params.float("max_features").is_none() {
            tree.max_features = defaults.tree.max_features;
        }
        let bootstrap = match params.integer("bootstrap", 0)? {
            None => defaults.bootstrap,
            Some(0) => false,
            Some(1) => true,
            Some(v) => {
                return Err(ParamError::Invalid {
                    key: "bootstrap".into(),
                    value: v as f64,
                    reason: "must be 0 or 1".into(),
                })
            }
        };
        Ok(RandomForest {
            n_trees: params.integer("n_trees", 1)?.map_or(defaults.n_trees, |n| n as usize),
            seed: params.integer("seed", 0)?.unwrap_or(defaults.seed),
            bootstrap,
            tree,
        })
    }
}

impl Learner for RandomForest {
    fn kind(&self) -> &'static str {
        "random_forest"
    }

    fn describe(&self) -> String {
        format!("random_forest(n_trees={},seed={})", self.n_trees, self.seed)
    }

    fn fit(&self, data: &LabeledData) -> Box<dyn Classifier> {
        let mut master = ChaCha8Rng::seed_from_u64(self.seed);
        let n = data.len();
        let trees = (0..self.n_trees)
            .map(|_| {
                let mut rng = ChaCha8Rng::seed_from_u64(master.next_u64());
                let rows: Vec<usize> = if self.bootstrap {
                    (0..n).map(|_| rng.random_range(0..n)).collect()
                } else {
                    (0..n).collect()
                };
                grow(data, &rows, &self.tree, Some(&mut rng))
            })
            .collect::<Vec<_>>();
        if self.tree.max_features.is_none_or(|m| m >= N_FEATURES)
            && !self.bootstrap
            && trees.iter().all(|t| t.is_stump_leaf())
        {
            log::warn!("{}: no usable split, falling back to class priors", self.describe());
        }
        Box::new(RandomForestModel {
            name: self.describe(),
            n_classes: data.n_classes(),
            trees,
        })
    }
}

#[derive(Debug, Clone)]
pub struct RandomForestModel {
    name: String,
    n_classes: usize,
    trees: Vec<TreeModel>,
}

impl RandomForestModel {
    pub fn n_trees(&self) -> usize {
        self.trees.len()
    }
}

impl Classifier for RandomForestModel {
    fn name(&self) -> &str {
        &self.name
    }

    fn n_classes(&self) -> usize {
        self.n_classes
    }

    fn score(&self, x: &FeatureVector) -> DiscriminatorScores {
        let mut acc = vec![0.0; self.n_classes];
        let w = 1.0 / self.trees.len() as f64;
        for tree in &self.trees {
            tree.accumulate(x, w, &mut acc);
        }
        DiscriminatorScores::from_weights(acc)
    }
}
