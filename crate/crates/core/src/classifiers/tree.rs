use rand::seq::index;
use rand::Rng;

use crate::domain::{Classifier, DiscriminatorScores, FeatureVector, LabeledData, N_FEATURES};
use crate::registry::{ParamError, Params};

use super::{class_frequencies, Learner};

/// Growth limits for a CART tree.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeParams {
    /// `None` grows until leaves are pure or unsplittable.
    pub max_depth: Option<usize>,
    pub min_leaf: usize,
    /// Features examined per split; `None` examines all of them.
    pub max_features: Option<usize>,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams {
            max_depth: None,
            min_leaf: 1,
            max_features: None,
        }
    }
}

impl TreeParams {
    pub(crate) fn read(params: &Params) -> Result<Self, ParamError> {
        Ok(TreeParams {
            max_depth: params.integer("max_depth", 1)?.map(|d| d as usize),
            min_leaf: params.integer("min_leaf", 1)?.unwrap_or(1) as usize,
            max_features: params
                .integer("max_features", 1)?
                .map(|m| (m as usize).min(N_FEATURES)),
        })
    }

    fn describe(&self) -> String {
        let mut parts = Vec::new();
        if let Some(d) = self.max_depth {
            parts.push(format!("max_depth={d}"));
        }
        if self.min_leaf != 1 {
            parts.push(format!("min_leaf={}", self.min_leaf));
        }
        parts.join(",")
    }
}

/// Gini-impurity CART classifier with midpoint thresholds.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DecisionTree {
    pub params: TreeParams,
}

impl DecisionTree {
    pub fn from_params(params: &Params) -> Result<Self, ParamError> {
        params.check_keys("decision_tree", &["max_depth", "min_leaf"])?;
        Ok(DecisionTree {
            params: TreeParams::read(params)?,
        })
    }
}

impl Learner for DecisionTree {
    fn kind(&self) -> &'static str {
        "decision_tree"
    }

    fn describe(&self) -> String {
        let params = self.params.describe();
        if params.is_empty() {
            "decision_tree".to_string()
        } else {
            format!("decision_tree({params})")
        }
    }

    fn fit(&self, data: &LabeledData) -> Box<dyn Classifier> {
        let rows: Vec<usize> = (0..data.len()).collect();
        let mut tree = grow(data, &rows, &self.params, None::<&mut rand_chacha::ChaCha8Rng>);
        tree.name = self.describe();
        if tree.is_stump_leaf() && data.class_counts().iter().filter(|&&c| c > 0).count() > 1 {
            log::warn!("{}: no usable split, falling back to class priors", tree.name);
        }
        Box::new(tree)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Leaf(Vec<f64>),
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TreeModel {
    name: String,
    n_classes: usize,
    nodes: Vec<Node>,
}

impl TreeModel {
    fn leaf_distribution(&self, x: &FeatureVector) -> &[f64] {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                Node::Leaf(dist) => return dist,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => at = if x.get(*feature) <= *threshold { *left } else { *right },
            }
        }
    }

    pub(crate) fn is_stump_leaf(&self) -> bool {
        matches!(self.nodes.as_slice(), [Node::Leaf(_)])
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], at: usize) -> usize {
            match &nodes[at] {
                Node::Leaf(_) => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, *left).max(walk(nodes, *right)),
            }
        }
        walk(&self.nodes, 0)
    }

    /// Leaf class frequencies for `x`, written into `acc` with weight `w`.
    pub(crate) fn accumulate(&self, x: &FeatureVector, w: f64, acc: &mut [f64]) {
        for (a, p) in acc.iter_mut().zip(self.leaf_distribution(x)) {
            *a += w * p;
        }
    }
}

impl Classifier for TreeModel {
    fn name(&self) -> &str {
        &self.name
    }

    fn n_classes(&self) -> usize {
        self.n_classes
    }

    fn score(&self, x: &FeatureVector) -> DiscriminatorScores {
        DiscriminatorScores::from_weights(self.leaf_distribution(x).to_vec())
    }
}

struct Builder<'a, R> {
    data: &'a LabeledData,
    params: &'a TreeParams,
    rng: Option<&'a mut R>,
    nodes: Vec<Node>,
}

struct BestSplit {
    score: f64,
    feature: usize,
    threshold: f64,
}

/// Grows a tree on `rows` (positions into `data`, repeats allowed). With an
/// `rng` and `max_features` set, each split looks at a random feature subset.
pub(crate) fn grow<R: Rng>(
    data: &LabeledData,
    rows: &[usize],
    params: &TreeParams,
    rng: Option<&mut R>,
) -> TreeModel {
    let mut builder = Builder {
        data,
        params,
        rng,
        nodes: Vec::new(),
    };
    builder.build(rows.to_vec(), 0);
    TreeModel {
        name: String::new(),
        n_classes: data.n_classes(),
        nodes: builder.nodes,
    }
}

impl<R: Rng> Builder<'_, R> {
    fn build(&mut self, rows: Vec<usize>, depth: usize) -> usize {
        let labels = self.data.labels();
        let dist = class_frequencies(rows.iter().map(|&r| labels[r]), self.data.n_classes());
        let at = self.nodes.len();
        self.nodes.push(Node::Leaf(dist.clone()));

        let pure = dist.iter().any(|&p| p == 1.0);
        let depth_reached = self.params.max_depth.is_some_and(|d| depth >= d);
        if pure || depth_reached || rows.len() < 2 * self.params.min_leaf {
            return at;
        }
        let Some(split) = self.best_split(&rows) else {
            return at;
        };
        let samples = self.data.samples();
        let (left, right): (Vec<usize>, Vec<usize>) = rows
            .iter()
            .partition(|&&r| samples[r].get(split.feature) <= split.threshold);
        let left = self.build(left, depth + 1);
        let right = self.build(right, depth + 1);
        self.nodes[at] = Node::Split {
            feature: split.feature,
            threshold: split.threshold,
            left,
            right,
        };
        at
    }

    fn candidate_features(&mut self) -> Vec<usize> {
        match (self.params.max_features, self.rng.as_deref_mut()) {
            (Some(m), Some(rng)) if m < N_FEATURES => {
                let mut picked = index::sample(rng, N_FEATURES, m).into_vec();
                picked.sort_unstable();
                picked
            }
            _ => (0..N_FEATURES).collect(),
        }
    }

    /// Lowest weighted Gini over all midpoint thresholds; the first best
    /// (feature order, then threshold order) wins ties.
    fn best_split(&mut self, rows: &[usize]) -> Option<BestSplit> {
        let samples = self.data.samples();
        let labels = self.data.labels();
        let m = self.data.n_classes();
        let n = rows.len();
        let min_leaf = self.params.min_leaf;
        let mut total = vec![0usize; m];
        for &r in rows {
            total[labels[r]] += 1;
        }

        let mut best: Option<BestSplit> = None;
        let mut sorted = rows.to_vec();
        for feature in self.candidate_features() {
            sorted.sort_by(|&a, &b| {
                samples[a]
                    .get(feature)
                    .total_cmp(&samples[b].get(feature))
                    .then(a.cmp(&b))
            });
            let mut left = vec![0usize; m];
            let mut left_sq = 0usize;
            let mut right_sq: usize = total.iter().map(|c| c * c).sum();
            let mut right = total.clone();
            for i in 0..n - 1 {
                let y = labels[sorted[i]];
                left_sq += 2 * left[y] + 1;
                left[y] += 1;
                right_sq -= 2 * right[y] - 1;
                right[y] -= 1;

                let lo = samples[sorted[i]].get(feature);
                let hi = samples[sorted[i + 1]].get(feature);
                let (nl, nr) = (i + 1, n - i - 1);
                if lo >= hi || nl < min_leaf || nr < min_leaf {
                    continue;
                }
                let score = (nl as f64 - left_sq as f64 / nl as f64)
                    + (nr as f64 - right_sq as f64 / nr as f64);
                if best.as_ref().is_none_or(|b| score < b.score) {
                    let mut threshold = lo + (hi - lo) / 2.0;
                    if threshold >= hi {
                        threshold = lo;
                    }
                    best = Some(BestSplit {
                        score,
                        feature,
                        threshold,
                    });
                }
            }
        }
        best
    }
}
