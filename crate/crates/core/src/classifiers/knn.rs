use crate::domain::{Classifier, DiscriminatorScores, FeatureVector, LabeledData, N_FEATURES};
use crate::registry::{ParamError, Params};

use super::{Learner, Standardizer};

/// k-nearest neighbours on z-scored features; scores are neighbour vote
/// fractions.
#[derive(Debug, Clone, PartialEq)]
pub struct Knn {
    pub k: usize,
}

impl Knn {
    pub fn new(k: usize) -> Self {
        assert!(k >= 1, "k must be at least 1");
        Knn { k }
    }

    pub fn from_params(params: &Params) -> Result<Self, ParamError> {
        params.check_keys("knn", &["k"])?;
        let k = params.integer("k", 1)?.unwrap_or(5) as usize;
        Ok(Knn { k })
    }
}

impl Learner for Knn {
    fn kind(&self) -> &'static str {
        "knn"
    }

    fn describe(&self) -> String {
        format!("knn(k={})", self.k)
    }

    fn fit(&self, data: &LabeledData) -> Box<dyn Classifier> {
        let scaler = Standardizer::fit(data.samples());
        let points = data.samples().iter().map(|x| scaler.transform(x)).collect();
        Box::new(KnnModel {
            name: self.describe(),
            k: self.k.min(data.len()),
            n_classes: data.n_classes(),
            scaler,
            points,
            labels: data.labels().to_vec(),
        })
    }
}

#[derive(Debug, Clone)]
pub struct KnnModel {
    name: String,
    k: usize,
    n_classes: usize,
    scaler: Standardizer,
    points: Vec<[f64; N_FEATURES]>,
    labels: Vec<usize>,
}

impl Classifier for KnnModel {
    fn name(&self) -> &str {
        &self.name
    }

    fn n_classes(&self) -> usize {
        self.n_classes
    }

    fn score(&self, x: &FeatureVector) -> DiscriminatorScores {
        let q = self.scaler.transform(x);
        let mut dist: Vec<(f64, usize)> = self
            .points
            .iter()
            .enumerate()
            .map(|(i, p)| (p.iter().zip(&q).map(|(a, b)| (a - b) * (a - b)).sum(), i))
            .collect();
        // Equal distances resolve to the earlier training sample.
        let order = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
        if self.k < dist.len() {
            dist.select_nth_unstable_by(self.k - 1, order);
        }
        let mut votes = vec![0.0; self.n_classes];
        for &(_, i) in &dist[..self.k] {
            votes[self.labels[i]] += 1.0;
        }
        votes.iter_mut().for_each(|v| *v /= self.k as f64);
        DiscriminatorScores::from_weights(votes)
    }
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::*;

    #[test]
    fn one_nn_recalls_training_points() {
        let data = separable();
        let model = Knn::new(1).fit(&data);
        for (x, &y) in data.samples().iter().zip(data.labels()) {
            let s = model.score(x);
            assert_eq!(s.get(y), 1.0);
        }
    }

    #[test]
    fn three_nn_vote_fractions() {
        let data = LabeledData::new(
            vec![fv(&[0.0]), fv(&[1.0]), fv(&[2.0]), fv(&[10.0])],
            vec![0, 0, 1, 1],
            2,
        )
        .unwrap();
        let model = Knn::new(3).fit(&data);
        let s = model.score(&fv(&[0.5]));
        assert_eq!(s.as_slice(), &[2.0 / 3.0, 1.0 / 3.0]);
    }

    #[test]
    fn k_is_capped_at_training_size() {
        let data = LabeledData::new(vec![fv(&[0.0]), fv(&[1.0])], vec![0, 1], 2).unwrap();
        let s = Knn::new(10).fit(&data).score(&fv(&[0.0]));
        assert_eq!(s.as_slice(), &[0.5, 0.5]);
    }
}
