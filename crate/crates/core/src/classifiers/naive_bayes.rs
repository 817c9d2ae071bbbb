use crate::domain::{Classifier, DiscriminatorScores, FeatureVector, LabeledData, N_FEATURES};
use crate::registry::{ParamError, Params};

use super::{Learner, Standardizer};

/// Gaussian naive Bayes on z-scored features.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianNaiveBayes {
    /// Added to every per-class variance.
    pub var_smoothing: f64,
}

impl Default for GaussianNaiveBayes {
    fn default() -> Self {
        GaussianNaiveBayes { var_smoothing: 1e-9 }
    }
}

impl GaussianNaiveBayes {
    pub fn from_params(params: &Params) -> Result<Self, ParamError> {
        params.check_keys("naive_bayes", &["var_smoothing"])?;
        let mut nb = GaussianNaiveBayes::default();
        if let Some(v) = params.float("var_smoothing") {
            if !(v > 0.0 && v.is_finite()) {
                return Err(ParamError::Invalid {
                    key: "var_smoothing".into(),
                    value: v,
                    reason: "must be positive".into(),
                });
            }
            nb.var_smoothing = v;
        }
        Ok(nb)
    }
}

impl Learner for GaussianNaiveBayes {
    fn kind(&self) -> &'static str {
        "naive_bayes"
    }

    fn describe(&self) -> String {
        "naive_bayes".to_string()
    }

    fn fit(&self, data: &LabeledData) -> Box<dyn Classifier> {
        let scaler = Standardizer::fit(data.samples());
        let m = data.n_classes();
        let counts = data.class_counts();
        let mut mean = vec![[0.0; N_FEATURES]; m];
        let mut var = vec![[0.0; N_FEATURES]; m];
        let z: Vec<_> = data.samples().iter().map(|x| scaler.transform(x)).collect();
        for (row, &y) in z.iter().zip(data.labels()) {
            for (acc, v) in mean[y].iter_mut().zip(row) {
                *acc += v;
            }
        }
        for (c, mu) in mean.iter_mut().enumerate() {
            mu.iter_mut().for_each(|v| *v /= counts[c].max(1) as f64);
        }
        for (row, &y) in z.iter().zip(data.labels()) {
            for ((acc, v), mu) in var[y].iter_mut().zip(row).zip(&mean[y]) {
                *acc += (v - mu) * (v - mu);
            }
        }
        for (c, s2) in var.iter_mut().enumerate() {
            s2.iter_mut()
                .for_each(|v| *v = *v / counts[c].max(1) as f64 + self.var_smoothing);
        }
        let n = data.len() as f64;
        let log_prior = counts.iter().map(|&c| (c as f64 / n).ln()).collect();
        Box::new(NaiveBayesModel {
            scaler,
            mean,
            var,
            log_prior,
        })
    }
}

#[derive(Debug, Clone)]
pub struct NaiveBayesModel {
    scaler: Standardizer,
    mean: Vec<[f64; N_FEATURES]>,
    var: Vec<[f64; N_FEATURES]>,
    log_prior: Vec<f64>,
}

impl Classifier for NaiveBayesModel {
    fn name(&self) -> &str {
        "naive_bayes"
    }

    fn n_classes(&self) -> usize {
        self.log_prior.len()
    }

    fn score(&self, x: &FeatureVector) -> DiscriminatorScores {
        let z = self.scaler.transform(x);
        let log_joint: Vec<f64> = (0..self.n_classes())
            .map(|c| {
                let ll: f64 = z
                    .iter()
                    .zip(&self.mean[c])
                    .zip(&self.var[c])
                    .map(|((v, mu), s2)| -0.5 * ((2.0 * std::f64::consts::PI * s2).ln() + (v - mu) * (v - mu) / s2))
                    .sum();
                self.log_prior[c] + ll
            })
            .collect();
        let max = log_joint.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let posterior = log_joint.iter().map(|l| (l - max).exp()).collect();
        DiscriminatorScores::from_weights(posterior)
    }
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::*;

    #[test]
    fn symmetric_pair_gives_even_odds_at_midpoint() {
        let data = LabeledData::new(vec![fv(&[1.0, 4.0]), fv(&[3.0, 2.0])], vec![0, 1], 2).unwrap();
        let model = GaussianNaiveBayes::default().fit(&data);
        assert_eq!(model.score(&fv(&[2.0, 3.0])).as_slice(), &[0.5, 0.5]);
        assert_eq!(model.decide(&fv(&[1.0, 4.0])).index(), 0);
        assert_eq!(model.decide(&fv(&[3.0, 2.0])).index(), 1);
    }

    #[test]
    fn priors_shift_the_posterior() {
        let data = LabeledData::new(
            vec![fv(&[0.0]), fv(&[0.2]), fv(&[0.1]), fv(&[5.0]), fv(&[5.2])],
            vec![0, 0, 0, 1, 1],
            2,
        )
        .unwrap();
        let model = GaussianNaiveBayes::default().fit(&data);
        assert!(model.score(&fv(&[0.1])).get(0) > 0.99);
        assert!(model.score(&fv(&[5.1])).get(1) > 0.99);
    }
}
