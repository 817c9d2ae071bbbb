use crate::domain::{FeatureVector, N_FEATURES};

/// Per-feature z-scoring fitted on training data. Constant features are
/// centred but not scaled.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardizer {
    mean: [f64; N_FEATURES],
    scale: [f64; N_FEATURES],
}

impl Standardizer {
    pub fn fit(samples: &[FeatureVector]) -> Self {
        let n = samples.len().max(1) as f64;
        let mut mean = [0.0; N_FEATURES];
        for x in samples {
            for (m, v) in mean.iter_mut().zip(x.values()) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut scale = [0.0; N_FEATURES];
        for x in samples {
            for ((s, v), m) in scale.iter_mut().zip(x.values()).zip(&mean) {
                *s += (v - m) * (v - m);
            }
        }
        for s in scale.iter_mut() {
            let sd = (*s / n).sqrt();
            *s = if sd > 0.0 { sd } else { 1.0 };
        }
        Standardizer { mean, scale }
    }

    pub fn transform(&self, x: &FeatureVector) -> [f64; N_FEATURES] {
        let mut out = [0.0; N_FEATURES];
        for (i, v) in x.values().iter().enumerate() {
            out[i] = (v - self.mean[i]) / self.scale[i];
        }
        out
    }
}
