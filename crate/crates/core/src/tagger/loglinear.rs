use serde::{Deserialize, Serialize};

use super::softmax;

/// Multinomial log-linear classifier over sparse binary features.
///
/// Parameters form a `features x classes` row-major matrix; an example is the
/// set of its active feature indices. L2 applies to the rows an example
/// touches, which keeps each SGD step proportional to the active set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogLinear {
    n_features: usize,
    n_classes: usize,
    weights: Vec<f64>,
}

impl LogLinear {
    pub fn new(n_features: usize, n_classes: usize) -> Self {
        LogLinear {
            n_features,
            n_classes,
            weights: vec![0.0; n_features * n_classes],
        }
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn params(&self) -> &[f64] {
        &self.weights
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.weights
    }

    pub fn scores(&self, features: &[usize]) -> Vec<f64> {
        let mut scores = vec![0.0; self.n_classes];
        for &f in features {
            let row = &self.weights[f * self.n_classes..(f + 1) * self.n_classes];
            for (s, w) in scores.iter_mut().zip(row) {
                *s += w;
            }
        }
        scores
    }

    pub fn probabilities(&self, features: &[usize]) -> Vec<f64> {
        let mut p = self.scores(features);
        softmax(&mut p);
        p
    }

    fn penalty(&self, features: &[usize], l2: f64) -> f64 {
        if l2 == 0.0 {
            return 0.0;
        }
        let sq: f64 = features
            .iter()
            .flat_map(|&f| &self.weights[f * self.n_classes..(f + 1) * self.n_classes])
            .map(|w| w * w)
            .sum();
        0.5 * l2 * sq
    }

    /// Cross-entropy of `gold` plus the L2 penalty on the active rows.
    /// `features` must not repeat an index.
    pub fn loss(&self, features: &[usize], gold: usize, l2: f64) -> f64 {
        let p = self.probabilities(features);
        -p[gold].max(f64::MIN_POSITIVE).ln() + self.penalty(features, l2)
    }

    /// Sparse gradient of [`LogLinear::loss`] as `(param_index, value)` pairs.
    pub fn gradient(&self, features: &[usize], gold: usize, l2: f64) -> Vec<(usize, f64)> {
        let p = self.probabilities(features);
        let mut grad = Vec::with_capacity(features.len() * self.n_classes);
        for &f in features {
            for (k, &pk) in p.iter().enumerate() {
                let idx = f * self.n_classes + k;
                let target = if k == gold { 1.0 } else { 0.0 };
                grad.push((idx, pk - target + l2 * self.weights[idx]));
            }
        }
        grad
    }

    /// One SGD update; returns the cross-entropy before the update.
    pub fn sgd_step(&mut self, features: &[usize], gold: usize, lr: f64, l2: f64) -> f64 {
        let p = self.probabilities(features);
        let loss = -p[gold].max(f64::MIN_POSITIVE).ln();
        for &f in features {
            let row = &mut self.weights[f * self.n_classes..(f + 1) * self.n_classes];
            for (k, w) in row.iter_mut().enumerate() {
                let target = if k == gold { 1.0 } else { 0.0 };
                *w -= lr * (p[k] - target + l2 * *w);
            }
        }
        loss
    }
}
