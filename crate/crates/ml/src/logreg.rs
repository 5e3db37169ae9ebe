use serde::{Deserialize, Serialize};

use crate::classifier::Model;
use crate::dataset::Dataset;
use crate::{logit_loss, sigmoid, MlError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogRegOptions {
    pub lr: f64,
    pub epochs: usize,
    /// Penalty on the weights (not the bias).
    pub l2: f64,
}

impl Default for LogRegOptions {
    fn default() -> Self {
        Self { lr: 0.1, epochs: 2000, l2: 1e-4 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogRegModel {
    pub weights: Vec<f64>,
    pub bias: f64,
}

impl LogRegModel {
    /// Full-batch gradient descent on mean cross-entropy plus `l2/2 |w|^2`, from zero.
    pub fn train(data: &Dataset, opts: &LogRegOptions) -> Result<Self, MlError> {
        if data.is_empty() {
            return Err(MlError::Empty);
        }
        if !(opts.lr > 0.0) || opts.l2 < 0.0 {
            return Err(MlError::Config("logistic regression needs lr > 0 and l2 >= 0".into()));
        }
        let d = data.dim();
        let n = data.len() as f64;
        let y = data.targets();
        let mut m = Self { weights: vec![0.0; d], bias: 0.0 };
        for epoch in 0..opts.epochs {
            let mut gw = vec![0.0; d];
            let mut gb = 0.0;
            let mut loss = 0.0;
            for (x, &t) in data.rows().iter().zip(&y) {
                let z = m.logit(x);
                loss += logit_loss(z, t);
                let r = sigmoid(z) - t;
                gb += r;
                for (g, xi) in gw.iter_mut().zip(x) {
                    *g += r * xi;
                }
            }
            loss = loss / n + 0.5 * opts.l2 * m.weights.iter().map(|w| w * w).sum::<f64>();
            if !loss.is_finite() {
                return Err(MlError::Divergence { epoch, loss });
            }
            for (w, g) in m.weights.iter_mut().zip(&gw) {
                *w -= opts.lr * (g / n + opts.l2 * *w);
            }
            m.bias -= opts.lr * gb / n;
        }
        if !(m.bias.is_finite() && m.weights.iter().all(|w| w.is_finite())) {
            return Err(MlError::Divergence { epoch: opts.epochs, loss: f64::NAN });
        }
        Ok(m)
    }

    pub fn logit(&self, x: &[f64]) -> f64 {
        self.bias + self.weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>()
    }
}

impl Model for LogRegModel {
    fn dim(&self) -> usize {
        self.weights.len()
    }

    fn score(&self, x: &[f64]) -> f64 {
        sigmoid(self.logit(x))
    }
}
