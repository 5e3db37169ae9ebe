use morpho_core::Label;
use serde::{Deserialize, Serialize};

use crate::classifier::Model;
use crate::dataset::Dataset;
use crate::MlError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnOptions {
    pub k: usize,
}

impl Default for KnnOptions {
    fn default() -> Self {
        Self { k: 5 }
    }
}

/// Stored training set.
///
/// Neighbours are ranked by distance, then AD before CN, then row index. With
/// odd `k` and two classes the vote cannot tie.
#[derive(Debug, Clone, PartialEq)]
pub struct KnnModel {
    k: usize,
    train: Dataset,
}

impl KnnModel {
    pub fn train(data: &Dataset, opts: &KnnOptions) -> Result<Self, MlError> {
        if opts.k == 0 || opts.k.is_multiple_of(2) {
            return Err(MlError::Config(format!("k must be odd and positive, got {}", opts.k)));
        }
        if opts.k > data.len() {
            return Err(MlError::Config(format!("k = {} exceeds training size {}", opts.k, data.len())));
        }
        Ok(Self { k: opts.k, train: data.clone() })
    }

    /// Indices of the `k` nearest training rows in rank order.
    pub fn neighbours(&self, x: &[f64]) -> Vec<usize> {
        let mut ranked: Vec<(f64, usize)> = self
            .train
            .rows()
            .iter()
            .enumerate()
            .map(|(i, r)| (r.iter().zip(x).map(|(a, b)| (a - b).powi(2)).sum::<f64>(), i))
            .collect();
        let labels = self.train.labels();
        ranked.sort_by(|a, b| {
            a.0.total_cmp(&b.0).then_with(|| labels[a.1].cmp(&labels[b.1])).then_with(|| a.1.cmp(&b.1))
        });
        ranked.into_iter().take(self.k).map(|(_, i)| i).collect()
    }
}

impl Model for KnnModel {
    fn dim(&self) -> usize {
        self.train.dim()
    }

    /// Fraction of AD among the neighbours.
    fn score(&self, x: &[f64]) -> f64 {
        let ad = self.neighbours(x).iter().filter(|&&i| self.train.labels()[i] == Label::Ad).count();
        ad as f64 / self.k as f64
    }
}
