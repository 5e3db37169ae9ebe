use morpho_core::entropy::FeatureVector;
use morpho_core::Label;
use serde::{Deserialize, Serialize};

use crate::MlError;

/// Feature rows with binary labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    x: Vec<Vec<f64>>,
    y: Vec<Label>,
    dim: usize,
}

impl Dataset {
    pub fn new(x: Vec<Vec<f64>>, y: Vec<Label>) -> Result<Self, MlError> {
        if x.len() != y.len() {
            return Err(MlError::Dimension { expected: x.len(), got: y.len() });
        }
        let dim = x.first().map_or(0, Vec::len);
        if let Some(row) = x.iter().find(|r| r.len() != dim) {
            return Err(MlError::Dimension { expected: dim, got: row.len() });
        }
        Ok(Self { x, y, dim })
    }

    pub fn from_vectors(vectors: &[FeatureVector]) -> Result<Self, MlError> {
        Self::new(vectors.iter().map(|v| v.values.clone()).collect(), vectors.iter().map(|v| v.label).collect())
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.x
    }

    pub fn labels(&self) -> &[Label] {
        &self.y
    }

    /// 1.0 for AD, 0.0 for CN.
    pub fn targets(&self) -> Vec<f64> {
        self.y.iter().map(|l| if l.is_positive() { 1.0 } else { 0.0 }).collect()
    }

    pub fn subset(&self, indices: &[usize]) -> Self {
        Self { x: indices.iter().map(|&i| self.x[i].clone()).collect(), y: indices.iter().map(|&i| self.y[i]).collect(), dim: self.dim }
    }

    pub fn count(&self, label: Label) -> usize {
        self.y.iter().filter(|&&l| l == label).count()
    }
}

/// Per-column mean and population standard deviation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl Standardizer {
    /// Fits on `data`; a constant column keeps std 1 so it maps to zero.
    pub fn fit(data: &Dataset) -> Result<Self, MlError> {
        if data.is_empty() {
            return Err(MlError::Empty);
        }
        let n = data.len() as f64;
        let d = data.dim();
        let mut mean = vec![0.0; d];
        for row in data.rows() {
            for (m, v) in mean.iter_mut().zip(row) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut var = vec![0.0; d];
        for row in data.rows() {
            for j in 0..d {
                var[j] += (row[j] - mean[j]).powi(2);
            }
        }
        let std = var.into_iter().map(|v| (v / n).sqrt()).map(|s| if s > 1e-12 { s } else { 1.0 }).collect();
        Ok(Self { mean, std })
    }

    pub fn transform_row(&self, row: &[f64]) -> Result<Vec<f64>, MlError> {
        if row.len() != self.mean.len() {
            return Err(MlError::Dimension { expected: self.mean.len(), got: row.len() });
        }
        Ok(row.iter().zip(&self.mean).zip(&self.std).map(|((v, m), s)| (v - m) / s).collect())
    }

    pub fn transform(&self, data: &Dataset) -> Result<Dataset, MlError> {
        let x = data.rows().iter().map(|r| self.transform_row(r)).collect::<Result<_, _>>()?;
        Dataset::new(x, data.labels().to_vec())
    }
}
