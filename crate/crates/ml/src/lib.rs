//! Binary classifiers and evaluation for entropy feature vectors.
//!
//! Everything here is `f64`. `Label::Ad` is the positive class throughout.

pub mod classifier;
pub mod dataset;
pub mod eval;
pub mod knn;
pub mod logreg;
pub mod metrics;
pub mod mlp;
pub mod roc;
pub mod split;
pub mod stats;

pub use classifier::{Classifier, ClassifierKind, Model};
pub use dataset::{Dataset, Standardizer};
pub use eval::{repeated_splits, repeated_splits_with, ClassifierReport, EvalReport};
pub use metrics::{ConfusionMatrix, Metrics};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MlError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("training diverged at epoch {epoch} (loss {loss})")]
    Divergence { epoch: usize, loss: f64 },
    #[error("dataset is empty")]
    Empty,
    #[error("only one class present")]
    SingleClass,
    #[error("need at least 2 samples per group, got {0}")]
    SampleSize(usize),
    #[error("both samples have zero variance")]
    ZeroVariance,
    #[error("non-finite score at index {0}")]
    NonFinite(usize),
}

pub(crate) fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `log(1 + e^z)` without overflow.
pub(crate) fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

/// Cross-entropy of a logit against a 0/1 target.
pub(crate) fn logit_loss(z: f64, y: f64) -> f64 {
    softplus(z) - y * z
}
