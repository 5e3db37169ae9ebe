use std::fmt;
use std::str::FromStr;

use morpho_core::Label;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::knn::{KnnModel, KnnOptions};
use crate::logreg::{LogRegModel, LogRegOptions};
use crate::mlp::{MlpModel, MlpOptions};
use crate::MlError;

/// A trained binary classifier.
pub trait Model: Send + Sync {
    /// Input dimensionality.
    fn dim(&self) -> usize;
    /// Score in `[0, 1]`; higher means more likely AD.
    fn score(&self, x: &[f64]) -> f64;
    fn predict(&self, x: &[f64]) -> Label {
        if self.score(x) >= 0.5 {
            Label::Ad
        } else {
            Label::Cn
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassifierKind {
    Lr,
    Knn,
    Mlp,
}

impl ClassifierKind {
    pub const ALL: [ClassifierKind; 3] = [ClassifierKind::Lr, ClassifierKind::Knn, ClassifierKind::Mlp];

    pub fn display_name(self) -> &'static str {
        match self {
            ClassifierKind::Lr => "Logistic Regression",
            ClassifierKind::Knn => "kNN",
            ClassifierKind::Mlp => "MLP",
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            ClassifierKind::Lr => "lr",
            ClassifierKind::Knn => "knn",
            ClassifierKind::Mlp => "mlp",
        }
    }
}

impl fmt::Display for ClassifierKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for ClassifierKind {
    type Err = MlError;
    fn from_str(s: &str) -> Result<Self, MlError> {
        match s.trim().to_ascii_lowercase().as_str() {
            "lr" | "logreg" | "logistic" => Ok(ClassifierKind::Lr),
            "knn" => Ok(ClassifierKind::Knn),
            "mlp" => Ok(ClassifierKind::Mlp),
            other => Err(MlError::Config(format!("unknown classifier {other:?}"))),
        }
    }
}

/// A classifier kind with its hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Classifier {
    Lr(LogRegOptions),
    Knn(KnnOptions),
    Mlp(MlpOptions),
}

impl Classifier {
    pub fn default_for(kind: ClassifierKind) -> Self {
        match kind {
            ClassifierKind::Lr => Classifier::Lr(LogRegOptions::default()),
            ClassifierKind::Knn => Classifier::Knn(KnnOptions::default()),
            ClassifierKind::Mlp => Classifier::Mlp(MlpOptions::default()),
        }
    }

    pub fn kind(&self) -> ClassifierKind {
        match self {
            Classifier::Lr(_) => ClassifierKind::Lr,
            Classifier::Knn(_) => ClassifierKind::Knn,
            Classifier::Mlp(_) => ClassifierKind::Mlp,
        }
    }

    /// Trains on (already standardized) `train`; `seed` only matters for the MLP.
    pub fn train(&self, train: &Dataset, seed: u64) -> Result<Box<dyn Model>, MlError> {
        Ok(match self {
            Classifier::Lr(o) => Box::new(LogRegModel::train(train, o)?),
            Classifier::Knn(o) => Box::new(KnnModel::train(train, o)?),
            Classifier::Mlp(o) => Box::new(MlpModel::train(train, o, seed)?),
        })
    }
}
