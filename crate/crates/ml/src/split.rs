use morpho_core::synth::rng_for;
use morpho_core::Label;
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::MlError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitOptions {
    pub train_frac: f64,
    pub repeats: usize,
    pub seed: u64,
}

impl Default for SplitOptions {
    fn default() -> Self {
        Self { train_frac: 0.8, repeats: 20, seed: 42 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Split {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// Shuffles each class and takes `round(frac * n_class)` for training; both
/// index lists come back sorted.
pub fn stratified_split(labels: &[Label], train_frac: f64, seed: u64, index: usize) -> Result<Split, MlError> {
    if !(train_frac > 0.0 && train_frac < 1.0) {
        return Err(MlError::Config(format!("train fraction must lie in (0, 1), got {train_frac}")));
    }
    let mut rng = rng_for(seed, &[0, index as u64]);
    let mut split = Split { train: Vec::new(), test: Vec::new() };
    for class in [Label::Ad, Label::Cn] {
        let mut idx: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        if idx.is_empty() {
            return Err(MlError::SingleClass);
        }
        idx.shuffle(&mut rng);
        let n_train = (train_frac * idx.len() as f64).round() as usize;
        if n_train == 0 || n_train == idx.len() {
            return Err(MlError::Config(format!(
                "train fraction {train_frac} leaves an empty side for class {class} ({} samples)",
                idx.len()
            )));
        }
        split.test.extend_from_slice(&idx[n_train..]);
        idx.truncate(n_train);
        split.train.extend(idx);
    }
    split.train.sort_unstable();
    split.test.sort_unstable();
    Ok(split)
}
