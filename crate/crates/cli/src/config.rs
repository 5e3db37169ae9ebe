use std::path::{Path, PathBuf};

use morpho_core::entropy::Scale;
use morpho_core::ricci::FlowOptions;
use morpho_ml::knn::KnnOptions;
use morpho_ml::logreg::LogRegOptions;
use morpho_ml::mlp::MlpOptions;
use morpho_ml::split::SplitOptions;
use morpho_ml::{Classifier, ClassifierKind};
use serde::{Deserialize, Serialize};

use crate::PipelineError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    /// Total subjects, split evenly between the classes (AD gets the odd one).
    pub subjects: usize,
    pub rings: usize,
    pub regions: Vec<String>,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self { subjects: 160, rings: 20, regions: vec!["left".into(), "right".into()], seed: 42 }
    }
}

/// Whole-pipeline settings; loadable from JSON, command-line flags win.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub manifest: Option<PathBuf>,
    pub out: PathBuf,
    pub epsilon: f64,
    pub max_iters: usize,
    /// Bin count per scale.
    pub scales: Vec<usize>,
    pub classifiers: Vec<ClassifierKind>,
    pub logreg: LogRegOptions,
    pub knn: KnnOptions,
    pub mlp: MlpOptions,
    pub repeats: usize,
    pub train_frac: f64,
    pub seed: u64,
    pub workers: Option<usize>,
    pub trace: bool,
    pub synth: SynthConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        let flow = FlowOptions::default();
        let split = SplitOptions::default();
        Self {
            manifest: None,
            out: PathBuf::from("morpho-out"),
            epsilon: flow.epsilon,
            max_iters: flow.max_iters,
            scales: Scale::defaults().iter().map(|s| s.n_bins).collect(),
            classifiers: ClassifierKind::ALL.to_vec(),
            logreg: LogRegOptions::default(),
            knn: KnnOptions::default(),
            mlp: MlpOptions::default(),
            repeats: split.repeats,
            train_frac: split.train_frac,
            seed: split.seed,
            workers: None,
            trace: false,
            synth: SynthConfig::default(),
        }
    }
}

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<Self, PipelineError> {
        let text = std::fs::read_to_string(path).map_err(crate::io_err(path))?;
        serde_json::from_str(&text).map_err(|source| PipelineError::Json { path: path.to_path_buf(), source })
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        let bad = |m: String| Err(PipelineError::Config(m));
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return bad(format!("epsilon must be positive, got {}", self.epsilon));
        }
        if self.max_iters == 0 {
            return bad("max_iters must be at least 1".into());
        }
        if self.scales.is_empty() || self.scales.contains(&0) {
            return bad("scales must be a non-empty list of positive bin counts".into());
        }
        if self.classifiers.is_empty() {
            return bad("no classifiers selected".into());
        }
        if self.repeats == 0 {
            return bad("repeats must be at least 1".into());
        }
        if !(self.train_frac > 0.0 && self.train_frac < 1.0) {
            return bad(format!("train_frac must lie in (0, 1), got {}", self.train_frac));
        }
        if self.workers == Some(0) {
            return bad("workers must be at least 1".into());
        }
        if self.synth.subjects < 2 || self.synth.rings == 0 || self.synth.regions.is_empty() {
            return bad("synth needs at least 2 subjects, 1 ring and 1 region".into());
        }
        Ok(())
    }

    pub fn manifest_path(&self) -> Result<&Path, PipelineError> {
        let p = self.manifest.as_deref().ok_or_else(|| PipelineError::Config("--manifest is required".into()))?;
        if !p.is_file() {
            return Err(PipelineError::Config(format!("manifest {} does not exist", p.display())));
        }
        Ok(p)
    }

    pub fn flow_options(&self) -> FlowOptions {
        FlowOptions { epsilon: self.epsilon, max_iters: self.max_iters, ..FlowOptions::default() }
    }

    pub fn scale_list(&self) -> Vec<Scale> {
        Scale::from_bins(&self.scales)
    }

    pub fn classifier_list(&self) -> Vec<Classifier> {
        self.classifiers
            .iter()
            .map(|k| match k {
                ClassifierKind::Lr => Classifier::Lr(self.logreg.clone()),
                ClassifierKind::Knn => Classifier::Knn(self.knn.clone()),
                ClassifierKind::Mlp => Classifier::Mlp(self.mlp.clone()),
            })
            .collect()
    }

    pub fn split_options(&self) -> SplitOptions {
        SplitOptions { train_frac: self.train_frac, repeats: self.repeats, seed: self.seed }
    }

    pub fn features_dir(&self) -> PathBuf {
        self.out.join("features")
    }

    pub fn report_dir(&self) -> PathBuf {
        self.out.join("report")
    }
}
