//! Cohort pipeline behind the `morpho` binary.
//!
//! Stages: `synth` writes a synthetic cohort, `features` flattens every mesh
//! and stores its per-vertex fields, `classify` encodes entropies and runs
//! the repeated-split evaluation. `run_all` chains the three.

pub mod classify;
pub mod cohort;
pub mod config;
pub mod extract;

use std::path::{Path, PathBuf};

use thiserror::Error;

pub use classify::{cmd_classify, ClassifySummary};
pub use cohort::{cmd_synth, Manifest, ManifestRow, SynthSummary};
pub use config::{PipelineConfig, SynthConfig};
pub use extract::{cmd_features, FeaturesSummary};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("missing feature files for subjects: {}", .0.join(", "))]
    MissingFeatures(Vec<String>),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
    #[error("{path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error(transparent)]
    Entropy(#[from] morpho_core::entropy::EntropyError),
    #[error(transparent)]
    Ml(#[from] morpho_ml::MlError),
}

impl PipelineError {
    /// 2 for configuration problems, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Config(_) | PipelineError::MissingFeatures(_) | PipelineError::Json { .. } => 2,
            PipelineError::Ml(morpho_ml::MlError::Config(_)) => 2,
            _ => 1,
        }
    }
}

pub(crate) fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> PipelineError + '_ {
    move |source| PipelineError::Io { path: path.to_path_buf(), source }
}

pub(crate) fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> PipelineError + '_ {
    move |source| PipelineError::Csv { path: path.to_path_buf(), source }
}

pub(crate) fn create_dir(path: &Path) -> Result<(), PipelineError> {
    std::fs::create_dir_all(path).map_err(io_err(path))
}

pub(crate) fn write_with(
    path: &Path,
    f: impl FnOnce(&mut std::io::BufWriter<std::fs::File>) -> std::io::Result<()>,
) -> Result<(), PipelineError> {
    use std::io::Write;
    let file = std::fs::File::create(path).map_err(io_err(path))?;
    let mut w = std::io::BufWriter::new(file);
    f(&mut w).and_then(|_| w.flush()).map_err(io_err(path))
}

/// Runs `f` on a rayon pool of `workers` threads (all cores when `None`).
pub fn with_workers<R: Send>(workers: Option<usize>, f: impl FnOnce() -> R + Send) -> Result<R, PipelineError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = workers {
        if n == 0 {
            return Err(PipelineError::Config("--workers must be at least 1".into()));
        }
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| PipelineError::Config(e.to_string()))?;
    Ok(pool.install(f))
}

#[derive(Debug, Clone)]
pub struct RunAllSummary {
    pub synth: SynthSummary,
    pub features: FeaturesSummary,
    pub classify: ClassifySummary,
}

impl RunAllSummary {
    pub fn exit_code(&self) -> i32 {
        self.features.exit_code()
    }
}

/// Synthesizes into `out/cohort`, then extracts features and classifies.
/// Meshes that fail feature extraction drop their subject from classification.
pub fn run_all(cfg: &PipelineConfig) -> Result<RunAllSummary, PipelineError> {
    cfg.validate()?;
    let cohort_dir = cfg.out.join("cohort");
    let synth = cmd_synth(&cohort_dir, &cfg.synth)?;
    let cfg = PipelineConfig { manifest: Some(synth.manifest.clone()), ..cfg.clone() };
    let features = cmd_features(&cfg)?;
    let classify = classify::classify_excluding(&cfg, &features.failed_subjects())?;
    Ok(RunAllSummary { synth, features, classify })
}
