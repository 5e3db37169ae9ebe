use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use morpho_ml::ClassifierKind;
use morpho_pipeline::{cmd_classify, cmd_features, cmd_synth, run_all, with_workers, PipelineConfig, PipelineError};

#[derive(Parser)]
#[command(name = "morpho", version, about = "Conformal-flow morphometry over disk-mesh cohorts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic two-class cohort of OFF patches plus manifest.csv.
    Synth(Flags),
    /// Flatten every manifest mesh and store per-vertex fields.
    Features(Flags),
    /// Entropy-encode stored fields and evaluate the classifiers.
    Classify(Flags),
    /// synth, features and classify under one output directory.
    RunAll(Flags),
}

#[derive(Args, Clone, Default)]
struct Flags {
    /// JSON configuration; flags given here override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    manifest: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Flow stopping tolerance on max |target - K|.
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    max_iters: Option<usize>,
    /// Comma-separated bin counts, one per scale.
    #[arg(long, value_delimiter = ',')]
    scales: Option<Vec<usize>>,
    /// Comma-separated subset of lr, knn, mlp.
    #[arg(long, value_delimiter = ',')]
    classifiers: Option<Vec<String>>,
    #[arg(long)]
    repeats: Option<usize>,
    #[arg(long)]
    train_frac: Option<f64>,
    /// Root seed for splits, model initialisation and synthesis.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (default: all logical cores).
    #[arg(long)]
    workers: Option<usize>,
    /// Also write per-iteration flow traces.
    #[arg(long)]
    trace: bool,
    /// Total synthetic subjects.
    #[arg(long)]
    subjects: Option<usize>,
    /// Rings of each synthetic disk.
    #[arg(long)]
    rings: Option<usize>,
}

impl Flags {
    fn resolve(self) -> Result<PipelineConfig, PipelineError> {
        let mut c = match &self.config {
            Some(p) => PipelineConfig::load(p)?,
            None => PipelineConfig::default(),
        };
        if let Some(v) = self.manifest {
            c.manifest = Some(v);
        }
        if let Some(v) = self.out {
            c.out = v;
        }
        if let Some(v) = self.epsilon {
            c.epsilon = v;
        }
        if let Some(v) = self.max_iters {
            c.max_iters = v;
        }
        if let Some(v) = self.scales {
            c.scales = v;
        }
        if let Some(v) = self.classifiers {
            c.classifiers = v.iter().map(|s| s.parse::<ClassifierKind>()).collect::<Result<_, _>>()?;
        }
        if let Some(v) = self.repeats {
            c.repeats = v;
        }
        if let Some(v) = self.train_frac {
            c.train_frac = v;
        }
        if let Some(v) = self.seed {
            c.seed = v;
            c.synth.seed = v;
        }
        if self.workers.is_some() {
            c.workers = self.workers;
        }
        c.trace |= self.trace;
        if let Some(v) = self.subjects {
            c.synth.subjects = v;
        }
        if let Some(v) = self.rings {
            c.synth.rings = v;
        }
        c.validate()?;
        Ok(c)
    }
}

fn run(command: Command) -> anyhow::Result<i32> {
    let code = match command {
        Command::Synth(f) => {
            let cfg = f.resolve()?;
            let s = with_workers(cfg.workers, || cmd_synth(&cfg.out, &cfg.synth))??;
            println!("wrote {} meshes and {}", s.files, s.manifest.display());
            0
        }
        Command::Features(f) => {
            let cfg = f.resolve()?;
            let s = with_workers(cfg.workers, || cmd_features(&cfg))??;
            report_failures(&s);
            println!("processed {} meshes into {}", s.diagnostics.len(), cfg.features_dir().display());
            s.exit_code()
        }
        Command::Classify(f) => {
            let cfg = f.resolve()?;
            let s = with_workers(cfg.workers, || cmd_classify(&cfg))??;
            print_table(&s.report);
            println!("report: {}", s.report_path.display());
            0
        }
        Command::RunAll(f) => {
            let cfg = f.resolve()?;
            let s = with_workers(cfg.workers, || run_all(&cfg))?.context("run-all")?;
            report_failures(&s.features);
            print_table(&s.classify.report);
            println!("report: {}", s.classify.report_path.display());
            s.exit_code()
        }
    };
    Ok(code)
}

fn report_failures(s: &morpho_pipeline::FeaturesSummary) {
    for d in s.failures() {
        eprintln!("failed: {} {}: {}", d.subject_id, d.region, d.error);
    }
}

fn print_table(r: &morpho_pipeline::classify::ClassifyReport) {
    println!("{:<8} {:<20} {:>16} {:>16} {:>16}", "scale", "classifier", "accuracy", "f1", "auc");
    for s in &r.scales {
        for c in &s.evaluation.classifiers {
            println!(
                "{:<8} {:<20} {:>7.4} ± {:<6.4} {:>7.4} ± {:<6.4} {:>7.4} ± {:<6.4}",
                s.scale.name.replace("Scale ", "S"),
                c.name,
                c.mean.accuracy,
                c.std.accuracy,
                c.mean.f1,
                c.std.f1,
                c.auc_mean,
                c.auc_std
            );
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = e.downcast_ref::<PipelineError>().map_or(1, PipelineError::exit_code);
            ExitCode::from(code as u8)
        }
    }
}
