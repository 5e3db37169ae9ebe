use std::path::Path;

use morpho_core::entropy::{encode_subject, vector_columns, FeatureBinning, FeatureVector, Scale};
use morpho_core::Fields64;
use morpho_ml::eval::WelchComparison;
use morpho_ml::metrics::Metrics;
use morpho_ml::{repeated_splits_with, Dataset, EvalReport};
use serde::Serialize;

use crate::cohort::{Manifest, Subject};
use crate::config::PipelineConfig;
use crate::extract::{read_fields, region_dir};
use crate::{create_dir, csv_err, io_err, write_with, PipelineError};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScaleReport {
    pub scale: Scale,
    pub evaluation: EvalReport,
    pub welch: Vec<WelchComparison>,
}

/// Everything written to `report.json`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassifyReport {
    pub subjects: usize,
    pub regions: Vec<String>,
    pub excluded: Vec<String>,
    pub scales: Vec<ScaleReport>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassifySummary {
    pub report: ClassifyReport,
    pub report_path: std::path::PathBuf,
}

struct Cohort {
    subjects: Vec<Subject>,
    fields: Vec<Vec<Fields64>>,
    regions: Vec<String>,
}

fn load_cohort(cfg: &PipelineConfig, exclude: &[String]) -> Result<Cohort, PipelineError> {
    let manifest = Manifest::load(cfg.manifest_path()?)?;
    let dir = cfg.features_dir();
    let subjects: Vec<Subject> = manifest.subjects.iter().filter(|s| !exclude.contains(&s.id)).cloned().collect();
    let mut missing = Vec::new();
    let mut fields = Vec::with_capacity(subjects.len());
    for s in &subjects {
        let paths: Vec<_> = manifest.regions.iter().map(|r| region_dir(&dir, &s.id, r).join("fields.csv")).collect();
        if paths.iter().any(|p| !p.is_file()) {
            missing.push(s.id.clone());
            continue;
        }
        fields.push(paths.iter().map(|p| read_fields(p)).collect::<Result<Vec<_>, _>>()?);
    }
    if !missing.is_empty() {
        return Err(PipelineError::MissingFeatures(missing));
    }
    Ok(Cohort { subjects, fields, regions: manifest.regions })
}

impl Cohort {
    fn fit(&self, scale: &Scale, subjects: &[usize]) -> Result<FeatureBinning, PipelineError> {
        Ok(FeatureBinning::fit(scale, subjects.iter().flat_map(|&s| self.fields[s].iter()))?)
    }

    fn encode(&self, binning: &FeatureBinning, subjects: &[usize]) -> Result<Vec<FeatureVector>, PipelineError> {
        subjects
            .iter()
            .map(|&s| {
                let subject = &self.subjects[s];
                Ok(encode_subject(&subject.id, subject.label, &self.fields[s], self.regions.len(), binning)?)
            })
            .collect()
    }
}

/// Entropy encoding and repeated-split evaluation per scale.
///
/// Inside each split the bin ranges come from the training subjects only.
/// The exported `vectors_*.csv` and `binning_*.json` use ranges fitted on the
/// whole cohort.
pub fn cmd_classify(cfg: &PipelineConfig) -> Result<ClassifySummary, PipelineError> {
    classify_excluding(cfg, &[])
}

pub fn classify_excluding(cfg: &PipelineConfig, exclude: &[String]) -> Result<ClassifySummary, PipelineError> {
    cfg.validate()?;
    let cohort = load_cohort(cfg, exclude)?;
    let labels: Vec<_> = cohort.subjects.iter().map(|s| s.label).collect();
    let classifiers = cfg.classifier_list();
    let opts = cfg.split_options();
    let out = cfg.report_dir();
    create_dir(&out)?;

    let mut scales = Vec::new();
    for (si, scale) in cfg.scale_list().into_iter().enumerate() {
        let evaluation = repeated_splits_with(&labels, &opts, &classifiers, |_, train, test| {
            let binning = cohort.fit(&scale, train)?;
            let tr = Dataset::from_vectors(&cohort.encode(&binning, train)?)?;
            let te = Dataset::from_vectors(&cohort.encode(&binning, test)?)?;
            Ok::<_, PipelineError>((tr, te))
        })?;
        let welch = evaluation.welch_vs_best()?;

        let all: Vec<usize> = (0..cohort.subjects.len()).collect();
        let binning = cohort.fit(&scale, &all)?;
        let tag = format!("scale{}", si + 1);
        write_vectors(&out.join(format!("vectors_{tag}.csv")), &cohort.regions, &cohort.encode(&binning, &all)?)?;
        let bpath = out.join(format!("binning_{tag}.json"));
        write_with(&bpath, |w| serde_json::to_writer_pretty(&mut *w, &binning).map_err(std::io::Error::other))?;
        for c in &evaluation.classifiers {
            write_confusion(&out.join(format!("confusion_{tag}_{}.csv", c.classifier)), c)?;
            write_with(&out.join(format!("roc_{tag}_{}.csv", c.classifier)), |w| c.roc.write_csv(w))?;
        }
        scales.push(ScaleReport { scale, evaluation, welch });
    }

    let report = ClassifyReport {
        subjects: cohort.subjects.len(),
        regions: cohort.regions.clone(),
        excluded: exclude.to_vec(),
        scales,
    };
    write_table(&out.join("summary.csv"), &report)?;
    write_welch(&out.join("welch.csv"), &report)?;
    let report_path = out.join("report.json");
    write_with(&report_path, |w| serde_json::to_writer_pretty(&mut *w, &report).map_err(std::io::Error::other))?;
    Ok(ClassifySummary { report, report_path })
}

fn write_vectors(path: &Path, regions: &[String], vectors: &[FeatureVector]) -> Result<(), PipelineError> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    let mut header = vec!["subject_id".to_string(), "label".to_string()];
    header.extend(vector_columns(regions));
    w.write_record(&header).map_err(csv_err(path))?;
    for v in vectors {
        let mut rec = vec![v.subject_id.clone(), v.label.to_string()];
        rec.extend(v.values.iter().map(|x| x.to_string()));
        w.write_record(&rec).map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

fn write_confusion(path: &Path, c: &morpho_ml::ClassifierReport) -> Result<(), PipelineError> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    w.write_record(["split", "tp", "fn", "fp", "tn"]).map_err(csv_err(path))?;
    let rows = c.splits.iter().enumerate().map(|(i, s)| (i.to_string(), s.confusion)).chain([("total".to_string(), c.confusion)]);
    for (name, m) in rows {
        w.write_record([name, m.tp.to_string(), m.fn_.to_string(), m.fp.to_string(), m.tn.to_string()]).map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

fn write_table(path: &Path, report: &ClassifyReport) -> Result<(), PipelineError> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    let mut header = vec!["scale".to_string(), "n_bins".to_string(), "classifier".to_string()];
    for m in Metrics::NAMES.iter().chain(&["auc"]) {
        header.push(format!("{m}_mean"));
        header.push(format!("{m}_std"));
    }
    w.write_record(&header).map_err(csv_err(path))?;
    for s in &report.scales {
        for c in &s.evaluation.classifiers {
            let mut rec = vec![s.scale.name.clone(), s.scale.n_bins.to_string(), c.name.clone()];
            let (mean, std) = (c.mean.as_array(), c.std.as_array());
            for k in 0..5 {
                rec.push(format!("{:.4}", mean[k]));
                rec.push(format!("{:.4}", std[k]));
            }
            rec.push(format!("{:.4}", c.auc_mean));
            rec.push(format!("{:.4}", c.auc_std));
            w.write_record(&rec).map_err(csv_err(path))?;
        }
    }
    w.flush().map_err(io_err(path))
}

fn write_welch(path: &Path, report: &ClassifyReport) -> Result<(), PipelineError> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    w.write_record(["scale", "best", "other", "t", "dof", "p"]).map_err(csv_err(path))?;
    for s in &report.scales {
        for c in &s.welch {
            let (t, dof, p) = match c.result {
                Some(r) => (format!("{:.4}", r.t), format!("{:.2}", r.degrees_of_freedom), format!("{:.4}", r.p)),
                None => (String::new(), String::new(), String::new()),
            };
            w.write_record([s.scale.name.clone(), c.best.display_name().into(), c.other.display_name().into(), t, dof, p])
                .map_err(csv_err(path))?;
        }
    }
    w.flush().map_err(io_err(path))
}
