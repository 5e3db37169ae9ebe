use std::collections::HashMap;
use std::path::{Path, PathBuf};

use morpho_core::mesh::io::save_off;
use morpho_core::synth::{make_subject, substream_seed, SubjectClass, SynthSpec};
use morpho_core::Label;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::SynthConfig;
use crate::{create_dir, csv_err, PipelineError};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestRow {
    pub subject_id: String,
    pub region: String,
    pub path: String,
    pub label: Label,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subject {
    pub id: String,
    pub label: Label,
    /// Manifest row per region, in [`Manifest::regions`] order.
    pub rows: Vec<usize>,
}

/// Parsed manifest; relative mesh paths resolve against its directory.
#[derive(Debug, Clone, PartialEq)]
pub struct Manifest {
    pub rows: Vec<ManifestRow>,
    pub base: PathBuf,
    pub regions: Vec<String>,
    pub subjects: Vec<Subject>,
}

fn check_id(kind: &str, id: &str) -> Result<(), PipelineError> {
    let ok = !id.is_empty() && id.chars().all(|c| c.is_ascii_alphanumeric() || "-_.".contains(c)) && id != "." && id != "..";
    if ok {
        Ok(())
    } else {
        Err(PipelineError::Config(format!("{kind} {id:?} must be non-empty ASCII letters, digits, '-', '_' or '.'")))
    }
}

impl Manifest {
    pub fn load(path: &Path) -> Result<Self, PipelineError> {
        let mut reader = csv::Reader::from_path(path).map_err(csv_err(path))?;
        let rows = reader.deserialize().collect::<Result<Vec<ManifestRow>, _>>().map_err(csv_err(path))?;
        Self::from_rows(rows, path.parent().unwrap_or(Path::new(".")).to_path_buf())
    }

    /// Groups rows by subject in first-appearance order. Every subject must
    /// list the same regions with one label.
    pub fn from_rows(rows: Vec<ManifestRow>, base: PathBuf) -> Result<Self, PipelineError> {
        if rows.is_empty() {
            return Err(PipelineError::Config("manifest has no rows".into()));
        }
        let mut regions: Vec<String> = Vec::new();
        for r in &rows {
            check_id("subject_id", &r.subject_id)?;
            check_id("region", &r.region)?;
            if !regions.contains(&r.region) {
                regions.push(r.region.clone());
            }
        }
        let mut index: HashMap<&str, usize> = HashMap::new();
        let mut subjects: Vec<Subject> = Vec::new();
        let mut slots: Vec<Vec<Option<usize>>> = Vec::new();
        for (i, r) in rows.iter().enumerate() {
            let s = *index.entry(&r.subject_id).or_insert_with(|| {
                subjects.push(Subject { id: r.subject_id.clone(), label: r.label, rows: Vec::new() });
                slots.push(vec![None; regions.len()]);
                subjects.len() - 1
            });
            if subjects[s].label != r.label {
                return Err(PipelineError::Config(format!("subject {} has conflicting labels", r.subject_id)));
            }
            let k = regions.iter().position(|g| *g == r.region).expect("region collected above");
            if slots[s][k].replace(i).is_some() {
                return Err(PipelineError::Config(format!("subject {} lists region {} twice", r.subject_id, r.region)));
            }
        }
        for (subject, slot) in subjects.iter_mut().zip(slots) {
            subject.rows = slot
                .into_iter()
                .enumerate()
                .map(|(k, r)| {
                    r.ok_or_else(|| PipelineError::Config(format!("subject {} lacks region {}", subject.id, regions[k])))
                })
                .collect::<Result<_, _>>()?;
        }
        Ok(Self { rows, base, regions, subjects })
    }

    pub fn mesh_path(&self, row: usize) -> PathBuf {
        self.base.join(&self.rows[row].path)
    }

    pub fn labels(&self) -> Vec<Label> {
        self.subjects.iter().map(|s| s.label).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthSummary {
    pub manifest: PathBuf,
    pub files: usize,
}

/// Writes `subjects x regions` OFF files and `manifest.csv` into `out`.
///
/// The first half of the subjects are atrophied (AD), the rest smooth (CN).
/// Each patch seeds from `(seed, subject, region)`.
pub fn cmd_synth(out: &Path, cfg: &SynthConfig) -> Result<SynthSummary, PipelineError> {
    if cfg.subjects == 0 || cfg.rings == 0 || cfg.regions.is_empty() {
        return Err(PipelineError::Config("synth needs subjects, rings and regions".into()));
    }
    for r in &cfg.regions {
        check_id("region", r)?;
    }
    create_dir(out)?;
    let n_ad = cfg.subjects.div_ceil(2);
    let jobs: Vec<(usize, usize)> = (0..cfg.subjects).flat_map(|s| (0..cfg.regions.len()).map(move |r| (s, r))).collect();
    let rows = jobs
        .par_iter()
        .map(|&(s, r)| {
            let class = if s < n_ad { SubjectClass::Atrophied } else { SubjectClass::Smooth };
            let spec = SynthSpec::for_class(class, cfg.rings, substream_seed(cfg.seed, &[2, s as u64, r as u64]));
            let (mesh, label) = make_subject::<f64>(&spec);
            let subject_id = format!("sub-{:04}", s + 1);
            let file = format!("{subject_id}_{}.off", cfg.regions[r]);
            let path = out.join(&file);
            save_off(&mesh, &path).map_err(crate::io_err(&path))?;
            Ok(ManifestRow { subject_id, region: cfg.regions[r].clone(), path: file, label })
        })
        .collect::<Result<Vec<_>, PipelineError>>()?;
    let manifest = out.join("manifest.csv");
    let mut w = csv::Writer::from_path(&manifest).map_err(csv_err(&manifest))?;
    for row in &rows {
        w.serialize(row).map_err(csv_err(&manifest))?;
    }
    w.flush().map_err(crate::io_err(&manifest))?;
    Ok(SynthSummary { manifest, files: rows.len() })
}
