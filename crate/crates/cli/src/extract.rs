use std::path::{Path, PathBuf};

use morpho_core::features::{extract_features, FeatureFields};
use morpho_core::layout::embed_plane;
use morpho_core::mesh::io::{load_mesh, MeshFormat};
use morpho_core::mesh::euclidean_edge_lengths;
use morpho_core::packing::initial_packing;
use morpho_core::ricci::{default_target_curvature, edge_weights, ricci_flow, FlowOptions};
use morpho_core::{Fields64, Flow64};
use rayon::prelude::*;
use serde::Serialize;

use crate::cohort::Manifest;
use crate::config::PipelineConfig;
use crate::{create_dir, csv_err, io_err, write_with, PipelineError};

/// Per-mesh flow and layout figures for `flow_diagnostics.csv`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlowDiagnostics {
    pub subject_id: String,
    pub region: String,
    pub status: &'static str,
    pub vertices: Option<usize>,
    pub faces: Option<usize>,
    pub iterations: Option<usize>,
    pub residual: Option<f64>,
    pub negative_weights: Option<usize>,
    pub max_edge_error: Option<f64>,
    pub min_face_area: Option<f64>,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeaturesSummary {
    pub diagnostics: Vec<FlowDiagnostics>,
}

impl FeaturesSummary {
    pub fn failures(&self) -> impl Iterator<Item = &FlowDiagnostics> {
        self.diagnostics.iter().filter(|d| d.status != "ok")
    }

    pub fn failed_subjects(&self) -> Vec<String> {
        let mut s: Vec<String> = self.failures().map(|d| d.subject_id.clone()).collect();
        s.dedup();
        s
    }

    pub fn exit_code(&self) -> i32 {
        if self.failures().next().is_some() {
            1
        } else {
            0
        }
    }
}

/// Directory holding one region's outputs.
pub fn region_dir(features_dir: &Path, subject: &str, region: &str) -> PathBuf {
    features_dir.join(subject).join(region)
}

pub struct MeshResult {
    pub fields: Fields64,
    pub flow: Flow64,
    pub embedding: morpho_core::Embedding64,
    pub radii: Vec<f64>,
    pub negative_weights: usize,
    pub min_face_area: f64,
    /// Largest relative edge-length error of the embedding.
    pub max_edge_error: f64,
}

/// Validation, packing, flow, layout and feature extraction for one mesh file.
pub fn process_mesh(path: &Path, opts: &FlowOptions) -> Result<MeshResult, String> {
    let format = MeshFormat::from_path(path).ok_or_else(|| format!("unknown mesh extension: {}", path.display()))?;
    let mesh = load_mesh::<f64>(path, format).map_err(|e| e.to_string())?;
    mesh.require_disk().map_err(|e| e.to_string())?;
    let lengths = euclidean_edge_lengths(&mesh).map_err(|e| e.to_string())?;
    let packing = initial_packing(&mesh, &lengths).map_err(|e| e.to_string())?;
    let target = default_target_curvature(&mesh, &lengths);
    let flow = ricci_flow(&mesh, &packing, &target, opts).map_err(|e| e.to_string())?;
    let radii = packing.scaled_radii(&flow.u);
    let negative_weights = edge_weights(&mesh, &flow.lengths, &radii).map_err(|e| e.to_string())?.negative_count();
    let embedding = embed_plane(&mesh, &flow.lengths).map_err(|e| e.to_string())?;
    let fields = extract_features(&mesh, &lengths, &flow, &packing).map_err(|e| e.to_string())?;
    if !fields.is_finite() {
        return Err("non-finite feature value".into());
    }
    let min_face_area = embedding.min_signed_area(&mesh);
    let max_edge_error = embedding.max_relative_edge_error(&mesh, &flow.lengths);
    Ok(MeshResult { fields, flow, embedding, radii, negative_weights, min_face_area, max_edge_error })
}

fn write_region(dir: &Path, r: &MeshResult, trace: bool) -> Result<(), PipelineError> {
    create_dir(dir)?;
    write_with(&dir.join("fields.csv"), |w| r.fields.write_csv(w))?;
    write_with(&dir.join("embedding.csv"), |w| r.embedding.write_csv(w))?;
    write_with(&dir.join("circles.csv"), |w| r.embedding.write_circles_csv(&r.radii, w))?;
    if trace {
        write_with(&dir.join("trace.csv"), |w| r.flow.write_trace_csv(w))?;
    }
    Ok(())
}

/// Processes every manifest row on the current pool and writes
/// `features/<subject>/<region>/*.csv`, `flow_diagnostics.csv` and
/// `errors.log`. A failing mesh is recorded and skipped.
pub fn cmd_features(cfg: &PipelineConfig) -> Result<FeaturesSummary, PipelineError> {
    cfg.validate()?;
    let manifest = Manifest::load(cfg.manifest_path()?)?;
    let out = cfg.features_dir();
    create_dir(&out)?;
    let opts = cfg.flow_options();
    let diagnostics = (0..manifest.rows.len())
        .into_par_iter()
        .map(|i| -> Result<FlowDiagnostics, PipelineError> {
            let row = &manifest.rows[i];
            let dir = region_dir(&out, &row.subject_id, &row.region);
            let mut d = FlowDiagnostics {
                subject_id: row.subject_id.clone(),
                region: row.region.clone(),
                status: "ok",
                vertices: None,
                faces: None,
                iterations: None,
                residual: None,
                negative_weights: None,
                max_edge_error: None,
                min_face_area: None,
                error: String::new(),
            };
            match process_mesh(&manifest.mesh_path(i), &opts) {
                Ok(r) => {
                    d.vertices = Some(r.fields.len());
                    d.faces = Some(r.embedding.order.len());
                    d.iterations = Some(r.flow.iteration);
                    d.residual = Some(r.flow.residual);
                    d.negative_weights = Some(r.negative_weights);
                    d.max_edge_error = Some(r.max_edge_error);
                    d.min_face_area = Some(r.min_face_area);
                    write_region(&dir, &r, cfg.trace)?;
                }
                Err(e) => {
                    d.status = "failed";
                    d.error = e;
                    let stale = dir.join("fields.csv");
                    if stale.exists() {
                        std::fs::remove_file(&stale).map_err(io_err(&stale))?;
                    }
                }
            }
            Ok(d)
        })
        .collect::<Result<Vec<_>, _>>()?;

    let diag_path = out.join("flow_diagnostics.csv");
    let mut w = csv::Writer::from_path(&diag_path).map_err(csv_err(&diag_path))?;
    for d in &diagnostics {
        w.serialize(d).map_err(csv_err(&diag_path))?;
    }
    w.flush().map_err(io_err(&diag_path))?;
    let summary = FeaturesSummary { diagnostics };
    write_with(&out.join("errors.log"), |w| {
        use std::io::Write;
        for d in summary.failures() {
            writeln!(w, "{} {}: {}", d.subject_id, d.region, d.error)?;
        }
        Ok(())
    })?;
    Ok(summary)
}

/// Reads a `vertex_id,AD,CF,K` file back.
pub fn read_fields(path: &Path) -> Result<FeatureFields<f64>, PipelineError> {
    let mut reader = csv::Reader::from_path(path).map_err(csv_err(path))?;
    let mut f = FeatureFields { area_distortion: Vec::new(), conformal_factor: Vec::new(), gaussian_curvature: Vec::new() };
    for (i, rec) in reader.deserialize::<(usize, f64, f64, f64)>().enumerate() {
        let (v, ad, cf, k) = rec.map_err(csv_err(path))?;
        if v != i {
            return Err(PipelineError::Config(format!("{}: vertex ids must be 0..n in order", path.display())));
        }
        f.area_distortion.push(ad);
        f.conformal_factor.push(cf);
        f.gaussian_curvature.push(k);
    }
    Ok(f)
}
