//! Per-vertex morphometric fields derived from a converged flow.

use std::io::Write;

use crate::mesh::{gaussian_curvature, one_ring_areas, EdgeLengths, MeshError, TriMesh};
use crate::packing::PackingMetric;
use crate::real::Real;
use crate::ricci::FlowState;

/// Area distortion, conformal factor and Gaussian curvature per vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureFields<T> {
    pub area_distortion: Vec<T>,
    pub conformal_factor: Vec<T>,
    pub gaussian_curvature: Vec<T>,
}

/// The three fields, in the order they appear in feature vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Feature {
    AreaDistortion,
    ConformalFactor,
    GaussianCurvature,
}

impl Feature {
    pub const ALL: [Feature; 3] = [Feature::AreaDistortion, Feature::ConformalFactor, Feature::GaussianCurvature];

    pub fn tag(self) -> &'static str {
        match self {
            Feature::AreaDistortion => "AD",
            Feature::ConformalFactor => "CF",
            Feature::GaussianCurvature => "K",
        }
    }
}

impl<T: Real> FeatureFields<T> {
    pub fn field(&self, feature: Feature) -> &[T] {
        match feature {
            Feature::AreaDistortion => &self.area_distortion,
            Feature::ConformalFactor => &self.conformal_factor,
            Feature::GaussianCurvature => &self.gaussian_curvature,
        }
    }

    pub fn len(&self) -> usize {
        self.area_distortion.len()
    }

    pub fn is_empty(&self) -> bool {
        self.area_distortion.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        Feature::ALL.iter().all(|&f| self.field(f).iter().all(|x| x.is_finite()))
    }

    /// Same fields with vertices reordered so that new vertex `i` is old `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let p = |v: &[T]| perm.iter().map(|&i| v[i]).collect();
        Self {
            area_distortion: p(&self.area_distortion),
            conformal_factor: p(&self.conformal_factor),
            gaussian_curvature: p(&self.gaussian_curvature),
        }
    }

    /// CSV rows `vertex_id,AD,CF,K`.
    pub fn write_csv(&self, out: &mut impl Write) -> std::io::Result<()> {
        writeln!(out, "vertex_id,AD,CF,K")?;
        for v in 0..self.len() {
            writeln!(
                out,
                "{v},{:.17e},{:.17e},{:.17e}",
                self.area_distortion[v].to_f64_lossy(),
                self.conformal_factor[v].to_f64_lossy(),
                self.gaussian_curvature[v].to_f64_lossy()
            )?;
        }
        Ok(())
    }
}

/// One-ring Heron area under `initial` minus the same under `current`.
pub fn area_distortion<T: Real>(
    mesh: &TriMesh<T>,
    initial: &EdgeLengths<T>,
    current: &EdgeLengths<T>,
) -> Result<Vec<T>, MeshError> {
    let before = one_ring_areas(mesh, initial)?;
    let after = one_ring_areas(mesh, current)?;
    Ok(before.iter().zip(&after).map(|(&a, &b)| a - b).collect())
}

/// Ratio of current to initial one-ring area; diagnostic companion of [`area_distortion`].
pub fn area_ratio<T: Real>(mesh: &TriMesh<T>, initial: &EdgeLengths<T>, current: &EdgeLengths<T>) -> Result<Vec<T>, MeshError> {
    let before = one_ring_areas(mesh, initial)?;
    let after = one_ring_areas(mesh, current)?;
    Ok(before.iter().zip(&after).map(|(&a, &b)| b / a).collect())
}

/// Absolute log radius `log(gamma_i) + u_i`.
pub fn conformal_factor<T: Real>(metric: &PackingMetric<T>, u: &[T]) -> Vec<T> {
    metric.gamma().iter().zip(u).map(|(&g, &ui)| g.ln() + ui).collect()
}

/// Assembles all three fields; curvature is measured on the input metric.
pub fn extract_features<T: Real>(
    mesh: &TriMesh<T>,
    initial: &EdgeLengths<T>,
    flow: &FlowState<T>,
    metric: &PackingMetric<T>,
) -> Result<FeatureFields<T>, MeshError> {
    Ok(FeatureFields {
        area_distortion: area_distortion(mesh, initial, &flow.lengths)?,
        conformal_factor: conformal_factor(metric, &flow.u),
        gaussian_curvature: gaussian_curvature(mesh, initial)?,
    })
}
