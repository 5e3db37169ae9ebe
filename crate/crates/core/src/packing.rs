//! Inversive-distance circle packing metrics.
//!
//! Every vertex carries a circle of radius `gamma`, every edge a fixed
//! inversive distance `eta`; the edge length is recovered from
//! `l^2 = g_i^2 + g_j^2 + 2 g_i g_j eta_ij`. The flow rescales radii by
//! `exp(u)` while `eta` stays fixed.

use thiserror::Error;

use crate::mesh::{EdgeLengths, MeshError, TriMesh};
use crate::real::Real;

#[derive(Debug, Error)]
pub enum PackingError {
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error("vertex {vertex} gets non-positive radius {radius:e} from face {face}")]
    NonPositiveRadius { vertex: usize, face: usize, radius: f64 },
    #[error("edge {edge} collapses (squared length {squared:e})")]
    MetricCollapse { edge: usize, squared: f64 },
    #[error("expected {expected} conformal factors, got {got}")]
    FactorCount { expected: usize, got: usize },
}

/// Initial radii and inversive distances.
#[derive(Debug, Clone, PartialEq)]
pub struct PackingMetric<T> {
    gamma: Vec<T>,
    eta: Vec<T>,
}

impl<T: Real> PackingMetric<T> {
    pub fn gamma(&self) -> &[T] {
        &self.gamma
    }

    pub fn eta(&self) -> &[T] {
        &self.eta
    }

    /// Radii after applying per-vertex conformal offsets.
    pub fn scaled_radii(&self, u: &[T]) -> Vec<T> {
        self.gamma.iter().zip(u).map(|(&g, &ui)| g * ui.exp()).collect()
    }

    /// Number of edges whose circles overlap (`eta < 1`).
    pub fn intersecting_edges(&self) -> usize {
        self.eta.iter().filter(|&&e| e < T::one()).count()
    }

    pub fn min_eta(&self) -> T {
        self.eta.iter().copied().fold(T::infinity(), T::min)
    }
}

/// Corner radii per face, `(l_ij + l_ki - l_jk) / 2` at each corner.
fn corner_radii<T: Real>(opposite: [T; 3]) -> [T; 3] {
    let half = T::lit(0.5);
    let [a, b, c] = opposite;
    [(b + c - a) * half, (c + a - b) * half, (a + b - c) * half]
}

/// Builds the initial packing: minimal corner radius per vertex, then `eta` per edge.
pub fn initial_packing<T: Real>(mesh: &TriMesh<T>, lengths: &EdgeLengths<T>) -> Result<PackingMetric<T>, PackingError> {
    if lengths.len() != mesh.edge_count() {
        return Err(MeshError::LengthCount { expected: mesh.edge_count(), got: lengths.len() }.into());
    }
    let mut gamma = vec![T::infinity(); mesh.vertex_count()];
    for (f, face) in mesh.faces().iter().enumerate() {
        let radii = corner_radii(lengths.face(mesh, f));
        for k in 0..3 {
            if !(radii[k] > T::zero()) {
                return Err(PackingError::NonPositiveRadius { vertex: face[k], face: f, radius: radii[k].to_f64_lossy() });
            }
            gamma[face[k]] = gamma[face[k]].min(radii[k]);
        }
    }
    let two = T::lit(2.0);
    let eta = mesh
        .edges()
        .iter()
        .enumerate()
        .map(|(e, &[i, j])| {
            let (gi, gj, l) = (gamma[i], gamma[j], lengths[e]);
            (l * l - gi * gi - gj * gj) / (two * gi * gj)
        })
        .collect();
    Ok(PackingMetric { gamma, eta })
}

/// Squared edge length for radii `gi`, `gj` and inversive distance `eta`.
pub(crate) fn squared_length<T: Real>(gi: T, gj: T, eta: T) -> T {
    gi * gi + gj * gj + T::lit(2.0) * gi * gj * eta
}

/// Edge lengths for radii `gamma_i * exp(u_i)`.
pub fn lengths_from_packing<T: Real>(
    mesh: &TriMesh<T>,
    metric: &PackingMetric<T>,
    u: &[T],
) -> Result<EdgeLengths<T>, PackingError> {
    if u.len() != mesh.vertex_count() {
        return Err(PackingError::FactorCount { expected: mesh.vertex_count(), got: u.len() });
    }
    let radii = metric.scaled_radii(u);
    let out = mesh
        .edges()
        .iter()
        .enumerate()
        .map(|(e, &[i, j])| {
            let sq = squared_length(radii[i], radii[j], metric.eta[e]);
            if sq > T::zero() && sq.is_finite() {
                Ok(sq.sqrt())
            } else {
                Err(PackingError::MetricCollapse { edge: e, squared: sq.to_f64_lossy() })
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(EdgeLengths::new(out)?)
}
