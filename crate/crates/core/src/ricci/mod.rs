//! Euclidean discrete Ricci flow on inversive-distance packings.
//!
//! The flow evolves per-vertex conformal offsets `u` (radii `g_i exp(u_i)`)
//! by damped Newton steps on the hyperplane `sum(u) = 0` until the angle
//! defect matches the prescribed target curvature.

mod hessian;
mod newton;
mod power;

pub use hessian::{edge_weights, hessian, EdgeWeights, SparseSymmetric};
pub use newton::newton_step;
pub use power::{power_center, PowerCenter};

use std::io::Write;

use thiserror::Error;

use crate::mesh::{corner_angles, EdgeLengths, MeshError, TriMesh};
use crate::packing::{lengths_from_packing, PackingError, PackingMetric};
use crate::real::{tol, Real};

use newton::project_mean_zero;

#[derive(Debug, Error)]
pub enum RicciError {
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Packing(#[from] PackingError),
    #[error("target curvature sums to {total} but 2*pi*chi is {expected}")]
    GaussBonnet { total: f64, expected: f64 },
    #[error("expected {expected} target values, got {got}")]
    TargetCount { expected: usize, got: usize },
    #[error("conjugate gradient stopped after {iterations} iterations at relative residual {relative_residual:e}")]
    LinearSolve { iterations: usize, relative_residual: f64 },
    #[error("Hessian is not positive definite on the mean-zero subspace")]
    IndefiniteHessian,
    #[error("no valid step after {halvings} halvings at iteration {iteration}")]
    StepCollapse { iteration: usize, halvings: usize, state: Box<FlowState<f64>> },
    #[error("not converged after {} iterations (residual {:e})", .0.iteration, .0.residual)]
    NotConverged(Box<FlowState<f64>>),
}

/// Target curvature: zero inside, boundary turning in proportion to boundary edge length.
///
/// Each boundary vertex gets `2pi * s_i / sum(s)` where `s_i` is half the
/// summed length of its two boundary edges.
pub fn default_target_curvature<T: Real>(mesh: &TriMesh<T>, lengths: &EdgeLengths<T>) -> Vec<T> {
    let mut share = vec![T::zero(); mesh.vertex_count()];
    let half = T::lit(0.5);
    for (e, &[a, b]) in mesh.edges().iter().enumerate() {
        if mesh.is_boundary_edge(e) {
            share[a] = share[a] + half * lengths[e];
            share[b] = share[b] + half * lengths[e];
        }
    }
    let total: T = share.iter().copied().sum();
    if total == T::zero() {
        return share;
    }
    share.iter().map(|&s| T::TAU() * s / total).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowOptions {
    pub epsilon: f64,
    pub max_iters: usize,
    pub max_halvings: usize,
}

impl Default for FlowOptions {
    fn default() -> Self {
        Self { epsilon: 1e-6, max_iters: 64, max_halvings: 30 }
    }
}

/// One accepted Newton iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub iteration: usize,
    pub residual: f64,
    pub lambda: f64,
    /// Whether the conjugate gradient solve failed and the raw residual was used.
    pub gradient_fallback: bool,
    pub negative_weights: usize,
}

/// Mutable flow state; `u` are offsets from the initial radii.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowState<T> {
    pub u: Vec<T>,
    pub lengths: EdgeLengths<T>,
    pub curvature: Vec<T>,
    pub target: Vec<T>,
    pub iteration: usize,
    pub residual: T,
    pub trace: Vec<TraceRow>,
}

impl<T: Real> FlowState<T> {
    fn to_f64(&self) -> FlowState<f64> {
        let cv = |v: &[T]| v.iter().map(|x| x.to_f64_lossy()).collect::<Vec<f64>>();
        FlowState {
            u: cv(&self.u),
            lengths: EdgeLengths::new(cv(self.lengths.as_slice())).expect("positive lengths stay positive in f64"),
            curvature: cv(&self.curvature),
            target: cv(&self.target),
            iteration: self.iteration,
            residual: self.residual.to_f64_lossy(),
            trace: self.trace.clone(),
        }
    }

    /// Writes the iteration trace as CSV.
    pub fn write_trace_csv(&self, out: &mut impl Write) -> std::io::Result<()> {
        writeln!(out, "iteration,residual,lambda,gradient_fallback,negative_weights")?;
        for r in &self.trace {
            writeln!(out, "{},{:e},{},{},{}", r.iteration, r.residual, r.lambda, r.gradient_fallback, r.negative_weights)?;
        }
        Ok(())
    }
}

fn max_deviation<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| (x - y).abs()).fold(T::zero(), T::max)
}

/// Curvature of the packing metric at offsets `u`, or `None` if the metric is invalid.
fn evaluate<T: Real>(mesh: &TriMesh<T>, metric: &PackingMetric<T>, u: &[T]) -> Option<(EdgeLengths<T>, Vec<T>)> {
    let lengths = lengths_from_packing(mesh, metric, u).ok()?;
    let angles = corner_angles(mesh, &lengths).ok()?;
    let k = crate::mesh::curvature_from_angles(mesh, &angles);
    Some((lengths, k))
}

/// Angle-defect curvature of the packing metric at offsets `u`.
pub fn packing_curvature<T: Real>(mesh: &TriMesh<T>, metric: &PackingMetric<T>, u: &[T]) -> Result<Vec<T>, RicciError> {
    let lengths = lengths_from_packing(mesh, metric, u)?;
    Ok(crate::mesh::gaussian_curvature(mesh, &lengths)?)
}

/// Runs damped Newton iterations until `max |target - K| <= epsilon`.
///
/// Every step starts at `lambda = 1` and halves until all edges are real,
/// every face satisfies the triangle inequality and the residual does not
/// grow. A failed linear solve falls back to the gradient direction.
pub fn ricci_flow<T: Real>(
    mesh: &TriMesh<T>,
    metric: &PackingMetric<T>,
    target: &[T],
    opts: &FlowOptions,
) -> Result<FlowState<T>, RicciError> {
    let n = mesh.vertex_count();
    if target.len() != n {
        return Err(RicciError::TargetCount { expected: n, got: target.len() });
    }
    let total: T = target.iter().copied().sum();
    let expected = T::TAU() * T::lit(mesh.euler_characteristic() as f64);
    // Summation error grows with n; for f32 it dominates the fixed tolerance.
    let allowed = T::lit(tol::GAUSS_BONNET).max(T::epsilon() * T::from_count(n) * T::TAU());
    if !((total - expected).abs() <= allowed) {
        return Err(RicciError::GaussBonnet { total: total.to_f64_lossy(), expected: expected.to_f64_lossy() });
    }

    let u = vec![T::zero(); n];
    let lengths = lengths_from_packing(mesh, metric, &u)?;
    let curvature = crate::mesh::gaussian_curvature(mesh, &lengths)?;
    let residual = max_deviation(target, &curvature);
    let mut state =
        FlowState { u, lengths, curvature, target: target.to_vec(), iteration: 0, residual, trace: Vec::new() };
    let eps = T::lit(opts.epsilon);
    let half = T::lit(0.5);

    while state.residual > eps {
        if state.iteration >= opts.max_iters {
            return Err(RicciError::NotConverged(Box::new(state.to_f64())));
        }
        let radii = metric.scaled_radii(&state.u);
        let weights = edge_weights(mesh, &state.lengths, &radii)?;
        let h = hessian(mesh, &weights);
        let b: Vec<T> = target.iter().zip(&state.curvature).map(|(&kt, &k)| kt - k).collect();
        let (mut du, fallback) = match newton_step(&h, &b) {
            Ok(du) => (du, false),
            Err(RicciError::LinearSolve { .. } | RicciError::IndefiniteHessian) => (b, true),
            Err(e) => return Err(e),
        };
        project_mean_zero(&mut du);

        let mut lambda = T::one();
        let mut accepted = None;
        for _ in 0..=opts.max_halvings {
            let mut trial: Vec<T> = state.u.iter().zip(&du).map(|(&u, &d)| u + lambda * d).collect();
            project_mean_zero(&mut trial);
            if let Some((lengths, k)) = evaluate(mesh, metric, &trial) {
                let r = max_deviation(target, &k);
                if r <= state.residual {
                    accepted = Some((trial, lengths, k, r));
                    break;
                }
            }
            lambda = lambda * half;
        }
        let Some((u, lengths, k, r)) = accepted else {
            return Err(RicciError::StepCollapse {
                iteration: state.iteration,
                halvings: opts.max_halvings,
                state: Box::new(state.to_f64()),
            });
        };
        state.iteration += 1;
        state.u = u;
        state.lengths = lengths;
        state.curvature = k;
        state.residual = r;
        state.trace.push(TraceRow {
            iteration: state.iteration,
            residual: r.to_f64_lossy(),
            lambda: lambda.to_f64_lossy(),
            gradient_fallback: fallback,
            negative_weights: weights.negative_count(),
        });
    }
    Ok(state)
}
