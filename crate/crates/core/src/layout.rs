//! Isometric planar embedding of a flat metric by face BFS.

use std::collections::VecDeque;
use std::io::Write;

use thiserror::Error;

use crate::mesh::{corner_angles, EdgeLengths, MeshError, TriMesh};
use crate::real::{tol, Real};

#[derive(Debug, Error)]
pub enum LayoutError {
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error("circles around placed vertices of face {face} do not intersect (gap {gap:e})")]
    CircleIntersection { face: usize, gap: f64 },
    #[error("mesh has no faces")]
    Empty,
}

/// Planar coordinates per vertex plus the face visiting order.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarEmbedding<T> {
    pub phi: Vec<[T; 2]>,
    pub order: Vec<usize>,
    /// Largest mismatch between a face's edge length and the distance of
    /// its already-placed endpoints when a face closes a loop.
    pub max_reprojection_error: T,
}

fn sub<T: Real>(a: [T; 2], b: [T; 2]) -> [T; 2] {
    [a[0] - b[0], a[1] - b[1]]
}

fn dist<T: Real>(a: [T; 2], b: [T; 2]) -> T {
    let d = sub(a, b);
    (d[0] * d[0] + d[1] * d[1]).sqrt()
}

fn cross<T: Real>(a: [T; 2], b: [T; 2]) -> T {
    a[0] * b[1] - a[1] * b[0]
}

impl<T: Real> PlanarEmbedding<T> {
    /// Twice the signed area of face `f`.
    pub fn signed_area2(&self, mesh: &TriMesh<T>, f: usize) -> T {
        let [a, b, c] = mesh.faces()[f];
        cross(sub(self.phi[b], self.phi[a]), sub(self.phi[c], self.phi[a]))
    }

    pub fn min_signed_area(&self, mesh: &TriMesh<T>) -> T {
        (0..mesh.face_count()).map(|f| self.signed_area2(mesh, f) * T::lit(0.5)).fold(T::infinity(), T::min)
    }

    /// Largest `| |phi_i - phi_j| - l_ij | / l_ij` over all edges.
    pub fn max_relative_edge_error(&self, mesh: &TriMesh<T>, lengths: &EdgeLengths<T>) -> T {
        mesh.edges()
            .iter()
            .enumerate()
            .map(|(e, &[a, b])| (dist(self.phi[a], self.phi[b]) - lengths[e]).abs() / lengths[e])
            .fold(T::zero(), T::max)
    }

    /// CSV rows `vertex_id,x,y`.
    pub fn write_csv(&self, out: &mut impl Write) -> std::io::Result<()> {
        writeln!(out, "vertex_id,x,y")?;
        for (v, p) in self.phi.iter().enumerate() {
            writeln!(out, "{v},{:.17e},{:.17e}", p[0].to_f64_lossy(), p[1].to_f64_lossy())?;
        }
        Ok(())
    }

    /// CSV rows `vertex_id,x,y,radius` for the packing circles.
    pub fn write_circles_csv(&self, radii: &[T], out: &mut impl Write) -> std::io::Result<()> {
        writeln!(out, "vertex_id,x,y,radius")?;
        for (v, (p, r)) in self.phi.iter().zip(radii).enumerate() {
            writeln!(out, "{v},{:.17e},{:.17e},{:.17e}", p[0].to_f64_lossy(), p[1].to_f64_lossy(), r.to_f64_lossy())?;
        }
        Ok(())
    }

    /// OBJ with `z = 0`.
    pub fn write_obj(&self, mesh: &TriMesh<T>, out: &mut impl Write) -> std::io::Result<()> {
        let pts: Vec<[f64; 3]> = self.phi.iter().map(|p| [p[0].to_f64_lossy(), p[1].to_f64_lossy(), 0.0]).collect();
        crate::mesh::io::write_obj(&pts, mesh.faces(), out)
    }
}

/// Places the third corner of a face with corners `a`, `b` already placed,
/// to the left of `a -> b`.
fn place_third<T: Real>(pa: [T; 2], pb: [T; 2], r_a: T, r_b: T, face: usize) -> Result<[T; 2], LayoutError> {
    let d = dist(pa, pb);
    let band = T::lit(tol::LAYOUT) * (d + r_a + r_b);
    let too_far = d - (r_a + r_b);
    let too_close = (r_a - r_b).abs() - d;
    if too_far > band || too_close > band {
        return Err(LayoutError::CircleIntersection { face, gap: too_far.max(too_close).to_f64_lossy() });
    }
    let two = T::lit(2.0);
    let x = (d * d + r_a * r_a - r_b * r_b) / (two * d);
    let y = (r_a * r_a - x * x).max(T::zero()).sqrt();
    let e = [(pb[0] - pa[0]) / d, (pb[1] - pa[1]) / d];
    Ok([pa[0] + x * e[0] - y * e[1], pa[1] + x * e[1] + y * e[0]])
}

/// Embeds a disk mesh with the given (flat) metric into the plane.
///
/// The lowest-index face is the seed, laid out with its first vertex at the
/// origin and second on the positive x-axis. Faces are visited in BFS order,
/// neighbours enqueued by ascending index. A vertex keeps its first position.
pub fn embed_plane<T: Real>(mesh: &TriMesh<T>, lengths: &EdgeLengths<T>) -> Result<PlanarEmbedding<T>, LayoutError> {
    if mesh.face_count() == 0 {
        return Err(LayoutError::Empty);
    }
    let n = mesh.vertex_count();
    let mut phi: Vec<Option<[T; 2]>> = vec![None; n];
    let mut queued = vec![false; mesh.face_count()];
    let mut order = Vec::with_capacity(mesh.face_count());
    let mut max_err = T::zero();

    let seed = 0;
    let [a, b, c] = mesh.faces()[seed];
    let [_, l_ca, l_ab] = lengths.face(mesh, seed);
    let theta = corner_angles(mesh, lengths)?[seed][0];
    phi[a] = Some([T::zero(), T::zero()]);
    phi[b] = Some([l_ab, T::zero()]);
    phi[c] = Some([l_ca * theta.cos(), l_ca * theta.sin()]);

    let mut queue = VecDeque::new();
    queued[seed] = true;
    queue.push_back(seed);
    while let Some(f) = queue.pop_front() {
        let face = mesh.faces()[f];
        let placed: Vec<usize> = (0..3).filter(|&k| phi[face[k]].is_some()).collect();
        let opposite = lengths.face(mesh, f);
        match placed.len() {
            3 => {
                for k in 0..3 {
                    let (p, q) = (face[(k + 1) % 3], face[(k + 2) % 3]);
                    let d = dist(phi[p].unwrap(), phi[q].unwrap());
                    max_err = max_err.max((d - opposite[k]).abs() / opposite[k]);
                }
            }
            2 => {
                // Rotate so the missing corner is k; (k+1, k+2) are placed.
                let k = (0..3).find(|&k| phi[face[k]].is_none()).unwrap();
                let (ia, ib) = (face[(k + 1) % 3], face[(k + 2) % 3]);
                let (pa, pb) = (phi[ia].unwrap(), phi[ib].unwrap());
                // Corner k sits left of (k+1 -> k+2); radii are the sides from each placed corner.
                let r_a = opposite[(k + 2) % 3];
                let r_b = opposite[(k + 1) % 3];
                max_err = max_err.max((dist(pa, pb) - opposite[k]).abs() / opposite[k]);
                phi[face[k]] = Some(place_third(pa, pb, r_a, r_b, f)?);
            }
            _ => unreachable!("BFS reaches faces through a shared, placed edge"),
        }
        order.push(f);
        let mut next: Vec<usize> = mesh.face_neighbors(f).into_iter().flatten().filter(|&g| !queued[g]).collect();
        next.sort_unstable();
        for g in next {
            queued[g] = true;
            queue.push_back(g);
        }
    }
    let phi = phi.into_iter().map(|p| p.expect("connected mesh places every vertex")).collect();
    Ok(PlanarEmbedding { phi, order, max_reprojection_error: max_err })
}
