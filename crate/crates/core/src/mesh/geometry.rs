use super::{MeshError, TriMesh};
use crate::real::{tol, Real};

/// Positive per-edge lengths, indexed like [`TriMesh::edges`].
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeLengths<T>(Vec<T>);

impl<T: Real> EdgeLengths<T> {
    /// Wraps raw lengths after checking positivity and finiteness.
    pub fn new(values: Vec<T>) -> Result<Self, MeshError> {
        if let Some(index) = values.iter().position(|l| !(l.is_finite() && *l > T::zero())) {
            return Err(MeshError::InvalidLength { index });
        }
        Ok(Self(values))
    }

    /// Wraps lengths checking the count against `mesh` and every face's triangle inequality.
    pub fn for_mesh(mesh: &TriMesh<T>, values: Vec<T>) -> Result<Self, MeshError> {
        if values.len() != mesh.edge_count() {
            return Err(MeshError::LengthCount { expected: mesh.edge_count(), got: values.len() });
        }
        let lengths = Self::new(values)?;
        for f in 0..mesh.face_count() {
            let [a, b, c] = lengths.face(mesh, f);
            if !strict_triangle(a, b, c) {
                return Err(MeshError::TriangleInequality { face: f });
            }
        }
        Ok(lengths)
    }

    pub fn as_slice(&self) -> &[T] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<T> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Lengths of the edges opposite to the corners of face `f`.
    pub fn face(&self, mesh: &TriMesh<T>, f: usize) -> [T; 3] {
        mesh.face_edges(f).map(|e| self.0[e])
    }

    /// All lengths multiplied by `s`.
    pub fn scaled(&self, s: T) -> Self {
        Self(self.0.iter().map(|&l| l * s).collect())
    }
}

impl<T> std::ops::Index<usize> for EdgeLengths<T> {
    type Output = T;
    fn index(&self, e: usize) -> &T {
        &self.0[e]
    }
}

fn strict_triangle<T: Real>(a: T, b: T, c: T) -> bool {
    a < b + c && b < c + a && c < a + b
}

/// Euclidean length of every mesh edge.
pub fn euclidean_edge_lengths<T: Real>(mesh: &TriMesh<T>) -> Result<EdgeLengths<T>, MeshError> {
    let p = mesh.vertices();
    let eps = T::lit(tol::LENGTH);
    let mut out = Vec::with_capacity(mesh.edge_count());
    for (e, &[a, b]) in mesh.edges().iter().enumerate() {
        let d = (0..3).map(|k| (p[a][k] - p[b][k]).powi(2)).sum::<T>().sqrt();
        if !(d >= eps) {
            return Err(MeshError::DegenerateEdge { edge: e, length: d.to_f64_lossy() });
        }
        out.push(d);
    }
    Ok(EdgeLengths(out))
}

/// Interior angle at the corner between sides `b` and `c`, opposite side `a`.
pub(crate) fn law_of_cosines<T: Real>(a: T, b: T, c: T) -> T {
    let cos = (b * b + c * c - a * a) / (T::lit(2.0) * b * c);
    cos.max(-T::one()).min(T::one()).acos()
}

/// Corner angles of every face, ordered like the face's vertices.
pub fn corner_angles<T: Real>(mesh: &TriMesh<T>, lengths: &EdgeLengths<T>) -> Result<Vec<[T; 3]>, MeshError> {
    check_count(mesh, lengths)?;
    (0..mesh.face_count())
        .map(|f| {
            let [la, lb, lc] = lengths.face(mesh, f);
            if !strict_triangle(la, lb, lc) {
                return Err(MeshError::TriangleInequality { face: f });
            }
            Ok([law_of_cosines(la, lb, lc), law_of_cosines(lb, lc, la), law_of_cosines(lc, la, lb)])
        })
        .collect()
}

/// Angle defect per vertex: `2pi - sum` inside, `pi - sum` on the boundary.
pub fn gaussian_curvature<T: Real>(mesh: &TriMesh<T>, lengths: &EdgeLengths<T>) -> Result<Vec<T>, MeshError> {
    let angles = corner_angles(mesh, lengths)?;
    Ok(curvature_from_angles(mesh, &angles))
}

pub(crate) fn curvature_from_angles<T: Real>(mesh: &TriMesh<T>, angles: &[[T; 3]]) -> Vec<T> {
    let mut sums = vec![T::zero(); mesh.vertex_count()];
    for (face, theta) in mesh.faces().iter().zip(angles) {
        for k in 0..3 {
            sums[face[k]] = sums[face[k]] + theta[k];
        }
    }
    sums.iter()
        .enumerate()
        .map(|(v, &s)| {
            let full = if mesh.is_boundary_vertex(v) { T::PI() } else { T::TAU() };
            full - s
        })
        .collect()
}

/// Triangle area from side lengths (Kahan's stable Heron form).
pub fn heron_area<T: Real>(a: T, b: T, c: T) -> T {
    let mut s = [a, b, c];
    s.sort_by(|x, y| y.partial_cmp(x).unwrap_or(std::cmp::Ordering::Equal));
    let [a, b, c] = s;
    let prod = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c));
    prod.max(T::zero()).sqrt() * T::lit(0.25)
}

pub fn face_areas<T: Real>(mesh: &TriMesh<T>, lengths: &EdgeLengths<T>) -> Result<Vec<T>, MeshError> {
    check_count(mesh, lengths)?;
    (0..mesh.face_count())
        .map(|f| {
            let [a, b, c] = lengths.face(mesh, f);
            if !strict_triangle(a, b, c) {
                return Err(MeshError::TriangleInequality { face: f });
            }
            Ok(heron_area(a, b, c))
        })
        .collect()
}

/// Sum of incident face areas per vertex.
pub fn one_ring_areas<T: Real>(mesh: &TriMesh<T>, lengths: &EdgeLengths<T>) -> Result<Vec<T>, MeshError> {
    let areas = face_areas(mesh, lengths)?;
    Ok((0..mesh.vertex_count()).map(|v| mesh.vertex_faces(v).iter().map(|&f| areas[f]).sum()).collect())
}

fn check_count<T: Real>(mesh: &TriMesh<T>, lengths: &EdgeLengths<T>) -> Result<(), MeshError> {
    if lengths.len() != mesh.edge_count() {
        return Err(MeshError::LengthCount { expected: mesh.edge_count(), got: lengths.len() });
    }
    Ok(())
}
