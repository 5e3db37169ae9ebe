//! Indexed triangle meshes with validated manifold topology.
//!
//! A [`TriMesh`] owns vertex positions and faces and derives the undirected
//! edge set together with the incidence tables every later stage needs
//! (edge to faces, vertex to faces, vertex to edges, boundary flags).
//! Construction rejects anything that is not a single, consistently
//! oriented, edge-manifold component.

mod geometry;
pub mod io;

pub(crate) use geometry::curvature_from_angles;

pub use geometry::{
    corner_angles, euclidean_edge_lengths, face_areas, gaussian_curvature, heron_area, one_ring_areas,
    EdgeLengths,
};

use std::collections::HashMap;

use thiserror::Error;

use crate::real::Real;

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("face {face} references invalid or repeated vertex indices {indices:?}")]
    BadFace { face: usize, indices: [usize; 3] },
    #[error("edge ({0}, {1}) is shared by more than two faces")]
    NonManifoldEdge(usize, usize),
    #[error("edge ({0}, {1}) is traversed in the same direction by two faces")]
    InconsistentOrientation(usize, usize),
    #[error("mesh has {0} connected components (expected 1)")]
    Components(usize),
    #[error("vertex {0} is not referenced by any face")]
    IsolatedVertex(usize),
    #[error("mesh is not a topological disk: {0}")]
    NotDisk(String),
    #[error("edge {edge} is degenerate (length {length:e})")]
    DegenerateEdge { edge: usize, length: f64 },
    #[error("face {face} violates the triangle inequality")]
    TriangleInequality { face: usize },
    #[error("expected {expected} edge lengths, got {got}")]
    LengthCount { expected: usize, got: usize },
    #[error("edge length {index} is not positive and finite")]
    InvalidLength { index: usize },
}

/// Triangle mesh with derived adjacency.
///
/// Edges are stored as `(min, max)` vertex pairs in order of first
/// appearance while scanning faces. For a face `[a, b, c]`,
/// `face_edges[f]` lists the edges opposite to `a`, `b` and `c`.
#[derive(Debug, Clone, PartialEq)]
pub struct TriMesh<T> {
    vertices: Vec<[T; 3]>,
    faces: Vec<[usize; 3]>,
    edges: Vec<[usize; 2]>,
    edge_faces: Vec<[Option<usize>; 2]>,
    face_edges: Vec<[usize; 3]>,
    vertex_faces: Vec<Vec<usize>>,
    vertex_edges: Vec<Vec<usize>>,
    boundary: Vec<bool>,
}

impl<T: Real> TriMesh<T> {
    /// Builds the mesh and validates manifoldness, orientation and connectivity.
    pub fn new(vertices: Vec<[T; 3]>, faces: Vec<[usize; 3]>) -> Result<Self, MeshError> {
        let nv = vertices.len();
        for (f, &[a, b, c]) in faces.iter().enumerate() {
            if a >= nv || b >= nv || c >= nv || a == b || b == c || a == c {
                return Err(MeshError::BadFace { face: f, indices: [a, b, c] });
            }
        }

        let mut edge_index: HashMap<[usize; 2], usize> = HashMap::with_capacity(faces.len() * 3 / 2 + 3);
        let mut directed: HashMap<(usize, usize), usize> = HashMap::with_capacity(faces.len() * 3);
        let mut edges = Vec::new();
        let mut edge_faces: Vec<[Option<usize>; 2]> = Vec::new();
        let mut face_edges = Vec::with_capacity(faces.len());

        for (f, face) in faces.iter().enumerate() {
            let mut fe = [0usize; 3];
            for corner in 0..3 {
                let from = face[(corner + 1) % 3];
                let to = face[(corner + 2) % 3];
                if directed.insert((from, to), f).is_some() {
                    // Same directed edge twice: either a flipped neighbour or a third face.
                    let key = sorted(from, to);
                    if let Some(&e) = edge_index.get(&key) {
                        if edge_faces[e][1].is_some() {
                            return Err(MeshError::NonManifoldEdge(key[0], key[1]));
                        }
                    }
                    return Err(MeshError::InconsistentOrientation(key[0], key[1]));
                }
                let key = sorted(from, to);
                let e = *edge_index.entry(key).or_insert_with(|| {
                    edges.push(key);
                    edge_faces.push([None, None]);
                    edges.len() - 1
                });
                match edge_faces[e] {
                    [None, _] => edge_faces[e][0] = Some(f),
                    [Some(_), None] => edge_faces[e][1] = Some(f),
                    [Some(_), Some(_)] => return Err(MeshError::NonManifoldEdge(key[0], key[1])),
                }
                fe[corner] = e;
            }
            face_edges.push(fe);
        }

        let mut vertex_faces = vec![Vec::new(); nv];
        for (f, face) in faces.iter().enumerate() {
            for &v in face {
                vertex_faces[v].push(f);
            }
        }
        let mut vertex_edges = vec![Vec::new(); nv];
        let mut boundary = vec![false; nv];
        for (e, &[a, b]) in edges.iter().enumerate() {
            vertex_edges[a].push(e);
            vertex_edges[b].push(e);
            if edge_faces[e][1].is_none() {
                boundary[a] = true;
                boundary[b] = true;
            }
        }
        if let Some(v) = vertex_faces.iter().position(Vec::is_empty) {
            return Err(MeshError::IsolatedVertex(v));
        }

        let mesh = Self { vertices, faces, edges, edge_faces, face_edges, vertex_faces, vertex_edges, boundary };
        let components = mesh.face_components();
        if components != 1 {
            return Err(MeshError::Components(components));
        }
        Ok(mesh)
    }

    fn face_components(&self) -> usize {
        let mut seen = vec![false; self.faces.len()];
        let mut count = 0;
        let mut stack = Vec::new();
        for start in 0..self.faces.len() {
            if seen[start] {
                continue;
            }
            count += 1;
            seen[start] = true;
            stack.push(start);
            while let Some(f) = stack.pop() {
                for g in self.face_neighbors(f).into_iter().flatten() {
                    if !seen[g] {
                        seen[g] = true;
                        stack.push(g);
                    }
                }
            }
        }
        count
    }

    /// Fails unless the mesh has Euler characteristic 1 and a single boundary loop.
    pub fn require_disk(&self) -> Result<(), MeshError> {
        let chi = self.euler_characteristic();
        if chi != 1 {
            return Err(MeshError::NotDisk(format!("Euler characteristic {chi}")));
        }
        let loops = self.boundary_loops()?;
        if loops.len() != 1 {
            return Err(MeshError::NotDisk(format!("{} boundary loops", loops.len())));
        }
        Ok(())
    }

    /// Boundary loops as vertex cycles following face orientation.
    pub fn boundary_loops(&self) -> Result<Vec<Vec<usize>>, MeshError> {
        let mut next: HashMap<usize, usize> = HashMap::new();
        for (e, &[a, b]) in self.edges.iter().enumerate() {
            if !self.is_boundary_edge(e) {
                continue;
            }
            let f = self.edge_faces[e][0].expect("edge has a face");
            let (from, to) = if self.face_has_directed(f, a, b) { (a, b) } else { (b, a) };
            if next.insert(from, to).is_some() {
                return Err(MeshError::NotDisk(format!("vertex {from} has several outgoing boundary edges")));
            }
        }
        let mut starts: Vec<usize> = next.keys().copied().collect();
        starts.sort_unstable();
        let mut visited = vec![false; self.vertices.len()];
        let mut loops = Vec::new();
        for s in starts {
            if visited[s] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut v = s;
            while !visited[v] {
                visited[v] = true;
                cycle.push(v);
                v = match next.get(&v) {
                    Some(&w) => w,
                    None => return Err(MeshError::NotDisk(format!("boundary chain stops at vertex {v}"))),
                };
            }
            loops.push(cycle);
        }
        Ok(loops)
    }

    fn face_has_directed(&self, f: usize, a: usize, b: usize) -> bool {
        let face = self.faces[f];
        (0..3).any(|i| face[i] == a && face[(i + 1) % 3] == b)
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edges.len() as i64 + self.faces.len() as i64
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> &[[T; 3]] {
        &self.vertices
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    /// Edges opposite to the three corners of face `f`.
    pub fn face_edges(&self, f: usize) -> [usize; 3] {
        self.face_edges[f]
    }

    /// One or two faces adjacent to edge `e`.
    pub fn edge_faces(&self, e: usize) -> impl Iterator<Item = usize> + '_ {
        self.edge_faces[e].iter().flatten().copied()
    }

    pub fn vertex_faces(&self, v: usize) -> &[usize] {
        &self.vertex_faces[v]
    }

    pub fn vertex_edges(&self, v: usize) -> &[usize] {
        &self.vertex_edges[v]
    }

    pub fn is_boundary_edge(&self, e: usize) -> bool {
        self.edge_faces[e][1].is_none()
    }

    pub fn is_boundary_vertex(&self, v: usize) -> bool {
        self.boundary[v]
    }

    pub fn boundary_flags(&self) -> &[bool] {
        &self.boundary
    }

    /// Index of the edge joining `a` and `b`, if any.
    pub fn edge_between(&self, a: usize, b: usize) -> Option<usize> {
        let key = sorted(a, b);
        self.vertex_edges.get(a)?.iter().copied().find(|&e| self.edges[e] == key)
    }

    /// Faces across each of the three edges of `f` (opposite corner order).
    pub fn face_neighbors(&self, f: usize) -> [Option<usize>; 3] {
        self.face_edges[f].map(|e| self.edge_faces[e].iter().flatten().copied().find(|&g| g != f))
    }

    /// Neighbouring vertices of `v`, in edge order.
    pub fn vertex_neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.vertex_edges[v].iter().map(move |&e| {
            let [a, b] = self.edges[e];
            if a == v {
                b
            } else {
                a
            }
        })
    }

    /// Same connectivity with replaced positions.
    pub fn with_vertices(&self, vertices: Vec<[T; 3]>) -> Result<Self, MeshError> {
        if vertices.len() != self.vertices.len() {
            return Err(MeshError::LengthCount { expected: self.vertices.len(), got: vertices.len() });
        }
        Ok(Self { vertices, ..self.clone() })
    }
}

fn sorted(a: usize, b: usize) -> [usize; 2] {
    if a < b {
        [a, b]
    } else {
        [b, a]
    }
}
