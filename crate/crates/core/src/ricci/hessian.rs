use crate::mesh::{EdgeLengths, MeshError, TriMesh};
use crate::real::Real;

use super::power::face_power_center;

/// Per-edge weights `(h_ij^k + h_ji^l) / l_ij`; one term for boundary edges.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeWeights<T> {
    pub w: Vec<T>,
}

impl<T: Real> EdgeWeights<T> {
    pub fn negative_count(&self) -> usize {
        self.w.iter().filter(|&&w| w < T::zero()).count()
    }
}

/// Edge weights from the power centers of every face under radii `gamma`.
pub fn edge_weights<T: Real>(
    mesh: &TriMesh<T>,
    lengths: &EdgeLengths<T>,
    gamma: &[T],
) -> Result<EdgeWeights<T>, MeshError> {
    let mut h_sum = vec![T::zero(); mesh.edge_count()];
    for f in 0..mesh.face_count() {
        let pc = face_power_center(mesh, lengths, gamma, f)?;
        // pc.h is ordered ab, bc, ca; face_edges is ordered bc, ca, ab.
        let [e_bc, e_ca, e_ab] = mesh.face_edges(f);
        h_sum[e_ab] = h_sum[e_ab] + pc.h[0];
        h_sum[e_bc] = h_sum[e_bc] + pc.h[1];
        h_sum[e_ca] = h_sum[e_ca] + pc.h[2];
    }
    let w = h_sum.iter().enumerate().map(|(e, &h)| h / lengths[e]).collect();
    Ok(EdgeWeights { w })
}

/// Symmetric sparse matrix in compressed-row form with sorted columns.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSymmetric<T> {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<T>,
}

impl<T: Real> SparseSymmetric<T> {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// Entry `(i, j)`, zero if structurally absent.
    pub fn get(&self, i: usize, j: usize) -> T {
        let row = &self.cols[self.row_ptr[i]..self.row_ptr[i + 1]];
        match row.binary_search(&j) {
            Ok(k) => self.vals[self.row_ptr[i] + k],
            Err(_) => T::zero(),
        }
    }

    /// Stored `(col, value)` pairs of row `i`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[r.clone()].iter().copied().zip(self.vals[r].iter().copied())
    }

    pub fn diagonal(&self) -> Vec<T> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn mul_vec(&self, x: &[T], out: &mut [T]) {
        for (i, o) in out.iter_mut().enumerate().take(self.n) {
            let mut acc = T::zero();
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc = acc + self.vals[k] * x[self.cols[k]];
            }
            *o = acc;
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<T>> {
        let mut d = vec![vec![T::zero(); self.n]; self.n];
        for (i, row) in d.iter_mut().enumerate() {
            for (j, v) in self.row(i) {
                row[j] = v;
            }
        }
        d
    }
}

/// Assembles `H_ii = sum_k w_ik`, `H_ij = -w_ij`.
///
/// The diagonal is accumulated from the same row entries, so rows sum to
/// zero up to the rounding of that one summation.
pub fn hessian<T: Real>(mesh: &TriMesh<T>, weights: &EdgeWeights<T>) -> SparseSymmetric<T> {
    let n = mesh.vertex_count();
    let mut row_ptr = Vec::with_capacity(n + 1);
    let mut cols = Vec::with_capacity(n + 2 * mesh.edge_count());
    let mut vals = Vec::with_capacity(n + 2 * mesh.edge_count());
    row_ptr.push(0);
    let mut entries: Vec<(usize, T)> = Vec::new();
    for i in 0..n {
        entries.clear();
        for &e in mesh.vertex_edges(i) {
            let [a, b] = mesh.edges()[e];
            let j = if a == i { b } else { a };
            entries.push((j, -weights.w[e]));
        }
        entries.sort_unstable_by_key(|&(j, _)| j);
        let diag = -entries.iter().fold(T::zero(), |acc, &(_, v)| acc + v);
        let split = entries.partition_point(|&(j, _)| j < i);
        for &(j, v) in &entries[..split] {
            cols.push(j);
            vals.push(v);
        }
        cols.push(i);
        vals.push(diag);
        for &(j, v) in &entries[split..] {
            cols.push(j);
            vals.push(v);
        }
        row_ptr.push(cols.len());
    }
    SparseSymmetric { n, row_ptr, cols, vals }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::euclidean_edge_lengths;

    fn rhombus() -> TriMesh<f64> {
        let s = 3f64.sqrt() / 2.0;
        TriMesh::new(vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.5, s, 0.0], [0.5, -s, 0.0]], vec![[0, 1, 2], [1, 0, 3]])
            .unwrap()
    }

    #[test]
    fn equilateral_weights() {
        let m = rhombus();
        let l = euclidean_edge_lengths(&m).unwrap();
        let w = edge_weights(&m, &l, &[0.5; 4]).unwrap();
        let inv = 1.0 / (2.0 * 3f64.sqrt());
        for e in 0..m.edge_count() {
            let expect = if m.is_boundary_edge(e) { inv } else { 2.0 * inv };
            assert!((w.w[e] - expect).abs() < 1e-12, "edge {e}: {}", w.w[e]);
        }
    }

    #[test]
    fn single_triangle_hessian() {
        let m = TriMesh::new(vec![[0.0; 3], [1.0, 0.0, 0.0], [0.5, 3f64.sqrt() / 2.0, 0.0]], vec![[0, 1, 2]]).unwrap();
        let l = euclidean_edge_lengths(&m).unwrap();
        let w = edge_weights(&m, &l, &[0.5; 3]).unwrap();
        let h = hessian(&m, &w);
        let inv = 1.0 / (2.0 * 3f64.sqrt());
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 2.0 * inv } else { -inv };
                assert!((h.get(i, j) - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn mirrored_weights_identical() {
        // Swapping the roles of the shared edge endpoints leaves w unchanged.
        let s = 3f64.sqrt() / 2.0;
        let a = TriMesh::new(vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.3, s, 0.0], [0.6, -0.7, 0.0]], vec![[0, 1, 2], [1, 0, 3]])
            .unwrap();
        let b = TriMesh::new(vec![[1.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.7, s, 0.0], [0.4, -0.7, 0.0]], vec![[1, 0, 2], [0, 1, 3]])
            .unwrap();
        let (la, lb) = (euclidean_edge_lengths(&a).unwrap(), euclidean_edge_lengths(&b).unwrap());
        let ga = crate::packing::initial_packing(&a, &la).unwrap();
        let gb = crate::packing::initial_packing(&b, &lb).unwrap();
        let wa = edge_weights(&a, &la, ga.gamma()).unwrap();
        let wb = edge_weights(&b, &lb, gb.gamma()).unwrap();
        let ea = a.edge_between(0, 1).unwrap();
        let eb = b.edge_between(0, 1).unwrap();
        assert!((wa.w[ea] - wb.w[eb]).abs() < 1e-14);
    }

    #[test]
    fn rows_sum_to_zero() {
        let m = rhombus();
        let l = euclidean_edge_lengths(&m).unwrap();
        let w = EdgeWeights { w: vec![0.3, -0.1, 0.7, 1.1, 0.05] };
        let h = hessian(&m, &w);
        let ones = vec![1.0; 4];
        let mut out = vec![0.0; 4];
        h.mul_vec(&ones, &mut out);
        assert!(out.iter().all(|&x| x.abs() < 1e-15));
        assert_eq!(l.len(), 5);
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(h.get(i, j), h.get(j, i));
            }
        }
    }
}
