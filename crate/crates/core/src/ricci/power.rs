use crate::mesh::{EdgeLengths, MeshError, TriMesh};
use crate::real::Real;

/// Power center of a triangle's three vertex circles in its local frame.
///
/// The frame puts vertex `i` at the origin, `j` on the positive x-axis and
/// `k` in the upper half plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerCenter<T> {
    pub point: [T; 2],
    /// Corner positions `O_i`, `O_j`, `O_k` in the local frame.
    pub corners: [[T; 2]; 3],
    /// Signed distances to edges `ij`, `jk`, `ki`; positive toward the interior.
    pub h: [T; 3],
}

impl<T: Real> PowerCenter<T> {
    /// Power of the center with respect to each of the three circles.
    pub fn powers(&self, radii: [T; 3]) -> [T; 3] {
        let [px, py] = self.point;
        let mut out = [T::zero(); 3];
        for a in 0..3 {
            let [ox, oy] = self.corners[a];
            out[a] = (px - ox).powi(2) + (py - oy).powi(2) - radii[a] * radii[a];
        }
        out
    }
}

/// Lays out the triangle and intersects two radical axes.
///
/// `l_ij`, `l_jk`, `l_ki` are the side lengths; `radii` are `(g_i, g_j, g_k)`.
pub fn power_center<T: Real>(l_ij: T, l_jk: T, l_ki: T, radii: [T; 3]) -> Result<PowerCenter<T>, MeshError> {
    if !(l_ij < l_jk + l_ki && l_jk < l_ki + l_ij && l_ki < l_ij + l_jk) {
        return Err(MeshError::TriangleInequality { face: usize::MAX });
    }
    let two = T::lit(2.0);
    let xk = (l_ij * l_ij + l_ki * l_ki - l_jk * l_jk) / (two * l_ij);
    let yk = (l_ki * l_ki - xk * xk).max(T::zero()).sqrt();
    if !(yk > T::zero()) {
        return Err(MeshError::TriangleInequality { face: usize::MAX });
    }
    let oi = [T::zero(), T::zero()];
    let oj = [l_ij, T::zero()];
    let ok = [xk, yk];
    let [gi, gj, gk] = radii;

    // |P-O_a|^2 - g_a^2 = |P-O_b|^2 - g_b^2  <=>  2 P.(O_b - O_a) = |O_b|^2 - |O_a|^2 - g_b^2 + g_a^2
    let norm2 = |p: [T; 2]| p[0] * p[0] + p[1] * p[1];
    let row = |oa: [T; 2], ob: [T; 2], ga: T, gb: T| {
        ([two * (ob[0] - oa[0]), two * (ob[1] - oa[1])], norm2(ob) - norm2(oa) - gb * gb + ga * ga)
    };
    let (a1, b1) = row(oi, oj, gi, gj);
    let (a2, b2) = row(oj, ok, gj, gk);
    let det = a1[0] * a2[1] - a1[1] * a2[0];
    let px = (b1 * a2[1] - a1[1] * b2) / det;
    let py = (a1[0] * b2 - b1 * a2[0]) / det;
    let p = [px, py];

    let signed = |a: [T; 2], b: [T; 2], len: T| ((b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0])) / len;
    let h = [signed(oi, oj, l_ij), signed(oj, ok, l_jk), signed(ok, oi, l_ki)];
    Ok(PowerCenter { point: p, corners: [oi, oj, ok], h })
}

/// Power center of mesh face `f` with per-vertex radii, mapping errors to the face index.
pub(crate) fn face_power_center<T: Real>(
    mesh: &TriMesh<T>,
    lengths: &EdgeLengths<T>,
    radii: &[T],
    f: usize,
) -> Result<PowerCenter<T>, MeshError> {
    let [a, b, c] = mesh.faces()[f];
    // Opposite-corner lengths: [l_bc, l_ca, l_ab].
    let [l_bc, l_ca, l_ab] = lengths.face(mesh, f);
    power_center(l_ab, l_bc, l_ca, [radii[a], radii[b], radii[c]]).map_err(|_| MeshError::TriangleInequality { face: f })
}
