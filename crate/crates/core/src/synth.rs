//! Synthetic disk meshes: test fixtures and the two-class cohort.
//!
//! Subjects are flat hexagonal disks lifted by a sum of Gaussian bumps plus
//! seeded noise. The atrophied class uses more and taller bumps.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::label::Label;
use crate::mesh::TriMesh;
use crate::real::Real;

/// Derives a child seed from a root seed and a path of indices (splitmix64 mixing).
pub fn substream_seed(root: u64, path: &[u64]) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    path.iter().fold(mix(root), |acc, &p| mix(acc ^ mix(p)))
}

pub fn rng_for(root: u64, path: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(substream_seed(root, path))
}

/// Flat triangulated hexagonal disk of circumradius 1 with `rings` rings.
///
/// Ring `r` holds `6r` vertices, so `V = 1 + 3 rings (rings + 1)` and every
/// triangle is equilateral.
pub fn make_disk<T: Real>(rings: usize) -> TriMesh<T> {
    assert!(rings >= 1, "disk needs at least one ring");
    let mut vertices = vec![[T::zero(); 3]];
    let mut ring_start = vec![0usize];
    let corner = |s: usize| {
        let a = std::f64::consts::FRAC_PI_3 * s as f64;
        [a.cos(), a.sin()]
    };
    for r in 1..=rings {
        ring_start.push(vertices.len());
        let scale = r as f64 / rings as f64;
        for s in 0..6 {
            let (c0, c1) = (corner(s), corner(s + 1));
            for t in 0..r {
                let w = t as f64 / r as f64;
                let x = scale * ((1.0 - w) * c0[0] + w * c1[0]);
                let y = scale * ((1.0 - w) * c0[1] + w * c1[1]);
                vertices.push([T::lit(x), T::lit(y), T::zero()]);
            }
        }
    }
    let mut faces = Vec::with_capacity(6 * rings * rings);
    for r in 1..=rings {
        let outer = |i: usize| ring_start[r] + i % (6 * r);
        let inner = |i: usize| if r == 1 { 0 } else { ring_start[r - 1] + i % (6 * (r - 1)) };
        for s in 0..6 {
            for t in 0..r {
                let o = s * r + t;
                let i = s * (r - 1) + t;
                faces.push([outer(o), outer(o + 1), inner(i)]);
                if t + 1 < r {
                    faces.push([inner(i), outer(o + 1), inner(i + 1)]);
                }
            }
        }
    }
    TriMesh::new(vertices, faces).expect("hexagonal disk is a valid mesh")
}

/// Regular `nx` by `ny` vertex grid on the unit square, two triangles per cell.
pub fn make_grid<T: Real>(nx: usize, ny: usize) -> TriMesh<T> {
    assert!(nx >= 2 && ny >= 2, "grid needs at least 2x2 vertices");
    let mut vertices = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            vertices.push([T::lit(i as f64 / (nx - 1) as f64), T::lit(j as f64 / (ny - 1) as f64), T::zero()]);
        }
    }
    let id = |i: usize, j: usize| j * nx + i;
    let mut faces = Vec::with_capacity(2 * (nx - 1) * (ny - 1));
    for j in 0..ny - 1 {
        for i in 0..nx - 1 {
            faces.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
            faces.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    TriMesh::new(vertices, faces).expect("grid is a valid mesh")
}

/// Closed regular octahedron with unit circumradius (Euler characteristic 2).
pub fn make_octahedron<T: Real>() -> TriMesh<T> {
    let p = |x: f64, y: f64, z: f64| [T::lit(x), T::lit(y), T::lit(z)];
    let vertices = vec![p(1.0, 0.0, 0.0), p(-1.0, 0.0, 0.0), p(0.0, 1.0, 0.0), p(0.0, -1.0, 0.0), p(0.0, 0.0, 1.0), p(0.0, 0.0, -1.0)];
    let faces = vec![[0, 2, 4], [2, 1, 4], [1, 3, 4], [3, 0, 4], [2, 0, 5], [1, 2, 5], [3, 1, 5], [0, 3, 5]];
    TriMesh::new(vertices, faces).expect("octahedron is a valid mesh")
}

/// Spherical cap over a disk: `z = sqrt(R^2 - x^2 - y^2) - sqrt(R^2 - 1)`.
pub fn make_spherical_cap<T: Real>(rings: usize, sphere_radius: f64) -> TriMesh<T> {
    let disk = make_disk::<T>(rings);
    let base = (sphere_radius * sphere_radius - 1.0).max(0.0).sqrt();
    let lifted = disk
        .vertices()
        .iter()
        .map(|p| {
            let (x, y) = (p[0].to_f64_lossy(), p[1].to_f64_lossy());
            let z = (sphere_radius * sphere_radius - x * x - y * y).max(0.0).sqrt() - base;
            [p[0], p[1], T::lit(z)]
        })
        .collect();
    disk.with_vertices(lifted).expect("same vertex count")
}

/// Perturbs every vertex by uniform in-plane jitter and Gaussian height noise.
pub fn jitter<T: Real>(mesh: &TriMesh<T>, planar: f64, height: f64, seed: u64) -> TriMesh<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, height.max(0.0)).expect("finite sigma");
    let moved = mesh
        .vertices()
        .iter()
        .map(|p| {
            let dx = rng.random_range(-1.0..=1.0) * planar;
            let dy = rng.random_range(-1.0..=1.0) * planar;
            let dz = normal.sample(&mut rng);
            [p[0] + T::lit(dx), p[1] + T::lit(dy), p[2] + T::lit(dz)]
        })
        .collect();
    mesh.with_vertices(moved).expect("same vertex count")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SubjectClass {
    Smooth,
    Atrophied,
}

impl SubjectClass {
    pub fn label(self) -> Label {
        match self {
            SubjectClass::Smooth => Label::Cn,
            SubjectClass::Atrophied => Label::Ad,
        }
    }
}

/// Parameters of one synthetic surface patch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub class: SubjectClass,
    pub rings: usize,
    /// Mean bump height; each bump draws from `[0.7, 1.3]` times this.
    pub amplitude: f64,
    pub bump_count: usize,
    /// Gaussian bump standard deviation in disk units.
    pub bump_width: f64,
    /// Height noise standard deviation on interior vertices.
    pub noise_sigma: f64,
    pub seed: u64,
}

impl SynthSpec {
    /// Default parameters for a class.
    pub fn for_class(class: SubjectClass, rings: usize, seed: u64) -> Self {
        match class {
            SubjectClass::Smooth => {
                Self { class, rings, amplitude: 0.08, bump_count: 2, bump_width: 0.25, noise_sigma: 0.004, seed }
            }
            SubjectClass::Atrophied => {
                Self { class, rings, amplitude: 0.16, bump_count: 5, bump_width: 0.18, noise_sigma: 0.008, seed }
            }
        }
    }
}

/// Generates a patch and its label; pure in `spec`.
pub fn make_subject<T: Real>(spec: &SynthSpec) -> (TriMesh<T>, Label) {
    assert!(spec.amplitude >= 0.0, "amplitude must be non-negative");
    let disk = make_disk::<T>(spec.rings);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let bumps: Vec<([f64; 2], f64)> = (0..spec.bump_count)
        .map(|_| {
            let r = 0.6 * rng.random::<f64>().sqrt();
            let a = std::f64::consts::TAU * rng.random::<f64>();
            let height = spec.amplitude * rng.random_range(0.7..=1.3);
            ([r * a.cos(), r * a.sin()], height)
        })
        .collect();
    let noise = Normal::new(0.0, spec.noise_sigma.max(0.0)).expect("finite sigma");
    let two_w2 = 2.0 * spec.bump_width * spec.bump_width;
    let lifted = disk
        .vertices()
        .iter()
        .enumerate()
        .map(|(v, p)| {
            let (x, y) = (p[0].to_f64_lossy(), p[1].to_f64_lossy());
            let mut z: f64 = bumps
                .iter()
                .map(|&([cx, cy], h)| h * (-((x - cx).powi(2) + (y - cy).powi(2)) / two_w2).exp())
                .sum();
            let n = noise.sample(&mut rng);
            if !disk.is_boundary_vertex(v) {
                z += n;
            }
            [p[0], p[1], T::lit(z)]
        })
        .collect();
    (disk.with_vertices(lifted).expect("same vertex count"), spec.class.label())
}
