//! Conformal morphometry for disk-topology triangle meshes.
//!
//! The pipeline runs an inversive-distance circle packing through Euclidean
//! discrete Ricci flow, embeds the flattened metric in the plane, and reduces
//! per-vertex area distortion, conformal factor and Gaussian curvature to
//! Shannon entropies.
//!
//! Geometry is generic over [`Real`]; the `*64` / `*32` aliases below fix
//! the scalar type.

pub mod entropy;
pub mod features;
pub mod label;
pub mod layout;
pub mod mesh;
pub mod packing;
pub mod real;
pub mod ricci;
pub mod synth;

pub use label::Label;
pub use real::Real;

pub type Mesh64 = mesh::TriMesh<f64>;
pub type Mesh32 = mesh::TriMesh<f32>;
pub type Lengths64 = mesh::EdgeLengths<f64>;
pub type Lengths32 = mesh::EdgeLengths<f32>;
pub type Packing64 = packing::PackingMetric<f64>;
pub type Packing32 = packing::PackingMetric<f32>;
pub type Flow64 = ricci::FlowState<f64>;
pub type Flow32 = ricci::FlowState<f32>;
pub type Embedding64 = layout::PlanarEmbedding<f64>;
pub type Embedding32 = layout::PlanarEmbedding<f32>;
pub type Fields64 = features::FeatureFields<f64>;
pub type Fields32 = features::FeatureFields<f32>;
