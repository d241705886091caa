//! Hybrid rasterization / ray-tracing sonar simulator.
//!
//! A frame is produced in stages: the scene is rasterized into a G-buffer,
//! surface normals are perturbed by material roughness, primary echoes are
//! shaded, one specular bounce is traced for secondary echoes, both layers
//! are attenuated by seawater absorption and finally binned into a polar
//! sonar frame with speckle noise.

pub mod acoustics;
pub mod error;
pub mod geometry;
pub mod metrics;
pub mod pipeline;
pub mod rasterizer;
pub mod raytracer;
mod rng;
pub mod scene;
pub mod sonogram;

pub use error::{Result, SonarError, Stage};
pub use rasterizer::{Echo, GBuffer, ReflectionImage, SonarCamera};
pub use raytracer::{IntersectionStats, ShaderImage, TraceMode};
pub use scene::{Material, Scene, TriMesh, Triangle};
pub use sonogram::{Device, NoiseParams, SonarConfig, SonarFrame};
