//! Numerical verification engine for generalized quaternionic Kähler
//! structures.
//!
//! The crate builds chart-level models of Riemannian 4n-manifolds from
//! orthonormal frames, evaluates Courant-bracket calculus on the generalized
//! tangent bundle `T ⊕ T*`, computes Levi-Civita curvature with finite
//! differences, and checks the integrability of the canonical generalized
//! almost complex structure on the twistor space through the curvature
//! obstruction tensors.
//!
//! Module map:
//!
//! * [`chartfield`]: charts, evaluable fields, finite-difference Cartan calculus.
//! * [`genlin`]: pairing, Courant bracket, generalized almost complex structures.
//! * [`connection`]: Christoffel symbols, curvature on `Λ²`, 4-dimensional blocks.
//! * [`quaternion`]: `Λ±` bases, algebra isomorphisms, the `C±` split, `𝒟_f`.
//! * [`twistor`]: obstruction tensors, the `(1,0)`-curvature residual, verdicts.
//! * [`catalog`]: concrete manifolds, scenarios, reports.

pub mod catalog;
pub mod chartfield;
pub mod connection;
pub mod error;
pub mod genlin;
pub mod linalg;
pub mod quaternion;
pub mod twistor;

pub use error::{GeomError, Result};

/// Engine version recorded in every report.
pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");
