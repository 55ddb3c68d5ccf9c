//! Fractional Schrödinger equations on the integer lattice.
//!
//! The crate covers the discrete fractional Laplacian `(-Δ)^α` on `ℤ^d` (its
//! kernel, spectral and heat-semigroup evaluations), the energy functional of
//! `(-Δ)^α u + h u = f(x, u)` restricted to a finite box, and a Nehari-manifold
//! minimizer that finds ground states and distinct bound states.
//!
//! Everything numerical is generic over [`Real`] (`f32` or `f64`); the
//! `*64` aliases below fix the scalar to `f64`.

pub mod error;
mod fftn;
pub mod io;
pub mod lattice;
pub mod model;
pub mod nehari;
pub mod quadrature;
pub mod scalar;
pub mod semigroup;
pub mod spectral;
pub mod validate;

pub use error::{Error, Result};
pub use lattice::{Boundary, Field, LatticeGeometry};
pub use model::{Model, ModelConfig, Nonlinearity, Potential, SiteFunction, SiteNonlinearity};
pub use nehari::{
    minimize, minimize_symmetric, multistart, nehari_scale, orbit_distance, project_m,
    GroundStateResult, SolutionSet, SolveError, SolverConfig,
};
pub use scalar::{Real, Summation};
pub use semigroup::{fraclap_semigroup, heat_apply, HeatConfig};
pub use spectral::{
    apply_kernel, apply_multiplier_fft, kernel_table, FractionalOrder, Kernel, SpectralConfig,
};

pub type Field64 = Field<f64>;
pub type Field32 = Field<f32>;
pub type Kernel64 = Kernel<f64>;
pub type Model64 = Model<f64>;
pub type Model32 = Model<f32>;
pub type GroundState64 = GroundStateResult<f64>;
pub type SolutionSet64 = SolutionSet<f64>;
