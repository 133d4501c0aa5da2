//! Numerical toolkit for the fourth-order (biharmonic) nonlinear Schrödinger
//! equation `i∂ₜu + Δ²u = ±|u|^{p-1}u` with radially symmetric data in ℝⁿ.

pub mod bipolar_kernel;
pub mod dynamics;
pub mod error;
pub mod field;
pub mod ground_state;
pub mod littlewood_paley;
pub mod oscillatory;
pub mod params;
pub mod propagator;
pub mod quad;
pub mod report;
pub mod special;

pub use error::{Error, Result};
