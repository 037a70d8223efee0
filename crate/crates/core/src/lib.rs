//! Numerical laboratory for inverse curvature flows of star-shaped,
//! rotationally symmetric hypersurfaces in R^{m+1}.
//!
//! The crate is organized along the pipeline:
//!
//! * [`symmfunc`]: exact algebra of elementary symmetric curvature
//!   functions, Newton-transformation spectra, trace identities and
//!   Gårding cones;
//! * [`geometry`]: radial profiles on a cell-centered polar grid,
//!   pseudospectral differentiation, per-node curvature frames, and
//!   sin-weighted spectral quadrature;
//! * [`functionals`]: the integral quantities: weighted σ_k integrals,
//!   monotone quantities, volume, identity residuals and inequality gaps;
//! * [`flow`]: method-of-lines evolution under
//!   ∂X/∂t = (σ_{k-1}/σ_k) ν with sampled quantity series;
//! * [`verify`]: monotonicity, growth-rate, convergence-order and
//!   equality-case verdicts;
//! * [`tolerances`]: every threshold and stability constant, documented.

pub mod functionals;
pub mod geometry;
pub mod symmfunc;
pub mod tolerances;
pub mod verify;

pub mod flow;

pub use functionals::{PositivityScan, SurfaceReport};
pub use geometry::{PointFrame, RadialProfile, SurfaceFamily};
pub use flow::{FlowState, QuantityRow, QuantitySeries, RunOutput};
pub use symmfunc::{CurvatureSpectrum, NewtonSpectrum};
pub use verify::{Direction, Verdict};
