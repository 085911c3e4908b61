//! Far-field prediction from near-field complex-pressure measurements.
//!
//! Four propagation routes are provided:
//!
//! * [`planar::fps_decompose`] / [`planar::fps_propagate`]: plane-wave series
//!   from a planar lattice of microphones.
//! * [`planar::fpk_predict`]: far-zone Kirchhoff integral with the soft-body
//!   Green's function.
//! * [`linear::fls_decompose`] / [`linear::fls_propagate`]: cylindrical-wave
//!   series from a single line of microphones.
//! * [`linear::flt_magnitude`]: transfer-function magnitude from the same
//!   line spectrum.
//!
//! [`field_model`] evaluates point-source fields directly and serves as the
//! reference every method is checked against. [`harness`] builds the
//! two-loudspeaker chamber scenario and the comparison metrics.
//!
//! Time dependence is `exp(-iωt)` throughout; sources live in `z <= 0` and
//! all propagation is toward increasing `z`.

pub mod error;
pub mod field_model;
pub mod fieldfile;
pub mod geometry;
pub mod harness;
pub mod linear;
pub mod planar;
pub mod sampling;

pub use error::{Error, Result};
pub use geometry::Point3;
pub use num_complex::Complex64;
