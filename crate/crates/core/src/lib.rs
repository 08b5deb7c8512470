//! Double Fourier sphere (DFS) toolkit.
//!
//! A spherical function `f` is pulled back to the torus through the
//! longitude-latitude map `phi(lambda, theta)`, giving a biperiodic function
//! that is invariant under the glide reflection `(lambda, theta) -> (lambda + pi, -theta)`.
//! Its 2D Fourier coefficients are computed by FFT and folded back into an
//! expansion in the basis `b_n` on the sphere.
//!
//! Module map:
//!
//! - [`geometry`]: the coordinate transform, its inverse and Jacobian.
//! - [`grids`]: equispaced sampling and the four-block doubling.
//! - [`spectral`]: coefficient tables, truncation sets, partial sums, folded basis.
//! - [`sh_reference`]: a slow spherical harmonics baseline.
//! - [`analysis`]: convergence, decay and regularity diagnostics.
//! - [`testfns`]: plateau test functions, the Sobolev counterexample and presets.

pub mod analysis;
pub mod error;
mod fft;
pub mod function;
pub mod geometry;
pub mod grids;
pub mod sh_reference;
pub mod spectral;
pub mod testfns;

pub use error::{DfsError, Result};
pub use function::SphericalFunction;
pub use geometry::{SpherePoint, TorusPoint};
pub use num_complex::Complex64;
