//! One-dimensional interior-boundary-condition (IBC) Hamiltonians on the
//! truncated Fock space with at most one particle.
//!
//! A state is a pair `(φ⁰, φ¹)`: a vacuum amplitude and a one-particle wave
//! function. Particles are created and annihilated at point sources; the
//! coupling enters through the jump condition `[φ¹′]₀₋^{0+} = c φ⁰` and the
//! vacuum equation `(Hφ)⁰ = c̄ φ¹(0)`. Units are `ħ = 2m = 1`.
//!
//! Modules:
//!
//! - [`numerics`]: complex `erfc`, bracketed root finding, adaptive quadrature.
//! - [`single_source`]: ground state, scattering states, Green function and
//!   time-evolution kernel for one source on the line.
//! - [`multi_source`]: several sources on the line, effective interaction
//!   energy between sources.
//! - [`dirichlet_box`]: a source inside a box with Dirichlet walls, spectral
//!   determinant and the orbit expansion of the spectral staircase.
//! - [`graph`]: metric graphs with IBC vertices.
//! - [`oracle`]: finite-difference discretisation, Crank–Nicolson evolution and
//!   quadrature checks of orthonormality and completeness.

pub mod dirichlet_box;
pub mod error;
pub mod graph;
pub mod multi_source;
pub mod numerics;
pub mod oracle;
pub mod single_source;

pub use error::{IbcError, Result};
pub use num_complex::Complex64;
pub use single_source::Coupling;
