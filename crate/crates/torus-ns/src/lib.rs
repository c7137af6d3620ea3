//! Spectral Faedo-Galerkin machinery for the evolution anisotropic
//! variable-coefficient incompressible Navier-Stokes system on the flat
//! torus `T^n = [0,1)^n`, `n >= 2`.
//!
//! The crate is organized around truncated Fourier representations of
//! periodic fields:
//!
//! * [`spectral`]: lattices, Fourier/grid fields, Sobolev norms, the
//!   periodic Bessel-potential operator, differentiation and transforms.
//! * [`helmholtz`]: Helmholtz-Weyl decomposition: gradient and Leray
//!   projectors plus the divergence/gradient isomorphisms.
//! * [`viscosity`]: anisotropic viscosity tensors, symmetry and relaxed
//!   ellipticity certificates, the operator `L u = div(A : E(u))` and the
//!   bilinear form `a_T`.
//! * [`basis`]: the explicit real divergence-free eigenbasis of the
//!   Bessel-potential operator and the Galerkin projector `P_m`.
//! * [`advection`]: the nonlinear term `(u . grad) u` with a dealiased
//!   pseudospectral fast path and an exact convolution oracle.
//! * [`galerkin`]: assembly and time integration of the Galerkin ODE
//!   system, energy ledgers, weak-form residuals and pressure recovery.
//! * [`scenarios`] / [`verify`] / [`io`]: shipped run configurations,
//!   property suites and file formats used by the CLI.

// Spectral kernels index several arrays by the same mode/component loop
// variable; iterator rewrites obscure the formulas.
#![allow(clippy::needless_range_loop)]

pub mod advection;
pub mod basis;
pub mod galerkin;
pub mod helmholtz;
pub mod io;
pub mod rng;
pub mod scenarios;
pub mod spectral;
pub mod sum;
pub mod tol;
pub mod verify;
pub mod viscosity;

pub use spectral::{FourierField, GridField, Lattice};
