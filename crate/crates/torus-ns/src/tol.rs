//! Pinned tolerances for the verification suites.
//!
//! Every threshold used by `verify` and the diagnostic reports lives here.

/// Exact coefficient-wise identities (projector algebra, Bessel round trips).
pub const COEFFICIENT_EXACT: f64 = 1e-14;

/// Diagonal Fourier-space operations composed a few times.
pub const PROJECTOR: f64 = 1e-13;

/// Quadrature-backed identities (Parseval, dual products on grids).
pub const QUADRATURE: f64 = 1e-12;

/// Identities that route through physical-space products of several fields.
pub const TRIPLE_PRODUCT: f64 = 1e-11;

/// Energy-neutrality of the assembled nonlinear Galerkin term.
pub const NONLINEAR_NEUTRALITY: f64 = 1e-10;

/// Relative solenoidal contamination above which a field is rejected as a
/// gradient-equation right-hand side (distinguishes data errors from
/// round-off at cutoffs up to K = 32).
pub const SOLENOIDAL_REJECT: f64 = 1e-10;

/// Off-diagonal Frobenius norm at which the Jacobi eigensolver stops.
pub const JACOBI_OFFDIAG: f64 = 1e-13;
