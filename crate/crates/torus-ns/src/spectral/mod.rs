//! Truncated periodic Fourier representation of real scalar/vector fields.
//!
//! A field on the flat torus `T^n = [0,1)^n` is stored through its Fourier
//! coefficients on the box lattice `|xi|_inf <= K`,
//!
//! ```text
//! g(x) = sum_xi  g_hat(xi) e^{2 pi i x . xi},
//! ```
//!
//! with Hermitian symmetry `g_hat(-xi) = conj(g_hat(xi))` so that all fields
//! are real-valued. Sobolev norms, inner and dual products, the periodic
//! Bessel-potential operator `Lambda^r` (the Fourier multiplier `rho(xi)^r`
//! with `rho(xi) = 2 pi (1 + |xi|^2)^{1/2}`), differentiation, and lossless
//! physical-space transforms all live here.

mod field;
mod lattice;
mod ops;
mod serial;
mod transform;

pub use field::{FieldFlags, FourierField, GridField};
pub use lattice::Lattice;
pub use ops::{
    div, dual_product, dual_product_real, grad, inner_product, sobolev_norm, sym_gradient,
};
pub use serial::{read_field, write_field};
pub use transform::{from_physical, to_physical};

use thiserror::Error;

/// Weight `rho(xi) = 2 pi (1 + |xi|^2)^{1/2}` behind every Sobolev norm.
pub fn rho(xi: &[i64]) -> f64 {
    let norm_sq: i64 = xi.iter().map(|&x| x * x).sum();
    2.0 * std::f64::consts::PI * (1.0 + norm_sq as f64).sqrt()
}

/// Bessel-potential operator `Lambda^r`: coefficient-wise multiplication by
/// `rho(xi)^r`. Preserves the dotted and solenoidal flags.
pub fn bessel_potential(g: &FourierField, r: f64) -> FourierField {
    let mut out = g.clone();
    if r == 0.0 {
        return out;
    }
    let lattice = g.lattice().clone();
    for (idx, xi) in lattice.modes().enumerate() {
        let factor = rho(&xi).powf(r);
        for comp in 0..g.components() {
            let c = out.coeff_mut(comp, idx);
            *c *= factor;
        }
    }
    out
}

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("lattice mismatch: {0} vs {1}")]
    LatticeMismatch(String, String),
    #[error("component count mismatch: {0} vs {1}")]
    ComponentMismatch(usize, usize),
    #[error("grid of {n_grid} nodes per axis undersamples cutoff K = {cutoff}; need at least {needed} (aliasing)")]
    Undersampled {
        n_grid: usize,
        cutoff: usize,
        needed: usize,
    },
    #[error("field is not dotted (mean mode must vanish)")]
    NotDotted,
    #[error("expected a {expected}-component field, got {got}")]
    BadArity { expected: usize, got: usize },
    #[error("dimension must be at least 2, got {0}")]
    BadDimension(usize),
    #[error("cutoff must be at least 1, got {0}")]
    BadCutoff(usize),
    #[error("serialization: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization header: {0}")]
    Header(String),
}
