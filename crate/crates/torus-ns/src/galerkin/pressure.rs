//! Associated pressure and weak-formulation residuals.
//!
//! The pressure solves `grad p = P_g[ f + L u - (u . grad) u ]`; the
//! `d_t u` term drops out because Galerkin trajectories are solenoidal,
//! so their time derivative has no gradient part.

use crate::advection::{advect, AdvectionMethod};
use crate::helmholtz::{project_grad, solve_grad};
use crate::spectral::{dual_product_real, grad, FourierField};
use crate::viscosity::{apply_l, bilinear_form, ViscosityTensor};

use super::GalerkinError;

/// Recover the zero-mean pressure associated with a solenoidal state.
pub fn recover_pressure(
    tensor: &ViscosityTensor,
    u: &FourierField,
    forcing: Option<&FourierField>,
    t: f64,
) -> Result<FourierField, GalerkinError> {
    let mut big_f = apply_l(tensor, u, t)?;
    let adv = advect(u, u, AdvectionMethod::Pseudospectral)?;
    big_f.add_scaled(&adv, -1.0);
    if let Some(f) = forcing {
        big_f.add_scaled(f, 1.0);
    }
    // The mean of (u . grad) u vanishes identically for solenoidal u; what
    // remains in the mean mode is round-off.
    let big_f = big_f.into_dotted();
    let gradient_part = project_grad(&big_f)?;
    Ok(solve_grad(&gradient_part)?)
}

/// Residual of the distributional momentum equation against one test field:
///
/// ```text
/// <u' + (u.grad)u, w> + a_T(u, w) + <grad p, w> - <f, w>.
/// ```
///
/// `u_dot` is the stored right-hand-side field (exact within assembly); the
/// test field need not be solenoidal.
pub fn weak_residual(
    tensor: &ViscosityTensor,
    u: &FourierField,
    u_dot: &FourierField,
    pressure: &FourierField,
    forcing: Option<&FourierField>,
    test: &FourierField,
    t: f64,
) -> Result<f64, GalerkinError> {
    let adv = advect(u, u, AdvectionMethod::Pseudospectral)?;
    let mut r = dual_product_real(u_dot, test)?;
    r += dual_product_real(&adv, test)?;
    r += bilinear_form(tensor, u, test, t)?;
    let grad_p = grad(pressure)?;
    r += dual_product_real(&grad_p, test)?;
    if let Some(f) = forcing {
        r -= dual_product_real(f, test)?;
    }
    Ok(r)
}
