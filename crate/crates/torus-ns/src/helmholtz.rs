//! Helmholtz-Weyl decomposition on the punctured lattice.
//!
//! For a dotted vector field `F` the gradient projector keeps the part
//! parallel to the wavevector,
//!
//! ```text
//! (P_g F)^(xi)     = xi (xi . F^(xi)) / |xi|^2,
//! (P_sigma F)^(xi) = F^(xi) - (P_g F)^(xi),
//! ```
//!
//! so `F = P_g F + P_sigma F` with `P_sigma F` divergence-free and `P_g F`
//! a gradient. The companion isomorphisms solve `div F = f` and
//! `grad f = F` explicitly with the norm bounds `||F||_{H^{s+1}} <=
//! sqrt(2) ||f||_{H^s}` and `||f||_{H^s} <= sqrt(2) ||F||_{H^{s-1}}`.
//!
//! Inputs must be dotted: a nonzero mean mode is rejected rather than
//! silently removed, so data errors surface early.

use num_complex::Complex64;
use thiserror::Error;

use crate::spectral::{sobolev_norm, FieldFlags, FourierField, SpectralError};
use crate::tol;

#[derive(Debug, Error)]
pub enum HelmholtzError {
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error("field is not dotted; project the mean out explicitly first")]
    NotDotted,
    #[error("field has a solenoidal part (relative norm {ratio:.3e}); grad f = F is unsolvable")]
    NotPotential { ratio: f64 },
}

fn require_dotted_vector(f: &FourierField) -> Result<(), HelmholtzError> {
    let n = f.lattice().dimension();
    if f.components() != n {
        return Err(SpectralError::BadArity {
            expected: n,
            got: f.components(),
        }
        .into());
    }
    if !f.flags().dotted {
        return Err(HelmholtzError::NotDotted);
    }
    Ok(())
}

/// Gradient-part projector `P_g`.
pub fn project_grad(f: &FourierField) -> Result<FourierField, HelmholtzError> {
    require_dotted_vector(f)?;
    let lat = f.lattice().clone();
    let n = lat.dimension();
    let mut out = FourierField::zeros(lat.clone(), n);
    for (idx, xi) in lat.modes().enumerate() {
        let norm_sq: i64 = xi.iter().map(|&x| x * x).sum();
        if norm_sq == 0 {
            continue;
        }
        let mut dot = Complex64::default();
        for j in 0..n {
            dot += xi[j] as f64 * f.coeff(j, idx);
        }
        let scale = dot / norm_sq as f64;
        for j in 0..n {
            *out.coeff_mut(j, idx) = xi[j] as f64 * scale;
        }
    }
    *out.flags_mut() = FieldFlags {
        dotted: true,
        solenoidal: false,
        potential: true,
    };
    Ok(out)
}

/// Leray projector `P_sigma`.
///
/// One refinement pass drives the residual divergence to second-order
/// round-off, so `xi . out(xi)` vanishes to well below any tolerance.
pub fn project_sigma(f: &FourierField) -> Result<FourierField, HelmholtzError> {
    require_dotted_vector(f)?;
    let lat = f.lattice().clone();
    let n = lat.dimension();
    let mut out = f.clone();
    for (idx, xi) in lat.modes().enumerate() {
        let norm_sq: i64 = xi.iter().map(|&x| x * x).sum();
        if norm_sq == 0 {
            for j in 0..n {
                *out.coeff_mut(j, idx) = Complex64::default();
            }
            continue;
        }
        let inv = 1.0 / norm_sq as f64;
        for _ in 0..2 {
            let mut dot = Complex64::default();
            for j in 0..n {
                dot += xi[j] as f64 * out.coeff(j, idx);
            }
            let scale = dot * inv;
            for j in 0..n {
                *out.coeff_mut(j, idx) -= xi[j] as f64 * scale;
            }
        }
    }
    *out.flags_mut() = FieldFlags {
        dotted: true,
        solenoidal: true,
        potential: false,
    };
    Ok(out)
}

/// Scalar potential of the gradient part: `P_g F = grad q`.
pub fn scalar_potential(f: &FourierField) -> Result<FourierField, HelmholtzError> {
    require_dotted_vector(f)?;
    let lat = f.lattice().clone();
    let n = lat.dimension();
    let mut q = FourierField::zeros_scalar(lat.clone());
    let two_pi = 2.0 * std::f64::consts::PI;
    for (idx, xi) in lat.modes().enumerate() {
        let norm_sq: i64 = xi.iter().map(|&x| x * x).sum();
        if norm_sq == 0 {
            continue;
        }
        let mut dot = Complex64::default();
        for j in 0..n {
            dot += xi[j] as f64 * f.coeff(j, idx);
        }
        // q^(xi) = (xi . F^(xi)) / (2 pi i |xi|^2)
        *q.coeff_mut(0, idx) = dot / Complex64::new(0.0, two_pi * norm_sq as f64);
    }
    q.flags_mut().dotted = true;
    Ok(q)
}

/// Solve `div F = f` for the potential field `F^(xi) = xi f^(xi) / (2 pi i |xi|^2)`.
pub fn solve_div(f: &FourierField) -> Result<FourierField, HelmholtzError> {
    if !f.is_scalar() {
        return Err(SpectralError::BadArity {
            expected: 1,
            got: f.components(),
        }
        .into());
    }
    if !f.flags().dotted {
        return Err(HelmholtzError::NotDotted);
    }
    let lat = f.lattice().clone();
    let n = lat.dimension();
    let mut out = FourierField::zeros(lat.clone(), n);
    let two_pi = 2.0 * std::f64::consts::PI;
    for (idx, xi) in lat.modes().enumerate() {
        let norm_sq: i64 = xi.iter().map(|&x| x * x).sum();
        if norm_sq == 0 {
            continue;
        }
        let scale = f.coeff(0, idx) / Complex64::new(0.0, two_pi * norm_sq as f64);
        for j in 0..n {
            *out.coeff_mut(j, idx) = xi[j] as f64 * scale;
        }
    }
    *out.flags_mut() = FieldFlags {
        dotted: true,
        solenoidal: false,
        potential: true,
    };
    Ok(out)
}

/// Solve `grad f = F` for a potential field `F`.
///
/// Rejects inputs whose solenoidal part exceeds a relative `L_2` norm of
/// `tol::SOLENOIDAL_REJECT` (unless the potential flag certifies the input).
pub fn solve_grad(f: &FourierField) -> Result<FourierField, HelmholtzError> {
    require_dotted_vector(f)?;
    if !f.flags().potential {
        let sigma = project_sigma(f)?;
        let total = sobolev_norm(f, 0.0);
        if total > 0.0 {
            let ratio = sobolev_norm(&sigma, 0.0) / total;
            if ratio > tol::SOLENOIDAL_REJECT {
                return Err(HelmholtzError::NotPotential { ratio });
            }
        }
    }
    scalar_potential(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{random_scalar_field, random_solenoidal_field, random_vector_field};
    use crate::spectral::{div, dual_product, grad, inner_product, sobolev_norm};

    #[test]
    fn gradient_fields_are_fixed_points() {
        let q = random_scalar_field(2, 4, 1, 1.0);
        let f = grad(&q).unwrap();
        let pg = project_grad(&f).unwrap();
        for j in 0..2 {
            for idx in 0..f.lattice().mode_count() {
                assert!((f.coeff(j, idx) - pg.coeff(j, idx)).norm() < 1e-14);
            }
        }
        // And the solenoidal projector kills them.
        let ps = project_sigma(&f).unwrap();
        assert!(sobolev_norm(&ps, 0.0) < 1e-14 * sobolev_norm(&f, 0.0));
    }

    #[test]
    fn solenoidal_fields_pass_through() {
        let v = random_solenoidal_field(3, 3, 2, 1.0);
        let ps = project_sigma(&v).unwrap();
        for j in 0..3 {
            for idx in 0..v.lattice().mode_count() {
                assert!((v.coeff(j, idx) - ps.coeff(j, idx)).norm() < 1e-14);
            }
        }
        let pg = project_grad(&v).unwrap();
        assert!(sobolev_norm(&pg, 0.0) < 1e-13 * sobolev_norm(&v, 0.0));
    }

    #[test]
    fn decomposition_sums_to_identity() {
        let f = random_vector_field(3, 3, 3, 1.0);
        let pg = project_grad(&f).unwrap();
        let ps = project_sigma(&f).unwrap();
        let scale = sobolev_norm(&f, 0.0);
        for j in 0..3 {
            for idx in 0..f.lattice().mode_count() {
                let diff = (f.coeff(j, idx) - pg.coeff(j, idx) - ps.coeff(j, idx)).norm();
                assert!(diff < 1e-14 * (1.0 + scale));
            }
        }
    }

    #[test]
    fn decomposition_recovers_independent_parts() {
        // F assembled from an independent gradient and solenoidal pair.
        let q = random_scalar_field(2, 4, 21, 1.0);
        let g_part = grad(&q).unwrap();
        let s_part = random_solenoidal_field(2, 4, 22, 1.0);
        let mut f = g_part.clone();
        f.add_scaled(&s_part, 1.0);
        let pg = project_grad(&f).unwrap();
        let ps = project_sigma(&f).unwrap();
        let scale = sobolev_norm(&f, 0.0);
        for j in 0..2 {
            for idx in 0..f.lattice().mode_count() {
                assert!((pg.coeff(j, idx) - g_part.coeff(j, idx)).norm() < 1e-13 * (1.0 + scale));
                assert!((ps.coeff(j, idx) - s_part.coeff(j, idx)).norm() < 1e-13 * (1.0 + scale));
            }
        }
    }

    #[test]
    fn potential_matches_gradient_route() {
        // q from the stated series, then grad q = P_g F.
        let f = random_vector_field(2, 5, 4, 1.0);
        let q = scalar_potential(&f).unwrap();
        let gq = grad(&q).unwrap();
        let pg = project_grad(&f).unwrap();
        let scale = sobolev_norm(&f, 0.0);
        for j in 0..2 {
            for idx in 0..f.lattice().mode_count() {
                assert!((gq.coeff(j, idx) - pg.coeff(j, idx)).norm() < 1e-13 * (1.0 + scale));
            }
        }
    }

    #[test]
    fn projectors_are_orthogonal_in_every_norm() {
        for s in [-1.0, 0.0, 1.0] {
            let f = random_vector_field(2, 4, 5, 1.0);
            let g = random_vector_field(2, 4, 6, 1.0);
            let pg = project_grad(&f).unwrap();
            let ps = project_sigma(&g).unwrap();
            let ip = inner_product(&pg, &ps, s).unwrap().norm();
            let scale = sobolev_norm(&pg, s) * sobolev_norm(&ps, s);
            assert!(ip <= 1e-13 * (1.0 + scale));
        }
    }

    #[test]
    fn dual_orthogonality_gradient_vs_solenoidal() {
        let f = random_vector_field(3, 3, 7, 1.0);
        let v = random_solenoidal_field(3, 3, 8, 1.0);
        let pg = project_grad(&f).unwrap();
        let dp = dual_product(&pg, &v).unwrap().norm();
        assert!(dp <= 1e-13 * (1.0 + sobolev_norm(&pg, 0.0) * sobolev_norm(&v, 0.0)));
    }

    #[test]
    fn zero_fields_map_to_zero_solutions() {
        let lat = crate::spectral::Lattice::new(2, 2).unwrap();
        let zero_scalar = FourierField::zeros_scalar(lat.clone());
        assert_eq!(solve_div(&zero_scalar).unwrap().max_coeff(), 0.0);
        let zero_vector = FourierField::zeros_vector(lat);
        assert_eq!(solve_grad(&zero_vector).unwrap().max_coeff(), 0.0);
    }

    #[test]
    fn solve_div_round_trip_and_bound() {
        let single = {
            // f^(xi0) = 1 at xi0 = (0,1): F^(xi0) = (0, 1/(2 pi i)).
            let lat = crate::spectral::Lattice::new(2, 2).unwrap();
            let mut f = FourierField::zeros_scalar(lat);
            let idx = f.lattice().index(&[0, 1]);
            *f.coeff_mut(0, idx) = Complex64::new(1.0, 0.0);
            f.flags_mut().dotted = true;
            f
        };
        let ff = solve_div(&single).unwrap();
        let idx = ff.lattice().index(&[0, 1]);
        let expected = Complex64::new(0.0, -1.0 / (2.0 * std::f64::consts::PI));
        assert!((ff.coeff(0, idx)).norm() < 1e-15);
        assert!((ff.coeff(1, idx) - expected).norm() < 1e-15);

        for s in [-1.0, 0.0, 1.0] {
            let f = random_scalar_field(2, 4, 9, 1.0);
            let big_f = solve_div(&f).unwrap();
            let back = div(&big_f).unwrap();
            let scale = sobolev_norm(&f, 0.0);
            for idx in 0..f.lattice().mode_count() {
                assert!((back.coeff(0, idx) - f.coeff(0, idx)).norm() < 1e-14 * (1.0 + scale));
            }
            assert!(
                sobolev_norm(&big_f, s + 1.0)
                    <= 2.0_f64.sqrt() * sobolev_norm(&f, s) * (1.0 + 1e-13)
            );
        }
    }

    #[test]
    fn solve_grad_round_trip_and_bound() {
        for s in [-1.0, 0.0, 1.0] {
            let q = random_scalar_field(3, 3, 10, 1.0);
            let f = grad(&q).unwrap();
            let back = solve_grad(&f).unwrap();
            let scale = sobolev_norm(&q, 0.0);
            for idx in 0..q.lattice().mode_count() {
                assert!((back.coeff(0, idx) - q.coeff(0, idx)).norm() < 1e-13 * (1.0 + scale));
            }
            assert!(
                sobolev_norm(&back, s)
                    <= 2.0_f64.sqrt() * sobolev_norm(&f, s - 1.0) * (1.0 + 1e-13)
            );
        }
    }

    #[test]
    fn solve_grad_rejects_solenoidal_contamination() {
        let q = random_scalar_field(2, 3, 11, 1.0);
        let mut f = grad(&q).unwrap();
        let noise = random_solenoidal_field(2, 3, 12, 1.0);
        f.add_scaled(&noise, 1e-3);
        f.flags_mut().potential = false;
        match solve_grad(&f) {
            Err(HelmholtzError::NotPotential { ratio }) => assert!(ratio > 1e-6),
            other => panic!("expected NotPotential, got {other:?}"),
        }
    }

    #[test]
    fn non_dotted_inputs_are_rejected() {
        let q = random_scalar_field(2, 2, 13, 1.0);
        let mut f = grad(&q).unwrap();
        let origin = f.lattice().origin_index();
        *f.coeff_mut(0, origin) = Complex64::new(1.0, 0.0);
        f.flags_mut().dotted = false;
        assert!(matches!(project_grad(&f), Err(HelmholtzError::NotDotted)));
        assert!(matches!(project_sigma(&f), Err(HelmholtzError::NotDotted)));

        let mut s = random_scalar_field(2, 2, 14, 1.0);
        *s.coeff_mut(0, origin) = Complex64::new(1.0, 0.0);
        s.flags_mut().dotted = false;
        assert!(matches!(solve_div(&s), Err(HelmholtzError::NotDotted)));
    }

    #[test]
    fn projectors_commute_with_bessel() {
        let f = random_vector_field(2, 4, 15, 1.0);
        let r = 1.5;
        let a = crate::spectral::bessel_potential(&project_sigma(&f).unwrap(), r);
        let b = project_sigma(&crate::spectral::bessel_potential(&f, r)).unwrap();
        for j in 0..2 {
            for idx in 0..f.lattice().mode_count() {
                assert!((a.coeff(j, idx) - b.coeff(j, idx)).norm() < 1e-13);
            }
        }
    }
}
