//! Norms, products and differentiation on Fourier fields.

use num_complex::Complex64;

use super::{rho, FieldFlags, FourierField, SpectralError};
use crate::sum::{Accumulator, ComplexAccumulator};

/// Sobolev norm `( sum_xi rho(xi)^{2s} |g_hat(xi)|^2 )^{1/2}`.
///
/// For dotted fields this equals the seminorm over the punctured lattice.
pub fn sobolev_norm(g: &FourierField, s: f64) -> f64 {
    let mut acc = Accumulator::new();
    for (idx, xi) in g.lattice().modes().enumerate() {
        let w = rho(&xi).powf(2.0 * s);
        for comp in 0..g.components() {
            acc.add(w * g.coeff(comp, idx).norm_sqr());
        }
    }
    acc.value().max(0.0).sqrt()
}

/// Inner product in `H^s`: `sum_xi rho(xi)^{2s} g_hat(xi) . conj(f_hat(xi))`.
pub fn inner_product(
    g: &FourierField,
    f: &FourierField,
    s: f64,
) -> Result<Complex64, SpectralError> {
    g.same_shape(f)?;
    let mut acc = ComplexAccumulator::new();
    for (idx, xi) in g.lattice().modes().enumerate() {
        let w = rho(&xi).powf(2.0 * s);
        for comp in 0..g.components() {
            acc.add(w * g.coeff(comp, idx) * f.coeff(comp, idx).conj());
        }
    }
    Ok(acc.value())
}

/// Dual product `<g, f>_T = sum_xi g_hat(xi) . f_hat(-xi)`.
///
/// For real fields this is the `L_2` pairing `int_T g . f`.
pub fn dual_product(g: &FourierField, f: &FourierField) -> Result<Complex64, SpectralError> {
    g.same_shape(f)?;
    let mut acc = ComplexAccumulator::new();
    for idx in 0..g.lattice().mode_count() {
        let mirror = g.lattice().mirror_index(idx);
        for comp in 0..g.components() {
            acc.add(g.coeff(comp, idx) * f.coeff(comp, mirror));
        }
    }
    Ok(acc.value())
}

/// Real part of the dual product, asserting the imaginary residue is noise.
pub fn dual_product_real(g: &FourierField, f: &FourierField) -> Result<f64, SpectralError> {
    let v = dual_product(g, f)?;
    debug_assert!(
        v.im.abs() <= 1e-10 * (1.0 + v.re.abs()).max(g.max_coeff() * f.max_coeff()),
        "dual product of real fields has imaginary part {:e}",
        v.im
    );
    Ok(v.re)
}

/// Gradient of a scalar field: `d_j -> 2 pi i xi_j`.
pub fn grad(g: &FourierField) -> Result<FourierField, SpectralError> {
    if !g.is_scalar() {
        return Err(SpectralError::BadArity {
            expected: 1,
            got: g.components(),
        });
    }
    let lat = g.lattice().clone();
    let n = lat.dimension();
    let mut out = FourierField::zeros(lat.clone(), n);
    let two_pi = 2.0 * std::f64::consts::PI;
    for (idx, xi) in lat.modes().enumerate() {
        let c = g.coeff(0, idx);
        for (j, &x) in xi.iter().enumerate() {
            *out.coeff_mut(j, idx) = Complex64::new(0.0, two_pi * x as f64) * c;
        }
    }
    *out.flags_mut() = FieldFlags {
        dotted: true,
        solenoidal: false,
        potential: true,
    };
    Ok(out)
}

/// Divergence of a vector field: `sum_j 2 pi i xi_j v_hat_j`.
pub fn div(v: &FourierField) -> Result<FourierField, SpectralError> {
    let n = v.lattice().dimension();
    if v.components() != n {
        return Err(SpectralError::BadArity {
            expected: n,
            got: v.components(),
        });
    }
    let lat = v.lattice().clone();
    let mut out = FourierField::zeros_scalar(lat.clone());
    let two_pi = 2.0 * std::f64::consts::PI;
    for (idx, xi) in lat.modes().enumerate() {
        let mut acc = Complex64::default();
        for (j, &x) in xi.iter().enumerate() {
            acc += Complex64::new(0.0, two_pi * x as f64) * v.coeff(j, idx);
        }
        *out.coeff_mut(0, idx) = acc;
    }
    out.flags_mut().dotted = true;
    out.flags_mut().solenoidal = false;
    out.flags_mut().potential = false;
    Ok(out)
}

/// Symmetric gradient `E(u)` as an `n x n`-component field.
///
/// Component layout is row-major: entry `(j, beta)` sits at `j * n + beta`.
pub fn sym_gradient(v: &FourierField) -> Result<FourierField, SpectralError> {
    let n = v.lattice().dimension();
    if v.components() != n {
        return Err(SpectralError::BadArity {
            expected: n,
            got: v.components(),
        });
    }
    let lat = v.lattice().clone();
    let mut out = FourierField::zeros(lat.clone(), n * n);
    let pi = std::f64::consts::PI;
    for (idx, xi) in lat.modes().enumerate() {
        for j in 0..n {
            for beta in 0..n {
                // E_{j beta} = 1/2 (d_j u_beta + d_beta u_j) -> pi i (xi_j u_beta + xi_beta u_j)
                let val = Complex64::new(0.0, pi)
                    * (xi[j] as f64 * v.coeff(beta, idx) + xi[beta] as f64 * v.coeff(j, idx));
                *out.coeff_mut(j * n + beta, idx) = val;
            }
        }
    }
    *out.flags_mut() = FieldFlags {
        dotted: true,
        solenoidal: false,
        potential: false,
    };
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{random_scalar_field, random_vector_field};
    use crate::spectral::{bessel_potential, from_physical, to_physical, Lattice};

    #[test]
    fn sobolev_norm_single_mode() {
        // One-term sum: a unit coefficient at xi0 = (1,0) gives rho(xi0).
        let lat = Lattice::new(2, 2).unwrap();
        let mut g = FourierField::zeros_scalar(lat);
        let idx = g.lattice().index(&[1, 0]);
        *g.coeff_mut(0, idx) = Complex64::new(1.0, 0.0);
        let expected = 2.0 * std::f64::consts::PI * 2.0_f64.sqrt();
        assert!((sobolev_norm(&g, 1.0) - expected).abs() < 1e-13);
        // The Hermitian pair of the same mode doubles the squared sum.
        let mut h = FourierField::zeros_scalar(Lattice::new(2, 2).unwrap());
        h.set_pair(0, &[1, 0], Complex64::new(1.0, 0.0));
        assert!((sobolev_norm(&h, 1.0) - 2.0_f64.sqrt() * expected).abs() < 1e-13);
    }

    #[test]
    fn zero_field_norm() {
        let lat = Lattice::new(3, 2).unwrap();
        let g = FourierField::zeros_scalar(lat);
        for s in [-1.0, 0.0, 2.0] {
            assert_eq!(sobolev_norm(&g, s), 0.0);
        }
    }

    #[test]
    fn inner_product_is_norm_squared() {
        let g = random_scalar_field(2, 4, 11, 1.0);
        for s in [-1.0, 0.0, 1.0] {
            let ip = inner_product(&g, &g, s).unwrap();
            let nrm = sobolev_norm(&g, s);
            assert!((ip.re - nrm * nrm).abs() <= 1e-14 * (1.0 + nrm * nrm));
            assert!(ip.im.abs() <= 1e-14 * (1.0 + nrm * nrm));
        }
    }

    #[test]
    fn inner_product_unit_mode_is_one() {
        let lat = Lattice::new(2, 2).unwrap();
        let mut g = FourierField::zeros_scalar(lat);
        let idx = g.lattice().index(&[1, 0]);
        *g.coeff_mut(0, idx) = Complex64::new(1.0, 0.0);
        let v = inner_product(&g, &g, 0.0).unwrap();
        assert!((v.re - 1.0).abs() < 1e-15 && v.im == 0.0);
    }

    #[test]
    fn disjoint_supports_are_orthogonal() {
        let lat = Lattice::new(2, 3).unwrap();
        let mut g = FourierField::zeros_scalar(lat.clone());
        let mut f = FourierField::zeros_scalar(lat);
        g.set_pair(0, &[1, 0], Complex64::new(0.3, 0.7));
        f.set_pair(0, &[0, 2], Complex64::new(-1.0, 0.2));
        assert_eq!(inner_product(&g, &f, 0.0).unwrap().norm(), 0.0);
        assert_eq!(dual_product(&g, &f).unwrap().norm(), 0.0);
    }

    #[test]
    fn dual_product_constants() {
        let lat = Lattice::new(2, 2).unwrap();
        let mut g = FourierField::zeros_scalar(lat.clone());
        *g.coeff_mut(0, g.lattice().origin_index()) = Complex64::new(1.0, 0.0);
        let f = g.clone();
        let v = dual_product(&g, &f).unwrap();
        assert!((v.re - 1.0).abs() < 1e-15 && v.im.abs() < 1e-15);

        // Dotted field against the constant 1: zero by definition.
        let dotted = random_scalar_field(2, 2, 5, 1.0);
        let v = dual_product(&dotted, &f).unwrap();
        assert!(v.norm() < 1e-15);
    }

    #[test]
    fn dual_product_matches_quadrature() {
        for n in [2usize, 3] {
            let g = random_scalar_field(n, 3, 21, 1.0);
            let f = random_scalar_field(n, 3, 22, 1.0);
            let spectral = dual_product(&g, &f).unwrap();
            // Quadrature oracle: sample both on an exact product grid.
            let nodes = 2 * (3 + 3) + 1;
            let gg = to_physical(&g, nodes).unwrap();
            let ff = to_physical(&f, nodes).unwrap();
            let mut acc = crate::sum::Accumulator::new();
            for node in 0..gg.node_count() {
                acc.add(gg.value(0, node) * ff.value(0, node));
            }
            let quad = acc.value() / gg.node_count() as f64;
            assert!((spectral.re - quad).abs() < 1e-12 * (1.0 + quad.abs()));
            assert!(spectral.im.abs() < 1e-13);
        }
    }

    #[test]
    fn parseval_l2() {
        let g = random_scalar_field(2, 5, 33, 1.0);
        let nrm = sobolev_norm(&g, 0.0);
        let grid = to_physical(&g, 11).unwrap();
        let mut acc = crate::sum::Accumulator::new();
        for node in 0..grid.node_count() {
            acc.add(grid.value(0, node) * grid.value(0, node));
        }
        let quad = (acc.value() / grid.node_count() as f64).sqrt();
        assert!((nrm - quad).abs() < 1e-12 * (1.0 + quad));
    }

    #[test]
    fn bessel_round_trip_and_isometry() {
        let g = random_vector_field(3, 2, 44, 1.0);
        // r = 0 is the identity.
        let same = bessel_potential(&g, 0.0);
        for comp in 0..g.components() {
            for idx in 0..g.lattice().mode_count() {
                assert_eq!(g.coeff(comp, idx), same.coeff(comp, idx));
            }
        }
        let r = 1.7;
        let up = bessel_potential(&g, r);
        let back = bessel_potential(&up, -r);
        for comp in 0..g.components() {
            for idx in 0..g.lattice().mode_count() {
                assert!((g.coeff(comp, idx) - back.coeff(comp, idx)).norm() < 1e-14);
            }
        }
        // Isometry H^s -> H^{s-r}.
        let s = 0.6;
        let a = sobolev_norm(&up, s - r);
        let b = sobolev_norm(&g, s);
        assert!((a - b).abs() <= 1e-14 * (1.0 + b));
    }

    #[test]
    fn bessel_squared_is_two_pi_sq_minus_laplacian() {
        // Lambda^2 g = (2 pi)^2 g - Delta g, with Delta applied spectrally.
        let g = random_scalar_field(2, 4, 55, 1.0);
        let lhs = bessel_potential(&g, 2.0);
        let two_pi = 2.0 * std::f64::consts::PI;
        for (idx, xi) in g.lattice().modes().enumerate() {
            let norm_sq: i64 = xi.iter().map(|&x| x * x).sum();
            let laplacian = -(two_pi * two_pi) * norm_sq as f64 * g.coeff(0, idx);
            let rhs = two_pi * two_pi * g.coeff(0, idx) - laplacian;
            assert!((lhs.coeff(0, idx) - rhs).norm() < 1e-12 * (1.0 + rhs.norm()));
        }
    }

    #[test]
    fn grad_of_constant_vanishes() {
        let lat = Lattice::new(2, 2).unwrap();
        let mut g = FourierField::zeros_scalar(lat);
        *g.coeff_mut(0, g.lattice().origin_index()) = Complex64::new(3.5, 0.0);
        let dg = grad(&g).unwrap();
        assert_eq!(dg.max_coeff(), 0.0);
    }

    #[test]
    fn div_grad_is_spectral_laplacian() {
        let g = random_scalar_field(2, 3, 66, 1.0);
        let lap = div(&grad(&g).unwrap()).unwrap();
        let two_pi_sq = (2.0 * std::f64::consts::PI).powi(2);
        for (idx, xi) in g.lattice().modes().enumerate() {
            let norm_sq: i64 = xi.iter().map(|&x| x * x).sum();
            let expected = -two_pi_sq * norm_sq as f64 * g.coeff(0, idx);
            assert!((lap.coeff(0, idx) - expected).norm() < 1e-12 * (1.0 + expected.norm()));
        }
    }

    #[test]
    fn gradient_norm_sandwich_mik13() {
        // 1/2 ||g||_{H^s}^2 <= ||grad g||_{H^{s-1}}^2 <= ||g||_{H^s}^2 for dotted g,
        // and its vector counterpart with the full Jacobian.
        for seed in 0..25u64 {
            for s in [-1.0, 0.0, 1.0, 2.0] {
                let g = random_scalar_field(2, 4, 77 + seed, 1.0);
                let dg = grad(&g).unwrap();
                let lhs = 0.5 * sobolev_norm(&g, s).powi(2);
                let mid = sobolev_norm(&dg, s - 1.0).powi(2);
                let rhs = sobolev_norm(&g, s).powi(2);
                assert!(lhs <= mid * (1.0 + 1e-12));
                assert!(mid <= rhs * (1.0 + 1e-12));

                let v = random_vector_field(3, 3, 200 + seed, 1.0);
                let mut jac_sq = 0.0;
                for comp in 0..3 {
                    let mut scalar = FourierField::zeros_scalar(v.lattice().clone());
                    for idx in 0..v.lattice().mode_count() {
                        *scalar.coeff_mut(0, idx) = v.coeff(comp, idx);
                    }
                    scalar.flags_mut().dotted = true;
                    jac_sq += sobolev_norm(&grad(&scalar).unwrap(), s - 1.0).powi(2);
                }
                let v_sq = sobolev_norm(&v, s).powi(2);
                assert!(0.5 * v_sq <= jac_sq * (1.0 + 1e-12));
                assert!(jac_sq <= v_sq * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn sym_gradient_trace_is_divergence() {
        let v = random_vector_field(3, 3, 88, 1.0);
        let e = sym_gradient(&v).unwrap();
        let d = div(&v).unwrap();
        let n = 3;
        for idx in 0..v.lattice().mode_count() {
            let mut tr = Complex64::default();
            for j in 0..n {
                tr += e.coeff(j * n + j, idx);
            }
            assert!((tr - d.coeff(0, idx)).norm() < 1e-12 * (1.0 + d.coeff(0, idx).norm()));
            // Symmetry of E.
            for j in 0..n {
                for b in 0..n {
                    assert_eq!(e.coeff(j * n + b, idx), e.coeff(b * n + j, idx));
                }
            }
        }
    }

    #[test]
    fn duality_cauchy_schwarz() {
        for s in [-1.0, 0.0, 1.0] {
            let g = random_vector_field(2, 4, 90, 1.0);
            let f = random_vector_field(2, 4, 91, 1.0);
            let lhs = dual_product(&g, &f).unwrap().norm();
            let rhs = sobolev_norm(&g, s) * sobolev_norm(&f, -s);
            assert!(lhs <= rhs * (1.0 + 1e-12));
        }
    }

    #[test]
    fn tolerances_hold_at_large_cutoff() {
        // The compensated mode sums must keep quadrature agreement at
        // K = 32, where a naive sum over 65^2 terms with rho^2 weights up
        // to ~4e4 loses digits.
        let k = 32;
        let g = random_scalar_field(2, k, 3203, 1.0);
        let nrm = sobolev_norm(&g, 0.0);
        let grid = to_physical(&g, 2 * k + 1).unwrap();
        let mut acc = crate::sum::Accumulator::new();
        for node in 0..grid.node_count() {
            acc.add(grid.value(0, node) * grid.value(0, node));
        }
        let quad = (acc.value() / grid.node_count() as f64).sqrt();
        assert!(
            (nrm - quad).abs() < 1e-12 * quad,
            "parseval at K=32: {:e}",
            (nrm - quad).abs()
        );
        // Bessel isometry at the same size.
        let up = bessel_potential(&g, 1.3);
        let a = sobolev_norm(&up, 0.4 - 1.3);
        let b = sobolev_norm(&g, 0.4);
        assert!(
            (a - b).abs() <= 1e-14 * b,
            "isometry at K=32: {:e}",
            (a - b).abs()
        );
    }

    #[test]
    fn operations_preserve_reality() {
        let g = random_scalar_field(2, 4, 92, 1.0);
        assert!(grad(&g).unwrap().hermitian_defect() < 1e-15);
        assert!(bessel_potential(&g, 1.3).hermitian_defect() < 1e-15);
        let grid = to_physical(&g, 13).unwrap();
        let back = from_physical(&grid, 4).unwrap();
        assert!(back.hermitian_defect() < 1e-13);
    }
}
