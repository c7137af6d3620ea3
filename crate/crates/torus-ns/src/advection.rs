//! The nonlinear advection term `(v1 . grad) v2` and the trilinear form.
//!
//! Two routes compute the same coefficients:
//!
//! * `Pseudospectral`: differentiate spectrally, multiply on a padded grid
//!   of `3K+1` nodes per axis, transform back. Products of two cutoff-K
//!   polynomials alias only into discarded modes on that grid, so the
//!   retained coefficients are exact.
//! * `Convolution`: the `O(K^{2n})` double mode sum. Slow and exact; it is
//!   shipped (not test-only) because the verification suites and future
//!   debugging want an in-tree oracle.

use num_complex::Complex64;

use crate::helmholtz::{self, HelmholtzError};
use crate::spectral::{
    dual_product_real, from_physical, to_physical, FieldFlags, FourierField, SpectralError,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AdvectionMethod {
    #[default]
    Pseudospectral,
    Convolution,
}

/// Grid that dealiases quadratic products at cutoff `K`.
pub fn dealias_nodes(cutoff: usize) -> usize {
    3 * cutoff + 1
}

/// Fourier coefficients of `(v1 . grad) v2`.
pub fn advect(
    v1: &FourierField,
    v2: &FourierField,
    method: AdvectionMethod,
) -> Result<FourierField, SpectralError> {
    v1.same_shape(v2)?;
    let n = v1.lattice().dimension();
    if v1.components() != n {
        return Err(SpectralError::BadArity {
            expected: n,
            got: v1.components(),
        });
    }
    match method {
        AdvectionMethod::Pseudospectral => advect_pseudospectral(v1, v2),
        AdvectionMethod::Convolution => advect_convolution(v1, v2),
    }
}

fn advect_pseudospectral(
    v1: &FourierField,
    v2: &FourierField,
) -> Result<FourierField, SpectralError> {
    let lat = v1.lattice().clone();
    let n = lat.dimension();
    let k = lat.cutoff();
    let nodes = dealias_nodes(k);
    let two_pi = 2.0 * std::f64::consts::PI;

    let v1_grid = to_physical(v1, nodes)?;
    // d_j v2_beta, differentiated spectrally before the pointwise product.
    let mut derivative = FourierField::zeros(lat.clone(), n * n);
    for (idx, xi) in lat.modes().enumerate() {
        for j in 0..n {
            let factor = Complex64::new(0.0, two_pi * xi[j] as f64);
            for beta in 0..n {
                *derivative.coeff_mut(j * n + beta, idx) = factor * v2.coeff(beta, idx);
            }
        }
    }
    let dv2_grid = to_physical(&derivative, nodes)?;

    let mut product = crate::spectral::GridField::zeros(n, nodes, n);
    for beta in 0..n {
        let out = product.plane_mut(beta);
        for j in 0..n {
            let a = v1_grid.plane(j);
            let d = dv2_grid.plane(j * n + beta);
            for (o, (x, y)) in out.iter_mut().zip(a.iter().zip(d.iter())) {
                *o += x * y;
            }
        }
    }
    let mut out = from_physical(&product, k)?;
    *out.flags_mut() = FieldFlags::default();
    Ok(out)
}

fn advect_convolution(v1: &FourierField, v2: &FourierField) -> Result<FourierField, SpectralError> {
    let lat = v1.lattice().clone();
    let n = lat.dimension();
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut out = FourierField::zeros(lat.clone(), n);
    let count = lat.mode_count();
    let mut xi_sum = vec![0i64; n];
    for idx1 in 0..count {
        let xi1 = lat.mode(idx1);
        // v1 contributes at xi1; the derivative factor acts on xi2.
        for idx2 in 0..count {
            let xi2 = lat.mode(idx2);
            let mut inside = true;
            for d in 0..n {
                xi_sum[d] = xi1[d] + xi2[d];
                if xi_sum[d].unsigned_abs() as usize > lat.cutoff() {
                    inside = false;
                    break;
                }
            }
            if !inside {
                continue;
            }
            let target = lat.index(&xi_sum);
            let mut transport = Complex64::default();
            for j in 0..n {
                transport += v1.coeff(j, idx1) * Complex64::new(0.0, two_pi * xi2[j] as f64);
            }
            if transport.norm_sqr() == 0.0 {
                continue;
            }
            for beta in 0..n {
                let val = transport * v2.coeff(beta, idx2);
                *out.coeff_mut(beta, target) += val;
            }
        }
    }
    *out.flags_mut() = FieldFlags::default();
    Ok(out)
}

/// Trilinear form `<(v1 . grad) v2, v3>_T`.
pub fn trilinear(
    v1: &FourierField,
    v2: &FourierField,
    v3: &FourierField,
    method: AdvectionMethod,
) -> Result<f64, SpectralError> {
    let adv = advect(v1, v2, method)?;
    dual_product_real(&adv, v3)
}

/// Leray-projected self-advection `P_sigma[(u . grad) u]` for solenoidal `u`.
///
/// The mean of `(u . grad) u` vanishes identically for solenoidal `u`, so
/// the round-off mean mode is zeroed before projecting.
pub fn advect_projected(
    u: &FourierField,
    method: AdvectionMethod,
) -> Result<FourierField, HelmholtzError> {
    debug_assert!(
        u.flags().solenoidal,
        "advect_projected needs solenoidal input"
    );
    let adv = advect(u, u, method).map_err(HelmholtzError::Spectral)?;
    helmholtz::project_sigma(&adv.into_dotted())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{build_basis, BasisOrdering};
    use crate::rng::{random_solenoidal_field, random_vector_field};
    use crate::spectral::{div, dual_product_real, sobolev_norm, Lattice};

    fn both_methods() -> [AdvectionMethod; 2] {
        [
            AdvectionMethod::Pseudospectral,
            AdvectionMethod::Convolution,
        ]
    }

    #[test]
    fn constant_and_zero_inputs() {
        let lat = Lattice::new(2, 2).unwrap();
        let v1 = random_vector_field(2, 2, 31, 1.0);
        // v2 constant: gradient vanishes.
        let mut v2 = FourierField::zeros_vector(lat.clone());
        *v2.coeff_mut(0, lat.origin_index()) = Complex64::new(1.5, 0.0);
        for m in both_methods() {
            assert_eq!(advect(&v1, &v2, m).unwrap().max_coeff(), 0.0);
        }
        // v1 = 0.
        let zero = FourierField::zeros_vector(lat.clone());
        for m in both_methods() {
            assert_eq!(advect(&zero, &v1, m).unwrap().max_coeff(), 0.0);
        }
    }

    #[test]
    fn pseudospectral_matches_convolution() {
        for n in [2usize, 3] {
            let k = if n == 2 { 5 } else { 3 };
            let v1 = random_vector_field(n, k, 32, 0.5);
            let v2 = random_vector_field(n, k, 33, 0.5);
            let fast = advect(&v1, &v2, AdvectionMethod::Pseudospectral).unwrap();
            let exact = advect(&v1, &v2, AdvectionMethod::Convolution).unwrap();
            let scale = exact.max_coeff().max(1.0);
            for comp in 0..n {
                for idx in 0..v1.lattice().mode_count() {
                    let d = (fast.coeff(comp, idx) - exact.coeff(comp, idx)).norm();
                    assert!(d < 1e-12 * scale, "mode {idx} comp {comp}: {d:e}");
                }
            }
        }
    }

    #[test]
    fn integration_by_parts_identity() {
        // <(v1.grad)v2, v3> = -<(v1.grad)v3, v2> - <(div v1) v3, v2>
        let n = 2;
        let k = 4;
        let v1 = random_vector_field(n, k, 34, 0.5);
        let v2 = random_vector_field(n, k, 35, 0.5);
        let v3 = random_vector_field(n, k, 36, 0.5);
        for m in both_methods() {
            let lhs = trilinear(&v1, &v2, &v3, m).unwrap();
            let t1 = trilinear(&v1, &v3, &v2, m).unwrap();
            // <(div v1) v3, v2> on the dealiased grid.
            let d1 = div(&v1).unwrap();
            let nodes = dealias_nodes(k) + 2 * k; // triple product: be generous
            let dg = crate::spectral::to_physical(&d1, nodes).unwrap();
            let g3 = crate::spectral::to_physical(&v3, nodes).unwrap();
            let g2 = crate::spectral::to_physical(&v2, nodes).unwrap();
            let mut acc = crate::sum::Accumulator::new();
            for node in 0..dg.node_count() {
                let mut dot = 0.0;
                for comp in 0..n {
                    dot += g3.value(comp, node) * g2.value(comp, node);
                }
                acc.add(dg.value(0, node) * dot);
            }
            let t2 = acc.value() / dg.node_count() as f64;
            let scale = lhs.abs().max(t1.abs()).max(t2.abs()).max(1.0);
            assert!((lhs + t1 + t2).abs() < 1e-11 * scale);
        }
    }

    #[test]
    fn skew_symmetry_for_solenoidal_transport() {
        let v1 = random_solenoidal_field(2, 4, 37, 0.5);
        let v2 = random_vector_field(2, 4, 38, 0.5);
        let v3 = random_vector_field(2, 4, 39, 0.5);
        for m in both_methods() {
            let a = trilinear(&v1, &v2, &v3, m).unwrap();
            let b = trilinear(&v1, &v3, &v2, m).unwrap();
            let scale = a.abs().max(b.abs()).max(1.0);
            assert!((a + b).abs() < 1e-11 * scale);
            let c = trilinear(&v1, &v2, &v2, m).unwrap();
            assert!(c.abs() < 1e-11 * scale);
        }
    }

    #[test]
    fn energy_neutrality_of_projected_term() {
        let u = random_solenoidal_field(3, 3, 40, 0.5);
        for m in both_methods() {
            let proj = advect_projected(&u, m).unwrap();
            let e = dual_product_real(&proj, &u).unwrap();
            let scale = sobolev_norm(&u, 0.0).powi(2) * sobolev_norm(&u, 1.0);
            assert!(e.abs() < 1e-11 * (1.0 + scale));
        }
    }

    #[test]
    fn divergence_form_identity() {
        // div(u (x) u) = (u . grad) u for solenoidal u.
        let n = 2;
        let k = 4;
        let u = random_solenoidal_field(n, k, 41, 0.5);
        let adv = advect(&u, &u, AdvectionMethod::Convolution).unwrap();
        // Tensor-divergence route: d_j (u_j u_beta) by exact convolution.
        let lat = u.lattice().clone();
        let two_pi = 2.0 * std::f64::consts::PI;
        let count = lat.mode_count();
        let mut tensor_div = FourierField::zeros_vector(lat.clone());
        for idx1 in 0..count {
            let xi1 = lat.mode(idx1);
            for idx2 in 0..count {
                let xi2 = lat.mode(idx2);
                let sum: Vec<i64> = xi1.iter().zip(xi2.iter()).map(|(a, b)| a + b).collect();
                if !lat.contains(&sum) {
                    continue;
                }
                let target = lat.index(&sum);
                for beta in 0..n {
                    let mut val = Complex64::default();
                    for j in 0..n {
                        let factor = Complex64::new(0.0, two_pi * sum[j] as f64);
                        val += factor * u.coeff(j, idx1) * u.coeff(beta, idx2);
                    }
                    *tensor_div.coeff_mut(beta, target) += val;
                }
            }
        }
        let scale = adv.max_coeff().max(1.0);
        for comp in 0..n {
            for idx in 0..count {
                let d = (adv.coeff(comp, idx) - tensor_div.coeff(comp, idx)).norm();
                assert!(d < 1e-12 * scale);
            }
        }
    }

    #[test]
    fn single_basis_mode_advects_to_double_frequency() {
        // (w.grad)w of a single eigenfunction lives at 0 and 2 eta only.
        let basis = build_basis(2, 2, BasisOrdering::default());
        let lat = Lattice::new(2, 4).unwrap();
        let j = 2; // some |eta| = 1 entry
        let w = basis.field(j, &lat).unwrap();
        let eta = &basis.entry(j).eta;
        let adv = advect(&w, &w, AdvectionMethod::Convolution).unwrap();
        for (idx, xi) in lat.modes().enumerate() {
            let doubled = xi
                .iter()
                .zip(eta.iter())
                .all(|(&x, &e)| x == 2 * e || x == -2 * e);
            let zero = xi.iter().all(|&x| x == 0);
            if doubled || zero {
                continue;
            }
            for comp in 0..2 {
                assert!(adv.coeff(comp, idx).norm() < 1e-14);
            }
        }
        let fast = advect(&w, &w, AdvectionMethod::Pseudospectral).unwrap();
        for comp in 0..2 {
            for idx in 0..lat.mode_count() {
                assert!((fast.coeff(comp, idx) - adv.coeff(comp, idx)).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn bilinearity() {
        let lat_k = 3;
        let a = random_vector_field(2, lat_k, 42, 0.5);
        let b = random_vector_field(2, lat_k, 43, 0.5);
        let c = random_vector_field(2, lat_k, 44, 0.5);
        let alpha = 0.7;
        for m in both_methods() {
            let mut ab = a.clone();
            ab.add_scaled(&b, alpha);
            let lhs = advect(&ab, &c, m).unwrap();
            let r1 = advect(&a, &c, m).unwrap();
            let r2 = advect(&b, &c, m).unwrap();
            let scale = lhs.max_coeff().max(1.0);
            for comp in 0..2 {
                for idx in 0..lhs.lattice().mode_count() {
                    let expect = r1.coeff(comp, idx) + alpha * r2.coeff(comp, idx);
                    assert!((lhs.coeff(comp, idx) - expect).norm() < 1e-12 * scale);
                }
            }
        }
    }

    #[test]
    fn output_stays_real() {
        let v1 = random_vector_field(2, 4, 45, 0.5);
        let v2 = random_vector_field(2, 4, 46, 0.5);
        for m in both_methods() {
            let adv = advect(&v1, &v2, m).unwrap();
            assert!(adv.hermitian_defect() < 1e-13 * adv.max_coeff().max(1.0));
        }
    }
}
