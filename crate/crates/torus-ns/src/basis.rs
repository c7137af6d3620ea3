//! Real orthonormal divergence-free eigenbasis of the Bessel-potential
//! operator on the torus, and the Galerkin projector `P_m`.
//!
//! For every nonzero wavevector `eta` the complex eigenfunctions are the
//! plane waves `w(x) = w0 e^{2 pi i x . eta}` with constant polarization
//! `w0 . eta = 0` and eigenvalue `rho(eta)^r`. Realified over a half
//! lattice they become the pairs
//!
//! ```text
//! sqrt(2) w0 cos(2 pi eta . x),   sqrt(2) w0 sin(2 pi eta . x),
//! ```
//!
//! which are orthonormal in `L_2` and exactly solenoidal. Entries are
//! ordered by eigenvalue `rho(eta)`, ties broken lexicographically on
//! `(eta, beta, parity)`.

use std::cmp::Ordering;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::spectral::{rho, FieldFlags, FourierField, Lattice, SpectralError};

#[derive(Debug, Error)]
pub enum BasisError {
    #[error("eta must be a nonzero wavevector")]
    ZeroWavevector,
    #[error("requested {requested} modes but the basis has {available}")]
    TooManyModes { requested: usize, available: usize },
    #[error("basis cutoff {basis} exceeds the field lattice cutoff {lattice}")]
    CutoffMismatch { basis: usize, lattice: usize },
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Cos,
    Sin,
}

/// One real basis function `sqrt(2) w0 {cos|sin}(2 pi eta . x)`.
#[derive(Debug, Clone, Serialize)]
pub struct BasisEntry {
    pub eta: Vec<i64>,
    pub beta: usize,
    pub parity: Parity,
    /// Unit polarization vector, orthogonal to `eta`.
    pub polarization: Vec<f64>,
    /// Eigenvalue of `Lambda^1`: `rho(eta)`.
    pub lambda: f64,
}

impl BasisEntry {
    /// Eigenvalue of `Lambda^r`.
    pub fn eigenvalue(&self, r: f64) -> f64 {
        self.lambda.powf(r)
    }
}

/// Ordering of the basis entries.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum BasisOrdering {
    /// Non-decreasing eigenvalue, ties broken on `(eta, beta, parity)`.
    #[default]
    EigenvalueThenLex,
}

/// Eigenvalue `rho(eta)^r` of `Lambda^r` at wavevector `eta`.
pub fn eigenvalue(eta: &[i64], r: f64) -> Result<f64, BasisError> {
    if eta.iter().all(|&x| x == 0) {
        return Err(BasisError::ZeroWavevector);
    }
    Ok(rho(eta).powf(r))
}

/// Orthonormal frame of the plane orthogonal to `eta`.
///
/// Gram-Schmidt over the vectors `e_alpha - eta_alpha eta / |eta|^2`,
/// dropping the one that degenerates; each survivor is re-orthogonalized
/// against `eta` so the solenoidal identity holds to denormal level.
pub fn tangent_frame(eta: &[i64]) -> Result<Vec<Vec<f64>>, BasisError> {
    let n = eta.len();
    let norm_sq: i64 = eta.iter().map(|&x| x * x).sum();
    if norm_sq == 0 {
        return Err(BasisError::ZeroWavevector);
    }
    let etaf: Vec<f64> = eta.iter().map(|&x| x as f64).collect();
    let inv = 1.0 / norm_sq as f64;
    let mut frame: Vec<Vec<f64>> = Vec::with_capacity(n - 1);
    for alpha in 0..n {
        let mut v: Vec<f64> = (0..n)
            .map(|j| {
                let e = if j == alpha { 1.0 } else { 0.0 };
                e - etaf[alpha] * etaf[j] * inv
            })
            .collect();
        // Classical Gram-Schmidt, applied twice for orthogonality to
        // round-off against the previously accepted vectors.
        for _ in 0..2 {
            for u in &frame {
                let dot: f64 = v.iter().zip(u.iter()).map(|(a, b)| a * b).sum();
                for (vj, uj) in v.iter_mut().zip(u.iter()) {
                    *vj -= dot * uj;
                }
            }
        }
        let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < 1e-12 {
            continue; // the degenerate direction along eta
        }
        for x in v.iter_mut() {
            *x /= norm;
        }
        // Polish the defining constraint w0 . eta = 0.
        for _ in 0..2 {
            let dot: f64 = v.iter().zip(etaf.iter()).map(|(a, b)| a * b).sum();
            for (vj, ej) in v.iter_mut().zip(etaf.iter()) {
                *vj -= dot * ej * inv;
            }
        }
        frame.push(v);
        if frame.len() == n - 1 {
            break;
        }
    }
    debug_assert_eq!(frame.len(), n - 1);
    Ok(frame)
}

/// Ordered real eigenbasis of `Lambda` in the solenoidal space, truncated to
/// Euclidean wavevector radius `K`.
#[derive(Debug, Clone)]
pub struct GalerkinBasis {
    dimension: usize,
    cutoff: usize,
    entries: Vec<BasisEntry>,
}

fn lex_cmp(a: &[i64], b: &[i64]) -> Ordering {
    for (x, y) in a.iter().zip(b.iter()) {
        match x.cmp(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

/// Build the basis over the half lattice `0 < |eta| <= K` (Euclidean ball).
///
/// The representative of each `{eta, -eta}` pair is the one whose first
/// nonzero component is positive; cos/sin parities of the pair recover the
/// full mode count, so the basis size is `(n-1) #{eta != 0 : |eta| <= K}`.
pub fn build_basis(dimension: usize, cutoff: usize, _ordering: BasisOrdering) -> GalerkinBasis {
    let lattice = Lattice::new(dimension, cutoff).expect("valid basis lattice");
    let mut entries = Vec::new();
    for eta in lattice.modes() {
        let norm_sq: i64 = eta.iter().map(|&x| x * x).sum();
        if norm_sq == 0 || norm_sq > (cutoff * cutoff) as i64 {
            continue;
        }
        match eta.iter().find(|&&x| x != 0) {
            Some(&lead) if lead > 0 => {}
            _ => continue,
        }
        let frame = tangent_frame(&eta).expect("eta is nonzero");
        let lambda = rho(&eta);
        for (beta, w0) in frame.into_iter().enumerate() {
            for parity in [Parity::Cos, Parity::Sin] {
                entries.push(BasisEntry {
                    eta: eta.clone(),
                    beta: beta + 1,
                    parity,
                    polarization: w0.clone(),
                    lambda,
                });
            }
        }
    }
    entries.sort_by(|a, b| {
        a.lambda
            .partial_cmp(&b.lambda)
            .unwrap()
            .then_with(|| lex_cmp(&a.eta, &b.eta))
            .then_with(|| a.beta.cmp(&b.beta))
            .then_with(|| a.parity.cmp(&b.parity))
    });
    GalerkinBasis {
        dimension,
        cutoff,
        entries,
    }
}

impl GalerkinBasis {
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entry(&self, j: usize) -> &BasisEntry {
        &self.entries[j]
    }

    pub fn entries(&self) -> &[BasisEntry] {
        &self.entries
    }

    /// Materialize entry `j` as a Fourier field on the given lattice.
    pub fn field(&self, j: usize, lattice: &Lattice) -> Result<FourierField, BasisError> {
        if lattice.cutoff() < self.cutoff {
            return Err(BasisError::CutoffMismatch {
                basis: self.cutoff,
                lattice: lattice.cutoff(),
            });
        }
        let mut out = FourierField::zeros(lattice.clone(), self.dimension);
        self.add_entry(&mut out, j, 1.0);
        *out.flags_mut() = FieldFlags {
            dotted: true,
            solenoidal: true,
            potential: false,
        };
        Ok(out)
    }

    /// Add `coef * w_j` to a vector field in place.
    pub fn add_entry(&self, field: &mut FourierField, j: usize, coef: f64) {
        let entry = &self.entries[j];
        let lat = field.lattice();
        let idx = lat.index(&entry.eta);
        let mirror = lat.mirror_index(idx);
        let half = coef * std::f64::consts::FRAC_1_SQRT_2;
        // cos: (sqrt2/2) w0 at +-eta;  sin: -+(i sqrt2/2) w0.
        let (plus, minus) = match entry.parity {
            Parity::Cos => (Complex64::new(half, 0.0), Complex64::new(half, 0.0)),
            Parity::Sin => (Complex64::new(0.0, -half), Complex64::new(0.0, half)),
        };
        for (comp, &w) in entry.polarization.iter().enumerate() {
            *field.coeff_mut(comp, idx) += plus * w;
            *field.coeff_mut(comp, mirror) += minus * w;
        }
    }

    /// Dual-product coefficient `<u, w_j>_T` (real for real `u`).
    pub fn coefficient(&self, u: &FourierField, j: usize) -> f64 {
        let entry = &self.entries[j];
        let lat = u.lattice();
        let idx = lat.index(&entry.eta);
        let sqrt2 = std::f64::consts::SQRT_2;
        let mut acc = 0.0;
        for (comp, &w) in entry.polarization.iter().enumerate() {
            let c = u.coeff(comp, idx);
            acc += match entry.parity {
                Parity::Cos => sqrt2 * c.re * w,
                Parity::Sin => -sqrt2 * c.im * w,
            };
        }
        acc
    }

    /// Reconstruct `sum_j coefs[j] w_j` on a lattice of cutoff >= K.
    pub fn synthesize(&self, coefs: &[f64], lattice: &Lattice) -> Result<FourierField, BasisError> {
        if lattice.cutoff() < self.cutoff {
            return Err(BasisError::CutoffMismatch {
                basis: self.cutoff,
                lattice: lattice.cutoff(),
            });
        }
        let mut out = FourierField::zeros(lattice.clone(), self.dimension);
        for (j, &c) in coefs.iter().enumerate() {
            if c != 0.0 {
                self.add_entry(&mut out, j, c);
            }
        }
        *out.flags_mut() = FieldFlags {
            dotted: true,
            solenoidal: true,
            potential: false,
        };
        Ok(out)
    }

    /// JSON dump of the entries for debugging and tests.
    pub fn dump_json(&self) -> serde_json::Value {
        serde_json::to_value(&self.entries).expect("basis entries serialize")
    }
}

/// Galerkin projector `P_m u = sum_{j<=m} <u, w_j>_T w_j`.
pub fn project_pm(
    u: &FourierField,
    basis: &GalerkinBasis,
    m: usize,
) -> Result<FourierField, BasisError> {
    if m > basis.len() {
        return Err(BasisError::TooManyModes {
            requested: m,
            available: basis.len(),
        });
    }
    if u.lattice().cutoff() < basis.cutoff() {
        return Err(BasisError::CutoffMismatch {
            basis: basis.cutoff(),
            lattice: u.lattice().cutoff(),
        });
    }
    let mut out = FourierField::zeros(u.lattice().clone(), basis.dimension());
    for j in 0..m {
        let c = basis.coefficient(u, j);
        basis.add_entry(&mut out, j, c);
    }
    *out.flags_mut() = FieldFlags {
        dotted: true,
        solenoidal: true,
        potential: false,
    };
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::random_solenoidal_field;
    use crate::spectral::{bessel_potential, div, dual_product_real, sobolev_norm};

    #[test]
    fn tangent_frame_axis_cases() {
        let f = tangent_frame(&[1, 0]).unwrap();
        assert_eq!(f.len(), 1);
        assert!((f[0][0]).abs() < 1e-15 && (f[0][1] - 1.0).abs() < 1e-15);

        let f = tangent_frame(&[0, 0, 1]).unwrap();
        assert_eq!(f.len(), 2);
        assert!((f[0][0] - 1.0).abs() < 1e-15);
        assert!((f[1][1] - 1.0).abs() < 1e-15);

        assert!(matches!(
            tangent_frame(&[0, 0]),
            Err(BasisError::ZeroWavevector)
        ));
    }

    #[test]
    fn tangent_frame_orthonormal_on_small_ball() {
        let lat = Lattice::new(3, 4).unwrap();
        for eta in lat.modes() {
            if eta.iter().all(|&x| x == 0) {
                continue;
            }
            let frame = tangent_frame(&eta).unwrap();
            assert_eq!(frame.len(), 2);
            for (i, v) in frame.iter().enumerate() {
                let dot_eta: f64 = v.iter().zip(eta.iter()).map(|(a, &b)| a * b as f64).sum();
                assert!(dot_eta.abs() < 1e-14);
                for (k, u) in frame.iter().enumerate() {
                    let dot: f64 = v.iter().zip(u.iter()).map(|(a, b)| a * b).sum();
                    let expected = if i == k { 1.0 } else { 0.0 };
                    assert!((dot - expected).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn basis_size_n2_k1() {
        // Euclidean ball |eta| <= 1 in Z^2 has 4 nonzero modes; one
        // polarization and two parities give 4 real functions.
        let basis = build_basis(2, 1, BasisOrdering::default());
        assert_eq!(basis.len(), 4);
    }

    #[test]
    fn basis_size_formula() {
        for (n, k) in [(2usize, 3usize), (3, 2)] {
            let basis = build_basis(n, k, BasisOrdering::default());
            let lat = Lattice::new(n, k).unwrap();
            let ball = lat
                .modes()
                .filter(|eta| {
                    let s: i64 = eta.iter().map(|&x| x * x).sum();
                    s != 0 && s <= (k * k) as i64
                })
                .count();
            assert_eq!(basis.len(), (n - 1) * ball);
        }
    }

    #[test]
    fn eigenrelation_under_bessel() {
        let basis = build_basis(3, 2, BasisOrdering::default());
        let lat = Lattice::new(3, 2).unwrap();
        for j in 0..basis.len() {
            let w = basis.field(j, &lat).unwrap();
            let lw = bessel_potential(&w, 1.0);
            let lambda = basis.entry(j).lambda;
            for comp in 0..3 {
                for idx in 0..lat.mode_count() {
                    let diff = (lw.coeff(comp, idx) - lambda * w.coeff(comp, idx)).norm();
                    assert!(diff < 1e-14 * lambda);
                }
            }
        }
    }

    #[test]
    fn entries_are_divergence_free_and_ordered() {
        let basis = build_basis(2, 3, BasisOrdering::default());
        let lat = Lattice::new(2, 3).unwrap();
        let mut last = 0.0;
        for j in 0..basis.len() {
            let w = basis.field(j, &lat).unwrap();
            let d = div(&w).unwrap();
            assert!(sobolev_norm(&d, 0.0) < 1e-13);
            let lambda = basis.entry(j).lambda;
            assert!(lambda >= last);
            last = lambda;
        }
    }

    #[test]
    fn eigenvalue_reciprocity() {
        let mut rng = crate::rng::CounterRng::new(99);
        for _ in 0..20 {
            let eta: Vec<i64> = (0..3).map(|_| rng.next_i64_in(-6, 6)).collect();
            if eta.iter().all(|&x| x == 0) {
                continue;
            }
            let r = 4.0 * rng.next_symmetric();
            let a = eigenvalue(&eta, r).unwrap();
            let b = eigenvalue(&eta, -r).unwrap();
            assert!((a * b - 1.0).abs() < 1e-12);
        }
        assert!(
            (eigenvalue(&[1, 0, 0], 1.0).unwrap() - 2.0 * std::f64::consts::PI * 2.0_f64.sqrt())
                .abs()
                < 1e-14
        );
        assert_eq!(eigenvalue(&[2, -1], 0.0).unwrap(), 1.0);
    }

    #[test]
    fn gram_matrix_is_identity() {
        let basis = build_basis(2, 2, BasisOrdering::default());
        let lat = Lattice::new(2, 2).unwrap();
        let fields: Vec<_> = (0..basis.len())
            .map(|j| basis.field(j, &lat).unwrap())
            .collect();
        for (i, wi) in fields.iter().enumerate() {
            for (k, wk) in fields.iter().enumerate() {
                let g = dual_product_real(wi, wk).unwrap();
                let expected = if i == k { 1.0 } else { 0.0 };
                assert!((g - expected).abs() < 1e-13, "gram[{i}][{k}] = {g}");
            }
        }
    }

    #[test]
    fn projector_reproduces_span_and_contracts() {
        let basis = build_basis(2, 4, BasisOrdering::default());
        let lat = Lattice::new(2, 4).unwrap();
        // A field inside the span of the first m functions is unchanged.
        let m = 6;
        let mut coefs = vec![0.0; basis.len()];
        coefs[0] = 0.3;
        coefs[3] = -1.2;
        coefs[5] = 0.9;
        let u = basis.synthesize(&coefs, &lat).unwrap();
        let pu = project_pm(&u, &basis, m).unwrap();
        for comp in 0..2 {
            for idx in 0..lat.mode_count() {
                assert!((u.coeff(comp, idx) - pu.coeff(comp, idx)).norm() < 1e-14);
            }
        }
        // Ball-supported solenoidal fields are recovered at m = full size.
        let v = random_solenoidal_field(2, 4, 17, 1.0);
        let v = restrict_to_ball(&v, 4);
        let pv = project_pm(&v, &basis, basis.len()).unwrap();
        let scale = sobolev_norm(&v, 0.0);
        for comp in 0..2 {
            for idx in 0..lat.mode_count() {
                assert!((v.coeff(comp, idx) - pv.coeff(comp, idx)).norm() < 1e-13 * (1.0 + scale));
            }
        }
        // Norm never increases, in any H^r.
        let w = random_solenoidal_field(2, 4, 18, 1.0);
        for r in [-1.0, 0.0, 1.0] {
            for m in [1, 5, basis.len() / 2, basis.len()] {
                let pw = project_pm(&w, &basis, m).unwrap();
                assert!(sobolev_norm(&pw, r) <= sobolev_norm(&w, r) * (1.0 + 1e-12));
            }
        }
        // Convergence: the remainder shrinks monotonically in m and dies at
        // full size for ball-supported data.
        let vb = restrict_to_ball(&v, 4);
        for r in [-1.0, 0.0, 1.0] {
            let mut last = f64::INFINITY;
            for m in 1..=basis.len() {
                let mut rem = project_pm(&vb, &basis, m).unwrap();
                rem.add_scaled(&vb, -1.0);
                let res = sobolev_norm(&rem, r);
                assert!(res <= last * (1.0 + 1e-12));
                last = res;
            }
            assert!(last <= 1e-12 * (1.0 + sobolev_norm(&vb, r)));
        }
    }

    #[test]
    fn orthogonality_in_sobolev_scales() {
        // (w_j, w_k)_{H^r} = lambda_j^r lambda_k^r delta_jk.
        let basis = build_basis(2, 2, BasisOrdering::default());
        let lat = Lattice::new(2, 2).unwrap();
        for r in [-1.0, 1.0] {
            for j in 0..basis.len() {
                for k in 0..basis.len() {
                    let wj = basis.field(j, &lat).unwrap();
                    let wk = basis.field(k, &lat).unwrap();
                    let ip = crate::spectral::inner_product(&wj, &wk, r).unwrap();
                    let expected = if j == k {
                        basis.entry(j).eigenvalue(r) * basis.entry(k).eigenvalue(r)
                    } else {
                        0.0
                    };
                    assert!(
                        (ip.re - expected).abs() < 1e-12 * (1.0 + expected.abs()),
                        "H^{r} gram[{j}][{k}]"
                    );
                    assert!(ip.im.abs() < 1e-12);
                }
            }
        }
    }

    fn restrict_to_ball(u: &FourierField, k: usize) -> FourierField {
        let mut out = u.clone();
        for (idx, xi) in u.lattice().modes().enumerate() {
            let s: i64 = xi.iter().map(|&x| x * x).sum();
            if s > (k * k) as i64 {
                for comp in 0..u.components() {
                    *out.coeff_mut(comp, idx) = Complex64::default();
                }
            }
        }
        out
    }
}
