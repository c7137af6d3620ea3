//! Anisotropic viscosity tensors `A(x,t) = {a^{alpha beta}_{kj}}` with the
//! symmetry conditions
//!
//! ```text
//! a^{alpha beta}_{kj} = a^{k beta}_{alpha j} = a^{alpha j}_{k beta}
//! ```
//!
//! and the relaxed ellipticity condition: positivity of the quadratic form
//! `a^{alpha beta}_{kj} zeta_{k alpha} zeta_{j beta}` over symmetric
//! trace-free matrices only. The module certifies both properties on sample
//! sets, computes the tensor norm (Frobenius of per-entry sups), applies the
//! divergence-form operator `(L u)_k = d_alpha(a^{alpha beta}_{kj}
//! E_{j beta}(u))`, and evaluates the bilinear form
//! `a_T(u,v) = <a E(u), E(v)>_T` on the same quadrature grid, so that
//! `<-L u, w>_T = a_T(u, w)` holds to round-off by construction.
//!
//! A continuum statement "for a.e. x, t" cannot be certified from finitely
//! many samples; certificates record exactly which sample set they inspected.

mod jacobi;
mod presets;

pub use jacobi::{min_eigenpair, symmetric_eigen};
pub use presets::{
    anisotropic_diagonal, isotropic, isotropic_const, isotropic_variable, parse_preset,
    random_symmetric, table_from_json,
};

use std::sync::Arc;

use num_complex::Complex64;
use thiserror::Error;

use crate::spectral::{
    from_physical, sym_gradient, to_physical, FourierField, GridField, SpectralError,
};
use crate::sum::Accumulator;

#[derive(Debug, Error)]
pub enum ViscosityError {
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error("relaxed ellipticity violated: quadratic form reaches {min_value:.6e} at x = {x:?}, t = {t} along zeta = {zeta:?}")]
    NotElliptic {
        x: Vec<f64>,
        t: f64,
        min_value: f64,
        /// Witness direction: the symmetric trace-free matrix (row-major).
        zeta: Vec<f64>,
    },
    #[error("viscosity preset: {0}")]
    BadPreset(String),
    #[error("tensor dimension {tensor} does not match field dimension {field}")]
    DimensionMismatch { tensor: usize, field: usize },
}

/// Pointwise scalar evaluator `(x, t) -> value`.
pub type ScalarEval = Arc<dyn Fn(&[f64], f64) -> f64 + Send + Sync>;

/// Pointwise tensor evaluator filling the `n^4` entry buffer at `(x, t)`.
pub type TensorEval = Arc<dyn Fn(&[f64], f64, &mut [f64]) + Send + Sync>;

/// Scalar coefficient field of `(x, t)`.
#[derive(Clone)]
pub enum CoefFn {
    Const(f64),
    /// `base + amplitude * sin(2 pi wave . x + phase) * (cos t if time_cos)`.
    Sine {
        base: f64,
        amplitude: f64,
        wave: Vec<i64>,
        phase: f64,
        time_cos: bool,
    },
    Custom(ScalarEval),
}

impl std::fmt::Debug for CoefFn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CoefFn::Const(v) => write!(f, "Const({v})"),
            CoefFn::Sine {
                base,
                amplitude,
                wave,
                phase,
                time_cos,
            } => write!(
                f,
                "Sine(base={base}, amp={amplitude}, wave={wave:?}, phase={phase}, time_cos={time_cos})"
            ),
            CoefFn::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

impl CoefFn {
    pub fn constant(v: f64) -> Self {
        CoefFn::Const(v)
    }

    pub fn eval(&self, x: &[f64], t: f64) -> f64 {
        match self {
            CoefFn::Const(v) => *v,
            CoefFn::Sine {
                base,
                amplitude,
                wave,
                phase,
                time_cos,
            } => {
                let arg: f64 = 2.0
                    * std::f64::consts::PI
                    * wave
                        .iter()
                        .zip(x.iter())
                        .map(|(&w, &xi)| w as f64 * xi)
                        .sum::<f64>()
                    + phase;
                let env = if *time_cos { t.cos() } else { 1.0 };
                base + amplitude * arg.sin() * env
            }
            CoefFn::Custom(f) => f(x, t),
        }
    }

    /// Trigonometric degree in x, when known.
    pub fn degree(&self) -> Option<usize> {
        match self {
            CoefFn::Const(_) => Some(0),
            CoefFn::Sine { wave, .. } => Some(
                wave.iter()
                    .map(|w| w.unsigned_abs() as usize)
                    .max()
                    .unwrap_or(0),
            ),
            CoefFn::Custom(_) => None,
        }
    }

    pub fn time_dependent(&self) -> bool {
        match self {
            CoefFn::Const(_) => false,
            CoefFn::Sine { time_cos, .. } => *time_cos,
            CoefFn::Custom(_) => true,
        }
    }
}

pub enum TensorKind {
    Isotropic {
        lambda: CoefFn,
        mu: CoefFn,
    },
    /// Isotropic part plus per-axis normal-stress weights.
    Diagonal {
        mu: CoefFn,
        weights: Vec<CoefFn>,
    },
    /// Time-independent table of scalar Fourier fields, one per entry.
    Table {
        entries: Vec<FourierField>,
        degree: usize,
    },
    Custom {
        eval: TensorEval,
        degree: Option<usize>,
        time_dependent: bool,
    },
}

/// The viscosity coefficient tensor.
pub struct ViscosityTensor {
    dimension: usize,
    kind: TensorKind,
}

impl ViscosityTensor {
    pub fn new(dimension: usize, kind: TensorKind) -> Self {
        Self { dimension, kind }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Trigonometric degree `K_A` of the coefficients, when declared.
    pub fn degree(&self) -> Option<usize> {
        match &self.kind {
            TensorKind::Isotropic { lambda, mu } => Some(lambda.degree()?.max(mu.degree()?)),
            TensorKind::Diagonal { mu, weights } => {
                let mut d = mu.degree()?;
                for w in weights {
                    d = d.max(w.degree()?);
                }
                Some(d)
            }
            TensorKind::Table { degree, .. } => Some(*degree),
            TensorKind::Custom { degree, .. } => *degree,
        }
    }

    pub fn time_dependent(&self) -> bool {
        match &self.kind {
            TensorKind::Isotropic { lambda, mu } => lambda.time_dependent() || mu.time_dependent(),
            TensorKind::Diagonal { mu, weights } => {
                mu.time_dependent() || weights.iter().any(|w| w.time_dependent())
            }
            TensorKind::Table { .. } => false,
            TensorKind::Custom { time_dependent, .. } => *time_dependent,
        }
    }

    /// Quadrature nodes per axis for fields of cutoff `K`: enough for exact
    /// triple products of the fields and, when the tensor degree is known,
    /// for alias-free application of the tensor itself.
    pub fn quadrature_nodes(&self, cutoff: usize) -> usize {
        let base = 3 * cutoff + 1;
        match self.degree() {
            Some(ka) => base.max(2 * cutoff + ka + 1),
            None => base,
        }
    }

    /// Whether quadratures against cutoff-K fields are exact.
    pub fn quadrature_exact(&self) -> bool {
        self.degree().is_some()
    }

    /// Evaluate the full tensor at one point (row-major `[k][j][alpha][beta]`).
    pub fn eval_point(&self, x: &[f64], t: f64, out: &mut [f64]) {
        let n = self.dimension;
        debug_assert_eq!(out.len(), n * n * n * n);
        match &self.kind {
            TensorKind::Isotropic { lambda, mu } => {
                fill_isotropic(n, lambda.eval(x, t), mu.eval(x, t), out);
            }
            TensorKind::Diagonal { mu, weights } => {
                fill_isotropic(n, 0.0, mu.eval(x, t), out);
                for (m, w) in weights.iter().enumerate() {
                    out[(((m * n) + m) * n + m) * n + m] += w.eval(x, t);
                }
            }
            TensorKind::Table { entries, .. } => {
                for (e, field) in entries.iter().enumerate() {
                    out[e] = eval_scalar_field(field, x);
                }
            }
            TensorKind::Custom { eval, .. } => eval(x, t, out),
        }
    }

    /// Evaluate on the uniform grid; node-major layout `[node][entry]`.
    pub fn eval_grid(&self, nodes: usize, t: f64) -> Vec<f64> {
        let n = self.dimension;
        let n4 = n * n * n * n;
        let count = nodes.pow(n as u32);
        let mut out = vec![0.0; count * n4];
        match &self.kind {
            TensorKind::Table { entries, .. } => {
                // One transform per entry beats pointwise series summation.
                for (e, field) in entries.iter().enumerate() {
                    let grid = to_physical(field, nodes).expect("table grid is large enough");
                    for node in 0..count {
                        out[node * n4 + e] = grid.value(0, node);
                    }
                }
            }
            _ => {
                let mut x = vec![0.0; n];
                for node in 0..count {
                    node_coords(node, n, nodes, &mut x);
                    self.eval_point(&x, t, &mut out[node * n4..(node + 1) * n4]);
                }
            }
        }
        out
    }
}

impl std::fmt::Debug for ViscosityTensor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let kind = match &self.kind {
            TensorKind::Isotropic { .. } => "isotropic",
            TensorKind::Diagonal { .. } => "anisotropic-diagonal",
            TensorKind::Table { .. } => "table",
            TensorKind::Custom { .. } => "custom",
        };
        write!(
            f,
            "ViscosityTensor(n = {}, kind = {kind}, degree = {:?})",
            self.dimension,
            self.degree()
        )
    }
}

fn fill_isotropic(n: usize, lambda: f64, mu: f64, out: &mut [f64]) {
    out.fill(0.0);
    for k in 0..n {
        for j in 0..n {
            for a in 0..n {
                for b in 0..n {
                    let mut v = 0.0;
                    if k == a && j == b {
                        v += lambda;
                    }
                    if a == j && b == k {
                        v += mu;
                    }
                    if a == b && k == j {
                        v += mu;
                    }
                    out[((k * n + j) * n + a) * n + b] = v;
                }
            }
        }
    }
}

fn eval_scalar_field(field: &FourierField, x: &[f64]) -> f64 {
    let mut acc = Complex64::default();
    for (idx, xi) in field.lattice().modes().enumerate() {
        let arg: f64 = 2.0
            * std::f64::consts::PI
            * xi.iter()
                .zip(x.iter())
                .map(|(&k, &xx)| k as f64 * xx)
                .sum::<f64>();
        acc += field.coeff(0, idx) * Complex64::new(arg.cos(), arg.sin());
    }
    acc.re
}

fn node_coords(mut node: usize, dimension: usize, nodes: usize, x: &mut [f64]) {
    for d in (0..dimension).rev() {
        x[d] = (node % nodes) as f64 / nodes as f64;
        node /= nodes;
    }
}

/// Sample set for certificates: a point grid crossed with a time grid.
#[derive(Debug, Clone)]
pub struct SampleSet {
    pub points: Vec<Vec<f64>>,
    pub times: Vec<f64>,
    pub description: String,
}

impl SampleSet {
    /// Uniform `nodes^n` spatial grid times the given instants.
    pub fn grid(dimension: usize, nodes: usize, times: &[f64]) -> Self {
        let count = nodes.pow(dimension as u32);
        let mut points = Vec::with_capacity(count);
        let mut x = vec![0.0; dimension];
        for node in 0..count {
            node_coords(node, dimension, nodes, &mut x);
            points.push(x.clone());
        }
        Self {
            points,
            times: times.to_vec(),
            description: format!("{nodes}^{dimension} grid x {} times", times.len()),
        }
    }

    pub fn len(&self) -> usize {
        self.points.len() * self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Symmetry-scan report: worst deviations from the two symmetry relations.
#[derive(Debug, Clone, serde::Serialize)]
pub struct SymmetryReport {
    /// max |a^{ab}_{kj} - a^{kb}_{aj}|
    pub first_swap: f64,
    /// max |a^{ab}_{kj} - a^{aj}_{kb}|
    pub second_swap: f64,
    pub passed: bool,
}

/// Scan the symmetry conditions over a sample set.
pub fn check_symmetry(tensor: &ViscosityTensor, samples: &SampleSet) -> SymmetryReport {
    let n = tensor.dimension();
    let n4 = n * n * n * n;
    let mut a = vec![0.0; n4];
    let idx = |k: usize, j: usize, al: usize, b: usize| ((k * n + j) * n + al) * n + b;
    let mut d1 = 0.0f64;
    let mut d2 = 0.0f64;
    for t in &samples.times {
        for x in &samples.points {
            tensor.eval_point(x, *t, &mut a);
            for k in 0..n {
                for j in 0..n {
                    for al in 0..n {
                        for b in 0..n {
                            let v = a[idx(k, j, al, b)];
                            d1 = d1.max((v - a[idx(al, j, k, b)]).abs());
                            d2 = d2.max((v - a[idx(k, b, al, j)]).abs());
                        }
                    }
                }
            }
        }
    }
    SymmetryReport {
        first_swap: d1,
        second_swap: d2,
        passed: d1 < 1e-12 && d2 < 1e-12,
    }
}

/// Ellipticity certificate: `C_A = 1 / mu_min` where `mu_min` is the least
/// eigenvalue of the quadratic form on symmetric trace-free matrices over
/// the samples, together with the tensor norm.
#[derive(Debug, Clone, serde::Serialize)]
pub struct EllipticityCertificate {
    pub c_a: f64,
    pub tensor_norm: f64,
    /// Least quadratic-form eigenvalue found.
    pub mu_min: f64,
    pub samples: String,
    pub quadrature_exact: bool,
}

/// Orthonormal basis (Frobenius) of symmetric trace-free `n x n` matrices.
pub fn sym_traceless_basis(n: usize) -> Vec<Vec<f64>> {
    let mut basis = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let mut m = vec![0.0; n * n];
            let v = std::f64::consts::FRAC_1_SQRT_2;
            m[i * n + j] = v;
            m[j * n + i] = v;
            basis.push(m);
        }
    }
    for k in 1..n {
        let mut m = vec![0.0; n * n];
        let norm = (k as f64 * (k as f64 + 1.0)).sqrt();
        for d in 0..k {
            m[d * n + d] = 1.0 / norm;
        }
        m[k * n + k] = -(k as f64) / norm;
        basis.push(m);
    }
    debug_assert_eq!(basis.len(), n * (n + 1) / 2 - 1);
    basis
}

/// Compute the ellipticity certificate, or fail with a witness point.
pub fn ellipticity_constant(
    tensor: &ViscosityTensor,
    samples: &SampleSet,
) -> Result<EllipticityCertificate, ViscosityError> {
    let n = tensor.dimension();
    let n4 = n * n * n * n;
    let basis = sym_traceless_basis(n);
    let dim = basis.len();
    let mut a = vec![0.0; n4];
    let mut q = vec![0.0; dim * dim];
    let mut mu_min = f64::INFINITY;
    let mut witness: Option<(Vec<f64>, f64, Vec<f64>)> = None;
    for t in &samples.times {
        for x in &samples.points {
            tensor.eval_point(x, *t, &mut a);
            for (p, bp) in basis.iter().enumerate() {
                for (r, br) in basis.iter().enumerate().skip(p) {
                    let mut acc = 0.0;
                    for k in 0..n {
                        for j in 0..n {
                            for al in 0..n {
                                for b in 0..n {
                                    acc += a[((k * n + j) * n + al) * n + b]
                                        * bp[k * n + al]
                                        * br[j * n + b];
                                }
                            }
                        }
                    }
                    q[p * dim + r] = acc;
                    q[r * dim + p] = acc;
                }
            }
            let (min_val, evec) = min_eigenpair(&q, dim);
            if min_val < mu_min {
                mu_min = min_val;
                let mut zeta = vec![0.0; n * n];
                for (c, b) in evec.iter().zip(basis.iter()) {
                    for (z, bb) in zeta.iter_mut().zip(b.iter()) {
                        *z += c * bb;
                    }
                }
                witness = Some((x.clone(), *t, zeta));
            }
        }
    }
    if mu_min <= 0.0 {
        let (x, t, zeta) = witness.expect("non-empty sample set");
        return Err(ViscosityError::NotElliptic {
            x,
            t,
            min_value: mu_min,
            zeta,
        });
    }
    Ok(EllipticityCertificate {
        c_a: 1.0 / mu_min,
        tensor_norm: tensor_norm(tensor, samples),
        mu_min,
        samples: samples.description.clone(),
        quadrature_exact: tensor.quadrature_exact(),
    })
}

/// Tensor norm: Frobenius norm over entries of the per-entry sup of |a|.
pub fn tensor_norm(tensor: &ViscosityTensor, samples: &SampleSet) -> f64 {
    let n = tensor.dimension();
    let n4 = n * n * n * n;
    let mut a = vec![0.0; n4];
    let mut sup = vec![0.0f64; n4];
    for t in &samples.times {
        for x in &samples.points {
            tensor.eval_point(x, *t, &mut a);
            for (s, v) in sup.iter_mut().zip(a.iter()) {
                *s = s.max(v.abs());
            }
        }
    }
    sup.iter().map(|s| s * s).sum::<f64>().sqrt()
}

/// Divergence-form operator `(L u)_k = d_alpha ( a^{alpha beta}_{kj} E_{j beta}(u) )`.
///
/// Spectral symmetric gradient, pointwise contraction on the quadrature
/// grid, spectral divergence; exact for declared tensor degrees.
pub fn apply_l(
    tensor: &ViscosityTensor,
    u: &FourierField,
    t: f64,
) -> Result<FourierField, ViscosityError> {
    let n = u.lattice().dimension();
    if tensor.dimension() != n {
        return Err(ViscosityError::DimensionMismatch {
            tensor: tensor.dimension(),
            field: n,
        });
    }
    let k = u.lattice().cutoff();
    let nodes = tensor.quadrature_nodes(k);
    let e = sym_gradient(u)?;
    let e_grid = to_physical(&e, nodes)?;
    let a_grid = tensor.eval_grid(nodes, t);
    let n4 = n * n * n * n;
    let count = e_grid.node_count();
    let mut sigma = GridField::zeros(n, nodes, n * n);
    for node in 0..count {
        let a = &a_grid[node * n4..(node + 1) * n4];
        for kk in 0..n {
            for al in 0..n {
                let mut acc = 0.0;
                for j in 0..n {
                    for b in 0..n {
                        acc += a[((kk * n + j) * n + al) * n + b] * e_grid.value(j * n + b, node);
                    }
                }
                *sigma.value_mut(kk * n + al, node) = acc;
            }
        }
    }
    let sigma_hat = from_physical(&sigma, k)?;
    let mut out = FourierField::zeros_vector(u.lattice().clone());
    let two_pi = 2.0 * std::f64::consts::PI;
    for (idx, xi) in u.lattice().modes().enumerate() {
        for kk in 0..n {
            let mut acc = Complex64::default();
            for al in 0..n {
                acc +=
                    Complex64::new(0.0, two_pi * xi[al] as f64) * sigma_hat.coeff(kk * n + al, idx);
            }
            *out.coeff_mut(kk, idx) = acc;
        }
    }
    out.flags_mut().dotted = true;
    Ok(out)
}

/// Bilinear form `a_T(t; u, v) = <a^{alpha beta}_{ij} E_{j beta}(u), E_{i alpha}(v)>_T`
/// by quadrature on the same grid as [`apply_l`].
pub fn bilinear_form(
    tensor: &ViscosityTensor,
    u: &FourierField,
    v: &FourierField,
    t: f64,
) -> Result<f64, ViscosityError> {
    let n = u.lattice().dimension();
    if tensor.dimension() != n {
        return Err(ViscosityError::DimensionMismatch {
            tensor: tensor.dimension(),
            field: n,
        });
    }
    u.same_shape(v).map_err(ViscosityError::Spectral)?;
    let k = u.lattice().cutoff();
    let nodes = tensor.quadrature_nodes(k);
    let eu = to_physical(&sym_gradient(u)?, nodes)?;
    let ev = to_physical(&sym_gradient(v)?, nodes)?;
    let a_grid = tensor.eval_grid(nodes, t);
    let n4 = n * n * n * n;
    let count = eu.node_count();
    let mut acc = Accumulator::new();
    for node in 0..count {
        let a = &a_grid[node * n4..(node + 1) * n4];
        let mut point = 0.0;
        for i in 0..n {
            for j in 0..n {
                for al in 0..n {
                    for b in 0..n {
                        point += a[((i * n + j) * n + al) * n + b]
                            * eu.value(j * n + b, node)
                            * ev.value(i * n + al, node);
                    }
                }
            }
        }
        acc.add(point);
    }
    Ok(acc.value() / count as f64)
}

/// Both sides of the first Korn inequality, `(||grad v||^2, 2 ||E(v)||^2)`,
/// computed by Parseval.
pub fn korn_check(v: &FourierField) -> Result<(f64, f64), SpectralError> {
    let n = v.lattice().dimension();
    if v.components() != n {
        return Err(SpectralError::BadArity {
            expected: n,
            got: v.components(),
        });
    }
    let two_pi_sq = (2.0 * std::f64::consts::PI).powi(2);
    let mut grad_acc = Accumulator::new();
    for (idx, xi) in v.lattice().modes().enumerate() {
        let norm_sq: i64 = xi.iter().map(|&x| x * x).sum();
        for comp in 0..n {
            grad_acc.add(two_pi_sq * norm_sq as f64 * v.coeff(comp, idx).norm_sqr());
        }
    }
    let e = sym_gradient(v)?;
    let mut e_acc = Accumulator::new();
    for idx in 0..v.lattice().mode_count() {
        for comp in 0..n * n {
            e_acc.add(e.coeff(comp, idx).norm_sqr());
        }
    }
    Ok((grad_acc.value(), 2.0 * e_acc.value()))
}
