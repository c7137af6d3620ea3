//! Named viscosity tensors and the coefficient-table file format.

use std::sync::Arc;

use num_complex::Complex64;
use serde::Deserialize;

use super::{CoefFn, TensorKind, ViscosityError, ViscosityTensor};
use crate::rng::CounterRng;
use crate::spectral::{FourierField, Lattice};

/// Constant isotropic tensor
/// `a^{alpha beta}_{kj} = lambda d_ka d_jb + mu (d_aj d_bk + d_ab d_kj)`.
pub fn isotropic_const(dimension: usize, lambda: f64, mu: f64) -> ViscosityTensor {
    isotropic(dimension, CoefFn::constant(lambda), CoefFn::constant(mu))
}

/// Isotropic tensor with variable Lame coefficients.
pub fn isotropic(dimension: usize, lambda: CoefFn, mu: CoefFn) -> ViscosityTensor {
    ViscosityTensor::new(dimension, TensorKind::Isotropic { lambda, mu })
}

/// Isotropic `mu(x,t) = mu0 + amplitude sin(2 pi mode x_1) cos(t)`, `lambda = 0`.
///
/// The time factor starts at 1, so certificates sampled with `t = 0` in the
/// time grid see the full spatial oscillation.
pub fn isotropic_variable(
    dimension: usize,
    mu0: f64,
    amplitude: f64,
    mode: i64,
) -> ViscosityTensor {
    let mut wave = vec![0i64; dimension];
    wave[0] = mode;
    isotropic(
        dimension,
        CoefFn::constant(0.0),
        CoefFn::Sine {
            base: mu0,
            amplitude,
            wave,
            phase: 0.0,
            time_cos: true,
        },
    )
}

/// Axis-weighted anisotropic tensor: isotropic part `mu` plus the rank-n
/// diagonal contribution `sum_m d_m(x,t) e_m (x) e_m (x) e_m (x) e_m`, which
/// penalizes normal stresses differently per axis.
pub fn anisotropic_diagonal(
    dimension: usize,
    mu: CoefFn,
    weights: Vec<CoefFn>,
) -> Result<ViscosityTensor, ViscosityError> {
    if weights.len() != dimension {
        return Err(ViscosityError::BadPreset(format!(
            "anisotropic-diagonal wants {dimension} axis weights, got {}",
            weights.len()
        )));
    }
    Ok(ViscosityTensor::new(
        dimension,
        TensorKind::Diagonal { mu, weights },
    ))
}

/// Symmetry group of the tensor indices: both single swaps plus the
/// pair swap, written as permutations of `(k, j, alpha, beta)`.
pub(super) const SYMMETRY_GROUP: [[usize; 4]; 8] = [
    [0, 1, 2, 3], // identity
    [2, 1, 0, 3], // k <-> alpha
    [0, 3, 2, 1], // j <-> beta
    [2, 3, 0, 1], // both swaps
    [1, 0, 3, 2], // pair swap (k,alpha) <-> (j,beta)
    [3, 0, 1, 2],
    [1, 2, 3, 0],
    [3, 2, 1, 0],
];

/// Deterministic smooth anisotropic tensor with all symmetries, built by
/// averaging a random sinusoidal tensor over the symmetry group and adding
/// an isotropic floor `2 mu0 |zeta|^2` that keeps it elliptic.
pub fn random_symmetric(dimension: usize, seed: u64, mu0: f64) -> ViscosityTensor {
    let n = dimension;
    let n4 = n * n * n * n;
    let mut rng = CounterRng::new(seed);
    let amp_scale = mu0 / (2.0 * n4 as f64);
    let mut base = vec![0.0; n4];
    let mut amp = vec![0.0; n4];
    let mut waves: Vec<Vec<i64>> = Vec::with_capacity(n4);
    let mut phases = vec![0.0; n4];
    for e in 0..n4 {
        base[e] = amp_scale * rng.next_symmetric();
        amp[e] = amp_scale * rng.next_symmetric();
        waves.push((0..n).map(|_| rng.next_i64_in(-1, 1)).collect());
        phases[e] = std::f64::consts::PI * rng.next_symmetric();
    }
    let idx = move |k: usize, j: usize, a: usize, b: usize| ((k * n + j) * n + a) * n + b;
    let eval = Arc::new(move |x: &[f64], t: f64, out: &mut [f64]| {
        let env = 1.0 + 0.5 * t.cos();
        let mut raw = vec![0.0; n4];
        for (e, w) in waves.iter().enumerate() {
            let arg: f64 = 2.0
                * std::f64::consts::PI
                * w.iter()
                    .zip(x.iter())
                    .map(|(&wi, &xi)| wi as f64 * xi)
                    .sum::<f64>()
                + phases[e];
            raw[e] = base[e] + amp[e] * arg.sin() * env;
        }
        // Average over the symmetry group, then add the isotropic floor.
        for k in 0..n {
            for j in 0..n {
                for a in 0..n {
                    for b in 0..n {
                        let ix = [k, j, a, b];
                        let mut acc = 0.0;
                        for perm in SYMMETRY_GROUP {
                            acc += raw[idx(ix[perm[0]], ix[perm[1]], ix[perm[2]], ix[perm[3]])];
                        }
                        let mut val = acc / SYMMETRY_GROUP.len() as f64;
                        if a == j && b == k {
                            val += mu0;
                        }
                        if a == b && k == j {
                            val += mu0;
                        }
                        out[idx(k, j, a, b)] = val;
                    }
                }
            }
        }
    });
    ViscosityTensor::new(
        dimension,
        TensorKind::Custom {
            eval,
            degree: Some(1),
            time_dependent: true,
        },
    )
}

#[derive(Debug, Deserialize)]
struct TableFile {
    n: usize,
    degree: usize,
    entries: Vec<TableEntry>,
}

#[derive(Debug, Deserialize)]
struct TableEntry {
    k: usize,
    j: usize,
    alpha: usize,
    beta: usize,
    modes: Vec<TableMode>,
}

#[derive(Debug, Deserialize)]
struct TableMode {
    xi: Vec<i64>,
    re: f64,
    im: f64,
}

/// Load a custom tensor from its JSON coefficient table.
///
/// Every tensor entry is a real scalar field of degree `<= degree`. List
/// one representative of each `+-xi` pair: a listed mode `(xi, c)` with
/// `xi != 0` contributes `2 Re(c e^{2 pi i x . xi})`, and `xi = 0`
/// contributes its real part once. Time-independent.
pub fn table_from_json(text: &str) -> Result<ViscosityTensor, ViscosityError> {
    let table: TableFile =
        serde_json::from_str(text).map_err(|e| ViscosityError::BadPreset(e.to_string()))?;
    let n = table.n;
    if n < 2 {
        return Err(ViscosityError::BadPreset(format!("dimension {n} < 2")));
    }
    let lattice = Lattice::new(n, table.degree.max(1))
        .map_err(|e| ViscosityError::BadPreset(e.to_string()))?;
    let n4 = n * n * n * n;
    let mut fields = vec![FourierField::zeros_scalar(lattice.clone()); n4];
    for entry in &table.entries {
        for ix in [entry.k, entry.j, entry.alpha, entry.beta] {
            if ix < 1 || ix > n {
                return Err(ViscosityError::BadPreset(format!(
                    "tensor index {ix} out of 1..={n}"
                )));
            }
        }
        let e =
            (((entry.k - 1) * n + (entry.j - 1)) * n + (entry.alpha - 1)) * n + (entry.beta - 1);
        for mode in &entry.modes {
            if !lattice.contains(&mode.xi) {
                return Err(ViscosityError::BadPreset(format!(
                    "mode {:?} outside the declared degree {}",
                    mode.xi, table.degree
                )));
            }
            let idx = lattice.index(&mode.xi);
            if mode.xi.iter().all(|&x| x == 0) {
                *fields[e].coeff_mut(0, idx) += Complex64::new(mode.re, 0.0);
            } else {
                let c = Complex64::new(mode.re, mode.im);
                let mirror = lattice.mirror_index(idx);
                *fields[e].coeff_mut(0, idx) += c;
                *fields[e].coeff_mut(0, mirror) += c.conj();
            }
        }
    }
    Ok(ViscosityTensor::new(
        n,
        TensorKind::Table {
            entries: fields,
            degree: table.degree,
        },
    ))
}

/// Parse a preset string as accepted by the CLI `--tensor` flag.
///
/// Grammar: `isotropic(lambda,mu)`, `isotropic-variable(mu0,amp,mode)`,
/// `anisotropic-diagonal(d1,...,dn;mu)`, or `table:<path>`.
pub fn parse_preset(spec: &str, dimension: usize) -> Result<ViscosityTensor, ViscosityError> {
    let spec = spec.trim();
    if let Some(path) = spec.strip_prefix("table:") {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ViscosityError::BadPreset(format!("{path}: {e}")))?;
        let tensor = table_from_json(&text)?;
        if tensor.dimension() != dimension {
            return Err(ViscosityError::BadPreset(format!(
                "table dimension {} does not match n = {dimension}",
                tensor.dimension()
            )));
        }
        return Ok(tensor);
    }
    let (name, args) = match spec.find('(') {
        Some(p) if spec.ends_with(')') => (&spec[..p], &spec[p + 1..spec.len() - 1]),
        _ => (spec, ""),
    };
    let floats = |s: &str| -> Result<Vec<f64>, ViscosityError> {
        if s.trim().is_empty() {
            return Ok(Vec::new());
        }
        s.split(',')
            .map(|x| {
                x.trim()
                    .parse::<f64>()
                    .map_err(|e| ViscosityError::BadPreset(format!("bad number {x:?}: {e}")))
            })
            .collect()
    };
    match name {
        "isotropic" => {
            let v = floats(args)?;
            if v.len() != 2 {
                return Err(ViscosityError::BadPreset(
                    "isotropic wants (lambda, mu)".into(),
                ));
            }
            Ok(isotropic_const(dimension, v[0], v[1]))
        }
        "isotropic-variable" => {
            let v = floats(args)?;
            if v.len() != 3 {
                return Err(ViscosityError::BadPreset(
                    "isotropic-variable wants (mu0, amplitude, mode)".into(),
                ));
            }
            Ok(isotropic_variable(dimension, v[0], v[1], v[2] as i64))
        }
        "anisotropic-diagonal" => {
            let parts: Vec<&str> = args.split(';').collect();
            if parts.len() != 2 {
                return Err(ViscosityError::BadPreset(
                    "anisotropic-diagonal wants (d1,...,dn; mu)".into(),
                ));
            }
            let ds = floats(parts[0])?;
            let mu = floats(parts[1])?;
            if mu.len() != 1 {
                return Err(ViscosityError::BadPreset(
                    "anisotropic-diagonal wants a single mu after ';'".into(),
                ));
            }
            anisotropic_diagonal(
                dimension,
                CoefFn::constant(mu[0]),
                ds.into_iter().map(CoefFn::constant).collect(),
            )
        }
        other => Err(ViscosityError::BadPreset(format!(
            "unknown tensor preset {other:?}"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::viscosity::{ellipticity_constant, SampleSet};

    #[test]
    fn preset_grammar_round_trips() {
        let iso = parse_preset("isotropic(0.5, 2.0)", 2).unwrap();
        assert_eq!(iso.degree(), Some(0));
        let cert = ellipticity_constant(&iso, &SampleSet::grid(2, 3, &[0.0])).unwrap();
        assert!((cert.c_a - 0.25).abs() < 1e-12);

        let varying = parse_preset("isotropic-variable(2.0, 1.0, 1)", 2).unwrap();
        assert_eq!(varying.degree(), Some(1));
        assert!(varying.time_dependent());

        let diag = parse_preset("anisotropic-diagonal(0.4, 0.2; 1.0)", 2).unwrap();
        assert_eq!(diag.degree(), Some(0));
        let mut a = vec![0.0; 16];
        diag.eval_point(&[0.3, 0.9], 0.0, &mut a);
        // Diagonal axis weights sit on the fully repeated indices.
        assert!((a[0] - (2.0 + 0.4)).abs() < 1e-15);
        assert!((a[15] - (2.0 + 0.2)).abs() < 1e-15);
    }

    #[test]
    fn preset_grammar_rejects_malformed_input() {
        assert!(parse_preset("isotropic(1.0)", 2).is_err());
        assert!(parse_preset("isotropic-variable(1,2)", 2).is_err());
        assert!(parse_preset("anisotropic-diagonal(1,2,3; 1.0)", 2).is_err());
        assert!(parse_preset("anisotropic-diagonal(1,2)", 2).is_err());
        assert!(parse_preset("mystery(1)", 2).is_err());
        assert!(parse_preset("isotropic(a, b)", 2).is_err());
        assert!(parse_preset("table:/no/such/file.json", 2).is_err());
    }
}
