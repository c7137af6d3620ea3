//! Shipped run scenarios and their analytic oracles.
//!
//! * `zero`: no forcing, zero data; everything stays identically zero.
//! * `taylor-green`: the 2-D vortex `u0 = (sin 2pi x cos 2pi y,
//!   -cos 2pi x sin 2pi y)` under constant isotropic viscosity `nu`. The
//!   nonlinear term is a pure gradient, so the velocity decays mode-wise:
//!   `u(t) = e^{-8 pi^2 nu t} u0`, kinetic energy `||u0||^2 e^{-16 pi^2 nu t}`,
//!   pressure `p = 1/4 e^{-16 pi^2 nu t} (cos 4 pi x + cos 4 pi y)`.
//! * `manufactured`: a two-mode solenoidal `u*(t)` driven by the forcing
//!   `f = d_t u* + (u* . grad) u* - L u*` under a time-dependent anisotropic
//!   tensor; the Galerkin trajectory must follow `u*` to stepper accuracy
//!   and the associated pressure is zero.
//! * `anisotropic`: random smooth solenoidal data under the variable
//!   axis-weighted tensor with a static low-mode solenoidal forcing.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::{build_basis, BasisOrdering, GalerkinBasis};
use crate::galerkin::{Forcing, GalerkinError, Problem, StepControl, Stepper};
use crate::helmholtz::project_sigma;
use crate::rng::random_solenoidal_field;
use crate::spectral::{FieldFlags, FourierField, Lattice};
use crate::viscosity::{
    anisotropic_diagonal, ellipticity_constant, isotropic_const, parse_preset, CoefFn, SampleSet,
    ViscosityError, ViscosityTensor,
};

/// Keys of the run configuration file; every CLI flag overrides one key.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub scenario: String,
    pub n: usize,
    #[serde(rename = "K")]
    pub cutoff: usize,
    /// Galerkin modes; defaults to the full basis at cutoff K.
    pub m: Option<usize>,
    #[serde(rename = "T")]
    pub t_end: f64,
    pub dt: Option<f64>,
    pub stepper: Stepper,
    pub nu: f64,
    /// Tensor preset overriding the scenario default.
    pub tensor: Option<String>,
    pub seed: u64,
    pub diagnostics_every: usize,
    /// Write a checkpoint every this many diagnostics samples (0 = only
    /// the first and last).
    pub checkpoint_every: usize,
    /// Adaptive RK4 tolerance; unset means fixed steps.
    pub adaptive_tol: Option<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            scenario: "taylor-green".into(),
            n: 2,
            cutoff: 8,
            m: None,
            t_end: 0.1,
            dt: None,
            stepper: Stepper::Rk4,
            nu: 1.0,
            tensor: None,
            seed: 0,
            diagnostics_every: 1,
            checkpoint_every: 10,
            adaptive_tol: None,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("unknown scenario {0:?} (expected zero | taylor-green | manufactured | anisotropic)")]
    Unknown(String),
    #[error("scenario {scenario} requires n = {expected}, got {got}")]
    WrongDimension {
        scenario: &'static str,
        expected: usize,
        got: usize,
    },
    #[error(transparent)]
    Viscosity(#[from] ViscosityError),
    #[error(transparent)]
    Galerkin(#[from] GalerkinError),
    #[error("config: {0}")]
    BadConfig(String),
}

pub const SHIPPED_SCENARIOS: [&str; 4] = ["zero", "taylor-green", "manufactured", "anisotropic"];

/// Certificate sample set: the tensor's own quadrature grid crossed with a
/// small time grid (five instants for time-dependent tensors).
pub fn certificate_samples(tensor: &ViscosityTensor, cutoff: usize, t_end: f64) -> SampleSet {
    let nodes = tensor.quadrature_nodes(cutoff);
    let times: Vec<f64> = if tensor.time_dependent() {
        (0..5).map(|i| t_end * i as f64 / 4.0).collect()
    } else {
        vec![0.0]
    };
    SampleSet::grid(tensor.dimension(), nodes, &times)
}

/// Resolve a configuration into a ready-to-integrate problem.
pub fn build_problem(config: &RunConfig) -> Result<Problem, ScenarioError> {
    let n = config.n;
    let k = config.cutoff;
    let lattice = Lattice::new(n, k).map_err(|e| ScenarioError::BadConfig(e.to_string()))?;
    let basis = Arc::new(build_basis(n, k, BasisOrdering::default()));
    let m = config.m.unwrap_or(basis.len());
    if m > basis.len() {
        return Err(ScenarioError::BadConfig(format!(
            "m = {m} exceeds the basis size {}",
            basis.len()
        )));
    }

    let (tensor, initial, forcing): (ViscosityTensor, FourierField, Forcing) =
        match config.scenario.as_str() {
            "zero" => (
                isotropic_const(n, 0.0, config.nu),
                FourierField::zeros_vector(lattice.clone()),
                Forcing::Zero,
            ),
            "taylor-green" => {
                if n != 2 {
                    return Err(ScenarioError::WrongDimension {
                        scenario: "taylor-green",
                        expected: 2,
                        got: n,
                    });
                }
                let tg = TaylorGreen { nu: config.nu };
                (
                    isotropic_const(2, 0.0, config.nu),
                    tg.velocity(0.0, &lattice),
                    Forcing::Zero,
                )
            }
            "manufactured" => {
                let mfg = Manufactured::new(n, k, config.nu);
                let tensor = mfg.tensor()?;
                let initial = mfg.state(0.0, &lattice);
                let forcing = mfg.forcing(&lattice)?;
                (tensor, initial, forcing)
            }
            "anisotropic" => {
                let weights: Vec<CoefFn> = (0..n)
                    .map(|axis| {
                        let mut wave = vec![0i64; n];
                        wave[axis] = 1;
                        CoefFn::Sine {
                            base: 0.6,
                            amplitude: 0.3,
                            wave,
                            phase: 0.0,
                            time_cos: true,
                        }
                    })
                    .collect();
                let tensor = anisotropic_diagonal(n, CoefFn::constant(config.nu), weights)?;
                let initial = random_solenoidal_field(n, k, config.seed, 6.0);
                // Static low-mode solenoidal forcing.
                let mut f = FourierField::zeros_vector(lattice.clone());
                let mut eta = vec![0i64; n];
                eta[0] = 1;
                let mut pol = vec![0.0; n];
                pol[1] = 0.35;
                for (comp, &p) in pol.iter().enumerate() {
                    if p != 0.0 {
                        f.set_pair(comp, &eta, Complex64::new(0.0, -0.5 * p));
                    }
                }
                *f.flags_mut() = FieldFlags {
                    dotted: true,
                    solenoidal: true,
                    potential: false,
                };
                (tensor, initial, Forcing::Static(f))
            }
            other => return Err(ScenarioError::Unknown(other.into())),
        };

    let tensor = match &config.tensor {
        Some(spec) => parse_preset(spec, n)?,
        None => tensor,
    };

    let samples = certificate_samples(&tensor, k, config.t_end);
    let certificate = ellipticity_constant(&tensor, &samples)?;

    let dt = config.dt.unwrap_or_else(|| {
        (config.t_end / 100.0).min(crate::galerkin::stability_dt_bound(&certificate, k))
    });
    let step = match config.adaptive_tol {
        Some(tol) => StepControl::Adaptive { tol, dt_init: dt },
        None => StepControl::Fixed(dt),
    };

    Ok(Problem {
        basis,
        lattice,
        tensor,
        certificate,
        forcing,
        initial,
        mode_count: m,
        t_end: config.t_end,
        stepper: config.stepper,
        step,
        diagnostics_every: config.diagnostics_every,
    })
}

/// The decaying Taylor-Green vortex (n = 2).
pub struct TaylorGreen {
    pub nu: f64,
}

impl TaylorGreen {
    /// Mode-wise decay factor of the velocity.
    pub fn amplitude(&self, t: f64) -> f64 {
        (-8.0 * std::f64::consts::PI.powi(2) * self.nu * t).exp()
    }

    /// Kinetic energy `||u(t)||_{L2}^2 = 1/2 e^{-16 pi^2 nu t}`.
    pub fn energy(&self, t: f64) -> f64 {
        0.5 * (-16.0 * std::f64::consts::PI.powi(2) * self.nu * t).exp()
    }

    /// Exact velocity field at time `t`.
    pub fn velocity(&self, t: f64, lattice: &Lattice) -> FourierField {
        let a = self.amplitude(t);
        let mut u = FourierField::zeros_vector(lattice.clone());
        let quarter = 0.25 * a;
        // u1 = sin(2 pi x) cos(2 pi y): -i/4 at (1,1) and (1,-1).
        u.set_pair(0, &[1, 1], Complex64::new(0.0, -quarter));
        u.set_pair(0, &[1, -1], Complex64::new(0.0, -quarter));
        // u2 = -cos(2 pi x) sin(2 pi y): +i/4 at (1,1), -i/4 at (1,-1).
        u.set_pair(1, &[1, 1], Complex64::new(0.0, quarter));
        u.set_pair(1, &[1, -1], Complex64::new(0.0, -quarter));
        *u.flags_mut() = FieldFlags {
            dotted: true,
            solenoidal: true,
            potential: false,
        };
        u
    }

    /// Associated zero-mean pressure
    /// `p(t) = 1/4 a(t)^2 (cos 4 pi x + cos 4 pi y)`.
    pub fn pressure(&self, t: f64, lattice: &Lattice) -> FourierField {
        let a2 = self.amplitude(t).powi(2);
        let mut p = FourierField::zeros_scalar(lattice.clone());
        p.set_pair(0, &[2, 0], Complex64::new(a2 / 8.0, 0.0));
        p.set_pair(0, &[0, 2], Complex64::new(a2 / 8.0, 0.0));
        p.flags_mut().dotted = true;
        p
    }
}

/// Manufactured two-mode solution `u*(t) = g_a(t) w_a + g_b(t) w_b`.
pub struct Manufactured {
    pub dimension: usize,
    pub cutoff: usize,
    pub nu: f64,
    basis: GalerkinBasis,
    mode_a: usize,
    mode_b: usize,
}

impl Manufactured {
    pub fn new(dimension: usize, cutoff: usize, nu: f64) -> Self {
        let basis = build_basis(dimension, cutoff, BasisOrdering::default());
        Self {
            dimension,
            cutoff,
            nu,
            mode_a: 0,
            mode_b: 3,
            basis,
        }
    }

    fn g_a(&self, t: f64) -> (f64, f64) {
        (0.8 * (1.3 * t).cos(), -0.8 * 1.3 * (1.3 * t).sin())
    }

    fn g_b(&self, t: f64) -> (f64, f64) {
        (0.5 + 0.6 * (1.7 * t).sin(), 0.6 * 1.7 * (1.7 * t).cos())
    }

    /// Time-dependent axis-weighted tensor (exercises the matrix-free path).
    pub fn tensor(&self) -> Result<ViscosityTensor, ViscosityError> {
        let n = self.dimension;
        let weights: Vec<CoefFn> = (0..n)
            .map(|axis| {
                let mut wave = vec![0i64; n];
                wave[axis] = 1;
                CoefFn::Sine {
                    base: 0.6,
                    amplitude: 0.3,
                    wave,
                    phase: 0.0,
                    time_cos: true,
                }
            })
            .collect();
        anisotropic_diagonal(n, CoefFn::constant(self.nu), weights)
    }

    /// Exact Galerkin coefficients of `u*(t)`.
    pub fn exact_coefficients(&self, t: f64, m: usize) -> Vec<f64> {
        let mut eta = vec![0.0; m];
        eta[self.mode_a] = self.g_a(t).0;
        eta[self.mode_b] = self.g_b(t).0;
        eta
    }

    /// Exact state field.
    pub fn state(&self, t: f64, lattice: &Lattice) -> FourierField {
        let mut u = FourierField::zeros_vector(lattice.clone());
        self.basis.add_entry(&mut u, self.mode_a, self.g_a(t).0);
        self.basis.add_entry(&mut u, self.mode_b, self.g_b(t).0);
        *u.flags_mut() = FieldFlags {
            dotted: true,
            solenoidal: true,
            potential: false,
        };
        u
    }

    fn state_derivative(&self, t: f64, lattice: &Lattice) -> FourierField {
        let mut du = FourierField::zeros_vector(lattice.clone());
        self.basis.add_entry(&mut du, self.mode_a, self.g_a(t).1);
        self.basis.add_entry(&mut du, self.mode_b, self.g_b(t).1);
        *du.flags_mut() = FieldFlags {
            dotted: true,
            solenoidal: true,
            potential: false,
        };
        du
    }

    /// Forcing `f(t) = d_t u* + (u* . grad) u* - L u*`, built spectrally.
    pub fn forcing(&self, lattice: &Lattice) -> Result<Forcing, ViscosityError> {
        let tensor = self.tensor()?;
        let mfg = Manufactured {
            dimension: self.dimension,
            cutoff: self.cutoff,
            nu: self.nu,
            basis: build_basis(self.dimension, self.cutoff, BasisOrdering::default()),
            mode_a: self.mode_a,
            mode_b: self.mode_b,
        };
        let lattice = lattice.clone();
        Ok(Forcing::TimeVarying(Arc::new(move |t| {
            let u = mfg.state(t, &lattice);
            let mut f = mfg.state_derivative(t, &lattice);
            let adv =
                crate::advection::advect(&u, &u, crate::advection::AdvectionMethod::Pseudospectral)
                    .expect("manufactured advection");
            f.add_scaled(&adv, 1.0);
            let lu = crate::viscosity::apply_l(&tensor, &u, t).expect("manufactured L u");
            f.add_scaled(&lu, -1.0);
            let mut f = f.into_dotted();
            f.flags_mut().solenoidal = false;
            f.flags_mut().potential = false;
            f
        })))
    }
}

/// Smooth seeded solenoidal data for refinement studies: a fixed field at
/// the reference cutoff, truncated to the requested resolution.
pub fn smooth_reference_data(
    dimension: usize,
    reference_cutoff: usize,
    cutoff: usize,
    seed: u64,
) -> FourierField {
    let full = random_solenoidal_field(dimension, reference_cutoff, seed, 6.0);
    let target = Lattice::new(dimension, cutoff).expect("valid lattice");
    let truncated = full.truncate(&target).expect("cutoff <= reference");
    project_sigma(&truncated).expect("truncation preserves dottedness")
}
