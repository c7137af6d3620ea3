//! Faedo-Galerkin discretization of the anisotropic Navier-Stokes system.
//!
//! With `{w_l}` the real solenoidal eigenbasis, the ansatz
//! `u_m(x,t) = sum_l eta_l(t) w_l(x)` turns the weak momentum equation into
//! the ODE system (orthonormality collapses the mass matrix)
//!
//! ```text
//! eta_k' = <f, w_k>_T - a_T(t; u_m, w_k) - <(u_m . grad) u_m, w_k>_T .
//! ```
//!
//! The viscous term is applied either through a cached stiffness matrix
//! (time-independent tensors of moderate size) or matrix-free through
//! `L u_m` per stage; the nonlinear term is always assembled by dealiased
//! advection plus per-mode dual products, never by the `O(m^3)` coupling
//! tensor.

mod ledger;
mod pressure;

pub use ledger::{EnergyLedger, InequalityReport};
pub use pressure::{recover_pressure, weak_residual};

use std::sync::Arc;

use thiserror::Error;

use crate::advection::{advect, AdvectionMethod};
use crate::basis::{BasisError, GalerkinBasis};
use crate::helmholtz::HelmholtzError;
use crate::spectral::{sobolev_norm, FourierField, Lattice, SpectralError};
use crate::viscosity::{
    apply_l, bilinear_form, EllipticityCertificate, ViscosityError, ViscosityTensor,
};

#[derive(Debug, Error)]
pub enum GalerkinError {
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Helmholtz(#[from] HelmholtzError),
    #[error(transparent)]
    Viscosity(#[from] ViscosityError),
    #[error(transparent)]
    Basis(#[from] BasisError),
    #[error("initial data is not solenoidal; apply the Leray projector explicitly first")]
    NonSolenoidalInitial,
    #[error("blow-up guard: ||u_m|| = {norm:.3e} exceeded {limit:.3e} at t = {t:.6}; the a-priori bound is unconditional, so this is a bug or an unstable step size")]
    BlowUp { t: f64, norm: f64, limit: f64 },
    #[error("non-finite state at t = {t:.6}")]
    NanDetected { t: f64 },
    #[error("configuration: {0}")]
    BadConfig(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stepper {
    #[default]
    Rk4,
    /// First-order IMEX: the diagonal of the viscous term, frozen at t = 0,
    /// is treated implicitly; everything else explicitly.
    Imex,
}

/// Time-step control: fixed, or adaptive RK4 by step doubling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepControl {
    Fixed(f64),
    Adaptive { tol: f64, dt_init: f64 },
}

/// Time-dependent field generator.
pub type FieldEval = Arc<dyn Fn(f64) -> FourierField + Send + Sync>;

/// Forcing term `f(x, t)`.
#[derive(Clone)]
pub enum Forcing {
    Zero,
    Static(FourierField),
    TimeVarying(FieldEval),
}

impl Forcing {
    pub fn field(&self, t: f64) -> Option<FourierField> {
        match self {
            Forcing::Zero => None,
            Forcing::Static(f) => Some(f.clone()),
            Forcing::TimeVarying(f) => Some(f(t)),
        }
    }

    fn coefficients(&self, basis: &GalerkinBasis, m: usize, t: f64) -> Vec<f64> {
        match self {
            Forcing::Zero => vec![0.0; m],
            Forcing::Static(f) => (0..m).map(|k| basis.coefficient(f, k)).collect(),
            Forcing::TimeVarying(gen) => {
                let f = gen(t);
                (0..m).map(|k| basis.coefficient(&f, k)).collect()
            }
        }
    }

    fn h_neg1_sq(&self, t: f64) -> f64 {
        match self.field(t) {
            None => 0.0,
            Some(f) => sobolev_norm(&f, -1.0).powi(2),
        }
    }

    /// `||f||^2_{L2(0,T;H^-1)}` by trapezoid on the step grid.
    pub fn h_neg1_sq_integral(&self, t_end: f64, dt: f64) -> f64 {
        match self {
            Forcing::Zero => 0.0,
            Forcing::Static(f) => t_end * sobolev_norm(f, -1.0).powi(2),
            Forcing::TimeVarying(_) => {
                let steps = (t_end / dt).ceil() as usize;
                let h = t_end / steps.max(1) as f64;
                let mut acc = 0.0;
                let mut prev = self.h_neg1_sq(0.0);
                for i in 1..=steps.max(1) {
                    let cur = self.h_neg1_sq(i as f64 * h);
                    acc += 0.5 * h * (prev + cur);
                    prev = cur;
                }
                acc
            }
        }
    }
}

impl std::fmt::Debug for Forcing {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Forcing::Zero => write!(f, "Zero"),
            Forcing::Static(_) => write!(f, "Static(..)"),
            Forcing::TimeVarying(_) => write!(f, "TimeVarying(..)"),
        }
    }
}

/// A fully resolved Galerkin problem.
pub struct Problem {
    pub basis: Arc<GalerkinBasis>,
    pub lattice: Lattice,
    pub tensor: ViscosityTensor,
    pub certificate: EllipticityCertificate,
    pub forcing: Forcing,
    pub initial: FourierField,
    pub mode_count: usize,
    pub t_end: f64,
    pub stepper: Stepper,
    pub step: StepControl,
    pub diagnostics_every: usize,
}

/// Coefficient state `eta_{l,m}(t)` over a fixed basis.
#[derive(Debug, Clone)]
pub struct GalerkinState {
    pub t: f64,
    pub eta: Vec<f64>,
}

/// Galerkin coefficients of solenoidal initial data: `eta_l(0) = <u0, w_l>`.
///
/// Rejects non-solenoidal fields; modes outside the resolved ball are
/// truncated, so `||u_m(0)|| <= ||u0||`.
pub fn set_initial(
    basis: &GalerkinBasis,
    m: usize,
    u0: &FourierField,
) -> Result<Vec<f64>, GalerkinError> {
    if !u0.flags().solenoidal || !u0.flags().dotted {
        return Err(GalerkinError::NonSolenoidalInitial);
    }
    if m > basis.len() {
        return Err(BasisError::TooManyModes {
            requested: m,
            available: basis.len(),
        }
        .into());
    }
    Ok((0..m).map(|l| basis.coefficient(u0, l)).collect())
}

/// How the viscous term is applied.
enum ViscousOp {
    /// `S[k][l] = a_T(w_l, w_k)`, assembled once.
    Stiffness(Vec<f64>),
    MatrixFree,
}

/// Upper limit on `m` for assembled stiffness storage.
const STIFFNESS_LIMIT: usize = 512;

/// One right-hand-side evaluation with its energy bookkeeping.
struct RhsEval {
    eta_dot: Vec<f64>,
    a_t: f64,
    forcing_power: f64,
}

struct Assembler<'a> {
    basis: &'a GalerkinBasis,
    lattice: &'a Lattice,
    tensor: &'a ViscosityTensor,
    forcing: &'a Forcing,
    m: usize,
    viscous: ViscousOp,
}

impl<'a> Assembler<'a> {
    fn new(problem: &'a Problem) -> Result<Self, GalerkinError> {
        let m = problem.mode_count;
        let viscous = if !problem.tensor.time_dependent() && m <= STIFFNESS_LIMIT {
            Ok(ViscousOp::Stiffness(assemble_stiffness(
                problem.basis.as_ref(),
                &problem.lattice,
                &problem.tensor,
                m,
                0.0,
            )?))
        } else {
            Ok::<_, GalerkinError>(ViscousOp::MatrixFree)
        }?;
        Ok(Self {
            basis: problem.basis.as_ref(),
            lattice: &problem.lattice,
            tensor: &problem.tensor,
            forcing: &problem.forcing,
            m,
            viscous,
        })
    }

    fn rhs(&self, state: &GalerkinState) -> Result<RhsEval, GalerkinError> {
        let m = self.m;
        let u = self.basis.synthesize(&state.eta, self.lattice)?;
        let adv = advect(&u, &u, AdvectionMethod::Pseudospectral)?;
        let f_coef = self.forcing.coefficients(self.basis, m, state.t);

        let mut eta_dot = vec![0.0; m];
        let mut a_t_row = vec![0.0; m];
        match &self.viscous {
            ViscousOp::Stiffness(s) => {
                for k in 0..m {
                    let mut acc = 0.0;
                    for l in 0..m {
                        acc += s[k * m + l] * state.eta[l];
                    }
                    a_t_row[k] = acc;
                }
            }
            ViscousOp::MatrixFree => {
                let lu = apply_l(self.tensor, &u, state.t)?;
                for (k, row) in a_t_row.iter_mut().enumerate() {
                    *row = -self.basis.coefficient(&lu, k);
                }
            }
        }
        let mut a_t = 0.0;
        let mut forcing_power = 0.0;
        for k in 0..m {
            let adv_k = self.basis.coefficient(&adv, k);
            eta_dot[k] = f_coef[k] - a_t_row[k] - adv_k;
            a_t += a_t_row[k] * state.eta[k];
            forcing_power += f_coef[k] * state.eta[k];
        }
        Ok(RhsEval {
            eta_dot,
            a_t,
            forcing_power,
        })
    }
}

/// Stiffness block `S[k][l] = a_T(t; w_l, w_k) = <-L w_l, w_k>_T`.
pub fn assemble_stiffness(
    basis: &GalerkinBasis,
    lattice: &Lattice,
    tensor: &ViscosityTensor,
    m: usize,
    t: f64,
) -> Result<Vec<f64>, GalerkinError> {
    let mut s = vec![0.0; m * m];
    for l in 0..m {
        let w = basis.field(l, lattice)?;
        let lw = apply_l(tensor, &w, t)?;
        for k in 0..m {
            s[k * m + l] = -basis.coefficient(&lw, k);
        }
    }
    Ok(s)
}

/// One recorded trajectory sample.
#[derive(Debug, Clone)]
pub struct Sample {
    pub t: f64,
    pub eta: Vec<f64>,
    /// Right-hand side at the sample (exact within assembly).
    pub eta_dot: Vec<f64>,
}

/// Completed run: sampled trajectory plus its energy ledger.
pub struct Run {
    pub samples: Vec<Sample>,
    pub ledger: EnergyLedger,
    /// `||f||^2_{L2(0,T;H^-1)}` as used in the bounds.
    pub forcing_norm_sq: f64,
}

impl Run {
    /// Velocity field at sample `i`.
    pub fn field(&self, problem: &Problem, i: usize) -> Result<FourierField, GalerkinError> {
        Ok(problem
            .basis
            .synthesize(&self.samples[i].eta, &problem.lattice)?)
    }

    /// Time derivative field at sample `i`, from the stored right-hand side.
    pub fn derivative_field(
        &self,
        problem: &Problem,
        i: usize,
    ) -> Result<FourierField, GalerkinError> {
        Ok(problem
            .basis
            .synthesize(&self.samples[i].eta_dot, &problem.lattice)?)
    }

    /// `L2(0,T; L2)` norm of the sampled trajectory (trapezoid in time).
    pub fn l2_l2_norm(&self) -> f64 {
        let led = &self.ledger;
        let last = led.len() - 1;
        let mut acc = 0.0;
        for i in 0..last {
            let h = led.times[i + 1] - led.times[i];
            acc += 0.5 * h * (led.l2_sq[i] + led.l2_sq[i + 1]);
        }
        acc.sqrt()
    }

    /// Max residual of `d/dt ||u||^2_{H^{(s+s')/2}} = 2 <Lambda^{s+s'} u', u>`
    /// over interior samples: finite differences on the left against the
    /// stored right-hand side on the right.
    pub fn time_derivative_identity_residual(
        &self,
        problem: &Problem,
        s: f64,
        s_prime: f64,
    ) -> f64 {
        let r = s + s_prime;
        let basis = problem.basis.as_ref();
        let m = problem.mode_count;
        let lambda_pow: Vec<f64> = (0..m).map(|l| basis.entry(l).eigenvalue(r)).collect();
        let norms: Vec<f64> = self
            .samples
            .iter()
            .map(|smp| {
                (0..m)
                    .map(|l| smp.eta[l] * smp.eta[l] * lambda_pow[l])
                    .sum::<f64>()
            })
            .collect();
        let times: Vec<f64> = self.samples.iter().map(|s| s.t).collect();
        let mut worst = 0.0f64;
        for i in 1..self.samples.len().saturating_sub(1) {
            let h0 = times[i] - times[i - 1];
            let h1 = times[i + 1] - times[i];
            // Non-uniform central difference.
            let lhs = (norms[i + 1] * h0 * h0 - norms[i - 1] * h1 * h1
                + norms[i] * (h1 * h1 - h0 * h0))
                / (h0 * h1 * (h0 + h1));
            let smp = &self.samples[i];
            let rhs: f64 = 2.0
                * (0..m)
                    .map(|l| smp.eta_dot[l] * smp.eta[l] * lambda_pow[l])
                    .sum::<f64>();
            worst = worst.max((lhs - rhs).abs());
        }
        worst
    }
}

/// Integrate the Galerkin system from `t = 0` to `t_end`.
pub fn integrate(problem: &Problem) -> Result<Run, GalerkinError> {
    integrate_with(problem, |_| {})
}

/// Integration with a per-sample callback.
pub fn integrate_with(
    problem: &Problem,
    mut on_sample: impl FnMut(&Sample),
) -> Result<Run, GalerkinError> {
    if problem.t_end <= 0.0 {
        return Err(GalerkinError::BadConfig("T must be positive".into()));
    }
    let dt0 = match problem.step {
        StepControl::Fixed(dt) => dt,
        StepControl::Adaptive { dt_init, .. } => dt_init,
    };
    if dt0 <= 0.0 {
        return Err(GalerkinError::BadConfig("dt must be positive".into()));
    }
    let assembler = Assembler::new(problem)?;
    let m = problem.mode_count;
    let eta = set_initial(problem.basis.as_ref(), m, &problem.initial)?;

    // A-priori bounds; the blow-up guard hangs off B1. B1 uses the norm of
    // the given data, of which the projected state keeps at most a part.
    let forcing_norm_sq = problem.forcing.h_neg1_sq_integral(problem.t_end, dt0);
    let u0_l2_sq = sobolev_norm(&problem.initial, 0.0).powi(2);
    let c_a = problem.certificate.c_a;
    let b1 = u0_l2_sq + 4.0 * c_a * forcing_norm_sq;
    let b2 = 4.0 * c_a * b1;
    let blow_up_limit = 1e3 * b1.sqrt() + 1e-9;

    let mut ledger = EnergyLedger {
        b1,
        b2,
        c_a,
        forcing_h_neg1_sq: forcing_norm_sq,
        dt: dt0,
        ..Default::default()
    };

    // Frozen diagonal for the IMEX stepper.
    let imex_diag: Option<Vec<f64>> = match problem.stepper {
        Stepper::Imex => {
            let mut d = vec![0.0; m];
            for (l, dl) in d.iter_mut().enumerate() {
                let w = problem.basis.field(l, &problem.lattice)?;
                *dl = bilinear_form(&problem.tensor, &w, &w, 0.0)?;
            }
            Some(d)
        }
        Stepper::Rk4 => None,
    };

    let lambda1: Vec<f64> = (0..m)
        .map(|l| problem.basis.entry(l).eigenvalue(1.0))
        .collect();
    let mut samples = Vec::new();
    let record = |state: &GalerkinState,
                  eval: &RhsEval,
                  samples: &mut Vec<Sample>,
                  ledger: &mut EnergyLedger,
                  on_sample: &mut dyn FnMut(&Sample)| {
        let l2_sq: f64 = state.eta.iter().map(|e| e * e).sum();
        let h1_sq: f64 = state
            .eta
            .iter()
            .zip(lambda1.iter())
            .map(|(e, l)| e * e * l * l)
            .sum();
        let residual = (dot(&eval.eta_dot, &state.eta) + eval.a_t - eval.forcing_power).abs();
        ledger.push(
            state.t,
            l2_sq,
            h1_sq,
            eval.a_t,
            eval.forcing_power,
            residual,
        );
        let sample = Sample {
            t: state.t,
            eta: state.eta.clone(),
            eta_dot: eval.eta_dot.clone(),
        };
        on_sample(&sample);
        samples.push(sample);
    };

    let mut state = GalerkinState { t: 0.0, eta };
    let mut dt = dt0;
    let mut steps_since_sample = 0usize;
    let cadence = problem.diagnostics_every.max(1);

    // Record t = 0 using the first stage evaluation.
    let mut eval = assembler.rhs(&state)?;
    record(&state, &eval, &mut samples, &mut ledger, &mut on_sample);

    while state.t < problem.t_end - 1e-12 * problem.t_end {
        let remaining = problem.t_end - state.t;
        let mut h = dt.min(remaining);
        let (next_eta, next_dt) = match (problem.stepper, problem.step) {
            (Stepper::Rk4, StepControl::Fixed(_)) => {
                (rk4_step(&assembler, &state, &eval.eta_dot, h)?, dt)
            }
            (Stepper::Rk4, StepControl::Adaptive { tol, .. }) => {
                // Step doubling: one h-step against two h/2-steps.
                loop {
                    let full = rk4_step(&assembler, &state, &eval.eta_dot, h)?;
                    let half1 = rk4_step(&assembler, &state, &eval.eta_dot, 0.5 * h)?;
                    let mid = GalerkinState {
                        t: state.t + 0.5 * h,
                        eta: half1,
                    };
                    let mid_eval = assembler.rhs(&mid)?;
                    let half2 = rk4_step(&assembler, &mid, &mid_eval.eta_dot, 0.5 * h)?;
                    let err = full
                        .iter()
                        .zip(half2.iter())
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum::<f64>()
                        .sqrt()
                        / 15.0;
                    let scale = tol * (1.0 + norm(&half2));
                    if err <= scale || h <= 1e-12 {
                        let grow = if err > 0.0 {
                            0.9 * (scale / err).powf(0.2)
                        } else {
                            5.0
                        };
                        break (half2, (h * grow.clamp(0.2, 5.0)).min(problem.t_end));
                    }
                    h *= 0.5;
                }
            }
            (Stepper::Imex, _) => {
                let d = imex_diag.as_ref().expect("imex diagonal");
                let mut next = vec![0.0; m];
                for l in 0..m {
                    next[l] = (state.eta[l] + h * (eval.eta_dot[l] + d[l] * state.eta[l]))
                        / (1.0 + h * d[l]);
                }
                (next, dt)
            }
        };
        dt = next_dt;
        state = GalerkinState {
            t: state.t + h,
            eta: next_eta,
        };
        if state.eta.iter().any(|e| !e.is_finite()) {
            return Err(GalerkinError::NanDetected { t: state.t });
        }
        let l2 = norm(&state.eta);
        if l2 > blow_up_limit {
            return Err(GalerkinError::BlowUp {
                t: state.t,
                norm: l2,
                limit: blow_up_limit,
            });
        }
        eval = assembler.rhs(&state)?;
        steps_since_sample += 1;
        let at_end = state.t >= problem.t_end - 1e-12 * problem.t_end;
        if steps_since_sample == cadence || at_end {
            record(&state, &eval, &mut samples, &mut ledger, &mut on_sample);
            steps_since_sample = 0;
        }
    }
    Ok(Run {
        samples,
        ledger,
        forcing_norm_sq,
    })
}

fn rk4_step(
    assembler: &Assembler,
    state: &GalerkinState,
    k1: &[f64],
    h: f64,
) -> Result<Vec<f64>, GalerkinError> {
    let m = state.eta.len();
    let advance = |base: &[f64], slope: &[f64], factor: f64| -> Vec<f64> {
        base.iter()
            .zip(slope.iter())
            .map(|(b, s)| b + factor * s)
            .collect()
    };
    let k2 = assembler
        .rhs(&GalerkinState {
            t: state.t + 0.5 * h,
            eta: advance(&state.eta, k1, 0.5 * h),
        })?
        .eta_dot;
    let k3 = assembler
        .rhs(&GalerkinState {
            t: state.t + 0.5 * h,
            eta: advance(&state.eta, &k2, 0.5 * h),
        })?
        .eta_dot;
    let k4 = assembler
        .rhs(&GalerkinState {
            t: state.t + h,
            eta: advance(&state.eta, &k3, h),
        })?
        .eta_dot;
    let mut out = Vec::with_capacity(m);
    for l in 0..m {
        out.push(state.eta[l] + h / 6.0 * (k1[l] + 2.0 * k2[l] + 2.0 * k3[l] + k4[l]));
    }
    Ok(out)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// RK4 real-axis stability bound for the stiffest certified viscous mode:
/// `dt <= 2.785 / (||A|| rho(K)^2)`.
pub fn stability_dt_bound(certificate: &EllipticityCertificate, cutoff: usize) -> f64 {
    let rho_k = 2.0 * std::f64::consts::PI * (1.0 + (cutoff * cutoff) as f64).sqrt();
    2.785 / (certificate.tensor_norm * rho_k * rho_k)
}
