//! Energy bookkeeping along a Galerkin trajectory.
//!
//! Per sample the ledger stores `||u_m||^2`, `||u_m||_{H^1}^2` (exact in the
//! eigencoordinates), `a_T(u_m, u_m)`, the forcing power `<f, u_m>` and the
//! contraction of the assembled right-hand side with the state. Trapezoidal
//! accumulations back the energy-inequality and a-priori-bound checks
//!
//! ```text
//! ||u(t)||^2 + 2 int_{t0}^t a_T <= ||u(t0)||^2 + 2 int_{t0}^t <f,u>,
//! sup_t ||u_m||^2 <= B1,     ||u_m||^2_{L2(0,T;H^1)} <= B2,
//! B1 = ||u0||^2 + 4 C_A ||f||^2_{L2(0,T;H^-1)},   B2 = 4 C_A B1.
//! ```

use serde::Serialize;

/// Time series and accumulated integrals of one run.
#[derive(Debug, Clone, Default, Serialize)]
pub struct EnergyLedger {
    pub times: Vec<f64>,
    /// `||u_m||_{L2}^2`
    pub l2_sq: Vec<f64>,
    /// `||u_m||_{H1}^2`
    pub h1_sq: Vec<f64>,
    /// `a_T(t; u_m, u_m)`
    pub a_t: Vec<f64>,
    /// `<f, u_m>`
    pub forcing_power: Vec<f64>,
    /// `|eta' . eta + a_T - <f,u>|` from the stored right-hand side; equals
    /// the contraction of the nonlinear term with the state.
    pub nonlinear_residual: Vec<f64>,
    /// Cumulative trapezoid of `a_t` from t = 0.
    pub int_a_t: Vec<f64>,
    /// Cumulative trapezoid of `forcing_power`.
    pub int_forcing: Vec<f64>,
    /// Cumulative trapezoid of `h1_sq`.
    pub int_h1_sq: Vec<f64>,
    /// A-priori bound `B1` on `sup_t ||u_m||^2`.
    pub b1: f64,
    /// A-priori bound `B2` on the `L2(0,T; H^1)` norm squared.
    pub b2: f64,
    pub c_a: f64,
    /// `||f||^2_{L2(0,T;H^-1)}` used in the bounds.
    pub forcing_h_neg1_sq: f64,
    /// Step size of the run (for error estimates in reports).
    pub dt: f64,
}

impl EnergyLedger {
    pub fn push(
        &mut self,
        t: f64,
        l2_sq: f64,
        h1_sq: f64,
        a_t: f64,
        forcing_power: f64,
        nonlinear_residual: f64,
    ) {
        if let Some(&prev_t) = self.times.last() {
            let h = t - prev_t;
            let n = self.times.len() - 1;
            self.int_a_t
                .push(self.int_a_t[n] + 0.5 * h * (self.a_t[n] + a_t));
            self.int_forcing
                .push(self.int_forcing[n] + 0.5 * h * (self.forcing_power[n] + forcing_power));
            self.int_h1_sq
                .push(self.int_h1_sq[n] + 0.5 * h * (self.h1_sq[n] + h1_sq));
        } else {
            self.int_a_t.push(0.0);
            self.int_forcing.push(0.0);
            self.int_h1_sq.push(0.0);
        }
        self.times.push(t);
        self.l2_sq.push(l2_sq);
        self.h1_sq.push(h1_sq);
        self.a_t.push(a_t);
        self.forcing_power.push(forcing_power);
        self.nonlinear_residual.push(nonlinear_residual);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Three-point finite difference of a sampled function at index `i`
    /// (second order, one-sided at the ends).
    fn d_dt(&self, values: &[f64], i: usize) -> f64 {
        let t = &self.times;
        let last = t.len() - 1;
        if t.len() < 2 {
            return 0.0;
        }
        if t.len() == 2 {
            return (values[1] - values[0]) / (t[1] - t[0]);
        }
        let (i0, i1, i2) = if i == 0 {
            (0, 1, 2)
        } else if i == last {
            (last - 2, last - 1, last)
        } else {
            (i - 1, i, i + 1)
        };
        let (t0, t1, t2) = (t[i0], t[i1], t[i2]);
        let (f0, f1, f2) = (values[i0], values[i1], values[i2]);
        let ti = t[i];
        // Derivative of the quadratic through the three points.
        let d0 = f0 * (2.0 * ti - t1 - t2) / ((t0 - t1) * (t0 - t2));
        let d1 = f1 * (2.0 * ti - t0 - t2) / ((t1 - t0) * (t1 - t2));
        let d2 = f2 * (2.0 * ti - t0 - t1) / ((t2 - t0) * (t2 - t1));
        d0 + d1 + d2
    }

    /// Residual of the energy identity
    /// `1/2 d/dt ||u_m||^2 + a_T(u_m,u_m) - <f,u_m>` at sample `i`, with the
    /// time derivative taken by finite differences of the sampled energy
    /// (an independent cross-check of the assembled right-hand side).
    pub fn energy_identity_residual(&self, i: usize) -> f64 {
        0.5 * self.d_dt(&self.l2_sq, i) + self.a_t[i] - self.forcing_power[i]
    }

    pub fn max_energy_identity_residual(&self) -> f64 {
        (0..self.len())
            .map(|i| self.energy_identity_residual(i).abs())
            .fold(0.0, f64::max)
    }

    /// Estimated error of the trapezoidal integrals over `[i0, i1]`, from
    /// second differences of the integrands.
    fn quadrature_error_estimate(&self, values: &[f64], i0: usize, i1: usize) -> f64 {
        let mut acc = 0.0;
        for i in (i0 + 1)..i1 {
            let h = 0.5 * (self.times[i + 1] - self.times[i - 1]);
            acc += (values[i + 1] - 2.0 * values[i] + values[i - 1]).abs() * h / 12.0;
        }
        acc
    }

    /// Check the strong energy inequality between samples `i0 < i1`, plus
    /// the a-priori bounds. The tolerance is 10 x (quadrature + stepper
    /// estimate), recorded in the report.
    pub fn energy_inequality_check(&self, i0: usize, i1: usize) -> InequalityReport {
        assert!(i0 < i1 && i1 < self.len());
        let lhs = self.l2_sq[i1] + 2.0 * (self.int_a_t[i1] - self.int_a_t[i0]);
        let rhs = self.l2_sq[i0] + 2.0 * (self.int_forcing[i1] - self.int_forcing[i0]);
        let quad = 2.0 * self.quadrature_error_estimate(&self.a_t, i0, i1)
            + 2.0 * self.quadrature_error_estimate(&self.forcing_power, i0, i1);
        let span = self.times[i1] - self.times[i0];
        let scale = self
            .a_t
            .iter()
            .skip(i0)
            .take(i1 - i0 + 1)
            .fold(0.0f64, |m, &v| m.max(v.abs()));
        let stepper = self.dt.powi(4) * span * scale.max(1.0);
        let tolerance = 10.0 * (quad + stepper);

        let sup_l2 = self.l2_sq.iter().fold(0.0f64, |m, &v| m.max(v));
        let b1_margin = self.b1 - sup_l2;
        let b2_margin = self.b2 - self.int_h1_sq[self.len() - 1];
        let bound_tol = 1e-9 * (1.0 + self.b1.abs().max(self.b2.abs()));
        InequalityReport {
            lhs,
            rhs,
            tolerance,
            quadrature_estimate: quad,
            stepper_estimate: stepper,
            inequality_ok: lhs <= rhs + tolerance,
            b1: self.b1,
            sup_l2_sq: sup_l2,
            b1_margin,
            b2: self.b2,
            l2_h1_sq: self.int_h1_sq[self.len() - 1],
            b2_margin,
            bounds_ok: b1_margin >= -bound_tol && b2_margin >= -bound_tol,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct InequalityReport {
    pub lhs: f64,
    pub rhs: f64,
    pub tolerance: f64,
    pub quadrature_estimate: f64,
    pub stepper_estimate: f64,
    pub inequality_ok: bool,
    pub b1: f64,
    pub sup_l2_sq: f64,
    pub b1_margin: f64,
    pub b2: f64,
    pub l2_h1_sq: f64,
    pub b2_margin: f64,
    pub bounds_ok: bool,
}

impl InequalityReport {
    pub fn passed(&self) -> bool {
        self.inequality_ok && self.bounds_ok
    }
}
