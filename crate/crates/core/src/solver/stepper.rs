use serde::{Deserialize, Serialize};

use super::nonlinear::{NonlinearDiagnostics, NonlinearForm, NonlinearOperator};
use super::pressure::PressureLaw;
use super::state::FluidState;
use crate::error::{Error, Result};
use crate::linear::{FluidParams, LinearPropagator, PropagatorOp};
use crate::spectral::{Grid, SpectralField};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Cox–Matthews second order.
    #[default]
    Etdrk2,
    /// Cox–Matthews fourth order.
    Etdrk4,
}

impl Scheme {
    pub fn order(self) -> u32 {
        match self {
            Scheme::Etdrk2 => 2,
            Scheme::Etdrk4 => 4,
        }
    }

    fn ops(self) -> &'static [PropagatorOp] {
        match self {
            Scheme::Etdrk2 => &[PropagatorOp::Exp, PropagatorOp::Phi1, PropagatorOp::Phi2],
            Scheme::Etdrk4 => &[
                PropagatorOp::Exp,
                PropagatorOp::Phi1,
                PropagatorOp::Phi2,
                PropagatorOp::Phi3,
                PropagatorOp::HalfExp,
                PropagatorOp::HalfPhi1,
            ],
        }
    }
}

pub const DEFAULT_CFL: f64 = 0.3;

/// Exponential time integrator: the linear part is advanced exactly, the
/// nonlinearity enters through `φ`-function weights.
#[derive(Debug, Clone)]
pub struct Stepper {
    nonlinear: NonlinearOperator,
    scheme: Scheme,
    cfl: f64,
    linear_only: bool,
    prop: Option<LinearPropagator>,
    last: Option<NonlinearDiagnostics>,
}

impl Stepper {
    pub fn new(grid: &Grid, params: &FluidParams, law: &PressureLaw, scheme: Scheme, form: NonlinearForm) -> Result<Self> {
        Ok(Stepper {
            nonlinear: NonlinearOperator::new(grid, params, law, form)?,
            scheme,
            cfl: DEFAULT_CFL,
            linear_only: false,
            prop: None,
            last: None,
        })
    }

    /// Drops the nonlinearity, leaving the exact linear flow.
    pub fn linear_only(mut self) -> Self {
        self.linear_only = true;
        self
    }

    pub fn with_cfl(mut self, cfl: f64) -> Self {
        self.cfl = cfl;
        self
    }

    pub fn grid(&self) -> &Grid {
        self.nonlinear.grid()
    }

    pub fn params(&self) -> &FluidParams {
        self.nonlinear.params()
    }

    pub fn nonlinear(&self) -> &NonlinearOperator {
        &self.nonlinear
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    /// Diagnostics from the first stage of the most recent step.
    pub fn last_diagnostics(&self) -> Option<NonlinearDiagnostics> {
        self.last
    }

    fn propagator(&mut self, dt: f64) -> Result<&LinearPropagator> {
        let stale = self.prop.as_ref().is_none_or(|p| p.step() != dt);
        if stale {
            let ops = self.scheme.ops();
            self.prop = Some(LinearPropagator::new(self.grid(), self.params(), dt, ops)?);
        }
        Ok(self.prop.as_ref().expect("just built"))
    }

    fn forcing(&self, a: &SpectralField, m: &SpectralField, time: f64) -> Result<(SpectralField, Option<NonlinearDiagnostics>)> {
        if self.linear_only {
            return Ok((SpectralField::zeros(self.grid(), self.grid().dim()), None));
        }
        let (n, diag) = self.nonlinear.eval(a, m, time)?;
        Ok((n, Some(diag)))
    }

    /// Largest step allowed by `max|u| dt / Δx ≤ cfl` for the last evaluated state.
    pub fn cfl_limit(&self, max_speed: f64) -> f64 {
        if max_speed == 0.0 {
            f64::INFINITY
        } else {
            self.cfl * self.grid().spacing() / max_speed
        }
    }

    pub fn step(&mut self, state: &FluidState, dt: f64) -> Result<FluidState> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::StepRejected { dt, reason: "time step must be positive and finite".into() });
        }
        if state.grid() != self.grid() {
            return Err(Error::GridMismatch);
        }
        let t0 = state.time;
        let (n0, diag) = self.forcing(&state.a, &state.m, t0)?;
        if let Some(dg) = diag {
            let limit = self.cfl_limit(dg.max_speed);
            if dt > limit * (1.0 + 1e-12) {
                return Err(Error::StepRejected {
                    dt,
                    reason: format!("CFL limit {limit:e} exceeded (max speed {:e})", dg.max_speed),
                });
            }
        }
        self.last = diag;
        let za = SpectralField::zeros(self.grid(), 1);
        let next = match self.scheme {
            Scheme::Etdrk2 => {
                let prop = self.propagator(dt)?.clone();
                let (mut a1, mut m1) = prop.apply(PropagatorOp::Exp, &state.a, &state.m)?;
                prop.apply_into(PropagatorOp::Phi1, &za, &n0, dt, &mut a1, &mut m1)?;
                let (n1, _) = self.forcing(&a1, &m1, t0 + dt)?;
                let dn = n1.sub(&n0)?;
                prop.apply_into(PropagatorOp::Phi2, &za, &dn, dt, &mut a1, &mut m1)?;
                (a1, m1)
            }
            Scheme::Etdrk4 => {
                let prop = self.propagator(dt)?.clone();
                let half = 0.5 * dt;
                let (ea, em) = prop.apply(PropagatorOp::HalfExp, &state.a, &state.m)?;
                let (mut aa, mut ma) = (ea.clone(), em.clone());
                prop.apply_into(PropagatorOp::HalfPhi1, &za, &n0, half, &mut aa, &mut ma)?;
                let (na, _) = self.forcing(&aa, &ma, t0 + half)?;
                let (mut ab, mut mb) = (ea, em);
                prop.apply_into(PropagatorOp::HalfPhi1, &za, &na, half, &mut ab, &mut mb)?;
                let (nb, _) = self.forcing(&ab, &mb, t0 + half)?;
                let (mut ac, mut mc) = prop.apply(PropagatorOp::HalfExp, &aa, &ma)?;
                let mut comb = nb.scaled(2.0);
                comb.axpy(-1.0, &n0)?;
                prop.apply_into(PropagatorOp::HalfPhi1, &za, &comb, half, &mut ac, &mut mc)?;
                let (nc, _) = self.forcing(&ac, &mc, t0 + dt)?;
                let (mut a1, mut m1) = prop.apply(PropagatorOp::Exp, &state.a, &state.m)?;
                prop.apply_into(PropagatorOp::Phi1, &za, &n0, dt, &mut a1, &mut m1)?;
                let mut c2 = n0.scaled(-3.0);
                c2.axpy(2.0, &na)?;
                c2.axpy(2.0, &nb)?;
                c2.axpy(-1.0, &nc)?;
                prop.apply_into(PropagatorOp::Phi2, &za, &c2, dt, &mut a1, &mut m1)?;
                let mut c3 = n0.scaled(4.0);
                c3.axpy(-4.0, &na)?;
                c3.axpy(-4.0, &nb)?;
                c3.axpy(4.0, &nc)?;
                prop.apply_into(PropagatorOp::Phi3, &za, &c3, dt, &mut a1, &mut m1)?;
                (a1, m1)
            }
        };
        let out = FluidState {
            a: next.0,
            m: next.1,
            time: t0 + dt,
        };
        if !out.is_finite() {
            return Err(Error::NonFinite(format!("state after step to t = {}", out.time)));
        }
        Ok(out)
    }

    /// Fixed steps of size `dt` up to `t_end`, shortening the last one.
    pub fn advance(&mut self, state: &FluidState, t_end: f64, dt: f64) -> Result<FluidState> {
        let mut s = state.clone();
        while s.time < t_end - 1e-12 * t_end.abs().max(1.0) {
            let h = dt.min(t_end - s.time);
            s = self.step(&s, h)?;
        }
        Ok(s)
    }
}
