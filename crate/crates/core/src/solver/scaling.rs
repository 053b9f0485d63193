use serde::{Deserialize, Serialize};

use super::nonlinear::NonlinearForm;
use super::pressure::PressureLaw;
use super::state::FluidState;
use super::stepper::{Scheme, Stepper};
use crate::error::{Error, Result};
use crate::linear::FluidParams;
use crate::spectral::SpectralField;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingRun {
    /// Time reached by the rescaled run; the original runs to `ν²` times this.
    pub time: f64,
    /// Step of the original run; the rescaled run uses `dt/ν²`.
    pub dt: f64,
    pub scheme: Scheme,
    pub form: NonlinearForm,
    pub linear_only: bool,
}

/// Data of `ρ_ν(x) = ρ(νx)`, `u_ν(x) = νu(νx)` on the box shrunk by `ν`.
///
/// The lattice is unchanged, so the coefficients of `a` carry over and those
/// of `m = ρu` pick up one factor `ν`.
pub fn rescale_state(state: &FluidState, nu: f64) -> Result<FluidState> {
    if !(nu > 0.0) || !nu.is_finite() {
        return Err(Error::InvalidArgument(format!("scale factor {nu} must be positive")));
    }
    let grid = state.grid().rescaled(1.0 / nu)?;
    let a = SpectralField::from_coeffs(&grid, 1, state.a.coeffs().to_vec())?;
    let m = SpectralField::from_coeffs(&grid, grid.dim(), state.m.coeffs().iter().map(|c| c * nu).collect())?;
    FluidState::new(a, m, state.time / (nu * nu))
}

/// Parameters and pressure for the rescaled problem: `P → ν²P`, so `γ → ν²γ`.
pub fn rescale_model(params: &FluidParams, law: &PressureLaw, nu: f64) -> Result<(FluidParams, PressureLaw)> {
    Ok((params.with_gamma(nu * nu * params.gamma())?, law.scaled(nu * nu)))
}

/// Evolves `state` for `ν²t` and its rescaling for `t`, maps the rescaled
/// result back and returns the relative `L²` distance of the coefficients.
pub fn scaling_invariance_probe(
    state: &FluidState,
    nu: f64,
    params: &FluidParams,
    law: &PressureLaw,
    run: &ScalingRun,
) -> Result<f64> {
    let build = |s: &FluidState, p: &FluidParams, l: &PressureLaw| -> Result<Stepper> {
        let st = Stepper::new(s.grid(), p, l, run.scheme, run.form)?;
        Ok(if run.linear_only { st.linear_only() } else { st })
    };
    let small = rescale_state(state, nu)?;
    let (p_small, law_small) = rescale_model(params, law, nu)?;
    let t0 = state.time;
    let big = build(state, params, law)?.advance(state, t0 + nu * nu * run.time, run.dt)?;
    let small = build(&small, &p_small, &law_small)?.advance(&small, small.time + run.time, run.dt / (nu * nu))?;
    let back = rescale_state(&small, 1.0 / nu)?;
    if back.grid() != big.grid() {
        return Err(Error::GridMismatch);
    }
    back.relative_distance(&big)
}
