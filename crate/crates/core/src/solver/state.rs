use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{Grid, SpectralField, SpectralTransform};

/// Density perturbation `a = ρ − ρ*` and momentum `m = ρu` at one time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FluidState {
    pub a: SpectralField,
    pub m: SpectralField,
    pub time: f64,
}

impl FluidState {
    pub fn new(a: SpectralField, m: SpectralField, time: f64) -> Result<Self> {
        if a.grid() != m.grid() {
            return Err(Error::GridMismatch);
        }
        let d = a.grid().dim();
        if a.components() != 1 || m.components() != d {
            return Err(Error::ShapeMismatch {
                expected: format!("scalar a and {d}-component m"),
                actual: format!("{} and {} components", a.components(), m.components()),
            });
        }
        Ok(FluidState { a, m, time })
    }

    pub fn zeros(grid: &Grid) -> Self {
        FluidState {
            a: SpectralField::zeros(grid, 1),
            m: SpectralField::zeros(grid, grid.dim()),
            time: 0.0,
        }
    }

    pub fn grid(&self) -> &Grid {
        self.a.grid()
    }

    pub fn is_finite(&self) -> bool {
        self.a.is_finite() && self.m.is_finite()
    }

    /// Mean of `a` over the box.
    pub fn conserved_mass(&self) -> f64 {
        self.a.mean(0).re
    }

    pub fn scaled(&self, factor: f64) -> FluidState {
        FluidState {
            a: self.a.scaled(factor),
            m: self.m.scaled(factor),
            time: self.time,
        }
    }

    /// `‖(a, m) − (b, n)‖ / ‖(b, n)‖` in `L²`.
    pub fn relative_distance(&self, other: &FluidState) -> Result<f64> {
        let da = self.a.sub(&other.a)?.energy();
        let dm = self.m.sub(&other.m)?.energy();
        let base = other.a.energy() + other.m.energy();
        if base == 0.0 {
            return Ok((da + dm).sqrt());
        }
        Ok(((da + dm) / base).sqrt())
    }
}

/// One row of the diagnostics time series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StateDiagnostics {
    pub time: f64,
    pub mass: f64,
    pub l2_a: f64,
    pub l2_m: f64,
    pub min_rho: f64,
    pub max_rho: f64,
}

impl StateDiagnostics {
    pub const CSV_HEADER: &'static str = "t,mass,l2_a,l2_m,min_rho,max_rho";

    pub fn compute(state: &FluidState, transform: &SpectralTransform, rho_star: f64) -> Result<Self> {
        let a = transform.inverse_real(state.a.component(0))?;
        let (lo, hi) = a
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
        Ok(StateDiagnostics {
            time: state.time,
            mass: state.conserved_mass(),
            l2_a: state.a.l2_norm(),
            l2_m: state.m.l2_norm(),
            min_rho: rho_star + lo,
            max_rho: rho_star + hi,
        })
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{:.12e},{:.17e},{:.12e},{:.12e},{:.12e},{:.12e}",
            self.time, self.mass, self.l2_a, self.l2_m, self.min_rho, self.max_rho
        )
    }
}
