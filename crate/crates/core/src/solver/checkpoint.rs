use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::pressure::PressureLaw;
use super::state::FluidState;
use crate::error::{Error, Result};
use crate::linear::FluidParams;
use crate::spectral::{Grid, SpectralField};

pub const CHECKPOINT_FORMAT: &str = "korteweg-checkpoint";
pub const CHECKPOINT_VERSION: u32 = 1;

/// Self-describing JSON snapshot of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub format: String,
    pub version: u32,
    pub grid: Grid,
    pub params: FluidParams,
    pub law: PressureLaw,
    pub time: f64,
    /// Interleaved `[re, im]` coefficients of `a`.
    pub a: Vec<[f64; 2]>,
    /// Interleaved coefficients of `m`, component-major.
    pub m: Vec<[f64; 2]>,
}

fn pack(u: &SpectralField) -> Vec<[f64; 2]> {
    u.coeffs().iter().map(|c| [c.re, c.im]).collect()
}

fn unpack(grid: &Grid, comps: usize, v: &[[f64; 2]]) -> Result<SpectralField> {
    SpectralField::from_coeffs(grid, comps, v.iter().map(|&[re, im]| num_complex::Complex64::new(re, im)).collect())
}

impl Checkpoint {
    pub fn new(state: &FluidState, params: &FluidParams, law: &PressureLaw) -> Self {
        Checkpoint {
            format: CHECKPOINT_FORMAT.into(),
            version: CHECKPOINT_VERSION,
            grid: state.grid().clone(),
            params: *params,
            law: law.clone(),
            time: state.time,
            a: pack(&state.a),
            m: pack(&state.m),
        }
    }

    pub fn state(&self) -> Result<FluidState> {
        let a = unpack(&self.grid, 1, &self.a)?;
        let m = unpack(&self.grid, self.grid.dim(), &self.m)?;
        FluidState::new(a, m, self.time)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        serde_json::to_writer(&mut w, self)?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let c: Checkpoint = serde_json::from_reader(BufReader::new(File::open(path)?))?;
        if c.format != CHECKPOINT_FORMAT || c.version != CHECKPOINT_VERSION {
            return Err(Error::InvalidArgument(format!(
                "{} is not a version {CHECKPOINT_VERSION} checkpoint (found {} v{})",
                path.display(),
                c.format,
                c.version
            )));
        }
        c.law.validate()?;
        c.state()?;
        Ok(c)
    }
}
