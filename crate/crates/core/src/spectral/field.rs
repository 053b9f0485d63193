use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::grid::Grid;
use crate::error::{Error, Result};

/// Fourier coefficients of a scalar or vector field, stored component-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralField {
    grid: Grid,
    components: usize,
    coeffs: Vec<Complex64>,
}

/// Real samples of a scalar or vector field on the physical lattice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhysicalField {
    grid: Grid,
    components: usize,
    values: Vec<f64>,
}

fn check_len(grid: &Grid, components: usize, len: usize) -> Result<()> {
    if components == 0 || len != components * grid.len() {
        return Err(Error::ShapeMismatch {
            expected: format!("{} x {}", components.max(1), grid.len()),
            actual: format!("{len}"),
        });
    }
    Ok(())
}

impl SpectralField {
    pub fn zeros(grid: &Grid, components: usize) -> Self {
        SpectralField {
            grid: grid.clone(),
            components,
            coeffs: vec![Complex64::new(0.0, 0.0); components * grid.len()],
        }
    }

    pub fn from_coeffs(grid: &Grid, components: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        check_len(grid, components, coeffs.len())?;
        Ok(SpectralField {
            grid: grid.clone(),
            components,
            coeffs,
        })
    }

    /// Stacks scalar fields into one vector field.
    pub fn stack(parts: &[SpectralField]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::InvalidArgument("nothing to stack".into()))?;
        let mut coeffs = Vec::with_capacity(parts.len() * first.grid.len());
        let mut components = 0;
        for p in parts {
            if p.grid != first.grid {
                return Err(Error::GridMismatch);
            }
            coeffs.extend_from_slice(&p.coeffs);
            components += p.components;
        }
        Ok(SpectralField {
            grid: first.grid.clone(),
            components,
            coeffs,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn component(&self, c: usize) -> &[Complex64] {
        let n = self.grid.len();
        &self.coeffs[c * n..(c + 1) * n]
    }

    pub fn component_mut(&mut self, c: usize) -> &mut [Complex64] {
        let n = self.grid.len();
        &mut self.coeffs[c * n..(c + 1) * n]
    }

    pub fn component_field(&self, c: usize) -> SpectralField {
        SpectralField {
            grid: self.grid.clone(),
            components: 1,
            coeffs: self.component(c).to_vec(),
        }
    }

    /// Spatial mean of component `c` (the zero mode rescaled by the unitary factor).
    pub fn mean(&self, c: usize) -> Complex64 {
        self.component(c)[0] / (self.grid.len() as f64).sqrt()
    }

    pub fn remove_mean(&mut self) {
        for c in 0..self.components {
            self.component_mut(c)[0] = Complex64::new(0.0, 0.0);
        }
    }

    /// `sum |u_hat|^2` over all components.
    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Physical `L^2(box)` norm.
    pub fn l2_norm(&self) -> f64 {
        (self.grid.cell_volume() * self.energy()).sqrt()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    fn same_shape(&self, other: &SpectralField) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        if self.components != other.components {
            return Err(Error::ShapeMismatch {
                expected: format!("{} components", self.components),
                actual: format!("{} components", other.components),
            });
        }
        Ok(())
    }

    /// `self += alpha * other`.
    pub fn axpy(&mut self, alpha: f64, other: &SpectralField) -> Result<()> {
        self.same_shape(other)?;
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += b * alpha;
        }
        Ok(())
    }

    pub fn add(&self, other: &SpectralField) -> Result<SpectralField> {
        let mut out = self.clone();
        out.axpy(1.0, other)?;
        Ok(out)
    }

    pub fn sub(&self, other: &SpectralField) -> Result<SpectralField> {
        let mut out = self.clone();
        out.axpy(-1.0, other)?;
        Ok(out)
    }

    pub fn scale(&mut self, alpha: f64) {
        for z in &mut self.coeffs {
            *z *= alpha;
        }
    }

    pub fn scaled(&self, alpha: f64) -> SpectralField {
        let mut out = self.clone();
        out.scale(alpha);
        out
    }

    /// Largest violation of `u_hat(-k) = conj(u_hat(k))`, relative to the largest coefficient.
    pub fn hermitian_defect(&self) -> f64 {
        let scale = self.max_abs_coeff().max(f64::MIN_POSITIVE);
        let mut worst = 0.0f64;
        for c in 0..self.components {
            let u = self.component(c);
            for (idx, z) in u.iter().enumerate() {
                let neg = self.grid.negated_index(idx);
                worst = worst.max((z - u[neg].conj()).norm());
            }
        }
        worst / scale
    }

    /// Relative `L^2` distance `|self - other| / max(|self|, |other|)`.
    pub fn relative_distance(&self, other: &SpectralField) -> Result<f64> {
        self.same_shape(other)?;
        let diff: f64 = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        let scale = self.energy().max(other.energy());
        if scale == 0.0 {
            return Ok(diff.sqrt());
        }
        Ok((diff / scale).sqrt())
    }
}

impl PhysicalField {
    pub fn zeros(grid: &Grid, components: usize) -> Self {
        PhysicalField {
            grid: grid.clone(),
            components,
            values: vec![0.0; components * grid.len()],
        }
    }

    pub fn from_values(grid: &Grid, components: usize, values: Vec<f64>) -> Result<Self> {
        check_len(grid, components, values.len())?;
        Ok(PhysicalField {
            grid: grid.clone(),
            components,
            values,
        })
    }

    /// Samples `f(x)` (one closure call per lattice point and component).
    pub fn from_fn(grid: &Grid, components: usize, mut f: impl FnMut(usize, [f64; 3]) -> f64) -> Self {
        let n = grid.len();
        let mut values = Vec::with_capacity(components * n);
        for c in 0..components {
            for idx in 0..n {
                values.push(f(c, grid.position(idx)));
            }
        }
        PhysicalField {
            grid: grid.clone(),
            components,
            values,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn component(&self, c: usize) -> &[f64] {
        let n = self.grid.len();
        &self.values[c * n..(c + 1) * n]
    }

    pub fn l2_norm(&self) -> f64 {
        let s: f64 = self.values.iter().map(|v| v * v).sum();
        (self.grid.cell_volume() * s).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }
}
