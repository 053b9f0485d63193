use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::ops::magnitude;
use crate::spectral::{Grid, SpectralField};

/// C^∞ step on `[0, 1]`: `f(x) / (f(x) + f(1 - x))` with `f(x) = exp(-1/x)`.
pub fn smoothstep(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let f = |t: f64| (-1.0 / t).exp();
    let a = f(x);
    let b = f(1.0 - x);
    a / (a + b)
}

/// `φ̂(2^{-j} ξ)` for a frequency magnitude `r`.
///
/// Equals 1 at `r = 2^j`, vanishes outside `(2^{j-1}, 2^{j+1})`, and consecutive
/// shells sum to one because each point splits its unit mass between the two
/// shells bracketing `log2 r`.
pub fn shell_weight(r: f64, j: i32) -> f64 {
    if r <= 0.0 {
        return 0.0;
    }
    let (lo, w) = split(r);
    if j == lo {
        w
    } else if j == lo + 1 {
        1.0 - w
    } else {
        0.0
    }
}

#[inline]
fn split(r: f64) -> (i32, f64) {
    let l = r.log2();
    let lo = l.floor();
    (lo as i32, 1.0 - smoothstep(l - lo))
}

/// Per-shell `L^2` norms `‖Δ̇_j u‖_{L²}` for `j` in `[j_min, j_min + values.len())`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShellNorms {
    pub j_min: i32,
    pub values: Vec<f64>,
}

impl ShellNorms {
    pub fn j_max(&self) -> i32 {
        self.j_min + self.values.len() as i32 - 1
    }

    /// Zero outside the stored band.
    pub fn get(&self, j: i32) -> f64 {
        let i = j - self.j_min;
        if i < 0 || i as usize >= self.values.len() {
            0.0
        } else {
            self.values[i as usize]
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (i32, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(i, &v)| (self.j_min + i as i32, v))
    }
}

/// Homogeneous Littlewood-Paley filters on the lattice of a [`Grid`].
///
/// Each nonzero lattice point stores the lower of its two shells and the weight
/// carried there; the upper shell gets the complement.
#[derive(Debug, Clone)]
pub struct DyadicFilterBank {
    grid: Grid,
    j_min: i32,
    j_max: i32,
    lower: Vec<i32>,
    weight: Vec<f64>,
}

impl DyadicFilterBank {
    pub fn new(grid: &Grid) -> Result<Self> {
        let n = grid.len();
        let mut lower = vec![i32::MIN; n];
        let mut weight = vec![0.0; n];
        let mut lo_min = i32::MAX;
        let mut lo_max = i32::MIN;
        grid.for_each_mode(|idx, k| {
            let r = magnitude(grid, k);
            if r > 0.0 {
                let (lo, w) = split(r);
                lower[idx] = lo;
                weight[idx] = w;
                lo_min = lo_min.min(lo);
                lo_max = lo_max.max(lo);
            }
        });
        let j_min = lo_min;
        let j_max = lo_max + 1;
        let count = (j_max - j_min + 1) as usize;
        if count < 3 {
            return Err(Error::TooFewShells(count));
        }
        Ok(DyadicFilterBank {
            grid: grid.clone(),
            j_min,
            j_max,
            lower,
            weight,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn j_range(&self) -> (i32, i32) {
        (self.j_min, self.j_max)
    }

    pub fn shell_count(&self) -> usize {
        (self.j_max - self.j_min + 1) as usize
    }

    /// `φ̂_j` at flat lattice index `idx`.
    #[inline]
    pub fn weight(&self, idx: usize, j: i32) -> f64 {
        let lo = self.lower[idx];
        if j == lo {
            self.weight[idx]
        } else if j == lo + 1 && lo != i32::MIN {
            1.0 - self.weight[idx]
        } else {
            0.0
        }
    }

    /// Lower shell index and its weight at `idx`; `None` for the zero mode.
    #[inline]
    pub fn split_at(&self, idx: usize) -> Option<(i32, f64)> {
        let lo = self.lower[idx];
        (lo != i32::MIN).then(|| (lo, self.weight[idx]))
    }

    /// `Ṡ_j = Σ_{j' ≤ j} Δ̇_{j'}` at `idx`; the zero mode has weight one.
    #[inline]
    pub fn low_pass_weight(&self, idx: usize, j: i32) -> f64 {
        match self.split_at(idx) {
            None => 1.0,
            Some((lo, w)) => {
                if lo + 1 <= j {
                    1.0
                } else if lo == j {
                    w
                } else {
                    0.0
                }
            }
        }
    }

    fn check_shell(&self, j: i32) -> Result<()> {
        if j < self.j_min || j > self.j_max {
            return Err(Error::ShellOutOfRange {
                j,
                j_min: self.j_min,
                j_max: self.j_max,
            });
        }
        Ok(())
    }

    fn check_grid(&self, u: &SpectralField) -> Result<()> {
        if u.grid() != &self.grid {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    /// `Δ̇_j u`.
    pub fn lp_block(&self, u: &SpectralField, j: i32) -> Result<SpectralField> {
        self.check_shell(j)?;
        self.check_grid(u)?;
        Ok(self.multiply(u, |idx| self.weight(idx, j)))
    }

    /// `Ṡ_j u`, including the mean.
    pub fn low_pass(&self, u: &SpectralField, j: i32) -> Result<SpectralField> {
        self.check_grid(u)?;
        Ok(self.multiply(u, |idx| self.low_pass_weight(idx, j)))
    }

    fn multiply(&self, u: &SpectralField, w: impl Fn(usize) -> f64) -> SpectralField {
        let mut out = u.clone();
        let n = self.grid.len();
        for c in 0..u.components() {
            let dst = out.component_mut(c);
            for (idx, z) in dst.iter_mut().enumerate().take(n) {
                *z *= w(idx);
            }
        }
        out
    }

    /// `‖Δ̇_j u‖_{L²}` for every shell in one sweep (vector fields use the Euclidean norm).
    pub fn shell_norms(&self, u: &SpectralField) -> Result<ShellNorms> {
        self.check_grid(u)?;
        let mut energy = vec![0.0; self.shell_count() + 1];
        let n = self.grid.len();
        for c in 0..u.components() {
            let src = u.component(c);
            for idx in 1..n {
                self.accumulate(&mut energy, idx, src[idx]);
            }
        }
        Ok(self.finish(energy))
    }

    /// As [`Self::shell_norms`] but for an arbitrary set of coefficient slices
    /// sharing this grid.
    pub fn shell_norms_of(&self, parts: &[&[Complex64]]) -> ShellNorms {
        let mut energy = vec![0.0; self.shell_count() + 1];
        for src in parts {
            for idx in 1..self.grid.len() {
                self.accumulate(&mut energy, idx, src[idx]);
            }
        }
        self.finish(energy)
    }

    #[inline]
    fn accumulate(&self, energy: &mut [f64], idx: usize, z: Complex64) {
        let lo = self.lower[idx];
        if lo == i32::MIN {
            return;
        }
        let e = z.norm_sqr();
        let w = self.weight[idx];
        let i = (lo - self.j_min) as usize;
        energy[i] += w * w * e;
        energy[i + 1] += (1.0 - w) * (1.0 - w) * e;
    }

    fn finish(&self, mut energy: Vec<f64>) -> ShellNorms {
        energy.truncate(self.shell_count());
        let vol = self.grid.cell_volume();
        ShellNorms {
            j_min: self.j_min,
            values: energy.into_iter().map(|e| (vol * e).sqrt()).collect(),
        }
    }

    /// `max |Σ_j φ̂_j(ξ) − 1|` over nonzero lattice points.
    pub fn partition_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for idx in 1..self.grid.len() {
            let s: f64 = (self.j_min..=self.j_max).map(|j| self.weight(idx, j)).sum();
            worst = worst.max((s - 1.0).abs());
        }
        worst
    }

    /// Shell whose centre `2^j` is closest to `r` in log scale, clamped to the band.
    pub fn shell_nearest(&self, r: f64) -> i32 {
        (r.log2().round() as i32).clamp(self.j_min, self.j_max)
    }
}
