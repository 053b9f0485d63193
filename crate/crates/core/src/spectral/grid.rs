use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Periodic box `[0, L)^d` sampled with `n` points per axis.
///
/// Storage is row-major with the last axis fastest. Integer wavenumbers use
/// the FFT ordering `0, 1, .., n/2 - 1, -n/2, .., -1`; the physical wavenumber
/// of integer index `k` is `2πk / L`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridSpec", into = "GridSpec")]
pub struct Grid {
    dim: usize,
    n: usize,
    box_length: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridSpec {
    pub dim: usize,
    pub n: usize,
    pub box_length: f64,
}

impl TryFrom<GridSpec> for Grid {
    type Error = Error;
    fn try_from(spec: GridSpec) -> Result<Self> {
        Grid::new(spec.dim, spec.n, spec.box_length)
    }
}

impl From<Grid> for GridSpec {
    fn from(g: Grid) -> Self {
        GridSpec {
            dim: g.dim,
            n: g.n,
            box_length: g.box_length,
        }
    }
}

impl Grid {
    pub fn new(dim: usize, n: usize, box_length: f64) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::InvalidGrid(format!("dimension {dim} outside 1..=3")));
        }
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "points per axis must be a power of two >= 8, got {n}"
            )));
        }
        if !(box_length > 0.0 && box_length.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "box length must be positive, got {box_length}"
            )));
        }
        Ok(Grid { dim, n, box_length })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points_per_axis(&self) -> usize {
        self.n
    }

    pub fn box_length(&self) -> f64 {
        self.box_length
    }

    /// Total number of lattice points, `n^d`.
    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        self.box_length / self.n as f64
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    pub fn volume(&self) -> f64 {
        self.box_length.powi(self.dim as i32)
    }

    /// `2π / L`, the smallest nonzero wavenumber magnitude.
    pub fn base_wavenumber(&self) -> f64 {
        2.0 * PI / self.box_length
    }

    /// Largest wavenumber component magnitude, `2π (n/2) / L`.
    pub fn nyquist(&self) -> f64 {
        self.base_wavenumber() * (self.n / 2) as f64
    }

    pub fn max_wavenumber_magnitude(&self) -> f64 {
        self.nyquist() * (self.dim as f64).sqrt()
    }

    #[inline]
    pub fn signed_index(&self, i: usize) -> i64 {
        if i < self.n / 2 {
            i as i64
        } else {
            i as i64 - self.n as i64
        }
    }

    /// Physical wavenumbers along one axis in FFT order.
    pub fn axis_wavenumbers(&self) -> Vec<f64> {
        let k0 = self.base_wavenumber();
        (0..self.n).map(|i| k0 * self.signed_index(i) as f64).collect()
    }

    /// Integer wavevector of flat index `idx` (unused axes are zero).
    pub fn mode(&self, idx: usize) -> [i64; 3] {
        let mut k = [0i64; 3];
        let mut rest = idx;
        for axis in (0..self.dim).rev() {
            k[axis] = self.signed_index(rest % self.n);
            rest /= self.n;
        }
        k
    }

    /// Flat index of the integer wavevector `k` (taken modulo `n`).
    pub fn index_of(&self, k: [i64; 3]) -> usize {
        let n = self.n as i64;
        let mut idx = 0usize;
        for &ka in k.iter().take(self.dim) {
            idx = idx * self.n + ka.rem_euclid(n) as usize;
        }
        idx
    }

    /// Index of `-k`, with the lattice treated modulo `n` so negation is closed.
    pub fn negated_index(&self, idx: usize) -> usize {
        let k = self.mode(idx);
        self.index_of([-k[0], -k[1], -k[2]])
    }

    pub fn wavevector(&self, k: [i64; 3]) -> [f64; 3] {
        let k0 = self.base_wavenumber();
        [k0 * k[0] as f64, k0 * k[1] as f64, k0 * k[2] as f64]
    }

    /// Wavevector used by odd-order derivatives: the Nyquist component of each
    /// axis is dropped so that derivatives of real fields stay real.
    #[inline]
    pub fn derivative_wavevector(&self, k: [i64; 3]) -> [f64; 3] {
        let k0 = self.base_wavenumber();
        let half = (self.n / 2) as i64;
        let mut xi = [0.0; 3];
        for a in 0..self.dim {
            if k[a] != -half {
                xi[a] = k0 * k[a] as f64;
            }
        }
        xi
    }

    /// Whether any component of `k` sits on the self-conjugate Nyquist plane.
    #[inline]
    pub fn touches_nyquist(&self, k: [i64; 3]) -> bool {
        let half = (self.n / 2) as i64;
        k.iter().take(self.dim).any(|&ka| ka == -half)
    }

    /// Squared integer norm `|k|^2`; the physical `|ξ|^2` is this times `(2π/L)^2`.
    #[inline]
    pub fn integer_norm_sq(k: [i64; 3]) -> u64 {
        (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as u64
    }

    /// Visits every lattice point in storage order with its integer wavevector.
    #[inline]
    pub fn for_each_mode(&self, mut f: impl FnMut(usize, [i64; 3])) {
        let n = self.n;
        match self.dim {
            1 => {
                for i in 0..n {
                    f(i, [self.signed_index(i), 0, 0]);
                }
            }
            2 => {
                let mut idx = 0;
                for i in 0..n {
                    let ki = self.signed_index(i);
                    for j in 0..n {
                        f(idx, [ki, self.signed_index(j), 0]);
                        idx += 1;
                    }
                }
            }
            _ => {
                let mut idx = 0;
                for i in 0..n {
                    let ki = self.signed_index(i);
                    for j in 0..n {
                        let kj = self.signed_index(j);
                        for l in 0..n {
                            f(idx, [ki, kj, self.signed_index(l)]);
                            idx += 1;
                        }
                    }
                }
            }
        }
    }

    /// Whether the mode survives the two-thirds dealiasing rule (`|k_i| < n/3` on every axis).
    #[inline]
    pub fn is_resolved(&self, k: [i64; 3]) -> bool {
        let cut = self.n as i64;
        k.iter().take(self.dim).all(|&ka| 3 * ka.abs() < cut)
    }

    /// Physical coordinates of flat index `idx`.
    pub fn position(&self, idx: usize) -> [f64; 3] {
        let h = self.spacing();
        let mut x = [0.0; 3];
        let mut rest = idx;
        for axis in (0..self.dim).rev() {
            x[axis] = h * (rest % self.n) as f64;
            rest /= self.n;
        }
        x
    }

    /// Same lattice on a box scaled by `factor`.
    pub fn rescaled(&self, factor: f64) -> Result<Grid> {
        Grid::new(self.dim, self.n, self.box_length * factor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_spacing_lattice_when_box_is_two_pi() {
        let g = Grid::new(1, 8, 2.0 * PI).unwrap();
        let mut ks: Vec<i64> = g
            .axis_wavenumbers()
            .iter()
            .map(|k| k.round() as i64)
            .collect();
        ks.sort();
        assert_eq!(ks, vec![-4, -3, -2, -1, 0, 1, 2, 3]);
        for (k, i) in g.axis_wavenumbers().iter().zip(0..) {
            assert!((k - g.signed_index(i) as f64).abs() < 1e-14);
        }
    }

    #[test]
    fn largest_component_is_nyquist() {
        let g = Grid::new(2, 16, 1.0).unwrap();
        let max = g
            .axis_wavenumbers()
            .iter()
            .fold(0.0f64, |m, k| m.max(k.abs()));
        assert!((max - 2.0 * PI * 8.0).abs() < 1e-12);
    }

    #[test]
    fn smallest_nonzero_wavenumber() {
        let g = Grid::new(3, 64, 100.0).unwrap();
        let mut min = f64::INFINITY;
        g.for_each_mode(|_, k| {
            let xi = g.wavevector(k);
            let m = (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]).sqrt();
            if m > 0.0 {
                min = min.min(m);
            }
        });
        assert!((min - 2.0 * PI / 100.0).abs() < 1e-15);
        assert!((min - 0.0628).abs() < 1e-4);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(Grid::new(0, 8, 1.0).is_err());
        assert!(Grid::new(4, 8, 1.0).is_err());
        assert!(Grid::new(2, 12, 1.0).is_err());
        assert!(Grid::new(2, 4, 1.0).is_err());
        assert!(Grid::new(2, 8, 0.0).is_err());
        assert!(Grid::new(2, 8, -1.0).is_err());
    }

    #[test]
    fn only_the_origin_has_zero_magnitude() {
        let g = Grid::new(2, 8, 3.0).unwrap();
        let mut zeros = 0;
        g.for_each_mode(|idx, k| {
            if Grid::integer_norm_sq(k) == 0 {
                zeros += 1;
                assert_eq!(idx, 0);
            }
        });
        assert_eq!(zeros, 1);
    }

    #[test]
    fn negation_is_an_involution() {
        let g = Grid::new(3, 8, 1.0).unwrap();
        for idx in 0..g.len() {
            assert_eq!(g.negated_index(g.negated_index(idx)), idx);
            assert_eq!(g.index_of(g.mode(idx)), idx);
        }
    }
}
