use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::field::{PhysicalField, SpectralField};
use super::grid::Grid;
use crate::error::{Error, Result};

const TILE: usize = 16;
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Unitary multi-dimensional DFT on a [`Grid`].
///
/// Forward uses `exp(-i k x)` and both directions carry `1/sqrt(N)`, so the
/// coefficient energy equals the sample energy and `∂_x ↔ i ξ`.
/// Real fields are transformed two at a time by packing them into the real and
/// imaginary parts of one complex array.
#[derive(Clone)]
pub struct SpectralTransform {
    grid: Grid,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    negated: Vec<u32>,
    norm: f64,
}

impl std::fmt::Debug for SpectralTransform {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralTransform")
            .field("grid", &self.grid)
            .finish()
    }
}

impl SpectralTransform {
    pub fn new(grid: &Grid) -> Self {
        let mut planner = FftPlanner::new();
        let n = grid.points_per_axis();
        let negated = (0..grid.len())
            .map(|i| grid.negated_index(i) as u32)
            .collect();
        SpectralTransform {
            grid: grid.clone(),
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
            negated,
            norm: 1.0 / (grid.len() as f64).sqrt(),
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    fn check(&self, len: usize) -> Result<()> {
        if len != self.grid.len() {
            return Err(Error::ShapeMismatch {
                expected: format!("{}", self.grid.len()),
                actual: format!("{len}"),
            });
        }
        Ok(())
    }

    fn run(&self, data: &mut [Complex64], fft: &dyn Fft<f64>) {
        let n = self.grid.points_per_axis();
        let dim = self.grid.dim();
        let mut scratch = vec![ZERO; fft.get_inplace_scratch_len()];
        fft.process_with_scratch(data, &mut scratch);
        if dim > 1 {
            let mut buf = vec![ZERO; data.len()];
            for axis in 0..dim - 1 {
                let stride = n.pow((dim - 1 - axis) as u32);
                let block = n * stride;
                let buf = &mut buf[..block];
                for chunk in data.chunks_mut(block) {
                    transpose(chunk, buf, n, stride);
                    fft.process_with_scratch(buf, &mut scratch);
                    transpose(buf, chunk, stride, n);
                }
            }
        }
        let s = self.norm;
        for z in data.iter_mut() {
            *z *= s;
        }
    }

    pub fn forward_in_place(&self, data: &mut [Complex64]) -> Result<()> {
        self.check(data.len())?;
        self.run(data, self.forward.as_ref());
        Ok(())
    }

    pub fn inverse_in_place(&self, data: &mut [Complex64]) -> Result<()> {
        self.check(data.len())?;
        self.run(data, self.inverse.as_ref());
        Ok(())
    }

    /// Transforms one real array.
    pub fn forward_real(&self, x: &[f64]) -> Result<Vec<Complex64>> {
        self.check(x.len())?;
        let mut z: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.run(&mut z, self.forward.as_ref());
        Ok(z)
    }

    /// Inverse of one spectrum, keeping the real part.
    pub fn inverse_real(&self, u: &[Complex64]) -> Result<Vec<f64>> {
        self.check(u.len())?;
        let mut z = u.to_vec();
        self.run(&mut z, self.inverse.as_ref());
        Ok(z.into_iter().map(|c| c.re).collect())
    }

    /// Transforms two real arrays with a single complex FFT.
    pub fn forward_real_pair(&self, x: &[f64], y: &[f64]) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
        self.check(x.len())?;
        self.check(y.len())?;
        let mut z: Vec<Complex64> = x
            .iter()
            .zip(y)
            .map(|(&a, &b)| Complex64::new(a, b))
            .collect();
        self.run(&mut z, self.forward.as_ref());
        let mut u = vec![ZERO; z.len()];
        let mut v = vec![ZERO; z.len()];
        for (i, zk) in z.iter().enumerate() {
            let zc = z[self.negated[i] as usize].conj();
            u[i] = (zk + zc) * 0.5;
            let d = (zk - zc) * 0.5;
            v[i] = Complex64::new(d.im, -d.re);
        }
        Ok((u, v))
    }

    /// Inverts two Hermitian spectra with a single complex FFT.
    pub fn inverse_real_pair(&self, u: &[Complex64], v: &[Complex64]) -> Result<(Vec<f64>, Vec<f64>)> {
        self.check(u.len())?;
        self.check(v.len())?;
        let mut z: Vec<Complex64> = u
            .iter()
            .zip(v)
            .map(|(a, b)| Complex64::new(a.re - b.im, a.im + b.re))
            .collect();
        self.run(&mut z, self.inverse.as_ref());
        Ok(z.into_iter().map(|c| (c.re, c.im)).unzip())
    }

    /// Inverts a list of Hermitian spectra, pairing them up.
    pub fn inverse_real_many(&self, spectra: &[&[Complex64]]) -> Result<Vec<Vec<f64>>> {
        let mut out = Vec::with_capacity(spectra.len());
        for pair in spectra.chunks(2) {
            if pair.len() == 2 {
                let (x, y) = self.inverse_real_pair(pair[0], pair[1])?;
                out.push(x);
                out.push(y);
            } else {
                out.push(self.inverse_real(pair[0])?);
            }
        }
        Ok(out)
    }

    /// Transforms a list of real arrays, pairing them up.
    pub fn forward_real_many(&self, arrays: &[&[f64]]) -> Result<Vec<Vec<Complex64>>> {
        let mut out = Vec::with_capacity(arrays.len());
        for pair in arrays.chunks(2) {
            if pair.len() == 2 {
                let (u, v) = self.forward_real_pair(pair[0], pair[1])?;
                out.push(u);
                out.push(v);
            } else {
                out.push(self.forward_real(pair[0])?);
            }
        }
        Ok(out)
    }

    pub fn forward(&self, f: &PhysicalField) -> Result<SpectralField> {
        if f.grid() != &self.grid {
            return Err(Error::GridMismatch);
        }
        let parts: Vec<&[f64]> = (0..f.components()).map(|c| f.component(c)).collect();
        let coeffs = self.forward_real_many(&parts)?.concat();
        SpectralField::from_coeffs(&self.grid, f.components(), coeffs)
    }

    /// Inverse transform; the imaginary residue of non-Hermitian input is dropped.
    pub fn inverse(&self, u: &SpectralField) -> Result<PhysicalField> {
        if u.grid() != &self.grid {
            return Err(Error::GridMismatch);
        }
        let parts: Vec<&[Complex64]> = (0..u.components()).map(|c| u.component(c)).collect();
        let values = self.inverse_real_many(&parts)?.concat();
        PhysicalField::from_values(&self.grid, u.components(), values)
    }
}

/// Writes the `rows x cols` row-major `src` into `dst` as `cols x rows`.
fn transpose(src: &[Complex64], dst: &mut [Complex64], rows: usize, cols: usize) {
    for r0 in (0..rows).step_by(TILE) {
        for c0 in (0..cols).step_by(TILE) {
            for r in r0..(r0 + TILE).min(rows) {
                for c in c0..(c0 + TILE).min(cols) {
                    dst[c * rows + r] = src[r * cols + c];
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    /// Direct O(N^2) DFT used as an oracle.
    fn naive(grid: &Grid, x: &[f64]) -> Vec<Complex64> {
        let n = grid.len();
        let mut out = vec![ZERO; n];
        for (i, o) in out.iter_mut().enumerate() {
            let xi = grid.wavevector(grid.mode(i));
            for (j, &v) in x.iter().enumerate() {
                let p = grid.position(j);
                let phase = -(xi[0] * p[0] + xi[1] * p[1] + xi[2] * p[2]);
                *o += Complex64::from_polar(v, phase);
            }
            *o /= (n as f64).sqrt();
        }
        out
    }

    fn random(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
    }

    #[test]
    fn matches_direct_sum_in_each_dimension() {
        for (dim, n) in [(1, 16), (2, 8), (3, 8)] {
            let g = Grid::new(dim, n, 3.7).unwrap();
            let t = SpectralTransform::new(&g);
            let x = random(g.len(), dim as u64);
            let fast = t.forward_real(&x).unwrap();
            let slow = naive(&g, &x);
            for (a, b) in fast.iter().zip(&slow) {
                assert!((a - b).norm() < 1e-12, "dim {dim}");
            }
        }
    }

    #[test]
    fn round_trip_and_parseval() {
        for (dim, n) in [(1, 64), (2, 32), (3, 16)] {
            let g = Grid::new(dim, n, 2.0).unwrap();
            let t = SpectralTransform::new(&g);
            let x = random(g.len(), 7);
            let y = random(g.len(), 8);
            let (u, v) = t.forward_real_pair(&x, &y).unwrap();
            let (x2, y2) = t.inverse_real_pair(&u, &v).unwrap();
            let scale = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            for i in 0..g.len() {
                assert!((x[i] - x2[i]).abs() < 1e-12 * scale);
                assert!((y[i] - y2[i]).abs() < 1e-12 * scale);
            }
            let ex: f64 = x.iter().map(|v| v * v).sum();
            let eu: f64 = u.iter().map(|z| z.norm_sqr()).sum();
            assert!((ex - eu).abs() < 1e-12 * ex);
        }
    }

    #[test]
    fn paired_transform_matches_single() {
        let g = Grid::new(2, 16, 1.0).unwrap();
        let t = SpectralTransform::new(&g);
        let x = random(g.len(), 1);
        let y = random(g.len(), 2);
        let (u, v) = t.forward_real_pair(&x, &y).unwrap();
        let u1 = t.forward_real(&x).unwrap();
        let v1 = t.forward_real(&y).unwrap();
        for i in 0..g.len() {
            assert!((u[i] - u1[i]).norm() < 1e-13);
            assert!((v[i] - v1[i]).norm() < 1e-13);
        }
    }

    #[test]
    fn constant_lives_in_zero_mode() {
        let g = Grid::new(2, 8, 1.0).unwrap();
        let t = SpectralTransform::new(&g);
        let u = t.forward_real(&vec![1.0; g.len()]).unwrap();
        assert!((u[0].re - (g.len() as f64).sqrt()).abs() < 1e-12);
        assert!(u.iter().skip(1).all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn sine_has_two_conjugate_modes() {
        let l = 5.0;
        let g = Grid::new(1, 32, l).unwrap();
        let t = SpectralTransform::new(&g);
        let x: Vec<f64> = (0..32).map(|i| (2.0 * PI * g.position(i)[0] / l).sin()).collect();
        let u = t.forward_real(&x).unwrap();
        let p = g.index_of([1, 0, 0]);
        let m = g.index_of([-1, 0, 0]);
        for (i, z) in u.iter().enumerate() {
            if i != p && i != m {
                assert!(z.norm() < 1e-12);
            }
        }
        assert!((u[p] - u[m].conj()).norm() < 1e-12);
        assert!((u[p].im + 32f64.sqrt() / 2.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_wrong_length() {
        let g = Grid::new(1, 8, 1.0).unwrap();
        let t = SpectralTransform::new(&g);
        assert!(t.forward_real(&[0.0; 7]).is_err());
    }
}
