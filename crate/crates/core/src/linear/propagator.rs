use num_complex::Complex64;

use super::mat2::{phi, Mat2};
use super::params::FluidParams;
use super::symbol::symbol_matrix;
use crate::error::{Error, Result};
use crate::spectral::{Grid, SpectralField};

/// Matrix functions of `hK` that a propagator can tabulate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PropagatorOp {
    /// `e^{hK}`
    Exp,
    /// `φ₁(hK)`
    Phi1,
    /// `φ₂(hK)`
    Phi2,
    /// `φ₃(hK)`
    Phi3,
    /// `e^{hK/2}`
    HalfExp,
    /// `φ₁(hK/2)`
    HalfPhi1,
}

impl PropagatorOp {
    fn order_and_fraction(self) -> (u32, f64) {
        match self {
            PropagatorOp::Exp => (0, 1.0),
            PropagatorOp::Phi1 => (1, 1.0),
            PropagatorOp::Phi2 => (2, 1.0),
            PropagatorOp::Phi3 => (3, 1.0),
            PropagatorOp::HalfExp => (0, 0.5),
            PropagatorOp::HalfPhi1 => (1, 0.5),
        }
    }

    /// Value of the scalar function at the origin.
    fn at_zero(self) -> f64 {
        match self {
            PropagatorOp::Exp | PropagatorOp::HalfExp => 1.0,
            PropagatorOp::Phi1 | PropagatorOp::HalfPhi1 => 1.0,
            PropagatorOp::Phi2 => 0.5,
            PropagatorOp::Phi3 => 1.0 / 6.0,
        }
    }
}

const NO_SLOT: u32 = u32::MAX;

/// Tabulated functions of the linear operator `K` acting on `(a, m)`, cached by
/// the integer squared wavenumber `|k|²`.
///
/// Each mode is split into `(â, v̂)` and `ŵ`; the pair evolves under the
/// symbol matrix and `ŵ` under the heat factor with viscosity `μ̄`. Modes with
/// a Nyquist component carry no well-defined direction for odd derivatives, so
/// there `a` is frozen and `m` diffuses as a whole.
#[derive(Debug, Clone)]
pub struct LinearPropagator {
    grid: Grid,
    params: FluidParams,
    h: f64,
    ops: Vec<PropagatorOp>,
    slot_of_key: Vec<u32>,
    mats: Vec<Mat2>,
    heat: Vec<f64>,
}

impl LinearPropagator {
    pub fn new(grid: &Grid, params: &FluidParams, h: f64, ops: &[PropagatorOp]) -> Result<Self> {
        if !(h >= 0.0) || !h.is_finite() {
            return Err(Error::InvalidArgument(format!("propagation time {h} must be finite and >= 0")));
        }
        let mut present = Vec::new();
        grid.for_each_mode(|_, k| {
            let key = Grid::integer_norm_sq(k) as usize;
            if key >= present.len() {
                present.resize(key + 1, false);
            }
            present[key] = true;
        });
        let mut slot_of_key = vec![NO_SLOT; present.len()];
        let mut keys = Vec::new();
        for (key, &p) in present.iter().enumerate() {
            if p {
                slot_of_key[key] = keys.len() as u32;
                keys.push(key);
            }
        }
        let k0 = grid.base_wavenumber();
        let mut mats = Vec::with_capacity(keys.len() * ops.len());
        let mut heat = Vec::with_capacity(keys.len() * ops.len());
        for &key in &keys {
            let xi = k0 * (key as f64).sqrt();
            let symbol = symbol_matrix(params, xi);
            let z_heat = -params.mu_bar() * xi * xi;
            for op in ops {
                let (order, frac) = op.order_and_fraction();
                let m = symbol.scale(frac * h);
                mats.push(m.function(|z| phi(order, z)));
                heat.push(phi(order, Complex64::new(frac * h * z_heat, 0.0)).re);
            }
        }
        Ok(LinearPropagator {
            grid: grid.clone(),
            params: *params,
            h,
            ops: ops.to_vec(),
            slot_of_key,
            mats,
            heat,
        })
    }

    /// Exact flow map `e^{tK}`.
    pub fn exponential(grid: &Grid, params: &FluidParams, t: f64) -> Result<Self> {
        LinearPropagator::new(grid, params, t, &[PropagatorOp::Exp])
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn params(&self) -> &FluidParams {
        &self.params
    }

    pub fn step(&self) -> f64 {
        self.h
    }

    fn op_index(&self, op: PropagatorOp) -> Result<usize> {
        self.ops
            .iter()
            .position(|&o| o == op)
            .ok_or_else(|| Error::InvalidArgument(format!("{op:?} was not tabulated")))
    }

    /// `out += scale · f(hK)(a, m)` on raw coefficient slices.
    #[allow(clippy::too_many_arguments)]
    pub fn apply_slices(
        &self,
        op: PropagatorOp,
        a: &[Complex64],
        m: &[Complex64],
        scale: f64,
        out_a: &mut [Complex64],
        out_m: &mut [Complex64],
    ) -> Result<()> {
        let n = self.grid.len();
        let d = self.grid.dim();
        if a.len() != n || out_a.len() != n || m.len() != d * n || out_m.len() != d * n {
            return Err(Error::ShapeMismatch {
                expected: format!("a: {n}, m: {}", d * n),
                actual: format!("a: {}/{}, m: {}/{}", a.len(), out_a.len(), m.len(), out_m.len()),
            });
        }
        let oi = self.op_index(op)?;
        let nops = self.ops.len();
        let zero_val = op.at_zero();
        let i = Complex64::new(0.0, 1.0);
        self.grid.for_each_mode(|idx, k| {
            let key = Grid::integer_norm_sq(k) as usize;
            let slot = self.slot_of_key[key] as usize * nops + oi;
            let hs = self.heat[slot];
            if key == 0 || self.grid.touches_nyquist(k) {
                out_a[idx] += a[idx] * (scale * zero_val);
                for c in 0..d {
                    out_m[c * n + idx] += m[c * n + idx] * (scale * hs);
                }
                return;
            }
            let inv = 1.0 / (key as f64).sqrt();
            let dir = [k[0] as f64 * inv, k[1] as f64 * inv, k[2] as f64 * inv];
            let mut proj = Complex64::new(0.0, 0.0);
            for c in 0..d {
                proj += m[c * n + idx] * dir[c];
            }
            let (a_new, v_new) = self.mats[slot].apply(a[idx], i * proj);
            out_a[idx] += a_new * scale;
            for c in 0..d {
                let w = m[c * n + idx] - proj * dir[c];
                out_m[c * n + idx] += (w * hs - i * v_new * dir[c]) * scale;
            }
        });
        Ok(())
    }

    /// `out += scale · f(hK)(a, m)`.
    pub fn apply_into(
        &self,
        op: PropagatorOp,
        a: &SpectralField,
        m: &SpectralField,
        scale: f64,
        out_a: &mut SpectralField,
        out_m: &mut SpectralField,
    ) -> Result<()> {
        for f in [a, m, &*out_a, &*out_m] {
            if f.grid() != &self.grid {
                return Err(Error::GridMismatch);
            }
        }
        self.apply_slices(op, a.coeffs(), m.coeffs(), scale, out_a.coeffs_mut(), out_m.coeffs_mut())
    }

    pub fn apply(
        &self,
        op: PropagatorOp,
        a: &SpectralField,
        m: &SpectralField,
    ) -> Result<(SpectralField, SpectralField)> {
        let mut oa = SpectralField::zeros(&self.grid, 1);
        let mut om = SpectralField::zeros(&self.grid, self.grid.dim());
        self.apply_into(op, a, m, 1.0, &mut oa, &mut om)?;
        Ok((oa, om))
    }
}

fn check_state(a: &SpectralField, m: &SpectralField) -> Result<()> {
    if a.grid() != m.grid() {
        return Err(Error::GridMismatch);
    }
    if a.components() != 1 || m.components() != a.grid().dim() {
        return Err(Error::ShapeMismatch {
            expected: format!("a scalar and m with {} components", a.grid().dim()),
            actual: format!("{} and {}", a.components(), m.components()),
        });
    }
    Ok(())
}

/// Advances `(a, m)` by the exact linear flow over time `t ≥ 0`.
pub fn propagate_linear(
    a: &SpectralField,
    m: &SpectralField,
    params: &FluidParams,
    t: f64,
) -> Result<(SpectralField, SpectralField)> {
    check_state(a, m)?;
    if t < 0.0 {
        return Err(Error::InvalidArgument(format!("negative propagation time {t}")));
    }
    LinearPropagator::exponential(a.grid(), params, t)?.apply(PropagatorOp::Exp, a, m)
}

/// Duhamel solver for `y′ = Ky + F(t)` on uniformly sampled forcing, treating
/// `F` as piecewise linear between samples and integrating that exactly:
/// `y_{n+1} = e^{hK}y_n + hφ₁(hK)F_n + hφ₂(hK)(F_{n+1} − F_n)`.
#[derive(Debug, Clone)]
pub struct Duhamel {
    prop: LinearPropagator,
}

impl Duhamel {
    pub fn new(grid: &Grid, params: &FluidParams, h: f64) -> Result<Self> {
        let ops = [PropagatorOp::Exp, PropagatorOp::Phi1, PropagatorOp::Phi2];
        Ok(Duhamel {
            prop: LinearPropagator::new(grid, params, h, &ops)?,
        })
    }

    pub fn propagator(&self) -> &LinearPropagator {
        &self.prop
    }

    /// One interval; `f0 = (f_a, f_m)` at the left end and `f1` at the right.
    pub fn step(
        &self,
        y: (&SpectralField, &SpectralField),
        f0: (&SpectralField, &SpectralField),
        f1: (&SpectralField, &SpectralField),
    ) -> Result<(SpectralField, SpectralField)> {
        let h = self.prop.step();
        let (mut a, mut m) = self.prop.apply(PropagatorOp::Exp, y.0, y.1)?;
        self.prop.apply_into(PropagatorOp::Phi1, f0.0, f0.1, h, &mut a, &mut m)?;
        let da = f1.0.sub(f0.0)?;
        let dm = f1.1.sub(f0.1)?;
        self.prop.apply_into(PropagatorOp::Phi2, &da, &dm, h, &mut a, &mut m)?;
        Ok((a, m))
    }

    /// Trajectory at every forcing sample, starting from `y0`.
    pub fn solve(
        &self,
        y0: (&SpectralField, &SpectralField),
        forcing: &[(SpectralField, SpectralField)],
    ) -> Result<Vec<(SpectralField, SpectralField)>> {
        let mut out = vec![(y0.0.clone(), y0.1.clone())];
        for w in forcing.windows(2) {
            let last = out.last().expect("non-empty");
            let next = self.step((&last.0, &last.1), (&w[0].0, &w[0].1), (&w[1].0, &w[1].1))?;
            out.push(next);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::ops::{divergence, gradient, project};
    use crate::spectral::{PhysicalField, SpectralTransform};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_state(g: &Grid, seed: u64) -> (SpectralField, SpectralField) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = SpectralTransform::new(g);
        let a = PhysicalField::from_fn(g, 1, |_, _| rng.random_range(-1.0..1.0));
        let m = PhysicalField::from_fn(g, g.dim(), |_, _| rng.random_range(-1.0..1.0));
        let mut a = t.forward(&a).unwrap();
        let mut m = t.forward(&m).unwrap();
        crate::spectral::ops::dealias(&mut a);
        crate::spectral::ops::dealias(&mut m);
        (a, m)
    }

    fn params() -> FluidParams {
        FluidParams::new(1.2, 0.7, 0.1, 0.9, 0.5).unwrap()
    }

    #[test]
    fn identity_at_zero_time() {
        let g = Grid::new(2, 16, 10.0).unwrap();
        let (a, m) = random_state(&g, 1);
        let (a1, m1) = propagate_linear(&a, &m, &params(), 0.0).unwrap();
        assert!(a1.relative_distance(&a).unwrap() < 1e-15);
        assert!(m1.relative_distance(&m).unwrap() < 1e-15);
        assert!(propagate_linear(&a, &m, &params(), -1.0).is_err());
    }

    #[test]
    fn semigroup_property() {
        let g = Grid::new(2, 32, 12.0).unwrap();
        let (a, m) = random_state(&g, 2);
        let p = params();
        let (a1, m1) = propagate_linear(&a, &m, &p, 0.3).unwrap();
        let (a2, m2) = propagate_linear(&a1, &m1, &p, 0.45).unwrap();
        let (a3, m3) = propagate_linear(&a, &m, &p, 0.75).unwrap();
        assert!(a2.relative_distance(&a3).unwrap() < 1e-10);
        assert!(m2.relative_distance(&m3).unwrap() < 1e-10);
    }

    #[test]
    fn incompressible_data_follows_heat() {
        let g = Grid::new(2, 16, 8.0).unwrap();
        let (_, m) = random_state(&g, 3);
        let (w, _) = project(&m).unwrap();
        let mut w = w;
        w.remove_mean();
        let a = SpectralField::zeros(&g, 1);
        let p = params();
        let t = 0.4;
        let (a1, w1) = propagate_linear(&a, &w, &p, t).unwrap();
        assert!(a1.max_abs_coeff() < 1e-14);
        let expect = crate::spectral::ops::apply_radial(&w, |r| (-p.mu_bar() * r * r * t).exp());
        assert!(w1.relative_distance(&expect).unwrap() < 1e-13);
    }

    /// Classical RK4 applied directly to the linear PDE in Fourier space.
    fn rk4_oracle(a: &SpectralField, m: &SpectralField, p: &FluidParams, t: f64, steps: usize) -> (SpectralField, SpectralField) {
        let rhs = |a: &SpectralField, m: &SpectralField| {
            let da = divergence(m).unwrap().scaled(-1.0);
            let lap_m = crate::spectral::ops::laplacian(m);
            let grad_div = gradient(&divergence(m).unwrap()).unwrap();
            let mut dm = lap_m.scaled(p.mu() / p.rho_star());
            dm.axpy((p.mu() + p.lambda()) / p.rho_star(), &grad_div).unwrap();
            let grad_lap = gradient(&crate::spectral::ops::laplacian(a)).unwrap();
            dm.axpy(p.kappa() * p.rho_star(), &grad_lap).unwrap();
            dm.axpy(-p.gamma(), &gradient(a).unwrap()).unwrap();
            (da, dm)
        };
        let h = t / steps as f64;
        let (mut a, mut m) = (a.clone(), m.clone());
        for _ in 0..steps {
            let k1 = rhs(&a, &m);
            let s = |x: &SpectralField, k: &SpectralField, c: f64| {
                let mut y = x.clone();
                y.axpy(c, k).unwrap();
                y
            };
            let k2 = rhs(&s(&a, &k1.0, h / 2.0), &s(&m, &k1.1, h / 2.0));
            let k3 = rhs(&s(&a, &k2.0, h / 2.0), &s(&m, &k2.1, h / 2.0));
            let k4 = rhs(&s(&a, &k3.0, h), &s(&m, &k3.1, h));
            for (y, ks) in [(&mut a, [&k1.0, &k2.0, &k3.0, &k4.0]), (&mut m, [&k1.1, &k2.1, &k3.1, &k4.1])] {
                y.axpy(h / 6.0, ks[0]).unwrap();
                y.axpy(h / 3.0, ks[1]).unwrap();
                y.axpy(h / 3.0, ks[2]).unwrap();
                y.axpy(h / 6.0, ks[3]).unwrap();
            }
        }
        (a, m)
    }

    #[test]
    fn matches_direct_integration_of_the_pde() {
        let g = Grid::new(2, 16, 20.0).unwrap();
        let (a, m) = random_state(&g, 4);
        // double-root parameters: ν² = 4κρ*³
        for p in [params(), FluidParams::new(1.0, 1.0, 0.0, 1.0, 0.0).unwrap()] {
            let (ae, me) = propagate_linear(&a, &m, &p, 0.5).unwrap();
            let (ar, mr) = rk4_oracle(&a, &m, &p, 0.5, 4000);
            assert!(ae.relative_distance(&ar).unwrap() < 1e-8);
            assert!(me.relative_distance(&mr).unwrap() < 1e-8);
        }
    }

    #[test]
    fn duhamel_reproduces_linear_in_time_forcing() {
        let g = Grid::new(1, 16, 6.0).unwrap();
        let p = params();
        let (a0, m0) = random_state(&g, 5);
        let (fa, fm) = random_state(&g, 6);
        // forcing F(t) = t·F̄ is linear, so one interval is exact
        let h = 0.8;
        let duh = Duhamel::new(&g, &p, h).unwrap();
        let zero = (SpectralField::zeros(&g, 1), SpectralField::zeros(&g, 1));
        let one = (fa.scaled(h), fm.scaled(h));
        let (a1, m1) = duh.step((&a0, &m0), (&zero.0, &zero.1), (&one.0, &one.1)).unwrap();
        let fine = Duhamel::new(&g, &p, h / 64.0).unwrap();
        let forcing: Vec<_> = (0..=64)
            .map(|i| {
                let t = h * i as f64 / 64.0;
                (fa.scaled(t), fm.scaled(t))
            })
            .collect();
        let traj = fine.solve((&a0, &m0), &forcing).unwrap();
        let (a2, m2) = traj.last().unwrap();
        assert!(a1.relative_distance(a2).unwrap() < 1e-12);
        assert!(m1.relative_distance(m2).unwrap() < 1e-12);
    }
}
