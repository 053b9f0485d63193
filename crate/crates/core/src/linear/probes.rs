use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::mat2::phi;
use super::params::FluidParams;
use super::propagator::{Duhamel, LinearPropagator, PropagatorOp};
use crate::decay::fit::{fit_decay_exponent, DecayFit};
use crate::error::{Error, Result};
use crate::littlewood_paley::{chemin_lerner_from_shells, DyadicFilterBank, ShellNorms, Summability};
use crate::spectral::ops::magnitude;
use crate::spectral::{Grid, SpectralField};

/// Coefficients of `Λ^lift((γ+Λ)a, m)`, one scalar block per component.
pub fn weighted_parts(a: &SpectralField, m: &SpectralField, gamma: f64, lift: f64) -> Vec<Vec<Complex64>> {
    let grid = a.grid();
    let n = grid.len();
    let d = m.components();
    let mut parts = vec![vec![Complex64::new(0.0, 0.0); n]; 1 + d];
    grid.for_each_mode(|idx, k| {
        let r = magnitude(grid, k);
        let w = if lift == 0.0 {
            1.0
        } else if r == 0.0 {
            0.0
        } else {
            r.powf(lift)
        };
        parts[0][idx] = a.component(0)[idx] * ((gamma + r) * w);
        for c in 0..d {
            parts[1 + c][idx] = m.component(c)[idx] * w;
        }
    });
    parts
}

/// Shell norms of `Λ^lift((γ+Λ)a, m)`.
pub fn state_shells(
    bank: &DyadicFilterBank,
    a: &SpectralField,
    m: &SpectralField,
    gamma: f64,
    lift: f64,
) -> ShellNorms {
    let parts = weighted_parts(a, m, gamma, lift);
    let refs: Vec<&[Complex64]> = parts.iter().map(|p| p.as_slice()).collect();
    bank.shell_norms_of(&refs)
}

/// `‖((γ+Λ)a, m)‖_{Ḃ^s_{2,σ}}`.
pub fn state_besov(
    bank: &DyadicFilterBank,
    a: &SpectralField,
    m: &SpectralField,
    gamma: f64,
    s: f64,
    sigma: Summability,
) -> f64 {
    let shells = state_shells(bank, a, m, gamma, 0.0);
    sigma.sum(shells.iter().map(|(j, v)| 2f64.powf(j as f64 * s) * v))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SemigroupDecayProbe {
    pub s1: f64,
    pub s2: f64,
    pub times: Vec<f64>,
    pub norms: Vec<f64>,
    pub fit: DecayFit,
}

impl SemigroupDecayProbe {
    /// Fitted slope is at most `−(s1 − s2)/2 + 0.1`.
    pub fn passes(&self) -> bool {
        self.fit.at_least_as_fast()
    }
}

/// Propagates `(a₀, m₀)` by the exact semigroup to each requested time and
/// fits the decay of `‖e^{tK}((γ+Λ)a₀, m₀)‖_{Ḃ^{s1}_{2,1}}` over `window`.
pub fn semigroup_decay_probe(
    p: &FluidParams,
    a0: &SpectralField,
    m0: &SpectralField,
    s1: f64,
    s2: f64,
    times: &[f64],
    window: (f64, f64),
) -> Result<SemigroupDecayProbe> {
    if s1 < s2 {
        return Err(Error::InvalidArgument(format!("semigroup probe needs s1 >= s2 (got {s1} < {s2})")));
    }
    let bank = DyadicFilterBank::new(a0.grid())?;
    let mut norms = Vec::with_capacity(times.len());
    for &t in times {
        let prop = LinearPropagator::exponential(a0.grid(), p, t)?;
        let (a, m) = prop.apply(PropagatorOp::Exp, a0, m0)?;
        norms.push(state_besov(&bank, &a, &m, p.gamma(), s1, Summability::One));
    }
    let series: Vec<(f64, f64)> = times.iter().copied().zip(norms.iter().copied()).collect();
    let fit = fit_decay_exponent(&series, window)?.with_theory(-(s1 - s2) / 2.0, 0.1);
    Ok(SemigroupDecayProbe {
        s1,
        s2,
        times: times.to_vec(),
        norms,
        fit,
    })
}

/// Forcing `(f, g)` of the linear system sampled on a uniform time grid.
#[derive(Debug, Clone)]
pub struct SampledForcing {
    pub times: Vec<f64>,
    pub f: Vec<SpectralField>,
    pub g: Vec<SpectralField>,
}

impl SampledForcing {
    pub fn zero(grid: &Grid, times: Vec<f64>) -> Self {
        let f = vec![SpectralField::zeros(grid, 1); times.len()];
        let g = vec![SpectralField::zeros(grid, grid.dim()); times.len()];
        SampledForcing { times, f, g }
    }

    /// The uniform spacing, after checking shapes.
    pub fn step(&self) -> Result<f64> {
        let n = self.times.len();
        if n < 2 || self.f.len() != n || self.g.len() != n {
            return Err(Error::InvalidArgument(format!(
                "forcing needs at least two samples and matching lengths ({} times, {} f, {} g)",
                n,
                self.f.len(),
                self.g.len()
            )));
        }
        let h = self.times[1] - self.times[0];
        if !(h > 0.0) {
            return Err(Error::InvalidArgument("forcing times must increase".into()));
        }
        for w in self.times.windows(2) {
            if ((w[1] - w[0]) - h).abs() > 1e-9 * h.max(w[1].abs()) {
                return Err(Error::InvalidArgument("forcing must be sampled uniformly in time".into()));
            }
        }
        Ok(h)
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MaxRegReport {
    pub gamma: f64,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs / rhs`, zero when both sides vanish.
    pub ratio: f64,
}

/// Solves the forced linear system by the exact propagator and Duhamel's
/// formula and evaluates both sides of the maximal-regularity inequality in
/// `Ḃ^s_{2,1}` with Chemin–Lerner time norms.
pub fn maximal_regularity_probe(
    p: &FluidParams,
    a0: &SpectralField,
    m0: &SpectralField,
    forcing: &SampledForcing,
    s: f64,
) -> Result<MaxRegReport> {
    let h = forcing.step()?;
    let grid = a0.grid();
    let bank = DyadicFilterBank::new(grid)?;
    let duh = Duhamel::new(grid, p, h)?;
    let samples: Vec<(SpectralField, SpectralField)> = forcing
        .f
        .iter()
        .cloned()
        .zip(forcing.g.iter().cloned())
        .collect();
    let traj = duh.solve((a0, m0), &samples)?;
    let gamma = p.gamma();
    let shells: Vec<ShellNorms> = traj.iter().map(|(a, m)| state_shells(&bank, a, m, gamma, 0.0)).collect();
    let lifted: Vec<ShellNorms> = traj.iter().map(|(a, m)| state_shells(&bank, a, m, gamma, 2.0)).collect();
    let forcing_shells: Vec<ShellNorms> = samples
        .iter()
        .map(|(f, g)| state_shells(&bank, f, g, gamma, 0.0))
        .collect();
    let t = &forcing.times;
    let lhs = chemin_lerner_from_shells(t, &shells, f64::INFINITY, s)?
        + chemin_lerner_from_shells(t, &lifted, 1.0, s)?;
    let rhs = state_besov(&bank, a0, m0, gamma, s, Summability::One)
        + chemin_lerner_from_shells(t, &forcing_shells, 1.0, s)?;
    let ratio = if rhs == 0.0 { 0.0 } else { lhs / rhs };
    Ok(MaxRegReport { gamma, lhs, rhs, ratio })
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct HeatLemmaReport {
    pub nu: f64,
    /// Ratio of the two sides for `q = ∞`, `r = 1`.
    pub ratio_q_inf: f64,
    /// Ratio of the two sides for `q = 1`, `r = 1`.
    pub ratio_q_one: f64,
}

/// Heat equation `∂t w − νΔw = f` solved exactly per mode with piecewise-linear
/// forcing, then both sides of the parabolic Besov estimate with `r = 1`.
pub fn heat_lemma_probe(
    nu: f64,
    w0: &SpectralField,
    forcing: &[SpectralField],
    times: &[f64],
    s: f64,
) -> Result<HeatLemmaReport> {
    if !(nu > 0.0) {
        return Err(Error::InvalidArgument(format!("viscosity {nu} must be positive")));
    }
    if forcing.len() != times.len() || times.len() < 2 {
        return Err(Error::InvalidArgument("forcing and times must match with at least two samples".into()));
    }
    let grid = w0.grid().clone();
    let h = times[1] - times[0];
    let bank = DyadicFilterBank::new(&grid)?;
    let mut e = vec![0.0; grid.len()];
    let mut p1 = vec![0.0; grid.len()];
    let mut p2 = vec![0.0; grid.len()];
    grid.for_each_mode(|idx, k| {
        let r = magnitude(&grid, k);
        let z = Complex64::new(-nu * r * r * h, 0.0);
        e[idx] = z.exp().re;
        p1[idx] = phi(1, z).re;
        p2[idx] = phi(2, z).re;
    });
    let comps = w0.components();
    let n = grid.len();
    let mut w = w0.clone();
    let mut traj = vec![w.clone()];
    for i in 0..times.len() - 1 {
        let (f0, f1) = (&forcing[i], &forcing[i + 1]);
        let mut next = SpectralField::zeros(&grid, comps);
        for c in 0..comps {
            for idx in 0..n {
                let j = c * n + idx;
                let a = f0.coeffs()[j];
                let b = f1.coeffs()[j];
                next.coeffs_mut()[j] = w.coeffs()[j] * e[idx] + a * (h * p1[idx]) + (b - a) * (h * p2[idx]);
            }
        }
        w = next;
        traj.push(w.clone());
    }
    let shells: Vec<ShellNorms> = traj.iter().map(|u| bank.shell_norms(u)).collect::<Result<_>>()?;
    let f_shells: Vec<ShellNorms> = forcing.iter().map(|u| bank.shell_norms(u)).collect::<Result<_>>()?;
    let w0_norm = bank.besov_norm(w0, s, Summability::One)?.value;
    let rhs = w0_norm + chemin_lerner_from_shells(times, &f_shells, 1.0, s)?;
    let ratio = |lhs: f64| if rhs == 0.0 { 0.0 } else { lhs / rhs };
    let q_inf = chemin_lerner_from_shells(times, &shells, f64::INFINITY, s)?;
    let q_one = nu * chemin_lerner_from_shells(times, &shells, 1.0, s + 2.0)?;
    Ok(HeatLemmaReport {
        nu,
        ratio_q_inf: ratio(q_inf),
        ratio_q_one: ratio(q_one),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::littlewood_paley::random_power_law;
    use crate::spectral::ops::project;
    use crate::spectral::SpectralTransform;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_everything_gives_zero_sides() {
        let g = Grid::new(2, 16, 20.0).unwrap();
        let p = FluidParams::new(1.0, 1.0, 0.0, 1.0, 1.0).unwrap();
        let times: Vec<f64> = (0..5).map(|i| 0.1 * i as f64).collect();
        let forcing = SampledForcing::zero(&g, times);
        let a = SpectralField::zeros(&g, 1);
        let m = SpectralField::zeros(&g, 2);
        let r = maximal_regularity_probe(&p, &a, &m, &forcing, 0.0).unwrap();
        assert_eq!((r.lhs, r.rhs, r.ratio), (0.0, 0.0, 0.0));
    }

    #[test]
    fn heat_only_semigroup_slope() {
        let g = Grid::new(2, 256, 100.0).unwrap();
        let t = SpectralTransform::new(&g);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u = random_power_law(&g, &t, &mut rng, 0.0).unwrap();
        let v = random_power_law(&g, &t, &mut rng, 0.0).unwrap();
        let m = SpectralField::stack(&[u, v]).unwrap();
        let (w, _) = project(&m).unwrap();
        let bank = DyadicFilterBank::new(&g).unwrap();
        // white noise has ‖Δ̇_j‖ ~ 2^{jd/2}; flatten the Ḃ^{s2}_{2,∞} profile
        let s2 = -1.0;
        let w = crate::spectral::ops::apply_radial(&w, |r| if r > 0.0 { r.powf(-s2 - 1.0) } else { 0.0 });
        let a = SpectralField::zeros(&g, 1);
        // small viscosity keeps the diffusive scale inside the box up to t = 500
        let p = FluidParams::new(1.0, 0.1, 0.0, 1.0, 1.0).unwrap();
        let norm = state_besov(&bank, &a, &w, 1.0, s2, Summability::Infinity);
        let w = w.scaled(1.0 / norm);
        let times = crate::decay::log_times(1.0, 500.0, 30);
        let probe = semigroup_decay_probe(&p, &a, &w, s2 + 2.0, s2, &times, (5.0, 500.0)).unwrap();
        assert!((probe.fit.fitted_slope + 1.0).abs() < 0.15, "{}", probe.fit.fitted_slope);
    }
}
