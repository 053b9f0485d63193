use serde::{Deserialize, Serialize};

use super::nonlinear::{NonlinearForm, NonlinearOperator};
use super::pressure::PressureLaw;
use super::state::FluidState;
use crate::error::{Error, Result};
use crate::linear::{state_shells, Duhamel, FluidParams, LinearPropagator, PropagatorOp};
use crate::littlewood_paley::{chemin_lerner_from_shells, DyadicFilterBank, ShellNorms};
use crate::spectral::SpectralField;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PicardConfig {
    pub horizon: f64,
    pub dt: f64,
    pub iterations: usize,
    /// Largest admissible norm of the linear solution.
    pub threshold: f64,
    pub form: NonlinearForm,
}

impl PicardConfig {
    pub fn new(horizon: f64, dt: f64, iterations: usize) -> Self {
        PicardConfig {
            horizon,
            dt,
            iterations,
            threshold: 0.1,
            form: NonlinearForm::Divergence,
        }
    }

    fn samples(&self) -> Result<usize> {
        if !(self.horizon > 0.0 && self.dt > 0.0) || !self.horizon.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "Picard horizon {} and step {} must be positive",
                self.horizon, self.dt
            )));
        }
        let n = (self.horizon / self.dt).round();
        if (n * self.dt - self.horizon).abs() > 1e-9 * self.horizon {
            return Err(Error::InvalidArgument(format!(
                "Picard step {} must divide the horizon {}",
                self.dt, self.horizon
            )));
        }
        Ok(n as usize)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PicardReport {
    /// Norm of the linear solution compared against the threshold.
    pub data_norm: f64,
    /// `δ_k = ‖x_{k+1} − x_k‖` for `k = 0, 1, …`.
    pub deltas: Vec<f64>,
    /// `δ_{k+1}/δ_k`.
    pub ratios: Vec<f64>,
    /// Every iterate at the final time, starting with the linear solution.
    pub iterates: Vec<FluidState>,
}

impl PicardReport {
    pub fn limit(&self) -> &FluidState {
        self.iterates.last().expect("at least the linear iterate")
    }
}

type Trajectory = Vec<(SpectralField, SpectralField)>;

/// Norm of the solution space on `[0, T]`: `L̃^∞(Ḃ^s_{2,1})` plus `L̃^1(Ḃ^{s+2}_{2,1})`
/// of `((γ+Λ)a, m)`, with `s = d/2 − 1`.
pub fn cl_norm(bank: &DyadicFilterBank, times: &[f64], traj: &[(SpectralField, SpectralField)], gamma: f64) -> Result<f64> {
    let s = bank.grid().dim() as f64 / 2.0 - 1.0;
    let base: Vec<ShellNorms> = traj.iter().map(|(a, m)| state_shells(bank, a, m, gamma, 0.0)).collect();
    let lifted: Vec<ShellNorms> = traj.iter().map(|(a, m)| state_shells(bank, a, m, gamma, 2.0)).collect();
    Ok(chemin_lerner_from_shells(times, &base, f64::INFINITY, s)? + chemin_lerner_from_shells(times, &lifted, 1.0, s)?)
}

fn difference(x: &Trajectory, y: &Trajectory) -> Result<Trajectory> {
    x.iter()
        .zip(y)
        .map(|(p, q)| Ok((p.0.sub(&q.0)?, p.1.sub(&q.1)?)))
        .collect()
}

/// Fixed-point iteration of the solution map `Φ`.
///
/// Iterate `k` is `x_L + z_k`, where `x_L` is the linear flow of the data and
/// `z_{k+1}` is the Duhamel integral of `(0, N(x_L + z_k))` from zero data,
/// with the forcing taken piecewise linear between samples. Carrying `z_k`
/// separately keeps the differences between iterates free of the rounding
/// error of the much larger linear part.
pub fn picard_solve(data: &FluidState, params: &FluidParams, law: &PressureLaw, cfg: &PicardConfig) -> Result<PicardReport> {
    let steps = cfg.samples()?;
    let grid = data.grid().clone();
    let times: Vec<f64> = (0..=steps).map(|i| data.time + i as f64 * cfg.dt).collect();
    let bank = DyadicFilterBank::new(&grid)?;
    let gamma = params.gamma();
    let step = LinearPropagator::new(&grid, params, cfg.dt, &[PropagatorOp::Exp])?;
    let mut linear: Trajectory = vec![(data.a.clone(), data.m.clone())];
    for _ in 0..steps {
        let (a, m) = linear.last().expect("non-empty");
        let next = step.apply(PropagatorOp::Exp, a, m)?;
        linear.push(next);
    }
    let data_norm = cl_norm(&bank, &times, &linear, gamma)?;
    if data_norm > cfg.threshold {
        return Err(Error::DataNotSmall { norm: data_norm, threshold: cfg.threshold });
    }
    let op = NonlinearOperator::new(&grid, params, law, cfg.form)?;
    let duhamel = Duhamel::new(&grid, params, cfg.dt)?;
    let zero_a = SpectralField::zeros(&grid, 1);
    let zero_m = SpectralField::zeros(&grid, grid.dim());
    let at_end = |z: &Trajectory| -> Result<FluidState> {
        let (la, lm) = linear.last().expect("non-empty");
        let (za, zm) = z.last().expect("non-empty");
        FluidState::new(la.add(za)?, lm.add(zm)?, times[steps])
    };
    let mut z: Trajectory = vec![(zero_a.clone(), zero_m.clone()); steps + 1];
    let mut iterates = vec![at_end(&z)?];
    let mut deltas = Vec::with_capacity(cfg.iterations);
    let mut ratios = Vec::new();
    let mut growing = 0;
    for _ in 0..cfg.iterations {
        let forcing = linear
            .iter()
            .zip(&z)
            .zip(&times)
            .map(|(((la, lm), (za, zm)), &t)| {
                let (n, _) = op.eval(&la.add(za)?, &lm.add(zm)?, t)?;
                Ok((zero_a.clone(), n))
            })
            .collect::<Result<Vec<_>>>()?;
        let next = duhamel.solve((&zero_a, &zero_m), &forcing)?;
        let delta = cl_norm(&bank, &times, &difference(&next, &z)?, gamma)?;
        if let Some(&prev) = deltas.last() {
            let ratio = if prev == 0.0 { 0.0 } else { delta / prev };
            ratios.push(ratio);
            growing = if ratio >= 1.0 { growing + 1 } else { 0 };
        }
        deltas.push(delta);
        z = next;
        iterates.push(at_end(&z)?);
        if growing >= 3 {
            return Err(Error::PicardDiverged { ratios });
        }
    }
    Ok(PicardReport {
        data_norm,
        deltas,
        ratios,
        iterates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{Grid, PhysicalField, SpectralTransform};

    fn bump(grid: &Grid, amp: f64) -> FluidState {
        let t = SpectralTransform::new(grid);
        let c = grid.box_length() / 2.0;
        let g = |x: [f64; 3]| (-((x[0] - c).powi(2) + (x[1] - c).powi(2)) / 4.0).exp();
        let a = PhysicalField::from_fn(grid, 1, |_, x| amp * g(x));
        let m = PhysicalField::from_fn(grid, 2, |k, x| amp * (x[1 - k] - c) * 0.3 * g(x));
        FluidState::new(t.forward(&a).unwrap(), t.forward(&m).unwrap(), 0.0).unwrap()
    }

    fn setup() -> (FluidParams, PressureLaw) {
        let p = FluidParams::new(1.0, 0.5, 0.0, 1.0, 1.0).unwrap();
        (p, PressureLaw::Adiabatic { coefficient: 1.0, exponent: 1.0 })
    }

    #[test]
    fn zero_data_stays_zero() {
        let g = Grid::new(2, 16, 10.0).unwrap();
        let (p, law) = setup();
        let r = picard_solve(&FluidState::zeros(&g), &p, &law, &PicardConfig::new(0.5, 0.1, 3)).unwrap();
        assert!(r.deltas.iter().all(|&d| d == 0.0));
        assert!(r.iterates.iter().all(|s| s.a.l2_norm() == 0.0 && s.m.l2_norm() == 0.0));
    }

    #[test]
    fn first_correction_is_duhamel_of_linear_forcing() {
        let g = Grid::new(2, 32, 20.0).unwrap();
        let (p, law) = setup();
        let data = bump(&g, 1e-2);
        let cfg = PicardConfig::new(0.5, 0.05, 1);
        let r = picard_solve(&data, &p, &law, &cfg).unwrap();
        let op = NonlinearOperator::new(&g, &p, &law, cfg.form).unwrap();
        let za = SpectralField::zeros(&g, 1);
        let (mut la, mut lm) = (data.a.clone(), data.m.clone());
        let e = LinearPropagator::new(&g, &p, 0.05, &[PropagatorOp::Exp]).unwrap();
        let duh = Duhamel::new(&g, &p, 0.05).unwrap();
        let mut y = (za.clone(), SpectralField::zeros(&g, 2));
        let mut f0 = op.eval(&la, &lm, 0.0).unwrap().0;
        for i in 0..10 {
            (la, lm) = e.apply(PropagatorOp::Exp, &la, &lm).unwrap();
            let f1 = op.eval(&la, &lm, (i + 1) as f64 * 0.05).unwrap().0;
            y = duh.step((&y.0, &y.1), (&za, &f0), (&za, &f1)).unwrap();
            f0 = f1;
        }
        let da = r.iterates[1].a.sub(&r.iterates[0].a).unwrap();
        let dm = r.iterates[1].m.sub(&r.iterates[0].m).unwrap();
        assert!(da.sub(&y.0).unwrap().l2_norm() <= 1e-12 * y.1.l2_norm());
        assert!(dm.sub(&y.1).unwrap().l2_norm() <= 1e-12 * y.1.l2_norm());
    }

    #[test]
    fn small_data_contracts() {
        let g = Grid::new(2, 32, 20.0).unwrap();
        let (p, law) = setup();
        let r = picard_solve(&bump(&g, 1e-3), &p, &law, &PicardConfig::new(1.0, 0.05, 6)).unwrap();
        assert!(r.ratios.iter().all(|&q| q < 0.5), "{:?}", r.ratios);
    }

    #[test]
    fn large_data_rejected() {
        let g = Grid::new(2, 16, 10.0).unwrap();
        let (p, law) = setup();
        let err = picard_solve(&bump(&g, 0.5), &p, &law, &PicardConfig::new(0.5, 0.1, 3)).unwrap_err();
        assert!(matches!(err, Error::DataNotSmall { .. }));
    }
}
