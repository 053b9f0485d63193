use std::io::Write;

use serde::{Deserialize, Serialize};

use super::fit::{fit_decay_exponent, DecayFit};
use crate::error::{Error, Result};
use crate::linear::state_shells;
use crate::littlewood_paley::{DyadicFilterBank, ShellNorms};
use crate::solver::FluidState;

pub const DEFAULT_EPSILON: f64 = 0.1;
/// Decay fits ignore the transient before this time.
pub const FIT_START: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GammaMode {
    /// Density weighted by `γ + Λ`.
    Positive,
    /// Density weighted by `Λ`.
    Zero,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFunctionalConfig {
    pub dim: usize,
    pub s_grid: Vec<f64>,
    pub epsilon: f64,
    pub alpha: f64,
    pub j0: i32,
    pub gamma_mode: GammaMode,
    /// `γ` used in the density weight when the mode is positive.
    pub gamma: f64,
}

impl DecayFunctionalConfig {
    /// Five regularity indices across `(−d/2, d/2 + 1]` including `0`, `ε = 0.1` and the
    /// default threshold: the shell nearest `|ξ| = 1` when `γ > 0`, the middle
    /// of the band otherwise.
    pub fn new(bank: &DyadicFilterBank, gamma: f64) -> Result<Self> {
        let d = bank.grid().dim();
        let lo = -(d as f64) / 2.0;
        let hi = d as f64 / 2.0 + 1.0;
        let s_grid = vec![lo + 0.05, lo / 2.0, 0.0, hi / 2.0, hi];
        let (j_lo, j_hi) = bank.j_range();
        let (gamma_mode, j0) = if gamma > 0.0 {
            (GammaMode::Positive, bank.shell_nearest(1.0))
        } else {
            (GammaMode::Zero, (j_lo + j_hi) / 2)
        };
        let cfg = DecayFunctionalConfig {
            dim: d,
            s_grid,
            epsilon: DEFAULT_EPSILON,
            alpha: d as f64 / 2.0 + 0.5 - DEFAULT_EPSILON,
            j0,
            gamma_mode,
            gamma: gamma.max(0.0),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_s_grid(mut self, s_grid: Vec<f64>) -> Result<Self> {
        self.s_grid = s_grid;
        self.validate()?;
        Ok(self)
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Result<Self> {
        self.epsilon = epsilon;
        self.alpha = self.dim as f64 / 2.0 + 0.5 - epsilon;
        self.validate()?;
        Ok(self)
    }

    pub fn with_j0(mut self, j0: i32) -> Self {
        self.j0 = j0;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let half = self.dim as f64 / 2.0;
        if self.s_grid.is_empty() {
            return Err(Error::InvalidArgument("empty regularity grid".into()));
        }
        if let Some(s) = self.s_grid.iter().find(|&&s| !(s > -half && s <= half + 1.0)) {
            return Err(Error::InvalidArgument(format!(
                "regularity index {s} outside (-{half}, {}]",
                half + 1.0
            )));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::InvalidArgument(format!("epsilon {} must be positive", self.epsilon)));
        }
        if self.alpha != half + 0.5 - self.epsilon {
            return Err(Error::InvalidArgument(format!(
                "alpha {} must equal d/2 + 1/2 - epsilon",
                self.alpha
            )));
        }
        if self.gamma_mode == GammaMode::Positive && !(self.gamma > 0.0) {
            return Err(Error::InvalidArgument("positive gamma mode needs gamma > 0".into()));
        }
        Ok(())
    }

    fn weight_gamma(&self) -> f64 {
        match self.gamma_mode {
            GammaMode::Positive => self.gamma,
            GammaMode::Zero => 0.0,
        }
    }

    /// Exponent `−(s + d/2)/2` predicted for the low-frequency `Ḃ^s` norm.
    pub fn theoretical_slope(&self, s: f64) -> f64 {
        -0.5 * (s + self.dim as f64 / 2.0)
    }
}

/// One sample of the functional.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayRow {
    pub time: f64,
    /// `‖X(t)‖^l_{Ḃ^s_{2,1}}` for each `s` in the grid, without time weight.
    pub low: Vec<f64>,
    /// `t^α ‖Λ²X(t)‖^h_{Ḃ^{d/2−1}_{2,1}}`.
    pub high: f64,
    pub d: f64,
}

/// Streaming evaluation of the decay functional: states are fed in time order
/// and only running suprema are kept.
#[derive(Debug, Clone)]
pub struct DecayAccumulator {
    bank: DyadicFilterBank,
    cfg: DecayFunctionalConfig,
    low_sup: f64,
    high_sup: Vec<f64>,
    j_min: i32,
    rows: Vec<DecayRow>,
}

impl DecayAccumulator {
    pub fn new(bank: &DyadicFilterBank, cfg: &DecayFunctionalConfig) -> Result<Self> {
        cfg.validate()?;
        if bank.grid().dim() != cfg.dim {
            return Err(Error::GridMismatch);
        }
        let (j_min, j_max) = bank.j_range();
        Ok(DecayAccumulator {
            bank: bank.clone(),
            cfg: cfg.clone(),
            low_sup: 0.0,
            high_sup: vec![0.0; (j_max - j_min + 1) as usize],
            j_min,
            rows: Vec::new(),
        })
    }

    pub fn config(&self) -> &DecayFunctionalConfig {
        &self.cfg
    }

    pub fn push(&mut self, state: &FluidState) -> Result<&DecayRow> {
        if state.grid() != self.bank.grid() {
            return Err(Error::GridMismatch);
        }
        if let Some(last) = self.rows.last() {
            if state.time < last.time {
                return Err(Error::InvalidArgument(format!(
                    "states must arrive in time order ({} after {})",
                    state.time, last.time
                )));
            }
        }
        let g = self.cfg.weight_gamma();
        let base = state_shells(&self.bank, &state.a, &state.m, g, 0.0);
        let lifted = state_shells(&self.bank, &state.a, &state.m, g, 2.0);
        let row = self.ingest(state.time, &base, &lifted);
        self.rows.push(row);
        Ok(self.rows.last().expect("just pushed"))
    }

    /// Adds a sample given the shell norms of `X` and of `Λ²X`.
    pub fn ingest(&mut self, t: f64, base: &ShellNorms, lifted: &ShellNorms) -> DecayRow {
        let cfg = &self.cfg;
        let half = cfg.dim as f64 / 2.0;
        let bracket = 1.0 + t;
        let mut low = Vec::with_capacity(cfg.s_grid.len());
        for &s in &cfg.s_grid {
            let v: f64 = base
                .iter()
                .filter(|&(j, _)| j <= cfg.j0)
                .map(|(j, v)| 2f64.powf(j as f64 * s) * v)
                .sum();
            self.low_sup = self.low_sup.max(bracket.powf(0.5 * (s + half)) * v);
            low.push(v);
        }
        let tw = if t > 0.0 { t.powf(cfg.alpha) } else { 0.0 };
        let mut high = 0.0;
        let mut high_total = 0.0;
        for (i, sup) in self.high_sup.iter_mut().enumerate() {
            let j = self.j_min + i as i32;
            if j < cfg.j0 - 1 {
                continue;
            }
            let w = 2f64.powf(j as f64 * (half - 1.0));
            let v = tw * lifted.get(j);
            high += w * v;
            *sup = sup.max(v);
            high_total += w * *sup;
        }
        DecayRow {
            time: t,
            low,
            high,
            d: self.low_sup + high_total,
        }
    }

    pub fn rows(&self) -> &[DecayRow] {
        &self.rows
    }

    pub fn finish(self) -> DecaySeries {
        DecaySeries { cfg: self.cfg, rows: self.rows }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecaySeries {
    pub cfg: DecayFunctionalConfig,
    pub rows: Vec<DecayRow>,
}

impl DecaySeries {
    pub fn times(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.time).collect()
    }

    pub fn d_values(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.d).collect()
    }

    /// `(t, ‖X(t)‖^l_{Ḃ^s})` for the `i`-th regularity index.
    pub fn low_series(&self, i: usize) -> Vec<(f64, f64)> {
        self.rows.iter().map(|r| (r.time, r.low[i])).collect()
    }

    pub fn is_nondecreasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].d >= w[0].d)
    }

    /// `max D / min D` over samples with `t` in `window`.
    pub fn spread(&self, window: (f64, f64)) -> f64 {
        let v: Vec<f64> = self
            .rows
            .iter()
            .filter(|r| r.time >= window.0 && r.time <= window.1)
            .map(|r| r.d)
            .collect();
        let max = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = v.iter().cloned().fold(f64::INFINITY, f64::min);
        max / min
    }

    /// Fits every low-frequency series over `window` against `−(s + d/2)/2`.
    pub fn fits(&self, window: (f64, f64), tolerance: f64) -> Result<Vec<(f64, DecayFit)>> {
        self.cfg
            .s_grid
            .iter()
            .enumerate()
            .map(|(i, &s)| {
                let fit = fit_decay_exponent(&self.low_series(i), window)?
                    .with_theory(self.cfg.theoretical_slope(s), tolerance);
                Ok((s, fit))
            })
            .collect()
    }

    pub fn csv_header(&self) -> String {
        let mut h = String::from("t");
        for s in &self.cfg.s_grid {
            h.push_str(&format!(",low_s{s}"));
        }
        h.push_str(",high,d");
        h
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{}", self.csv_header())?;
        for r in &self.rows {
            write!(w, "{:e}", r.time)?;
            for v in &r.low {
                write!(w, ",{v:e}")?;
            }
            writeln!(w, ",{:e},{:e}", r.high, r.d)?;
        }
        Ok(())
    }
}

/// `D(t)` (or `D̃(t)` in the zero mode) at each state of a trajectory.
pub fn d_functional(traj: &[FluidState], cfg: &DecayFunctionalConfig) -> Result<DecaySeries> {
    let first = traj.first().ok_or_else(|| Error::InvalidArgument("empty trajectory".into()))?;
    let bank = DyadicFilterBank::new(first.grid())?;
    let mut acc = DecayAccumulator::new(&bank, cfg)?;
    for s in traj {
        acc.push(s)?;
    }
    Ok(acc.finish())
}

/// Low-frequency size of the data in `Ḃ^{−d/2}_{2,∞}`, with and without the
/// density weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitialSize {
    /// `‖(γ+Λ)a₀‖^l + ‖m₀‖^l` (`Λa₀` in the zero mode).
    pub weighted: f64,
    /// `‖a₀‖^l + ‖m₀‖^l`, with `a₀` measured in `Ḃ^{1−d/2}` in the zero mode.
    pub unweighted: f64,
}

pub fn initial_size(bank: &DyadicFilterBank, data: &FluidState, cfg: &DecayFunctionalConfig) -> InitialSize {
    let s = -(cfg.dim as f64) / 2.0;
    let sup_low = |shells: &ShellNorms, s: f64| {
        shells
            .iter()
            .filter(|&(j, _)| j <= cfg.j0)
            .map(|(j, v)| 2f64.powf(j as f64 * s) * v)
            .fold(0.0, f64::max)
    };
    let g = cfg.weight_gamma();
    let parts = crate::linear::weighted_parts(&data.a, &data.m, g, 0.0);
    let wa = bank.shell_norms_of(&[&parts[0]]);
    let m_refs: Vec<&[_]> = (0..data.m.components()).map(|c| data.m.component(c)).collect();
    let m = sup_low(&bank.shell_norms_of(&m_refs), s);
    let a = bank.shell_norms_of(&[data.a.component(0)]);
    let s_a = match cfg.gamma_mode {
        GammaMode::Positive => s,
        GammaMode::Zero => s + 1.0,
    };
    InitialSize {
        weighted: sup_low(&wa, s) + m,
        unweighted: sup_low(&a, s_a) + m,
    }
}
