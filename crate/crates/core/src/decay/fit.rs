use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MIN_FIT_POINTS: usize = 8;

/// Least-squares power law `norm ≈ C t^{slope}` over a time window.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DecayFit {
    pub series: Vec<(f64, f64)>,
    pub fitted_slope: f64,
    pub intercept: f64,
    pub theoretical_slope: Option<f64>,
    pub tolerance: Option<f64>,
    pub window: (f64, f64),
}

impl DecayFit {
    pub fn with_theory(mut self, slope: f64, tolerance: f64) -> Self {
        self.theoretical_slope = Some(slope);
        self.tolerance = Some(tolerance);
        self
    }

    /// `fitted ≤ theoretical + tolerance`.
    pub fn at_least_as_fast(&self) -> bool {
        match (self.theoretical_slope, self.tolerance) {
            (Some(s), Some(tol)) => self.fitted_slope <= s + tol,
            _ => false,
        }
    }

    /// `|fitted − theoretical| ≤ tolerance`.
    pub fn within_tolerance(&self) -> bool {
        match (self.theoretical_slope, self.tolerance) {
            (Some(s), Some(tol)) => (self.fitted_slope - s).abs() <= tol,
            _ => false,
        }
    }
}

/// Fits `log norm` against `log t` on samples with `t` inside `window`.
pub fn fit_decay_exponent(series: &[(f64, f64)], window: (f64, f64)) -> Result<DecayFit> {
    let (lo, hi) = window;
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::InvalidArgument(format!("fit window [{lo}, {hi}] must satisfy 0 < t_min < t_max")));
    }
    if hi / lo < 10.0 {
        return Err(Error::InvalidArgument(format!(
            "fit window [{lo}, {hi}] spans less than one decade"
        )));
    }
    let pts: Vec<(f64, f64)> = series
        .iter()
        .copied()
        .filter(|&(t, _)| t >= lo && t <= hi)
        .collect();
    if pts.len() < MIN_FIT_POINTS {
        return Err(Error::TooFewPoints(pts.len()));
    }
    if let Some(&(t, v)) = pts.iter().find(|&&(_, v)| !(v > 0.0) || !v.is_finite()) {
        return Err(Error::InvalidArgument(format!("norm {v} at t = {t} is not positive")));
    }
    let n = pts.len() as f64;
    let xs: Vec<f64> = pts.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    Ok(DecayFit {
        series: pts,
        fitted_slope: slope,
        intercept: my - slope * mx,
        theoretical_slope: None,
        tolerance: None,
        window,
    })
}

/// `n` points logarithmically spaced on `[lo, hi]`.
pub fn log_times(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n < 2 {
        return vec![lo];
    }
    (0..n)
        .map(|i| (lo.ln() + (hi / lo).ln() * i as f64 / (n - 1) as f64).exp())
        .collect()
}
