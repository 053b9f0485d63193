use std::io::Write;

use serde::{Deserialize, Serialize};

use super::filters::{DyadicFilterBank, ShellNorms};
use crate::error::{Error, Result};
use crate::spectral::SpectralField;

/// Summation index of a Besov norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Summability {
    One,
    Infinity,
}

impl Summability {
    pub fn sum(self, values: impl Iterator<Item = f64>) -> f64 {
        match self {
            Summability::One => values.sum(),
            Summability::Infinity => values.fold(0.0, f64::max),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BesovReport {
    pub s: f64,
    pub p: u32,
    pub sigma: Summability,
    pub value: f64,
    /// `(j, 2^{js} ‖Δ̇_j u‖_{L²})`.
    pub per_shell: Vec<(i32, f64)>,
}

impl BesovReport {
    pub fn from_shells(shells: &ShellNorms, s: f64, sigma: Summability) -> Self {
        let per_shell: Vec<(i32, f64)> = shells
            .iter()
            .map(|(j, v)| (j, 2f64.powf(j as f64 * s) * v))
            .collect();
        let value = sigma.sum(per_shell.iter().map(|&(_, v)| v));
        BesovReport {
            s,
            p: 2,
            sigma,
            value,
            per_shell,
        }
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "j,shell_value")?;
        for (j, v) in &self.per_shell {
            writeln!(w, "{j},{v:.17e}")?;
        }
        Ok(())
    }

    /// Summary without the shell breakdown.
    pub fn summary_json(&self) -> serde_json::Value {
        serde_json::json!({
            "s": self.s,
            "p": self.p,
            "sigma": self.sigma,
            "value": self.value,
            "shells": self.per_shell.len(),
        })
    }
}

impl DyadicFilterBank {
    /// `‖u‖_{Ḃ^s_{2,σ}}`; the mean never enters any shell.
    pub fn besov_norm(&self, u: &SpectralField, s: f64, sigma: Summability) -> Result<BesovReport> {
        Ok(BesovReport::from_shells(&self.shell_norms(u)?, s, sigma))
    }

    /// Low/high frequency norms with the one-shell overlap: shells `j <= j0`
    /// weighted by `2^{j s_low}` and shells `j >= j0 - 1` by `2^{j s_high}`.
    pub fn split_low_high(
        &self,
        u: &SpectralField,
        s_low: f64,
        s_high: f64,
        j0: i32,
    ) -> Result<(f64, f64)> {
        let (lo, hi) = self.j_range();
        if j0 < lo || j0 > hi {
            return Err(Error::ShellOutOfRange {
                j: j0,
                j_min: lo,
                j_max: hi,
            });
        }
        Ok(low_high(&self.shell_norms(u)?, s_low, s_high, j0))
    }
}

/// [`DyadicFilterBank::split_low_high`] on precomputed shell norms.
pub fn low_high(shells: &ShellNorms, s_low: f64, s_high: f64, j0: i32) -> (f64, f64) {
    let mut low = 0.0;
    let mut high = 0.0;
    for (j, v) in shells.iter() {
        if j <= j0 {
            low += 2f64.powf(j as f64 * s_low) * v;
        }
        if j >= j0 - 1 {
            high += 2f64.powf(j as f64 * s_high) * v;
        }
    }
    (low, high)
}
