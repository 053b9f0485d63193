use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::lyapunov::{local_rate, LyapunovCertificate};
use super::mat2::Mat2;
use super::params::FluidParams;
use crate::error::{Error, Result};

/// Tolerance on the radicand below which the spectrum is reported as a double root.
pub const DOUBLE_ROOT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    ComplexPair,
    DoubleRoot,
    RealPair,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::ComplexPair => "complex_pair",
            Regime::DoubleRoot => "double_root",
            Regime::RealPair => "real_pair",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeInfo {
    pub regime: Regime,
    pub radicand: f64,
    /// Frequency where the radicand changes sign, when viscosity dominates
    /// capillarity and `γ > 0`.
    pub crossover: Option<f64>,
}

/// Per-frequency data of the linearised `(a, v)` system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearSymbol {
    pub xi_mag: f64,
    pub matrix: Mat2,
    pub eigenvalues: (Complex64, Complex64),
    pub regime: Regime,
    pub lyapunov_eta: f64,
    pub decay_rate: f64,
}

impl LinearSymbol {
    pub fn new(p: &FluidParams, cert: &LyapunovCertificate, xi_mag: f64) -> Result<Self> {
        Ok(LinearSymbol {
            xi_mag,
            matrix: symbol_matrix(p, xi_mag),
            eigenvalues: eigenvalues_closed_form(p, xi_mag)?,
            regime: classify_regime(p, xi_mag)?.regime,
            lyapunov_eta: cert.eta,
            decay_rate: cert.c_tilde * xi_mag * xi_mag,
        })
    }
}

/// `Â(ξ) = [[0, −|ξ|], [(γ + κρ*|ξ|²)|ξ|, −ν̄|ξ|²]]`.
pub fn symbol_matrix(p: &FluidParams, xi_mag: f64) -> Mat2 {
    let r = xi_mag;
    Mat2::new(
        0.0,
        -r,
        (p.gamma() + p.kappa() * p.rho_star() * r * r) * r,
        -p.nu_bar() * r * r,
    )
}

/// `1 − 4κρ*/ν̄² − 4γ/(ν̄²|ξ|²)`.
pub fn radicand(p: &FluidParams, xi_mag: f64) -> f64 {
    let nb2 = p.nu_bar() * p.nu_bar();
    let gamma_part = if p.gamma() == 0.0 {
        0.0
    } else {
        4.0 * p.gamma() / (nb2 * xi_mag * xi_mag)
    };
    1.0 - 4.0 * p.kappa() * p.rho_star() / nb2 - gamma_part
}

/// `λ± = −(ν̄/2)|ξ|²(1 ± √r)`; the smaller real root is recovered from the
/// determinant to avoid cancellation.
pub fn eigenvalues_closed_form(p: &FluidParams, xi_mag: f64) -> Result<(Complex64, Complex64)> {
    if !(xi_mag > 0.0) || !xi_mag.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "eigenvalues need |xi| > 0 (got {xi_mag}); the zero mode is degenerate"
        )));
    }
    let half = 0.5 * p.nu_bar() * xi_mag * xi_mag;
    let r = radicand(p, xi_mag);
    if r >= 0.0 {
        let plus = -half * (1.0 + r.sqrt());
        let det = (p.gamma() + p.kappa() * p.rho_star() * xi_mag * xi_mag) * xi_mag * xi_mag;
        Ok((Complex64::new(plus, 0.0), Complex64::new(det / plus, 0.0)))
    } else {
        let im = half * (-r).sqrt();
        Ok((Complex64::new(-half, -im), Complex64::new(-half, im)))
    }
}

/// `|ξ*|² = 4γρ*²/(ν² − 4κρ*³)`, present only when the denominator is positive and `γ > 0`.
pub fn crossover(p: &FluidParams) -> Option<f64> {
    let rs = p.rho_star();
    let denom = p.nu() * p.nu() - 4.0 * p.kappa() * rs * rs * rs;
    if p.gamma() > 0.0 && denom > 0.0 {
        Some((4.0 * p.gamma() * rs * rs / denom).sqrt())
    } else {
        None
    }
}

pub fn classify_regime(p: &FluidParams, xi_mag: f64) -> Result<RegimeInfo> {
    if !(xi_mag > 0.0) {
        return Err(Error::InvalidArgument(format!("regime needs |xi| > 0 (got {xi_mag})")));
    }
    let r = radicand(p, xi_mag);
    let regime = if r.abs() <= DOUBLE_ROOT_TOL {
        Regime::DoubleRoot
    } else if r < 0.0 {
        Regime::ComplexPair
    } else {
        Regime::RealPair
    };
    Ok(RegimeInfo {
        regime,
        radicand: r,
        crossover: crossover(p),
    })
}

/// Rows of the dispersion table over a logarithmic `|ξ|` sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DispersionRow {
    pub xi_mag: f64,
    pub lambda_plus: Complex64,
    pub lambda_minus: Complex64,
    pub regime: Regime,
    pub c_tilde_local: f64,
}

pub fn dispersion_table(
    p: &FluidParams,
    cert: &LyapunovCertificate,
    xi_min: f64,
    xi_max: f64,
    points: usize,
) -> Result<Vec<DispersionRow>> {
    if !(xi_min > 0.0 && xi_max > xi_min && points >= 2) {
        return Err(Error::InvalidArgument(
            "dispersion sweep needs 0 < xi_min < xi_max and at least 2 points".into(),
        ));
    }
    let mut xs: Vec<f64> = (0..points)
        .map(|i| {
            let t = i as f64 / (points - 1) as f64;
            (xi_min.ln() + t * (xi_max / xi_min).ln()).exp()
        })
        .collect();
    if let Some(x) = crossover(p) {
        if x > xi_min && x < xi_max {
            xs.push(x);
            xs.sort_by(f64::total_cmp);
        }
    }
    xs.into_iter()
        .map(|x| {
            let (lp, lm) = eigenvalues_closed_form(p, x)?;
            Ok(DispersionRow {
                xi_mag: x,
                lambda_plus: lp,
                lambda_minus: lm,
                regime: classify_regime(p, x)?.regime,
                c_tilde_local: local_rate(p, cert.eta, x),
            })
        })
        .collect()
}

pub fn write_dispersion_csv(rows: &[DispersionRow], mut w: impl std::io::Write) -> Result<()> {
    writeln!(w, "xi_mag,re_lambda_plus,im_lambda_plus,re_lambda_minus,im_lambda_minus,regime,c_tilde_local")?;
    for r in rows {
        writeln!(
            w,
            "{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{},{:.12e}",
            r.xi_mag,
            r.lambda_plus.re,
            r.lambda_plus.im,
            r.lambda_minus.re,
            r.lambda_minus.im,
            r.regime.as_str(),
            r.c_tilde_local
        )?;
    }
    Ok(())
}
