use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::params::FluidParams;
use crate::error::{Error, Result};

/// Sampling of `|ξ|` used for the numeric certificate.
const XI_MIN: f64 = 1e-6;
const XI_MAX: f64 = 1e6;
const POINTS_PER_DECADE: usize = 100;
const SAFETY: f64 = 1e-3;

/// The two upper bounds on `η`: `(ρ*/ν + 2ν/(κρ*³))⁻¹` and `2√2/(κρ*)`.
pub fn lyapunov_bounds(p: &FluidParams) -> (f64, f64) {
    let rs = p.rho_star();
    let first = 1.0 / (rs / p.nu() + 2.0 * p.nu() / (p.kappa() * rs * rs * rs));
    let second = 2.0 * std::f64::consts::SQRT_2 / (p.kappa() * rs);
    (first, second)
}

pub fn lyapunov_eta(p: &FluidParams) -> f64 {
    let (a, b) = lyapunov_bounds(p);
    0.5 * a.min(b)
}

/// `ℒ² = (γ + κρ*|ξ|²)|â|² + |v̂|² − 2η|ξ| Re(â v̄̂)`.
pub fn lyapunov_value(p: &FluidParams, eta: f64, a: Complex64, v: Complex64, xi: f64) -> f64 {
    let stiff = p.gamma() + p.kappa() * p.rho_star() * xi * xi;
    stiff * a.norm_sqr() + v.norm_sqr() - 2.0 * eta * xi * (a * v.conj()).re
}

/// `D` with `dℒ²/dt = −2D` along the linear flow.
pub fn lyapunov_dissipation(p: &FluidParams, eta: f64, a: Complex64, v: Complex64, xi: f64) -> f64 {
    let stiff = p.gamma() + p.kappa() * p.rho_star() * xi * xi;
    let nb = p.nu_bar();
    let x2 = xi * xi;
    (nb - eta) * x2 * v.norm_sqr() + eta * stiff * x2 * a.norm_sqr()
        - eta * nb * x2 * xi * (a * v.conj()).re
}

/// Symmetric 2×2 form `[[p, q], [q, r]]`.
#[derive(Debug, Clone, Copy)]
struct Form {
    p: f64,
    q: f64,
    r: f64,
}

fn lyapunov_form(pm: &FluidParams, eta: f64, xi: f64) -> Form {
    Form {
        p: pm.gamma() + pm.kappa() * pm.rho_star() * xi * xi,
        q: -eta * xi,
        r: 1.0,
    }
}

/// `D/|ξ|²` as a form.
fn dissipation_form(pm: &FluidParams, eta: f64, xi: f64) -> Form {
    let stiff = pm.gamma() + pm.kappa() * pm.rho_star() * xi * xi;
    Form {
        p: eta * stiff,
        q: -0.5 * eta * pm.nu_bar() * xi,
        r: pm.nu_bar() - eta,
    }
}

/// Extreme roots of `det(A − μB) = 0` for `B` positive definite.
fn generalized_eigenvalues(a: Form, b: Form) -> Option<(f64, f64)> {
    let c2 = b.p * b.r - b.q * b.q;
    if !(c2 > 0.0 && b.p > 0.0) {
        return None;
    }
    let c1 = -(a.p * b.r + a.r * b.p - 2.0 * a.q * b.q);
    let c0 = a.p * a.r - a.q * a.q;
    let disc = (c1 * c1 - 4.0 * c2 * c0).max(0.0);
    let big = -0.5 * (c1 + c1.signum() * disc.sqrt());
    if big == 0.0 {
        return Some((0.0, 0.0));
    }
    let r1 = big / c2;
    let r2 = c0 / big;
    Some((r1.min(r2), r1.max(r2)))
}

/// `c̃` restricted to one frequency: the best constant with `D ≥ c̃|ξ|²ℒ²` there.
pub fn local_rate(p: &FluidParams, eta: f64, xi: f64) -> f64 {
    match generalized_eigenvalues(dissipation_form(p, eta, xi), lyapunov_form(p, eta, xi)) {
        Some((lo, _)) => lo,
        None => f64::NEG_INFINITY,
    }
}

/// Extreme ratios of `ℒ²` against `(γ + |ξ|²)|â|² + |v̂|²` at one frequency.
fn sandwich_at(p: &FluidParams, eta: f64, xi: f64) -> Option<(f64, f64)> {
    let n = Form {
        p: p.gamma() + xi * xi,
        q: 0.0,
        r: 1.0,
    };
    generalized_eigenvalues(lyapunov_form(p, eta, xi), n)
}

/// Certified constants of the Lyapunov argument for one parameter set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LyapunovCertificate {
    pub eta: f64,
    /// Number of times the formula value of `η` had to be halved.
    pub halvings: u32,
    pub c_tilde: f64,
    pub c1: f64,
}

impl LyapunovCertificate {
    pub fn value(&self, p: &FluidParams, a: Complex64, v: Complex64, xi: f64) -> f64 {
        lyapunov_value(p, self.eta, a, v, xi)
    }

    /// `(γ + |ξ|²)|â|² + |v̂|²`.
    pub fn reference_energy(p: &FluidParams, a: Complex64, v: Complex64, xi: f64) -> f64 {
        (p.gamma() + xi * xi) * a.norm_sqr() + v.norm_sqr()
    }
}

fn xi_samples() -> Vec<f64> {
    let decades = (XI_MAX / XI_MIN).log10();
    let n = (decades * POINTS_PER_DECADE as f64).round() as usize;
    (0..=n)
        .map(|i| XI_MIN * 10f64.powf(i as f64 / POINTS_PER_DECADE as f64))
        .collect()
}

/// Minimises `f` over the sampled frequencies and refines the best bracket
/// by golden-section search in `ln |ξ|`.
fn refined_min(xs: &[f64], f: impl Fn(f64) -> f64) -> f64 {
    let vals: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let (i, &best) = vals
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty sample");
    let lo = xs[i.saturating_sub(1)].ln();
    let hi = xs[(i + 1).min(xs.len() - 1)].ln();
    let g = |t: f64| f(t.exp());
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let (mut fc, mut fd) = (g(c), g(d));
    for _ in 0..80 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = g(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = g(d);
        }
    }
    best.min(fc).min(fd)
}

/// Starts from [`lyapunov_eta`] and halves `η` until both the functional and
/// the dissipation are positive definite at every sampled frequency.
pub fn certify(p: &FluidParams) -> Result<LyapunovCertificate> {
    let xs = xi_samples();
    let mut eta = lyapunov_eta(p);
    for halvings in 0..60 {
        let rate = refined_min(&xs, |x| local_rate(p, eta, x));
        let lower = refined_min(&xs, |x| sandwich_at(p, eta, x).map_or(f64::NEG_INFINITY, |s| s.0));
        if rate > 0.0 && lower > 0.0 {
            let upper = -refined_min(&xs, |x| sandwich_at(p, eta, x).map_or(f64::NEG_INFINITY, |s| -s.1));
            let c1 = upper.max(1.0 / lower) * (1.0 + SAFETY);
            return Ok(LyapunovCertificate {
                eta,
                halvings,
                c_tilde: rate * (1.0 - SAFETY),
                c1,
            });
        }
        eta *= 0.5;
    }
    Err(Error::Assertion(format!(
        "no admissible Lyapunov weight found for {p:?}"
    )))
}
