use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::adaptive;

const QUAD_REL: f64 = 1e-10;
const SAMPLES_PER_DECADE: usize = 40;

fn bracket(t: f64) -> f64 {
    1.0 + t
}

/// `∫₀ᵗ ⟨τ⟩^{−a} ⟨t−τ⟩^{−b} dτ`, split at the midpoint so each half sees one peak.
pub fn convolution_integral(a: f64, b: f64, t: f64) -> f64 {
    let f = |tau: f64| bracket(tau).powf(-a) * bracket(t - tau).powf(-b);
    let mid = 0.5 * t;
    adaptive(f, 0.0, mid, QUAD_REL) + adaptive(f, mid, t, QUAD_REL)
}

/// `(t, I(t)⟨t⟩^{min(a,b)})` on a logarithmic grid of `[1, t_max]`.
pub fn convolution_profile(a: f64, b: f64, t_max: f64) -> Vec<(f64, f64)> {
    let decades = t_max.log10().max(0.0);
    let n = ((decades * SAMPLES_PER_DECADE as f64).ceil() as usize).max(1);
    let e = a.min(b);
    (0..=n)
        .map(|i| {
            let t = 10f64.powf(decades * i as f64 / n as f64);
            (t, convolution_integral(a, b, t) * bracket(t).powf(e))
        })
        .collect()
}

fn sup_ratio(a: f64, b: f64, t_max: f64) -> f64 {
    convolution_profile(a, b, t_max)
        .iter()
        .fold(0.0, |m, &(_, v)| m.max(v))
}

/// Empirical constant `sup_t I(t)⟨t⟩^{min(a,b)}` over `t ∈ [1, t_max]`.
///
/// Without `max(a, b) > 1` the ratio keeps growing; the error then carries
/// the growth factor observed when `t_max` doubles.
pub fn convolution_inequality_check(a: f64, b: f64, t_max: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0 && t_max >= 2.0) {
        return Err(Error::InvalidArgument(format!(
            "convolution check needs positive exponents and t_max >= 2 (got {a}, {b}, {t_max})"
        )));
    }
    let c = sup_ratio(a, b, t_max);
    if a.max(b) <= 1.0 {
        let growth = c / sup_ratio(a, b, 0.5 * t_max);
        return Err(Error::ConvolutionPrecondition { a, b, growth });
    }
    Ok(c)
}

/// Relative change of the empirical constant between `t_max/2` and `t_max`.
pub fn convolution_stability(a: f64, b: f64, t_max: f64) -> Result<f64> {
    let full = convolution_inequality_check(a, b, t_max)?;
    let half = convolution_inequality_check(a, b, 0.5 * t_max)?;
    Ok((full - half).abs() / half)
}

pub const UNIFORM_K_RANGE: (i32, i32) = (-60, 60);
const UNIFORM_T_RANGE: (f64, f64) = (1e-6, 1e6);
const UNIFORM_PER_DECADE: usize = 400;

/// `Σ_k (2^k t^{1/2})^r e^{−c₀ 4^k t}` over the fixed range of `k`.
pub fn uniform_sum(r: f64, c0: f64, t: f64) -> f64 {
    let sq = t.sqrt();
    (UNIFORM_K_RANGE.0..=UNIFORM_K_RANGE.1)
        .map(|k| {
            let x = 2f64.powi(k) * sq;
            x.powf(r) * (-c0 * x * x).exp()
        })
        .sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniformBoundReport {
    pub r: f64,
    pub c0: f64,
    pub sup: f64,
    pub argmax: f64,
    /// The maximum is not at either end of the sampled range.
    pub interior: bool,
    /// Maximum within each decade of `t`.
    pub decade_sups: Vec<f64>,
    /// `(max − min)/max` of the per-decade maxima.
    pub decade_spread: f64,
    /// `max_t |S(4t) − S(t)| / S(t)`.
    pub shift_residual: f64,
}

impl UniformBoundReport {
    pub fn passes(&self) -> bool {
        self.sup.is_finite() && self.interior && self.decade_spread < 0.01
    }
}

/// Samples the dyadic heat sum on a log grid of `t` and reports its supremum
/// and how far it is from being invariant under `t → 4t`.
pub fn uniform_bound_check(r: f64, c0: f64) -> Result<UniformBoundReport> {
    if !(r > 0.0 && c0 > 0.0) {
        return Err(Error::InvalidArgument(format!("uniform bound needs r > 0 and c0 > 0 (got {r}, {c0})")));
    }
    let (lo, hi) = UNIFORM_T_RANGE;
    let decades = (hi / lo).log10().round() as usize;
    let n = decades * UNIFORM_PER_DECADE;
    let ts: Vec<f64> = (0..=n)
        .map(|i| lo * 10f64.powf(i as f64 / UNIFORM_PER_DECADE as f64))
        .collect();
    let vals: Vec<f64> = ts.iter().map(|&t| uniform_sum(r, c0, t)).collect();
    let (imax, &sup) = vals
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty");
    let decade_sups: Vec<f64> = (0..decades)
        .map(|d| {
            vals[d * UNIFORM_PER_DECADE..=(d + 1) * UNIFORM_PER_DECADE]
                .iter()
                .cloned()
                .fold(0.0, f64::max)
        })
        .collect();
    let dmax = decade_sups.iter().cloned().fold(0.0, f64::max);
    let dmin = decade_sups.iter().cloned().fold(f64::INFINITY, f64::min);
    let shift_residual = ts
        .iter()
        .zip(&vals)
        .filter(|(t, _)| 4.0 * **t <= hi)
        .map(|(&t, &v)| (uniform_sum(r, c0, 4.0 * t) - v).abs() / v)
        .fold(0.0, f64::max);
    Ok(UniformBoundReport {
        r,
        c0,
        sup,
        argmax: ts[imax],
        interior: imax > 0 && imax < n,
        decade_sups,
        decade_spread: (dmax - dmin) / dmax,
        shift_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integral_matches_closed_form() {
        // a = b = 2: ∫₀ᵗ (1+τ)^{-2}(1+t−τ)^{-2} dτ has an elementary antiderivative.
        for t in [0.5f64, 3.0, 40.0] {
            let s = 2.0 + t;
            let exact = 2.0 * t / (s * s * (1.0 + t)) + 4.0 * (1.0 + t).ln() / (s * s * s);
            let got = convolution_integral(2.0, 2.0, t);
            assert!((got - exact).abs() < 1e-9 * exact, "{t}: {got} vs {exact}");
        }
    }

    #[test]
    fn stable_constants() {
        for (a, b) in [(2.0, 2.0), (2.0, 0.5), (1.5, 3.0)] {
            assert!(convolution_stability(a, b, 1000.0).unwrap() < 0.05);
        }
    }

    #[test]
    fn precondition_failure_reports_growth() {
        match convolution_inequality_check(0.5, 0.5, 1000.0) {
            Err(Error::ConvolutionPrecondition { growth, .. }) => assert!(growth > 1.2, "{growth}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn uniform_sum_properties() {
        // The mean of the sum over one period in log t is Γ(r/2)c₀^{-r/2}/(2 ln 2).
        let mean = |gamma_half_r: f64, r: f64, c0: f64| gamma_half_r * c0.powf(-r / 2.0) / (2.0 * 2f64.ln());
        let one = uniform_bound_check(1.0, 1.0).unwrap();
        assert!(one.passes() && one.shift_residual < 1e-12, "{one:?}");
        let m1 = mean(std::f64::consts::PI.sqrt(), 1.0, 1.0);
        assert!(one.sup >= m1 && one.sup < 1.01 * m1);
        let four = uniform_bound_check(4.0, 1.0).unwrap();
        let m4 = mean(1.0, 4.0, 1.0);
        assert!(four.passes() && four.sup >= m4 && four.sup < 1.1 * m4, "{four:?}");
        let stiff = uniform_bound_check(1.0, 2.0).unwrap();
        assert!(stiff.sup < one.sup);
    }
}
