use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre;

/// Barotropic pressure law `P(ρ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PressureLaw {
    /// `P = C ρ^g`.
    Adiabatic { coefficient: f64, exponent: f64 },
    /// `P = ρT/(1 − bρ) − aρ²`.
    VanDerWaals { a: f64, b: f64, temperature: f64 },
    /// `P = γ ρ`, giving a constant sound-speed parameter.
    Linear { slope: f64 },
    /// `factor · P_inner`.
    Scaled { factor: f64, inner: Box<PressureLaw> },
}

impl PressureLaw {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParams(m));
        match self {
            PressureLaw::Adiabatic { coefficient, exponent } => {
                if !(coefficient.is_finite() && exponent.is_finite() && *coefficient >= 0.0) {
                    return bad(format!("adiabatic law needs finite coefficient >= 0 (got {coefficient}, {exponent})"));
                }
            }
            PressureLaw::VanDerWaals { a, b, temperature } => {
                if !(a.is_finite() && b.is_finite() && temperature.is_finite() && *b >= 0.0 && *temperature > 0.0) {
                    return bad(format!("van der Waals law needs b >= 0 and T > 0 (got a={a}, b={b}, T={temperature})"));
                }
            }
            PressureLaw::Linear { slope } => {
                if !slope.is_finite() {
                    return bad("linear law needs a finite slope".into());
                }
            }
            PressureLaw::Scaled { factor, inner } => {
                if !factor.is_finite() {
                    return bad("scale factor must be finite".into());
                }
                inner.validate()?;
            }
        }
        Ok(())
    }

    pub fn pressure(&self, rho: f64) -> f64 {
        match self {
            PressureLaw::Adiabatic { coefficient, exponent } => coefficient * rho.powf(*exponent),
            PressureLaw::VanDerWaals { a, b, temperature } => {
                rho * temperature / (1.0 - b * rho) - a * rho * rho
            }
            PressureLaw::Linear { slope } => slope * rho,
            PressureLaw::Scaled { factor, inner } => factor * inner.pressure(rho),
        }
    }

    /// `P′(ρ)`.
    pub fn derivative(&self, rho: f64) -> f64 {
        match self {
            PressureLaw::Adiabatic { coefficient, exponent } => {
                coefficient * exponent * rho.powf(exponent - 1.0)
            }
            PressureLaw::VanDerWaals { a, b, temperature } => {
                let q = 1.0 - b * rho;
                temperature / (q * q) - 2.0 * a * rho
            }
            PressureLaw::Linear { slope } => *slope,
            PressureLaw::Scaled { factor, inner } => factor * inner.derivative(rho),
        }
    }

    /// Largest density the law is defined for (exclusive).
    pub fn max_density(&self) -> f64 {
        match self {
            PressureLaw::VanDerWaals { b, .. } if *b > 0.0 => 1.0 / b,
            PressureLaw::Scaled { inner, .. } => inner.max_density(),
            _ => f64::INFINITY,
        }
    }

    pub fn scaled(&self, factor: f64) -> PressureLaw {
        PressureLaw::Scaled {
            factor,
            inner: Box::new(self.clone()),
        }
    }

    /// The van der Waals law with `P′(ρ*) = 0` at the lower spinodal density,
    /// which exists when `T < 8a/(27b)`.
    pub fn van_der_waals_critical(a: f64, b: f64, temperature: f64) -> Result<(PressureLaw, f64)> {
        let law = PressureLaw::VanDerWaals { a, b, temperature };
        law.validate()?;
        if !(a > 0.0 && b > 0.0) || temperature >= 8.0 * a / (27.0 * b) {
            return Err(Error::InvalidParams(format!(
                "van der Waals law has no spinodal point unless a, b > 0 and T < 8a/(27b) (T = {temperature})"
            )));
        }
        // P′ > 0 at ρ = 0 and P′ < 0 at ρ = 1/(3b)
        let (mut lo, mut hi) = (0.0, 1.0 / (3.0 * b));
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if law.derivative(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= f64::EPSILON * hi {
                break;
            }
        }
        Ok((law, 0.5 * (lo + hi)))
    }
}

/// `P̃` from `P(ρ* + a) = P(ρ*) + γa + aP̃(a)`, i.e.
/// `P̃(a) = ∫₀¹ (P′(ρ* + θa) − γ) dθ`, by 8-point Gauss–Legendre.
#[derive(Debug, Clone)]
pub struct PressureRemainder {
    law: PressureLaw,
    rho_star: f64,
    gamma: f64,
    nodes: Vec<(f64, f64)>,
}

impl PressureRemainder {
    pub fn new(law: &PressureLaw, rho_star: f64, gamma: f64) -> Self {
        let (xs, ws) = gauss_legendre(8);
        let nodes = xs
            .into_iter()
            .zip(ws)
            .map(|(x, w)| (0.5 * (x + 1.0), 0.5 * w))
            .collect();
        PressureRemainder {
            law: law.clone(),
            rho_star,
            gamma,
            nodes,
        }
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn law(&self) -> &PressureLaw {
        &self.law
    }

    pub fn eval(&self, a: f64) -> f64 {
        self.nodes
            .iter()
            .map(|&(t, w)| w * (self.law.derivative(self.rho_star + t * a) - self.gamma))
            .sum()
    }

    /// `P′(ρ* + a) − γ`.
    pub fn excess_derivative(&self, a: f64) -> f64 {
        self.law.derivative(self.rho_star + a) - self.gamma
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn van_der_waals_spinodal() {
        let (law, rs) = PressureLaw::van_der_waals_critical(3.0, 1.0 / 3.0, 2.4).unwrap();
        assert!(law.derivative(rs).abs() < 1e-13);
        assert!((rs - 0.652).abs() < 5e-3, "{rs}");
        assert!(law.derivative(rs * 0.9) > 0.0 && law.derivative(rs * 1.1) < 0.0);
        assert!(PressureLaw::van_der_waals_critical(3.0, 1.0 / 3.0, 3.0).is_err());
    }

    #[test]
    fn remainder_identity() {
        let laws = [
            (PressureLaw::Adiabatic { coefficient: 1.0, exponent: 1.4 }, 1.0),
            (PressureLaw::VanDerWaals { a: 3.0, b: 1.0 / 3.0, temperature: 2.4 }, 0.652),
            (PressureLaw::Linear { slope: 2.0 }, 0.5),
        ];
        for (law, rs) in laws {
            let g = law.derivative(rs);
            let rem = PressureRemainder::new(&law, rs, g);
            assert_eq!(rem.eval(0.0), 0.0);
            for a in [-0.2, -0.01, 1e-4, 0.05, 0.3] {
                let lhs = law.pressure(rs + a) - law.pressure(rs) - g * a - a * rem.eval(a);
                assert!(lhs.abs() < 1e-10, "{law:?} a={a}: {lhs}");
            }
        }
    }

    #[test]
    fn finite_difference_derivative() {
        let law = PressureLaw::VanDerWaals { a: 3.0, b: 1.0 / 3.0, temperature: 2.4 }.scaled(4.0);
        for rho in [0.3, 0.7, 1.5] {
            let h = 1e-5;
            let fd = (law.pressure(rho + h) - law.pressure(rho - h)) / (2.0 * h);
            assert!((fd - law.derivative(rho)).abs() < 1e-8);
        }
        assert!(law.validate().is_ok());
    }

    #[test]
    fn serde_round_trip() {
        let law = PressureLaw::Adiabatic { coefficient: 1.0, exponent: 1.4 }.scaled(4.0);
        let s = serde_json::to_string(&law).unwrap();
        let back: PressureLaw = serde_json::from_str(&s).unwrap();
        assert_eq!(law, back);
        let t: PressureLaw = toml::from_str("kind = \"van_der_waals\"\na = 3.0\nb = 0.33\ntemperature = 2.4").unwrap();
        assert!(matches!(t, PressureLaw::VanDerWaals { .. }));
    }
}
