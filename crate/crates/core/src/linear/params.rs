use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Constant-coefficient fluid parameters around the reference density `ρ*`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct FluidParams {
    rho_star: f64,
    mu: f64,
    lambda: f64,
    kappa: f64,
    gamma: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParams {
    rho_star: f64,
    mu: f64,
    lambda: f64,
    kappa: f64,
    gamma: f64,
}

impl TryFrom<RawParams> for FluidParams {
    type Error = Error;
    fn try_from(r: RawParams) -> Result<Self> {
        FluidParams::new(r.rho_star, r.mu, r.lambda, r.kappa, r.gamma)
    }
}

impl From<FluidParams> for RawParams {
    fn from(p: FluidParams) -> Self {
        RawParams {
            rho_star: p.rho_star,
            mu: p.mu,
            lambda: p.lambda,
            kappa: p.kappa,
            gamma: p.gamma,
        }
    }
}

impl FluidParams {
    /// `γ` is the sound-speed parameter `P′(ρ*)`.
    pub fn new(rho_star: f64, mu: f64, lambda: f64, kappa: f64, gamma: f64) -> Result<Self> {
        let all = [rho_star, mu, lambda, kappa, gamma];
        if all.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParams("parameters must be finite".into()));
        }
        if rho_star <= 0.0 {
            return Err(Error::InvalidParams(format!("rho_star = {rho_star} must be > 0")));
        }
        if mu <= 0.0 {
            return Err(Error::InvalidParams(format!("mu = {mu} violates mu > 0")));
        }
        if lambda + 2.0 * mu <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "lambda + 2 mu = {} violates lambda + 2 mu > 0",
                lambda + 2.0 * mu
            )));
        }
        if kappa <= 0.0 {
            return Err(Error::InvalidParams(format!("kappa = {kappa} must be > 0")));
        }
        if gamma < 0.0 {
            return Err(Error::InvalidParams(format!("gamma = {gamma} must be >= 0")));
        }
        Ok(FluidParams {
            rho_star,
            mu,
            lambda,
            kappa,
            gamma,
        })
    }

    pub fn rho_star(&self) -> f64 {
        self.rho_star
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// `ν = 2μ + λ`.
    pub fn nu(&self) -> f64 {
        2.0 * self.mu + self.lambda
    }

    /// `ν̄ = ν/ρ*`.
    pub fn nu_bar(&self) -> f64 {
        self.nu() / self.rho_star
    }

    /// `μ̄ = μ/ρ*`.
    pub fn mu_bar(&self) -> f64 {
        self.mu / self.rho_star
    }

    pub fn with_gamma(&self, gamma: f64) -> Result<Self> {
        FluidParams::new(self.rho_star, self.mu, self.lambda, self.kappa, gamma)
    }

    pub fn with_kappa(&self, kappa: f64) -> Result<Self> {
        FluidParams::new(self.rho_star, self.mu, self.lambda, kappa, self.gamma)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(FluidParams::new(1.0, 1.0, 0.0, 1.0, 0.0).is_ok());
        assert!(FluidParams::new(1.0, 0.0, 0.0, 1.0, 0.0).is_err());
        assert!(FluidParams::new(1.0, 1.0, -2.0, 1.0, 0.0).is_err());
        assert!(FluidParams::new(1.0, 1.0, -1.5, 1.0, 0.0).is_ok());
        assert!(FluidParams::new(0.0, 1.0, 0.0, 1.0, 0.0).is_err());
        assert!(FluidParams::new(1.0, 1.0, 0.0, 0.0, 0.0).is_err());
        assert!(FluidParams::new(1.0, 1.0, 0.0, 1.0, -0.1).is_err());
        assert!(FluidParams::new(1.0, f64::NAN, 0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn derived_quantities() {
        let p = FluidParams::new(2.0, 1.5, 1.0, 1.0, 0.3).unwrap();
        assert_eq!(p.nu(), 4.0);
        assert_eq!(p.nu_bar(), 2.0);
        assert_eq!(p.mu_bar(), 0.75);
    }

    #[test]
    fn serde_validates() {
        let bad = r#"{"rho_star":1,"mu":-1,"lambda":0,"kappa":1,"gamma":0}"#;
        assert!(serde_json::from_str::<FluidParams>(bad).is_err());
        let good = r#"{"rho_star":1,"mu":1,"lambda":0,"kappa":1,"gamma":0}"#;
        let p: FluidParams = serde_json::from_str(good).unwrap();
        assert_eq!(p.nu(), 2.0);
    }
}
