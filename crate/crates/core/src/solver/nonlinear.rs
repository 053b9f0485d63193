use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::pressure::{PressureLaw, PressureRemainder};
use crate::error::{Error, Result};
use crate::linear::FluidParams;
use crate::spectral::ops::{dealias_mask, dealiased};
use crate::spectral::{Grid, SpectralField, SpectralTransform};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// How the capillary and pressure parts of the nonlinearity are written.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NonlinearForm {
    /// `κb∇Δb` and `(P′(b+ρ*) − γ)∇b`.
    Standard,
    /// `div K(b)` and `∇(bP̃(b))`.
    #[default]
    Divergence,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KortewegForm {
    /// `div K(ρ)` from the tensor.
    Tensor,
    /// `κρ∇Δρ`.
    Identity,
}

/// Extremes seen while evaluating the nonlinearity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NonlinearDiagnostics {
    pub min_rho: f64,
    pub max_rho: f64,
    pub max_speed: f64,
}

/// Pseudo-spectral evaluator of the momentum nonlinearity
///
/// `N(b, n) = −ℒ(Q(b)n) + κb∇Δb − (1/ρ*)div(n⊗n) + div(Q(b)n⊗n) − (P′(b+ρ*) − γ)∇b`
///
/// with `Q(b) = b/(ρ*(b+ρ*))`, so that `∂t m − (1/ρ*)ℒm − κρ*∇Δa + γ∇a = N(a, m)`
/// reproduces the full momentum equation. Products are formed in physical
/// space from two-thirds truncated inputs and the result is truncated again.
#[derive(Debug, Clone)]
pub struct NonlinearOperator {
    grid: Grid,
    transform: SpectralTransform,
    params: FluidParams,
    remainder: PressureRemainder,
    form: NonlinearForm,
    vacuum_fraction: f64,
    mask: Vec<bool>,
}

impl NonlinearOperator {
    pub fn new(grid: &Grid, params: &FluidParams, law: &PressureLaw, form: NonlinearForm) -> Result<Self> {
        law.validate()?;
        let slope = law.derivative(params.rho_star());
        if (slope - params.gamma()).abs() > 1e-8 * (1.0 + params.gamma().abs()) {
            return Err(Error::InvalidParams(format!(
                "pressure law has P'(rho*) = {slope} but gamma = {}",
                params.gamma()
            )));
        }
        Ok(NonlinearOperator {
            grid: grid.clone(),
            transform: SpectralTransform::new(grid),
            params: *params,
            remainder: PressureRemainder::new(law, params.rho_star(), params.gamma()),
            form,
            vacuum_fraction: 0.1,
            mask: dealias_mask(grid),
        })
    }

    pub fn with_vacuum_fraction(mut self, fraction: f64) -> Self {
        self.vacuum_fraction = fraction;
        self
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn transform(&self) -> &SpectralTransform {
        &self.transform
    }

    pub fn params(&self) -> &FluidParams {
        &self.params
    }

    pub fn form(&self) -> NonlinearForm {
        self.form
    }

    fn derivative(&self, u: &[Complex64], axis: usize, extra: impl Fn(f64) -> f64) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); u.len()];
        let grid = &self.grid;
        let k0 = grid.base_wavenumber();
        grid.for_each_mode(|idx, k| {
            let xi = grid.derivative_wavevector(k);
            let r2 = k0 * k0 * Grid::integer_norm_sq(k) as f64;
            out[idx] = u[idx] * (I * xi[axis] * extra(r2));
        });
        out
    }

    /// Evaluates `N(b, n)`; `time` only labels vacuum diagnostics.
    pub fn eval(&self, b: &SpectralField, n: &SpectralField, time: f64) -> Result<(SpectralField, NonlinearDiagnostics)> {
        let grid = &self.grid;
        if b.grid() != grid || n.grid() != grid {
            return Err(Error::GridMismatch);
        }
        let d = grid.dim();
        if b.components() != 1 || n.components() != d {
            return Err(Error::ShapeMismatch {
                expected: format!("scalar b and {d}-component n"),
                actual: format!("{} and {}", b.components(), n.components()),
            });
        }
        let b = dealiased(b);
        let n = dealiased(n);
        let p = &self.params;
        let rs = p.rho_star();
        let kappa = p.kappa();
        let standard = self.form == NonlinearForm::Standard;

        let mut spectra: Vec<Vec<Complex64>> = vec![b.component(0).to_vec()];
        for c in 0..d {
            spectra.push(n.component(c).to_vec());
        }
        for c in 0..d {
            spectra.push(self.derivative(b.component(0), c, |_| 1.0));
        }
        if standard {
            for c in 0..d {
                spectra.push(self.derivative(b.component(0), c, |r2| -r2));
            }
        }
        let refs: Vec<&[Complex64]> = spectra.iter().map(|s| s.as_slice()).collect();
        let phys = self.transform.inverse_real_many(&refs)?;
        drop(spectra);
        let bp = &phys[0];
        let np = &phys[1..1 + d];
        let gp = &phys[1 + d..1 + 2 * d];
        let len = grid.len();

        let mut min_rho = f64::INFINITY;
        let mut max_rho = f64::NEG_INFINITY;
        let mut max_speed: f64 = 0.0;
        for (idx, &bv) in bp.iter().enumerate() {
            let rho = rs + bv;
            min_rho = min_rho.min(rho);
            max_rho = max_rho.max(rho);
            let speed2: f64 = (0..d).map(|c| np[c][idx] * np[c][idx]).sum();
            max_speed = max_speed.max(speed2.sqrt() / rho);
        }
        if !(min_rho.is_finite() && max_rho.is_finite()) {
            return Err(Error::NonFinite(format!("density at t = {time}")));
        }
        let threshold = self.vacuum_fraction * rs;
        if min_rho <= threshold {
            return Err(Error::Vacuum { time, min_rho, threshold });
        }
        if max_rho >= self.remainder.law().max_density() {
            return Err(Error::NonFinite(format!(
                "density {max_rho} at t = {time} leaves the pressure law's domain"
            )));
        }

        // Q(b)n, the symmetric flux tensor, then the scalar or vector source terms.
        let pairs: Vec<(usize, usize)> = (0..d).flat_map(|i| (i..d).map(move |j| (i, j))).collect();
        let mut physical: Vec<Vec<f64>> = Vec::with_capacity(d + pairs.len() + 2);
        for c in 0..d {
            physical.push(
                bp.iter()
                    .zip(&np[c])
                    .map(|(&bv, &nv)| bv / (rs * (rs + bv)) * nv)
                    .collect(),
            );
        }
        for &(i, j) in &pairs {
            physical.push(
                (0..len)
                    .map(|x| {
                        let rho = rs + bp[x];
                        let flux = -np[i][x] * np[j][x] / rho;
                        if standard {
                            flux
                        } else {
                            flux - kappa * gp[i][x] * gp[j][x]
                        }
                    })
                    .collect(),
            );
        }
        if standard {
            let lp = &phys[1 + 2 * d..1 + 3 * d];
            for c in 0..d {
                physical.push(
                    (0..len)
                        .map(|x| {
                            kappa * bp[x] * lp[c][x] - self.remainder.excess_derivative(bp[x]) * gp[c][x]
                        })
                        .collect(),
                );
            }
        } else {
            physical.push(bp.iter().map(|&bv| bv * bv).collect());
            physical.push(
                (0..len)
                    .map(|x| {
                        let g2: f64 = (0..d).map(|c| gp[c][x] * gp[c][x]).sum();
                        -0.5 * kappa * g2 - bp[x] * self.remainder.eval(bp[x])
                    })
                    .collect(),
            );
        }
        drop(phys);
        let refs: Vec<&[f64]> = physical.iter().map(|s| s.as_slice()).collect();
        let hat = self.transform.forward_real_many(&refs)?;
        drop(physical);

        let qn = &hat[0..d];
        let flux = &hat[d..d + pairs.len()];
        let rest = &hat[d + pairs.len()..];
        let mut tensor_index = [[0usize; 3]; 3];
        for (t, &(i, j)) in pairs.iter().enumerate() {
            tensor_index[i][j] = t;
            tensor_index[j][i] = t;
        }
        let (mu, lam) = (p.mu(), p.lambda());
        let k0 = grid.base_wavenumber();
        let mut out = SpectralField::zeros(grid, d);
        let oc = out.coeffs_mut();
        grid.for_each_mode(|idx, k| {
            if idx == 0 || !self.mask[idx] {
                return;
            }
            let xi = grid.derivative_wavevector(k);
            let r2 = k0 * k0 * Grid::integer_norm_sq(k) as f64;
            let mut div_qn = Complex64::new(0.0, 0.0);
            for c in 0..d {
                div_qn += qn[c][idx] * xi[c];
            }
            let scalar = if standard {
                Complex64::new(0.0, 0.0)
            } else {
                rest[0][idx] * (-0.5 * kappa * r2) + rest[1][idx]
            };
            for i in 0..d {
                // −ℒ(Qn) = μ|ξ|² Q̂n + (μ+λ) ξ (ξ·Q̂n)
                let mut v = qn[i][idx] * (mu * r2) + div_qn * ((mu + lam) * xi[i]);
                for j in 0..d {
                    v += flux[tensor_index[i][j]][idx] * (I * xi[j]);
                }
                if standard {
                    v += rest[i][idx];
                } else {
                    v += scalar * (I * xi[i]);
                }
                oc[i * len + idx] = v;
            }
        });
        if !out.is_finite() {
            return Err(Error::NonFinite(format!("nonlinear term at t = {time}")));
        }
        Ok((
            out,
            NonlinearDiagnostics {
                min_rho,
                max_rho,
                max_speed,
            },
        ))
    }
}

/// `N(b, n)` with a freshly built evaluator.
pub fn nonlinear_rhs(
    b: &SpectralField,
    n: &SpectralField,
    p: &FluidParams,
    law: &PressureLaw,
    form: NonlinearForm,
) -> Result<SpectralField> {
    Ok(NonlinearOperator::new(b.grid(), p, law, form)?.eval(b, n, 0.0)?.0)
}

/// Capillary force for density `ρ = ρ* + a`, either as the divergence of the
/// Korteweg tensor or as `κρ∇Δρ`; both are dealiased.
pub fn korteweg_div(a: &SpectralField, p: &FluidParams, form: KortewegForm) -> Result<SpectralField> {
    let grid = a.grid().clone();
    if a.components() != 1 {
        return Err(Error::ShapeMismatch {
            expected: "scalar density perturbation".into(),
            actual: format!("{} components", a.components()),
        });
    }
    let t = SpectralTransform::new(&grid);
    let a = dealiased(a);
    let d = grid.dim();
    let n = grid.len();
    let kappa = p.kappa();
    let rs = p.rho_star();
    let k0 = grid.base_wavenumber();
    let deriv = |extra: &dyn Fn(f64) -> f64, axis: usize| {
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        grid.for_each_mode(|idx, k| {
            let xi = grid.derivative_wavevector(k);
            let r2 = k0 * k0 * Grid::integer_norm_sq(k) as f64;
            out[idx] = a.component(0)[idx] * (I * xi[axis] * extra(r2));
        });
        out
    };
    let ap = t.inverse_real(a.component(0))?;
    let mut out = SpectralField::zeros(&grid, d);
    match form {
        KortewegForm::Identity => {
            for c in 0..d {
                let g = t.inverse_real(&deriv(&|r2| -r2, c))?;
                let prod: Vec<f64> = ap.iter().zip(&g).map(|(x, y)| kappa * (rs + x) * y).collect();
                out.component_mut(c).copy_from_slice(&t.forward_real(&prod)?);
            }
        }
        KortewegForm::Tensor => {
            let grads: Vec<Vec<f64>> = (0..d)
                .map(|c| t.inverse_real(&deriv(&|_| 1.0, c)))
                .collect::<Result<_>>()?;
            // ρ² − ρ*² = 2ρ*a + a²; the constant does not contribute to Δρ².
            let sq: Vec<f64> = ap.iter().map(|x| 2.0 * rs * x + x * x).collect();
            let g2: Vec<f64> = (0..n).map(|x| (0..d).map(|c| grads[c][x] * grads[c][x]).sum()).collect();
            let sq_hat = t.forward_real(&sq)?;
            let g2_hat = t.forward_real(&g2)?;
            let mut pair_hat = vec![vec![]; d * d];
            for i in 0..d {
                for j in i..d {
                    let prod: Vec<f64> = (0..n).map(|x| grads[i][x] * grads[j][x]).collect();
                    pair_hat[i * d + j] = t.forward_real(&prod)?;
                }
            }
            let oc = out.coeffs_mut();
            grid.for_each_mode(|idx, k| {
                let xi = grid.derivative_wavevector(k);
                let r2 = k0 * k0 * Grid::integer_norm_sq(k) as f64;
                let s = (sq_hat[idx] * (-r2) - g2_hat[idx]) * (0.5 * kappa);
                for i in 0..d {
                    let mut v = s * (I * xi[i]);
                    for j in 0..d {
                        let (lo, hi) = if i <= j { (i, j) } else { (j, i) };
                        v -= pair_hat[lo * d + hi][idx] * (I * xi[j] * kappa);
                    }
                    oc[i * n + idx] = v;
                }
            });
        }
    }
    crate::spectral::ops::dealias(&mut out);
    Ok(out)
}
