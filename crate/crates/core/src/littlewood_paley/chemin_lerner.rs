use super::filters::{DyadicFilterBank, ShellNorms};
use crate::error::{Error, Result};
use crate::quadrature::trapezoid;
use crate::spectral::SpectralField;

/// `‖f‖_{L^ρ(t_0, t_n)}` of a sampled scalar, trapezoid in time; `ρ = ∞` is the sample max.
pub fn time_norm(times: &[f64], values: &[f64], rho: f64) -> f64 {
    if rho.is_infinite() {
        return values.iter().fold(0.0, |m, v| m.max(v.abs()));
    }
    if times.len() < 2 {
        return 0.0;
    }
    let powered: Vec<f64> = values.iter().map(|v| v.abs().powf(rho)).collect();
    trapezoid(times, &powered).powf(1.0 / rho)
}

/// `‖u‖_{L̃^ρ(Ḃ^s_{2,1})}` from per-sample shell norms.
pub fn chemin_lerner_from_shells(
    times: &[f64],
    shells: &[ShellNorms],
    rho: f64,
    s: f64,
) -> Result<f64> {
    Ok(shell_time_norms(times, shells, rho)?
        .iter()
        .map(|&(j, v)| 2f64.powf(j as f64 * s) * v)
        .sum())
}

/// `(j, ‖Δ̇_j u‖_{L^ρ_t L²})` for each shell present in the series.
pub fn shell_time_norms(
    times: &[f64],
    shells: &[ShellNorms],
    rho: f64,
) -> Result<Vec<(i32, f64)>> {
    if shells.is_empty() || times.len() != shells.len() {
        return Err(Error::InvalidArgument(format!(
            "time series needs matching nonempty samples ({} times, {} states)",
            times.len(),
            shells.len()
        )));
    }
    if !(rho >= 1.0) {
        return Err(Error::InvalidArgument(format!("time exponent {rho} < 1")));
    }
    let j_min = shells.iter().map(|s| s.j_min).min().unwrap_or(0);
    let j_max = shells.iter().map(|s| s.j_max()).max().unwrap_or(j_min);
    let mut trace = vec![0.0; shells.len()];
    let mut out = Vec::with_capacity((j_max - j_min + 1) as usize);
    for j in j_min..=j_max {
        for (t, s) in trace.iter_mut().zip(shells) {
            *t = s.get(j);
        }
        out.push((j, time_norm(times, &trace, rho)));
    }
    Ok(out)
}

impl DyadicFilterBank {
    pub fn chemin_lerner_norm(
        &self,
        times: &[f64],
        series: &[SpectralField],
        rho: f64,
        s: f64,
    ) -> Result<f64> {
        let shells = series
            .iter()
            .map(|u| self.shell_norms(u))
            .collect::<Result<Vec<_>>>()?;
        chemin_lerner_from_shells(times, &shells, rho, s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::littlewood_paley::Summability;
    use crate::spectral::{Grid, PhysicalField, SpectralTransform};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(grid: &Grid, seed: u64) -> SpectralField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = PhysicalField::from_fn(grid, 1, |_, _| rng.random_range(-1.0..1.0));
        SpectralTransform::new(grid).forward(&p).unwrap()
    }

    #[test]
    fn constant_series_reduces_to_besov() {
        let g = Grid::new(2, 32, 11.0).unwrap();
        let bank = DyadicFilterBank::new(&g).unwrap();
        let u = random(&g, 1);
        let times: Vec<f64> = (0..11).map(|i| i as f64 / 10.0).collect();
        let series = vec![u.clone(); times.len()];
        let b = bank.besov_norm(&u, 0.5, Summability::One).unwrap().value;
        for rho in [1.0, 2.0, f64::INFINITY] {
            let cl = bank.chemin_lerner_norm(&times, &series, rho, 0.5).unwrap();
            assert!((cl - b).abs() < 1e-12 * b);
        }
    }

    #[test]
    fn dominates_pointwise_sup_norm() {
        let g = Grid::new(2, 32, 11.0).unwrap();
        let bank = DyadicFilterBank::new(&g).unwrap();
        let times: Vec<f64> = (0..6).map(|i| i as f64).collect();
        let series: Vec<SpectralField> = (0..6).map(|i| random(&g, 10 + i)).collect();
        let cl = bank.chemin_lerner_norm(&times, &series, f64::INFINITY, 0.0).unwrap();
        for u in &series {
            let b = bank.besov_norm(u, 0.0, Summability::Infinity).unwrap().value;
            assert!(cl >= b);
        }
    }

    #[test]
    fn single_shell_is_a_scalar_norm() {
        let shells: Vec<ShellNorms> = (0..5)
            .map(|i| ShellNorms {
                j_min: 2,
                values: vec![i as f64],
            })
            .collect();
        let times: Vec<f64> = (0..5).map(|i| i as f64).collect();
        let one = chemin_lerner_from_shells(&times, &shells, 1.0, 0.0).unwrap();
        assert!((one - 8.0).abs() < 1e-14);
        let two = chemin_lerner_from_shells(&times, &shells, 2.0, 0.0).unwrap();
        let expect: f64 = 0.5 * 0.0 + 1.0 + 4.0 + 9.0 + 0.5 * 16.0;
        assert!((two - expect.sqrt()).abs() < 1e-14);
        let inf = chemin_lerner_from_shells(&times, &shells, f64::INFINITY, 1.0).unwrap();
        assert!((inf - 16.0).abs() < 1e-14);
    }

    #[test]
    fn empty_series_is_an_error() {
        assert!(chemin_lerner_from_shells(&[], &[], 1.0, 0.0).is_err());
    }
}
