//! Named initial-data generators.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::littlewood_paley::DyadicFilterBank;
use crate::solver::FluidState;
use crate::spectral::ops::{apply_radial, dealias};
use crate::spectral::{Grid, PhysicalField, SpectralField, SpectralTransform};

fn default_width() -> f64 {
    4.0
}

fn yes() -> bool {
    true
}

/// Initial data; every variant is dealiased, and the density mean is removed
/// unless `zero_mean` is false.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitialData {
    /// `a = A exp(−|x − c|²/(2w²))` centred in the box; the first momentum
    /// component carries the same profile scaled by `momentum`.
    GaussianBump {
        amplitude: f64,
        #[serde(default = "default_width")]
        width: f64,
        #[serde(default)]
        momentum: f64,
        #[serde(default = "yes")]
        zero_mean: bool,
    },
    /// Centred `Δ̇_j δ`, scaled so that `max |a| = A`; zero momentum.
    SingleShell {
        amplitude: f64,
        shell: i32,
    },
    /// Gaussian white noise restricted to shells `j_lo..=j_hi`, each field
    /// scaled to `max |·| = A`. Drawn from ChaCha8 seeded with the run seed.
    RandomBand {
        amplitude: f64,
        j_lo: i32,
        j_hi: i32,
    },
    /// Gaussian white noise in both fields, reshaped by `|ξ|^{−s−d/2}` so that
    /// every shell carries comparable `Ḃ^s_{2,∞}` weight, then scaled so that
    /// `max |a| = A` and `max |m| = A`.
    PowerLaw {
        amplitude: f64,
        s: f64,
    },
}

fn normalise(u: &mut SpectralField, transform: &SpectralTransform, target: f64) -> Result<()> {
    let peak = transform.inverse(u)?.max_abs();
    if peak > 0.0 {
        u.scale(target / peak);
    }
    Ok(())
}

impl InitialData {
    pub fn validate(&self) -> Result<()> {
        let amp = match self {
            InitialData::GaussianBump { amplitude, width, momentum, .. } => {
                if !(*width > 0.0) || !momentum.is_finite() {
                    return Err(Error::InvalidArgument(format!(
                        "gaussian bump needs width > 0 and finite momentum (got {width}, {momentum})"
                    )));
                }
                amplitude
            }
            InitialData::SingleShell { amplitude, .. } => amplitude,
            InitialData::PowerLaw { amplitude, s } => {
                if !s.is_finite() {
                    return Err(Error::InvalidArgument(format!("power-law index {s} must be finite")));
                }
                amplitude
            }
            InitialData::RandomBand { amplitude, j_lo, j_hi } => {
                if j_lo > j_hi {
                    return Err(Error::InvalidArgument(format!("empty shell band {j_lo}..={j_hi}")));
                }
                amplitude
            }
        };
        if !amp.is_finite() || *amp < 0.0 {
            return Err(Error::InvalidArgument(format!("amplitude {amp} must be finite and >= 0")));
        }
        Ok(())
    }

    pub fn generate(&self, grid: &Grid, seed: u64) -> Result<FluidState> {
        self.validate()?;
        let t = SpectralTransform::new(grid);
        let d = grid.dim();
        let (mut a, mut m) = match self {
            InitialData::GaussianBump { amplitude, width, momentum, zero_mean } => {
                let c = grid.box_length() / 2.0;
                let g = move |x: [f64; 3]| {
                    let r2: f64 = (0..d).map(|i| (x[i] - c).powi(2)).sum();
                    (-r2 / (2.0 * width * width)).exp()
                };
                let a = PhysicalField::from_fn(grid, 1, |_, x| amplitude * g(x));
                let m = PhysicalField::from_fn(grid, d, |k, x| if k == 0 { momentum * g(x) } else { 0.0 });
                let mut a = t.forward(&a)?;
                if *zero_mean {
                    a.remove_mean();
                }
                (a, t.forward(&m)?)
            }
            InitialData::SingleShell { amplitude, shell } => {
                let bank = DyadicFilterBank::new(grid)?;
                let n = grid.points_per_axis();
                let centre = (0..d).fold(0, |acc, _| acc * n + n / 2);
                let mut phys = PhysicalField::zeros(grid, 1);
                phys.values_mut()[centre] = 1.0;
                let delta = t.forward(&phys)?;
                let mut a = bank.lp_block(&delta, *shell)?;
                dealias(&mut a);
                normalise(&mut a, &t, *amplitude)?;
                (a, SpectralField::zeros(grid, d))
            }
            InitialData::RandomBand { amplitude, j_lo, j_hi } => {
                let bank = DyadicFilterBank::new(grid)?;
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut noise = |comps: usize| -> Result<SpectralField> {
                    let p = PhysicalField::from_fn(grid, comps, |_, _| StandardNormal.sample(&mut rng));
                    let u = t.forward(&p)?;
                    let hi = bank.low_pass(&u, *j_hi)?;
                    let lo = bank.low_pass(&u, j_lo - 1)?;
                    let mut band = hi.sub(&lo)?;
                    dealias(&mut band);
                    normalise(&mut band, &t, *amplitude)?;
                    Ok(band)
                };
                let a = noise(1)?;
                let m = noise(d)?;
                (a, m)
            }
            InitialData::PowerLaw { amplitude, s } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let slope = s + d as f64 / 2.0;
                let mut noise = |comps: usize| -> Result<SpectralField> {
                    let p = PhysicalField::from_fn(grid, comps, |_, _| StandardNormal.sample(&mut rng));
                    let mut u = apply_radial(&t.forward(&p)?, |r| if r > 0.0 { r.powf(-slope) } else { 0.0 });
                    dealias(&mut u);
                    normalise(&mut u, &t, *amplitude)?;
                    Ok(u)
                };
                let a = noise(1)?;
                let m = noise(d)?;
                (a, m)
            }
        };
        dealias(&mut a);
        dealias(&mut m);
        FluidState::new(a, m, 0.0)
    }
}
