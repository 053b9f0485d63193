use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::besov::Summability;
use super::bony::dealiased_product;
use super::filters::DyadicFilterBank;
use crate::error::{Error, Result};
use crate::spectral::ops::{apply_radial, dealias};
use crate::spectral::{Grid, PhysicalField, SpectralField, SpectralTransform};

/// Which product estimate the probe exercises.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProductVariant {
    /// `s1 + s2 > 0`, target `Ḃ^{s1+s2−d/2}_{2,1}`.
    Strict,
    /// `s1 + s2 >= 0`, target `Ḃ^{s1+s2−d/2}_{2,∞}`.
    Limiting,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProductProbe {
    pub s1: f64,
    pub s2: f64,
    pub variant: ProductVariant,
    pub trials: usize,
    pub constant: f64,
    pub ratios: Vec<f64>,
}

/// Mean-free Gaussian field with spectral envelope `|ξ|^{-slope}` inside the
/// two-thirds band.
pub fn random_power_law(
    grid: &Grid,
    transform: &SpectralTransform,
    rng: &mut impl Rng,
    slope: f64,
) -> Result<SpectralField> {
    let noise = PhysicalField::from_fn(grid, 1, |_, _| rng.sample(StandardNormal));
    let white = transform.forward(&noise)?;
    let mut u = apply_radial(&white, |r| if r > 0.0 { r.powf(-slope) } else { 0.0 });
    dealias(&mut u);
    Ok(u)
}

/// Largest observed `‖uv‖ / (‖u‖_{Ḃ^{s1}_{2,1}} ‖v‖_{Ḃ^{s2}_{2,1}})` over random pairs.
pub fn product_inequality_probe(
    grid: &Grid,
    s1: f64,
    s2: f64,
    trials: usize,
    seed: u64,
    variant: ProductVariant,
) -> Result<ProductProbe> {
    let half = grid.dim() as f64 / 2.0;
    if s1 > half || s2 > half {
        return Err(Error::InvalidArgument(format!(
            "regularities must not exceed d/2 = {half} (got {s1}, {s2})"
        )));
    }
    let ok = match variant {
        ProductVariant::Strict => s1 + s2 > 0.0,
        ProductVariant::Limiting => s1 + s2 >= 0.0,
    };
    if !ok {
        return Err(Error::InvalidArgument(format!(
            "s1 + s2 = {} violates the {variant:?} product condition",
            s1 + s2
        )));
    }
    let bank = DyadicFilterBank::new(grid)?;
    let transform = SpectralTransform::new(grid);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let target = s1 + s2 - half;
    let sigma = match variant {
        ProductVariant::Strict => Summability::One,
        ProductVariant::Limiting => Summability::Infinity,
    };
    let mut ratios = Vec::with_capacity(trials);
    for _ in 0..trials {
        let a = rng.random_range(0.0..2.0 * half);
        let b = rng.random_range(0.0..2.0 * half);
        let u = random_power_law(grid, &transform, &mut rng, a)?;
        let v = random_power_law(grid, &transform, &mut rng, b)?;
        ratios.push(ratio(&bank, &transform, &u, &v, s1, s2, target, sigma)?);
    }
    let constant = ratios.iter().copied().fold(0.0, f64::max);
    Ok(ProductProbe {
        s1,
        s2,
        variant,
        trials,
        constant,
        ratios,
    })
}

#[allow(clippy::too_many_arguments)]
fn ratio(
    bank: &DyadicFilterBank,
    transform: &SpectralTransform,
    u: &SpectralField,
    v: &SpectralField,
    s1: f64,
    s2: f64,
    target: f64,
    sigma: Summability,
) -> Result<f64> {
    let nu = bank.besov_norm(u, s1, Summability::One)?.value;
    let nv = bank.besov_norm(v, s2, Summability::One)?.value;
    if nu == 0.0 || nv == 0.0 {
        return Ok(0.0);
    }
    let uv = dealiased_product(transform, u, v)?;
    Ok(bank.besov_norm(&uv, target, sigma)?.value / (nu * nv))
}

/// The probe's ratio for one explicit pair; zero when either factor vanishes.
pub fn product_ratio(
    u: &SpectralField,
    v: &SpectralField,
    s1: f64,
    s2: f64,
    variant: ProductVariant,
) -> Result<f64> {
    let grid = u.grid();
    let bank = DyadicFilterBank::new(grid)?;
    let transform = SpectralTransform::new(grid);
    let sigma = match variant {
        ProductVariant::Strict => Summability::One,
        ProductVariant::Limiting => Summability::Infinity,
    };
    ratio(
        &bank,
        &transform,
        u,
        v,
        s1,
        s2,
        s1 + s2 - grid.dim() as f64 / 2.0,
        sigma,
    )
}
