use super::filters::DyadicFilterBank;
use crate::error::{Error, Result};
use crate::spectral::ops::{dealias, dealiased};
use crate::spectral::{SpectralField, SpectralTransform};

/// `uv = T_u v + T_v u + R(u, v)` with `T_u v = Σ_j Ṡ_{j−3}u Δ̇_j v`.
#[derive(Debug, Clone)]
pub struct BonyParts {
    pub t_uv: SpectralField,
    pub t_vu: SpectralField,
    /// Includes the product of the two means, which neither paraproduct sees.
    pub remainder: SpectralField,
}

impl BonyParts {
    pub fn sum(&self) -> Result<SpectralField> {
        self.t_uv.add(&self.t_vu)?.add(&self.remainder)
    }
}

fn check_scalar(bank: &DyadicFilterBank, u: &SpectralField) -> Result<()> {
    if u.grid() != bank.grid() {
        return Err(Error::GridMismatch);
    }
    if u.components() != 1 {
        return Err(Error::InvalidArgument("paraproducts act on scalar fields".into()));
    }
    Ok(())
}

/// Pseudo-spectral product of two scalar fields with two-thirds truncation of
/// both the factors and the result.
pub fn dealiased_product(
    transform: &SpectralTransform,
    u: &SpectralField,
    v: &SpectralField,
) -> Result<SpectralField> {
    if u.grid() != v.grid() {
        return Err(Error::GridMismatch);
    }
    let u = dealiased(u);
    let v = dealiased(v);
    let (x, y) = transform.inverse_real_pair(u.component(0), v.component(0))?;
    let prod: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a * b).collect();
    let mut out = SpectralField::from_coeffs(u.grid(), 1, transform.forward_real(&prod)?)?;
    dealias(&mut out);
    Ok(out)
}

fn accumulate_products(
    transform: &SpectralTransform,
    pairs: &[(SpectralField, SpectralField)],
) -> Result<SpectralField> {
    let grid = transform.grid();
    let mut acc = vec![0.0; grid.len()];
    for (a, b) in pairs {
        let (x, y) = transform.inverse_real_pair(a.component(0), b.component(0))?;
        for ((s, p), q) in acc.iter_mut().zip(&x).zip(&y) {
            *s += p * q;
        }
    }
    let mut out = SpectralField::from_coeffs(grid, 1, transform.forward_real(&acc)?)?;
    dealias(&mut out);
    Ok(out)
}

/// Bony decomposition of the dealiased product of `u` and `v`.
pub fn bony_decompose(
    bank: &DyadicFilterBank,
    transform: &SpectralTransform,
    u: &SpectralField,
    v: &SpectralField,
) -> Result<BonyParts> {
    check_scalar(bank, u)?;
    check_scalar(bank, v)?;
    let u = dealiased(u);
    let v = dealiased(v);
    let (lo, hi) = bank.j_range();
    let mut tuv = Vec::new();
    let mut tvu = Vec::new();
    let mut rem = Vec::new();
    for j in lo..=hi {
        let du = bank.lp_block(&u, j)?;
        let dv = bank.lp_block(&v, j)?;
        tuv.push((bank.low_pass(&u, j - 3)?, dv.clone()));
        tvu.push((bank.low_pass(&v, j - 3)?, du));
        let mut near = SpectralField::zeros(u.grid(), 1);
        for k in (j - 2).max(lo)..=(j + 2).min(hi) {
            near.axpy(1.0, &bank.lp_block(&u, k)?)?;
        }
        rem.push((near, dv));
    }
    let mut means_u = SpectralField::zeros(u.grid(), 1);
    means_u.component_mut(0)[0] = u.component(0)[0];
    let mut means_v = SpectralField::zeros(u.grid(), 1);
    means_v.component_mut(0)[0] = v.component(0)[0];
    rem.push((means_u, means_v));
    Ok(BonyParts {
        t_uv: accumulate_products(transform, &tuv)?,
        t_vu: accumulate_products(transform, &tvu)?,
        remainder: accumulate_products(transform, &rem)?,
    })
}

/// `Δ̇_k(Ṡ_{j−3}u Δ̇_j v)` for the support check.
pub fn paraproduct_piece(
    bank: &DyadicFilterBank,
    transform: &SpectralTransform,
    u: &SpectralField,
    v: &SpectralField,
    j: i32,
) -> Result<SpectralField> {
    let low = bank.low_pass(&dealiased(u), j - 3)?;
    let block = bank.lp_block(&dealiased(v), j)?;
    accumulate_products(transform, &[(low, block)])
}
