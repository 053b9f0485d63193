use num_complex::Complex64;

use super::field::SpectralField;
use super::grid::Grid;
use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `|ξ|` of integer wavevector `k`.
#[inline]
pub fn magnitude(grid: &Grid, k: [i64; 3]) -> f64 {
    grid.base_wavenumber() * (Grid::integer_norm_sq(k) as f64).sqrt()
}

/// Multiplies every component by `f(|ξ|)`.
pub fn apply_radial(u: &SpectralField, f: impl Fn(f64) -> f64) -> SpectralField {
    let grid = u.grid().clone();
    let mut out = u.clone();
    let n = grid.len();
    let mut weights = vec![0.0; n];
    grid.for_each_mode(|idx, k| weights[idx] = f(magnitude(&grid, k)));
    for c in 0..u.components() {
        for (z, w) in out.component_mut(c).iter_mut().zip(&weights) {
            *z *= *w;
        }
    }
    out
}

/// `Λ^s u = F⁻¹ |ξ|^s F u`; the zero mode of the result is always zero when `s != 0`.
pub fn fractional_laplacian(u: &SpectralField, s: f64) -> Result<SpectralField> {
    if s == 0.0 {
        let mut out = u.clone();
        out.remove_mean();
        return Ok(out);
    }
    if s < 0.0 {
        let magnitude = (0..u.components())
            .map(|c| u.component(c)[0].norm())
            .fold(0.0, f64::max);
        let scale = u.max_abs_coeff();
        if magnitude > 1e-14 * scale.max(1.0) {
            return Err(Error::HomogeneityObstruction { magnitude });
        }
    }
    Ok(apply_radial(u, |r| if r == 0.0 { 0.0 } else { r.powf(s) }))
}

pub fn laplacian(u: &SpectralField) -> SpectralField {
    apply_radial(u, |r| -r * r)
}

/// `∇a` for a scalar field.
pub fn gradient(a: &SpectralField) -> Result<SpectralField> {
    if a.components() != 1 {
        return Err(Error::ShapeMismatch {
            expected: "1 component".into(),
            actual: format!("{} components", a.components()),
        });
    }
    let grid = a.grid().clone();
    let d = grid.dim();
    let mut out = SpectralField::zeros(&grid, d);
    let n = grid.len();
    let src = a.component(0);
    let coeffs = out.coeffs_mut();
    grid.for_each_mode(|idx, k| {
        let xi = grid.derivative_wavevector(k);
        let z = I * src[idx];
        for c in 0..d {
            coeffs[c * n + idx] = z * xi[c];
        }
    });
    Ok(out)
}

/// `div m` for a vector field with `d` components.
pub fn divergence(m: &SpectralField) -> Result<SpectralField> {
    let grid = m.grid().clone();
    let d = grid.dim();
    check_vector(m)?;
    let n = grid.len();
    let mut out = SpectralField::zeros(&grid, 1);
    let src = m.coeffs();
    let dst = out.coeffs_mut();
    grid.for_each_mode(|idx, k| {
        let xi = grid.derivative_wavevector(k);
        let mut acc = Complex64::new(0.0, 0.0);
        for c in 0..d {
            acc += src[c * n + idx] * xi[c];
        }
        dst[idx] = I * acc;
    });
    Ok(out)
}

fn check_vector(m: &SpectralField) -> Result<()> {
    let d = m.grid().dim();
    if m.components() != d {
        return Err(Error::ShapeMismatch {
            expected: format!("{d} components"),
            actual: format!("{} components", m.components()),
        });
    }
    Ok(())
}

/// Splits momentum into its divergence-free part `w = 𝒫m` and the scalar
/// `v = Λ⁻¹ div m`, with `𝒫 = Id − ∇div(−Δ)⁻¹`.
///
/// The mean, and the self-conjugate Nyquist-only modes on which odd
/// derivatives vanish, are assigned entirely to `w`.
pub fn project(m: &SpectralField) -> Result<(SpectralField, SpectralField)> {
    check_vector(m)?;
    let grid = m.grid().clone();
    let d = grid.dim();
    let n = grid.len();
    let mut w = m.clone();
    let mut v = SpectralField::zeros(&grid, 1);
    let src = m.coeffs();
    let (wc, vc) = (w.coeffs_mut(), v.coeffs_mut());
    grid.for_each_mode(|idx, k| {
        let xi = grid.derivative_wavevector(k);
        let r2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
        if r2 == 0.0 {
            return;
        }
        let r = r2.sqrt();
        let mut dot = Complex64::new(0.0, 0.0);
        for c in 0..d {
            dot += src[c * n + idx] * (xi[c] / r);
        }
        for c in 0..d {
            wc[c * n + idx] -= dot * (xi[c] / r);
        }
        vc[idx] = I * dot;
    });
    Ok((w, v))
}

/// `𝒫^⊥m = −i (ξ/|ξ|) v̂`, the compressible part rebuilt from `v`.
pub fn compressible_part(v: &SpectralField) -> SpectralField {
    let grid = v.grid().clone();
    let d = grid.dim();
    let n = grid.len();
    let mut out = SpectralField::zeros(&grid, d);
    let src = v.component(0);
    let dst = out.coeffs_mut();
    grid.for_each_mode(|idx, k| {
        let xi = grid.derivative_wavevector(k);
        let r2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
        if r2 == 0.0 {
            return;
        }
        let r = r2.sqrt();
        let z = -I * src[idx];
        for c in 0..d {
            dst[c * n + idx] = z * (xi[c] / r);
        }
    });
    out
}

/// Inverse of [`project`]: `m = w + 𝒫^⊥m`.
pub fn recombine(w: &SpectralField, v: &SpectralField) -> Result<SpectralField> {
    w.add(&compressible_part(v))
}

/// Zeroes every mode outside the two-thirds band.
pub fn dealias(u: &mut SpectralField) {
    let grid = u.grid().clone();
    let n = grid.len();
    let comps = u.components();
    let coeffs = u.coeffs_mut();
    grid.for_each_mode(|idx, k| {
        if !grid.is_resolved(k) {
            for c in 0..comps {
                coeffs[c * n + idx] = Complex64::new(0.0, 0.0);
            }
        }
    });
}

pub fn dealiased(u: &SpectralField) -> SpectralField {
    let mut out = u.clone();
    dealias(&mut out);
    out
}

/// Boolean mask of the resolved band, in storage order.
pub fn dealias_mask(grid: &Grid) -> Vec<bool> {
    let mut mask = vec![false; grid.len()];
    grid.for_each_mode(|idx, k| mask[idx] = grid.is_resolved(k));
    mask
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{PhysicalField, SpectralTransform};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random_field(grid: &Grid, comps: usize, seed: u64) -> SpectralField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = SpectralTransform::new(grid);
        let p = PhysicalField::from_fn(grid, comps, |_, _| rng.random_range(-1.0..1.0));
        t.forward(&p).unwrap()
    }

    fn random_physical(grid: &Grid, comps: usize, seed: u64) -> SpectralField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let vals: Vec<f64> = (0..comps * grid.len())
            .map(|_| rng.random_range(-1.0..1.0))
            .collect();
        let p = PhysicalField::from_values(grid, comps, vals).unwrap();
        SpectralTransform::new(grid).forward(&p).unwrap()
    }

    #[test]
    fn order_zero_removes_mean() {
        let g = Grid::new(2, 16, 3.0).unwrap();
        let u = random_physical(&g, 1, 1);
        let out = fractional_laplacian(&u, 0.0).unwrap();
        assert_eq!(out.component(0)[0], Complex64::new(0.0, 0.0));
        assert_eq!(&out.coeffs()[1..], &u.coeffs()[1..]);
    }

    #[test]
    fn order_two_on_a_sine() {
        let l = 10.0;
        let g = Grid::new(1, 32, l).unwrap();
        let t = SpectralTransform::new(&g);
        let kx = 2.0 * PI * 3.0 / l;
        let p = PhysicalField::from_fn(&g, 1, |_, x| (kx * x[0]).sin());
        let u = t.forward(&p).unwrap();
        let out = t.inverse(&fractional_laplacian(&u, 2.0).unwrap()).unwrap();
        for (a, b) in out.values().iter().zip(p.values()) {
            assert!((a - kx * kx * b).abs() < 1e-12);
        }
    }

    #[test]
    fn negative_order_needs_zero_mean() {
        let g = Grid::new(2, 8, 1.0).unwrap();
        let u = random_physical(&g, 1, 3);
        assert!(matches!(
            fractional_laplacian(&u, -1.0),
            Err(Error::HomogeneityObstruction { .. })
        ));
        let mut u0 = u.clone();
        u0.remove_mean();
        let back = fractional_laplacian(&fractional_laplacian(&u0, 1.0).unwrap(), -1.0).unwrap();
        assert!(back.relative_distance(&u0).unwrap() < 1e-12);
    }

    #[test]
    fn orders_compose() {
        let g = Grid::new(3, 8, 2.0).unwrap();
        let mut u = random_physical(&g, 1, 4);
        u.remove_mean();
        for (s1, s2) in [(0.5, 1.3), (-0.7, 2.0), (1.0, -1.0)] {
            let ab = fractional_laplacian(&fractional_laplacian(&u, s1).unwrap(), s2).unwrap();
            let direct = fractional_laplacian(&u, s1 + s2).unwrap();
            assert!(ab.relative_distance(&direct).unwrap() < 1e-12);
        }
    }

    #[test]
    fn gradients_are_compressible() {
        let g = Grid::new(2, 16, 5.0).unwrap();
        let phi = random_physical(&g, 1, 5);
        let m = gradient(&phi).unwrap();
        let (w, v) = project(&m).unwrap();
        assert!(w.l2_norm() < 1e-12 * m.l2_norm());
        let back = recombine(&w, &v).unwrap();
        assert!(back.relative_distance(&m).unwrap() < 1e-12);
    }

    #[test]
    fn projection_is_orthogonal_and_idempotent() {
        for dim in [2, 3] {
            let g = Grid::new(dim, 8, 1.5).unwrap();
            let m = random_physical(&g, dim, 6);
            let (w, v) = project(&m).unwrap();
            let div = divergence(&w).unwrap();
            assert!(div.max_abs_coeff() < 1e-12 * m.max_abs_coeff() * g.nyquist());
            let lhs = m.l2_norm().powi(2);
            let rhs = w.l2_norm().powi(2) + v.l2_norm().powi(2);
            assert!((lhs - rhs).abs() < 1e-10 * lhs);
            let (w2, v2) = project(&w).unwrap();
            assert!(w2.relative_distance(&w).unwrap() < 1e-13);
            assert!(v2.max_abs_coeff() < 1e-13 * w.max_abs_coeff());
            assert!(recombine(&w, &v).unwrap().relative_distance(&m).unwrap() < 1e-12);
            assert!(v.hermitian_defect() < 1e-13);
        }
    }

    #[test]
    fn divergence_free_input_has_no_v() {
        let g = Grid::new(2, 16, 1.0).unwrap();
        let psi = random_field(&g, 1, 9);
        let grad = gradient(&psi).unwrap();
        let mut m = SpectralField::zeros(&g, 2);
        let n = g.len();
        let (gx, gy) = grad.coeffs().split_at(n);
        m.coeffs_mut()[..n].copy_from_slice(gy);
        for (dst, z) in m.coeffs_mut()[n..].iter_mut().zip(gx) {
            *dst = -z;
        }
        let (_, v) = project(&m).unwrap();
        assert!(v.max_abs_coeff() < 1e-13 * m.max_abs_coeff().max(1.0));
    }

    #[test]
    fn dealias_keeps_two_thirds() {
        let g = Grid::new(1, 16, 1.0).unwrap();
        let mask = dealias_mask(&g);
        let kept: Vec<i64> = (0..g.len()).filter(|&i| mask[i]).map(|i| g.signed_index(i)).collect();
        assert!(kept.iter().all(|k| k.abs() <= 5));
        assert_eq!(kept.len(), 11);
    }
}
