use super::manifest::AppendixSpec;
use super::runs::Check;
use crate::data::InitialData;
use crate::decay::{convolution_stability, uniform_bound_check};
use crate::error::Result;
use crate::linear::FluidParams;
use crate::littlewood_paley::{bony_decompose, dealiased_product, DyadicFilterBank};
use crate::solver::{
    korteweg_div, nonlinear_rhs, scaling_invariance_probe, KortewegForm, NonlinearForm, PressureLaw, ScalingRun,
    Scheme, Stepper,
};
use crate::spectral::{Grid, SpectralTransform};

pub const MASS_DRIFT_LIMIT: f64 = 1e-14;
pub const KORTEWEG_LIMIT: f64 = 1e-9;
pub const FORMS_LIMIT: f64 = 1e-8;
pub const BONY_LIMIT: f64 = 1e-10;
pub const PARTITION_LIMIT: f64 = 1e-12;
pub const SCALING_LIMIT: f64 = 1e-4;

fn band(amplitude: f64) -> InitialData {
    InitialData::RandomBand { amplitude, j_lo: -1, j_hi: 1 }
}

/// Drift of the mean density over 10³ nonlinear steps.
pub fn mass_drift() -> Result<f64> {
    let g = Grid::new(2, 32, 20.0)?;
    let p = FluidParams::new(1.0, 0.5, 0.0, 1.0, 1.0)?;
    let law = PressureLaw::Adiabatic { coefficient: 1.0 / 1.4, exponent: 1.4 };
    let mut s = band(0.05).generate(&g, 11)?;
    let m0 = s.conserved_mass();
    let mut st = Stepper::new(&g, &p, &law, Scheme::Etdrk2, NonlinearForm::Divergence)?;
    for _ in 0..1000 {
        s = st.step(&s, 0.05)?;
    }
    Ok((s.conserved_mass() - m0).abs() / p.rho_star())
}

/// Divergence of the Korteweg tensor against `κρ∇Δρ`.
pub fn korteweg_identity() -> Result<f64> {
    let g = Grid::new(2, 64, 20.0)?;
    let a = band(0.1).generate(&g, 12)?.a;
    let p = FluidParams::new(1.0, 0.5, 0.0, 0.7, 1.0)?;
    korteweg_div(&a, &p, KortewegForm::Tensor)?.relative_distance(&korteweg_div(&a, &p, KortewegForm::Identity)?)
}

/// Standard and divergence forms of the nonlinearity at `γ = 0`.
pub fn forms_at_zero_sound_speed() -> Result<f64> {
    let g = Grid::new(2, 64, 20.0)?;
    let s = band(0.02).generate(&g, 13)?;
    let (law, rs) = PressureLaw::van_der_waals_critical(3.0, 1.0 / 3.0, 2.4)?;
    let p = FluidParams::new(rs, 0.5, 0.0, 0.8, 0.0)?;
    let a = nonlinear_rhs(&s.a, &s.m, &p, &law, NonlinearForm::Standard)?;
    let b = nonlinear_rhs(&s.a, &s.m, &p, &law, NonlinearForm::Divergence)?;
    a.relative_distance(&b)
}

/// `T_u v + T_v u + R(u, v)` against the product itself.
pub fn bony_reconstruction() -> Result<f64> {
    let g = Grid::new(2, 64, 20.0)?;
    let t = SpectralTransform::new(&g);
    let bank = DyadicFilterBank::new(&g)?;
    let u = InitialData::PowerLaw { amplitude: 1.0, s: 0.0 }.generate(&g, 14)?.a;
    let v = InitialData::PowerLaw { amplitude: 1.0, s: 0.5 }.generate(&g, 15)?.a;
    bony_decompose(&bank, &t, &u, &v)?.sum()?.relative_distance(&dealiased_product(&t, &u, &v)?)
}

/// `max |Σ_j φ_j − 1|` on two and three dimensional lattices.
pub fn partition_of_unity() -> Result<f64> {
    let two = DyadicFilterBank::new(&Grid::new(2, 128, 50.0)?)?.partition_residual();
    let three = DyadicFilterBank::new(&Grid::new(3, 32, 10.0)?)?.partition_residual();
    Ok(two.max(three))
}

/// Relative residual of the scaling symmetry on a nonlinear run with `ν = 2`.
pub fn scaling_residual() -> Result<f64> {
    let g = Grid::new(2, 32, 16.0)?;
    let s = band(0.05).generate(&g, 16)?;
    let p = FluidParams::new(1.0, 0.4, 0.0, 0.8, 1.0)?;
    let law = PressureLaw::Adiabatic { coefficient: 1.0, exponent: 1.0 };
    let run = ScalingRun {
        time: 0.5,
        dt: 0.1,
        scheme: Scheme::Etdrk2,
        form: NonlinearForm::Divergence,
        linear_only: false,
    };
    scaling_invariance_probe(&s, 2.0, &p, &law, &run)
}

pub fn invariant_suite() -> Result<Vec<Check>> {
    Ok(vec![
        Check::below("mass drift over 1000 steps", mass_drift()?, MASS_DRIFT_LIMIT),
        Check::below("Korteweg tensor vs identity", korteweg_identity()?, KORTEWEG_LIMIT),
        Check::below("standard vs divergence form at gamma = 0", forms_at_zero_sound_speed()?, FORMS_LIMIT),
        Check::below("Bony reconstruction", bony_reconstruction()?, BONY_LIMIT),
        Check::below("partition of unity", partition_of_unity()?, PARTITION_LIMIT),
        Check::below("scaling invariance residual", scaling_residual()?, SCALING_LIMIT),
    ])
}

pub fn appendix_suite() -> Result<Vec<Check>> {
    let spec = AppendixSpec::default();
    let mut checks = Vec::new();
    for &[a, b] in &spec.pairs {
        checks.push(Check::below(
            format!("convolution constant change ({a}, {b})"),
            convolution_stability(a, b, spec.t_max)?,
            spec.max_change,
        ));
    }
    for &r in &spec.exponents {
        let rep = uniform_bound_check(r, spec.c0)?;
        checks.push(Check::holds(format!("uniform bound r = {r}: finite interior sup"), rep.sup.is_finite() && rep.interior));
        checks.push(Check::below(format!("uniform bound r = {r}: decade spread"), rep.decade_spread, 0.01));
    }
    Ok(checks)
}

/// The appendix checks followed by the structural invariants.
pub fn check_suite() -> Result<Vec<Check>> {
    let mut all = appendix_suite()?;
    all.extend(invariant_suite()?);
    Ok(all)
}
