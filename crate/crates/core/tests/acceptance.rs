//! Acceptance suite. Runs every criterion in sequence, prints one
//! `[PASS]`/`[FAIL]` line each and exits nonzero if any fails.
//!
//! `cargo test --test acceptance -- 1 4 9` runs a subset by number.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use nalgebra::Matrix2;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use korteweg::data::InitialData;
use korteweg::decay::{convolution_inequality_check, convolution_stability, uniform_sum, uniform_bound_check};
use korteweg::experiment::{checks, run_manifest, ExperimentManifest, RunOutcome};
use korteweg::linear::{certify, classify_regime, crossover, eigenvalues_closed_form, FluidParams, Regime};
use korteweg::Result;

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: String) -> Result<Verdict> {
    Ok(Verdict { passed, detail })
}

fn manifest(name: &str) -> Result<ExperimentManifest> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../manifests").join(name);
    ExperimentManifest::load(&path)
}

fn run(name: &str, scratch: &Path) -> Result<(ExperimentManifest, RunOutcome)> {
    let m = manifest(name)?;
    let out = run_manifest(&m, &scratch.join(m.label()))?;
    Ok((m, out))
}

fn fit_at(summary: &Value, s: f64) -> Option<f64> {
    summary["fits"]
        .as_array()?
        .iter()
        .find(|f| (f["s"].as_f64().unwrap_or(f64::NAN) - s).abs() < 1e-12)?["fitted_slope"]
        .as_f64()
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (lo.ln() + rng.random::<f64>() * (hi / lo).ln()).exp()
}

fn random_params(rng: &mut ChaCha8Rng, gamma: f64) -> FluidParams {
    let mu = log_uniform(rng, 0.05, 5.0);
    let lambda = (rng.random::<f64>() * 2.0 - 1.0) * 0.9 * mu;
    FluidParams::new(log_uniform(rng, 0.2, 5.0), mu, lambda, log_uniform(rng, 0.05, 5.0), gamma)
        .expect("admissible draw")
}

/// `(a, v)` system matrix, built from the coefficients directly.
fn system(p: &FluidParams, xi: f64) -> Matrix2<f64> {
    let rs = p.rho_star();
    let nu_bar = (2.0 * p.mu() + p.lambda()) / rs;
    Matrix2::new(0.0, -xi, (p.gamma() + p.kappa() * rs * xi * xi) * xi, -nu_bar * xi * xi)
}

/// `tr² − 4 det` of the system matrix.
fn discriminant(p: &FluidParams, xi: f64) -> f64 {
    let m = system(p, xi);
    let tr = m.trace();
    tr * tr - 4.0 * m.determinant()
}

/// Similarity `diag(s, 1)` equalising the off-diagonal magnitudes.
fn balance(m: &Matrix2<f64>) -> f64 {
    (m[(1, 0)].abs() / m[(0, 1)].abs()).sqrt()
}

fn criterion_1() -> Result<Verdict> {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst: f64 = 0.0;
    for i in 0..10_000 {
        let gamma = if i % 5 == 0 { 0.0 } else { log_uniform(&mut rng, 1e-3, 10.0) };
        let p = random_params(&mut rng, gamma);
        let xi = log_uniform(&mut rng, 1e-2, 1e2);
        let (lp, lm) = eigenvalues_closed_form(&p, xi)?;
        let m = system(&p, xi);
        let s = balance(&m);
        let b = Matrix2::new(m[(0, 0)], m[(0, 1)] * s, m[(1, 0)] / s, m[(1, 1)]);
        let ev = b.complex_eigenvalues();
        let scale = lp.norm().max(lm.norm());
        let direct = (lp - ev[0]).norm().max((lm - ev[1]).norm());
        let swapped = (lp - ev[1]).norm().max((lm - ev[0]).norm());
        worst = worst.max(direct.min(swapped) / scale);
    }
    verdict(worst < 1e-10, format!("max relative error {worst:.2e} over 10^4 draws (limit 1e-10)"))
}

fn criterion_2() -> Result<Verdict> {
    let mut mismatches = 0;
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    for i in 0..10_000 {
        let gamma = if i % 5 == 0 { 0.0 } else { log_uniform(&mut rng, 1e-3, 10.0) };
        let p = random_params(&mut rng, gamma);
        let xi = log_uniform(&mut rng, 1e-2, 1e2);
        let disc = discriminant(&p, xi);
        let m = system(&p, xi);
        let scale = m.trace() * m.trace();
        let expected = if disc.abs() <= 1e-9 * scale {
            continue;
        } else if disc < 0.0 {
            Regime::ComplexPair
        } else {
            Regime::RealPair
        };
        if classify_regime(&p, xi)?.regime != expected {
            mismatches += 1;
        }
    }

    // ν² = 4κρ*³ with dyadic values, so the threshold holds exactly.
    let mut off_manifold = 0;
    for i in 0..100 {
        let rho = 2f64.powi(i % 5 - 2);
        let mu = (1 + i % 13) as f64 / 16.0;
        let lambda = (i % 3) as f64 * mu / 4.0;
        let nu = 2.0 * mu + lambda;
        let kappa = nu * nu / (4.0 * rho * rho * rho);
        let p = FluidParams::new(rho, mu, lambda, kappa, 0.0)?;
        for xi in [1e-2, 0.3, 1.0, 7.0, 1e2] {
            if classify_regime(&p, xi)?.regime != Regime::DoubleRoot {
                off_manifold += 1;
            }
        }
    }

    // Crossover by bisection on the sign of the discriminant.
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let rho = log_uniform(&mut rng, 0.2, 5.0);
        let mu = log_uniform(&mut rng, 0.05, 5.0);
        let nu = 2.0 * mu;
        let kappa = rng.random_range(0.05..0.9) * nu * nu / (4.0 * rho * rho * rho);
        let p = FluidParams::new(rho, mu, 0.0, kappa, log_uniform(&mut rng, 1e-3, 10.0))?;
        let (mut lo, mut hi) = (1e-8, 1e8);
        for _ in 0..200 {
            let mid = (lo * hi as f64).sqrt();
            if discriminant(&p, mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let root = (lo * hi).sqrt();
        let located = crossover(&p).unwrap_or(f64::NAN);
        worst = worst.max((located - root).abs() / root);
    }
    let ok = mismatches == 0 && off_manifold == 0 && worst < 1e-10;
    verdict(
        ok,
        format!(
            "{mismatches} sign mismatches in 10^4 draws, {off_manifold} misses on 100 threshold sets, \
             crossover error {worst:.2e} (limit 1e-10)"
        ),
    )
}

fn criterion_3() -> Result<Verdict> {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let times: Vec<f64> = (0..=100).map(|i| 0.1 * i as f64).collect();
    let mut sandwich_worst: f64 = 0.0;
    let mut flow_worst: f64 = 0.0;
    let mut min_rate = f64::INFINITY;
    for gamma in [0.0, 0.1, 1.0, 10.0] {
        for _ in 0..4 {
            let p = random_params(&mut rng, gamma);
            let cert = certify(&p)?;
            min_rate = min_rate.min(cert.c_tilde);
            for _ in 0..250 {
                let xi = log_uniform(&mut rng, 1e-2, 1e2);
                let a = Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
                let v = Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
                let energy = korteweg::linear::LyapunovCertificate::reference_energy(&p, a, v, xi);
                let l0 = cert.value(&p, a, v, xi);
                sandwich_worst = sandwich_worst.max(energy / (cert.c1 * l0)).max(l0 / (cert.c1 * energy));

                let m = system(&p, xi);
                let s = balance(&m);
                let b = Matrix2::new(m[(0, 0)], m[(0, 1)] * s, m[(1, 0)] / s, m[(1, 1)]);
                for &t in &times {
                    let e = (b * t).exp();
                    let (ba, bv) = (a * s, v);
                    let at = (ba * e[(0, 0)] + bv * e[(0, 1)]) / s;
                    let vt = ba * e[(1, 0)] + bv * e[(1, 1)];
                    let lt = cert.value(&p, at, vt, xi);
                    let bound = l0 * (-2.0 * cert.c_tilde * xi * xi * t).exp();
                    flow_worst = flow_worst.max((lt - bound) / l0);
                }
            }
        }
    }
    let ok = min_rate > 0.0 && sandwich_worst <= 1.0 + 1e-12 && flow_worst <= 1e-12;
    verdict(
        ok,
        format!(
            "sandwich ratio {sandwich_worst:.6} (<= 1), worst flow excess {flow_worst:.2e}, min c_tilde {min_rate:.3e}"
        ),
    )
}

fn criterion_4(scratch: &Path) -> Result<Verdict> {
    let (m, out) = run("linear-decay.toml", scratch)?;
    let grid = m.grid.clone().expect("grid");
    let setup = grid.dim == 2 && grid.n == 512 && grid.box_length == 100.0 && m.window() == (5.0, 500.0);
    let mut ok = setup && m.linear_decay.gaps == [1.0, 2.0];
    let mut parts = Vec::new();
    for f in out.summary["fits"].as_array().cloned().unwrap_or_default() {
        let gap = f["s1"].as_f64().unwrap_or(f64::NAN) - f["s2"].as_f64().unwrap_or(f64::NAN);
        let slope = f["fitted_slope"].as_f64().unwrap_or(f64::NAN);
        let limit = -gap / 2.0 + 0.1;
        ok &= slope <= limit;
        parts.push(format!("gap {gap}: slope {slope:.3} <= {limit:.2}"));
    }
    verdict(ok && out.passed(), parts.join(", "))
}

fn criterion_5(scratch: &Path) -> Result<Verdict> {
    let (m, out) = run("maxreg.toml", scratch)?;
    let reports = out.summary["reports"].as_array().cloned().unwrap_or_default();
    let gammas: Vec<f64> = reports.iter().filter_map(|r| r["gamma"].as_f64()).collect();
    let ratios: Vec<f64> = reports.iter().filter_map(|r| r["ratio"].as_f64()).collect();
    let hi = ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let ok = gammas == [0.0, 0.1, 1.0, 10.0] && m.maxreg.gammas == gammas && lo > 0.0 && hi / lo < 5.0;
    let shown: Vec<String> = ratios.iter().map(|r| format!("{r:.3}")).collect();
    verdict(ok, format!("ratios [{}], max/min {:.3} (limit 5)", shown.join(", "), hi / lo))
}

fn criterion_6(scratch: &Path) -> Result<Verdict> {
    let (m, out) = run("nonlinear-decay.toml", scratch)?;
    let grid = m.grid.clone().expect("grid");
    let (p, _) = m.model()?;
    let bump = matches!(m.data, Some(InitialData::GaussianBump { amplitude, .. }) if amplitude == 0.01);
    let setup = grid.dim == 2 && grid.n == 512 && grid.box_length == 100.0 && p.gamma() == 1.0 && bump
        && m.window() == (5.0, 200.0);
    let theory = -(grid.dim as f64) / 4.0;
    let slope = fit_at(&out.summary, 0.0).unwrap_or(f64::NAN);
    let spread = out.summary["d_spread"].as_f64().unwrap_or(f64::NAN);
    let ok = setup && (slope - theory).abs() <= 0.15 * theory.abs() && spread < 3.0 && out.passed();
    verdict(ok, format!("B^0 slope {slope:.3} vs {theory} +- 15%, D max/min {spread:.3} (limit 3)"))
}

fn criterion_7(scratch: &Path) -> Result<Verdict> {
    let (m, out) = run("critical-3d.toml", scratch)?;
    let grid = m.grid.clone().expect("grid");
    let (p, law) = m.model()?;
    let setup = grid.dim == 3 && grid.n == 128 && grid.box_length == 50.0 && m.time.expect("time").horizon == 100.0;
    let sound = law.derivative(p.rho_star()).abs();
    let slope = fit_at(&out.summary, 0.0).unwrap_or(f64::NAN);

    let rows = std::fs::read_to_string(out.out_dir.join("diagnostics.csv"))?;
    let deviation: Vec<f64> = rows
        .lines()
        .skip(1)
        .map(|l| {
            let c: Vec<f64> = l.split(',').map(|x| x.parse().unwrap_or(f64::NAN)).collect();
            (c[4] - p.rho_star()).abs().max((c[5] - p.rho_star()).abs())
        })
        .collect();
    let max_dev = deviation.iter().cloned().fold(0.0, f64::max);
    let min_rho: f64 = rows
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(4).and_then(|x| x.parse().ok()).unwrap_or(f64::NAN))
        .fold(f64::INFINITY, f64::min);
    let bounded = max_dev.is_finite() && max_dev <= 2.0 * deviation[0];
    let ok = setup && sound < 1e-12 && p.gamma() == 0.0 && bounded && min_rho > 0.0 && slope <= -0.55 && out.passed();
    verdict(
        ok,
        format!(
            "P'(rho*) {sound:.1e}, sup |rho - rho*| {max_dev:.3e} (initial {:.3e}), min rho {min_rho:.4}, \
             B^0 slope {slope:.3} (limit -0.55)",
            deviation[0]
        ),
    )
}

fn criterion_8(scratch: &Path) -> Result<Verdict> {
    let (m, out) = run("picard.toml", scratch)?;
    let grid = m.grid.clone().expect("grid");
    let (p, _) = m.model()?;
    let small = matches!(m.data, Some(InitialData::GaussianBump { amplitude, .. }) if amplitude == 1e-3);
    let setup = grid.dim == 2 && p.gamma() == 1.0 && small && m.time.expect("time").horizon == 1.0;
    let ratios: Vec<f64> = out.summary["ratios"]
        .as_array()
        .map(|r| r.iter().filter_map(Value::as_f64).collect())
        .unwrap_or_default();
    let worst = ratios.iter().cloned().fold(0.0, f64::max);
    let cmp = &out.summary["comparison"];
    let distance = cmp["distance"].as_f64().unwrap_or(f64::NAN);
    let tolerance: f64 = ["picard_dt_error", "stepper_dt_error", "iteration_error"]
        .iter()
        .map(|k| cmp[*k].as_f64().unwrap_or(f64::NAN))
        .sum();
    let ok = setup && ratios.len() >= 5 && worst < 0.5 && distance <= tolerance && out.passed();
    verdict(
        ok,
        format!("max delta ratio {worst:.2e} (limit 0.5), limit vs stepper {distance:.2e} within {tolerance:.2e}"),
    )
}

fn criterion_9() -> Result<Verdict> {
    let measured = [
        ("mass drift", checks::mass_drift()?, 1e-14),
        ("Korteweg identity", checks::korteweg_identity()?, 1e-9),
        ("forms at gamma = 0", checks::forms_at_zero_sound_speed()?, 1e-8),
        ("Bony", checks::bony_reconstruction()?, 1e-10),
        ("partition of unity", checks::partition_of_unity()?, 1e-12),
        ("scaling", checks::scaling_residual()?, 1e-4),
    ];
    let ok = measured.iter().all(|(_, v, lim)| *v < *lim);
    let parts: Vec<String> = measured.iter().map(|(n, v, lim)| format!("{n} {v:.1e}<{lim:.0e}")).collect();
    verdict(ok, parts.join(", "))
}

/// `∫₀ᵗ ⟨τ⟩^{−a}⟨t−τ⟩^{−b} dτ` by composite Simpson in `u = ln⟨τ⟩` on each half.
fn convolution_oracle(a: f64, b: f64, t: f64) -> f64 {
    let half = |p: f64, q: f64| {
        let top = (1.0 + 0.5 * t).ln();
        let n = 4000;
        let h = top / n as f64;
        let f = |u: f64| {
            let x = u.exp();
            x.powf(1.0 - p) * (2.0 + t - x).powf(-q)
        };
        let mut s = f(0.0) + f(top);
        for i in 1..n {
            s += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * h / 3.0
    };
    half(a, b) + half(b, a)
}

fn criterion_10() -> Result<Verdict> {
    let mut ok = true;
    let mut parts = Vec::new();
    for (a, b) in [(2.0, 2.0), (2.0, 0.5), (1.5, 3.0)] {
        let change = convolution_stability(a, b, 1000.0)?;
        let constant = convolution_inequality_check(a, b, 1000.0)?;
        let n = 120;
        let oracle = (0..=n)
            .map(|i| {
                let t = 10f64.powf(3.0 * i as f64 / n as f64);
                convolution_oracle(a, b, t) * (1.0 + t).powf(a.min(b))
            })
            .fold(0.0, f64::max);
        let agree = (constant - oracle).abs() / oracle;
        ok &= change < 0.05 && agree < 1e-6;
        parts.push(format!("({a},{b}) change {:.2}% oracle {agree:.0e}", 100.0 * change));
    }
    for (r, gamma_half) in [(1.0, std::f64::consts::PI.sqrt()), (4.0, 1.0)] {
        let rep = uniform_bound_check(r, 1.0)?;
        // The sum is 1-periodic in log₄ t with mean Γ(r/2)/(2 ln 2).
        let n = 4000;
        let samples: Vec<f64> = (0..n).map(|i| uniform_sum(r, 1.0, 4f64.powf(i as f64 / n as f64))).collect();
        let mean = samples.iter().sum::<f64>() / n as f64;
        let sup = samples.iter().cloned().fold(0.0, f64::max);
        let mean_err = (mean - gamma_half / (2.0 * 2f64.ln())).abs() / mean;
        let sup_err = (rep.sup - sup).abs() / sup;
        ok &= rep.sup.is_finite() && rep.interior && rep.decade_spread < 0.01 && mean_err < 1e-8 && sup_err < 1e-3;
        parts.push(format!("r = {r}: sup {:.4} spread {:.1e}", rep.sup, rep.decade_spread));
    }
    verdict(ok, parts.join(", "))
}

type Criterion = (u32, &'static str, Duration, fn(&Path) -> Result<Verdict>);

fn main() -> ExitCode {
    let selected: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let minutes = |m: u64| Duration::from_secs(60 * m);
    let criteria: [Criterion; 10] = [
        (1, "eigenvalue oracle", Duration::from_secs(5), |_| criterion_1()),
        (2, "regime classification", Duration::from_secs(30), |_| criterion_2()),
        (3, "Lyapunov certificate", Duration::from_secs(30), |_| criterion_3()),
        (4, "linear decay exponents", minutes(2), criterion_4),
        (5, "gamma-uniform maximal regularity", minutes(1), criterion_5),
        (6, "nonlinear small-data decay", minutes(10), criterion_6),
        (7, "gamma = 0 critical case", minutes(30), criterion_7),
        (8, "Picard contraction", minutes(5), criterion_8),
        (9, "structural invariants", minutes(5), |_| criterion_9()),
        (10, "appendix checks", Duration::from_secs(30), |_| criterion_10()),
    ];
    let scratch = tempfile::tempdir().expect("scratch directory");
    let scratch: PathBuf = scratch.path().to_path_buf();
    let mut failed = 0;
    let mut out = std::io::stdout();
    for (id, name, limit, f) in criteria {
        if !selected.is_empty() && !selected.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let result = f(&scratch);
        let elapsed = start.elapsed();
        let (passed, detail) = match result {
            Ok(v) => (v.passed && elapsed < limit, v.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !passed {
            failed += 1;
        }
        let _ = writeln!(
            out,
            "[{}] {id:>2} {name}: {detail} [{:.1} s, limit {} s]",
            if passed { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            limit.as_secs()
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        let _ = writeln!(out, "{failed} criteria failed");
        ExitCode::FAILURE
    }
}
