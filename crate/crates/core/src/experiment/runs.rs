use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::manifest::{ExperimentKind, ExperimentManifest, FitRule};
use crate::data::InitialData;
use crate::decay::{
    convolution_inequality_check, convolution_stability, initial_size, uniform_bound_check, DecayAccumulator,
    DecayFunctionalConfig, DecaySeries,
};
use crate::error::{Error, Result};
use crate::linear::{
    certify, classify_regime, crossover, dispersion_table, maximal_regularity_probe, radicand, semigroup_decay_probe,
    state_besov, write_dispersion_csv, FluidParams, Regime, SampledForcing,
};
use crate::littlewood_paley::{DyadicFilterBank, Summability};
use crate::solver::{
    picard_solve, Checkpoint, FluidState, PicardConfig, PressureLaw, StateDiagnostics, Stepper,
};
use crate::spectral::{Grid, SpectralField};

/// One pass/fail judgement of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub limit: f64,
    pub passed: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Check {
            name: name.into(),
            value,
            limit,
            passed: value <= limit,
        }
    }

    pub fn below(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Check {
            name: name.into(),
            value,
            limit,
            passed: value < limit,
        }
    }

    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        Check {
            name: name.into(),
            value: if ok { 1.0 } else { 0.0 },
            limit: 1.0,
            passed: ok,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunOutcome {
    pub kind: ExperimentKind,
    pub label: String,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub checks: Vec<Check>,
    pub summary: serde_json::Value,
}

impl RunOutcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }
}

pub const STATUS_FILE: &str = "status.json";

fn write_status(dir: &Path, value: serde_json::Value) -> Result<()> {
    write_json(&dir.join(STATUS_FILE), &value)
}

pub(crate) fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn csv_file(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn e(x: f64) -> String {
    format!("{x:.12e}")
}

/// Runs one manifest into `out_dir`.
///
/// `status.json` reads `running` while artifacts are written; on an error it
/// is rewritten as `error` and whatever else is in the directory is partial.
pub fn run_manifest(manifest: &ExperimentManifest, out_dir: &Path) -> Result<RunOutcome> {
    manifest.validate()?;
    std::fs::create_dir_all(out_dir)?;
    write_status(out_dir, json!({ "state": "running", "kind": manifest.kind.as_str(), "seed": manifest.seed }))?;
    write_json(&out_dir.join("manifest.json"), manifest)?;
    let result = dispatch(manifest, out_dir);
    match &result {
        Ok((checks, summary)) => {
            let passed = checks.iter().all(|c| c.passed);
            write_json(&out_dir.join("checks.json"), checks)?;
            write_json(&out_dir.join("summary.json"), summary)?;
            write_status(
                out_dir,
                json!({ "state": if passed { "passed" } else { "failed" }, "kind": manifest.kind.as_str(), "seed": manifest.seed }),
            )?;
        }
        Err(err) => {
            write_status(
                out_dir,
                json!({
                    "state": "error",
                    "partial": true,
                    "kind": manifest.kind.as_str(),
                    "seed": manifest.seed,
                    "message": err.to_string(),
                }),
            )?;
        }
    }
    let (checks, summary) = result?;
    Ok(RunOutcome {
        kind: manifest.kind,
        label: manifest.label(),
        seed: manifest.seed,
        out_dir: out_dir.to_path_buf(),
        checks,
        summary,
    })
}

type Judged = (Vec<Check>, serde_json::Value);

fn dispatch(m: &ExperimentManifest, dir: &Path) -> Result<Judged> {
    match m.kind {
        ExperimentKind::Dispersion => dispersion(m, dir),
        ExperimentKind::LinearDecay => linear_decay(m, dir),
        ExperimentKind::Maxreg => maxreg(m, dir),
        ExperimentKind::NonlinearRun => nonlinear_run(m, dir),
        ExperimentKind::DecaySuite => decay_suite(m, dir),
        ExperimentKind::Picard => picard(m, dir),
        ExperimentKind::AppendixChecks => appendix(m, dir),
    }
}

fn dispersion(m: &ExperimentManifest, dir: &Path) -> Result<Judged> {
    let (p, _) = m.model()?;
    let spec = &m.dispersion;
    let cert = certify(&p)?;
    let rows = dispersion_table(&p, &cert, spec.xi_min, spec.xi_max, spec.points)?;
    write_dispersion_csv(&rows, csv_file(&dir.join("dispersion.csv"))?)?;
    let mut w = csv_file(&dir.join("regime_map.csv"))?;
    writeln!(w, "gamma,xi_mag,radicand,regime")?;
    for &g in &spec.map_gammas {
        let pg = p.with_gamma(g)?;
        for i in 0..spec.points {
            let x = spec.xi_min * (spec.xi_max / spec.xi_min).powf(i as f64 / (spec.points - 1) as f64);
            let info = classify_regime(&pg, x)?;
            writeln!(w, "{},{},{},{}", e(g), e(x), e(radicand(&pg, x)), info.regime.as_str())?;
        }
    }
    w.flush()?;
    let xc = crossover(&p);
    let mut checks = vec![Check::holds("lyapunov certificate has c_tilde > 0", cert.c_tilde > 0.0)];
    if let Some(x) = xc {
        checks.push(Check::holds(
            "crossover is a double root",
            classify_regime(&p, x)?.regime == Regime::DoubleRoot,
        ));
        if x > spec.xi_min && x < spec.xi_max {
            checks.push(Check::holds("crossover row present", rows.iter().any(|r| r.xi_mag == x)));
        }
    }
    Ok((checks, json!({ "crossover": xc, "certificate": cert, "nu": p.nu(), "gamma": p.gamma() })))
}

fn generated_data(m: &ExperimentManifest, grid: &Grid) -> Result<FluidState> {
    m.data
        .as_ref()
        .ok_or_else(|| Error::config("data", "missing"))?
        .generate(grid, m.seed)
}

fn linear_decay(m: &ExperimentManifest, dir: &Path) -> Result<Judged> {
    let grid = m.build_grid()?;
    let (p, _) = m.model()?;
    let bank = DyadicFilterBank::new(&grid)?;
    let data = generated_data(m, &grid)?;
    let spec = &m.linear_decay;
    let s2 = spec.s2.unwrap_or(-(grid.dim() as f64) / 2.0);
    let norm = state_besov(&bank, &data.a, &data.m, p.gamma(), s2, Summability::Infinity);
    if !(norm > 0.0) {
        return Err(Error::InvalidArgument("linear-decay data have zero norm".into()));
    }
    let (a0, m0) = (data.a.scaled(1.0 / norm), data.m.scaled(1.0 / norm));
    let time = m.time.expect("validated");
    let times: Vec<f64> = time.sample_times().into_iter().skip(1).collect();
    let window = m.window();
    let mut checks = Vec::new();
    let mut fits = Vec::new();
    let mut columns = Vec::new();
    for &gap in &spec.gaps {
        let probe = semigroup_decay_probe(&p, &a0, &m0, s2 + gap, s2, &times, window)?;
        let fit = probe.fit.clone().with_theory(-gap / 2.0, spec.tolerance);
        let pass = fit.at_least_as_fast();
        checks.push(Check::at_most(
            format!("slope of B^{}_2,1 (gap {gap})", s2 + gap),
            fit.fitted_slope,
            -gap / 2.0 + spec.tolerance,
        ));
        fits.push(json!({
            "s1": s2 + gap,
            "s2": s2,
            "fitted_slope": fit.fitted_slope,
            "theoretical_slope": -gap / 2.0,
            "tolerance": spec.tolerance,
            "pass": pass,
        }));
        columns.push(probe.norms);
    }
    let mut w = csv_file(&dir.join("linear_decay.csv"))?;
    let header: Vec<String> = spec.gaps.iter().map(|g| format!("norm_s{}", s2 + g)).collect();
    writeln!(w, "t,{}", header.join(","))?;
    for (i, t) in times.iter().enumerate() {
        let row: Vec<String> = columns.iter().map(|c| e(c[i])).collect();
        writeln!(w, "{},{}", e(*t), row.join(","))?;
    }
    w.flush()?;
    write_json(&dir.join("linear_fits.json"), &fits)?;
    Ok((checks, json!({ "s2": s2, "window": window, "fits": fits })))
}

fn maxreg(m: &ExperimentManifest, dir: &Path) -> Result<Judged> {
    let grid = m.build_grid()?;
    let (p, _) = m.model()?;
    let time = m.time.expect("validated");
    let spec = &m.maxreg;
    let data = match &m.data {
        Some(d) => d.generate(&grid, m.seed)?,
        None => InitialData::GaussianBump { amplitude: 1e-2, width: 4.0, momentum: 0.5, zero_mean: true }
            .generate(&grid, m.seed)?,
    };
    let steps = (time.horizon / time.dt).round().max(1.0) as usize;
    let h = time.horizon / steps as f64;
    let times: Vec<f64> = (0..=steps).map(|i| i as f64 * h).collect();
    let d = grid.dim();
    let profile = SpectralField::stack(&vec![data.a.clone(); d])?;
    let mut forcing = SampledForcing::zero(&grid, times.clone());
    for (g, &t) in forcing.g.iter_mut().zip(&times) {
        *g = profile.scaled(spec.forcing_scale * (std::f64::consts::PI * t / time.horizon).sin());
    }
    let s = spec.s.unwrap_or(d as f64 / 2.0 - 1.0);
    let mut reports = Vec::new();
    let mut w = csv_file(&dir.join("maxreg.csv"))?;
    writeln!(w, "gamma,lhs,rhs,ratio")?;
    for &g in &spec.gammas {
        let r = maximal_regularity_probe(&p.with_gamma(g)?, &data.a, &data.m, &forcing, s)?;
        writeln!(w, "{},{},{},{}", e(g), e(r.lhs), e(r.rhs), e(r.ratio))?;
        reports.push(r);
    }
    w.flush()?;
    let hi = reports.iter().map(|r| r.ratio).fold(0.0, f64::max);
    let lo = reports.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
    let variation = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    let checks = vec![Check::below("max/min of the maximal-regularity ratio", variation, spec.max_variation)];
    Ok((checks, json!({ "s": s, "reports": reports, "variation": variation })))
}

fn build_stepper(m: &ExperimentManifest, grid: &Grid, p: &FluidParams, law: &PressureLaw) -> Result<Stepper> {
    let mut st = Stepper::new(grid, p, law, m.solver.scheme, m.solver.form)?;
    if let Some(c) = m.solver.cfl {
        st = st.with_cfl(c);
    }
    Ok(if m.solver.linear_only { st.linear_only() } else { st })
}

/// Steps through the sample times, calling `visit` at each, and writes the
/// per-sample diagnostics. Returns the final state.
fn march(
    m: &ExperimentManifest,
    dir: &Path,
    mut visit: impl FnMut(&FluidState) -> Result<()>,
) -> Result<(FluidState, Vec<StateDiagnostics>)> {
    let grid = m.build_grid()?;
    let (p, law) = m.model()?;
    let time = m.time.expect("validated");
    let mut stepper = build_stepper(m, &grid, &p, &law)?;
    let transform = stepper.nonlinear().transform().clone();
    let mut state = generated_data(m, &grid)?;
    let mut diags = Vec::new();
    let mut w = csv_file(&dir.join("diagnostics.csv"))?;
    writeln!(w, "{}", StateDiagnostics::CSV_HEADER)?;
    for &t in &time.sample_times() {
        if t > state.time {
            state = stepper.advance(&state, t, time.dt)?;
        }
        let dg = StateDiagnostics::compute(&state, &transform, p.rho_star())?;
        writeln!(w, "{}", dg.csv_row())?;
        diags.push(dg);
        visit(&state)?;
    }
    w.flush()?;
    Checkpoint::new(&state, &p, &law).save(&dir.join("final_state.json"))?;
    Ok((state, diags))
}

fn state_checks(diags: &[StateDiagnostics], rho_star: f64) -> Vec<Check> {
    let min_rho = diags.iter().map(|d| d.min_rho).fold(f64::INFINITY, f64::min);
    let max_dev = diags
        .iter()
        .map(|d| (d.max_rho - rho_star).abs().max((d.min_rho - rho_star).abs()))
        .fold(0.0, f64::max);
    let mass = diags.first().map(|d| d.mass).unwrap_or(0.0);
    let drift = diags.iter().map(|d| (d.mass - mass).abs()).fold(0.0, f64::max);
    vec![
        Check::holds("solution finite", max_dev.is_finite()),
        Check::holds("no vacuum", min_rho > 0.0),
        Check::at_most("drift of the mean density relative to rho_star", drift / rho_star, 1e-12),
    ]
}

fn nonlinear_run(m: &ExperimentManifest, dir: &Path) -> Result<Judged> {
    let (p, _) = m.model()?;
    let (state, diags) = march(m, dir, |_| Ok(()))?;
    let checks = state_checks(&diags, p.rho_star());
    let last = diags.last().expect("at least the initial sample");
    Ok((checks, json!({ "final_time": state.time, "final": last })))
}

fn decay_config(m: &ExperimentManifest, bank: &DyadicFilterBank, gamma: f64) -> Result<DecayFunctionalConfig> {
    let mut cfg = DecayFunctionalConfig::new(bank, gamma)?;
    if let Some(s) = &m.analysis.s_grid {
        cfg = cfg.with_s_grid(s.clone()).map_err(|e| Error::config("analysis.s_grid", e.to_string()))?;
    }
    if let Some(eps) = m.analysis.epsilon {
        cfg = cfg.with_epsilon(eps).map_err(|e| Error::config("analysis.epsilon", e.to_string()))?;
    }
    if let Some(j0) = m.analysis.j0 {
        cfg = cfg.with_j0(j0);
    }
    cfg.validate().map_err(|e| Error::config("analysis", e.to_string()))?;
    Ok(cfg)
}

fn judged(m: &ExperimentManifest, s: f64) -> bool {
    match &m.analysis.judge {
        Some(list) => list.iter().any(|x| (x - s).abs() < 1e-12),
        None => true,
    }
}

fn decay_suite(m: &ExperimentManifest, dir: &Path) -> Result<Judged> {
    let grid = m.build_grid()?;
    let (p, _) = m.model()?;
    let bank = DyadicFilterBank::new(&grid)?;
    let cfg = decay_config(m, &bank, p.gamma())?;
    let size = initial_size(&bank, &generated_data(m, &grid)?, &cfg);
    let mut acc = DecayAccumulator::new(&bank, &cfg)?;
    let (_, diags) = march(m, dir, |s| acc.push(s).map(|_| ()))?;
    let series: DecaySeries = acc.finish();
    series.write_csv(csv_file(&dir.join("decay.csv"))?)?;
    let window = m.window();
    let tol = m.analysis.tolerance;
    let mut checks = state_checks(&diags, p.rho_star());
    checks.push(Check::holds("D is nondecreasing", series.is_nondecreasing()));
    let spread = series.spread(window);
    if let Some(limit) = m.analysis.max_spread {
        checks.push(Check::below("max/min of D over the window", spread, limit));
    }
    let mut fits = Vec::new();
    for (s, fit) in series.fits(window, tol)? {
        let judge = judged(m, s);
        let pass = match m.analysis.rule {
            FitRule::AtMost => fit.at_least_as_fast(),
            FitRule::Within => fit.within_tolerance(),
        };
        let theory = fit.theoretical_slope.unwrap_or(f64::NAN);
        if judge {
            checks.push(match m.analysis.rule {
                FitRule::AtMost => Check::at_most(format!("low-frequency slope at s = {s}"), fit.fitted_slope, theory + tol),
                FitRule::Within => Check::at_most(
                    format!("|slope - theory| at s = {s}"),
                    (fit.fitted_slope - theory).abs(),
                    tol,
                ),
            });
        }
        fits.push(json!({
            "s": s,
            "fitted_slope": fit.fitted_slope,
            "theoretical_slope": theory,
            "tolerance": tol,
            "judged": judge,
            "pass": pass,
        }));
    }
    write_json(&dir.join("fits.json"), &fits)?;
    Ok((
        checks,
        json!({
            "dim": grid.dim(),
            "j0": cfg.j0,
            "alpha": cfg.alpha,
            "window": window,
            "d_spread": spread,
            "initial_size": { "weighted": size.weighted, "unweighted": size.unweighted },
            "fits": fits,
        }),
    ))
}

fn picard(m: &ExperimentManifest, dir: &Path) -> Result<Judged> {
    let grid = m.build_grid()?;
    let (p, law) = m.model()?;
    let time = m.time.expect("validated");
    let data = generated_data(m, &grid)?;
    let spec = m.picard;
    let cfg = |dt: f64| PicardConfig {
        horizon: time.horizon,
        dt,
        iterations: spec.iterations,
        threshold: spec.threshold,
        form: m.solver.form,
    };
    let report = picard_solve(&data, &p, &law, &cfg(time.dt))?;
    let mut w = csv_file(&dir.join("picard.csv"))?;
    writeln!(w, "k,delta,ratio")?;
    for (k, d) in report.deltas.iter().enumerate() {
        let r = if k == 0 { String::new() } else { e(report.ratios[k - 1]) };
        writeln!(w, "{},{},{}", k + 1, e(*d), r)?;
    }
    w.flush()?;
    let worst = report.ratios.iter().cloned().fold(0.0, f64::max);
    let mut checks = vec![Check::below("largest contraction ratio", worst, spec.max_ratio)];
    let mut summary = json!({ "data_norm": report.data_norm, "deltas": report.deltas, "ratios": report.ratios });
    if spec.compare {
        let cmp = compare_with_stepper(m, &data, &p, &law, &report, &cfg(0.5 * time.dt))?;
        checks.push(Check::at_most(
            "Picard limit vs stepper at the horizon",
            cmp.distance,
            cmp.tolerance(),
        ));
        summary["comparison"] = serde_json::to_value(cmp)?;
    }
    Ok((checks, summary))
}

/// Distance between the Picard limit and the time stepper at the horizon,
/// with the error budget estimated from one halving of each step.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PicardComparison {
    pub distance: f64,
    pub picard_dt_error: f64,
    pub stepper_dt_error: f64,
    pub iteration_error: f64,
}

impl PicardComparison {
    /// The combined self-convergence error, floored at rounding level.
    pub fn tolerance(&self) -> f64 {
        (self.picard_dt_error + self.stepper_dt_error + self.iteration_error).max(1e-13)
    }
}

fn compare_with_stepper(
    m: &ExperimentManifest,
    data: &FluidState,
    p: &FluidParams,
    law: &PressureLaw,
    coarse: &crate::solver::PicardReport,
    fine_cfg: &PicardConfig,
) -> Result<PicardComparison> {
    let fine = picard_solve(data, p, law, fine_cfg)?;
    let horizon = fine_cfg.horizon;
    let mut st = Stepper::new(data.grid(), p, law, m.solver.scheme, m.solver.form)?;
    let s_coarse = st.advance(data, data.time + horizon, 2.0 * fine_cfg.dt)?;
    let s_fine = st.advance(data, data.time + horizon, fine_cfg.dt)?;
    let n = fine.iterates.len();
    Ok(PicardComparison {
        distance: fine.limit().relative_distance(&s_fine)?,
        picard_dt_error: fine.limit().relative_distance(coarse.limit())?,
        stepper_dt_error: s_fine.relative_distance(&s_coarse)?,
        iteration_error: if n >= 2 { fine.iterates[n - 1].relative_distance(&fine.iterates[n - 2])? } else { 0.0 },
    })
}

fn appendix(m: &ExperimentManifest, dir: &Path) -> Result<Judged> {
    let spec = &m.appendix;
    let mut checks = Vec::new();
    let mut conv = Vec::new();
    for &[a, b] in &spec.pairs {
        match convolution_stability(a, b, spec.t_max) {
            Ok(change) => {
                let c = convolution_inequality_check(a, b, spec.t_max)?;
                checks.push(Check::below(format!("convolution constant change ({a}, {b})"), change, spec.max_change));
                conv.push(json!({ "a": a, "b": b, "constant": c, "relative_change": change }));
            }
            Err(Error::ConvolutionPrecondition { growth, .. }) => {
                conv.push(json!({ "a": a, "b": b, "precondition": false, "growth_on_doubling": growth }));
            }
            Err(err) => return Err(err),
        }
    }
    let mut uniform = Vec::new();
    for &r in &spec.exponents {
        let rep = uniform_bound_check(r, spec.c0)?;
        checks.push(Check::holds(format!("uniform bound r = {r}: finite interior sup"), rep.sup.is_finite() && rep.interior));
        checks.push(Check::below(format!("uniform bound r = {r}: decade spread"), rep.decade_spread, 0.01));
        uniform.push(rep);
    }
    let summary = json!({ "convolution": conv, "uniform": uniform });
    write_json(&dir.join("appendix.json"), &summary)?;
    Ok((checks, summary))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::manifest::ManifestFormat;

    fn parse(text: &str) -> ExperimentManifest {
        ExperimentManifest::parse(text, ManifestFormat::Toml).unwrap()
    }

    #[test]
    fn dispersion_crossover_row() {
        let m = parse("kind = \"dispersion\"\n[params]\nrho_star = 1.0\nmu = 2.0\nkappa = 1.0\ngamma = 1.0\n");
        let dir = tempfile::tempdir().unwrap();
        let out = run_manifest(&m, dir.path()).unwrap();
        assert!(out.passed(), "{:?}", out.checks);
        let x = out.summary["crossover"].as_f64().unwrap();
        assert!((x - 1.0 / 3f64.sqrt()).abs() < 1e-12);
        let csv = std::fs::read_to_string(dir.path().join("dispersion.csv")).unwrap();
        assert!(csv.lines().any(|l| l.contains("double_root")));
        let status = std::fs::read_to_string(dir.path().join(STATUS_FILE)).unwrap();
        assert!(status.contains("passed"));
    }

    const SMALL_RUN: &str = r#"
kind = "decay-suite"
seed = 5
[grid]
dim = 2
n = 32
box_length = 40.0
[params]
rho_star = 1.0
mu = 0.5
kappa = 1.0
gamma = 1.0
[pressure]
kind = "adiabatic"
exponent = 1.4
[data]
kind = "random-band"
amplitude = 0.01
j_lo = -1
j_hi = 0
[time]
horizon = 60.0
dt = 1.0
samples_per_decade = 8
"#;

    #[test]
    fn runs_are_bitwise_reproducible() {
        let m = parse(SMALL_RUN);
        let (d1, d2) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        run_manifest(&m, d1.path()).unwrap();
        run_manifest(&m, d2.path()).unwrap();
        for f in ["decay.csv", "diagnostics.csv", "fits.json"] {
            let a = std::fs::read(d1.path().join(f)).unwrap();
            let b = std::fs::read(d2.path().join(f)).unwrap();
            assert!(!a.is_empty() && a == b, "{f}");
        }
        let mut other = m.clone();
        other.seed = 6;
        let d3 = tempfile::tempdir().unwrap();
        run_manifest(&other, d3.path()).unwrap();
        assert_ne!(std::fs::read(d1.path().join("decay.csv")).unwrap(), std::fs::read(d3.path().join("decay.csv")).unwrap());
    }

    #[test]
    fn failed_runs_are_flagged_partial() {
        let text = SMALL_RUN.replace("amplitude = 0.01", "amplitude = 5.0");
        let m = parse(&text);
        let dir = tempfile::tempdir().unwrap();
        let err = run_manifest(&m, dir.path()).unwrap_err();
        assert!(matches!(err, Error::Vacuum { .. }), "{err}");
        let status: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(dir.path().join(STATUS_FILE)).unwrap()).unwrap();
        assert_eq!(status["state"], "error");
        assert_eq!(status["partial"], true);
        assert!(status["message"].as_str().unwrap().contains(&err.to_string()[..10]));
    }
}
