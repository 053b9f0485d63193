use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::data::InitialData;
use crate::decay::{log_times, FIT_START};
use crate::error::{Error, Result};
use crate::linear::FluidParams;
use crate::solver::{NonlinearForm, PressureLaw, Scheme};
use crate::spectral::Grid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Dispersion,
    LinearDecay,
    Maxreg,
    NonlinearRun,
    Picard,
    DecaySuite,
    AppendixChecks,
}

impl ExperimentKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentKind::Dispersion => "dispersion",
            ExperimentKind::LinearDecay => "linear-decay",
            ExperimentKind::Maxreg => "maxreg",
            ExperimentKind::NonlinearRun => "nonlinear-run",
            ExperimentKind::Picard => "picard",
            ExperimentKind::DecaySuite => "decay-suite",
            ExperimentKind::AppendixChecks => "appendix-checks",
        }
    }

    fn needs_grid(&self) -> bool {
        !matches!(self, ExperimentKind::Dispersion | ExperimentKind::AppendixChecks)
    }

    fn needs_params(&self) -> bool {
        !matches!(self, ExperimentKind::AppendixChecks)
    }

    fn needs_time(&self) -> bool {
        self.needs_grid()
    }

    fn samples_in_time(&self) -> bool {
        matches!(self, ExperimentKind::LinearDecay | ExperimentKind::NonlinearRun | ExperimentKind::DecaySuite)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub dim: usize,
    pub n: usize,
    pub box_length: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSpec {
    /// Omitted when the pressure law fixes the reference density.
    #[serde(default)]
    pub rho_star: Option<f64>,
    pub mu: f64,
    #[serde(default)]
    pub lambda: f64,
    pub kappa: f64,
    /// Omitted when the pressure law fixes `P′(ρ*)`.
    #[serde(default)]
    pub gamma: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PressureSpec {
    /// `P = γρ`.
    #[default]
    Linear,
    /// `P = Cρ^g`; `C` defaults to the value giving `P′(ρ*) = γ`.
    Adiabatic {
        exponent: f64,
        #[serde(default)]
        coefficient: Option<f64>,
    },
    VanDerWaals { a: f64, b: f64, temperature: f64 },
    /// Van der Waals law with `ρ*` placed on the spinodal, so `γ = 0`.
    VanDerWaalsCritical { a: f64, b: f64, temperature: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSpec {
    pub horizon: f64,
    pub dt: f64,
    /// First sampled time after `t = 0`.
    #[serde(default = "one")]
    pub t_min: f64,
    #[serde(default = "twenty")]
    pub samples_per_decade: usize,
}

impl TimeSpec {
    /// `0` followed by a logarithmic grid of `[t_min, horizon]`.
    pub fn sample_times(&self) -> Vec<f64> {
        let decades = (self.horizon / self.t_min).log10().max(0.0);
        let n = ((decades * self.samples_per_decade as f64).ceil() as usize + 1).max(2);
        let mut t = vec![0.0];
        t.extend(log_times(self.t_min, self.horizon, n));
        t
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSpec {
    #[serde(default)]
    pub scheme: Scheme,
    #[serde(default)]
    pub form: NonlinearForm,
    #[serde(default)]
    pub linear_only: bool,
    #[serde(default)]
    pub cfl: Option<f64>,
}

impl Default for SolverSpec {
    fn default() -> Self {
        SolverSpec {
            scheme: Scheme::default(),
            form: NonlinearForm::default(),
            linear_only: false,
            cfl: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitRule {
    /// Fitted slope at most theory plus tolerance.
    #[default]
    AtMost,
    /// Fitted slope within tolerance of theory.
    Within,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisSpec {
    #[serde(default)]
    pub s_grid: Option<Vec<f64>>,
    #[serde(default)]
    pub epsilon: Option<f64>,
    #[serde(default)]
    pub j0: Option<i32>,
    #[serde(default)]
    pub window: Option<[f64; 2]>,
    #[serde(default = "tenth")]
    pub tolerance: f64,
    #[serde(default)]
    pub rule: FitRule,
    /// Only these indices are fitted and judged; all of `s_grid` otherwise.
    #[serde(default)]
    pub judge: Option<Vec<f64>>,
    /// Bound on `max D / min D` over the fit window.
    #[serde(default)]
    pub max_spread: Option<f64>,
}

impl Default for AnalysisSpec {
    fn default() -> Self {
        AnalysisSpec {
            s_grid: None,
            epsilon: None,
            j0: None,
            window: None,
            tolerance: 0.1,
            rule: FitRule::AtMost,
            judge: None,
            max_spread: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DispersionSpec {
    pub xi_min: f64,
    pub xi_max: f64,
    pub points: usize,
    /// Values of `γ` for the regime map; `κ`, `ν` and `ρ*` are kept.
    pub map_gammas: Vec<f64>,
}

impl Default for DispersionSpec {
    fn default() -> Self {
        DispersionSpec {
            xi_min: 1e-2,
            xi_max: 1e2,
            points: 201,
            map_gammas: (0..=40).map(|i| if i == 0 { 0.0 } else { 10f64.powf(-3.0 + 0.1 * i as f64) }).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PicardSpec {
    pub iterations: usize,
    pub threshold: f64,
    /// Also run the time stepper to the horizon and compare.
    pub compare: bool,
    pub max_ratio: f64,
}

impl Default for PicardSpec {
    fn default() -> Self {
        PicardSpec {
            iterations: 6,
            threshold: 0.1,
            compare: true,
            max_ratio: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MaxRegSpec {
    pub gammas: Vec<f64>,
    /// Regularity index; `d/2 − 1` when omitted.
    pub s: Option<f64>,
    /// Peak of the momentum forcing relative to the data amplitude.
    pub forcing_scale: f64,
    pub max_variation: f64,
}

impl Default for MaxRegSpec {
    fn default() -> Self {
        MaxRegSpec {
            gammas: vec![0.0, 0.1, 1.0, 10.0],
            s: None,
            forcing_scale: 1.0,
            max_variation: 5.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LinearDecaySpec {
    /// Index of the `Ḃ^{s2}_{2,∞}` normalisation; `−d/2` when omitted.
    pub s2: Option<f64>,
    pub gaps: Vec<f64>,
    pub tolerance: f64,
}

impl Default for LinearDecaySpec {
    fn default() -> Self {
        LinearDecaySpec {
            s2: None,
            gaps: vec![1.0, 2.0],
            tolerance: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AppendixSpec {
    pub pairs: Vec<[f64; 2]>,
    pub t_max: f64,
    pub max_change: f64,
    pub exponents: Vec<f64>,
    pub c0: f64,
}

impl Default for AppendixSpec {
    fn default() -> Self {
        AppendixSpec {
            pairs: vec![[2.0, 2.0], [2.0, 0.5], [1.5, 3.0]],
            t_max: 1000.0,
            max_change: 0.05,
            exponents: vec![1.0, 4.0],
            c0: 1.0,
        }
    }
}

fn one() -> f64 {
    1.0
}

fn twenty() -> usize {
    20
}

fn tenth() -> f64 {
    0.1
}

/// One experiment, read from TOML or JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentManifest {
    pub kind: ExperimentKind,
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub grid: Option<GridSpec>,
    #[serde(default)]
    pub params: Option<ParamsSpec>,
    #[serde(default)]
    pub pressure: PressureSpec,
    #[serde(default)]
    pub data: Option<InitialData>,
    #[serde(default)]
    pub time: Option<TimeSpec>,
    #[serde(default)]
    pub solver: SolverSpec,
    #[serde(default)]
    pub analysis: AnalysisSpec,
    #[serde(default)]
    pub dispersion: DispersionSpec,
    #[serde(default)]
    pub picard: PicardSpec,
    #[serde(default)]
    pub maxreg: MaxRegSpec,
    #[serde(default)]
    pub linear_decay: LinearDecaySpec,
    #[serde(default)]
    pub appendix: AppendixSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ManifestFormat {
    Toml,
    Json,
}

impl ManifestFormat {
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => ManifestFormat::Json,
            _ => ManifestFormat::Toml,
        }
    }
}

fn schema_error(path: &serde_path_to_error::Path, inner: impl std::fmt::Display) -> Error {
    let p = path.to_string();
    Error::config(if p == "." { "<root>".to_string() } else { p }, inner.to_string())
}

impl ExperimentManifest {
    pub fn parse(text: &str, format: ManifestFormat) -> Result<Self> {
        let tree: serde_json::Value = match format {
            ManifestFormat::Json => serde_json::from_str(text).map_err(|e| Error::config("<root>", e.to_string()))?,
            ManifestFormat::Toml => {
                let v: toml::Value = toml::from_str(text).map_err(|e| Error::config("<root>", e.to_string()))?;
                serde_json::to_value(v).map_err(|e| Error::config("<root>", e.to_string()))?
            }
        };
        let m: ExperimentManifest =
            serde_path_to_error::deserialize(tree).map_err(|e| schema_error(e.path(), e.inner()))?;
        m.validate()?;
        Ok(m)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text, ManifestFormat::from_path(path))
    }

    /// Cross-field checks; the resolved model is also built once.
    pub fn validate(&self) -> Result<()> {
        if self.kind.needs_grid() && self.grid.is_none() {
            return Err(Error::config("grid", format!("required for kind `{}`", self.kind.as_str())));
        }
        if self.kind.needs_params() && self.params.is_none() {
            return Err(Error::config("params", format!("required for kind `{}`", self.kind.as_str())));
        }
        if self.kind.needs_time() {
            let t = self
                .time
                .ok_or_else(|| Error::config("time", format!("required for kind `{}`", self.kind.as_str())))?;
            if !(t.horizon > 0.0 && t.horizon.is_finite()) {
                return Err(Error::config("time.horizon", format!("{} must be positive", t.horizon)));
            }
            if !(t.dt > 0.0 && t.dt <= t.horizon) {
                return Err(Error::config("time.dt", format!("{} must lie in (0, horizon]", t.dt)));
            }
            if self.kind.samples_in_time() && !(t.t_min > 0.0 && t.t_min < t.horizon) {
                return Err(Error::config("time.t_min", format!("{} must lie in (0, horizon)", t.t_min)));
            }
            if t.samples_per_decade == 0 {
                return Err(Error::config("time.samples_per_decade", "must be positive"));
            }
        }
        if self.kind.needs_grid() {
            self.build_grid()?;
            if self.kind != ExperimentKind::Maxreg || self.data.is_some() {
                let d = self
                    .data
                    .as_ref()
                    .ok_or_else(|| Error::config("data", format!("required for kind `{}`", self.kind.as_str())))?;
                d.validate().map_err(|e| Error::config("data", e.to_string()))?;
            }
        }
        if self.kind.needs_params() {
            self.model()?;
        }
        if let Some(c) = self.solver.cfl {
            if !(c > 0.0) {
                return Err(Error::config("solver.cfl", format!("{c} must be positive")));
            }
        }
        if let Some([lo, hi]) = self.analysis.window {
            if !(lo > 0.0 && hi > lo) {
                return Err(Error::config("analysis.window", format!("[{lo}, {hi}] must satisfy 0 < lo < hi")));
            }
        }
        if !(self.analysis.tolerance >= 0.0) {
            return Err(Error::config("analysis.tolerance", "must be >= 0"));
        }
        let ds = &self.dispersion;
        if self.kind == ExperimentKind::Dispersion && !(ds.xi_min > 0.0 && ds.xi_max > ds.xi_min && ds.points >= 2) {
            return Err(Error::config("dispersion", "needs 0 < xi_min < xi_max and points >= 2"));
        }
        if self.kind == ExperimentKind::Dispersion && ds.map_gammas.iter().any(|g| !(*g >= 0.0)) {
            return Err(Error::config("dispersion.map_gammas", "every gamma must be >= 0"));
        }
        if self.kind == ExperimentKind::Maxreg && self.maxreg.gammas.iter().any(|g| !(*g >= 0.0)) {
            return Err(Error::config("maxreg.gammas", "every gamma must be >= 0"));
        }
        if self.kind == ExperimentKind::AppendixChecks && !(self.appendix.t_max >= 4.0) {
            return Err(Error::config("appendix.t_max", "must be at least 4"));
        }
        Ok(())
    }

    pub fn build_grid(&self) -> Result<Grid> {
        let g = self.grid.ok_or_else(|| Error::config("grid", "missing"))?;
        Grid::new(g.dim, g.n, g.box_length).map_err(|e| Error::config("grid", e.to_string()))
    }

    /// Resolves the parameters and the pressure law so that `P′(ρ*) = γ`.
    pub fn model(&self) -> Result<(FluidParams, PressureLaw)> {
        let p = self.params.ok_or_else(|| Error::config("params", "missing"))?;
        let need_rho = || p.rho_star.ok_or_else(|| Error::config("params.rho_star", "required by this pressure law"));
        let need_gamma = || p.gamma.ok_or_else(|| Error::config("params.gamma", "required by this pressure law"));
        let (rho_star, law) = match &self.pressure {
            PressureSpec::Linear => (need_rho()?, PressureLaw::Linear { slope: need_gamma()? }),
            PressureSpec::Adiabatic { exponent, coefficient } => {
                let rho = need_rho()?;
                let c = match coefficient {
                    Some(c) => *c,
                    None => {
                        let slope = exponent * rho.powf(exponent - 1.0);
                        if slope == 0.0 {
                            return Err(Error::config("pressure.exponent", "cannot match gamma with exponent 0"));
                        }
                        need_gamma()? / slope
                    }
                };
                (rho, PressureLaw::Adiabatic { coefficient: c, exponent: *exponent })
            }
            PressureSpec::VanDerWaals { a, b, temperature } => {
                (need_rho()?, PressureLaw::VanDerWaals { a: *a, b: *b, temperature: *temperature })
            }
            PressureSpec::VanDerWaalsCritical { a, b, temperature } => {
                if p.rho_star.is_some() {
                    return Err(Error::config("params.rho_star", "fixed by the van-der-waals-critical law; omit it"));
                }
                let (law, rho) = PressureLaw::van_der_waals_critical(*a, *b, *temperature)
                    .map_err(|e| Error::config("pressure", e.to_string()))?;
                (rho, law)
            }
        };
        law.validate().map_err(|e| Error::config("pressure", e.to_string()))?;
        let derived = law.derivative(rho_star);
        let gamma = match p.gamma {
            Some(g) => {
                if (g - derived).abs() > 1e-8 * (1.0 + g.abs()) {
                    return Err(Error::config(
                        "params.gamma",
                        format!("{g} disagrees with P'(rho_star) = {derived} of the pressure law"),
                    ));
                }
                g
            }
            None if derived.abs() < 1e-12 => 0.0,
            None => derived,
        };
        let params = FluidParams::new(rho_star, p.mu, p.lambda, p.kappa, gamma)
            .map_err(|e| Error::config("params", e.to_string()))?;
        Ok((params, law))
    }

    /// Fit window, defaulting to `[FIT_START, horizon]`.
    pub fn window(&self) -> (f64, f64) {
        match (self.analysis.window, self.time) {
            (Some([lo, hi]), _) => (lo, hi),
            (None, Some(t)) => (FIT_START, t.horizon),
            (None, None) => (FIT_START, 10.0 * FIT_START),
        }
    }

    pub fn label(&self) -> String {
        self.name.clone().unwrap_or_else(|| self.kind.as_str().to_string())
    }
}
