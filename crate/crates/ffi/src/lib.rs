//! C ABI over the korteweg solver.
//!
//! Every function returns a [`KwStatus`]; on failure the message is kept in a
//! thread-local slot readable through [`kw_last_error`]. Handles are opaque
//! and must be released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use korteweg::experiment::{run_manifest, ExperimentManifest, ManifestFormat};
use korteweg::linear::{classify_regime, eigenvalues_closed_form, FluidParams, Regime};
use korteweg::solver::{FluidState, StateDiagnostics, Stepper};
use korteweg::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KwStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Config = 3,
    Vacuum = 4,
    NonFinite = 5,
    StepRejected = 6,
    Io = 7,
    CheckFailed = 8,
    BufferTooSmall = 9,
    Panic = 10,
    Internal = 11,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KwRegime {
    ComplexPair = 0,
    DoubleRoot = 1,
    RealPair = 2,
}

/// Coefficients of the linearised system.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct KwParams {
    pub rho_star: f64,
    pub mu: f64,
    pub lambda: f64,
    pub kappa: f64,
    pub gamma: f64,
}

/// `λ± = re ± i im` of one Fourier mode.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct KwEigenvalues {
    pub plus_re: f64,
    pub plus_im: f64,
    pub minus_re: f64,
    pub minus_im: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct KwDiagnostics {
    pub time: f64,
    /// Mean of `ρ − ρ*`.
    pub mass: f64,
    pub l2_a: f64,
    pub l2_m: f64,
    pub min_rho: f64,
    pub max_rho: f64,
}

/// A running simulation built from a manifest.
pub struct KwSimulation {
    stepper: Stepper,
    state: FluidState,
    rho_star: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> KwStatus {
    match e {
        Error::Config { .. } | Error::InvalidParams(_) | Error::InvalidGrid(_) => KwStatus::Config,
        Error::InvalidArgument(_) | Error::ShapeMismatch { .. } | Error::GridMismatch => KwStatus::InvalidArgument,
        Error::Vacuum { .. } => KwStatus::Vacuum,
        Error::NonFinite(_) => KwStatus::NonFinite,
        Error::StepRejected { .. } => KwStatus::StepRejected,
        Error::Io(_) | Error::Json(_) => KwStatus::Io,
        Error::Assertion(_) | Error::PicardDiverged { .. } | Error::DataNotSmall { .. } => KwStatus::CheckFailed,
        _ => KwStatus::Internal,
    }
}

fn fail(status: KwStatus, msg: impl Into<String>) -> KwStatus {
    set_error(msg.into());
    status
}

/// Runs `f`, converting errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), KwStatus>) -> KwStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => KwStatus::Ok,
        Ok(Err(s)) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            fail(KwStatus::Panic, format!("panic: {msg}"))
        }
    }
}

fn lift<T>(r: korteweg::Result<T>) -> Result<T, KwStatus> {
    r.map_err(|e| fail(status_of(&e), e.to_string()))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, KwStatus> {
    if p.is_null() {
        return Err(fail(KwStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(KwStatus::InvalidArgument, format!("{what} is not valid UTF-8")))
}

fn params(p: &KwParams) -> Result<FluidParams, KwStatus> {
    lift(FluidParams::new(p.rho_star, p.mu, p.lambda, p.kappa, p.gamma))
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn kw_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn kw_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Closed-form eigenvalues of the symbol at `|ξ| = xi`.
///
/// # Safety
/// `p` and `out` must be valid pointers or null.
#[no_mangle]
pub unsafe extern "C" fn kw_eigenvalues(p: *const KwParams, xi: f64, out: *mut KwEigenvalues) -> KwStatus {
    guard(|| {
        if p.is_null() || out.is_null() {
            return Err(fail(KwStatus::NullPointer, "params or output is null"));
        }
        let fp = params(&*p)?;
        let (lp, lm) = lift(eigenvalues_closed_form(&fp, xi))?;
        *out = KwEigenvalues {
            plus_re: lp.re,
            plus_im: lp.im,
            minus_re: lm.re,
            minus_im: lm.im,
        };
        Ok(())
    })
}

/// Regime of the mode `|ξ| = xi`.
///
/// # Safety
/// `p` and `out` must be valid pointers or null.
#[no_mangle]
pub unsafe extern "C" fn kw_classify_regime(p: *const KwParams, xi: f64, out: *mut KwRegime) -> KwStatus {
    guard(|| {
        if p.is_null() || out.is_null() {
            return Err(fail(KwStatus::NullPointer, "params or output is null"));
        }
        let fp = params(&*p)?;
        *out = match lift(classify_regime(&fp, xi))?.regime {
            Regime::ComplexPair => KwRegime::ComplexPair,
            Regime::DoubleRoot => KwRegime::DoubleRoot,
            Regime::RealPair => KwRegime::RealPair,
        };
        Ok(())
    })
}

/// Builds a simulation from a manifest given as text (`is_json` selects the
/// format). Grid, model, initial data, scheme and form are taken from it.
///
/// # Safety
/// `manifest` must be a NUL-terminated string; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn kw_simulation_new(
    manifest: *const c_char,
    is_json: bool,
    out: *mut *mut KwSimulation,
) -> KwStatus {
    guard(|| {
        if out.is_null() {
            return Err(fail(KwStatus::NullPointer, "output handle is null"));
        }
        *out = ptr::null_mut();
        let src = text(manifest, "manifest")?;
        let format = if is_json { ManifestFormat::Json } else { ManifestFormat::Toml };
        let m = lift(ExperimentManifest::parse(src, format))?;
        let grid = lift(m.build_grid())?;
        let (p, law) = lift(m.model())?;
        let data = m
            .data
            .as_ref()
            .ok_or_else(|| fail(KwStatus::Config, "manifest has no [data] section"))?;
        let state = lift(data.generate(&grid, m.seed))?;
        let mut stepper = lift(Stepper::new(&grid, &p, &law, m.solver.scheme, m.solver.form))?;
        if let Some(c) = m.solver.cfl {
            stepper = stepper.with_cfl(c);
        }
        if m.solver.linear_only {
            stepper = stepper.linear_only();
        }
        let sim = KwSimulation {
            stepper,
            state,
            rho_star: p.rho_star(),
        };
        *out = Box::into_raw(Box::new(sim));
        Ok(())
    })
}

/// Releases a simulation; null is ignored.
///
/// # Safety
/// `sim` must come from [`kw_simulation_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn kw_simulation_free(sim: *mut KwSimulation) {
    if !sim.is_null() {
        drop(Box::from_raw(sim));
    }
}

unsafe fn handle<'a>(sim: *mut KwSimulation) -> Result<&'a mut KwSimulation, KwStatus> {
    sim.as_mut().ok_or_else(|| fail(KwStatus::NullPointer, "simulation handle is null"))
}

/// Advances to `t_end` with steps of at most `dt`. On error the state is
/// left unchanged.
///
/// # Safety
/// `sim` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn kw_simulation_advance(sim: *mut KwSimulation, t_end: f64, dt: f64) -> KwStatus {
    guard(|| {
        let s = handle(sim)?;
        if !(dt > 0.0) || !t_end.is_finite() {
            return Err(fail(KwStatus::InvalidArgument, format!("bad t_end {t_end} or dt {dt}")));
        }
        s.state = lift(s.stepper.advance(&s.state, t_end, dt))?;
        Ok(())
    })
}

/// # Safety
/// `sim` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn kw_simulation_diagnostics(sim: *mut KwSimulation, out: *mut KwDiagnostics) -> KwStatus {
    guard(|| {
        let s = handle(sim)?;
        if out.is_null() {
            return Err(fail(KwStatus::NullPointer, "output is null"));
        }
        let d = lift(StateDiagnostics::compute(&s.state, s.stepper.nonlinear().transform(), s.rho_star))?;
        *out = KwDiagnostics {
            time: d.time,
            mass: d.mass,
            l2_a: d.l2_a,
            l2_m: d.l2_m,
            min_rho: d.min_rho,
            max_rho: d.max_rho,
        };
        Ok(())
    })
}

/// Number of grid points; the size `kw_simulation_density` needs.
///
/// # Safety
/// `sim` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn kw_simulation_len(sim: *mut KwSimulation, out: *mut usize) -> KwStatus {
    guard(|| {
        let s = handle(sim)?;
        if out.is_null() {
            return Err(fail(KwStatus::NullPointer, "output is null"));
        }
        *out = s.state.grid().len();
        Ok(())
    })
}

/// Writes the density `ρ = ρ* + a` on the grid, row-major, into `buf`.
///
/// # Safety
/// `sim` must be a live handle; `buf` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn kw_simulation_density(sim: *mut KwSimulation, buf: *mut f64, len: usize) -> KwStatus {
    guard(|| {
        let s = handle(sim)?;
        if buf.is_null() {
            return Err(fail(KwStatus::NullPointer, "buffer is null"));
        }
        let need = s.state.grid().len();
        if len < need {
            return Err(fail(KwStatus::BufferTooSmall, format!("buffer holds {len} values, {need} needed")));
        }
        let a = lift(s.stepper.nonlinear().transform().inverse_real(s.state.a.component(0)))?;
        let dst = std::slice::from_raw_parts_mut(buf, need);
        for (d, v) in dst.iter_mut().zip(a) {
            *d = s.rho_star + v;
        }
        Ok(())
    })
}

/// Runs a manifest file into `out_dir`; `passed` receives whether every
/// check passed. A run whose checks fail still returns `Ok`.
///
/// # Safety
/// `path` and `out_dir` must be NUL-terminated strings; `passed` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn kw_run_manifest(path: *const c_char, out_dir: *const c_char, passed: *mut bool) -> KwStatus {
    guard(|| {
        let path = text(path, "path")?;
        let dir = text(out_dir, "out_dir")?;
        if passed.is_null() {
            return Err(fail(KwStatus::NullPointer, "passed is null"));
        }
        let format = ManifestFormat::from_path(Path::new(path));
        let src = std::fs::read_to_string(path).map_err(|e| fail(KwStatus::Io, format!("{path}: {e}")))?;
        let m = lift(ExperimentManifest::parse(&src, format))?;
        let outcome = lift(run_manifest(&m, Path::new(dir)))?;
        *passed = outcome.passed();
        Ok(())
    })
}
