use std::ffi::{CStr, CString};
use std::ptr;

use korteweg_ffi::*;

const MANIFEST: &str = r#"
kind = "nonlinear-run"
[grid]
dim = 2
n = 16
box_length = 20.0
[params]
rho_star = 1.0
mu = 0.5
kappa = 1.0
gamma = 1.0
[data]
kind = "gaussian-bump"
amplitude = 0.01
width = 2.0
[time]
horizon = 10.0
dt = 0.1
"#;

fn last_error() -> String {
    let p = kw_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn sim(text: &str) -> (KwStatus, *mut KwSimulation) {
    let c = CString::new(text).unwrap();
    let mut h = ptr::null_mut();
    let st = unsafe { kw_simulation_new(c.as_ptr(), false, &mut h) };
    (st, h)
}

#[test]
fn eigenvalues_match_trace_and_determinant() {
    let p = KwParams { rho_star: 1.0, mu: 0.5, lambda: 0.0, kappa: 2.0, gamma: 1.0 };
    let mut e = KwEigenvalues::default();
    let xi = 0.7;
    assert_eq!(unsafe { kw_eigenvalues(&p, xi, &mut e) }, KwStatus::Ok);
    let nu = 2.0 * p.mu + p.lambda;
    let x2 = xi * xi;
    assert!((e.plus_re + e.minus_re + nu * x2).abs() < 1e-12);
    assert!((e.plus_im + e.minus_im).abs() < 1e-12);
    let det = e.plus_re * e.minus_re - e.plus_im * e.minus_im;
    assert!((det - x2 * (p.gamma + p.kappa * x2)).abs() < 1e-12);
}

#[test]
fn regime_at_crossover() {
    // ν̄ = 1, κ = 1/4: the radicand vanishes for every ξ when γ = 0.
    let p = KwParams { rho_star: 1.0, mu: 0.5, lambda: 0.0, kappa: 0.25, gamma: 0.0 };
    let mut r = KwRegime::RealPair;
    assert_eq!(unsafe { kw_classify_regime(&p, 1.3, &mut r) }, KwStatus::Ok);
    assert_eq!(r, KwRegime::DoubleRoot);
}

#[test]
fn bad_params_report_config_error() {
    let p = KwParams { rho_star: 1.0, mu: -1.0, lambda: 0.0, kappa: 1.0, gamma: 1.0 };
    let mut e = KwEigenvalues::default();
    assert_eq!(unsafe { kw_eigenvalues(&p, 1.0, &mut e) }, KwStatus::Config);
    assert!(last_error().contains("mu"));
}

#[test]
fn null_pointers_are_rejected() {
    let mut e = KwEigenvalues::default();
    assert_eq!(unsafe { kw_eigenvalues(ptr::null(), 1.0, &mut e) }, KwStatus::NullPointer);
    assert_eq!(unsafe { kw_simulation_advance(ptr::null_mut(), 1.0, 0.1) }, KwStatus::NullPointer);
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { kw_simulation_new(ptr::null(), false, &mut h) }, KwStatus::NullPointer);
    unsafe { kw_simulation_free(ptr::null_mut()) };
}

#[test]
fn simulation_lifecycle() {
    let (st, h) = sim(MANIFEST);
    assert_eq!(st, KwStatus::Ok);
    let mut n = 0usize;
    assert_eq!(unsafe { kw_simulation_len(h, &mut n) }, KwStatus::Ok);
    assert_eq!(n, 256);
    let mut d0 = KwDiagnostics::default();
    assert_eq!(unsafe { kw_simulation_diagnostics(h, &mut d0) }, KwStatus::Ok);
    assert_eq!(unsafe { kw_simulation_advance(h, 1.0, 0.1) }, KwStatus::Ok);
    let mut d1 = KwDiagnostics::default();
    assert_eq!(unsafe { kw_simulation_diagnostics(h, &mut d1) }, KwStatus::Ok);
    assert!((d1.time - 1.0).abs() < 1e-12);
    assert!((d1.mass - d0.mass).abs() < 1e-15);
    assert!(d1.l2_a < d0.l2_a);

    let mut small = vec![0.0; n - 1];
    assert_eq!(unsafe { kw_simulation_density(h, small.as_mut_ptr(), small.len()) }, KwStatus::BufferTooSmall);
    let mut rho = vec![0.0; n];
    assert_eq!(unsafe { kw_simulation_density(h, rho.as_mut_ptr(), n) }, KwStatus::Ok);
    let lo = rho.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = rho.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    assert!((lo - d1.min_rho).abs() < 1e-14 && (hi - d1.max_rho).abs() < 1e-14);
    unsafe { kw_simulation_free(h) };
}

#[test]
fn schema_errors_name_the_field() {
    let (st, h) = sim(&MANIFEST.replace("kappa = 1.0", "kapa = 1.0"));
    assert_eq!(st, KwStatus::Config);
    assert!(h.is_null());
    assert!(last_error().contains("kapa"));
}

#[test]
fn vacuum_is_reported() {
    let text = MANIFEST.replace(
        "kind = \"gaussian-bump\"\namplitude = 0.01\nwidth = 2.0",
        "kind = \"random-band\"\namplitude = 5.0\nj_lo = -1\nj_hi = 1",
    );
    let (st, h) = sim(&text);
    assert_eq!(st, KwStatus::Ok);
    let rc = unsafe { kw_simulation_advance(h, 1.0, 0.1) };
    assert!(matches!(rc, KwStatus::Vacuum | KwStatus::NonFinite | KwStatus::StepRejected), "{rc:?}");
    assert!(!last_error().is_empty());
    unsafe { kw_simulation_free(h) };
}

#[test]
fn version_is_the_crate_version() {
    let v = unsafe { CStr::from_ptr(kw_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_every_entry_point() {
    let h = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/korteweg.h")).unwrap();
    for f in [
        "kw_last_error",
        "kw_version",
        "kw_eigenvalues",
        "kw_classify_regime",
        "kw_simulation_new",
        "kw_simulation_free",
        "kw_simulation_advance",
        "kw_simulation_diagnostics",
        "kw_simulation_len",
        "kw_simulation_density",
        "kw_run_manifest",
    ] {
        assert!(h.contains(&format!("{f}(")), "{f} missing from header");
    }
    assert!(h.contains("typedef struct KwSimulation KwSimulation;"));
    assert!(h.contains("KW_STATUS_OK") || h.contains("KwStatus_Ok"));
}

#[test]
fn header_compiles_as_c() {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/include");
    let src = std::env::temp_dir().join("korteweg_header_check.c");
    std::fs::write(&src, "#include \"korteweg.h\"\nint main(void) { return KW_STATUS_OK; }\n").unwrap();
    let Ok(out) = std::process::Command::new("cc").args(["-fsyntax-only", "-Wall", "-Werror", "-I", dir]).arg(&src).output()
    else {
        eprintln!("no C compiler, skipped");
        return;
    };
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
