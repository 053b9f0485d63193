use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rayon::prelude::*;

use korteweg::error::{EXIT_ASSERTION, EXIT_CONFIG, EXIT_PASS, EXIT_RUNTIME};
use korteweg::experiment::{check_suite, emit_plots, run_manifest, Check, ExperimentManifest, RunOutcome};
use korteweg::Error;

#[derive(Parser)]
#[command(name = "korteweg", version, about = "Navier-Stokes-Korteweg experiments and verification")]
struct Cli {
    /// Worker threads for running several manifests at once.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    /// Overrides the seed of every manifest.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Base output directory; each manifest writes to a subdirectory named after it.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one or more experiment manifests (TOML, or JSON by extension).
    Run {
        #[arg(required = true)]
        manifests: Vec<PathBuf>,
    },
    /// Write plotting scripts for the results in a directory.
    Plot { dir: PathBuf },
    /// Run the appendix checks and the structural invariant suite.
    Check,
}

fn print_checks(label: &str, checks: &[Check]) {
    for c in checks {
        println!(
            "[{}] {label}: {} (value {:.3e}, limit {:.3e})",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.value,
            c.limit
        );
    }
}

fn report_error(label: &str, e: &Error) -> i32 {
    eprintln!("error [{label}]: {e}");
    e.exit_code()
}

/// `--out` gives `<out>/<label>`, numbered when several manifests run;
/// otherwise the manifest's own `out`, then `results/<label>`.
fn out_dir(cli: &Cli, manifest: &ExperimentManifest, index: usize, total: usize) -> PathBuf {
    let label = manifest.label();
    match (&cli.out, &manifest.out) {
        (Some(base), _) if total > 1 => base.join(format!("{index:02}-{label}")),
        (Some(base), _) => base.join(label),
        (None, Some(dir)) => dir.clone(),
        (None, None) => Path::new("results").join(label),
    }
}

fn run_one(cli: &Cli, path: &Path, index: usize, total: usize) -> i32 {
    let label = path.display().to_string();
    let mut manifest = match ExperimentManifest::load(path) {
        Ok(m) => m,
        Err(e) => return report_error(&label, &e),
    };
    if let Some(seed) = cli.seed {
        manifest.seed = seed;
    }
    let dir = out_dir(cli, &manifest, index, total);
    match run_manifest(&manifest, &dir) {
        Ok(outcome) => summarize(&outcome),
        Err(e) => report_error(&label, &e),
    }
}

fn summarize(outcome: &RunOutcome) -> i32 {
    print_checks(&outcome.label, &outcome.checks);
    println!("{} -> {}", outcome.label, outcome.out_dir.display());
    if outcome.passed() {
        EXIT_PASS
    } else {
        EXIT_ASSERTION
    }
}

/// Config errors dominate, then runtime failures, then failed assertions.
fn combine(codes: &[i32]) -> i32 {
    [EXIT_CONFIG, EXIT_RUNTIME, EXIT_ASSERTION]
        .into_iter()
        .find(|c| codes.contains(c))
        .unwrap_or(EXIT_PASS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match &cli.command {
        Command::Run { manifests } => {
            let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.threads.max(1)).build() {
                Ok(p) => p,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(EXIT_RUNTIME as u8);
                }
            };
            let total = manifests.len();
            let codes: Vec<i32> = pool.install(|| {
                manifests
                    .par_iter()
                    .enumerate()
                    .map(|(i, p)| run_one(&cli, p, i, total))
                    .collect()
            });
            combine(&codes)
        }
        Command::Plot { dir } => match emit_plots(dir) {
            Ok(files) => {
                for f in files {
                    println!("{}", f.display());
                }
                EXIT_PASS
            }
            Err(e) => report_error(&dir.display().to_string(), &e),
        },
        Command::Check => match check_suite() {
            Ok(checks) => {
                print_checks("check", &checks);
                if checks.iter().all(|c| c.passed) {
                    EXIT_PASS
                } else {
                    EXIT_ASSERTION
                }
            }
            Err(e) => report_error("check", &e),
        },
    };
    ExitCode::from(code as u8)
}
