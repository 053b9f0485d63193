//! Experiment manifests, run orchestration, artifact emission and the
//! built-in verification suite.

pub mod checks;
pub mod manifest;
pub mod plots;
pub mod runs;

pub use checks::{appendix_suite, check_suite, invariant_suite};
pub use manifest::{
    AnalysisSpec, AppendixSpec, DispersionSpec, ExperimentKind, ExperimentManifest, FitRule, GridSpec, LinearDecaySpec,
    ManifestFormat, MaxRegSpec, ParamsSpec, PicardSpec, PressureSpec, SolverSpec, TimeSpec,
};
pub use plots::{emit_plots, PLOT_INPUTS};
pub use runs::{run_manifest, Check, PicardComparison, RunOutcome, STATUS_FILE};
