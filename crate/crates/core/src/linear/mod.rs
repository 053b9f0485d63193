//! Frequency-space analysis of the linearised system: symbol, spectrum,
//! Lyapunov certificate and the exact per-mode propagator.

mod lyapunov;
pub mod mat2;
mod params;
mod probes;
mod propagator;
mod symbol;

pub use lyapunov::{
    certify, local_rate, lyapunov_bounds, lyapunov_dissipation, lyapunov_eta, lyapunov_value,
    LyapunovCertificate,
};
pub use mat2::Mat2;
pub use params::FluidParams;
pub use probes::{
    heat_lemma_probe, maximal_regularity_probe, semigroup_decay_probe, state_besov, state_shells,
    weighted_parts, HeatLemmaReport, MaxRegReport, SampledForcing, SemigroupDecayProbe,
};
pub use propagator::{propagate_linear, Duhamel, LinearPropagator, PropagatorOp};
pub use symbol::{
    classify_regime, crossover, dispersion_table, eigenvalues_closed_form, radicand, symbol_matrix,
    write_dispersion_csv, DispersionRow, LinearSymbol, Regime, RegimeInfo, DOUBLE_ROOT_TOL,
};
