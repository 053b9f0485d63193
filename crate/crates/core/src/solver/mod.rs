//! Nonlinear evolution of the full system.

mod checkpoint;
mod nonlinear;
mod picard;
mod pressure;
mod scaling;
mod state;
mod stepper;

pub use nonlinear::{korteweg_div, nonlinear_rhs, KortewegForm, NonlinearDiagnostics, NonlinearForm, NonlinearOperator};
pub use pressure::{PressureLaw, PressureRemainder};
pub use state::{FluidState, StateDiagnostics};
pub use stepper::{Scheme, Stepper, DEFAULT_CFL};
pub use picard::{cl_norm, picard_solve, PicardConfig, PicardReport};
pub use scaling::{rescale_model, rescale_state, scaling_invariance_probe, ScalingRun};
pub use checkpoint::{Checkpoint, CHECKPOINT_FORMAT, CHECKPOINT_VERSION};
