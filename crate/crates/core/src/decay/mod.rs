//! Decay functionals with their exponent fits, plus numeric checks of the convolution and uniform-bound estimates.

pub mod appendix;
pub mod fit;
pub mod functional;

pub use appendix::{
    convolution_inequality_check, convolution_integral, convolution_profile, convolution_stability, uniform_bound_check,
    uniform_sum, UniformBoundReport,
};
pub use fit::{fit_decay_exponent, log_times, DecayFit};
pub use functional::{
    d_functional, initial_size, DecayAccumulator, DecayFunctionalConfig, DecayRow, DecaySeries, GammaMode, InitialSize,
    DEFAULT_EPSILON, FIT_START,
};
