//! Optimized Schwarz waveform relaxation for the 1D heat equation with
//! piecewise-constant diffusion.
//!
//! * [`frequency`]: convergence factor and frequency band.
//! * [`optimizer`]: optimized Robin parameters and a brute-force oracle.
//! * [`heat`]: P1 / backward-Euler solvers.
//! * [`schwarz`]: the waveform relaxation driver.
//! * [`experiment`]: configurable scenarios writing CSV files.

pub mod error;
pub mod experiment;
pub mod frequency;
pub mod heat;
pub mod optimizer;
pub mod schwarz;

pub use error::{Error, Result};
pub use frequency::{rho, DiffusionPair, FrequencyBand, TransmissionParams, Version};
pub use optimizer::{optimize, OptimizedResult};
pub use schwarz::{decompose, oswr_iterate, ConvergenceHistory, Decomposition, InitMode, OswrOptions, SweepMode};
