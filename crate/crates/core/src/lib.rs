//! Stochastic spectral-field simulation of two-photon absorption driven by
//! broadband down-converted light.
//!
//! The model draws an ensemble of thermal signal fields with deterministic
//! conjugate idlers, propagates them through a programmable spectral phase
//! mask, and accumulates the two-photon amplitude at the sum frequency.
//! The ensemble splits the absorption signal into a coherent part — the
//! phase-controllable interference of conjugate frequency pairs — and the
//! flat incoherent background, reproducing delay scans, pump-detuning
//! selectivity, dark-pulse shaping, and a delay-keyed spread-spectrum
//! communication demo.
//!
//! Start with [`source::SourceSpec`] and [`detector::tpa_ensemble`], or run
//! the bundled presets through the `dctpa` binary. The `examples/`
//! directory has one runnable program per capability.

pub mod analytic;
pub mod detector;
pub mod error;
pub mod grid;
pub mod harness;
pub mod ocdma;
pub mod shaper;
pub mod source;
pub mod stats;
pub mod units;

pub use error::{Error, Result};
