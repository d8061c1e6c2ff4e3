//! Closed-form references: the coherent/incoherent ratio, the
//! transform-limited-pulse oracle, and the cos^2 square-wave control law.

use std::f64::consts::PI;

use crate::detector::TransitionSpec;
use crate::error::{Error, Result};
use crate::grid::{cross_spectrum_into, ConvScratch, OmegaGrid};
use crate::shaper::{apply_mask, PhaseMask};
use crate::source::{deterministic_pair, SourceSpec};

/// Bandwidths (rad/s) and mean photon number per mode entering the
/// coherent/incoherent ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioInputs {
    pub b: f64,
    pub gamma_p: f64,
    pub gamma_f: f64,
    pub n: f64,
}

impl RatioInputs {
    pub fn new(b: f64, gamma_p: f64, gamma_f: f64, n: f64) -> Result<Self> {
        let mut issues = Vec::new();
        if !(b > 0.0) {
            issues.push(format!("ratio.b: must be > 0, got {b}"));
        }
        if !(gamma_p > 0.0) {
            issues.push(format!("ratio.gamma_p: must be > 0, got {gamma_p}"));
        }
        if !(gamma_f > 0.0) {
            issues.push(format!("ratio.gamma_f: must be > 0, got {gamma_f}"));
        }
        if !(n >= 0.0) {
            issues.push(format!("ratio.n: must be >= 0, got {n}"));
        }
        if !issues.is_empty() {
            return Err(Error::Config(issues));
        }
        Ok(RatioInputs {
            b,
            gamma_p,
            gamma_f,
            n,
        })
    }
}

/// Ratio of the coherent to the incoherent TPA term,
/// `B/(gamma_p + gamma_f) * (n^2 + n/2pi)/n^2`.
///
/// The `n/2pi` term is the quantum low-flux contribution; it exists only in
/// this closed form, not in the semiclassical field model.
pub fn coherent_incoherent_ratio(inputs: &RatioInputs) -> Result<f64> {
    if inputs.n == 0.0 {
        return Err(Error::config(
            "ratio.n: the coherent/incoherent ratio diverges at n = 0",
        ));
    }
    let scale = inputs.b / (inputs.gamma_p + inputs.gamma_f);
    Ok(scale * (1.0 + 1.0 / (2.0 * PI * inputs.n)))
}

/// True iff the coherent term strictly dominates the incoherent one:
/// `B > (gamma_p + gamma_f) * n^2 / (n^2 + n/2pi)`.
pub fn dominance_threshold(inputs: &RatioInputs) -> bool {
    if inputs.n == 0.0 {
        // zero flux: the ratio diverges, so any finite bandwidth dominates
        return true;
    }
    let rhs = (inputs.gamma_p + inputs.gamma_f) * inputs.n * inputs.n
        / (inputs.n * inputs.n + inputs.n / (2.0 * PI));
    inputs.b > rhs
}

/// Transform-limited-pulse oracle for the coherent delay/mask response.
///
/// Runs the identical shaper + detector pipeline on a single deterministic
/// pair (`E_s = sqrt(envelope)`, conjugate-mapped idler, fixed pump), with
/// the mask composed with each delay; returns the curve normalized to peak
/// 1. The Monte-Carlo coherent term must match it in shape.
pub fn tl_oracle(
    src: &SourceSpec,
    pump_omega: f64,
    transition: &TransitionSpec,
    mask: &PhaseMask,
    taus: &[f64],
) -> Result<Vec<f64>> {
    let pair = deterministic_pair(src, pump_omega)?;
    let ogrid = OmegaGrid::for_grid(src.grid());
    let weights = transition.weights(&ogrid)?;
    let mut scratch = ConvScratch::new(src.grid());
    let mut curve = Vec::with_capacity(taus.len());
    for &tau in taus {
        let m = PhaseMask::Compose(vec![mask.clone(), PhaseMask::Delay(tau)]);
        let signal = apply_mask(&pair.signal, &m)?;
        let a = cross_spectrum_into(&signal, &pair.idler, &mut scratch)?;
        let value: f64 = a
            .amplitude()
            .iter()
            .zip(weights.iter())
            .map(|(v, w)| w * v.norm_sqr())
            .sum::<f64>()
            * ogrid.bin_width();
        curve.push(value);
    }
    let peak = curve.iter().cloned().fold(0.0_f64, f64::max);
    if peak > 0.0 {
        for v in curve.iter_mut() {
            *v /= peak;
        }
    }
    Ok(curve)
}

/// Fine-period square-wave control law: normalized coherent TPA
/// `cos^2(phi/2)`, with zeros at pi, 3pi, 5pi and unity at 0, 2pi, 4pi.
pub fn square_wave_law(phi: f64) -> f64 {
    0.5 * (1.0 + phi.cos())
}
