//! Coherent control law: sweeping the magnitude phi of a fine-period
//! square-wave phase mask modulates the coherent two-photon signal as
//! cos^2(phi/2) — complete annihilation at pi, 3pi, 5pi, complete revival
//! at 2pi, 4pi, 6pi — while the incoherent background never moves.
//!
//! Run with: cargo run --release --example phase_magnitude_sweep

use std::f64::consts::PI;

use dctpa::analytic::square_wave_law;
use dctpa::detector::{tpa_ensemble, Lineshape, TransitionSpec};
use dctpa::grid::FrequencyGrid;
use dctpa::shaper::{square_wave_mask, PhaseMask};
use dctpa::source::{EnvelopeShape, PumpLineshape, PumpSpec, SourceSpec};
use dctpa::units::{bandwidth_from_nm, omega_from_nm};

fn main() -> dctpa::Result<()> {
    let omega_max = omega_from_nm(790.0);
    let omega_min = omega_from_nm(1520.0);
    let grid = FrequencyGrid::new(0.5 * (omega_min + omega_max), omega_max - omega_min, 2048)?;
    let center = omega_from_nm(1033.3);
    let b = bandwidth_from_nm(1033.3, 100.0);
    let src = SourceSpec::new(grid, EnvelopeShape::Gaussian, center, b, 10.0)?;
    let pump = PumpSpec::new(
        omega_from_nm(516.65),
        bandwidth_from_nm(516.65, 0.04),
        PumpLineshape::Gaussian,
    )?;
    let transition = TransitionSpec::new(
        omega_from_nm(516.65),
        bandwidth_from_nm(516.65, 0.08),
        Lineshape::Lorentzian,
    )?;

    // fine period (B/16) so the two mask levels split the spectrum 50/50
    // within every relevant correlation window
    let period = b / 16.0;

    let mut norm = None;
    println!("phi_over_pi,coherent_norm,law");
    for i in 0..=48 {
        let phi = i as f64 * 6.0 * PI / 48.0;
        let mask = square_wave_mask(phi, period, center, grid.bin_width())?;
        let r = tpa_ensemble(
            &src,
            &pump,
            &transition,
            &mask,
            &PhaseMask::identity(),
            400,
            4,
        )?;
        let n = *norm.get_or_insert(r.coherent);
        println!(
            "{:.3},{:.4},{:.4}",
            phi / PI,
            r.coherent / n,
            square_wave_law(phi)
        );
    }
    Ok(())
}
