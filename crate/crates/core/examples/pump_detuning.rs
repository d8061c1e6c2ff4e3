//! Pump-detuning scan: the coherent two-photon signal only survives while
//! the two-photon resonance sits inside the (narrow) pump line, so the
//! broadband source inherits the pump's spectral selectivity. The
//! incoherent background does not care.
//!
//! Run with: cargo run --release --example pump_detuning

use dctpa::detector::{tpa_ensemble, Lineshape, TransitionSpec};
use dctpa::grid::FrequencyGrid;
use dctpa::shaper::PhaseMask;
use dctpa::source::{EnvelopeShape, PumpLineshape, PumpSpec, SourceSpec};
use dctpa::units::{bandwidth_from_nm, nm_from_omega, omega_from_nm};

fn main() -> dctpa::Result<()> {
    let omega_max = omega_from_nm(800.0);
    let omega_min = omega_from_nm(1450.0);
    // a pump-detuning scan needs the grid to resolve the pump linewidth:
    // bin_width < gamma_p / 4
    let grid = FrequencyGrid::new(0.5 * (omega_min + omega_max), omega_max - omega_min, 16384)?;
    let src = SourceSpec::new(
        grid,
        EnvelopeShape::Gaussian,
        omega_from_nm(1033.3),
        bandwidth_from_nm(1033.3, 100.0),
        10.0,
    )?;
    let gamma_p = bandwidth_from_nm(516.65, 0.04);
    let transition = TransitionSpec::new(
        omega_from_nm(516.65),
        bandwidth_from_nm(516.65, 0.08),
        Lineshape::Lorentzian,
    )?;

    println!("pump_nm,coherent,incoherent,coherent_fraction");
    for i in -15..=15 {
        let center = omega_from_nm(516.65) + i as f64 * 0.25 * (gamma_p + transition.gamma_f);
        let pump = PumpSpec::new(center, gamma_p, PumpLineshape::Gaussian)?;
        let r = tpa_ensemble(
            &src,
            &pump,
            &transition,
            &PhaseMask::identity(),
            &PhaseMask::identity(),
            128,
            2,
        )?;
        println!(
            "{:.4},{:.4e},{:.4e},{:.3}",
            nm_from_omega(center),
            r.coherent,
            r.incoherent,
            r.coherent / r.total
        );
    }
    Ok(())
}
