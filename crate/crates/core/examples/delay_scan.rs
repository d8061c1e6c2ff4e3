//! Delay scan of the two-photon signal for an unshaped broadband source:
//! the coherent term forms a femtosecond-scale peak at zero delay on top
//! of the flat incoherent background, as if the light were a pair of
//! transform-limited pulses.
//!
//! Run with: cargo run --release --example delay_scan

use dctpa::analytic::tl_oracle;
use dctpa::detector::{delay_response, Lineshape, TransitionSpec};
use dctpa::grid::FrequencyGrid;
use dctpa::shaper::PhaseMask;
use dctpa::source::{EnvelopeShape, PumpLineshape, PumpSpec, SourceSpec};
use dctpa::units::{bandwidth_from_nm, omega_from_nm, seconds_from_fs};

fn main() -> dctpa::Result<()> {
    // 100 nm-wide Gaussian envelope around the degenerate wavelength of a
    // 516.65 nm pump; narrowband pump, Lorentzian two-photon line.
    let omega_max = omega_from_nm(790.0);
    let omega_min = omega_from_nm(1520.0);
    let grid = FrequencyGrid::new(0.5 * (omega_min + omega_max), omega_max - omega_min, 2048)?;
    let src = SourceSpec::new(
        grid,
        EnvelopeShape::Gaussian,
        omega_from_nm(1033.3),
        bandwidth_from_nm(1033.3, 100.0),
        10.0,
    )?;
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

    let taus: Vec<f64> = (-30..=30).map(|i| seconds_from_fs(i as f64 * 5.0)).collect();
    let curve = delay_response(&src, &pump, &transition, &PhaseMask::identity(), &taus, 400, 1)?;
    let oracle = tl_oracle(&src, pump.center_omega, &transition, &PhaseMask::identity(), &taus)?;

    let peak = curve.iter().map(|r| r.coherent).fold(0.0_f64, f64::max);
    println!("tau_fs,coherent_norm,incoherent_norm,oracle");
    for ((tau, r), o) in taus.iter().zip(&curve).zip(&oracle) {
        println!(
            "{:.1},{:.4},{:.4},{:.4}",
            tau * 1e15,
            r.coherent / peak,
            r.incoherent / peak,
            o
        );
    }

    // fwhm of the coherent peak: the "effective pulse duration" of light
    // that never was a pulse
    let half: Vec<usize> = (0..curve.len())
        .filter(|&i| curve[i].coherent >= 0.5 * peak)
        .collect();
    let fwhm = taus[*half.last().unwrap()] - taus[*half.first().unwrap()];
    eprintln!("coherent peak fwhm ~ {:.0} fs", fwhm * 1e15);
    Ok(())
}
