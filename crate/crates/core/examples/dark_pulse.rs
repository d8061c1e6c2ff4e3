//! Dark pulse: a pi square-wave spectral phase on the signal beam makes
//! the coherent two-photon signal vanish at zero delay and pushes the
//! energy into two side lobes — the central peak splits, exactly as a
//! transform-limited pulse would split under the same mask.
//!
//! Run with: cargo run --release --example dark_pulse

use std::f64::consts::PI;

use dctpa::analytic::tl_oracle;
use dctpa::detector::{delay_response, Lineshape, TransitionSpec};
use dctpa::grid::FrequencyGrid;
use dctpa::shaper::square_wave_mask;
use dctpa::source::{EnvelopeShape, PumpLineshape, PumpSpec, SourceSpec};
use dctpa::units::{bandwidth_from_nm, omega_from_nm, seconds_from_fs};

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

    // square wave with period B/8, edges registered to the envelope center
    let mask = square_wave_mask(PI, b / 8.0, center, grid.bin_width())?;

    let taus: Vec<f64> = (-40..=40).map(|i| seconds_from_fs(i as f64 * 3.75)).collect();
    let curve = delay_response(&src, &pump, &transition, &mask, &taus, 400, 3)?;
    let oracle = tl_oracle(&src, pump.center_omega, &transition, &mask, &taus)?;

    let peak = curve.iter().map(|r| r.coherent).fold(0.0_f64, f64::max);
    println!("tau_fs,coherent_norm,oracle");
    for ((tau, r), o) in taus.iter().zip(&curve).zip(&oracle) {
        println!("{:.2},{:.4},{:.4}", tau * 1e15, r.coherent / peak, o);
    }

    let mid = curve.len() / 2;
    eprintln!(
        "coherent at tau=0: {:.1}% of peak (dark pulse)",
        100.0 * curve[mid].coherent / peak
    );
    Ok(())
}
