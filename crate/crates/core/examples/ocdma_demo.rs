//! Delay-keyed spread-spectrum link: bits ride as 0/pi phase flips on a
//! thermal-looking signal beam and are recovered only by a receiver that
//! holds the conjugate idler at the matched channel delay. A wrong-delay
//! receiver reads noise; an eavesdropper without the idler sees a beam
//! whose statistics are identical for 0 and 1.
//!
//! Run with: cargo run --release --example ocdma_demo

use dctpa::detector::{Lineshape, TransitionSpec};
use dctpa::grid::FrequencyGrid;
use dctpa::ocdma::{eavesdropper_guess, receive, transmit, ChannelSpec};
use dctpa::source::{EnvelopeShape, PumpLineshape, PumpSpec, SourceSpec};
use dctpa::units::{bandwidth_from_nm, omega_from_nm, seconds_from_fs};

fn main() -> dctpa::Result<()> {
    let omega_max = omega_from_nm(790.0);
    let omega_min = omega_from_nm(1520.0);
    let grid = FrequencyGrid::new(0.5 * (omega_min + omega_max), omega_max - omega_min, 1024)?;
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

    let bits: Vec<u8> = (0..64).map(|i: u32| (i.wrapping_mul(2654435761) >> 31) as u8).collect();
    let tau = seconds_from_fs(300.0);
    let channel = ChannelSpec::new(tau, 64)?;
    let tx = transmit(&bits, channel, &src, &pump, 5)?;

    let matched = receive(&tx, tau, &transition)?;
    println!(
        "matched receiver:    {} / {} bit errors",
        matched.errors,
        bits.len()
    );

    let wrong = receive(&tx, tau + seconds_from_fs(200.0), &transition)?;
    println!(
        "wrong-delay receiver: {} / {} bit errors (statistics at noise floor)",
        wrong.errors,
        bits.len()
    );

    let guesses = eavesdropper_guess(&tx)?;
    let correct = guesses.iter().zip(&bits).filter(|(g, b)| g == b).count();
    println!(
        "signal-only eavesdropper: {} / {} guessed (chance level)",
        correct,
        bits.len()
    );

    println!("\nfirst bits   : {:?}", &bits[..16]);
    println!("decoded      : {:?}", &matched.decoded[..16]);
    println!(
        "statistics   : {:?}",
        matched.statistics[..4]
            .iter()
            .map(|s| (s * 100.0).round() / 100.0)
            .collect::<Vec<_>>()
    );
    Ok(())
}
