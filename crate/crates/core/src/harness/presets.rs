//! Ready-made configurations for the standard demonstrations: delay scans
//! with and without a dark-pulse mask, the pump-detuning scan, the
//! square-wave magnitude sweep, and the delay-keyed communication demo.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

pub const PRESET_NAMES: &[&str] = &["fig2a", "fig2b", "fig3b", "fig3c", "ocdma-demo"];

fn common_physics() -> String {
    r#"[source]
envelope = "gaussian"
center_nm = 1033.3
fwhm_nm = 100.0
mean_photon_flux = 10.0

[pump]
center_nm = 516.65
fwhm_nm = 0.04
lineshape = "gaussian"

[transition]
wavelength_nm = 516.65
fwhm_nm = 0.08
lineshape = "lorentzian"
"#
    .to_string()
}

fn preset_toml(name: &str) -> Option<String> {
    let physics = common_physics();
    let text = match name {
        // delay scan, no mask: central coherent peak on a flat background
        "fig2a" => format!(
            r#"# Delay scan of the two-photon signal, unshaped source.
[grid]
min_nm = 790.0
max_nm = 1520.0
n_bins = 4096

{physics}
[scan]
axis = "delay"
start = -150.0
stop = 150.0
steps = 61

[run]
realizations = 2000
seed = 1

[output]
path = "fig2a.csv"
"#
        ),
        // pump-wavelength scan: coherent selectivity set by the pump and
        // transition linewidths
        "fig2b" => format!(
            r#"# Pump-detuning scan of the two-photon signal.
[grid]
min_nm = 800.0
max_nm = 1450.0
n_bins = 16384

{physics}
[scan]
axis = "pump_wavelength"
start = 516.35
stop = 516.95
steps = 61

[run]
realizations = 256
seed = 2

[output]
path = "fig2b.csv"
"#
        ),
        // pi square wave: dark pulse, split central peak
        "fig3b" => format!(
            r#"# Delay scan with a pi square-wave phase mask (dark pulse).
[grid]
min_nm = 790.0
max_nm = 1520.0
n_bins = 4096

{physics}
[mask]
kind = "square_wave"
magnitude_rad = 3.141592653589793
period_nm = 12.5
offset_nm = 1033.3

[scan]
axis = "delay"
start = -150.0
stop = 150.0
steps = 61

[run]
realizations = 2000
seed = 3

[output]
path = "fig3b.csv"
"#
        ),
        // magnitude sweep of a fine-period square wave: cos^2 control law
        "fig3c" => format!(
            r#"# Square-wave magnitude sweep at zero delay.
[grid]
min_nm = 790.0
max_nm = 1520.0
n_bins = 4096

{physics}
[mask]
kind = "square_wave"
magnitude_rad = 0.0
period_nm = 6.25
offset_nm = 1033.3

[scan]
axis = "mask_magnitude"
start = 0.0
stop = 18.84955592153876
steps = 49

[run]
realizations = 2000
seed = 4

[output]
path = "fig3c.csv"
"#
        ),
        // delay-keyed spread-spectrum link
        "ocdma-demo" => format!(
            r#"# Delay-keyed communication demo: 256 bits, matched receiver.
mode = "ocdma"

[grid]
min_nm = 790.0
max_nm = 1520.0
n_bins = 1024

{physics}
[run]
realizations = 64
seed = 5

[output]
path = "ocdma-summary.csv"

[ocdma]
bits_file = "bits.txt"
channel_delay_fs = 300.0
realizations_per_bit = 64
rx_delay_fs = 300.0
results_path = "ocdma.csv"
"#
        ),
        _ => return None,
    };
    Some(text)
}

/// Deterministic pseudo-random bitstream for the communication demo
/// (xorshift so the file is stable across releases).
fn demo_bits(n: usize) -> Vec<u8> {
    let mut state: u64 = 0x1234_5678_9abc_def1;
    (0..n)
        .map(|_| {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state & 1) as u8
        })
        .collect()
}

/// Write the named preset's config (and auxiliary files) into `dir`;
/// returns the config path.
pub fn write_preset(name: &str, dir: &Path) -> Result<PathBuf> {
    let text = preset_toml(name).ok_or_else(|| {
        Error::config(format!(
            "preset: unknown name {name:?} (expected one of {PRESET_NAMES:?})"
        ))
    })?;
    fs::create_dir_all(dir)?;
    let path = dir.join(format!("{name}.toml"));
    fs::write(&path, text)?;
    if name == "ocdma-demo" {
        crate::ocdma::write_bits(&dir.join("bits.txt"), &demo_bits(256))?;
    }
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::validate_config;

    #[test]
    fn all_presets_validate() {
        let dir = std::env::temp_dir().join("dctpa-preset-test");
        for name in PRESET_NAMES {
            let path = write_preset(name, &dir).unwrap();
            let cfg = validate_config(&path).unwrap();
            if *name == "ocdma-demo" {
                assert_eq!(cfg.mode, "ocdma");
            } else {
                assert!(cfg.scan.is_some());
            }
        }
    }

    #[test]
    fn unknown_preset_rejected() {
        let dir = std::env::temp_dir().join("dctpa-preset-test");
        assert!(write_preset("fig9z", &dir).is_err());
    }

    #[test]
    fn demo_bits_are_balanced_and_stable() {
        let bits = demo_bits(256);
        let ones: usize = bits.iter().map(|&b| b as usize).sum();
        assert!(ones > 96 && ones < 160, "ones = {ones}");
        assert_eq!(bits[..8], demo_bits(8)[..]);
    }
}
