//! Scan execution: sweeps one axis (delay, pump wavelength or square-wave
//! magnitude) with common random numbers across axis points and emits a
//! versioned CSV. Output bytes depend only on (config, seed), never on the
//! worker count.

use std::fs;

use crate::analytic::{square_wave_law, tl_oracle};
use crate::detector::{tpa_ensemble, TpaResult};
use crate::error::{Error, Result};
use crate::harness::config::{CompiledConfig, ScanAxis};
use crate::ocdma::{read_bits, receive, transmit, write_results_csv, BitstreamResult, ChannelSpec};
use crate::shaper::{square_wave_mask, PhaseMask};
use crate::source::PumpSpec;
use crate::units::{omega_from_nm, seconds_from_fs};

pub const CSV_HEADER: &str =
    "#schema=1\naxis,total,coherent,incoherent,stderr_total,stderr_coherent,oracle\n";

/// Run `f` inside a dedicated rayon pool of `threads` workers (0 = the
/// default global pool).
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    if threads == 0 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Numerical(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

fn point_run(cfg: &CompiledConfig, axis: ScanAxis, value: f64) -> Result<TpaResult> {
    let (pump, mask): (PumpSpec, PhaseMask) = match axis {
        ScanAxis::Delay => (
            cfg.pump,
            PhaseMask::Compose(vec![
                cfg.mask.clone(),
                PhaseMask::Delay(seconds_from_fs(value)),
            ]),
        ),
        ScanAxis::PumpWavelength => (
            PumpSpec::new(omega_from_nm(value), cfg.pump.fwhm_omega, cfg.pump.lineshape)?,
            cfg.mask.clone(),
        ),
        ScanAxis::MaskMagnitude => {
            let (period, offset) = cfg
                .square_wave
                .ok_or_else(|| Error::config("mask_magnitude scan requires a square-wave mask"))?;
            (
                cfg.pump,
                square_wave_mask(value, period, offset, cfg.grid.bin_width())?,
            )
        }
    };
    tpa_ensemble(
        &cfg.source,
        &pump,
        &cfg.transition,
        &mask,
        &PhaseMask::identity(),
        cfg.realizations,
        cfg.seed,
    )
}

/// Closed-form oracle column for the scan, normalized to peak 1.
/// Pump-wavelength scans have no closed form here; the column is NaN.
pub fn oracle_column(cfg: &CompiledConfig) -> Result<Vec<f64>> {
    let scan = cfg
        .scan
        .as_ref()
        .ok_or_else(|| Error::config("scan: section required"))?;
    match scan.axis {
        ScanAxis::Delay => {
            let taus: Vec<f64> = scan.values.iter().map(|&v| seconds_from_fs(v)).collect();
            tl_oracle(
                &cfg.source,
                cfg.pump.center_omega,
                &cfg.transition,
                &cfg.mask,
                &taus,
            )
        }
        ScanAxis::MaskMagnitude => Ok(scan.values.iter().map(|&v| square_wave_law(v)).collect()),
        ScanAxis::PumpWavelength => Ok(vec![f64::NAN; scan.values.len()]),
    }
}

/// Execute the configured scan and render the CSV.
pub fn run_scan(cfg: &CompiledConfig) -> Result<String> {
    let scan = cfg
        .scan
        .as_ref()
        .ok_or_else(|| Error::config("scan: section required when mode = \"scan\""))?;
    let oracle = oracle_column(cfg)?;
    let mut csv = String::from(CSV_HEADER);
    for (i, &value) in scan.values.iter().enumerate() {
        let r = point_run(cfg, scan.axis, value)?;
        csv.push_str(&format!(
            "{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e}\n",
            value, r.total, r.coherent, r.incoherent, r.stderr_total, r.stderr_coherent, oracle[i]
        ));
    }
    Ok(csv)
}

/// Run the scan and write the CSV to the configured output path.
pub fn run_scan_to_file(cfg: &CompiledConfig) -> Result<String> {
    let csv = with_threads(cfg.threads, || run_scan(cfg))??;
    if let Some(parent) = cfg.output_path.parent() {
        fs::create_dir_all(parent)?;
    }
    fs::write(&cfg.output_path, &csv)?;
    Ok(csv)
}

/// Render the oracle curves only (the `oracle` CLI subcommand).
pub fn oracle_csv(cfg: &CompiledConfig) -> Result<String> {
    let scan = cfg
        .scan
        .as_ref()
        .ok_or_else(|| Error::config("scan: section required for oracle output"))?;
    if scan.axis == ScanAxis::PumpWavelength {
        return Err(Error::config(
            "oracle: no closed-form curve for pump_wavelength scans",
        ));
    }
    let oracle = oracle_column(cfg)?;
    let mut csv = String::from("#schema=1\naxis,oracle\n");
    for (v, o) in scan.values.iter().zip(oracle.iter()) {
        csv.push_str(&format!("{:.12e},{:.12e}\n", v, o));
    }
    Ok(csv)
}

/// Run the configured OCDMA transmission end to end, writing the per-bit
/// results CSV; returns the decoded stream.
pub fn run_ocdma(cfg: &CompiledConfig) -> Result<BitstreamResult> {
    let o = cfg
        .ocdma
        .as_ref()
        .ok_or_else(|| Error::config("ocdma: section required when mode = \"ocdma\""))?;
    let bits = read_bits(&o.bits_file)?;
    let channel = ChannelSpec::new(
        seconds_from_fs(o.channel_delay_fs),
        o.realizations_per_bit,
    )?;
    let tx = transmit(&bits, channel, &cfg.source, &cfg.pump, cfg.seed)?;
    let result = with_threads(cfg.threads, || {
        receive(&tx, seconds_from_fs(o.rx_delay_fs), &cfg.transition)
    })??;
    if let Some(parent) = o.results_path.parent() {
        fs::create_dir_all(parent)?;
    }
    write_results_csv(&o.results_path, &bits, &result)?;
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::RunConfig;
    use std::path::Path;

    fn small_cfg(extra: &str) -> CompiledConfig {
        let text = format!(
            r#"
[grid]
min_nm = 790.0
max_nm = 1520.0
n_bins = 256

[source]
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

{extra}

[run]
realizations = 32
seed = 1

[output]
path = "out.csv"
"#
        );
        let cfg: RunConfig = toml::from_str(&text).unwrap();
        cfg.compile(Path::new(".")).unwrap()
    }

    #[test]
    fn delay_scan_csv_has_schema_and_rows() {
        let cfg = small_cfg("[scan]\naxis = \"delay\"\nstart = -100.0\nstop = 100.0\nsteps = 5");
        let csv = run_scan(&cfg).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "#schema=1");
        assert_eq!(
            lines[1],
            "axis,total,coherent,incoherent,stderr_total,stderr_coherent,oracle"
        );
        assert_eq!(lines.len(), 2 + 5);
        for row in &lines[2..] {
            assert_eq!(row.split(',').count(), 7);
        }
    }

    #[test]
    fn repeat_run_is_byte_identical() {
        let cfg = small_cfg("[scan]\naxis = \"delay\"\nstart = -50.0\nstop = 50.0\nsteps = 3");
        let a = run_scan(&cfg).unwrap();
        let b = run_scan(&cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn mask_magnitude_scan_uses_control_law_oracle() {
        let cfg = small_cfg(
            "[mask]\nkind = \"square_wave\"\nmagnitude_rad = 0.0\nperiod_nm = 12.5\n\n[scan]\naxis = \"mask_magnitude\"\nstart = 0.0\nstop = 6.283185307179586\nsteps = 5",
        );
        let oracle = oracle_column(&cfg).unwrap();
        assert!((oracle[0] - 1.0).abs() < 1e-12);
        assert!(oracle[2].abs() < 1e-12); // pi
        assert!((oracle[4] - 1.0).abs() < 1e-9); // 2 pi
    }
}
