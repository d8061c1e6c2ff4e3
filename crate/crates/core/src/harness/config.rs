//! Run configuration: a TOML file with explicitly unit-suffixed keys
//! (wavelengths in nm, times in fs, phases in rad), compiled into the
//! internal rad/s specs with all validation errors collected per field.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::detector::{Lineshape, TransitionSpec};
use crate::error::{Error, Result};
use crate::grid::FrequencyGrid;
use crate::shaper::{load_tabulated_mask, square_wave_mask, PhaseMask};
use crate::source::{EnvelopeShape, PumpLineshape, PumpSpec, SourceSpec};
use crate::units::{bandwidth_from_nm, omega_from_nm, seconds_from_fs};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_mode")]
    pub mode: String,
    pub grid: GridSection,
    pub source: SourceSection,
    pub pump: PumpSection,
    pub transition: TransitionSection,
    #[serde(default)]
    pub mask: MaskSection,
    pub scan: Option<ScanSection>,
    pub run: RunSection,
    pub output: OutputSection,
    pub ocdma: Option<OcdmaSection>,
}

fn default_mode() -> String {
    "scan".into()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub min_nm: f64,
    pub max_nm: f64,
    pub n_bins: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceSection {
    pub envelope: EnvelopeShape,
    pub center_nm: f64,
    pub fwhm_nm: f64,
    pub mean_photon_flux: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PumpSection {
    pub center_nm: f64,
    pub fwhm_nm: f64,
    pub lineshape: PumpLineshape,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionSection {
    pub wavelength_nm: f64,
    pub fwhm_nm: f64,
    pub lineshape: Lineshape,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaskSection {
    #[serde(default = "default_mask_kind")]
    pub kind: String,
    pub magnitude_rad: Option<f64>,
    pub period_nm: Option<f64>,
    pub offset_nm: Option<f64>,
    pub delay_fs: Option<f64>,
    pub gdd_fs2: Option<f64>,
    pub file: Option<PathBuf>,
}

fn default_mask_kind() -> String {
    "none".into()
}

impl Default for MaskSection {
    fn default() -> Self {
        MaskSection {
            kind: default_mask_kind(),
            magnitude_rad: None,
            period_nm: None,
            offset_nm: None,
            delay_fs: None,
            gdd_fs2: None,
            file: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSection {
    /// One of `delay` (fs), `pump_wavelength` (nm), `mask_magnitude` (rad).
    pub axis: String,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub realizations: usize,
    pub seed: u64,
    #[serde(default)]
    pub threads: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub path: PathBuf,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OcdmaSection {
    pub bits_file: PathBuf,
    pub channel_delay_fs: f64,
    pub realizations_per_bit: usize,
    pub rx_delay_fs: f64,
    pub results_path: PathBuf,
}

/// Scan axis with values in their configuration units.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanAxis {
    Delay,
    PumpWavelength,
    MaskMagnitude,
}

impl ScanAxis {
    pub fn name(&self) -> &'static str {
        match self {
            ScanAxis::Delay => "delay_fs",
            ScanAxis::PumpWavelength => "pump_wavelength_nm",
            ScanAxis::MaskMagnitude => "mask_magnitude_rad",
        }
    }
}

/// Fully validated, unit-converted run plan.
#[derive(Debug, Clone)]
pub struct CompiledConfig {
    pub grid: FrequencyGrid,
    pub source: SourceSpec,
    pub pump: PumpSpec,
    pub transition: TransitionSpec,
    pub mask: PhaseMask,
    /// Square-wave parameters in rad/s, kept for mask_magnitude scans.
    pub square_wave: Option<(f64, f64)>, // (period, offset)
    pub scan: Option<CompiledScan>,
    pub realizations: usize,
    pub seed: u64,
    pub threads: usize,
    pub output_path: PathBuf,
    pub ocdma: Option<OcdmaSection>,
    pub mode: String,
}

#[derive(Debug, Clone)]
pub struct CompiledScan {
    pub axis: ScanAxis,
    /// Axis values in configuration units (fs, nm or rad).
    pub values: Vec<f64>,
}

fn push_err(issues: &mut Vec<String>, e: Error) {
    match e {
        Error::Config(list) => issues.extend(list),
        other => issues.push(other.to_string()),
    }
}

impl RunConfig {
    /// Parse a TOML config file (structure only; no physics validation).
    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config(format!("config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| Error::config(format!("config {}: {e}", path.display())))
    }

    /// Validate everything and convert to internal units. All issues are
    /// collected before reporting; file paths inside the config are
    /// resolved relative to `base_dir`.
    pub fn compile(&self, base_dir: &Path) -> Result<CompiledConfig> {
        let mut issues = Vec::new();

        if self.mode != "scan" && self.mode != "ocdma" {
            issues.push(format!(
                "mode: must be \"scan\" or \"ocdma\", got {:?}",
                self.mode
            ));
        }

        // grid: wavelength bounds -> angular-frequency band
        let mut grid = None;
        if !(self.grid.min_nm > 0.0) || !(self.grid.max_nm > self.grid.min_nm) {
            issues.push(format!(
                "grid: need 0 < min_nm < max_nm, got min_nm={} max_nm={}",
                self.grid.min_nm, self.grid.max_nm
            ));
        } else {
            let omega_max = omega_from_nm(self.grid.min_nm);
            let omega_min = omega_from_nm(self.grid.max_nm);
            match FrequencyGrid::new(
                0.5 * (omega_min + omega_max),
                omega_max - omega_min,
                self.grid.n_bins,
            ) {
                Ok(g) => grid = Some(g),
                Err(e) => push_err(&mut issues, e),
            }
        }

        // source
        let mut source = None;
        if let Some(g) = grid {
            if !(self.source.fwhm_nm > 0.0) {
                issues.push(format!(
                    "source.fwhm_nm: must be > 0, got {}",
                    self.source.fwhm_nm
                ));
            } else {
                match SourceSpec::new(
                    g,
                    self.source.envelope,
                    omega_from_nm(self.source.center_nm),
                    bandwidth_from_nm(self.source.center_nm, self.source.fwhm_nm),
                    self.source.mean_photon_flux,
                ) {
                    Ok(s) => source = Some(s),
                    Err(e) => push_err(&mut issues, e),
                }
            }
        }

        // pump
        let mut pump = None;
        if self.pump.fwhm_nm > 0.0 && self.pump.center_nm > 0.0 {
            match PumpSpec::new(
                omega_from_nm(self.pump.center_nm),
                bandwidth_from_nm(self.pump.center_nm, self.pump.fwhm_nm),
                self.pump.lineshape,
            ) {
                Ok(p) => pump = Some(p),
                Err(e) => push_err(&mut issues, e),
            }
        } else {
            issues.push(format!(
                "pump: center_nm and fwhm_nm must be > 0, got center_nm={} fwhm_nm={}",
                self.pump.center_nm, self.pump.fwhm_nm
            ));
        }
        if let (Some(s), Some(p)) = (&source, &pump) {
            if !s.mirror_on_grid(p.center_omega) {
                issues.push(
                    "pump.center_nm: conjugate of the source envelope falls off the grid".into(),
                );
            }
        }

        // transition
        let mut transition = None;
        if self.transition.wavelength_nm > 0.0 && self.transition.fwhm_nm > 0.0 {
            match TransitionSpec::new(
                omega_from_nm(self.transition.wavelength_nm),
                bandwidth_from_nm(self.transition.wavelength_nm, self.transition.fwhm_nm),
                self.transition.lineshape,
            ) {
                Ok(t) => transition = Some(t),
                Err(e) => push_err(&mut issues, e),
            }
        } else {
            issues.push(format!(
                "transition: wavelength_nm and fwhm_nm must be > 0, got wavelength_nm={} fwhm_nm={}",
                self.transition.wavelength_nm, self.transition.fwhm_nm
            ));
        }

        // mask
        let mut mask = PhaseMask::identity();
        let mut square_wave = None;
        match self.mask.kind.as_str() {
            "none" => {}
            "square_wave" => {
                let magnitude = self.mask.magnitude_rad.unwrap_or_else(|| {
                    issues.push("mask.magnitude_rad: required for kind=square_wave".into());
                    0.0
                });
                match (self.mask.period_nm, grid) {
                    (Some(period_nm), Some(g)) if period_nm > 0.0 => {
                        let offset_nm = self.mask.offset_nm.unwrap_or(self.source.center_nm);
                        let period = bandwidth_from_nm(offset_nm, period_nm);
                        let offset = omega_from_nm(offset_nm);
                        match square_wave_mask(magnitude, period, offset, g.bin_width()) {
                            Ok(m) => {
                                mask = m;
                                square_wave = Some((period, offset));
                            }
                            Err(e) => push_err(&mut issues, e),
                        }
                    }
                    (Some(p), _) if p <= 0.0 => {
                        issues.push(format!("mask.period_nm: must be > 0, got {p}"));
                    }
                    (None, _) => {
                        issues.push("mask.period_nm: required for kind=square_wave".into());
                    }
                    _ => {}
                }
            }
            "delay" => match self.mask.delay_fs {
                Some(d) => mask = PhaseMask::Delay(seconds_from_fs(d)),
                None => issues.push("mask.delay_fs: required for kind=delay".into()),
            },
            "dispersion" => match self.mask.gdd_fs2 {
                Some(gdd) => {
                    mask = PhaseMask::Dispersion {
                        gdd: gdd * 1e-30,
                        omega0: omega_from_nm(self.source.center_nm),
                    }
                }
                None => issues.push("mask.gdd_fs2: required for kind=dispersion".into()),
            },
            "tabulated" => match &self.mask.file {
                Some(f) => {
                    let path = if f.is_absolute() {
                        f.clone()
                    } else {
                        base_dir.join(f)
                    };
                    match load_tabulated_mask(&path) {
                        Ok(m) => mask = m,
                        Err(e) => push_err(&mut issues, e),
                    }
                }
                None => issues.push("mask.file: required for kind=tabulated".into()),
            },
            other => issues.push(format!(
                "mask.kind: unknown kind {other:?} (expected none, square_wave, delay, dispersion or tabulated)"
            )),
        }

        // run
        if self.run.realizations < 2 {
            issues.push(format!(
                "run.realizations: must be >= 2, got {}",
                self.run.realizations
            ));
        }

        // scan
        let mut scan = None;
        match (&self.scan, self.mode.as_str()) {
            (Some(s), _) => {
                let axis = match s.axis.as_str() {
                    "delay" => Some(ScanAxis::Delay),
                    "pump_wavelength" => Some(ScanAxis::PumpWavelength),
                    "mask_magnitude" => Some(ScanAxis::MaskMagnitude),
                    other => {
                        issues.push(format!(
                            "scan.axis: unknown axis {other:?} (expected delay, pump_wavelength or mask_magnitude)"
                        ));
                        None
                    }
                };
                if s.steps < 2 {
                    issues.push(format!("scan.steps: must be >= 2, got {}", s.steps));
                }
                if !s.start.is_finite() || !s.stop.is_finite() || s.stop <= s.start {
                    issues.push(format!(
                        "scan: need finite start < stop, got start={} stop={}",
                        s.start, s.stop
                    ));
                }
                if let (Some(ScanAxis::PumpWavelength), Some(g), Some(p)) = (axis, grid, &pump) {
                    // the pump-detuning curve is gamma_p-limited; the grid
                    // must resolve it or nearest-bin conjugate rounding
                    // dominates the scan
                    if g.bin_width() >= p.fwhm_omega / 4.0 {
                        issues.push(format!(
                            "scan: pump_wavelength scan needs bin_width < pump fwhm / 4 (bin_width {:.3e} rad/s, pump fwhm {:.3e} rad/s)",
                            g.bin_width(),
                            p.fwhm_omega
                        ));
                    }
                }
                if axis == Some(ScanAxis::MaskMagnitude) && square_wave.is_none() {
                    issues.push(
                        "scan: mask_magnitude scan requires mask.kind = square_wave".into(),
                    );
                }
                if let Some(axis) = axis {
                    if s.steps >= 2 && s.stop > s.start {
                        let step = (s.stop - s.start) / (s.steps - 1) as f64;
                        let values = (0..s.steps).map(|i| s.start + i as f64 * step).collect();
                        scan = Some(CompiledScan { axis, values });
                    }
                }
            }
            (None, "scan") => issues.push("scan: section required when mode = \"scan\"".into()),
            (None, _) => {}
        }

        // ocdma
        if self.mode == "ocdma" {
            match &self.ocdma {
                Some(o) => {
                    if o.realizations_per_bit < 2 {
                        issues.push(format!(
                            "ocdma.realizations_per_bit: must be >= 2, got {}",
                            o.realizations_per_bit
                        ));
                    }
                }
                None => issues.push("ocdma: section required when mode = \"ocdma\"".into()),
            }
        }

        if !issues.is_empty() {
            return Err(Error::Config(issues));
        }

        let output_path = if self.output.path.is_absolute() {
            self.output.path.clone()
        } else {
            base_dir.join(&self.output.path)
        };
        let mut ocdma = self.ocdma.clone();
        if let Some(o) = ocdma.as_mut() {
            if !o.bits_file.is_absolute() {
                o.bits_file = base_dir.join(&o.bits_file);
            }
            if !o.results_path.is_absolute() {
                o.results_path = base_dir.join(&o.results_path);
            }
        }
        Ok(CompiledConfig {
            grid: grid.unwrap(),
            source: source.unwrap(),
            pump: pump.unwrap(),
            transition: transition.unwrap(),
            mask,
            square_wave,
            scan,
            realizations: self.run.realizations,
            seed: self.run.seed,
            threads: self.run.threads,
            output_path,
            ocdma,
            mode: self.mode.clone(),
        })
    }
}

/// Load and fully validate a config file.
pub fn validate_config(path: &Path) -> Result<CompiledConfig> {
    let cfg = RunConfig::load(path)?;
    let base = path.parent().unwrap_or(Path::new("."));
    cfg.compile(base)
}
