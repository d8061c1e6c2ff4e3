//! Pure spectral-phase filtering: delay lines, dispersion, square-wave
//! masks and tabulated masks. A mask multiplies each bin by
//! `exp(i phase(w))` and never touches the magnitudes.

use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::SpectralField;
use crate::units::omega_from_nm;

/// A spectral phase filter. All variants are diagonal in frequency, so
/// masks commute and compose by adding phases.
#[derive(Debug, Clone, PartialEq)]
pub enum PhaseMask {
    /// Flat phase `phi0`; `Constant(0)` is the identity.
    Constant(f64),
    /// Delay by `tau` seconds: phase `w * tau`.
    Delay(f64),
    /// Group-delay dispersion: phase `(gdd / 2) (w - w0)^2`.
    Dispersion { gdd: f64, omega0: f64 },
    /// Phase alternating between 0 and `magnitude` with 50% duty cycle;
    /// segments of length `period / 2`, with a segment edge at `offset`.
    SquareWave {
        magnitude: f64,
        period: f64,
        offset: f64,
    },
    /// Phase of the nearest breakpoint `(w, phase)`; breakpoints must be
    /// sorted by frequency.
    Tabulated(Vec<(f64, f64)>),
    Compose(Vec<PhaseMask>),
}

impl PhaseMask {
    pub fn identity() -> Self {
        PhaseMask::Constant(0.0)
    }

    /// Spectral phase at angular frequency `w`.
    pub fn phase(&self, omega: f64) -> f64 {
        match self {
            PhaseMask::Constant(phi) => *phi,
            PhaseMask::Delay(tau) => omega * tau,
            PhaseMask::Dispersion { gdd, omega0 } => 0.5 * gdd * (omega - omega0).powi(2),
            PhaseMask::SquareWave {
                magnitude,
                period,
                offset,
            } => {
                let seg = ((omega - offset) / (0.5 * period)).floor() as i64;
                if seg.rem_euclid(2) == 0 {
                    0.0
                } else {
                    *magnitude
                }
            }
            PhaseMask::Tabulated(points) => {
                if points.is_empty() {
                    return 0.0;
                }
                let idx = match points
                    .binary_search_by(|(w, _)| w.partial_cmp(&omega).unwrap())
                {
                    Ok(i) => i,
                    Err(0) => 0,
                    Err(i) if i == points.len() => points.len() - 1,
                    Err(i) => {
                        if (omega - points[i - 1].0) <= (points[i].0 - omega) {
                            i - 1
                        } else {
                            i
                        }
                    }
                };
                points[idx].1
            }
            PhaseMask::Compose(list) => list.iter().map(|m| m.phase(omega)).sum(),
        }
    }

    fn check_finite(&self) -> Result<()> {
        let ok = match self {
            PhaseMask::Constant(phi) => phi.is_finite(),
            PhaseMask::Delay(tau) => tau.is_finite(),
            PhaseMask::Dispersion { gdd, omega0 } => gdd.is_finite() && omega0.is_finite(),
            PhaseMask::SquareWave {
                magnitude,
                period,
                offset,
            } => {
                magnitude.is_finite() && period.is_finite() && *period > 0.0 && offset.is_finite()
            }
            PhaseMask::Tabulated(points) => points
                .iter()
                .all(|(w, p)| w.is_finite() && p.is_finite()),
            PhaseMask::Compose(list) => {
                for m in list {
                    m.check_finite()?;
                }
                true
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::config("mask: non-finite phase parameters"))
        }
    }
}

/// Square-wave mask builder with the resolvability check against a grid
/// bin width: the period must span at least 4 bins.
pub fn square_wave_mask(
    magnitude: f64,
    period: f64,
    offset: f64,
    bin_width: f64,
) -> Result<PhaseMask> {
    if !(period >= 4.0 * bin_width) {
        return Err(Error::config(format!(
            "mask.period: square-wave period {period:.6e} rad/s not resolvable on grid with bin width {bin_width:.6e} (need period >= 4 * bin_width)"
        )));
    }
    Ok(PhaseMask::SquareWave {
        magnitude,
        period,
        offset,
    })
}

/// Apply a mask: `E(w) <- E(w) exp(i phase(w))`.
pub fn apply_mask(field: &SpectralField, mask: &PhaseMask) -> Result<SpectralField> {
    let mut out = field.clone();
    apply_mask_in_place(&mut out, mask)?;
    Ok(out)
}

pub fn apply_mask_in_place(field: &mut SpectralField, mask: &PhaseMask) -> Result<()> {
    mask.check_finite()?;
    if let PhaseMask::Constant(phi) = mask {
        if *phi == 0.0 {
            return Ok(());
        }
    }
    let grid = *field.grid();
    for (j, a) in field.amplitude_mut().iter_mut().enumerate() {
        let phase = mask.phase(grid.omega(j));
        *a *= Complex64::from_polar(1.0, phase);
    }
    Ok(())
}

/// Load a tabulated mask from a two-column text file (wavelength_nm,
/// phase_rad), one breakpoint per line, `#` comments allowed. Breakpoints
/// are re-sorted into ascending frequency.
pub fn load_tabulated_mask(path: &Path) -> Result<PhaseMask> {
    let text = std::fs::read_to_string(path)?;
    let mut points = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut cols = line.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty());
        let (Some(a), Some(b)) = (cols.next(), cols.next()) else {
            return Err(Error::config(format!(
                "mask file {}:{}: expected two columns",
                path.display(),
                lineno + 1
            )));
        };
        let lambda: f64 = a.parse().map_err(|_| {
            Error::config(format!(
                "mask file {}:{}: bad wavelength {a:?}",
                path.display(),
                lineno + 1
            ))
        })?;
        let phase: f64 = b.parse().map_err(|_| {
            Error::config(format!(
                "mask file {}:{}: bad phase {b:?}",
                path.display(),
                lineno + 1
            ))
        })?;
        if !(lambda > 0.0) {
            return Err(Error::config(format!(
                "mask file {}:{}: wavelength must be positive",
                path.display(),
                lineno + 1
            )));
        }
        points.push((omega_from_nm(lambda), phase));
    }
    points.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    Ok(PhaseMask::Tabulated(points))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{to_time, FrequencyGrid};
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random_field(grid: FrequencyGrid, seed: u64) -> SpectralField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let amps = (0..grid.n_bins())
            .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
            .collect();
        SpectralField::from_amplitudes(grid, amps).unwrap()
    }

    fn test_grid() -> FrequencyGrid {
        FrequencyGrid::new(2.0e15, 4.0e14, 256).unwrap()
    }

    #[test]
    fn constant_zero_is_identity_bit_exact() {
        let f = random_field(test_grid(), 1);
        let g = apply_mask(&f, &PhaseMask::identity()).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn two_pi_square_wave_is_identity() {
        let grid = test_grid();
        let f = random_field(grid, 2);
        let mask = square_wave_mask(
            2.0 * PI,
            40.0 * grid.bin_width(),
            grid.center_omega(),
            grid.bin_width(),
        )
        .unwrap();
        let g = apply_mask(&f, &mask).unwrap();
        for (a, b) in f.amplitude().iter().zip(g.amplitude()) {
            assert!((a - b).norm() <= 1e-12 * a.norm());
        }
    }

    #[test]
    fn zero_magnitude_square_wave_is_identity() {
        let grid = test_grid();
        let mask =
            square_wave_mask(0.0, 10.0 * grid.bin_width(), 0.0, grid.bin_width()).unwrap();
        let f = random_field(grid, 3);
        let g = apply_mask(&f, &mask).unwrap();
        for (a, b) in f.amplitude().iter().zip(g.amplitude()) {
            assert!((a - b).norm() <= 1e-15);
        }
    }

    #[test]
    fn unresolvable_period_rejected() {
        let grid = test_grid();
        assert!(square_wave_mask(PI, 3.0 * grid.bin_width(), 0.0, grid.bin_width()).is_err());
    }

    #[test]
    fn non_finite_phase_rejected() {
        let f = random_field(test_grid(), 4);
        assert!(apply_mask(&f, &PhaseMask::Constant(f64::NAN)).is_err());
        assert!(apply_mask(&f, &PhaseMask::Delay(f64::INFINITY)).is_err());
    }

    #[test]
    fn delay_shifts_temporal_envelope() {
        // Gaussian spectrum; a 100 fs delay moves the temporal intensity
        // peak by 100 fs within one time bin.
        let grid = FrequencyGrid::new(2.0e15, 8.0e14, 2048).unwrap();
        let c = grid.center_omega();
        let sigma = 3.0e13;
        let amps: Vec<Complex64> = (0..grid.n_bins())
            .map(|j| {
                let x = (grid.omega(j) - c) / sigma;
                Complex64::new((-0.25 * x * x).exp(), 0.0)
            })
            .collect();
        let f = SpectralField::from_amplitudes(grid, amps).unwrap();
        let tau = 100e-15;
        let g = apply_mask(&f, &PhaseMask::Delay(tau)).unwrap();
        let peak_bin = |t: &crate::grid::TemporalField| {
            t.amplitude()
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.norm_sqr().partial_cmp(&b.1.norm_sqr()).unwrap())
                .unwrap()
                .0
        };
        let p0 = peak_bin(&to_time(&f));
        let p1 = peak_bin(&to_time(&g));
        let n = grid.n_bins() as i64;
        let shift_bins = ((p1 as i64 - p0 as i64) % n + n) % n;
        let shift = shift_bins as f64 * grid.time_step();
        assert!((shift - tau).abs() <= grid.time_step());
    }

    #[test]
    fn diagonal_masks_commute_bit_exactly() {
        let grid = test_grid();
        let f = random_field(grid, 5);
        let delay = PhaseMask::Delay(50e-15);
        let square = square_wave_mask(
            PI,
            16.0 * grid.bin_width(),
            grid.center_omega(),
            grid.bin_width(),
        )
        .unwrap();
        let ab = apply_mask(&apply_mask(&f, &delay).unwrap(), &square).unwrap();
        let ba = apply_mask(&apply_mask(&f, &square).unwrap(), &delay).unwrap();
        // both orders multiply by the same two unit phasors; only float
        // rounding of the product order can differ
        for (x, y) in ab.amplitude().iter().zip(ba.amplitude().iter()) {
            assert!((x - y).norm() <= 1e-15 * (x.norm() + 1.0));
        }
    }

    #[test]
    fn compose_sums_phases() {
        let grid = test_grid();
        let m = PhaseMask::Compose(vec![
            PhaseMask::Constant(0.3),
            PhaseMask::Delay(1e-14),
            PhaseMask::Dispersion {
                gdd: 1e-28,
                omega0: grid.center_omega(),
            },
        ]);
        let w = grid.omega(100);
        let want = 0.3 + w * 1e-14 + 0.5e-28 * (w - grid.center_omega()).powi(2);
        assert_relative_eq!(m.phase(w), want, max_relative = 1e-12);
    }

    #[test]
    fn tabulated_mask_from_file() {
        let dir = std::env::temp_dir().join("dctpa_mask_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("mask.txt");
        std::fs::write(&path, "# wavelength_nm phase_rad\n1000.0 0.5\n1050.0, 1.5\n").unwrap();
        let mask = load_tabulated_mask(&path).unwrap();
        // nearest breakpoint wins
        assert_relative_eq!(mask.phase(omega_from_nm(1001.0)), 0.5);
        assert_relative_eq!(mask.phase(omega_from_nm(1049.0)), 1.5);
        assert_relative_eq!(mask.phase(omega_from_nm(900.0)), 0.5);
        assert_relative_eq!(mask.phase(omega_from_nm(1200.0)), 1.5);
    }

    proptest! {
        #[test]
        fn masks_preserve_magnitudes(seed in 0u64..1000, phi in -10.0f64..10.0, tau in -1e-13f64..1e-13) {
            let grid = test_grid();
            let f = random_field(grid, seed);
            let mask = PhaseMask::Compose(vec![
                PhaseMask::Constant(phi),
                PhaseMask::Delay(tau),
                PhaseMask::SquareWave { magnitude: phi, period: 8.0 * grid.bin_width(), offset: grid.center_omega() },
            ]);
            let g = apply_mask(&f, &mask).unwrap();
            for (a, b) in f.amplitude().iter().zip(g.amplitude()) {
                prop_assert!((a.norm() - b.norm()).abs() <= 1e-15 * a.norm().max(1e-300));
            }
            // total flux conserved
            prop_assert!((f.total_flux() - g.total_flux()).abs() <= 1e-12 * f.total_flux());
        }
    }
}
