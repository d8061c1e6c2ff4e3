//! Conversions between the wavelength/time units used at the configuration
//! boundary (nm, fs) and the internal angular-frequency representation
//! (rad/s). Everything inside the library works in rad/s and seconds.

use std::f64::consts::PI;

/// Speed of light in vacuum, m/s.
pub const C: f64 = 299_792_458.0;

/// 2 sqrt(2 ln 2): ratio between the fwhm and the rms width of a Gaussian.
pub const FWHM_PER_SIGMA: f64 = 2.354_820_045_030_949_3;

/// Angular frequency (rad/s) of a vacuum wavelength given in nm.
pub fn omega_from_nm(lambda_nm: f64) -> f64 {
    2.0 * PI * C / (lambda_nm * 1e-9)
}

/// Vacuum wavelength in nm for an angular frequency in rad/s.
pub fn nm_from_omega(omega: f64) -> f64 {
    2.0 * PI * C / omega * 1e9
}

/// Width of a spectral band given as a wavelength fwhm around a center
/// wavelength, expressed in rad/s. Uses the exact edge frequencies, so the
/// conversion stays correct for broad bands (100 nm class envelopes).
pub fn bandwidth_from_nm(center_nm: f64, fwhm_nm: f64) -> f64 {
    omega_from_nm(center_nm - 0.5 * fwhm_nm) - omega_from_nm(center_nm + 0.5 * fwhm_nm)
}

pub fn seconds_from_fs(t_fs: f64) -> f64 {
    t_fs * 1e-15
}

pub fn fs_from_seconds(t: f64) -> f64 {
    t * 1e15
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn omega_roundtrip() {
        let w = omega_from_nm(516.65);
        assert_relative_eq!(nm_from_omega(w), 516.65, max_relative = 1e-12);
        // 516.65 nm is about 3.646e15 rad/s
        assert_relative_eq!(w, 3.6459e15, max_relative = 1e-3);
    }

    #[test]
    fn bandwidth_matches_linearized_form_for_narrow_bands() {
        // d(omega) = 2 pi c d(lambda) / lambda^2 for narrow bands
        let lin = 2.0 * PI * C * 0.04e-9 / (516.65e-9_f64).powi(2);
        assert_relative_eq!(bandwidth_from_nm(516.65, 0.04), lin, max_relative = 1e-6);
    }
}
