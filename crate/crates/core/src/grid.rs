//! Frequency/time grids, complex spectral fields, and the discrete
//! transforms and convolutions the rest of the library is built on.
//!
//! Field amplitudes carry units of sqrt(photon flux per unit angular
//! frequency), so `bin_width * sum |E|^2` is a mean photon flux.

use std::cell::RefCell;
use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn fft_in_place(buf: &mut [Complex64], inverse: bool) {
    PLANNER.with(|p| {
        let mut planner = p.borrow_mut();
        let fft = if inverse {
            planner.plan_fft_inverse(buf.len())
        } else {
            planner.plan_fft_forward(buf.len())
        };
        fft.process(buf);
    });
}

/// Uniform discretization of angular frequency shared by all fields.
///
/// Bin k is centered at `min_omega + (k + 0.5) * bin_width`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyGrid {
    center_omega: f64,
    span_omega: f64,
    n_bins: usize,
}

impl FrequencyGrid {
    /// Build a grid. `n_bins` must be a power of two and at least 64, and
    /// the covered band must be strictly positive in frequency.
    pub fn new(center_omega: f64, span_omega: f64, n_bins: usize) -> Result<Self> {
        let mut issues = Vec::new();
        if n_bins < 64 || !n_bins.is_power_of_two() {
            issues.push(format!(
                "grid.n_bins: must be a power of two >= 64, got {n_bins}"
            ));
        }
        if !(span_omega > 0.0) {
            issues.push(format!("grid.span_omega: must be > 0, got {span_omega}"));
        }
        if !(center_omega - 0.5 * span_omega > 0.0) {
            issues.push(format!(
                "grid: band edge {:.6e} rad/s is not strictly positive (center {:.6e}, span {:.6e})",
                center_omega - 0.5 * span_omega,
                center_omega,
                span_omega
            ));
        }
        if !issues.is_empty() {
            return Err(Error::Config(issues));
        }
        Ok(FrequencyGrid {
            center_omega,
            span_omega,
            n_bins,
        })
    }

    pub fn center_omega(&self) -> f64 {
        self.center_omega
    }

    pub fn span_omega(&self) -> f64 {
        self.span_omega
    }

    pub fn n_bins(&self) -> usize {
        self.n_bins
    }

    pub fn bin_width(&self) -> f64 {
        self.span_omega / self.n_bins as f64
    }

    pub fn min_omega(&self) -> f64 {
        self.center_omega - 0.5 * self.span_omega
    }

    pub fn max_omega(&self) -> f64 {
        self.center_omega + 0.5 * self.span_omega
    }

    /// Center frequency of bin k.
    pub fn omega(&self, k: usize) -> f64 {
        self.min_omega() + (k as f64 + 0.5) * self.bin_width()
    }

    /// Index of the bin whose center is nearest to `omega`, if it is on
    /// the grid.
    pub fn nearest_bin(&self, omega: f64) -> Option<usize> {
        let x = (omega - self.min_omega()) / self.bin_width() - 0.5;
        let k = x.round();
        if k < 0.0 || k >= self.n_bins as f64 {
            None
        } else {
            Some(k as usize)
        }
    }

    /// Time step of the conjugate temporal grid.
    pub fn time_step(&self) -> f64 {
        2.0 * PI / self.span_omega
    }

    /// Total duration covered by the conjugate temporal grid.
    pub fn duration(&self) -> f64 {
        2.0 * PI / self.bin_width()
    }
}

/// Complex spectral amplitude per grid bin for one beam realization.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: FrequencyGrid,
    amplitude: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(grid: FrequencyGrid) -> Self {
        SpectralField {
            grid,
            amplitude: vec![Complex64::new(0.0, 0.0); grid.n_bins()],
        }
    }

    pub fn from_amplitudes(grid: FrequencyGrid, amplitude: Vec<Complex64>) -> Result<Self> {
        if amplitude.len() != grid.n_bins() {
            return Err(Error::config(format!(
                "field: amplitude length {} does not match grid n_bins {}",
                amplitude.len(),
                grid.n_bins()
            )));
        }
        Ok(SpectralField { grid, amplitude })
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn amplitude(&self) -> &[Complex64] {
        &self.amplitude
    }

    pub fn amplitude_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitude
    }

    /// Total photon flux, `integral |E(w)|^2 dw`.
    pub fn total_flux(&self) -> f64 {
        self.grid.bin_width() * self.amplitude.iter().map(|a| a.norm_sqr()).sum::<f64>()
    }
}

/// Time-domain view of a spectral field: `E(t_m)` at `t_m = m * dt` with
/// `dt = 2 pi / span_omega`.
#[derive(Debug, Clone)]
pub struct TemporalField {
    grid: FrequencyGrid,
    amplitude: Vec<Complex64>,
}

impl TemporalField {
    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn amplitude(&self) -> &[Complex64] {
        &self.amplitude
    }

    pub fn time(&self, m: usize) -> f64 {
        m as f64 * self.grid.time_step()
    }

    /// `integral |E(t)|^2 dt`; equals `total_flux / (2 pi)` of the
    /// frequency-domain field (Parseval).
    pub fn energy(&self) -> f64 {
        self.grid.time_step() * self.amplitude.iter().map(|a| a.norm_sqr()).sum::<f64>()
    }
}

/// Discrete Fourier transform to the time domain:
/// `E(t_m) = bin_width / (2 pi) * sum_j E[j] exp(-i w_j t_m)`.
pub fn to_time(field: &SpectralField) -> TemporalField {
    let grid = *field.grid();
    let n = grid.n_bins();
    let mut buf = field.amplitude().to_vec();
    fft_in_place(&mut buf, false);
    let scale = grid.bin_width() / (2.0 * PI);
    let omega0 = grid.omega(0);
    let dt = grid.time_step();
    for (m, v) in buf.iter_mut().enumerate() {
        let phase = -omega0 * (m as f64) * dt;
        *v *= Complex64::from_polar(scale, phase);
    }
    debug_assert_eq!(buf.len(), n);
    TemporalField {
        grid,
        amplitude: buf,
    }
}

/// Inverse of [`to_time`]. Errors if the temporal field was built on a
/// different grid than `grid`.
pub fn to_freq(field: &TemporalField, grid: &FrequencyGrid) -> Result<SpectralField> {
    if field.grid() != grid {
        return Err(Error::GridMismatch(
            "temporal field belongs to a different grid".into(),
        ));
    }
    let n = grid.n_bins();
    let omega0 = grid.omega(0);
    let dt = grid.time_step();
    let pre = 2.0 * PI / grid.bin_width();
    let mut buf: Vec<Complex64> = field
        .amplitude()
        .iter()
        .enumerate()
        .map(|(m, v)| v * Complex64::from_polar(pre, omega0 * (m as f64) * dt))
        .collect();
    fft_in_place(&mut buf, true);
    let inv_n = 1.0 / n as f64;
    for v in buf.iter_mut() {
        *v *= inv_n;
    }
    SpectralField::from_amplitudes(*grid, buf)
}

/// Uniform grid over the sum frequency axis produced by [`cross_spectrum`].
///
/// Bin k is centered at `start + k * bin_width`; with `n = 2 * n_bins` the
/// grid covers `[2 * min_omega, 2 * max_omega]`, and every discrete sum
/// frequency `w_j + w_l` lands exactly on a bin center.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OmegaGrid {
    start: f64,
    bin_width: f64,
    n: usize,
}

impl OmegaGrid {
    pub fn for_grid(grid: &FrequencyGrid) -> Self {
        OmegaGrid {
            start: 2.0 * grid.min_omega(),
            bin_width: grid.bin_width(),
            n: 2 * grid.n_bins(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bin_width(&self) -> f64 {
        self.bin_width
    }

    pub fn omega(&self, k: usize) -> f64 {
        self.start + k as f64 * self.bin_width
    }

    pub fn nearest_bin(&self, omega: f64) -> Option<usize> {
        let k = ((omega - self.start) / self.bin_width).round();
        if k < 0.0 || k >= self.n as f64 {
            None
        } else {
            Some(k as usize)
        }
    }
}

/// Two-field sum-frequency amplitude `A(W) = integral E_s(w) E_i(W - w) dw`
/// on an [`OmegaGrid`].
#[derive(Debug, Clone)]
pub struct SumFrequencySpectrum {
    grid: OmegaGrid,
    amplitude: Vec<Complex64>,
}

impl SumFrequencySpectrum {
    pub fn grid(&self) -> &OmegaGrid {
        &self.grid
    }

    pub fn amplitude(&self) -> &[Complex64] {
        &self.amplitude
    }
}

/// Scratch buffers for [`cross_spectrum_into`]; reusing one across an
/// ensemble avoids per-realization allocation.
pub struct ConvScratch {
    a: Vec<Complex64>,
    b: Vec<Complex64>,
}

impl ConvScratch {
    pub fn new(grid: &FrequencyGrid) -> Self {
        let m = 2 * grid.n_bins();
        ConvScratch {
            a: vec![Complex64::new(0.0, 0.0); m],
            b: vec![Complex64::new(0.0, 0.0); m],
        }
    }
}

/// Discrete convolution of two spectral fields scaled by the bin width,
/// computed as a linear convolution via zero-padded FFTs.
///
/// The sum frequency of bins j and l is `2 min_omega + (j + l + 1) * bw`,
/// which is bin `j + l + 1` of the output grid; output bin 0 is always
/// empty.
pub fn cross_spectrum(e_s: &SpectralField, e_i: &SpectralField) -> Result<SumFrequencySpectrum> {
    let mut scratch = ConvScratch::new(e_s.grid());
    cross_spectrum_into(e_s, e_i, &mut scratch)
}

pub fn cross_spectrum_into(
    e_s: &SpectralField,
    e_i: &SpectralField,
    scratch: &mut ConvScratch,
) -> Result<SumFrequencySpectrum> {
    if e_s.grid() != e_i.grid() {
        return Err(Error::GridMismatch(
            "cross_spectrum requires both fields on the same grid".into(),
        ));
    }
    let grid = e_s.grid();
    let n = grid.n_bins();
    let m = 2 * n;
    assert_eq!(scratch.a.len(), m, "scratch built for a different grid");

    scratch.a[..n].copy_from_slice(e_s.amplitude());
    scratch.a[n..].fill(Complex64::new(0.0, 0.0));
    scratch.b[..n].copy_from_slice(e_i.amplitude());
    scratch.b[n..].fill(Complex64::new(0.0, 0.0));

    fft_in_place(&mut scratch.a, false);
    fft_in_place(&mut scratch.b, false);
    for (x, y) in scratch.a.iter_mut().zip(scratch.b.iter()) {
        *x *= y;
    }
    fft_in_place(&mut scratch.a, true);

    // Circular convolution of length 2N carries the full linear convolution
    // (length 2N - 1) without aliasing. Shift by one so sum frequencies sit
    // on bin centers of the output grid.
    let scale = grid.bin_width() / m as f64;
    let mut out = vec![Complex64::new(0.0, 0.0); m];
    for k in 1..m {
        out[k] = scratch.a[k - 1] * scale;
    }
    Ok(SumFrequencySpectrum {
        grid: OmegaGrid::for_grid(grid),
        amplitude: out,
    })
}
