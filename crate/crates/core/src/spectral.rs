//! Sampled signals, the discrete Fourier transform and the norms built on it.
//!
//! Conventions: the forward transform is unscaled,
//! `X[k] = sum_j x[j] exp(-2 pi i j k / n)`, and the inverse carries the
//! `1/n` factor. Bin `k` sits at frequency `k / L` where `L = n / sample_rate`
//! is the signal duration.
//!
//! The normalized 2-norm used throughout is `(L/n) * sqrt(sum x_j^2)`,
//! i.e. the Euclidean norm divided by the sample rate.

use std::cell::RefCell;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// A uniformly sampled, finite, real-valued time series.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    samples: Vec<f64>,
    sample_rate: f64,
    t0: f64,
}

impl Signal {
    /// Builds a signal starting at `t = 0`.
    pub fn new(samples: Vec<f64>, sample_rate: f64) -> Result<Self> {
        Self::with_start(samples, sample_rate, 0.0)
    }

    pub fn with_start(samples: Vec<f64>, sample_rate: f64, t0: f64) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "signal needs at least 2 samples, got {}",
                samples.len()
            )));
        }
        if !(sample_rate.is_finite() && sample_rate > 0.0) {
            return Err(Error::InvalidInput(format!(
                "sample rate must be positive and finite, got {sample_rate}"
            )));
        }
        if !t0.is_finite() {
            return Err(Error::InvalidInput(format!("start time must be finite, got {t0}")));
        }
        if let Some(j) = samples.iter().position(|x| !x.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "sample {j} is not finite ({})",
                samples[j]
            )));
        }
        Ok(Self {
            samples,
            sample_rate,
            t0,
        })
    }

    /// A new signal on the same grid as `self` carrying `samples`.
    pub fn same_grid(&self, samples: Vec<f64>) -> Result<Self> {
        if samples.len() != self.len() {
            return Err(Error::ShapeMismatch(format!(
                "expected {} samples, got {}",
                self.len(),
                samples.len()
            )));
        }
        Self::with_start(samples, self.sample_rate, self.t0)
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    /// Duration `L = n / sample_rate`.
    pub fn duration(&self) -> f64 {
        self.len() as f64 / self.sample_rate
    }

    /// Time of sample `j`.
    pub fn time(&self, j: usize) -> f64 {
        self.t0 + j as f64 / self.sample_rate
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.len()).map(|j| self.time(j)).collect()
    }

    /// Whether `other` has the same length, rate and start time.
    pub fn same_grid_as(&self, other: &Signal) -> bool {
        self.len() == other.len() && self.sample_rate == other.sample_rate && self.t0 == other.t0
    }
}

/// Unscaled DFT coefficients of a signal, bin `k` at frequency `k * frequency_step`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    coefficients: Vec<Complex64>,
    frequency_step: f64,
}

impl Spectrum {
    pub fn new(coefficients: Vec<Complex64>, frequency_step: f64) -> Result<Self> {
        if coefficients.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "spectrum needs at least 2 coefficients, got {}",
                coefficients.len()
            )));
        }
        if !(frequency_step.is_finite() && frequency_step > 0.0) {
            return Err(Error::InvalidInput(format!(
                "frequency step must be positive, got {frequency_step}"
            )));
        }
        if coefficients.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::InvalidInput("spectrum has non-finite coefficients".into()));
        }
        Ok(Self {
            coefficients,
            frequency_step,
        })
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// Bin spacing `1/L` in Hz.
    pub fn frequency_step(&self) -> f64 {
        self.frequency_step
    }

    pub fn frequency(&self, k: usize) -> f64 {
        k as f64 * self.frequency_step
    }

    /// Sample rate of the signal this spectrum belongs to.
    pub fn sample_rate(&self) -> f64 {
        self.frequency_step * self.len() as f64
    }

    pub fn magnitudes(&self) -> Vec<f64> {
        self.coefficients.iter().map(|c| c.norm()).collect()
    }
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(len: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(len)
        } else {
            p.plan_fft_forward(len)
        }
    })
}

/// In-place unscaled forward FFT of any length.
pub(crate) fn fft_forward(buf: &mut [Complex64]) {
    if buf.len() > 1 {
        plan(buf.len(), false).process(buf);
    }
}

/// In-place inverse FFT including the `1/n` factor.
pub(crate) fn fft_inverse(buf: &mut [Complex64]) {
    let n = buf.len();
    if n > 1 {
        plan(n, true).process(buf);
    }
    let scale = 1.0 / n as f64;
    for c in buf.iter_mut() {
        *c *= scale;
    }
}

/// Forward transform of real samples.
pub(crate) fn fft_real(samples: &[f64]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    fft_forward(&mut buf);
    buf
}

/// Inverse transform returning the real part of the result.
pub(crate) fn ifft_real(coefficients: &[Complex64]) -> Vec<f64> {
    let mut buf = coefficients.to_vec();
    fft_inverse(&mut buf);
    buf.into_iter().map(|c| c.re).collect()
}

pub fn dft(signal: &Signal) -> Spectrum {
    Spectrum {
        coefficients: fft_real(signal.samples()),
        frequency_step: 1.0 / signal.duration(),
    }
}

/// Complex inverse transform, without discarding the imaginary residue.
pub fn idft_complex(spectrum: &Spectrum) -> Vec<Complex64> {
    let mut buf = spectrum.coefficients.clone();
    fft_inverse(&mut buf);
    buf
}

/// Inverse transform back onto a signal grid starting at `t = 0`.
///
/// Only the real part is kept; for conjugate-symmetric input the imaginary
/// residue is round-off.
pub fn idft(spectrum: &Spectrum) -> Signal {
    let samples = ifft_real(&spectrum.coefficients);
    Signal {
        samples,
        sample_rate: spectrum.sample_rate(),
        t0: 0.0,
    }
}

fn euclid(xs: &[f64]) -> f64 {
    xs.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Normalized 2-norm `(L/n) * sqrt(sum s_j^2)`.
pub fn norm2(signal: &Signal) -> f64 {
    euclid(signal.samples()) / signal.sample_rate()
}

/// Normalized 2-norm of a signal computed from its spectrum through Parseval.
pub fn norm2_from_spectrum(spectrum: &Spectrum) -> f64 {
    spectral_norm2(spectrum.coefficients(), spectrum.sample_rate())
}

pub(crate) fn spectral_norm2(coefficients: &[Complex64], sample_rate: f64) -> f64 {
    let n = coefficients.len() as f64;
    let energy: f64 = coefficients.iter().map(|c| c.norm_sqr()).sum();
    (energy / n).sqrt() / sample_rate
}

/// Converts a time on the signal grid to its sample index.
fn grid_index(signal: &Signal, t: f64) -> Result<usize> {
    let pos = (t - signal.t0()) * signal.sample_rate();
    let idx = pos.round();
    if (pos - idx).abs() > 1e-9 * pos.abs().max(1.0) {
        return Err(Error::Domain(format!("time {t} is not on the sampling grid")));
    }
    if idx < 0.0 || idx as usize >= signal.len() {
        return Err(Error::Domain(format!(
            "time {t} is outside the signal span [{}, {}]",
            signal.t0(),
            signal.time(signal.len() - 1)
        )));
    }
    Ok(idx as usize)
}

/// Local normalized 2-norm over the grid interval `[a, b]`, endpoints inclusive.
pub fn local_norm2(signal: &Signal, a: f64, b: f64) -> Result<f64> {
    let i = grid_index(signal, a)?;
    let k = grid_index(signal, b)?;
    if k <= i {
        return Err(Error::Domain(format!("interval [{a}, {b}] is empty or reversed")));
    }
    Ok(euclid(&signal.samples()[i..=k]) / signal.sample_rate())
}

/// L1 Fourier energy: sum of the moduli of all DFT coefficients.
pub fn l1_fourier_energy(signal: &Signal) -> f64 {
    fft_real(signal.samples()).iter().map(|c| c.norm()).sum()
}
