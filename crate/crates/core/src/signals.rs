//! Synthetic test signals.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::spectral::Signal;

fn grid(n: usize, sample_rate: f64) -> Result<Vec<f64>> {
    if n < 4 {
        return Err(Error::InvalidInput(format!("generators need n >= 4, got {n}")));
    }
    if !(sample_rate.is_finite() && sample_rate > 0.0) {
        return Err(Error::InvalidInput(format!("sample rate must be positive, got {sample_rate}")));
    }
    Ok((0..n).map(|j| j as f64 / sample_rate).collect())
}

/// Fast chirp `cos(480 pi t^2 + 240 pi t)`, instantaneous frequency `480 t + 120` Hz.
pub fn chirp_fast(t: f64) -> f64 {
    (480.0 * PI * t * t + 240.0 * PI * t).cos()
}

/// Slow chirp `cos(pi t^3 + 36 pi t^2 + 24 pi t + 2 pi)`.
pub fn chirp_slow(t: f64) -> f64 {
    (PI * t * t * t + 36.0 * PI * t * t + 24.0 * PI * t + 2.0 * PI).cos()
}

/// Sum of the fast and slow chirps on `t_j = j / sample_rate`.
pub fn gen_chirp_pair(n: usize, sample_rate: f64) -> Result<Signal> {
    let t = grid(n, sample_rate)?;
    Signal::new(t.iter().map(|&t| chirp_fast(t) + chirp_slow(t)).collect(), sample_rate)
}

/// Parameters of the two chirps plus a noise-modulated 200 Hz carrier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoisyTriple {
    /// Standard deviation of the i.i.d. Gaussian carrier amplitude.
    pub noise_sigma: f64,
    pub seed: u64,
}

impl Default for NoisyTriple {
    fn default() -> Self {
        Self {
            noise_sigma: 0.18,
            seed: 0,
        }
    }
}

/// Per-sample Gaussian amplitudes `A(t_j) ~ N(0, sigma^2)` from a seeded stream.
pub fn noise_amplitudes(n: usize, sigma: f64, seed: u64) -> Result<Vec<f64>> {
    if sigma == 0.0 {
        return Ok(vec![0.0; n]);
    }
    let normal = Normal::new(0.0, sigma)
        .map_err(|e| Error::InvalidInput(format!("noise sigma {sigma}: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n).map(|_| normal.sample(&mut rng)).collect())
}

/// `cos(50 pi t^2 + 100 pi t) + cos(-10 pi t^2 + 40 pi t) + A(t) cos(400 pi t)`.
pub fn gen_noisy_triple(n: usize, sample_rate: f64, params: NoisyTriple) -> Result<Signal> {
    let t = grid(n, sample_rate)?;
    let a = noise_amplitudes(n, params.noise_sigma, params.seed)?;
    Signal::new(
        t.iter()
            .zip(&a)
            .map(|(&t, &a)| {
                (50.0 * PI * t * t + 100.0 * PI * t).cos()
                    + (-10.0 * PI * t * t + 40.0 * PI * t).cos()
                    + a * (400.0 * PI * t).cos()
            })
            .collect(),
        sample_rate,
    )
}

/// Undamped Duffing oscillator `x'' + alpha x + beta x^3 = gamma cos(omega t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Duffing {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub omega: f64,
    pub x0: f64,
    pub v0: f64,
}

impl Default for Duffing {
    fn default() -> Self {
        Self {
            alpha: -1.0,
            beta: 1.0,
            gamma: 0.1,
            omega: 1.0,
            x0: 1.0,
            v0: 0.0,
        }
    }
}

impl Duffing {
    fn accel(&self, t: f64, x: f64) -> f64 {
        self.gamma * (self.omega * t).cos() - self.alpha * x - self.beta * x * x * x
    }

    /// `v^2/2 + alpha x^2/2 + beta x^4/4`, conserved when `gamma = 0`.
    pub fn energy(&self, x: f64, v: f64) -> f64 {
        0.5 * v * v + 0.5 * self.alpha * x * x + 0.25 * self.beta * x * x * x * x
    }

    /// Classical RK4 on `(x, v)`; returns the states at `t = 0, h, ..., steps h`.
    pub fn integrate(&self, step: f64, steps: usize) -> Vec<(f64, f64)> {
        let mut out = Vec::with_capacity(steps + 1);
        let (mut x, mut v) = (self.x0, self.v0);
        out.push((x, v));
        for i in 0..steps {
            let t = i as f64 * step;
            let h = step;
            let k1x = v;
            let k1v = self.accel(t, x);
            let k2x = v + 0.5 * h * k1v;
            let k2v = self.accel(t + 0.5 * h, x + 0.5 * h * k1x);
            let k3x = v + 0.5 * h * k2v;
            let k3v = self.accel(t + 0.5 * h, x + 0.5 * h * k2x);
            let k4x = v + h * k3v;
            let k4v = self.accel(t + h, x + h * k3x);
            x += h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
            v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
            out.push((x, v));
        }
        out
    }
}

/// Velocity `x'(t_j)` of the Duffing oscillator, RK4 with step `1 / sample_rate`.
pub fn gen_duffing_velocity(n: usize, sample_rate: f64, params: Duffing) -> Result<Signal> {
    grid(n, sample_rate)?;
    let p = [params.alpha, params.beta, params.gamma, params.omega, params.x0, params.v0];
    if p.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("Duffing parameters must be finite".into()));
    }
    let states = params.integrate(1.0 / sample_rate, n - 1);
    Signal::new(states.into_iter().map(|(_, v)| v).collect(), sample_rate)
}

/// One stationary cosine `a cos(2 pi f t + phi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tone {
    pub amplitude: f64,
    pub frequency: f64,
    pub phase: f64,
}

impl Tone {
    pub fn new(amplitude: f64, frequency: f64, phase: f64) -> Self {
        Self {
            amplitude,
            frequency,
            phase,
        }
    }

    pub fn at(&self, t: f64) -> f64 {
        self.amplitude * (2.0 * PI * self.frequency * t + self.phase).cos()
    }
}

/// Concatenation of `windows.len()` stationary segments of `window` samples.
///
/// Every tone must sit on a DFT bin of the window (`f * window / rate`
/// integral), strictly between DC and Nyquist, with distinct frequencies
/// inside a window. Time is global, `t_j = j / rate`; on-bin tones make
/// that identical to restarting the clock in each window.
pub fn gen_piecewise_multisine(windows: &[Vec<Tone>], window: usize, sample_rate: f64) -> Result<Signal> {
    if windows.is_empty() || window < 2 {
        return Err(Error::InvalidInput("need at least one window of >= 2 samples".into()));
    }
    let n = windows.len() * window;
    grid(n, sample_rate)?;
    let step = sample_rate / window as f64;
    for tones in windows {
        for tone in tones {
            let bin = tone.frequency / step;
            let nearest = bin.round();
            if (bin - nearest).abs() > 1e-9 * bin.abs().max(1.0) {
                return Err(Error::OffBinFrequency {
                    frequency: tone.frequency,
                    window,
                    suggested: nearest * step,
                });
            }
            if nearest < 1.0 || nearest >= window as f64 / 2.0 {
                return Err(Error::InvalidInput(format!(
                    "tone at {} Hz must lie strictly between DC and Nyquist",
                    tone.frequency
                )));
            }
        }
        let mut bins: Vec<i64> = tones.iter().map(|t| (t.frequency / step).round() as i64).collect();
        bins.sort_unstable();
        if bins.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidInput("tones within a window must have distinct frequencies".into()));
        }
    }
    let mut out = Vec::with_capacity(n);
    for (i, tones) in windows.iter().enumerate() {
        for m in 0..window {
            let t = (i * window + m) as f64 / sample_rate;
            out.push(tones.iter().map(|tone| tone.at(t)).sum());
        }
    }
    Signal::new(out, sample_rate)
}

/// `cos(2 pi x) + a cos(2 pi f x + phi)` on `x_j = j / sample_rate`.
pub fn gen_two_tone(a: f64, f: f64, phi: f64, n: usize, sample_rate: f64) -> Result<Signal> {
    let x = grid(n, sample_rate)?;
    Signal::new(
        x.iter()
            .map(|&x| (2.0 * PI * x).cos() + a * (2.0 * PI * f * x + phi).cos())
            .collect(),
        sample_rate,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chirp_pair_start() {
        assert_eq!(chirp_fast(0.0), 1.0);
        assert_eq!(chirp_slow(0.0), 1.0);
        let s = gen_chirp_pair(2000, 2000.0).unwrap();
        assert_eq!(s.samples()[0], 2.0);
    }

    #[test]
    fn noisy_triple_is_seeded() {
        let p = NoisyTriple { noise_sigma: 0.18, seed: 7 };
        let a = gen_noisy_triple(500, 500.0, p).unwrap();
        let b = gen_noisy_triple(500, 500.0, p).unwrap();
        assert_eq!(a, b);
        let c = gen_noisy_triple(500, 500.0, NoisyTriple { seed: 8, ..p }).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn noise_variance() {
        let a = noise_amplitudes(10_000, 0.18, 3).unwrap();
        let mean = a.iter().sum::<f64>() / a.len() as f64;
        let var = a.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (a.len() - 1) as f64;
        assert!((var - 0.0324).abs() <= 0.1 * 0.0324, "{var}");
    }

    #[test]
    fn duffing_fixed_point() {
        let d = Duffing { gamma: 0.0, ..Duffing::default() };
        let s = gen_duffing_velocity(1000, 10.0, d).unwrap();
        assert!(s.samples().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn two_tone_by_hand() {
        let s = gen_two_tone(0.0, 0.3, 1.0, 8, 4.0).unwrap();
        for (j, v) in s.samples().iter().enumerate() {
            assert!((v - (2.0 * PI * j as f64 / 4.0).cos()).abs() < 1e-15);
        }
        let s = gen_two_tone(1.0, 0.5, 0.0, 4, 2.0).unwrap();
        // x = 0, 0.5, 1, 1.5: cos(2 pi x) = 1,-1,1,-1; cos(pi x) = 1,0,-1,0
        let want = [2.0, -1.0, 0.0, -1.0];
        for (v, w) in s.samples().iter().zip(want) {
            assert!((v - w).abs() < 1e-15);
        }
    }

    #[test]
    fn off_bin_tones_rejected() {
        let err = gen_piecewise_multisine(&[vec![Tone::new(1.0, 5.5, 0.0)]], 64, 64.0).unwrap_err();
        match err {
            Error::OffBinFrequency { suggested, .. } => assert!(suggested == 5.0 || suggested == 6.0),
            e => panic!("unexpected {e}"),
        }
        let dup = vec![Tone::new(1.0, 5.0, 0.0), Tone::new(1.0, 5.0, 1.0)];
        assert!(gen_piecewise_multisine(&[dup], 64, 64.0).is_err());
    }

    #[test]
    fn single_window_single_tone() {
        let s = gen_piecewise_multisine(&[vec![Tone::new(1.0, 5.0, 0.0)]], 64, 64.0).unwrap();
        for (j, v) in s.samples().iter().enumerate() {
            assert!((v - (2.0 * PI * 5.0 * j as f64 / 64.0).cos()).abs() < 1e-13);
        }
    }
}
