//! L1 Fourier-energy conservation and unwanted-oscillation checks.
//!
//! A decomposition `s = sum_k phi_k` conserves the L1 Fourier energy when
//! `sum_k E1(phi_k) = E1(s)`, and contains unwanted oscillations at bin `k`
//! when `sum_k |phi_k^(k)| > |s^(k)|`. The check works on any decomposition,
//! including ones read from disk; the per-bin multipliers are only available
//! for runs of [`crate::fif::decompose`].

use crate::error::{Error, Result};
use crate::fif::{FilterMode, ImfSet};
use crate::filters::filter_dft_padded;
use crate::spectral::{fft_real, Signal};

/// Default relative tolerance for the energy comparison.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

/// Interpretation note attached to every report that fails the check.
pub const NONCONSERVATION_NOTE: &str = "non-conservation means some components carry spectral content \
absent from the signal (mode mixing seen in the frequency domain); it does not by itself rank the \
decomposition method";

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub bin: usize,
    pub excess: f64,
}

#[derive(Debug, Clone)]
pub struct ConservationReport {
    pub per_bin_signal_energy: Vec<f64>,
    pub per_bin_component_sum: Vec<f64>,
    pub violations: Vec<Violation>,
    pub total_signal_energy: f64,
    pub total_component_energy: f64,
    pub relative_error: f64,
    /// Relative normalized-2-norm error of `sum_k phi_k` against `s`.
    pub reconstruction_error: f64,
    pub tolerance: f64,
    /// Absolute per-bin slack used for violation detection.
    pub bin_slack: f64,
}

impl ConservationReport {
    pub fn conserves(&self) -> bool {
        self.relative_error <= self.tolerance && self.violations.is_empty()
    }

    pub fn max_excess(&self) -> f64 {
        self.violations.iter().map(|v| v.excess).fold(0.0, f64::max)
    }

    /// One-line JSON summary.
    pub fn summary_json(&self) -> String {
        let status = if self.conserves() {
            format!("OK (<={:e})", self.tolerance)
        } else {
            "VIOLATED".to_string()
        };
        let mut line = format!(
            "{{\"status\":\"{status}\",\"relative_error\":{:e},\"violations\":{},\"max_excess\":{:e},\"signal_energy\":{:e},\"component_energy\":{:e},\"reconstruction_error\":{:e}",
            self.relative_error,
            self.violations.len(),
            self.max_excess(),
            self.total_signal_energy,
            self.total_component_energy,
            self.reconstruction_error
        );
        if !self.conserves() {
            line.push_str(&format!(",\"note\":\"{NONCONSERVATION_NOTE}\""));
        }
        line.push('}');
        line
    }
}

/// Compares per-bin spectral moduli of `components` against the signal's.
///
/// Violations are bins where the component sum exceeds the signal modulus
/// by more than `1e-10 * max_k |s^(k)|`.
pub fn check_conservation(
    signal: &Signal,
    components: &[Signal],
    tolerance: f64,
) -> Result<ConservationReport> {
    if !(tolerance >= 0.0) {
        return Err(Error::InvalidInput(format!("tolerance must be >= 0, got {tolerance}")));
    }
    let n = signal.len();
    for (k, c) in components.iter().enumerate() {
        if c.len() != n || (c.sample_rate() - signal.sample_rate()).abs() > 1e-9 * signal.sample_rate() {
            return Err(Error::ShapeMismatch(format!(
                "component {k} has {} samples at {} Hz, signal has {n} at {} Hz",
                c.len(),
                c.sample_rate(),
                signal.sample_rate()
            )));
        }
    }

    let signal_bins: Vec<f64> = fft_real(signal.samples()).iter().map(|c| c.norm()).collect();
    let mut component_sum = vec![0.0; n];
    let mut total_component_energy = 0.0;
    let mut recon = vec![0.0; n];
    for c in components {
        for (k, z) in fft_real(c.samples()).iter().enumerate() {
            let m = z.norm();
            component_sum[k] += m;
            total_component_energy += m;
        }
        for (r, v) in recon.iter_mut().zip(c.samples()) {
            *r += v;
        }
    }

    let total_signal_energy: f64 = signal_bins.iter().sum();
    let relative_error = if total_signal_energy > 0.0 {
        (total_component_energy - total_signal_energy).abs() / total_signal_energy
    } else if total_component_energy == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };

    let peak = signal_bins.iter().cloned().fold(0.0, f64::max);
    let bin_slack = 1e-10 * peak;
    let violations = component_sum
        .iter()
        .zip(&signal_bins)
        .enumerate()
        .filter(|(_, (&c, &s))| c > s + bin_slack)
        .map(|(bin, (&c, &s))| Violation { bin, excess: c - s })
        .collect();

    let err: f64 = recon
        .iter()
        .zip(signal.samples())
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    let norm: f64 = signal.samples().iter().map(|x| x * x).sum::<f64>().sqrt();
    let reconstruction_error = if norm > 0.0 { err / norm } else { err };
    if reconstruction_error > 1e-8 {
        log::warn!("components do not sum to the signal (relative error {reconstruction_error:e})");
    }

    Ok(ConservationReport {
        per_bin_signal_energy: signal_bins,
        per_bin_component_sum: component_sum,
        violations,
        total_signal_energy,
        total_component_energy,
        relative_error,
        reconstruction_error,
        tolerance,
        bin_slack,
    })
}

/// Conservation check of a decomposition, trend counted as component 0.
pub fn check_imf_set(signal: &Signal, set: &ImfSet, tolerance: f64) -> Result<ConservationReport> {
    check_conservation(signal, &set.components_with_trend(), tolerance)
}

/// Per-bin multipliers of a run: `imfs[k-1][j] = f_k(xi_j)` and
/// `trend[j] = f_0(xi_j)`, so that mode `k` has spectrum `f_k * s^`.
#[derive(Debug, Clone)]
pub struct Multipliers {
    pub trend: Vec<f64>,
    pub imfs: Vec<Vec<f64>>,
    /// Whether the run used self-convolved filters (the multipliers are
    /// only guaranteed to lie in `[0, 1]` in that case).
    pub double_convolution: bool,
}

impl Multipliers {
    /// `g_m = sum_{k<=m} f_k` for `m = 1..=M`.
    pub fn partial_sums(&self) -> Vec<Vec<f64>> {
        let n = self.trend.len();
        let mut acc = vec![0.0; n];
        self.imfs
            .iter()
            .map(|f| {
                for (a, v) in acc.iter_mut().zip(f) {
                    *a += v;
                }
                acc.clone()
            })
            .collect()
    }

    /// Largest deviation of `f_0 + sum_k f_k` from 1 over all bins.
    pub fn max_sum_deviation(&self) -> f64 {
        (0..self.trend.len())
            .map(|j| {
                let s: f64 = self.trend[j] + self.imfs.iter().map(|f| f[j]).sum::<f64>();
                (s - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// Reconstructs `f_k(xi) = (1 - w_k^)^{p_k} prod_{j<k} (1 - (1 - w_j^)^{p_j})`
/// and `f_0 = prod_j (1 - (1 - w_j^)^{p_j})` from a recorded run.
///
/// Exact for periodic runs; for padded runs the filters act on the padded
/// grid and these values describe the run only approximately.
pub fn record_multipliers(set: &ImfSet) -> Result<Multipliers> {
    let run = set.run().ok_or_else(|| {
        Error::Unsupported("multipliers are only recorded for decompositions computed by this library".into())
    })?;
    let n = set.trend().len();
    let mut remaining = vec![1.0; n];
    let mut imfs = Vec::with_capacity(run.meta.len());
    for m in &run.meta {
        let response = filter_dft_padded(&m.filter, n)?;
        let p = m.iterations as i32;
        let f: Vec<f64> = response
            .iter()
            .zip(&remaining)
            .map(|(&w, &r)| (1.0 - w).powi(p) * r)
            .collect();
        for (r, fk) in remaining.iter_mut().zip(&f) {
            *r -= fk;
        }
        imfs.push(f);
    }
    Ok(Multipliers {
        trend: remaining,
        imfs,
        double_convolution: run.config.filter_mode == FilterMode::Double,
    })
}
