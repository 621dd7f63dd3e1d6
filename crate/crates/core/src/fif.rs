//! Fast Iterative Filtering.
//!
//! Each outer pass picks a filter for the current remainder `r`, then
//! repeatedly applies the variation operator `V = I - C_w` in the frequency
//! domain: after `p` passes the extracted mode has spectrum
//! `(1 - w^)^p * r^`. The inner loop stops once consecutive iterates differ
//! by at most `delta * ||r||` in the normalized 2-norm (evaluated through
//! Parseval, so no inverse transform is needed per pass). The mode is
//! subtracted and the loop continues until the remainder has fewer than two
//! extrema or asks for a filter longer than the signal.
//!
//! With a double-convolution filter `0 <= w^ <= 1`, which bounds the
//! consecutive differences by `||r|| / (e p)` and makes every mode a
//! nonnegative per-bin multiple of the input spectrum.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::filters::{
    self, count_extrema, double_convolve, make_base_filter, Filter, FilterFamily, DEFAULT_CHI,
};
use crate::spectral::{fft_real, ifft_real, spectral_norm2, Signal};

/// How a signal is continued past its ends before filtering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExtensionMode {
    /// Wrap-around. Inside [`decompose`] this means no padding at all: the
    /// transform already treats the signal as periodic, and the modes stay
    /// exact per-bin multiples of the input spectrum.
    #[default]
    Periodic,
    /// Mirror about the end samples, which are not repeated.
    Symmetric,
    /// Point reflection about the end samples: `2 s_0 - s_j`.
    Antisymmetric,
}

impl ExtensionMode {
    pub fn name(self) -> &'static str {
        match self {
            ExtensionMode::Periodic => "periodic",
            ExtensionMode::Symmetric => "symmetric",
            ExtensionMode::Antisymmetric => "antisymmetric",
        }
    }
}

impl fmt::Display for ExtensionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExtensionMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "periodic" => Ok(ExtensionMode::Periodic),
            "symmetric" | "reflect" => Ok(ExtensionMode::Symmetric),
            "antisymmetric" | "anti-symmetric" => Ok(ExtensionMode::Antisymmetric),
            _ => Err(Error::UnknownTag {
                what: "extension mode",
                name: s.to_string(),
            }),
        }
    }
}

/// Pads `pad` samples on both sides. The original samples sit unchanged in
/// the middle; the start time moves back by `pad / sample_rate`.
pub fn extend_signal(signal: &Signal, pad: usize, mode: ExtensionMode) -> Result<Signal> {
    let s = signal.samples();
    let n = s.len();
    if pad == 0 {
        return Ok(signal.clone());
    }
    if mode != ExtensionMode::Periodic && pad >= n {
        return Err(Error::InvalidInput(format!(
            "{mode} extension by {pad} samples needs a signal longer than {pad} samples (got {n})"
        )));
    }
    let mut out = Vec::with_capacity(n + 2 * pad);
    // left side, outermost first
    for k in (1..=pad).rev() {
        out.push(match mode {
            ExtensionMode::Periodic => s[(n - k % n) % n],
            ExtensionMode::Symmetric => s[k],
            ExtensionMode::Antisymmetric => 2.0 * s[0] - s[k],
        });
    }
    out.extend_from_slice(s);
    for k in 1..=pad {
        out.push(match mode {
            ExtensionMode::Periodic => s[(k - 1) % n],
            ExtensionMode::Symmetric => s[n - 1 - k],
            ExtensionMode::Antisymmetric => 2.0 * s[n - 1] - s[n - 1 - k],
        });
    }
    Signal::with_start(
        out,
        signal.sample_rate(),
        signal.t0() - pad as f64 / signal.sample_rate(),
    )
}

/// Circular moving average `C_w s = w * s`, computed directly in time.
pub fn moving_average(signal: &Signal, filter: &Filter) -> Result<Signal> {
    let n = signal.len();
    if filter.support() > n {
        return Err(Error::FilterTooLong {
            support: filter.support(),
            len: n,
        });
    }
    let s = signal.samples();
    let l = filter.half_length();
    let taps = filter.taps();
    let out = (0..n)
        .map(|j| {
            taps.iter()
                .enumerate()
                .filter(|(_, &w)| w != 0.0)
                .map(|(i, &w)| w * s[(j + n + i - l) % n])
                .sum()
        })
        .collect();
    signal.same_grid(out)
}

/// Variation about the moving average, `V_w s = s - C_w s`.
pub fn variation(signal: &Signal, filter: &Filter) -> Result<Signal> {
    let avg = moving_average(signal, filter)?;
    let out = signal
        .samples()
        .iter()
        .zip(avg.samples())
        .map(|(a, b)| a - b)
        .collect();
    signal.same_grid(out)
}

/// Outcome of one inner loop.
#[derive(Debug, Clone)]
pub struct Extraction {
    pub imf: Signal,
    /// Number of applications of `1 - w^`.
    pub iterations: usize,
    pub hit_iteration_cap: bool,
    /// `diff_norms[p]` is `||V^{p+1} s - V^p s||` for `p = 0..iterations`.
    pub diff_norms: Vec<f64>,
    /// `||s||` of the input, the reference for the stopping test.
    pub reference_norm: f64,
}

/// Runs the inner loop on `spectrum` with multiplier `response = w^`.
/// Returns the final iterate and loop bookkeeping.
fn iterate(
    spectrum: &[Complex64],
    response: &[f64],
    sample_rate: f64,
    delta: f64,
    max_iter: usize,
) -> (Vec<Complex64>, usize, bool, Vec<f64>, f64) {
    let reference = spectral_norm2(spectrum, sample_rate);
    let threshold = delta * reference;
    let n = spectrum.len() as f64;
    let mut current = spectrum.to_vec();
    let mut diffs = Vec::new();
    let mut p = 0;
    loop {
        let mut diff_energy = 0.0;
        for (c, &w) in current.iter_mut().zip(response) {
            let step = *c * w;
            diff_energy += step.norm_sqr();
            *c -= step;
        }
        p += 1;
        let diff = (diff_energy / n).sqrt() / sample_rate;
        diffs.push(diff);
        if diff <= threshold {
            return (current, p, false, diffs, reference);
        }
        if p >= max_iter {
            return (current, p, true, diffs, reference);
        }
    }
}

fn check_delta(delta: f64, max_iter: usize) -> Result<()> {
    if !(delta.is_finite() && delta > 0.0) {
        return Err(Error::InvalidInput(format!("delta must be positive, got {delta}")));
    }
    if max_iter == 0 {
        return Err(Error::InvalidInput("max_inner_iterations must be >= 1".into()));
    }
    Ok(())
}

fn extract(signal: &Signal, filter: &Filter, delta: f64, max_iter: usize) -> Result<Extraction> {
    check_delta(delta, max_iter)?;
    let response = filters::filter_dft_padded(filter, signal.len())?;
    let spectrum = fft_real(signal.samples());
    let (out, iterations, hit_cap, diff_norms, reference_norm) =
        iterate(&spectrum, &response, signal.sample_rate(), delta, max_iter);
    Ok(Extraction {
        imf: signal.same_grid(ifft_real(&out))?,
        iterations,
        hit_iteration_cap: hit_cap,
        diff_norms,
        reference_norm,
    })
}

/// Extracts one mode from `signal` (treated as periodic) with a
/// double-convolution filter.
pub fn extract_imf(signal: &Signal, filter: &Filter, delta: f64, max_iter: usize) -> Result<Extraction> {
    if !filter.is_double_convolution() {
        return Err(Error::InvalidInput(
            "extract_imf needs a double-convolution filter; use extract_imf_raw for the negative control".into(),
        ));
    }
    extract(signal, filter, delta, max_iter)
}

/// Same as [`extract_imf`] but accepts any filter. Without self-convolution
/// the filter transform may go negative and none of the convergence or
/// conservation guarantees apply.
pub fn extract_imf_raw(signal: &Signal, filter: &Filter, delta: f64, max_iter: usize) -> Result<Extraction> {
    extract(signal, filter, delta, max_iter)
}

/// Whether the decomposition filter is self-convolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FilterMode {
    #[default]
    Double,
    Raw,
}

impl FromStr for FilterMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "double" => Ok(FilterMode::Double),
            "raw" => Ok(FilterMode::Raw),
            _ => Err(Error::UnknownTag {
                what: "filter mode",
                name: s.to_string(),
            }),
        }
    }
}

impl fmt::Display for FilterMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FilterMode::Double => "double",
            FilterMode::Raw => "raw",
        })
    }
}

/// Rule for the per-pass filter length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LengthRule {
    /// `2 floor(chi n / k)` from the extrema count `k`.
    #[default]
    Extrema,
    /// `chi` periods of the strongest spectral peak.
    SpectralPeak,
}

/// Where the per-pass filters come from.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum FilterSchedule {
    #[default]
    Adaptive,
    /// One pass per listed frequency (Hz), each filter tuned so its first
    /// transform zero sits on that frequency. The decomposition has exactly
    /// as many modes as listed frequencies (fewer if the remainder runs out
    /// of extrema first).
    FirstZeroAt(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FifConfig {
    pub delta: f64,
    pub chi: f64,
    pub max_imfs: usize,
    pub max_inner_iterations: usize,
    pub extension: ExtensionMode,
    pub filter_family: FilterFamily,
    pub filter_mode: FilterMode,
    pub length_rule: LengthRule,
    pub schedule: FilterSchedule,
    /// Stop once `||r|| <= negligible_ratio * ||s||`.
    pub negligible_ratio: f64,
}

impl Default for FifConfig {
    fn default() -> Self {
        Self {
            delta: 1e-3,
            chi: DEFAULT_CHI,
            max_imfs: 50,
            max_inner_iterations: 200,
            extension: ExtensionMode::Periodic,
            filter_family: FilterFamily::Bump,
            filter_mode: FilterMode::Double,
            length_rule: LengthRule::Extrema,
            schedule: FilterSchedule::Adaptive,
            negligible_ratio: 1e-12,
        }
    }
}

impl FifConfig {
    pub fn validate(&self) -> Result<()> {
        check_delta(self.delta, self.max_inner_iterations)?;
        if !(1.1..=2.0).contains(&self.chi) {
            return Err(Error::InvalidInput(format!("chi must lie in [1.1, 2], got {}", self.chi)));
        }
        if self.max_imfs == 0 {
            return Err(Error::InvalidInput("max_imfs must be >= 1".into()));
        }
        if !(self.negligible_ratio >= 0.0) {
            return Err(Error::InvalidInput("negligible_ratio must be >= 0".into()));
        }
        if let FilterSchedule::FirstZeroAt(f) = &self.schedule {
            if f.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
                return Err(Error::InvalidInput("scheduled frequencies must be positive".into()));
            }
        }
        Ok(())
    }
}

/// Bookkeeping of one extracted mode.
#[derive(Debug, Clone)]
pub struct ImfMeta {
    /// The filter actually applied.
    pub filter: Filter,
    /// Length requested by the length rule, before any clamping.
    pub requested_length: usize,
    pub iterations: usize,
    pub hit_iteration_cap: bool,
    pub diff_norms: Vec<f64>,
    pub reference_norm: f64,
    /// Samples of boundary extension on each side (0 in periodic mode).
    pub pad: usize,
}

impl ImfMeta {
    pub fn filter_length(&self) -> usize {
        self.filter.half_length()
    }

    /// Iterations `p >= 1` whose consecutive difference exceeds
    /// `||s|| / (e p)`, with a relative round-off allowance.
    pub fn stopping_bound_violations(&self) -> Vec<usize> {
        self.diff_norms
            .iter()
            .enumerate()
            .skip(1)
            .filter(|&(p, &d)| {
                let bound = self.reference_norm / (std::f64::consts::E * p as f64);
                d > bound * (1.0 + 1e-12) + 1e-300
            })
            .map(|(p, _)| p)
            .collect()
    }
}

/// Why the outer loop ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    FewExtrema,
    ImfCap,
    NegligibleRemainder,
    /// The next filter would be longer than the signal.
    FilterExceedsSignal,
    ScheduleExhausted,
}

/// Record of a decomposition run, present only for sets produced here.
#[derive(Debug, Clone)]
pub struct RunRecord {
    pub config: FifConfig,
    pub meta: Vec<ImfMeta>,
    pub stop_reason: StopReason,
}

/// Modes ordered from highest to lowest frequency, plus the trend.
#[derive(Debug, Clone)]
pub struct ImfSet {
    imfs: Vec<Signal>,
    trend: Signal,
    run: Option<RunRecord>,
}

impl ImfSet {
    /// Wraps an externally produced decomposition (e.g. read from CSV).
    pub fn from_components(imfs: Vec<Signal>, trend: Signal) -> Result<Self> {
        for (k, imf) in imfs.iter().enumerate() {
            if !imf.same_grid_as(&trend) {
                return Err(Error::ShapeMismatch(format!(
                    "component {} does not share the trend's grid",
                    k + 1
                )));
            }
        }
        Ok(Self {
            imfs,
            trend,
            run: None,
        })
    }

    pub fn imfs(&self) -> &[Signal] {
        &self.imfs
    }

    pub fn trend(&self) -> &Signal {
        &self.trend
    }

    pub fn len(&self) -> usize {
        self.imfs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.imfs.is_empty()
    }

    pub fn run(&self) -> Option<&RunRecord> {
        self.run.as_ref()
    }

    /// Trend first, then the modes: the component order used for
    /// conservation checks.
    pub fn components_with_trend(&self) -> Vec<Signal> {
        std::iter::once(self.trend.clone())
            .chain(self.imfs.iter().cloned())
            .collect()
    }
}

/// Sum of all modes and the trend.
pub fn reconstruct(set: &ImfSet) -> Signal {
    let mut acc = set.trend.samples().to_vec();
    for imf in &set.imfs {
        for (a, v) in acc.iter_mut().zip(imf.samples()) {
            *a += v;
        }
    }
    set.trend
        .same_grid(acc)
        .expect("sum of finite components on a shared grid")
}

/// Builds the filter for a requested final half-length `l`, or `None` when
/// its support would not fit in `n` samples.
fn adaptive_filter(config: &FifConfig, l: usize, n: usize) -> Result<Option<Filter>> {
    let (half, support) = match config.filter_mode {
        FilterMode::Double => {
            let base = l.div_ceil(2).max(2);
            (base, 4 * base + 1)
        }
        FilterMode::Raw => {
            let half = l.max(2);
            (half, 2 * half + 1)
        }
    };
    if support > n {
        return Ok(None);
    }
    let base = make_base_filter(config.filter_family, half)?;
    Ok(Some(match config.filter_mode {
        FilterMode::Double => double_convolve(&base),
        FilterMode::Raw => base,
    }))
}

/// Decomposes `signal` into modes and a trend.
pub fn decompose(signal: &Signal, config: &FifConfig) -> Result<ImfSet> {
    config.validate()?;
    let n = signal.len();
    if n < 4 {
        return Err(Error::InvalidInput(format!("decompose needs at least 4 samples, got {n}")));
    }
    let source_norm = crate::spectral::norm2(signal);
    let mut remainder = signal.clone();
    let mut imfs = Vec::new();
    let mut meta = Vec::new();

    let stop_reason = loop {
        if count_extrema(&remainder) < 2 {
            break StopReason::FewExtrema;
        }
        if imfs.len() >= config.max_imfs {
            break StopReason::ImfCap;
        }
        if crate::spectral::norm2(&remainder) <= config.negligible_ratio * source_norm {
            break StopReason::NegligibleRemainder;
        }

        let (filter, requested) = match &config.schedule {
            FilterSchedule::Adaptive => {
                let l = match config.length_rule {
                    LengthRule::Extrema => filters::estimate_filter_length(&remainder, config.chi),
                    LengthRule::SpectralPeak => {
                        filters::estimate_filter_length_spectral(&remainder, config.chi)
                    }
                };
                let l = match l {
                    Ok(l) => l,
                    Err(Error::TrendSignal { .. }) => break StopReason::FewExtrema,
                    Err(e) => return Err(e),
                };
                match adaptive_filter(config, l, n)? {
                    Some(filter) => (filter, l),
                    None => break StopReason::FilterExceedsSignal,
                }
            }
            FilterSchedule::FirstZeroAt(freqs) => {
                let Some(&f) = freqs.get(imfs.len()) else {
                    break StopReason::ScheduleExhausted;
                };
                let nu = f / signal.sample_rate();
                let filter = match config.filter_mode {
                    FilterMode::Double => filters::tune_first_zero(config.filter_family, nu)?,
                    FilterMode::Raw => filters::tune_base_first_zero(config.filter_family, nu)?,
                };
                if filter.support() > n {
                    return Err(Error::FilterTooLong {
                        support: filter.support(),
                        len: n,
                    });
                }
                let l = filter.half_length();
                (filter, l)
            }
        };

        let pad = match config.extension {
            ExtensionMode::Periodic => 0,
            _ => (2 * filter.support()).min(n - 1),
        };
        let work = extend_signal(&remainder, pad, config.extension)?;
        let ex = extract(&work, &filter, config.delta, config.max_inner_iterations)?;
        let imf_samples = ex.imf.samples()[pad..pad + n].to_vec();
        let next: Vec<f64> = remainder
            .samples()
            .iter()
            .zip(&imf_samples)
            .map(|(r, m)| r - m)
            .collect();
        imfs.push(signal.same_grid(imf_samples)?);
        meta.push(ImfMeta {
            filter,
            requested_length: requested,
            iterations: ex.iterations,
            hit_iteration_cap: ex.hit_iteration_cap,
            diff_norms: ex.diff_norms,
            reference_norm: ex.reference_norm,
            pad,
        });
        remainder = signal.same_grid(next)?;
    };

    Ok(ImfSet {
        imfs,
        trend: remainder,
        run: Some(RunRecord {
            config: config.clone(),
            meta,
            stop_reason,
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filters::{filter_dft_padded, tune_first_zero};
    use std::f64::consts::PI;

    fn sig(v: Vec<f64>) -> Signal {
        Signal::new(v, 1.0).unwrap()
    }

    fn tone(bin: f64, amp: f64, n: usize) -> Vec<f64> {
        (0..n).map(|j| amp * (2.0 * PI * bin * j as f64 / n as f64).sin()).collect()
    }

    #[test]
    fn extension_modes() {
        let s = sig(vec![1.0, 2.0, 3.0]);
        let p = extend_signal(&s, 2, ExtensionMode::Periodic).unwrap();
        assert_eq!(p.samples(), &[2.0, 3.0, 1.0, 2.0, 3.0, 1.0, 2.0]);
        assert_eq!(p.t0(), -2.0);
        let m = extend_signal(&s, 2, ExtensionMode::Symmetric).unwrap();
        assert_eq!(m.samples(), &[3.0, 2.0, 1.0, 2.0, 3.0, 2.0, 1.0]);
        let a = extend_signal(&s, 1, ExtensionMode::Antisymmetric).unwrap();
        assert_eq!(a.samples(), &[0.0, 1.0, 2.0, 3.0, 4.0]);
        assert!(extend_signal(&s, 3, ExtensionMode::Symmetric).is_err());
        assert_eq!(extend_signal(&s, 7, ExtensionMode::Periodic).unwrap().len(), 17);
        assert_eq!("reflect".parse::<ExtensionMode>().unwrap(), ExtensionMode::Symmetric);
        assert!("mirror".parse::<ExtensionMode>().is_err());
    }

    #[test]
    fn moving_average_matches_direct_sum_and_spectrum() {
        let n = 40;
        let s = sig((0..n).map(|j| ((j * 7 % 11) as f64).sqrt() - 1.5).collect());
        let w = double_convolve(&make_base_filter(FilterFamily::Bump, 3).unwrap());
        let avg = moving_average(&s, &w).unwrap();
        let l = w.half_length() as isize;
        for j in 0..n {
            let mut acc = 0.0;
            for i in -l..=l {
                let idx = (j as isize + i).rem_euclid(n as isize) as usize;
                acc += w.taps()[(i + l) as usize] * s.samples()[idx];
            }
            assert!((avg.samples()[j] - acc).abs() < 1e-14);
        }
        let resp = filter_dft_padded(&w, n).unwrap();
        let spec: Vec<Complex64> = fft_real(s.samples()).iter().zip(&resp).map(|(c, r)| c * r).collect();
        for (a, b) in ifft_real(&spec).iter().zip(avg.samples()) {
            assert!((a - b).abs() < 1e-13);
        }
        let v = variation(&s, &w).unwrap();
        for j in 0..n {
            assert!((v.samples()[j] + avg.samples()[j] - s.samples()[j]).abs() < 1e-15);
        }
    }

    #[test]
    fn variation_kills_constants() {
        let s = sig(vec![2.5; 16]);
        let w = make_base_filter(FilterFamily::Rectangular, 2).unwrap();
        assert!(variation(&s, &w).unwrap().samples().iter().all(|v| v.abs() < 1e-15));
        let long = make_base_filter(FilterFamily::Bump, 20).unwrap();
        assert!(matches!(moving_average(&s, &long), Err(Error::FilterTooLong { .. })));
    }

    #[test]
    fn tone_at_filter_zero_is_a_fixed_point() {
        let n = 512;
        let w = tune_first_zero(FilterFamily::Bump, 32.0 / n as f64).unwrap();
        let s = Signal::new(tone(32.0, 1.0, n), n as f64).unwrap();
        let ex = extract_imf(&s, &w, 1e-3, 100).unwrap();
        assert_eq!(ex.iterations, 1);
        for (a, b) in ex.imf.samples().iter().zip(s.samples()) {
            assert!((a - b).abs() < 1e-12);
        }
        let raw = make_base_filter(FilterFamily::Bump, 4).unwrap();
        assert!(extract_imf(&s, &raw, 1e-3, 100).is_err());
        assert!(extract_imf_raw(&s, &raw, 1e-3, 100).is_ok());
    }

    #[test]
    fn frequency_loop_matches_time_domain_iteration() {
        let n = 64;
        let s = sig((0..n).map(|j| (0.9 * j as f64).sin() + 0.3 * (0.2 * j as f64).cos()).collect());
        let w = double_convolve(&make_base_filter(FilterFamily::Bump, 3).unwrap());
        let ex = extract_imf(&s, &w, 1e-30, 5).unwrap();
        assert!(ex.hit_iteration_cap);
        let mut x = s.clone();
        for _ in 0..5 {
            x = variation(&x, &w).unwrap();
        }
        for (a, b) in ex.imf.samples().iter().zip(x.samples()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_signal_has_no_modes() {
        let s = Signal::new(vec![3.0; 128], 10.0).unwrap();
        let set = decompose(&s, &FifConfig::default()).unwrap();
        assert!(set.is_empty());
        assert_eq!(set.trend().samples(), s.samples());
        assert_eq!(set.run().unwrap().stop_reason, StopReason::FewExtrema);
    }

    #[test]
    fn decomposition_sums_to_signal_and_is_deterministic() {
        let n = 1000;
        let x: Vec<f64> = (0..n)
            .map(|j| {
                let t = j as f64 / n as f64;
                (2.0 * PI * 90.0 * t).sin() + 0.7 * (2.0 * PI * 9.0 * t).cos() + 2.0 * t
            })
            .collect();
        let s = Signal::new(x, n as f64).unwrap();
        for ext in [ExtensionMode::Periodic, ExtensionMode::Symmetric, ExtensionMode::Antisymmetric] {
            let cfg = FifConfig { extension: ext, ..Default::default() };
            let a = decompose(&s, &cfg).unwrap();
            let b = decompose(&s, &cfg).unwrap();
            assert!(!a.is_empty());
            let r = reconstruct(&a);
            for (u, v) in r.samples().iter().zip(s.samples()) {
                assert!((u - v).abs() < 1e-12);
            }
            for (p, q) in a.imfs().iter().zip(b.imfs()) {
                assert_eq!(p.samples(), q.samples());
            }
        }
    }

    #[test]
    fn first_mode_is_not_additive() {
        let n = 1024;
        let s = Signal::new(tone(100.0, 1.0, n), n as f64).unwrap();
        let z = Signal::new(tone(7.0, 1.0, n).iter().map(|v| v + 0.01 * v * v).collect(), n as f64).unwrap();
        let sum = s.same_grid(s.samples().iter().zip(z.samples()).map(|(a, b)| a + b).collect()).unwrap();
        let cfg = FifConfig::default();
        let first = |x: &Signal| decompose(x, &cfg).unwrap().imfs()[0].clone();
        let (a, b, c) = (first(&s), first(&z), first(&sum));
        let gap = (0..n)
            .map(|j| (c.samples()[j] - a.samples()[j] - b.samples()[j]).abs())
            .fold(0.0, f64::max);
        assert!(gap > 1e-3, "{gap}");
    }

    #[test]
    fn schedule_gives_one_mode_per_frequency() {
        let n = 1024;
        let x: Vec<f64> = tone(64.0, 1.0, n).iter().zip(tone(16.0, 0.5, n)).map(|(a, b)| a + b).collect();
        let s = Signal::new(x, n as f64).unwrap();
        let cfg = FifConfig {
            delta: 1e-8,
            max_inner_iterations: 10_000,
            schedule: FilterSchedule::FirstZeroAt(vec![64.0, 16.0]),
            ..Default::default()
        };
        let set = decompose(&s, &cfg).unwrap();
        assert_eq!(set.len(), 2);
        assert!(matches!(
            set.run().unwrap().stop_reason,
            StopReason::ScheduleExhausted | StopReason::NegligibleRemainder
        ));
        let hi = tone(64.0, 1.0, n);
        let err = set.imfs()[0].samples().iter().zip(&hi).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-6, "{err}");
    }

    #[test]
    fn config_validation() {
        let bad = [
            FifConfig { delta: 0.0, ..Default::default() },
            FifConfig { chi: 2.5, ..Default::default() },
            FifConfig { max_imfs: 0, ..Default::default() },
            FifConfig { max_inner_iterations: 0, ..Default::default() },
            FifConfig { schedule: FilterSchedule::FirstZeroAt(vec![-1.0]), ..Default::default() },
        ];
        for c in bad {
            assert!(c.validate().is_err(), "{c:?}");
        }
        let s = Signal::new(vec![1.0, 2.0, 1.0], 1.0).unwrap();
        assert!(decompose(&s, &FifConfig::default()).is_err());
    }
}
