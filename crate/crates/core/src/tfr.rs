//! Time-frequency representations built from modes.
//!
//! Each mode gets an instantaneous amplitude (an envelope through the local
//! maxima of `|imf|`, never below `|imf|`) and an instantaneous frequency
//! (from zero-crossing spacing, two crossings per period). Window means of
//! those tracks give the local amplitude and frequency, and the IMFogram
//! adds each mode's local amplitude into the cell addressed by its local
//! frequency and window. The spectrogram and periodogram are provided with
//! a one-sided amplitude normalization so the two can be compared directly.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fif::ImfSet;
use crate::filters::{find_extrema, ExtremumKind};
use crate::spectral::{fft_real, Signal};

/// Instantaneous amplitude and frequency of one mode on its sample grid.
#[derive(Debug, Clone, PartialEq)]
pub struct InstantaneousTrack {
    pub amplitude: Vec<f64>,
    /// Hz.
    pub frequency: Vec<f64>,
    /// `|imf|` had no interior maximum; amplitude is the constant `max |imf|`.
    pub degenerate_amplitude: bool,
    /// Fewer than two zero crossings; frequency is all zeros.
    pub degenerate_frequency: bool,
}

/// Piecewise-linear interpolation through `knots` (sorted by position),
/// held constant outside the first and last knot.
fn interpolate(knots: &[(f64, f64)], len: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(len);
    let mut seg = 0;
    for j in 0..len {
        let x = j as f64;
        if x <= knots[0].0 {
            out.push(knots[0].1);
            continue;
        }
        let last = knots[knots.len() - 1];
        if x >= last.0 {
            out.push(last.1);
            continue;
        }
        while knots[seg + 1].0 < x {
            seg += 1;
        }
        let (x0, y0) = knots[seg];
        let (x1, y1) = knots[seg + 1];
        out.push(if x1 > x0 { y0 + (y1 - y0) * (x - x0) / (x1 - x0) } else { y1 });
    }
    out
}

fn amplitude_track(xs: &[f64]) -> (Vec<f64>, bool) {
    let rectified: Vec<f64> = xs.iter().map(|x| x.abs()).collect();
    let mut knots: Vec<(f64, f64)> = find_extrema(&rectified)
        .into_iter()
        .filter(|e| e.kind == ExtremumKind::Maximum)
        .map(|e| (e.position, e.value))
        .collect();
    if knots.is_empty() {
        let peak = rectified.iter().cloned().fold(0.0, f64::max);
        return (vec![peak; xs.len()], true);
    }
    // silent stretches (two or more exact zeros) pin the envelope to zero
    let mut j = 0;
    while j < xs.len() {
        if xs[j] == 0.0 {
            let start = j;
            while j < xs.len() && xs[j] == 0.0 {
                j += 1;
            }
            if j - start >= 2 {
                knots.push((start as f64, 0.0));
                knots.push(((j - 1) as f64, 0.0));
            }
        } else {
            j += 1;
        }
    }
    knots.sort_by(|a, b| a.0.total_cmp(&b.0));
    let envelope = interpolate(&knots, xs.len());
    let out = envelope.iter().zip(&rectified).map(|(g, r)| g.max(*r)).collect();
    (out, false)
}

/// Zero crossings of the piecewise-linear interpolant, in sample units.
/// A run of exact zeros between opposite signs counts once, at its middle.
pub fn zero_crossings(xs: &[f64]) -> Vec<f64> {
    let mut out = Vec::new();
    let mut last: Option<usize> = None;
    for (j, &x) in xs.iter().enumerate() {
        if x == 0.0 {
            continue;
        }
        if let Some(i) = last {
            let a = xs[i];
            if (a < 0.0) != (x < 0.0) {
                if j == i + 1 {
                    out.push(i as f64 + a / (a - x));
                } else {
                    out.push(0.5 * (i + j) as f64);
                }
            }
        }
        last = Some(j);
    }
    out
}

fn frequency_track(xs: &[f64], sample_rate: f64) -> (Vec<f64>, bool) {
    let z = zero_crossings(xs);
    if z.len() < 2 {
        return (vec![0.0; xs.len()], true);
    }
    // Frequency of the gap [z_j, z_{j+1}] is attached to z_j; the last
    // crossing repeats the last complete gap.
    let mut knots: Vec<(f64, f64)> = z
        .windows(2)
        .map(|w| (w[0], 0.5 * sample_rate / (w[1] - w[0])))
        .collect();
    let tail = knots[knots.len() - 1].1;
    knots.push((z[z.len() - 1], tail));
    (interpolate(&knots, xs.len()), false)
}

/// Envelope through the local maxima of `|imf|`, floored by `|imf|`. Runs of
/// two or more exact zeros hold the envelope at zero.
pub fn instantaneous_amplitude(imf: &Signal) -> Vec<f64> {
    let (a, degenerate) = amplitude_track(imf.samples());
    if degenerate {
        log::warn!("no interior maximum of |imf|; instantaneous amplitude set to max |imf|");
    }
    a
}

/// Zero-crossing frequency in Hz: `1 / (2 (z_{j+1} - z_j))` at crossing `z_j`,
/// linearly interpolated and held constant past the outer crossings.
pub fn instantaneous_frequency(imf: &Signal) -> Vec<f64> {
    let (f, degenerate) = frequency_track(imf.samples(), imf.sample_rate());
    if degenerate {
        log::warn!("fewer than two zero crossings; instantaneous frequency set to 0");
    }
    f
}

pub fn instantaneous_track(imf: &Signal) -> InstantaneousTrack {
    let (amplitude, degenerate_amplitude) = amplitude_track(imf.samples());
    let (frequency, degenerate_frequency) = frequency_track(imf.samples(), imf.sample_rate());
    InstantaneousTrack {
        amplitude,
        frequency,
        degenerate_amplitude,
        degenerate_frequency,
    }
}

/// Window placement for local averages: length `J`, hop `H`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AveragingWindows {
    pub length: usize,
    pub hop: usize,
}

impl AveragingWindows {
    pub fn new(length: usize, hop: usize) -> Result<Self> {
        if length == 0 || hop == 0 || hop > length {
            return Err(Error::InvalidInput(format!(
                "windows need 1 <= hop <= length, got length {length}, hop {hop}"
            )));
        }
        Ok(Self { length, hop })
    }

    /// Non-overlapping windows, the block-averaging case.
    pub fn non_overlapping(length: usize) -> Result<Self> {
        Self::new(length, length)
    }

    fn check(&self, n: usize) -> Result<()> {
        if self.length > n {
            return Err(Error::InvalidInput(format!(
                "window length {} exceeds signal length {n}",
                self.length
            )));
        }
        Ok(())
    }

    /// `(start, len)` of every window over `n` samples. Windows advance by
    /// `hop` until one reaches the end; a trailing partial window covers
    /// any samples left over.
    pub fn ranges(&self, n: usize) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        let mut start = 0;
        loop {
            let len = self.length.min(n - start);
            out.push((start, len));
            if start + len >= n {
                break;
            }
            start += self.hop;
        }
        out
    }
}

/// Mean of `track` over each window.
pub fn local_average(track: &[f64], windows: &AveragingWindows) -> Result<Vec<f64>> {
    windows.check(track.len())?;
    Ok(windows
        .ranges(track.len())
        .into_iter()
        .map(|(s, l)| track[s..s + l].iter().sum::<f64>() / l as f64)
        .collect())
}

/// Nonnegative matrix, rows indexed by frequency, columns by time window.
#[derive(Debug, Clone, PartialEq)]
pub struct TfrMatrix {
    /// Row-major, `rows() * cols()` entries.
    values: Vec<f64>,
    freq_axis: Vec<f64>,
    time_axis: Vec<f64>,
    pub window_length: usize,
    pub hop: usize,
    /// Local frequencies above the top bin that were clamped into it.
    pub clamped: usize,
}

impl TfrMatrix {
    pub fn new(
        values: Vec<f64>,
        freq_axis: Vec<f64>,
        time_axis: Vec<f64>,
        window_length: usize,
        hop: usize,
    ) -> Result<Self> {
        if values.len() != freq_axis.len() * time_axis.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} values for a {}x{} matrix",
                values.len(),
                freq_axis.len(),
                time_axis.len()
            )));
        }
        if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidInput("matrix values must be finite and >= 0".into()));
        }
        Ok(Self {
            values,
            freq_axis,
            time_axis,
            window_length,
            hop,
            clamped: 0,
        })
    }

    pub fn rows(&self) -> usize {
        self.freq_axis.len()
    }

    pub fn cols(&self) -> usize {
        self.time_axis.len()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.cols() + col]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn row(&self, row: usize) -> &[f64] {
        let c = self.cols();
        &self.values[row * c..(row + 1) * c]
    }

    pub fn freq_axis(&self) -> &[f64] {
        &self.freq_axis
    }

    pub fn time_axis(&self) -> &[f64] {
        &self.time_axis
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().cloned().fold(0.0, f64::max)
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    fn same_axes(&self, other: &TfrMatrix) -> bool {
        let close = |a: &[f64], b: &[f64]| {
            a.len() == b.len()
                && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= 1e-9 * x.abs().max(y.abs()).max(1e-300))
        };
        close(&self.freq_axis, &other.freq_axis) && close(&self.time_axis, &other.time_axis)
    }
}

fn window_centres(signal: &Signal, ranges: &[(usize, usize)]) -> Vec<f64> {
    ranges
        .iter()
        .map(|&(s, l)| signal.t0() + (s as f64 + 0.5 * (l as f64 - 1.0)) / signal.sample_rate())
        .collect()
}

/// Row for frequency `f` among `bins` uniform centres over `[0, nyquist]`:
/// nearest centre, ties to the lower one. Frequencies above Nyquist land
/// in the top row and are flagged.
fn frequency_row(f: f64, nyquist: f64, bins: usize) -> (usize, bool) {
    let x = f.max(0.0) / nyquist * (bins - 1) as f64;
    let row = ((x - 0.5).ceil().max(0.0) as usize).min(bins - 1);
    (row, f > nyquist)
}

/// Per-mode local amplitudes and frequencies for every window.
#[derive(Debug, Clone)]
pub struct LocalTracks {
    pub amplitude: Vec<f64>,
    pub frequency: Vec<f64>,
}

/// Local amplitude and frequency of every mode (trend excluded).
pub fn local_tracks(set: &ImfSet, windows: &AveragingWindows) -> Result<Vec<LocalTracks>> {
    let n = set.trend().len();
    windows.check(n)?;
    set.imfs()
        .par_iter()
        .map(|imf| {
            let t = instantaneous_track(imf);
            Ok(LocalTracks {
                amplitude: local_average(&t.amplitude, windows)?,
                frequency: local_average(&t.frequency, windows)?,
            })
        })
        .collect()
}

/// Accumulates each mode's local amplitude at its local frequency.
///
/// Rows are `n_freq_bins` uniform centres from 0 to the Nyquist frequency
/// inclusive. Modes are accumulated in order, so the result does not depend
/// on the thread count used for the per-mode tracks.
pub fn imfogram(set: &ImfSet, windows: &AveragingWindows, n_freq_bins: usize) -> Result<TfrMatrix> {
    if set.is_empty() {
        return Err(Error::InvalidInput("imfogram needs at least one mode".into()));
    }
    if n_freq_bins < 2 {
        return Err(Error::InvalidInput(format!("need at least 2 frequency bins, got {n_freq_bins}")));
    }
    let grid = set.trend();
    let n = grid.len();
    let tracks = local_tracks(set, windows)?;
    let ranges = windows.ranges(n);
    let cols = ranges.len();
    let nyquist = 0.5 * grid.sample_rate();
    let mut values = vec![0.0; n_freq_bins * cols];
    let mut clamped = 0;
    for t in &tracks {
        for j in 0..cols {
            let (row, over) = frequency_row(t.frequency[j], nyquist, n_freq_bins);
            clamped += over as usize;
            values[row * cols + j] += t.amplitude[j];
        }
    }
    if clamped > 0 {
        log::warn!("{clamped} local frequencies above Nyquist clamped into the top bin");
    }
    let freq_axis = (0..n_freq_bins)
        .map(|i| nyquist * i as f64 / (n_freq_bins - 1) as f64)
        .collect();
    let mut m = TfrMatrix::new(values, freq_axis, window_centres(grid, &ranges), windows.length, windows.hop)?;
    m.clamped = clamped;
    Ok(m)
}

/// Rectangular-window spectrogram with one-sided amplitude scaling:
/// `2 |X_k| / J`, with DC (and Nyquist for even `J`) unhalved. Only full
/// windows are used.
pub fn spectrogram(signal: &Signal, window: usize, hop: usize) -> Result<TfrMatrix> {
    let n = signal.len();
    if window == 0 || hop == 0 {
        return Err(Error::InvalidInput("window and hop must be positive".into()));
    }
    if window > n {
        return Err(Error::InvalidInput(format!("window {window} exceeds signal length {n}")));
    }
    let cols = (n - window) / hop + 1;
    let rows = window / 2 + 1;
    let ranges: Vec<(usize, usize)> = (0..cols).map(|c| (c * hop, window)).collect();
    let mut values = vec![0.0; rows * cols];
    let x = signal.samples();
    for (c, &(start, _)) in ranges.iter().enumerate() {
        let spec = fft_real(&x[start..start + window]);
        for k in 0..rows {
            let unhalved = k == 0 || (window % 2 == 0 && k == window / 2);
            let scale = if unhalved { 1.0 } else { 2.0 };
            values[k * cols + c] = scale * spec[k].norm() / window as f64;
        }
    }
    let freq_axis = (0..rows)
        .map(|k| k as f64 * signal.sample_rate() / window as f64)
        .collect();
    TfrMatrix::new(values, freq_axis, window_centres(signal, &ranges), window, hop)
}

/// Single-column spectrogram over the whole signal.
pub fn periodogram(signal: &Signal) -> Result<TfrMatrix> {
    spectrogram(signal, signal.len(), signal.len())
}

pub fn hadamard_square(m: &TfrMatrix) -> TfrMatrix {
    TfrMatrix {
        values: m.values.iter().map(|v| v * v).collect(),
        ..m.clone()
    }
}

/// Relative Frobenius error `||a - b|| / ||b||`.
pub fn compare_tfr(a: &TfrMatrix, b: &TfrMatrix) -> Result<f64> {
    if a.rows() != b.rows() || a.cols() != b.cols() || !a.same_axes(b) {
        return Err(Error::ShapeMismatch(format!(
            "cannot compare {}x{} with {}x{} (or axes differ)",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    let (num, den) = a
        .values
        .iter()
        .zip(&b.values)
        .fold((0.0, 0.0), |(n, d), (x, y)| (n + (x - y) * (x - y), d + y * y));
    Ok((num / den).sqrt())
}

/// Relative Frobenius error over cells where either matrix exceeds
/// `threshold * max(b)`.
pub fn compare_tfr_populated(a: &TfrMatrix, b: &TfrMatrix, threshold: f64) -> Result<f64> {
    compare_tfr(a, b)?;
    let cut = threshold * b.max_value();
    let (num, den) = a
        .values
        .iter()
        .zip(&b.values)
        .filter(|(x, y)| **x > cut || **y > cut)
        .fold((0.0, 0.0), |(n, d), (x, y)| (n + (x - y) * (x - y), d + y * y));
    Ok((num / den).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn sine(f: f64, amp: f64, n: usize, rate: f64) -> Signal {
        Signal::new(
            (0..n).map(|j| amp * (2.0 * PI * f * j as f64 / rate).sin()).collect(),
            rate,
        )
        .unwrap()
    }

    #[test]
    fn local_average_by_hand() {
        let w = AveragingWindows::non_overlapping(2).unwrap();
        assert_eq!(local_average(&[1.0, 2.0, 3.0, 4.0], &w).unwrap(), vec![1.5, 3.5]);
        assert_eq!(local_average(&[2.5; 9], &AveragingWindows::new(4, 2).unwrap()).unwrap(), vec![2.5; 4]);
        // trailing partial window
        assert_eq!(local_average(&[1.0, 1.0, 4.0], &w).unwrap(), vec![1.0, 4.0]);
        let one = AveragingWindows::non_overlapping(1).unwrap();
        assert_eq!(local_average(&[3.0, 1.0], &one).unwrap(), vec![3.0, 1.0]);
        assert!(local_average(&[1.0], &w).is_err());
        assert!(AveragingWindows::new(2, 3).is_err());
    }

    #[test]
    fn sine_tracks() {
        let s = sine(10.0, 2.0, 1000, 1000.0);
        let t = instantaneous_track(&s);
        assert!(!t.degenerate_amplitude && !t.degenerate_frequency);
        for j in 0..s.len() {
            assert!(t.amplitude[j] >= s.samples()[j].abs() - 1e-12);
            assert!((t.amplitude[j] - 2.0).abs() <= 0.02);
        }
        for &f in &t.frequency[50..950] {
            assert!((f - 10.0).abs() <= 0.05, "{f}");
        }
    }

    #[test]
    fn negation_invariance() {
        let s = sine(7.0, 1.0, 500, 500.0);
        let neg = s.same_grid(s.samples().iter().map(|x| -x).collect()).unwrap();
        assert_eq!(instantaneous_track(&s).amplitude, instantaneous_track(&neg).amplitude);
        assert_eq!(instantaneous_track(&s).frequency, instantaneous_track(&neg).frequency);
    }

    #[test]
    fn degenerate_tracks() {
        let ramp = Signal::new((1..20).map(|j| j as f64).collect(), 1.0).unwrap();
        let t = instantaneous_track(&ramp);
        assert!(t.degenerate_amplitude && t.degenerate_frequency);
        assert!(t.amplitude.iter().all(|&a| a == 19.0));
        assert!(t.frequency.iter().all(|&f| f == 0.0));
    }

    #[test]
    fn zero_runs_cross_once() {
        assert_eq!(zero_crossings(&[1.0, 0.0, -1.0]), vec![1.0]);
        assert_eq!(zero_crossings(&[1.0, 0.0, 0.0, -1.0]), vec![1.5]);
        assert!(zero_crossings(&[1.0, 0.0, 1.0]).is_empty());
        assert_eq!(zero_crossings(&[1.0, -3.0]), vec![0.25]);
    }

    #[test]
    fn binning_rounds_ties_down() {
        assert_eq!(frequency_row(0.0, 10.0, 11), (0, false));
        assert_eq!(frequency_row(1.5, 10.0, 11), (1, false));
        assert_eq!(frequency_row(1.51, 10.0, 11), (2, false));
        assert_eq!(frequency_row(10.0, 10.0, 11), (10, false));
        assert_eq!(frequency_row(10.4, 10.0, 11), (10, true));
        assert_eq!(frequency_row(12.0, 10.0, 11), (10, true));
    }

    #[test]
    fn spectrogram_of_constant() {
        let s = Signal::new(vec![3.0; 16], 16.0).unwrap();
        let m = spectrogram(&s, 16, 16).unwrap();
        assert_eq!(m.cols(), 1);
        assert!((m.get(0, 0) - 3.0).abs() < 1e-12);
        for k in 1..m.rows() {
            assert!(m.get(k, 0) < 1e-12);
        }
        assert_eq!(periodogram(&s).unwrap(), m);
    }

    #[test]
    fn hadamard_and_compare() {
        let m = TfrMatrix::new(vec![1.0, 3.0], vec![0.0, 1.0], vec![0.5], 2, 2).unwrap();
        let sq = hadamard_square(&m);
        assert_eq!(sq.values(), &[1.0, 9.0]);
        assert_eq!(sq.freq_axis(), m.freq_axis());
        assert_eq!(sq.time_axis(), m.time_axis());
        assert_eq!(compare_tfr(&m, &m).unwrap(), 0.0);
        let twice = TfrMatrix::new(vec![2.0, 6.0], vec![0.0, 1.0], vec![0.5], 2, 2).unwrap();
        assert!((compare_tfr(&twice, &m).unwrap() - 1.0).abs() < 1e-15);
        let other = TfrMatrix::new(vec![1.0], vec![0.0], vec![0.5], 2, 2).unwrap();
        assert!(compare_tfr(&m, &other).is_err());
    }
}
