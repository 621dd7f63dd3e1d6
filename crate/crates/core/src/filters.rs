//! Averaging filters: construction, self-convolution and length estimation.
//!
//! A filter is a nonnegative, even, unit-mass tap sequence on the grid
//! `-l..=l`. The iteration in [`crate::fif`] relies on filters whose
//! transform lies in `[0, 1]`, which is what self-convolution guarantees:
//! the transform of `w * w` is the square of the (real) transform of `w`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{fft_forward, fft_real, Signal};

/// Default value of the length tuning parameter.
pub const DEFAULT_CHI: f64 = 1.6;

/// Tap profile of a base filter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FilterFamily {
    /// `exp(-1 / (1 - x^2))` on `(-1, 1)`, smooth with compact support.
    #[default]
    Bump,
    Triangular,
    /// Constant taps over the whole support. Not continuous at the support
    /// edge; kept as the base whose self-convolution is a triangle.
    Rectangular,
}

impl FilterFamily {
    fn profile(self, x: f64) -> f64 {
        let a = x.abs();
        match self {
            FilterFamily::Bump => {
                if a < 1.0 {
                    (-1.0 / (1.0 - x * x)).exp()
                } else {
                    0.0
                }
            }
            FilterFamily::Triangular => (1.0 - a).max(0.0),
            FilterFamily::Rectangular => {
                if a <= 1.0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FilterFamily::Bump => "bump",
            FilterFamily::Triangular => "triangular",
            FilterFamily::Rectangular => "rectangular",
        }
    }
}

impl fmt::Display for FilterFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FilterFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bump" | "smooth" | "fokker-planck" => Ok(FilterFamily::Bump),
            "triangular" | "triangle" => Ok(FilterFamily::Triangular),
            "rectangular" | "rectangle" | "boxcar" => Ok(FilterFamily::Rectangular),
            _ => Err(Error::UnknownTag {
                what: "filter family",
                name: s.to_string(),
            }),
        }
    }
}

/// A discrete filter centred on tap `half_length`.
#[derive(Debug, Clone, PartialEq)]
pub struct Filter {
    taps: Vec<f64>,
    half_length: usize,
    double_convolution: bool,
}

impl Filter {
    /// Wraps explicit taps, checking nonnegativity, evenness and unit mass.
    pub fn from_taps(taps: Vec<f64>, double_convolution: bool) -> Result<Self> {
        if taps.len() < 3 || taps.len() % 2 == 0 {
            return Err(Error::InvalidInput(format!(
                "filter needs an odd number (>= 3) of taps, got {}",
                taps.len()
            )));
        }
        if taps.iter().any(|t| !t.is_finite() || *t < 0.0) {
            return Err(Error::InvalidInput("filter taps must be finite and nonnegative".into()));
        }
        let m = taps.len();
        let scale = taps.iter().cloned().fold(0.0, f64::max);
        for j in 0..m / 2 {
            if (taps[j] - taps[m - 1 - j]).abs() > 1e-12 * scale {
                return Err(Error::InvalidInput(format!("filter taps are not even about the centre (tap {j})")));
            }
        }
        let mass: f64 = taps.iter().sum();
        if (mass - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput(format!("filter mass is {mass}, expected 1")));
        }
        Ok(Self {
            half_length: m / 2,
            taps,
            double_convolution,
        })
    }

    pub fn taps(&self) -> &[f64] {
        &self.taps
    }

    /// Discrete half-length `l`; the support covers `2l + 1` taps.
    pub fn half_length(&self) -> usize {
        self.half_length
    }

    pub fn support(&self) -> usize {
        self.taps.len()
    }

    pub fn is_double_convolution(&self) -> bool {
        self.double_convolution
    }

    /// Value of the discrete-time transform at `nu` cycles per sample.
    /// Real because the taps are even.
    pub fn response_at(&self, nu: f64) -> f64 {
        let l = self.half_length as isize;
        self.taps
            .iter()
            .enumerate()
            .map(|(i, &w)| w * (2.0 * std::f64::consts::PI * nu * (i as isize - l) as f64).cos())
            .sum()
    }
}

fn normalized(mut taps: Vec<f64>) -> Vec<f64> {
    let mass: f64 = taps.iter().sum();
    for t in taps.iter_mut() {
        *t /= mass;
    }
    // Re-impose exact evenness after the division.
    let m = taps.len();
    for j in 0..m / 2 {
        let v = 0.5 * (taps[j] + taps[m - 1 - j]);
        taps[j] = v;
        taps[m - 1 - j] = v;
    }
    taps
}

/// Samples `family` on the integer grid with a real-valued half width.
///
/// The support is `-ceil(w)..=ceil(w)`. Used directly when a filter zero
/// has to be placed between integer lengths.
pub fn make_scaled_filter(family: FilterFamily, half_width: f64) -> Result<Filter> {
    if !(half_width.is_finite() && half_width >= 1.0) {
        return Err(Error::InvalidInput(format!("half width must be >= 1, got {half_width}")));
    }
    let l = half_width.ceil() as usize;
    let taps: Vec<f64> = (0..=2 * l)
        .map(|i| family.profile((i as f64 - l as f64) / half_width))
        .collect();
    Ok(Filter {
        taps: normalized(taps),
        half_length: l,
        double_convolution: false,
    })
}

pub fn make_base_filter(family: FilterFamily, half_length: usize) -> Result<Filter> {
    if half_length < 2 {
        return Err(Error::InvalidInput(format!(
            "filter half length must be >= 2, got {half_length}"
        )));
    }
    make_scaled_filter(family, half_length as f64)
}

/// Discrete self-convolution, renormalized to unit mass.
pub fn double_convolve(filter: &Filter) -> Filter {
    let m = filter.taps.len();
    let mut out = vec![0.0; 2 * m - 1];
    for (i, &a) in filter.taps.iter().enumerate() {
        if a == 0.0 {
            continue;
        }
        for (j, &b) in filter.taps.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    Filter {
        taps: normalized(out),
        half_length: 2 * filter.half_length,
        double_convolution: true,
    }
}

/// Transform of the taps wrapped circularly around sample 0 of an
/// `n`-point grid. Real part only; the wrapped sequence is even.
pub fn filter_dft_padded(filter: &Filter, n: usize) -> Result<Vec<f64>> {
    if filter.support() > n {
        return Err(Error::FilterTooLong {
            support: filter.support(),
            len: n,
        });
    }
    let l = filter.half_length;
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for (i, &w) in filter.taps.iter().enumerate() {
        let idx = (i + n - l) % n;
        buf[idx].re += w;
    }
    fft_forward(&mut buf);
    Ok(buf.into_iter().map(|c| c.re).collect())
}

/// Kind of a detected extremum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtremumKind {
    Maximum,
    Minimum,
}

/// An interior extremum; plateaus are reported once at their midpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum {
    pub position: f64,
    pub value: f64,
    pub kind: ExtremumKind,
}

/// Strict interior local extrema of a sampled sequence.
pub fn find_extrema(xs: &[f64]) -> Vec<Extremum> {
    // Collapse runs of equal values to (start, end, value).
    let mut runs: Vec<(usize, usize, f64)> = Vec::new();
    for (i, &x) in xs.iter().enumerate() {
        match runs.last_mut() {
            Some(r) if r.2 == x => r.1 = i,
            _ => runs.push((i, i, x)),
        }
    }
    let mut out = Vec::new();
    for w in runs.windows(3) {
        let (prev, cur, next) = (w[0].2, w[1], w[2].2);
        let kind = if cur.2 > prev && cur.2 > next {
            ExtremumKind::Maximum
        } else if cur.2 < prev && cur.2 < next {
            ExtremumKind::Minimum
        } else {
            continue;
        };
        out.push(Extremum {
            position: 0.5 * (cur.0 + cur.1) as f64,
            value: cur.2,
            kind,
        });
    }
    out
}

pub fn count_extrema(signal: &Signal) -> usize {
    find_extrema(signal.samples()).len()
}

fn check_chi(chi: f64) -> Result<()> {
    if !(1.1..=2.0).contains(&chi) {
        return Err(Error::InvalidInput(format!("chi must lie in [1.1, 2], got {chi}")));
    }
    Ok(())
}

/// `l = 2 * floor(chi * n / k)` with `k` the extrema count, clamped below at 2.
pub fn estimate_filter_length(signal: &Signal, chi: f64) -> Result<usize> {
    check_chi(chi)?;
    let k = count_extrema(signal);
    if k < 2 {
        return Err(Error::TrendSignal { extrema: k });
    }
    Ok(length_from_extrema(signal.len(), k, chi))
}

pub(crate) fn length_from_extrema(n: usize, extrema: usize, chi: f64) -> usize {
    let l = 2 * (chi * n as f64 / extrema as f64).floor() as usize;
    if l < 2 {
        log::warn!("estimated filter length {l} clamped to 2 ({extrema} extrema in {n} samples)");
        2
    } else {
        l
    }
}

/// Alternative rule: `l = round(chi * n / k_peak)` where `k_peak` is the
/// largest-modulus bin above DC. Equivalent to `chi` periods of the
/// dominant frequency.
pub fn estimate_filter_length_spectral(signal: &Signal, chi: f64) -> Result<usize> {
    check_chi(chi)?;
    let n = signal.len();
    let spec = fft_real(signal.samples());
    let (peak, mag) = spec[1..=n / 2]
        .iter()
        .enumerate()
        .map(|(i, c)| (i + 1, c.norm()))
        .fold((0, 0.0), |acc, (i, m)| if m > acc.1 { (i, m) } else { acc });
    if peak == 0 || mag == 0.0 {
        return Err(Error::TrendSignal { extrema: 0 });
    }
    let l = (chi * n as f64 / peak as f64).round() as usize;
    Ok(l.max(2))
}

/// Double-convolution filter whose transform has its first zero at `nu`
/// cycles per sample. The self-convolution of the tuned base has a double
/// zero there and is strictly positive below it.
pub fn tune_first_zero(family: FilterFamily, nu: f64) -> Result<Filter> {
    tune_base_first_zero(family, nu).map(|base| double_convolve(&base))
}

/// Base (not self-convolved) filter whose transform first crosses zero at
/// `nu` cycles per sample.
///
/// The base filter's real transform changes sign at its first zero, so
/// the half width is found by bracketing that sign change and bisecting
/// on the (real-valued) width.
pub fn tune_base_first_zero(family: FilterFamily, nu: f64) -> Result<Filter> {
    if family == FilterFamily::Triangular {
        return Err(Error::Unsupported(
            "triangular transform does not change sign; zero placement needs bump or rectangular".into(),
        ));
    }
    if !(nu > 0.0 && nu < 0.5) {
        return Err(Error::InvalidInput(format!(
            "target frequency must lie in (0, 0.5) cycles/sample, got {nu}"
        )));
    }
    let response = |w: f64| make_scaled_filter(family, w).map(|f| f.response_at(nu));
    let mut lo = 1.0;
    if response(lo)? <= 0.0 {
        return Err(Error::Domain(format!("target {nu} cycles/sample is too high to place a zero")));
    }
    let mut hi = lo;
    loop {
        hi *= 1.05;
        if response(hi)? < 0.0 {
            break;
        }
        lo = hi;
        if hi > 1e7 {
            return Err(Error::Domain("no sign change found while tuning filter".into()));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if response(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-13 * hi {
            break;
        }
    }
    make_scaled_filter(family, 0.5 * (lo + hi))
}
