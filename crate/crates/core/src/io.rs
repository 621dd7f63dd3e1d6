//! Reading signals from CSV/WAV and writing decompositions, reports and
//! time-frequency matrices.
//!
//! Numbers are written as `{:.16e}` (17 significant digits), which
//! round-trips every `f64`. Line endings are `\n`.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::fif::{ImfSet, StopReason};
use crate::filters::Filter;
use crate::spectral::Signal;
use crate::tfr::TfrMatrix;
use crate::verify::ConservationReport;

/// Lossless decimal rendering of a double.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Maximum relative deviation of time steps from their mean accepted on ingest.
pub const MAX_GRID_JITTER: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputFormat {
    Csv,
    Wav,
}

impl InputFormat {
    /// Guesses from the file extension; anything but `.wav` is CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("wav") => InputFormat::Wav,
            _ => InputFormat::Csv,
        }
    }
}

impl FromStr for InputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(InputFormat::Csv),
            "wav" => Ok(InputFormat::Wav),
            _ => Err(Error::UnknownTag {
                what: "input format",
                name: s.to_string(),
            }),
        }
    }
}

/// Numeric rows of a CSV file. `#` lines are comments; a leading
/// non-numeric row is treated as a header.
pub fn read_csv_table(path: &Path) -> Result<Vec<Vec<f64>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        let parsed: std::result::Result<Vec<f64>, _> = record.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(row) => rows.push(row),
            Err(_) if i == 0 && rows.is_empty() => continue,
            Err(e) => {
                return Err(Error::Format(format!(
                    "{}: row {}: {e}",
                    path.display(),
                    i + 1
                )))
            }
        }
    }
    if rows.is_empty() {
        return Err(Error::Format(format!("{}: no numeric rows", path.display())));
    }
    let width = rows[0].len();
    if let Some(i) = rows.iter().position(|r| r.len() != width) {
        return Err(Error::Format(format!(
            "{}: row {} has {} columns, expected {width}",
            path.display(),
            i + 1,
            rows[i].len()
        )));
    }
    Ok(rows)
}

/// Sample rate and start time implied by a time column, rejecting grids
/// whose steps deviate from the mean by more than [`MAX_GRID_JITTER`].
pub fn grid_from_times(times: &[f64]) -> Result<(f64, f64)> {
    if times.len() < 2 {
        return Err(Error::InvalidInput("need at least 2 time stamps".into()));
    }
    let n = times.len();
    let mean = (times[n - 1] - times[0]) / (n - 1) as f64;
    if !(mean > 0.0 && mean.is_finite()) {
        return Err(Error::InvalidInput("time column must be strictly increasing".into()));
    }
    let jitter = times
        .windows(2)
        .map(|w| ((w[1] - w[0]) - mean).abs() / mean)
        .fold(0.0, f64::max);
    if jitter > MAX_GRID_JITTER {
        return Err(Error::InvalidInput(format!(
            "nonuniform time grid: relative step jitter {jitter:.3e} exceeds {MAX_GRID_JITTER:e}"
        )));
    }
    Ok((1.0 / mean, times[0]))
}

/// Reads a one-column (`value`, needs `rate`) or two-column (`time,value`) CSV.
pub fn read_signal_csv(path: &Path, rate: Option<f64>) -> Result<Signal> {
    let rows = read_csv_table(path)?;
    match rows[0].len() {
        1 => {
            let rate = rate.ok_or_else(|| {
                Error::InvalidInput(format!(
                    "{} has a single column; a sample rate (--rate) is required",
                    path.display()
                ))
            })?;
            Signal::new(rows.into_iter().map(|r| r[0]).collect(), rate)
        }
        2 => {
            let times: Vec<f64> = rows.iter().map(|r| r[0]).collect();
            let (rate, t0) = grid_from_times(&times)?;
            Signal::with_start(rows.into_iter().map(|r| r[1]).collect(), rate, t0)
        }
        w => Err(Error::Format(format!(
            "{}: expected 1 or 2 columns, found {w}",
            path.display()
        ))),
    }
}

/// Reads the first channel of a PCM (16/24/32-bit) or float32 WAV file,
/// scaling integers into `[-1, 1)`.
pub fn read_wav(path: &Path) -> Result<Signal> {
    let mut reader =
        hound::WavReader::open(path).map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
    let spec = reader.spec();
    let channels = spec.channels.max(1) as usize;
    let wav_err = |e: hound::Error| Error::Format(format!("{}: {e}", path.display()));
    let samples: Vec<f64> = match (spec.sample_format, spec.bits_per_sample) {
        (hound::SampleFormat::Int, bits @ (16 | 24 | 32)) => {
            let scale = 1.0 / (1u64 << (bits - 1)) as f64;
            reader
                .samples::<i32>()
                .step_by(channels)
                .map(|s| s.map(|v| v as f64 * scale))
                .collect::<std::result::Result<_, _>>()
                .map_err(wav_err)?
        }
        (hound::SampleFormat::Float, 32) => reader
            .samples::<f32>()
            .step_by(channels)
            .map(|s| s.map(f64::from))
            .collect::<std::result::Result<_, _>>()
            .map_err(wav_err)?,
        (fmt, bits) => {
            return Err(Error::Format(format!(
                "{}: unsupported WAV encoding {fmt:?} {bits}-bit",
                path.display()
            )))
        }
    };
    if samples.is_empty() {
        return Err(Error::Format(format!("{}: no samples", path.display())));
    }
    Signal::new(samples, spec.sample_rate as f64)
}

pub fn ingest(path: &Path, format: InputFormat, rate: Option<f64>) -> Result<Signal> {
    match format {
        InputFormat::Csv => read_signal_csv(path, rate),
        InputFormat::Wav => read_wav(path),
    }
}

pub fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

pub fn write_signal_csv<W: Write>(mut w: W, signal: &Signal) -> Result<()> {
    writeln!(w, "time,value")?;
    for (j, v) in signal.samples().iter().enumerate() {
        writeln!(w, "{},{}", fmt_num(signal.time(j)), fmt_num(*v))?;
    }
    Ok(())
}

/// Short name used in file headers and summaries.
pub fn stop_name(r: StopReason) -> &'static str {
    match r {
        StopReason::FewExtrema => "few-extrema",
        StopReason::ImfCap => "imf-cap",
        StopReason::NegligibleRemainder => "negligible-remainder",
        StopReason::FilterExceedsSignal => "filter-exceeds-signal",
        StopReason::ScheduleExhausted => "schedule-exhausted",
    }
}

/// `time, imf_1..imf_m, trend`, preceded by `#` metadata lines.
pub fn write_imf_set_csv<W: Write>(mut w: W, set: &ImfSet) -> Result<()> {
    if let Some(run) = set.run() {
        let c = &run.config;
        writeln!(
            w,
            "# delta={} chi={} max_imfs={} max_inner_iterations={} extension={} filter_family={} filter_mode={} stop={}",
            c.delta,
            c.chi,
            c.max_imfs,
            c.max_inner_iterations,
            c.extension,
            c.filter_family,
            c.filter_mode,
            stop_name(run.stop_reason)
        )?;
        for (k, m) in run.meta.iter().enumerate() {
            writeln!(
                w,
                "# imf_{} filter_length={} requested_length={} iterations={} iteration_cap={}",
                k + 1,
                m.filter_length(),
                m.requested_length,
                m.iterations,
                m.hit_iteration_cap
            )?;
        }
    }
    let mut header = String::from("time");
    for k in 1..=set.len() {
        header.push_str(&format!(",imf_{k}"));
    }
    header.push_str(",trend");
    writeln!(w, "{header}")?;
    let trend = set.trend();
    for j in 0..trend.len() {
        let mut line = fmt_num(trend.time(j));
        for imf in set.imfs() {
            line.push(',');
            line.push_str(&fmt_num(imf.samples()[j]));
        }
        line.push(',');
        line.push_str(&fmt_num(trend.samples()[j]));
        writeln!(w, "{line}")?;
    }
    Ok(())
}

/// Reads a `time, c_1, ..., c_m, trend` table as an external decomposition.
pub fn read_imf_set_csv(path: &Path) -> Result<ImfSet> {
    let rows = read_csv_table(path)?;
    let width = rows[0].len();
    if width < 2 {
        return Err(Error::Format(format!(
            "{}: need a time column and at least a trend column",
            path.display()
        )));
    }
    let times: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    let (rate, t0) = grid_from_times(&times)?;
    let column = |c: usize| Signal::with_start(rows.iter().map(|r| r[c]).collect(), rate, t0);
    let imfs = (1..width - 1).map(column).collect::<Result<Vec<_>>>()?;
    ImfSet::from_components(imfs, column(width - 1)?)
}

pub fn write_report_csv<W: Write>(mut w: W, report: &ConservationReport) -> Result<()> {
    writeln!(w, "bin,signal_abs,component_sum,excess")?;
    for (k, (s, c)) in report
        .per_bin_signal_energy
        .iter()
        .zip(&report.per_bin_component_sum)
        .enumerate()
    {
        writeln!(w, "{k},{},{},{}", fmt_num(*s), fmt_num(*c), fmt_num(c - s))?;
    }
    Ok(())
}

/// First row is the time axis, first column the frequency axis.
pub fn write_tfr_csv<W: Write>(mut w: W, m: &TfrMatrix) -> Result<()> {
    write_matrix_csv(&mut w, m, fmt_num)
}

fn write_matrix_csv<W: Write>(w: &mut W, m: &TfrMatrix, cell: impl Fn(f64) -> String) -> Result<()> {
    let mut head = String::from("freq\\time");
    for t in m.time_axis() {
        head.push(',');
        head.push_str(&fmt_num(*t));
    }
    writeln!(w, "{head}")?;
    for (r, f) in m.freq_axis().iter().enumerate() {
        let mut line = fmt_num(*f);
        for v in m.row(r) {
            line.push(',');
            line.push_str(&cell(*v));
        }
        writeln!(w, "{line}")?;
    }
    Ok(())
}

/// Cells as `20 log10(v / max)` dB, floored at `floor_db`.
pub fn write_tfr_db_csv<W: Write>(mut w: W, m: &TfrMatrix, floor_db: f64) -> Result<()> {
    let peak = m.max_value();
    write_matrix_csv(&mut w, m, |v| {
        let db = if peak > 0.0 && v > 0.0 {
            (20.0 * (v / peak).log10()).max(floor_db)
        } else {
            floor_db
        };
        fmt_num(db)
    })
}

/// Binary PGM (P5). Row 0 is the highest frequency; values map linearly
/// from `[0, max]` to `[0, 255]` or `[0, 65535]` (big-endian), rounded.
pub fn write_tfr_pgm<W: Write>(mut w: W, m: &TfrMatrix, bits: u8) -> Result<()> {
    let maxval: u32 = match bits {
        8 => 255,
        16 => 65535,
        _ => return Err(Error::InvalidInput(format!("PGM depth must be 8 or 16, got {bits}"))),
    };
    write!(w, "P5\n{} {}\n{}\n", m.cols(), m.rows(), maxval)?;
    let peak = m.max_value();
    let mut bytes = Vec::with_capacity(m.rows() * m.cols() * (bits as usize / 8));
    for r in (0..m.rows()).rev() {
        for &v in m.row(r) {
            let q = if peak > 0.0 {
                (v / peak * maxval as f64).round() as u32
            } else {
                0
            };
            if bits == 8 {
                bytes.push(q as u8);
            } else {
                bytes.extend_from_slice(&(q as u16).to_be_bytes());
            }
        }
    }
    w.write_all(&bytes)?;
    Ok(())
}

/// One tap per line.
pub fn write_filter_csv<W: Write>(mut w: W, filter: &Filter) -> Result<()> {
    for t in filter.taps() {
        writeln!(w, "{}", fmt_num(*t))?;
    }
    Ok(())
}
