//! Python bindings. Signals cross the boundary as lists of floats; results
//! come back as dicts.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use imfogram_core::io::stop_name;
use imfogram_core::signals::{self, Duffing, NoisyTriple};
use imfogram_core::tfr::AveragingWindows;
use imfogram_core::{FifConfig, ImfSet, Signal, TfrMatrix};

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn signal(samples: Vec<f64>, sample_rate: f64) -> PyResult<Signal> {
    Signal::new(samples, sample_rate).map_err(err)
}

fn tfr_dict<'py>(py: Python<'py>, m: &TfrMatrix) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    let rows: Vec<Vec<f64>> = (0..m.rows()).map(|r| m.row(r).to_vec()).collect();
    d.set_item("values", rows)?;
    d.set_item("freq", m.freq_axis().to_vec())?;
    d.set_item("time", m.time_axis().to_vec())?;
    d.set_item("clamped", m.clamped)?;
    Ok(d)
}

/// Fast Iterative Filtering. Returns `imfs`, `trend`, `stop_reason`,
/// `filter_lengths` and `iterations`.
#[pyfunction]
#[pyo3(signature = (samples, sample_rate, delta=1e-3, chi=None, max_imfs=50, max_inner_iterations=200,
                    filter_mode="double", filter_family="bump", extension="periodic"))]
#[allow(clippy::too_many_arguments)]
fn decompose<'py>(
    py: Python<'py>,
    samples: Vec<f64>,
    sample_rate: f64,
    delta: f64,
    chi: Option<f64>,
    max_imfs: usize,
    max_inner_iterations: usize,
    filter_mode: &str,
    filter_family: &str,
    extension: &str,
) -> PyResult<Bound<'py, PyDict>> {
    let s = signal(samples, sample_rate)?;
    let defaults = FifConfig::default();
    let cfg = FifConfig {
        delta,
        chi: chi.unwrap_or(defaults.chi),
        max_imfs,
        max_inner_iterations,
        filter_mode: filter_mode.parse().map_err(err)?,
        filter_family: filter_family.parse().map_err(err)?,
        extension: extension.parse().map_err(err)?,
        ..defaults
    };
    let set = py.detach(|| imfogram_core::decompose(&s, &cfg)).map_err(err)?;
    let run = set.run().expect("computed sets carry a run record");
    let d = PyDict::new(py);
    d.set_item("imfs", set.imfs().iter().map(|m| m.samples().to_vec()).collect::<Vec<_>>())?;
    d.set_item("trend", set.trend().samples().to_vec())?;
    d.set_item("stop_reason", stop_name(run.stop_reason))?;
    d.set_item("filter_lengths", run.meta.iter().map(|m| m.filter_length()).collect::<Vec<_>>())?;
    d.set_item("iterations", run.meta.iter().map(|m| m.iterations).collect::<Vec<_>>())?;
    Ok(d)
}

/// L1 Fourier-energy check of `components` against `samples`.
#[pyfunction]
#[pyo3(signature = (samples, sample_rate, components, tolerance=imfogram_core::verify::DEFAULT_TOLERANCE))]
fn check_conservation<'py>(
    py: Python<'py>,
    samples: Vec<f64>,
    sample_rate: f64,
    components: Vec<Vec<f64>>,
    tolerance: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let s = signal(samples, sample_rate)?;
    let parts = components
        .into_iter()
        .map(|c| signal(c, sample_rate))
        .collect::<PyResult<Vec<_>>>()?;
    let r = imfogram_core::check_conservation(&s, &parts, tolerance).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("conserves", r.conserves())?;
    d.set_item("relative_error", r.relative_error)?;
    d.set_item("violations", r.violations.iter().map(|v| (v.bin, v.excess)).collect::<Vec<_>>())?;
    d.set_item("total_signal_energy", r.total_signal_energy)?;
    d.set_item("total_component_energy", r.total_component_energy)?;
    d.set_item("reconstruction_error", r.reconstruction_error)?;
    d.set_item("summary", r.summary_json())?;
    Ok(d)
}

/// IMFogram of `imfs` (the trend is only used for the time grid).
#[pyfunction]
#[pyo3(name = "imfogram", signature = (imfs, sample_rate, window, hop=None, freq_bins=None))]
fn imfogram_matrix<'py>(
    py: Python<'py>,
    imfs: Vec<Vec<f64>>,
    sample_rate: f64,
    window: usize,
    hop: Option<usize>,
    freq_bins: Option<usize>,
) -> PyResult<Bound<'py, PyDict>> {
    let n = imfs.first().map_or(0, |m| m.len());
    let modes = imfs
        .into_iter()
        .map(|m| signal(m, sample_rate))
        .collect::<PyResult<Vec<_>>>()?;
    let set = ImfSet::from_components(modes, signal(vec![0.0; n.max(2)], sample_rate)?).map_err(err)?;
    let windows = AveragingWindows::new(window, hop.unwrap_or(window)).map_err(err)?;
    let m = imfogram_core::imfogram(&set, &windows, freq_bins.unwrap_or(window / 2 + 1)).map_err(err)?;
    tfr_dict(py, &m)
}

/// One-sided amplitude spectrogram over full windows.
#[pyfunction]
#[pyo3(signature = (samples, sample_rate, window, hop=None))]
fn spectrogram<'py>(
    py: Python<'py>,
    samples: Vec<f64>,
    sample_rate: f64,
    window: usize,
    hop: Option<usize>,
) -> PyResult<Bound<'py, PyDict>> {
    let s = signal(samples, sample_rate)?;
    let m = imfogram_core::spectrogram(&s, window, hop.unwrap_or(window)).map_err(err)?;
    tfr_dict(py, &m)
}

#[pyfunction]
fn gen_chirp_pair(n: usize, sample_rate: f64) -> PyResult<Vec<f64>> {
    Ok(signals::gen_chirp_pair(n, sample_rate).map_err(err)?.into_samples())
}

#[pyfunction]
#[pyo3(signature = (n, sample_rate, sigma=0.18, seed=0))]
fn gen_noisy_triple(n: usize, sample_rate: f64, sigma: f64, seed: u64) -> PyResult<Vec<f64>> {
    let params = NoisyTriple { noise_sigma: sigma, seed };
    Ok(signals::gen_noisy_triple(n, sample_rate, params).map_err(err)?.into_samples())
}

#[pyfunction]
#[pyo3(signature = (n, sample_rate, gamma=0.1, x0=1.0, v0=0.0))]
fn gen_duffing_velocity(n: usize, sample_rate: f64, gamma: f64, x0: f64, v0: f64) -> PyResult<Vec<f64>> {
    let params = Duffing { gamma, x0, v0, ..Duffing::default() };
    Ok(signals::gen_duffing_velocity(n, sample_rate, params).map_err(err)?.into_samples())
}

#[pymodule]
fn imfogram(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(decompose, m)?)?;
    m.add_function(wrap_pyfunction!(check_conservation, m)?)?;
    m.add_function(wrap_pyfunction!(imfogram_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(spectrogram, m)?)?;
    m.add_function(wrap_pyfunction!(gen_chirp_pair, m)?)?;
    m.add_function(wrap_pyfunction!(gen_noisy_triple, m)?)?;
    m.add_function(wrap_pyfunction!(gen_duffing_velocity, m)?)?;
    Ok(())
}
