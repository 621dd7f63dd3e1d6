//! Fast Iterative Filtering, L1 Fourier-energy verification and the
//! IMFogram time-frequency representation.
//!
//! ```
//! use imfogram_core::{decompose, check_imf_set, FifConfig, Signal};
//!
//! let rate = 256.0;
//! let x: Vec<f64> = (0..1024)
//!     .map(|j| {
//!         let t = j as f64 / rate;
//!         (2.0 * std::f64::consts::PI * 20.0 * t).sin() + 0.5 * (2.0 * std::f64::consts::PI * 2.0 * t).sin()
//!     })
//!     .collect();
//! let s = Signal::new(x, rate).unwrap();
//! let set = decompose(&s, &FifConfig::default()).unwrap();
//! let report = check_imf_set(&s, &set, 1e-10).unwrap();
//! assert!(report.conserves());
//! ```

pub mod error;
pub mod fif;
pub mod filters;
pub mod io;
pub mod signals;
pub mod spectral;
pub mod tfr;
pub mod verify;

pub use error::{Error, Result};
pub use fif::{
    decompose, reconstruct, ExtensionMode, FifConfig, FilterMode, FilterSchedule, ImfMeta, ImfSet,
    LengthRule, RunRecord, StopReason,
};
pub use filters::{Filter, FilterFamily};
pub use spectral::{dft, idft, l1_fourier_energy, norm2, Signal, Spectrum};
pub use tfr::{imfogram, periodogram, spectrogram, AveragingWindows, TfrMatrix};
pub use verify::{check_conservation, check_imf_set, record_multipliers, ConservationReport, Multipliers};
