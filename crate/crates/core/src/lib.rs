//! Sub-Nyquist power spectrum sensing from generalized coprime samples.
//!
//! A wideband input is observed through two interleaved sub-Nyquist sampling
//! channels whose periods are coprime multiples of the Nyquist period. The
//! autocorrelation of the masked observation factors into the input
//! autocorrelation times the (precomputable) autocorrelation of the binary
//! sensing vector, so the input power spectrum is recovered with two FFTs,
//! an elementwise division, and a final FFT — no matrix recovery step.
//!
//! Modules:
//! - [`scheme`]: sampler geometry, sensing vectors, masking.
//! - [`autocorr`]: lag windows, FFT-path and brute-force autocorrelation.
//! - [`estimator`]: the five-stage reconstruction pipeline and its coverage
//!   accounting.
//! - [`cache`]: disk cache for sensing autocorrelations.
//! - [`siggen`]: tone/BPSK/LFM generators with calibrated noise and delay.
//! - [`eval`]: peak readout, relative RMSE, Monte Carlo sweeps, timing.
//! - [`io`]: file formats (binary frames, CSV/JSON exports).

pub mod autocorr;
pub mod cache;
pub mod error;
pub mod estimator;
pub mod eval;
pub mod io;
pub mod scheme;
pub mod siggen;

pub use autocorr::{AutocorrKind, AutocorrSeq, LagWindow};
pub use error::{Error, ErrorClass, Result};
pub use estimator::{Estimate, Estimator, PowerSpectrum};
pub use scheme::{apply_sampling, CoprimeScheme, NyquistFrame, SensingVector, SparseCapture};
