//! Power-spectrum reconstruction from a masked capture.
//!
//! Pipeline: zero-pad the capture to `2N`, compute its FFT autocorrelation,
//! truncate to the lag window, divide elementwise by the sensing-vector
//! autocorrelation, and take the magnitude of a `(2M−1)`-point FFT of the
//! resulting lag vector. The sensing autocorrelation depends only on the
//! scheme and the window, so it is computed once (or loaded from a disk
//! cache) and shared across captures.
//!
//! Lags the scheme's difference set misses have a zero pair count; the ratio
//! is undefined there. Those lags are emitted as zero and reported in a
//! [`CoverageMask`]; strict mode errors on the first uncovered lag instead.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::autocorr::{
    fft_autocorr_of, truncate_lags, AutocorrKind, AutocorrSeq, LagWindow,
};
use crate::error::{Error, Result};
use crate::scheme::{apply_sampling, CoprimeScheme, NyquistFrame, SparseCapture};

/// Which lags of the window have at least one coinciding sample pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverageMask {
    covered: Vec<bool>,
    m: usize,
}

impl CoverageMask {
    fn from_sensing(ra: &AutocorrSeq) -> Self {
        // A pair count below half a count unit is FFT round-off on an exact
        // zero: r_a values are multiples of 1/N.
        let threshold = 1.0 / (2.0 * ra.frame_len() as f64);
        Self {
            covered: ra.values().iter().map(|c| c.re >= threshold).collect(),
            m: ra.window().m(),
        }
    }

    pub fn num_lags(&self) -> usize {
        self.covered.len()
    }

    /// Coverage flags in ascending lag order (index `i` holds lag `i − (M−1)`).
    pub fn flags(&self) -> &[bool] {
        &self.covered
    }

    pub fn is_covered(&self, lag: isize) -> bool {
        let m = self.m as isize;
        if lag <= -m || lag >= m {
            return false;
        }
        self.covered[(lag + m - 1) as usize]
    }

    pub fn all_covered(&self) -> bool {
        self.covered.iter().all(|&c| c)
    }

    pub fn num_covered(&self) -> usize {
        self.covered.iter().filter(|&&c| c).count()
    }

    /// Ascending list of lags with no coinciding pair.
    pub fn uncovered_lags(&self) -> Vec<isize> {
        let m = self.m as isize;
        self.covered
            .iter()
            .enumerate()
            .filter(|(_, &c)| !c)
            .map(|(i, _)| i as isize - (m - 1))
            .collect()
    }
}

/// Autocorrelation of the sensing vector over the window, with pair counts
/// snapped to exact integers: `N·r_a[m]` counts the index pairs
/// `{n : n ∈ P, n−m ∈ P}`, so the FFT result is rounded to the nearest
/// multiple of `1/N` and its imaginary part dropped. Snapping makes cached
/// and freshly computed sequences bit-identical.
pub fn sensing_autocorr(scheme: &CoprimeScheme, window: &LagWindow) -> Result<AutocorrSeq> {
    let sv = scheme.sensing_vector();
    let full = fft_autocorr_of(&sv.to_complex())?;
    let raw = truncate_lags(&full, window, AutocorrKind::Sensing)?;
    let n = raw.frame_len() as f64;
    let snapped: Vec<Complex64> = raw
        .values()
        .iter()
        .map(|c| Complex64::new((c.re * n).round() / n, 0.0))
        .collect();
    Ok(AutocorrSeq::from_values(
        snapped,
        *window,
        raw.frame_len(),
        AutocorrKind::Sensing,
    ))
}

/// Elementwise ratio `r_x[m] = r_y[m] / r_a[m]` on covered lags, zero on
/// uncovered ones. Returns the reconstructed sequence and the coverage mask.
pub fn reconstruct_autocorr(
    ry: &AutocorrSeq,
    ra: &AutocorrSeq,
) -> Result<(AutocorrSeq, CoverageMask)> {
    if !ry.same_window(ra) {
        return Err(Error::LagWindowMismatch);
    }
    let coverage = CoverageMask::from_sensing(ra);
    if coverage.num_covered() == 0 {
        return Err(Error::AllLagsUncovered);
    }
    let values: Vec<Complex64> = ry
        .values()
        .iter()
        .zip(ra.values())
        .zip(coverage.flags())
        .map(|((y, a), &cov)| {
            if cov {
                y / a.re
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    let seq = AutocorrSeq::from_values(values, *ry.window(), ry.frame_len(), AutocorrKind::Input);
    Ok((seq, coverage))
}

/// Strict variant: errors on the first uncovered lag instead of zero-filling.
pub fn reconstruct_autocorr_strict(
    ry: &AutocorrSeq,
    ra: &AutocorrSeq,
) -> Result<(AutocorrSeq, CoverageMask)> {
    if !ry.same_window(ra) {
        return Err(Error::LagWindowMismatch);
    }
    let coverage = CoverageMask::from_sensing(ra);
    if let Some(&lag) = coverage.uncovered_lags().first() {
        return Err(Error::UncoveredLag { lag });
    }
    reconstruct_autocorr(ry, ra)
}

/// `(2M−1)`-bin magnitude spectrum; bin `i` maps to frequency `i·fs/(2M−1)`,
/// interpreted modulo `fs`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSpectrum {
    magnitudes: Vec<f64>,
    fs_hz: f64,
}

impl PowerSpectrum {
    /// Wraps precomputed bin magnitudes (e.g. reloaded from an export).
    pub fn from_magnitudes(magnitudes: Vec<f64>, fs_hz: f64) -> Result<Self> {
        if magnitudes.is_empty() {
            return Err(Error::Config("spectrum must have at least one bin".into()));
        }
        if magnitudes.iter().any(|&v| v.is_nan() || v < 0.0) {
            return Err(Error::Config("spectrum magnitudes must be nonnegative".into()));
        }
        if fs_hz.is_nan() || fs_hz <= 0.0 {
            return Err(Error::NonPositiveParameter {
                name: "fs_hz",
                value: fs_hz,
            });
        }
        Ok(Self { magnitudes, fs_hz })
    }

    pub fn magnitudes(&self) -> &[f64] {
        &self.magnitudes
    }

    pub fn fs_hz(&self) -> f64 {
        self.fs_hz
    }

    pub fn num_bins(&self) -> usize {
        self.magnitudes.len()
    }

    pub fn bin_frequency_hz(&self, bin: usize) -> f64 {
        bin as f64 * self.fs_hz / self.num_bins() as f64
    }

    pub fn bin_width_hz(&self) -> f64 {
        self.fs_hz / self.num_bins() as f64
    }

    /// Bin whose center frequency is nearest to `freq_hz` (modulo `fs`).
    pub fn nearest_bin(&self, freq_hz: f64) -> usize {
        let k = self.num_bins() as f64;
        let bin = (freq_hz / self.fs_hz * k).round();
        (bin.rem_euclid(k)) as usize
    }
}

/// Magnitude of the `(2M−1)`-point FFT of the lag vector.
///
/// The lag vector is stored in ascending order; any circular rotation of it
/// only changes the FFT by a unit-modulus phase, so the magnitudes are
/// independent of the ordering convention.
pub fn power_spectrum(rx: &AutocorrSeq) -> PowerSpectrum {
    let mut buf = rx.values().to_vec();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(buf.len()).process(&mut buf);
    PowerSpectrum {
        magnitudes: buf.iter().map(|c| c.norm()).collect(),
        fs_hz: rx.window().fs_hz(),
    }
}

/// Full estimation result: spectrum, reconstructed autocorrelation, and the
/// lag coverage mask.
#[derive(Debug, Clone)]
pub struct Estimate {
    pub spectrum: PowerSpectrum,
    pub autocorr: AutocorrSeq,
    pub coverage: CoverageMask,
}

/// Reusable pipeline for one `(scheme, window)` pair: holds the precomputed
/// sensing autocorrelation so repeated captures pay only the capture-path
/// cost.
#[derive(Debug, Clone)]
pub struct Estimator {
    scheme: CoprimeScheme,
    window: LagWindow,
    sensing: AutocorrSeq,
    strict: bool,
}

impl Estimator {
    pub fn new(scheme: CoprimeScheme, window: LagWindow) -> Result<Self> {
        if window.m() > scheme.frame_len() {
            return Err(Error::WindowTooWide {
                m: window.m(),
                n: scheme.frame_len(),
            });
        }
        let sensing = sensing_autocorr(&scheme, &window)?;
        Ok(Self {
            scheme,
            window,
            sensing,
            strict: false,
        })
    }

    /// Builds the estimator from a previously computed sensing
    /// autocorrelation (e.g. loaded from the disk cache).
    pub fn with_sensing(
        scheme: CoprimeScheme,
        window: LagWindow,
        sensing: AutocorrSeq,
    ) -> Result<Self> {
        if sensing.window().m() != window.m()
            || sensing.frame_len() != scheme.frame_len()
            || sensing.kind() != AutocorrKind::Sensing
        {
            return Err(Error::LagWindowMismatch);
        }
        Ok(Self {
            scheme,
            window,
            sensing,
            strict: false,
        })
    }

    /// Error on uncovered lags instead of zero-filling them.
    pub fn strict(mut self, strict: bool) -> Self {
        self.strict = strict;
        self
    }

    pub fn scheme(&self) -> &CoprimeScheme {
        &self.scheme
    }

    pub fn window(&self) -> &LagWindow {
        &self.window
    }

    pub fn sensing(&self) -> &AutocorrSeq {
        &self.sensing
    }

    /// Pair count `N·r_a[m]` at each window lag, ascending.
    pub fn pair_counts(&self) -> Vec<u64> {
        let n = self.sensing.frame_len() as f64;
        self.sensing
            .values()
            .iter()
            .map(|c| (c.re * n).round() as u64)
            .collect()
    }

    /// Masks a Nyquist frame with the scheme's sensing vector, then estimates.
    pub fn estimate_frame(&self, frame: &NyquistFrame) -> Result<Estimate> {
        let capture = apply_sampling(frame, &self.scheme.sensing_vector(), &self.scheme)?;
        self.estimate_capture(&capture)
    }

    /// Runs the capture path on an already-masked observation.
    pub fn estimate_capture(&self, capture: &SparseCapture) -> Result<Estimate> {
        if capture.len() != self.scheme.frame_len() {
            return Err(Error::LengthMismatch {
                expected: self.scheme.frame_len(),
                actual: capture.len(),
            });
        }
        let full = fft_autocorr_of(capture.samples())?;
        let ry = truncate_lags(&full, &self.window, AutocorrKind::Capture)?;
        let (rx, coverage) = if self.strict {
            reconstruct_autocorr_strict(&ry, &self.sensing)?
        } else {
            reconstruct_autocorr(&ry, &self.sensing)?
        };
        let spectrum = power_spectrum(&rx);
        Ok(Estimate {
            spectrum,
            autocorr: rx,
            coverage,
        })
    }
}

/// One-shot pipeline over a Nyquist frame.
pub fn estimate_frame(
    frame: &NyquistFrame,
    scheme: &CoprimeScheme,
    window: &LagWindow,
) -> Result<Estimate> {
    Estimator::new(*scheme, *window)?.estimate_frame(frame)
}
