//! Autocorrelation sequences over a symmetric lag window.
//!
//! The fast path computes the full-length autocorrelation of a length-`N`
//! vector by zero-padding it to `2N`, taking `IFFT(|FFT(·)|²)/N`, and reading
//! linear lags off the circular result: lag `m ≥ 0` lives at index `m`,
//! lag `m < 0` at index `len + m`. Padding beyond `2N` is allowed (it keeps
//! the correlation linear) and never changes the truncated lags.
//!
//! The normalization is `1/N` for every lag, not `1/(N−|m|)`: the downstream
//! ratio of two sequences normalized the same way restores per-pair
//! averaging, so no extra bias correction is applied anywhere.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// Symmetric lag window `m ∈ [−M+1, M−1]` tied to a target frequency
/// resolution: `M = ceil(fs/2/Δf) + 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LagWindow {
    fs_hz: f64,
    delta_f_hz: f64,
    m: usize,
}

impl LagWindow {
    /// Window from a target frequency resolution.
    pub fn from_delta_f(fs_hz: f64, delta_f_hz: f64) -> Result<Self> {
        if fs_hz.is_nan() || fs_hz <= 0.0 || !fs_hz.is_finite() {
            return Err(Error::NonPositiveParameter {
                name: "fs_hz",
                value: fs_hz,
            });
        }
        if delta_f_hz.is_nan() || delta_f_hz <= 0.0 {
            return Err(Error::NonPositiveParameter {
                name: "delta_f_hz",
                value: delta_f_hz,
            });
        }
        let m = if delta_f_hz.is_infinite() {
            1
        } else {
            (fs_hz / 2.0 / delta_f_hz).ceil() as usize + 1
        };
        Ok(Self {
            fs_hz,
            delta_f_hz,
            m,
        })
    }

    /// Window with an explicit lag count `M`; the equivalent resolution is
    /// `Δf = fs/2/(M−1)`.
    pub fn with_lag_count(fs_hz: f64, m: usize) -> Result<Self> {
        if fs_hz.is_nan() || fs_hz <= 0.0 || !fs_hz.is_finite() {
            return Err(Error::NonPositiveParameter {
                name: "fs_hz",
                value: fs_hz,
            });
        }
        if m == 0 {
            return Err(Error::NonPositiveParameter {
                name: "m",
                value: 0.0,
            });
        }
        let delta_f_hz = if m == 1 {
            f64::INFINITY
        } else {
            fs_hz / 2.0 / (m - 1) as f64
        };
        Ok(Self {
            fs_hz,
            delta_f_hz,
            m,
        })
    }

    /// Default window for a frame of length `n`: `M = min(N/4, 4097)`,
    /// clamped to at least 1. Keeps the window well inside the lags a
    /// two-channel scheme covers.
    pub fn default_for_frame(fs_hz: f64, n: usize) -> Self {
        let m = (n / 4).clamp(1, 4097);
        Self::with_lag_count(fs_hz, m).expect("m >= 1")
    }

    pub fn fs_hz(&self) -> f64 {
        self.fs_hz
    }

    pub fn delta_f_hz(&self) -> f64 {
        self.delta_f_hz
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Number of lags (and of spectrum bins): `2M − 1`.
    pub fn num_lags(&self) -> usize {
        2 * self.m - 1
    }

    /// Spectrum bin width `fs/(2M−1)` in Hz.
    pub fn bin_width_hz(&self) -> f64 {
        self.fs_hz / self.num_lags() as f64
    }
}

/// What an autocorrelation sequence was computed from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AutocorrKind {
    /// Binary sensing vector: real values, `N·r_a[m]` an integer pair count.
    Sensing,
    /// Masked capture `y`.
    Capture,
    /// Reconstructed input sequence `r_x`.
    Input,
}

/// Lag-indexed sequence over `m ∈ [−M+1, M−1]`, stored in ascending-lag
/// order together with its window and the frame length it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct AutocorrSeq {
    values: Vec<Complex64>,
    window: LagWindow,
    n: usize,
    kind: AutocorrKind,
}

impl AutocorrSeq {
    pub(crate) fn from_values(
        values: Vec<Complex64>,
        window: LagWindow,
        n: usize,
        kind: AutocorrKind,
    ) -> Self {
        debug_assert_eq!(values.len(), window.num_lags());
        Self {
            values,
            window,
            n,
            kind,
        }
    }

    /// Values in ascending lag order; index `i` holds lag `i − (M−1)`.
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn window(&self) -> &LagWindow {
        self.window_ref()
    }

    fn window_ref(&self) -> &LagWindow {
        &self.window
    }

    pub fn kind(&self) -> AutocorrKind {
        self.kind
    }

    /// Source frame length `N`.
    pub fn frame_len(&self) -> usize {
        self.n
    }

    pub fn num_lags(&self) -> usize {
        self.values.len()
    }

    /// Value at a signed lag; `None` outside the window.
    pub fn at_lag(&self, lag: isize) -> Option<Complex64> {
        let m = self.window.m() as isize;
        if lag <= -m || lag >= m {
            return None;
        }
        Some(self.values[(lag + m - 1) as usize])
    }

    /// Iterates `(lag, value)` in ascending lag order.
    pub fn iter_lags(&self) -> impl Iterator<Item = (isize, Complex64)> + '_ {
        let m = self.window.m() as isize;
        self.values
            .iter()
            .enumerate()
            .map(move |(i, &v)| (i as isize - (m - 1), v))
    }

    pub(crate) fn same_window(&self, other: &AutocorrSeq) -> bool {
        self.window.m() == other.window.m()
            && self.window.fs_hz() == other.window.fs_hz()
            && self.n == other.n
    }
}

/// Copies a length-`N` vector into the first half of a `2N` buffer, zeros in
/// the second half.
pub fn zero_pad_double(v: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); 2 * v.len()];
    out[..v.len()].copy_from_slice(v);
    out
}

/// Full-length circular autocorrelation `r'[k] = IFFT(|FFT(v)|²)/N` of a
/// zero-padded vector, retaining the source length `N` for lag bookkeeping.
#[derive(Debug, Clone)]
pub struct FullAutocorr {
    values: Vec<Complex64>,
    n: usize,
}

impl FullAutocorr {
    /// Raw circular sequence, `k ∈ [0, len)`.
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Source (pre-padding) vector length `N`.
    pub fn source_len(&self) -> usize {
        self.n
    }

    /// Signed lag `m`, mapping negative lags to the top of the buffer.
    pub fn at_lag(&self, lag: isize) -> Complex64 {
        let len = self.values.len() as isize;
        let k = lag.rem_euclid(len) as usize;
        self.values[k]
    }
}

/// FFT-path autocorrelation of a padded vector whose first `n` entries carry
/// the data. The pad must be at least `n` zeros so the circular correlation
/// equals the linear one.
pub fn fft_autocorr(padded: &[Complex64], n: usize) -> Result<FullAutocorr> {
    let len = padded.len();
    if len < 2 * n {
        return Err(Error::LengthMismatch {
            expected: 2 * n,
            actual: len,
        });
    }
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(len);
    let ifft = planner.plan_fft_inverse(len);
    let mut buf = padded.to_vec();
    fft.process(&mut buf);
    for c in buf.iter_mut() {
        *c = Complex64::new(c.norm_sqr(), 0.0);
    }
    ifft.process(&mut buf);
    // rustfft leaves the inverse unscaled: divide by the FFT length, then by N.
    let scale = 1.0 / (len as f64 * n as f64);
    for c in buf.iter_mut() {
        *c *= scale;
    }
    Ok(FullAutocorr { values: buf, n })
}

/// Convenience composition: pad to exactly `2N`, then `fft_autocorr`.
pub fn fft_autocorr_of(v: &[Complex64]) -> Result<FullAutocorr> {
    fft_autocorr(&zero_pad_double(v), v.len())
}

/// Keeps lags `m ∈ [−M+1, M−1]` of a full-length sequence in ascending order.
pub fn truncate_lags(
    full: &FullAutocorr,
    window: &LagWindow,
    kind: AutocorrKind,
) -> Result<AutocorrSeq> {
    let m = window.m();
    if m > full.source_len() {
        return Err(Error::WindowTooWide {
            m,
            n: full.source_len(),
        });
    }
    let mut values = Vec::with_capacity(window.num_lags());
    for lag in -(m as isize - 1)..=(m as isize - 1) {
        values.push(full.at_lag(lag));
    }
    Ok(AutocorrSeq::from_values(
        values,
        *window,
        full.source_len(),
        kind,
    ))
}

/// Brute-force `O(N·M)` lag sums `r[m] = (1/N)·Σ_n v[n]·conj(v[n−m])`.
///
/// Ground truth for the FFT path; negative lags are summed directly rather
/// than mirrored so the two routes stay independent.
pub fn direct_autocorr_oracle(
    v: &[Complex64],
    window: &LagWindow,
    kind: AutocorrKind,
) -> Result<AutocorrSeq> {
    let n = v.len();
    let m = window.m();
    if m > n {
        return Err(Error::WindowTooWide { m, n });
    }
    let inv_n = 1.0 / n as f64;
    let mut values = Vec::with_capacity(window.num_lags());
    for lag in -(m as isize - 1)..=(m as isize - 1) {
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..n as isize {
            let j = i - lag;
            if j >= 0 && j < n as isize {
                acc += v[i as usize] * v[j as usize].conj();
            }
        }
        values.push(acc * inv_n);
    }
    Ok(AutocorrSeq::from_values(values, *window, n, kind))
}
