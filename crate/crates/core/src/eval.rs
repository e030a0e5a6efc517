//! Peak readout, relative-RMSE scoring, Monte Carlo sweeps, and timing
//! benchmarks.
//!
//! Frequency estimates are read off the spectrum as strict local maxima on
//! the circular bin axis. A trial's error matches every true frequency to
//! its nearest estimate (missed detections are charged the worst-case error
//! `fs/2`), and the relative RMSE normalizes the root mean square of those
//! errors by the Nyquist rate.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::autocorr::{
    direct_autocorr_oracle, fft_autocorr_of, truncate_lags, AutocorrKind, LagWindow,
};
use crate::error::{Error, Result};
use crate::estimator::{Estimator, PowerSpectrum};
use crate::scheme::CoprimeScheme;
use crate::siggen::{generate, Scenario};
use num_complex::Complex64;

/// One detected spectral peak.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub bin: usize,
    pub frequency_hz: f64,
    pub magnitude: f64,
}

/// Detected peaks, strongest first, plus the threshold that was applied.
#[derive(Debug, Clone, PartialEq)]
pub struct PeakSet {
    pub peaks: Vec<Peak>,
    pub threshold: f64,
}

impl PeakSet {
    pub fn frequencies_hz(&self) -> Vec<f64> {
        self.peaks.iter().map(|p| p.frequency_hz).collect()
    }
}

/// Detection mode: all peaks above the noise threshold, or the strongest
/// fixed count (no threshold filter, so low-SNR trials still report).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PeakCount {
    Auto,
    Fixed(usize),
}

fn median_of(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n == 0 {
        return 0.0;
    }
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

/// Strict local maxima on the circular spectrum above
/// `median + 6·MAD`; ties break toward the lower bin index.
pub fn detect_peaks(spectrum: &PowerSpectrum, mode: PeakCount) -> PeakSet {
    let mags = spectrum.magnitudes();
    let k = mags.len();
    let mut sorted = mags.to_vec();
    sorted.sort_by(f64::total_cmp);
    let median = median_of(&sorted);
    let mut deviations: Vec<f64> = mags.iter().map(|&v| (v - median).abs()).collect();
    deviations.sort_by(f64::total_cmp);
    let mad = median_of(&deviations);
    let threshold = median + 6.0 * mad;

    let mut candidates: Vec<Peak> = Vec::new();
    if k == 1 {
        candidates.push(Peak {
            bin: 0,
            frequency_hz: spectrum.bin_frequency_hz(0),
            magnitude: mags[0],
        });
    } else {
        for i in 0..k {
            let prev = mags[(i + k - 1) % k];
            let next = mags[(i + 1) % k];
            if mags[i] > prev && mags[i] > next {
                candidates.push(Peak {
                    bin: i,
                    frequency_hz: spectrum.bin_frequency_hz(i),
                    magnitude: mags[i],
                });
            }
        }
    }
    // Strongest first, lower bin on ties.
    candidates.sort_by(|a, b| b.magnitude.total_cmp(&a.magnitude).then(a.bin.cmp(&b.bin)));
    let peaks = match mode {
        PeakCount::Auto => candidates
            .into_iter()
            .filter(|p| p.magnitude > threshold)
            .collect(),
        PeakCount::Fixed(count) => candidates.into_iter().take(count).collect(),
    };
    PeakSet { peaks, threshold }
}

/// Occupied-band readout for broadband signals: smooths the spectrum with a
/// circular moving average, thresholds at the geometric mean of a robust
/// floor (10th percentile) and the smoothed peak, bridges gaps up to
/// `bridge_bins`, and returns the frequency edges of the longest contiguous
/// run. A run that wraps past `fs` reports `hi > fs`.
pub fn occupied_band(
    spectrum: &PowerSpectrum,
    smooth_bins: usize,
    bridge_bins: usize,
) -> Option<(f64, f64)> {
    let mags = spectrum.magnitudes();
    let k = mags.len();
    let half = smooth_bins / 2;
    let smoothed: Vec<f64> = (0..k)
        .map(|i| {
            let mut acc = 0.0;
            let w = 2 * half + 1;
            for d in 0..w {
                acc += mags[(i + k + d - half) % k];
            }
            acc / w as f64
        })
        .collect();
    let mut sorted = smoothed.clone();
    sorted.sort_by(f64::total_cmp);
    let floor = sorted[k / 10];
    let peak = sorted[k - 1];
    if peak <= 0.0 {
        return None;
    }
    let threshold = (floor.max(peak * 1e-12) * peak).sqrt();
    let above: Vec<bool> = smoothed.iter().map(|&v| v > threshold).collect();
    if above.iter().all(|&b| !b) {
        return None;
    }
    // Longest circular run of occupied bins, merging across short gaps.
    let mut best: Option<(usize, usize)> = None; // (start, len)
    let mut i = 0;
    while i < 2 * k {
        if !above[i % k] {
            i += 1;
            continue;
        }
        let start = i;
        let mut end = i; // last occupied bin of the merged run
        let mut j = i;
        let mut gap = 0;
        while j < 2 * k && gap <= bridge_bins {
            if above[j % k] {
                end = j;
                gap = 0;
            } else {
                gap += 1;
            }
            j += 1;
        }
        let len = (end - start + 1).min(k);
        if best.map_or(true, |(_, blen)| len > blen) {
            best = Some((start, len));
        }
        i = end + 1;
        if start >= k {
            break;
        }
    }
    let (start, len) = best?;
    let bw = spectrum.bin_width_hz();
    let lo = spectrum.bin_frequency_hz(start % k);
    Some((lo, lo + (len - 1) as f64 * bw))
}

/// One Monte Carlo trial: truths, estimates, matched squared errors, and the
/// wall time of the estimation pipeline.
#[derive(Debug, Clone)]
pub struct TrialResult {
    pub trial: usize,
    pub true_freqs_hz: Vec<f64>,
    pub est_freqs_hz: Vec<f64>,
    pub squared_errors: Vec<f64>,
    pub wall: Duration,
}

/// Per-truth squared error under nearest-neighbor matching, with each error
/// capped at `fs/2` (the charge for a missed detection).
pub fn match_squared_errors(true_freqs: &[f64], est_freqs: &[f64], fs_hz: f64) -> Vec<f64> {
    let cap = fs_hz / 2.0;
    true_freqs
        .iter()
        .map(|&f| {
            let err = est_freqs
                .iter()
                .map(|&e| (e - f).abs())
                .fold(f64::INFINITY, f64::min)
                .min(cap);
            err * err
        })
        .collect()
}

/// Relative RMSE over a trial set:
/// `(1/fs)·sqrt(Σ squared errors / total component count)`.
///
/// Squared errors are accumulated in sorted order, so the result is exactly
/// invariant to the ordering of trials and of components within a trial.
pub fn relative_rmse(trials: &[TrialResult], fs_hz: f64) -> Result<f64> {
    let mut all: Vec<f64> = trials
        .iter()
        .flat_map(|t| t.squared_errors.iter().copied())
        .collect();
    if all.is_empty() {
        return Err(Error::EmptyTrials);
    }
    all.sort_by(f64::total_cmp);
    let mean = all.iter().sum::<f64>() / all.len() as f64;
    Ok(mean.sqrt() / fs_hz)
}

/// Sweep axis for the Monte Carlo harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    SnrDb,
    P,
    DelaySamples,
}

/// Monte Carlo sweep description: which knob to vary, its grid, trials per
/// point, and the scheme/scenario template everything else is copied from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub axis: SweepAxis,
    pub grid: Vec<f64>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    pub scheme: CoprimeScheme,
    pub scenario: Scenario,
    #[serde(default)]
    pub delta_f_hz: Option<f64>,
    pub base_seed: u64,
}

fn default_trials() -> usize {
    100
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grid.is_empty() {
            return Err(Error::Config("sweep grid is empty".into()));
        }
        if self.trials == 0 {
            return Err(Error::Config("sweep needs at least one trial".into()));
        }
        if matches!(self.axis, SweepAxis::P | SweepAxis::DelaySamples) {
            for &v in &self.grid {
                if v < 0.0 || v.fract() != 0.0 {
                    return Err(Error::Config(format!(
                        "axis grid value {v} must be a nonnegative integer"
                    )));
                }
            }
        }
        CoprimeScheme::new(
            self.scheme.r0(),
            self.scheme.r1(),
            self.scheme.p(),
            self.scheme.q(),
            self.scheme.fs_hz(),
        )?;
        Ok(())
    }
}

/// One row of a sweep table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub axis_value: f64,
    pub rmse: f64,
    pub mean_time_s: f64,
    pub trials: usize,
    pub failed_trials: usize,
}

/// Sweep result: one row per grid point, in grid order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub axis: SweepAxis,
    pub rows: Vec<SweepRow>,
}

fn window_for(scheme: &CoprimeScheme, delta_f_hz: Option<f64>) -> Result<LagWindow> {
    match delta_f_hz {
        Some(df) => LagWindow::from_delta_f(scheme.fs_hz(), df),
        None => Ok(LagWindow::default_for_frame(
            scheme.fs_hz(),
            scheme.frame_len(),
        )),
    }
}

fn run_trial(
    estimator: &Estimator,
    scenario: &Scenario,
    trial: usize,
) -> Result<TrialResult> {
    let generated = generate(scenario, estimator.scheme())?;
    let true_freqs: Vec<f64> = generated
        .components
        .iter()
        .map(|c| c.center_freq_hz())
        .collect();
    let start = Instant::now();
    let estimate = estimator.estimate_frame(&generated.frame)?;
    let wall = start.elapsed();
    let peaks = detect_peaks(&estimate.spectrum, PeakCount::Fixed(true_freqs.len()));
    let est_freqs = peaks.frequencies_hz();
    let squared_errors =
        match_squared_errors(&true_freqs, &est_freqs, estimator.scheme().fs_hz());
    Ok(TrialResult {
        trial,
        true_freqs_hz: true_freqs,
        est_freqs_hz: est_freqs,
        squared_errors,
        wall,
    })
}

/// Runs the sweep: per grid point, `trials` trials seeded `base_seed + index`
/// run the full generate → mask → estimate → detect pipeline in parallel.
/// Per-trial failures are recorded; a point fails only if all its trials do.
pub fn monte_carlo_sweep(config: &SweepConfig) -> Result<SweepTable> {
    config.validate()?;
    let mut rows = Vec::with_capacity(config.grid.len());
    for &axis_value in &config.grid {
        let mut scheme = config.scheme;
        let mut scenario = config.scenario.clone();
        match config.axis {
            SweepAxis::SnrDb => {
                if let Some(noise) = scenario.noise.as_mut() {
                    noise.snr_db = axis_value;
                } else {
                    scenario.noise = Some(crate::siggen::ScenarioNoise {
                        snr_db: axis_value,
                        seed: None,
                    });
                }
            }
            SweepAxis::P => {
                scheme = scheme.with_p(axis_value as usize)?;
            }
            SweepAxis::DelaySamples => {
                scenario.delay_samples = axis_value as usize;
            }
        }
        let window = window_for(&scheme, config.delta_f_hz)?;
        let estimator = Estimator::new(scheme, window)?;
        let outcomes: Vec<Result<TrialResult>> = (0..config.trials)
            .into_par_iter()
            .map(|t| {
                let mut trial_scenario = scenario.clone();
                trial_scenario.seed = config.base_seed.wrapping_add(t as u64);
                run_trial(&estimator, &trial_scenario, t)
            })
            .collect();
        let mut ok = Vec::new();
        let mut failed = 0usize;
        for outcome in outcomes {
            match outcome {
                Ok(trial) => ok.push(trial),
                Err(_) => failed += 1,
            }
        }
        if ok.is_empty() {
            return Err(Error::Config(format!(
                "all {} trials failed at axis value {axis_value}",
                config.trials
            )));
        }
        let rmse = relative_rmse(&ok, scheme.fs_hz())?;
        let mean_time_s =
            ok.iter().map(|t| t.wall.as_secs_f64()).sum::<f64>() / ok.len() as f64;
        rows.push(SweepRow {
            axis_value,
            rmse,
            mean_time_s,
            trials: ok.len(),
            failed_trials: failed,
        });
    }
    Ok(SweepTable {
        axis: config.axis,
        rows,
    })
}

/// One row of the timing benchmark.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub p: usize,
    pub n: usize,
    pub m: usize,
    pub fast_time_s: f64,
    pub oracle_time_s: f64,
}

/// Timing table for the FFT path versus the direct lag-sum oracle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchTable {
    pub rows: Vec<BenchRow>,
}

fn median_time(mut samples: Vec<f64>) -> f64 {
    samples.sort_by(f64::total_cmp);
    median_of(&samples)
}

/// Median-of-`reps` wall times of the fast autocorrelation path and the
/// direct oracle on identical random captures, sequentially, one row per
/// `p`. The lag window is `M = N/10` unless overridden.
pub fn time_benchmark(
    scheme_template: &CoprimeScheme,
    p_grid: &[usize],
    m_for_n: impl Fn(usize) -> usize,
    reps: usize,
) -> Result<BenchTable> {
    if p_grid.is_empty() {
        return Err(Error::Config("timing grid is empty".into()));
    }
    let reps = reps.max(1);
    let mut rows = Vec::with_capacity(p_grid.len());
    for &p in p_grid {
        let scheme = scheme_template.with_p(p)?;
        let n = scheme.frame_len();
        let m = m_for_n(n).clamp(1, n);
        let window = LagWindow::with_lag_count(scheme.fs_hz(), m)?;
        let mut rng = ChaCha8Rng::seed_from_u64(p as u64);
        let v: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let mut fast_times = Vec::with_capacity(reps);
        let mut oracle_times = Vec::with_capacity(reps);
        for _ in 0..reps {
            let start = Instant::now();
            let full = fft_autocorr_of(&v)?;
            let fast = truncate_lags(&full, &window, AutocorrKind::Capture)?;
            fast_times.push(start.elapsed().as_secs_f64());
            std::hint::black_box(&fast);

            let start = Instant::now();
            let slow = direct_autocorr_oracle(&v, &window, AutocorrKind::Capture)?;
            oracle_times.push(start.elapsed().as_secs_f64());
            std::hint::black_box(&slow);
        }
        rows.push(BenchRow {
            p,
            n,
            m,
            fast_time_s: median_time(fast_times),
            oracle_time_s: median_time(oracle_times),
        });
    }
    Ok(BenchTable { rows })
}

/// Least-squares slope of `log(time)` against `log(p)`.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(x, y) in points {
        let (lx, ly) = (x.ln(), y.ln());
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}
