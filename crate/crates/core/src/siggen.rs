//! Nyquist-rate test-signal generators: mono-frequency pulses, BPSK, and
//! linear FM sweeps, with calibrated complex white noise and an optional
//! sample delay for model-mismatch experiments.
//!
//! All signals use the complex-exponential (analytic) convention so any band
//! inside `[0, fs)` is representable without aliasing ambiguity; a real
//! signal corresponds to frequencies folded into `[0, fs/2]`. Generators are
//! pure functions of their specs and seeds: identical inputs give identical
//! frames, bit for bit.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::scheme::{CoprimeScheme, NyquistFrame};

fn default_amplitude() -> f64 {
    1.0
}

/// A single complex tone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MpSpec {
    pub freq_hz: f64,
    #[serde(default = "default_amplitude")]
    pub amplitude: f64,
    #[serde(default)]
    pub phase_rad: f64,
}

/// A rectangular-pulse BPSK emitter. Symbol boundaries snap to the nearest
/// sample; the code repeats cyclically when the frame outlasts it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BpskSpec {
    pub carrier_hz: f64,
    pub symbol_rate_hz: f64,
    /// Code bits, 0 or 1; bit 1 flips the carrier phase.
    pub code: Vec<u8>,
    #[serde(default = "default_amplitude")]
    pub amplitude: f64,
    #[serde(default)]
    pub phase_rad: f64,
}

/// A linear frequency sweep from `f_start` over `bandwidth` in `duration`
/// seconds. `duration` defaults to the frame length; a shorter sweep is a
/// pulse followed by silence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LfmSpec {
    pub f_start_hz: f64,
    pub bandwidth_hz: f64,
    #[serde(default)]
    pub duration_s: Option<f64>,
    #[serde(default = "default_amplitude")]
    pub amplitude: f64,
    #[serde(default)]
    pub phase_rad: f64,
}

/// A fully resolved signal component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SignalSpec {
    Mp(MpSpec),
    Bpsk(BpskSpec),
    Lfm(LfmSpec),
}

impl SignalSpec {
    /// Nominal center frequency used for truth matching: the tone frequency,
    /// the BPSK carrier, or the LFM sweep midpoint.
    pub fn center_freq_hz(&self) -> f64 {
        match self {
            SignalSpec::Mp(s) => s.freq_hz,
            SignalSpec::Bpsk(s) => s.carrier_hz,
            SignalSpec::Lfm(s) => s.f_start_hz + s.bandwidth_hz / 2.0,
        }
    }
}

/// Noise calibration: circular complex Gaussian noise scaled so the realized
/// in-frame SNR equals `snr_db` exactly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub snr_db: f64,
    pub seed: u64,
}

fn check_band(freq_hz: f64, fs_hz: f64) -> Result<()> {
    if !freq_hz.is_finite() || freq_hz < 0.0 || freq_hz >= fs_hz {
        return Err(Error::FrequencyOutOfBand { freq_hz, fs_hz });
    }
    Ok(())
}

/// Sum of complex exponentials `x[n] = Σᵢ Aᵢ·exp(j(2π fᵢ n/fs + φᵢ))`,
/// evaluated at `n + delay_samples`.
pub fn gen_mp(
    specs: &[MpSpec],
    scheme: &CoprimeScheme,
    delay_samples: usize,
) -> Result<NyquistFrame> {
    let fs = scheme.fs_hz();
    for s in specs {
        check_band(s.freq_hz, fs)?;
    }
    let n = scheme.frame_len();
    let mut samples = vec![Complex64::new(0.0, 0.0); n];
    for s in specs {
        for (i, out) in samples.iter_mut().enumerate() {
            let t = (i + delay_samples) as f64 / fs;
            *out += Complex64::from_polar(s.amplitude, TAU * (s.freq_hz * t) + s.phase_rad);
        }
    }
    Ok(NyquistFrame::new(samples, fs))
}

/// Carrier phase-flipped by the code. Symbol `k` spans samples
/// `[round(k·fs/R), round((k+1)·fs/R))`.
pub fn gen_bpsk(
    spec: &BpskSpec,
    scheme: &CoprimeScheme,
    delay_samples: usize,
) -> Result<NyquistFrame> {
    let fs = scheme.fs_hz();
    check_band(spec.carrier_hz, fs)?;
    if spec.symbol_rate_hz.is_nan() || spec.symbol_rate_hz <= 0.0 {
        return Err(Error::NonPositiveParameter {
            name: "symbol_rate_hz",
            value: spec.symbol_rate_hz,
        });
    }
    if spec.symbol_rate_hz >= fs {
        return Err(Error::SymbolRateTooHigh {
            symbol_rate_hz: spec.symbol_rate_hz,
            fs_hz: fs,
        });
    }
    if spec.code.is_empty() {
        return Err(Error::Config("BPSK code must not be empty".into()));
    }
    if spec.code.iter().any(|&b| b > 1) {
        return Err(Error::Config("BPSK code bits must be 0 or 1".into()));
    }
    let n = scheme.frame_len();
    let samples_per_symbol = fs / spec.symbol_rate_hz;
    let boundary = |k: u64| (k as f64 * samples_per_symbol).round() as u64;
    // Locate the symbol containing the first (delayed) sample.
    let first = delay_samples as u64;
    let mut k = (first as f64 / samples_per_symbol).floor() as u64;
    while boundary(k + 1) <= first {
        k += 1;
    }
    while k > 0 && boundary(k) > first {
        k -= 1;
    }
    let mut next_boundary = boundary(k + 1);
    let mut samples = Vec::with_capacity(n);
    for i in 0..n {
        let idx = (i + delay_samples) as u64;
        while idx >= next_boundary {
            k += 1;
            next_boundary = boundary(k + 1);
        }
        let bit = spec.code[(k % spec.code.len() as u64) as usize];
        let sign = if bit == 1 { -1.0 } else { 1.0 };
        let t = idx as f64 / fs;
        let c = Complex64::from_polar(
            spec.amplitude * sign,
            TAU * (spec.carrier_hz * t) + spec.phase_rad,
        );
        samples.push(c);
    }
    Ok(NyquistFrame::new(samples, fs))
}

/// `x[n] = A·exp(j(2π(f_start·t + (B/2T)·t²) + φ))` with `t = n/fs`,
/// evaluated at `n + delay_samples`; zero once the sweep duration has passed.
pub fn gen_lfm(
    spec: &LfmSpec,
    scheme: &CoprimeScheme,
    delay_samples: usize,
) -> Result<NyquistFrame> {
    let fs = scheme.fs_hz();
    let n = scheme.frame_len();
    let duration = match spec.duration_s {
        Some(d) if d > 0.0 => d,
        Some(d) => {
            return Err(Error::NonPositiveParameter {
                name: "duration_s",
                value: d,
            })
        }
        None => n as f64 / fs,
    };
    let f_end = spec.f_start_hz + spec.bandwidth_hz;
    let lo = spec.f_start_hz.min(f_end);
    let hi = spec.f_start_hz.max(f_end);
    if !lo.is_finite() || lo < 0.0 || hi > fs {
        return Err(Error::SweepOutOfBand {
            lo_hz: lo,
            hi_hz: hi,
            fs_hz: fs,
        });
    }
    let chirp_rate = spec.bandwidth_hz / (2.0 * duration);
    let mut samples = Vec::with_capacity(n);
    for i in 0..n {
        let t = (i + delay_samples) as f64 / fs;
        if t >= duration && spec.duration_s.is_some() {
            samples.push(Complex64::new(0.0, 0.0));
        } else {
            let phase = TAU * (spec.f_start_hz * t + chirp_rate * t * t) + spec.phase_rad;
            samples.push(Complex64::from_polar(spec.amplitude, phase));
        }
    }
    Ok(NyquistFrame::new(samples, fs))
}

/// Generates one resolved component.
pub fn gen_component(
    spec: &SignalSpec,
    scheme: &CoprimeScheme,
    delay_samples: usize,
) -> Result<NyquistFrame> {
    match spec {
        SignalSpec::Mp(s) => gen_mp(std::slice::from_ref(s), scheme, delay_samples),
        SignalSpec::Bpsk(s) => gen_bpsk(s, scheme, delay_samples),
        SignalSpec::Lfm(s) => gen_lfm(s, scheme, delay_samples),
    }
}

/// Adds circular complex Gaussian noise scaled so the realized SNR over the
/// frame equals `snr_db`. An infinite SNR is the no-noise flag.
pub fn add_awgn(frame: &NyquistFrame, noise: &NoiseSpec) -> Result<NyquistFrame> {
    if noise.snr_db.is_infinite() && noise.snr_db > 0.0 {
        return Ok(frame.clone());
    }
    let signal_power = frame.power();
    if signal_power <= 0.0 {
        return Err(Error::ZeroSignalPower);
    }
    let target_noise_power = signal_power / 10f64.powf(noise.snr_db / 10.0);
    let mut rng = ChaCha8Rng::seed_from_u64(noise.seed);
    let raw: Vec<Complex64> = (0..frame.len())
        .map(|_| {
            Complex64::new(
                rng.sample::<f64, _>(StandardNormal),
                rng.sample::<f64, _>(StandardNormal),
            )
        })
        .collect();
    let raw_power = raw.iter().map(|c| c.norm_sqr()).sum::<f64>() / raw.len() as f64;
    if raw_power <= 0.0 {
        return Err(Error::ZeroSignalPower);
    }
    let scale = (target_noise_power / raw_power).sqrt();
    let samples = frame
        .samples()
        .iter()
        .zip(&raw)
        .map(|(&x, &e)| x + e * scale)
        .collect();
    Ok(NyquistFrame::new(samples, frame.fs_hz()))
}

/// A scenario component: either an explicit spec or a randomized group whose
/// parameters are drawn from the scenario seed at generation time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ComponentSpec {
    Mp(MpSpec),
    Bpsk(BpskSpec),
    Lfm(LfmSpec),
    /// `count` tones uniform in `band_hz`, random phases, pairwise separated
    /// by at least `min_separation_hz`.
    RandomMp {
        count: usize,
        band_hz: (f64, f64),
        #[serde(default)]
        min_separation_hz: f64,
        #[serde(default = "default_amplitude")]
        amplitude: f64,
    },
    /// `count` BPSK emitters with random carriers and codes.
    RandomBpsk {
        count: usize,
        band_hz: (f64, f64),
        symbol_rate_hz: f64,
        #[serde(default = "default_code_len")]
        code_len: usize,
        #[serde(default)]
        min_separation_hz: f64,
        #[serde(default = "default_amplitude")]
        amplitude: f64,
    },
}

fn default_code_len() -> usize {
    64
}

/// Scenario-level noise: the seed defaults to a stream derived from the
/// scenario seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioNoise {
    pub snr_db: f64,
    #[serde(default)]
    pub seed: Option<u64>,
}

/// A reproducible signal scene: components, optional noise, seed, and an
/// optional unknown delay applied to the signal but not the sensing vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub components: Vec<ComponentSpec>,
    #[serde(default)]
    pub noise: Option<ScenarioNoise>,
    pub seed: u64,
    #[serde(default)]
    pub delay_samples: usize,
}

impl Scenario {
    pub fn noise_seed(&self) -> u64 {
        match &self.noise {
            Some(ScenarioNoise { seed: Some(s), .. }) => *s,
            _ => self.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(1),
        }
    }
}

/// A generated frame together with the fully resolved component list (the
/// ground truth for evaluation).
#[derive(Debug, Clone)]
pub struct GeneratedFrame {
    pub frame: NyquistFrame,
    pub components: Vec<SignalSpec>,
}

fn draw_separated(
    rng: &mut ChaCha8Rng,
    band: (f64, f64),
    min_sep: f64,
    taken: &[f64],
    fs: f64,
) -> Result<f64> {
    let (lo, hi) = band;
    if lo.is_nan() || hi.is_nan() || lo >= hi || lo < 0.0 || hi > fs {
        return Err(Error::Config(format!(
            "random band [{lo}, {hi}] invalid for fs {fs}"
        )));
    }
    for _ in 0..10_000 {
        let f = rng.gen_range(lo..hi);
        if taken.iter().all(|&t| (t - f).abs() >= min_sep) {
            return Ok(f);
        }
    }
    Err(Error::Config(
        "could not place random components with the requested separation".into(),
    ))
}

/// Resolves random groups into concrete specs using the scenario seed.
/// Draws happen in component order, so resolution is reproducible.
pub fn resolve_components(
    scenario: &Scenario,
    scheme: &CoprimeScheme,
) -> Result<Vec<SignalSpec>> {
    if scenario.components.is_empty() {
        return Err(Error::Config("scenario has no components".into()));
    }
    let fs = scheme.fs_hz();
    let mut rng = ChaCha8Rng::seed_from_u64(scenario.seed);
    let mut resolved = Vec::new();
    let mut taken: Vec<f64> = Vec::new();
    for comp in &scenario.components {
        match comp {
            ComponentSpec::Mp(s) => {
                taken.push(s.freq_hz);
                resolved.push(SignalSpec::Mp(s.clone()));
            }
            ComponentSpec::Bpsk(s) => {
                taken.push(s.carrier_hz);
                resolved.push(SignalSpec::Bpsk(s.clone()));
            }
            ComponentSpec::Lfm(s) => resolved.push(SignalSpec::Lfm(s.clone())),
            ComponentSpec::RandomMp {
                count,
                band_hz,
                min_separation_hz,
                amplitude,
            } => {
                for _ in 0..*count {
                    let freq_hz =
                        draw_separated(&mut rng, *band_hz, *min_separation_hz, &taken, fs)?;
                    let phase_rad = rng.gen_range(0.0..TAU);
                    taken.push(freq_hz);
                    resolved.push(SignalSpec::Mp(MpSpec {
                        freq_hz,
                        amplitude: *amplitude,
                        phase_rad,
                    }));
                }
            }
            ComponentSpec::RandomBpsk {
                count,
                band_hz,
                symbol_rate_hz,
                code_len,
                min_separation_hz,
                amplitude,
            } => {
                for _ in 0..*count {
                    let carrier_hz =
                        draw_separated(&mut rng, *band_hz, *min_separation_hz, &taken, fs)?;
                    let phase_rad = rng.gen_range(0.0..TAU);
                    let code: Vec<u8> = (0..*code_len.max(&1)).map(|_| rng.gen_range(0..2)).collect();
                    taken.push(carrier_hz);
                    resolved.push(SignalSpec::Bpsk(BpskSpec {
                        carrier_hz,
                        symbol_rate_hz: *symbol_rate_hz,
                        code,
                        amplitude: *amplitude,
                        phase_rad,
                    }));
                }
            }
        }
    }
    Ok(resolved)
}

/// Generates the scenario frame: resolves components, sums them at the
/// scenario delay, and adds calibrated noise.
pub fn generate(scenario: &Scenario, scheme: &CoprimeScheme) -> Result<GeneratedFrame> {
    let components = resolve_components(scenario, scheme)?;
    let n = scheme.frame_len();
    let mut samples = vec![Complex64::new(0.0, 0.0); n];
    for spec in &components {
        let part = gen_component(spec, scheme, scenario.delay_samples)?;
        for (acc, s) in samples.iter_mut().zip(part.samples()) {
            *acc += s;
        }
    }
    let mut frame = NyquistFrame::new(samples, scheme.fs_hz());
    if let Some(noise) = &scenario.noise {
        frame = add_awgn(
            &frame,
            &NoiseSpec {
                snr_db: noise.snr_db,
                seed: scenario.noise_seed(),
            },
        )?;
    }
    Ok(GeneratedFrame { frame, components })
}
