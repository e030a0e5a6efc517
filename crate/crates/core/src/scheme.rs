//! Generalized coprime sampling geometry.
//!
//! Two uniform sub-Nyquist channels sample the Nyquist grid with periods
//! `r0·Ts` and `r1·Ts` where `gcd(r0, r1) = 1`. The basic period `r0·r1` is
//! repeated `p` times, and the second channel is offset by `q` periods so the
//! two channels do not overlap in time. The union of the two channel grids is
//! the sample position set `P`; the sensing vector is its binary indicator on
//! the length-`N` Nyquist frame, `N = (p+q)·r0·r1`.

use std::collections::BTreeSet;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Sampler geometry: undersampling factors, repetition and offset factors,
/// and the Nyquist rate they are referenced to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoprimeScheme {
    r0: usize,
    r1: usize,
    p: usize,
    q: usize,
    fs_hz: f64,
}

impl CoprimeScheme {
    /// Validates the parameters and returns the scheme.
    ///
    /// Requires `0 < r0 < r1`, `gcd(r0, r1) = 1`, `p ≥ 1`, `q ≥ 1`, `fs > 0`.
    pub fn new(r0: usize, r1: usize, p: usize, q: usize, fs_hz: f64) -> Result<Self> {
        for (name, value) in [("r0", r0), ("r1", r1), ("p", p), ("q", q)] {
            if value == 0 {
                return Err(Error::NonPositiveParameter { name, value: 0.0 });
            }
        }
        if fs_hz.is_nan() || fs_hz <= 0.0 || !fs_hz.is_finite() {
            return Err(Error::NonPositiveParameter {
                name: "fs_hz",
                value: fs_hz,
            });
        }
        if r0 >= r1 {
            return Err(Error::OrderViolation { r0, r1 });
        }
        if gcd(r0, r1) != 1 {
            return Err(Error::NotCoprime { r0, r1 });
        }
        // N = (p+q)·r0·r1 must be representable.
        p.checked_add(q)
            .and_then(|s| s.checked_mul(r0))
            .and_then(|s| s.checked_mul(r1))
            .ok_or(Error::ParameterOverflow)?;
        Ok(Self { r0, r1, p, q, fs_hz })
    }

    pub fn r0(&self) -> usize {
        self.r0
    }

    pub fn r1(&self) -> usize {
        self.r1
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    /// Nyquist sample rate in Hz.
    pub fn fs_hz(&self) -> f64 {
        self.fs_hz
    }

    /// Nyquist sampling interval in seconds.
    pub fn ts_s(&self) -> f64 {
        1.0 / self.fs_hz
    }

    /// Frame length `N = (p+q)·r0·r1`, the smallest round multiple of the
    /// basic period that strictly exceeds every sample position.
    pub fn frame_len(&self) -> usize {
        (self.p + self.q) * self.r0 * self.r1
    }

    /// Returns the same scheme with a different repetition factor `p`.
    pub fn with_p(&self, p: usize) -> Result<Self> {
        Self::new(self.r0, self.r1, p, self.q, self.fs_hz)
    }

    /// Per-channel sample positions before merging: channel 0 lies on
    /// `r0·l0 + k·r0·r1`, channel 1 on `r1·l1 + (k+q)·r0·r1`, with
    /// `l0 ∈ [0, r1)`, `l1 ∈ [0, r0)`, `k ∈ [0, p)`.
    pub fn channel_positions(&self) -> (Vec<usize>, Vec<usize>) {
        let period = self.r0 * self.r1;
        let mut ch0 = Vec::with_capacity(self.p * self.r1);
        let mut ch1 = Vec::with_capacity(self.p * self.r0);
        for k in 0..self.p {
            for l0 in 0..self.r1 {
                ch0.push(self.r0 * l0 + k * period);
            }
            for l1 in 0..self.r0 {
                ch1.push(self.r1 * l1 + (k + self.q) * period);
            }
        }
        ch0.sort_unstable();
        ch1.sort_unstable();
        (ch0, ch1)
    }

    /// Merged, ascending sample position set `P`. Positions where the two
    /// channels coincide appear once: the physical sample exists once.
    pub fn sample_positions(&self) -> Vec<usize> {
        let (ch0, ch1) = self.channel_positions();
        let set: BTreeSet<usize> = ch0.into_iter().chain(ch1).collect();
        set.into_iter().collect()
    }

    /// Binary sensing vector of length `N` with ones exactly on `P`.
    pub fn sensing_vector(&self) -> SensingVector {
        let positions = self.sample_positions();
        SensingVector::from_positions(self.frame_len(), positions)
            .expect("positions of a valid scheme lie inside the frame")
    }
}

/// Binary mask marking which Nyquist-grid instants are physically sampled.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SensingVector {
    a: Vec<u8>,
    positions: Vec<usize>,
}

impl SensingVector {
    /// Builds a mask of length `n` from a position set. Positions are sorted
    /// and deduplicated; any position at or beyond `n` is rejected.
    pub fn from_positions(n: usize, positions: Vec<usize>) -> Result<Self> {
        let set: BTreeSet<usize> = positions.into_iter().collect();
        if let Some(&max) = set.iter().next_back() {
            if max >= n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    actual: max + 1,
                });
            }
        }
        let mut a = vec![0u8; n];
        for &pos in &set {
            a[pos] = 1;
        }
        Ok(Self {
            a,
            positions: set.into_iter().collect(),
        })
    }

    /// Degenerate full-rate mask (every instant sampled). Masking with it is
    /// the identity; useful for testing and as a Nyquist reference.
    pub fn full(n: usize) -> Self {
        Self {
            a: vec![1u8; n],
            positions: (0..n).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    /// Mask entries, 0 or 1.
    pub fn mask(&self) -> &[u8] {
        &self.a
    }

    /// Ascending sample positions (the support of the mask).
    pub fn positions(&self) -> &[usize] {
        &self.positions
    }

    /// Number of physical samples |P|.
    pub fn num_samples(&self) -> usize {
        self.positions.len()
    }

    /// Mask as a complex vector, ready for the FFT path.
    pub fn to_complex(&self) -> Vec<Complex64> {
        self.a
            .iter()
            .map(|&b| Complex64::new(b as f64, 0.0))
            .collect()
    }
}

/// A length-`N` complex sample vector at the Nyquist rate.
#[derive(Debug, Clone, PartialEq)]
pub struct NyquistFrame {
    samples: Vec<Complex64>,
    fs_hz: f64,
}

impl NyquistFrame {
    pub fn new(samples: Vec<Complex64>, fs_hz: f64) -> Self {
        Self { samples, fs_hz }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn fs_hz(&self) -> f64 {
        self.fs_hz
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    /// Mean squared magnitude of the frame.
    pub fn power(&self) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        self.samples.iter().map(|s| s.norm_sqr()).sum::<f64>() / self.samples.len() as f64
    }
}

/// The masked observation: `y[n] = x[n]` on `P`, zero elsewhere.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseCapture {
    samples: Vec<Complex64>,
    scheme: CoprimeScheme,
}

impl SparseCapture {
    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn scheme(&self) -> &CoprimeScheme {
        &self.scheme
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// Elementwise product of the frame with the sensing mask.
pub fn apply_sampling(
    frame: &NyquistFrame,
    sv: &SensingVector,
    scheme: &CoprimeScheme,
) -> Result<SparseCapture> {
    if frame.len() != sv.len() {
        return Err(Error::LengthMismatch {
            expected: sv.len(),
            actual: frame.len(),
        });
    }
    let samples = frame
        .samples()
        .iter()
        .zip(sv.mask())
        .map(|(&x, &a)| if a == 1 { x } else { Complex64::new(0.0, 0.0) })
        .collect();
    Ok(SparseCapture {
        samples,
        scheme: *scheme,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn scheme(r0: usize, r1: usize, p: usize, q: usize) -> CoprimeScheme {
        CoprimeScheme::new(r0, r1, p, q, 1.0).unwrap()
    }

    /// Independent double-loop enumeration of the two channel supports.
    fn brute_positions(r0: usize, r1: usize, p: usize, q: usize) -> Vec<usize> {
        let mut set = BTreeSet::new();
        for k in 0..p {
            for l0 in 0..r1 {
                set.insert(r0 * l0 + k * r0 * r1);
            }
            for l1 in 0..r0 {
                set.insert(r1 * l1 + (k + q) * r0 * r1);
            }
        }
        set.into_iter().collect()
    }

    #[test]
    fn validate_paper_scale_scheme() {
        let s = CoprimeScheme::new(3, 4, 3000, 1, 32e9).unwrap();
        assert_eq!(s.frame_len(), 3001 * 12);
        assert_eq!(s.frame_len(), 36012);
    }

    #[test]
    fn validate_rejects_common_divisor() {
        let err = CoprimeScheme::new(2, 4, 1, 1, 1.0).unwrap_err();
        assert!(matches!(err, Error::NotCoprime { r0: 2, r1: 4 }));
    }

    #[test]
    fn validate_rejects_misordered_factors() {
        let err = CoprimeScheme::new(4, 3, 1, 1, 1.0).unwrap_err();
        assert!(matches!(err, Error::OrderViolation { .. }));
        let err = CoprimeScheme::new(3, 3, 1, 1, 1.0).unwrap_err();
        assert!(matches!(err, Error::OrderViolation { .. }));
    }

    #[test]
    fn validate_rejects_zero_parameters() {
        assert!(matches!(
            CoprimeScheme::new(0, 3, 1, 1, 1.0),
            Err(Error::NonPositiveParameter { name: "r0", .. })
        ));
        assert!(matches!(
            CoprimeScheme::new(2, 3, 0, 1, 1.0),
            Err(Error::NonPositiveParameter { name: "p", .. })
        ));
        assert!(matches!(
            CoprimeScheme::new(2, 3, 1, 0, 1.0),
            Err(Error::NonPositiveParameter { name: "q", .. })
        ));
        assert!(matches!(
            CoprimeScheme::new(2, 3, 1, 1, 0.0),
            Err(Error::NonPositiveParameter { name: "fs_hz", .. })
        ));
        assert!(matches!(
            CoprimeScheme::new(2, 3, 1, 1, f64::NAN),
            Err(Error::NonPositiveParameter { name: "fs_hz", .. })
        ));
    }

    #[test]
    fn smallest_scheme_covers_position_set() {
        let s = scheme(2, 3, 1, 1);
        assert_eq!(s.frame_len(), 12);
        let pos = s.sample_positions();
        assert_eq!(*pos.last().unwrap(), 9);
        assert!(*pos.last().unwrap() < s.frame_len());
    }

    #[test]
    fn positions_2_3_1_1() {
        let s = scheme(2, 3, 1, 1);
        assert_eq!(s.sample_positions(), vec![0, 2, 4, 6, 9]);
        // Cardinality bound is tight here: no overlap between channels.
        assert_eq!(s.sample_positions().len(), s.p() * (s.r0() + s.r1()));
    }

    #[test]
    fn positions_match_brute_enumeration() {
        for &(r0, r1, p, q) in &[
            (3usize, 4usize, 2usize, 1usize),
            (2, 3, 1, 1),
            (2, 5, 3, 2),
            (3, 7, 4, 1),
            (1, 4, 2, 2),
            (4, 9, 5, 1),
        ] {
            let s = scheme(r0, r1, p, q);
            assert_eq!(
                s.sample_positions(),
                brute_positions(r0, r1, p, q),
                "scheme ({r0},{r1},{p},{q})"
            );
        }
    }

    #[test]
    fn position_set_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        let coprime_pairs = [(2, 3), (3, 4), (2, 5), (4, 5), (3, 7), (5, 6), (1, 3)];
        for _ in 0..50 {
            let (r0, r1) = coprime_pairs[rng.gen_range(0..coprime_pairs.len())];
            let p = rng.gen_range(1..6);
            let q = rng.gen_range(1..4);
            let s = scheme(r0, r1, p, q);
            let pos = s.sample_positions();
            assert_eq!(pos[0], 0);
            assert!(pos.len() <= p * (r0 + r1));
            assert!(*pos.last().unwrap() < s.frame_len());
            let (ch0, ch1) = s.channel_positions();
            assert!(ch0.iter().all(|&i| i % r0 == 0));
            assert!(ch1.iter().all(|&i| i % r1 == 0));
        }
    }

    #[test]
    fn sensing_vector_2_3_1_1() {
        let s = scheme(2, 3, 1, 1);
        let sv = s.sensing_vector();
        assert_eq!(sv.mask(), &[1, 0, 1, 0, 1, 0, 1, 0, 0, 1, 0, 0]);
        assert_eq!(
            sv.mask().iter().map(|&b| b as usize).sum::<usize>(),
            sv.num_samples()
        );
    }

    #[test]
    fn sensing_vector_starts_at_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let coprime_pairs = [(2, 3), (3, 4), (2, 5), (5, 7), (1, 2)];
        for _ in 0..20 {
            let (r0, r1) = coprime_pairs[rng.gen_range(0..coprime_pairs.len())];
            let s = scheme(r0, r1, rng.gen_range(1..5), rng.gen_range(1..4));
            let sv = s.sensing_vector();
            assert_eq!(sv.mask()[0], 1);
            assert!(sv.mask().iter().all(|&b| b <= 1));
            let support: Vec<usize> = sv
                .mask()
                .iter()
                .enumerate()
                .filter(|(_, &b)| b == 1)
                .map(|(i, _)| i)
                .collect();
            assert_eq!(support, sv.positions());
        }
    }

    #[test]
    fn masking_all_ones_yields_sensing_vector() {
        let s = scheme(2, 3, 1, 1);
        let sv = s.sensing_vector();
        let frame = NyquistFrame::new(vec![Complex64::new(1.0, 0.0); s.frame_len()], s.fs_hz());
        let cap = apply_sampling(&frame, &sv, &s).unwrap();
        let expected: Vec<Complex64> = sv.to_complex();
        assert_eq!(cap.samples(), expected.as_slice());
    }

    #[test]
    fn full_mask_is_identity() {
        let s = scheme(2, 3, 1, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let samples: Vec<Complex64> = (0..s.frame_len())
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let frame = NyquistFrame::new(samples.clone(), s.fs_hz());
        let cap = apply_sampling(&frame, &SensingVector::full(s.frame_len()), &s).unwrap();
        assert_eq!(cap.samples(), samples.as_slice());
    }

    #[test]
    fn masking_matches_per_channel_outputs() {
        let s = scheme(2, 3, 1, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let samples: Vec<Complex64> = (0..s.frame_len())
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let frame = NyquistFrame::new(samples.clone(), s.fs_hz());
        let cap = apply_sampling(&frame, &s.sensing_vector(), &s).unwrap();
        // y0[n0] = x[r0·n0] and y1[n1] = x[r1·n1 + q·r0·r1] on the channel grids.
        let (ch0, ch1) = s.channel_positions();
        for &i in ch0.iter().chain(ch1.iter()) {
            assert_eq!(cap.samples()[i], samples[i]);
        }
        for (i, &y) in cap.samples().iter().enumerate() {
            if !ch0.contains(&i) && !ch1.contains(&i) {
                assert_eq!(y, Complex64::new(0.0, 0.0));
            }
        }
    }

    #[test]
    fn masking_is_idempotent() {
        let s = scheme(3, 4, 2, 1);
        let sv = s.sensing_vector();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let samples: Vec<Complex64> = (0..s.frame_len())
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let frame = NyquistFrame::new(samples, s.fs_hz());
        let once = apply_sampling(&frame, &sv, &s).unwrap();
        let twice = apply_sampling(
            &NyquistFrame::new(once.samples().to_vec(), s.fs_hz()),
            &sv,
            &s,
        )
        .unwrap();
        assert_eq!(once.samples(), twice.samples());
    }

    #[test]
    fn masking_rejects_length_mismatch() {
        let s = scheme(2, 3, 1, 1);
        let frame = NyquistFrame::new(vec![Complex64::new(1.0, 0.0); 5], s.fs_hz());
        let err = apply_sampling(&frame, &s.sensing_vector(), &s).unwrap_err();
        assert!(matches!(err, Error::LengthMismatch { .. }));
    }

    #[test]
    fn scheme_json_schema() {
        let s = CoprimeScheme::new(3, 4, 3000, 1, 3.2e10).unwrap();
        let json = serde_json::to_string(&s).unwrap();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["r0"], 3);
        assert_eq!(v["r1"], 4);
        assert_eq!(v["p"], 3000);
        assert_eq!(v["q"], 1);
        assert_eq!(v["fs_hz"], 3.2e10);
        let back: CoprimeScheme = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
        // External schema: all five keys accepted in canonical form.
        let canonical = r#"{"r0":3,"r1":4,"p":3000,"q":1,"fs_hz":3.2e10}"#;
        let parsed: CoprimeScheme = serde_json::from_str(canonical).unwrap();
        assert_eq!(parsed, s);
    }

    #[test]
    fn serde_does_not_bypass_validation_invariants() {
        // Deserialization is a raw decode; re-validate after parsing when the
        // source is untrusted.
        let parsed: CoprimeScheme =
            serde_json::from_str(r#"{"r0":2,"r1":4,"p":1,"q":1,"fs_hz":1.0}"#).unwrap();
        assert!(CoprimeScheme::new(
            parsed.r0(),
            parsed.r1(),
            parsed.p(),
            parsed.q(),
            parsed.fs_hz()
        )
        .is_err());
    }
}
