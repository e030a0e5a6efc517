//! Disk cache for sensing-vector autocorrelations.
//!
//! The sensing autocorrelation depends only on `(r0, r1, p, q, M)`, so it is
//! stored as exact pair counts for the nonnegative lags (the sequence is
//! symmetric). Files carry a magic/version header plus the key; any mismatch
//! or decode failure falls back to recomputation and the file is rewritten.
//! Writes go through a temp file and an atomic rename, so concurrent readers
//! never observe a partial file.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use num_complex::Complex64;

use crate::autocorr::{AutocorrKind, AutocorrSeq, LagWindow};
use crate::error::Result;
use crate::estimator::sensing_autocorr;
use crate::scheme::CoprimeScheme;

const MAGIC: &[u8; 8] = b"CPSDRA01";

fn cache_file_name(scheme: &CoprimeScheme, m: usize) -> String {
    format!(
        "sensing_r{}-{}_p{}_q{}_m{}.bin",
        scheme.r0(),
        scheme.r1(),
        scheme.p(),
        scheme.q(),
        m
    )
}

/// Path of the cache entry for a scheme/window pair under `dir`.
pub fn cache_path(dir: &Path, scheme: &CoprimeScheme, window: &LagWindow) -> PathBuf {
    dir.join(cache_file_name(scheme, window.m()))
}

fn encode(scheme: &CoprimeScheme, m: usize, counts: &[u64]) -> Vec<u8> {
    let mut buf = Vec::with_capacity(8 + 6 * 8 + counts.len() * 8);
    buf.extend_from_slice(MAGIC);
    for v in [
        scheme.r0() as u64,
        scheme.r1() as u64,
        scheme.p() as u64,
        scheme.q() as u64,
        m as u64,
        scheme.frame_len() as u64,
    ] {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    for &c in counts {
        buf.extend_from_slice(&c.to_le_bytes());
    }
    buf
}

fn decode(bytes: &[u8], scheme: &CoprimeScheme, m: usize) -> Option<Vec<u64>> {
    let header_len = 8 + 6 * 8;
    if bytes.len() != header_len + m * 8 || &bytes[..8] != MAGIC {
        return None;
    }
    let mut fields = [0u64; 6];
    for (i, f) in fields.iter_mut().enumerate() {
        let start = 8 + i * 8;
        *f = u64::from_le_bytes(bytes[start..start + 8].try_into().ok()?);
    }
    let expect = [
        scheme.r0() as u64,
        scheme.r1() as u64,
        scheme.p() as u64,
        scheme.q() as u64,
        m as u64,
        scheme.frame_len() as u64,
    ];
    if fields != expect {
        return None;
    }
    let mut counts = Vec::with_capacity(m);
    for i in 0..m {
        let start = header_len + i * 8;
        counts.push(u64::from_le_bytes(bytes[start..start + 8].try_into().ok()?));
    }
    Some(counts)
}

fn seq_from_counts(
    counts: &[u64],
    scheme: &CoprimeScheme,
    window: &LagWindow,
) -> AutocorrSeq {
    let n = scheme.frame_len();
    let m = window.m();
    let mut values = vec![Complex64::new(0.0, 0.0); window.num_lags()];
    for (lag, &count) in counts.iter().enumerate() {
        let v = Complex64::new(count as f64 / n as f64, 0.0);
        values[m - 1 + lag] = v;
        values[m - 1 - lag] = v;
    }
    AutocorrSeq::from_values(values, *window, n, AutocorrKind::Sensing)
}

fn counts_from_seq(seq: &AutocorrSeq) -> Vec<u64> {
    let n = seq.frame_len() as f64;
    let m = seq.window().m();
    (0..m)
        .map(|lag| (seq.at_lag(lag as isize).unwrap().re * n).round() as u64)
        .collect()
}

/// Loads the sensing autocorrelation from `dir`, recomputing (and rewriting
/// the entry) when the file is missing, stale, or keyed differently.
pub fn load_or_compute(
    dir: &Path,
    scheme: &CoprimeScheme,
    window: &LagWindow,
) -> Result<AutocorrSeq> {
    let path = cache_path(dir, scheme, window);
    if let Ok(bytes) = fs::read(&path) {
        if let Some(counts) = decode(&bytes, scheme, window.m()) {
            return Ok(seq_from_counts(&counts, scheme, window));
        }
    }
    let seq = sensing_autocorr(scheme, window)?;
    store(dir, scheme, window, &seq)?;
    Ok(seq)
}

/// Writes a cache entry atomically (temp file + rename).
pub fn store(
    dir: &Path,
    scheme: &CoprimeScheme,
    window: &LagWindow,
    seq: &AutocorrSeq,
) -> Result<()> {
    fs::create_dir_all(dir)?;
    let bytes = encode(scheme, window.m(), &counts_from_seq(seq));
    let path = cache_path(dir, scheme, window);
    let tmp = path.with_extension(format!("tmp.{}", std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(&bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, &path)?;
    Ok(())
}
