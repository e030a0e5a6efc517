//! File formats: binary frames with JSON sidecars, CSV/JSON exports for
//! autocorrelations, spectra, coverage masks, and sweep tables, and the
//! one-integer-per-line position dump.
//!
//! Data files never contain nondeterministic content; floats are written
//! with Rust's shortest round-trip formatting so identical values produce
//! identical bytes.

use std::fs;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::autocorr::{AutocorrKind, AutocorrSeq};
use crate::error::{Error, Result};
use crate::estimator::{CoverageMask, PowerSpectrum};
use crate::eval::{BenchTable, SweepTable};
use crate::scheme::{CoprimeScheme, NyquistFrame, SensingVector};

/// Writes bytes through a temp file and an atomic rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    let tmp = path.with_extension(format!(
        "{}.tmp{}",
        path.extension().and_then(|e| e.to_str()).unwrap_or(""),
        std::process::id()
    ));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

/// JSON sidecar describing a binary frame file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameHeader {
    pub format: String,
    pub n: usize,
    pub fs_hz: f64,
    #[serde(default)]
    pub scheme: Option<CoprimeScheme>,
}

pub const FRAME_FORMAT: &str = "complex128-interleaved-le";

/// Writes `base.bin` (interleaved real/imag little-endian f64) and
/// `base.json`.
pub fn write_frame(base: &Path, frame: &NyquistFrame, scheme: Option<&CoprimeScheme>) -> Result<()> {
    let mut bytes = Vec::with_capacity(frame.len() * 16);
    for s in frame.samples() {
        bytes.extend_from_slice(&s.re.to_le_bytes());
        bytes.extend_from_slice(&s.im.to_le_bytes());
    }
    write_atomic(&base.with_extension("bin"), &bytes)?;
    let header = FrameHeader {
        format: FRAME_FORMAT.to_string(),
        n: frame.len(),
        fs_hz: frame.fs_hz(),
        scheme: scheme.copied(),
    };
    let json = serde_json::to_vec_pretty(&header)?;
    write_atomic(&base.with_extension("json"), &json)?;
    Ok(())
}

/// Reads a frame written by [`write_frame`], validating the header.
pub fn read_frame(base: &Path) -> Result<(NyquistFrame, FrameHeader)> {
    let header: FrameHeader =
        serde_json::from_slice(&fs::read(base.with_extension("json"))?)?;
    if header.format != FRAME_FORMAT {
        return Err(Error::Config(format!(
            "unsupported frame format {:?}",
            header.format
        )));
    }
    let bytes = fs::read(base.with_extension("bin"))?;
    if bytes.len() != header.n * 16 {
        return Err(Error::LengthMismatch {
            expected: header.n * 16,
            actual: bytes.len(),
        });
    }
    let samples: Vec<Complex64> = bytes
        .chunks_exact(16)
        .map(|c| {
            Complex64::new(
                f64::from_le_bytes(c[..8].try_into().unwrap()),
                f64::from_le_bytes(c[8..].try_into().unwrap()),
            )
        })
        .collect();
    Ok((NyquistFrame::new(samples, header.fs_hz), header))
}

/// One sample position per line, ascending.
pub fn positions_text(sv: &SensingVector) -> String {
    let mut out = String::new();
    for pos in sv.positions() {
        out.push_str(&pos.to_string());
        out.push('\n');
    }
    out
}

fn kind_label(kind: AutocorrKind) -> &'static str {
    match kind {
        AutocorrKind::Sensing => "sensing",
        AutocorrKind::Capture => "capture",
        AutocorrKind::Input => "input",
    }
}

/// CSV with columns `lag,real,imag`.
pub fn autocorr_csv(seq: &AutocorrSeq) -> String {
    let mut out = String::from("lag,real,imag\n");
    for (lag, v) in seq.iter_lags() {
        out.push_str(&format!("{lag},{},{}\n", v.re, v.im));
    }
    out
}

/// JSON export with scheme metadata embedded.
pub fn autocorr_json(seq: &AutocorrSeq, scheme: &CoprimeScheme) -> Result<String> {
    let values: Vec<serde_json::Value> = seq
        .iter_lags()
        .map(|(lag, v)| json!({"lag": lag, "real": v.re, "imag": v.im}))
        .collect();
    let doc = json!({
        "scheme": scheme,
        "kind": kind_label(seq.kind()),
        "m": seq.window().m(),
        "delta_f_hz": if seq.window().delta_f_hz().is_finite() {
            json!(seq.window().delta_f_hz())
        } else {
            json!(null)
        },
        "frame_len": seq.frame_len(),
        "values": values,
    });
    Ok(serde_json::to_string_pretty(&doc)?)
}

/// CSV with columns `bin,frequency_hz,magnitude`.
pub fn spectrum_csv(spectrum: &PowerSpectrum) -> String {
    let mut out = String::from("bin,frequency_hz,magnitude\n");
    for (i, &mag) in spectrum.magnitudes().iter().enumerate() {
        out.push_str(&format!("{i},{},{}\n", spectrum.bin_frequency_hz(i), mag));
    }
    out
}

/// JSON export with scheme metadata embedded.
pub fn spectrum_json(spectrum: &PowerSpectrum, scheme: &CoprimeScheme) -> Result<String> {
    let doc = json!({
        "scheme": scheme,
        "fs_hz": spectrum.fs_hz(),
        "num_bins": spectrum.num_bins(),
        "bin_width_hz": spectrum.bin_width_hz(),
        "magnitudes": spectrum.magnitudes(),
    });
    Ok(serde_json::to_string_pretty(&doc)?)
}

/// CSV with columns `lag,pair_count,covered`.
pub fn coverage_csv(coverage: &CoverageMask, sensing: &AutocorrSeq) -> String {
    let n = sensing.frame_len() as f64;
    let mut out = String::from("lag,pair_count,covered\n");
    for (lag, v) in sensing.iter_lags() {
        let count = (v.re * n).round() as u64;
        out.push_str(&format!(
            "{lag},{count},{}\n",
            u8::from(coverage.is_covered(lag))
        ));
    }
    out
}

/// CSV with columns `axis_value,rmse,mean_time_s,trials`.
///
/// `mean_time_s` is a wall-clock measurement and is not reproducible; the
/// deterministic companion is [`sweep_results_json`].
pub fn sweep_csv(table: &SweepTable) -> String {
    let mut out = String::from("axis_value,rmse,mean_time_s,trials\n");
    for row in &table.rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            row.axis_value, row.rmse, row.mean_time_s, row.trials
        ));
    }
    out
}

/// Deterministic sweep data: full config echo plus per-point results with
/// measurements stripped.
pub fn sweep_results_json<C: Serialize>(config: &C, table: &SweepTable) -> Result<String> {
    let rows: Vec<serde_json::Value> = table
        .rows
        .iter()
        .map(|r| {
            json!({
                "axis_value": r.axis_value,
                "rmse": r.rmse,
                "trials": r.trials,
                "failed_trials": r.failed_trials,
            })
        })
        .collect();
    let doc = json!({
        "config": config,
        "axis": table.axis,
        "rows": rows,
    });
    Ok(serde_json::to_string_pretty(&doc)?)
}

/// CSV with columns `p,n,m,fast_time_s,oracle_time_s`.
pub fn bench_csv(table: &BenchTable) -> String {
    let mut out = String::from("p,n,m,fast_time_s,oracle_time_s\n");
    for row in &table.rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            row.p, row.n, row.m, row.fast_time_s, row.oracle_time_s
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::autocorr::LagWindow;
    use crate::estimator::{sensing_autocorr, Estimator};
    use crate::siggen::{gen_mp, MpSpec};
    use tempfile::TempDir;

    #[test]
    fn frame_roundtrip_is_bit_exact() {
        let dir = TempDir::new().unwrap();
        let s = CoprimeScheme::new(2, 3, 3, 1, 16.0).unwrap();
        let frame = gen_mp(
            &[MpSpec {
                freq_hz: 3.7,
                amplitude: 0.9,
                phase_rad: 1.1,
            }],
            &s,
            0,
        )
        .unwrap();
        let base = dir.path().join("frame");
        write_frame(&base, &frame, Some(&s)).unwrap();
        let (back, header) = read_frame(&base).unwrap();
        assert_eq!(back, frame);
        assert_eq!(header.scheme, Some(s));
        assert_eq!(header.n, s.frame_len());
    }

    #[test]
    fn read_frame_rejects_truncated_payload() {
        let dir = TempDir::new().unwrap();
        let s = CoprimeScheme::new(2, 3, 1, 1, 4.0).unwrap();
        let frame = NyquistFrame::new(vec![Complex64::new(1.0, 0.0); s.frame_len()], 4.0);
        let base = dir.path().join("frame");
        write_frame(&base, &frame, None).unwrap();
        let bin = base.with_extension("bin");
        let mut bytes = fs::read(&bin).unwrap();
        bytes.truncate(bytes.len() - 8);
        fs::write(&bin, bytes).unwrap();
        assert!(matches!(
            read_frame(&base),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn positions_text_matches_set() {
        let s = CoprimeScheme::new(2, 3, 1, 1, 1.0).unwrap();
        assert_eq!(positions_text(&s.sensing_vector()), "0\n2\n4\n6\n9\n");
    }

    #[test]
    fn csv_exports_have_expected_shape() {
        let s = CoprimeScheme::new(2, 3, 1, 1, 12.0).unwrap();
        let window = LagWindow::with_lag_count(12.0, 4).unwrap();
        let est = Estimator::new(s, window).unwrap();
        let frame = NyquistFrame::new(
            vec![Complex64::new(1.0, 0.0); s.frame_len()],
            s.fs_hz(),
        );
        let out = est.estimate_frame(&frame).unwrap();

        let csv = spectrum_csv(&out.spectrum);
        let lines: Vec<&str> = csv.trim_end().lines().collect();
        assert_eq!(lines[0], "bin,frequency_hz,magnitude");
        assert_eq!(lines.len(), 1 + window.num_lags());

        let ra = sensing_autocorr(&s, &window).unwrap();
        let cov = coverage_csv(&out.coverage, &ra);
        assert!(cov.contains("-1,0,0"));
        assert!(cov.contains("0,5,1"));

        let ac = autocorr_csv(&out.autocorr);
        assert!(ac.starts_with("lag,real,imag\n"));
        assert_eq!(ac.trim_end().lines().count(), 1 + window.num_lags());
    }

    #[test]
    fn json_exports_embed_scheme() {
        let s = CoprimeScheme::new(2, 3, 1, 1, 12.0).unwrap();
        let window = LagWindow::with_lag_count(12.0, 4).unwrap();
        let ra = sensing_autocorr(&s, &window).unwrap();
        let doc: serde_json::Value =
            serde_json::from_str(&autocorr_json(&ra, &s).unwrap()).unwrap();
        assert_eq!(doc["scheme"]["r0"], 2);
        assert_eq!(doc["kind"], "sensing");
        assert_eq!(doc["values"].as_array().unwrap().len(), 7);
    }
}
