use coprime_psd::autocorr::LagWindow;
use coprime_psd::estimator::Estimator;
use coprime_psd::scheme::CoprimeScheme;
use coprime_psd::siggen::{generate, ComponentSpec, LfmSpec, Scenario, ScenarioNoise};

fn main() {
    let scheme = CoprimeScheme::new(3, 4, 3000, 1, 32e9).unwrap();
    let window = LagWindow::default_for_frame(scheme.fs_hz(), scheme.frame_len());
    let estimator = Estimator::new(scheme, window).unwrap();
    let scenario = Scenario {
        components: vec![
            ComponentSpec::Lfm(LfmSpec {
                f_start_hz: 2e9,
                bandwidth_hz: 10e9,
                duration_s: None,
                amplitude: 1.0,
                phase_rad: 0.3,
            }),
            ComponentSpec::Lfm(LfmSpec {
                f_start_hz: 8e9,
                bandwidth_hz: 10e9,
                duration_s: None,
                amplitude: 1.0,
                phase_rad: 2.1,
            }),
        ],
        noise: Some(ScenarioNoise { snr_db: 15.0, seed: None }),
        seed: 2003,
        delay_samples: 0,
    };
    let generated = generate(&scenario, &scheme).unwrap();
    let out = estimator.estimate_frame(&generated.frame).unwrap();
    let mags = out.spectrum.magnitudes();
    let k = mags.len();
    // Coarse profile: max magnitude per 0.5 GHz band.
    for band in 0..64 {
        let lo = band as f64 * 0.5e9;
        let hi = lo + 0.5e9;
        let m = (0..k)
            .filter(|&i| {
                let f = out.spectrum.bin_frequency_hz(i);
                f >= lo && f < hi
            })
            .map(|i| mags[i])
            .fold(0.0f64, f64::max);
        println!("{:5.1} GHz  max {:10.4}", lo / 1e9, m);
    }
    let mut sorted = mags.to_vec();
    sorted.sort_by(f64::total_cmp);
    println!("p10 {:.4} p50 {:.4} p90 {:.4} max {:.4}", sorted[k/10], sorted[k/2], sorted[9*k/10], sorted[k-1]);
    println!("uncovered lags: {}", out.coverage.uncovered_lags().len());
}
