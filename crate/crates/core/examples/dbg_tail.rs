use coprime_psd::autocorr::LagWindow;
use coprime_psd::estimator::Estimator;
use coprime_psd::eval::{detect_peaks, PeakCount};
use coprime_psd::scheme::CoprimeScheme;
use coprime_psd::siggen::{generate, ComponentSpec, Scenario, ScenarioNoise};

fn main() {
    let scheme = CoprimeScheme::new(3, 4, 300, 1, 32e9).unwrap();
    let window = LagWindow::default_for_frame(scheme.fs_hz(), scheme.frame_len());
    let estimator = Estimator::new(scheme, window).unwrap();
    let bin = scheme.fs_hz() / window.num_lags() as f64;
    for delay in [0usize, 100_000] {
        let mut hist = [0usize; 8]; // error in bins: 0,1,2,3,4-7,8-15,16-63,64+
        let mut worst: Vec<(f64, f64)> = Vec::new();
        for t in 0..500u64 {
            let scenario = Scenario {
                components: vec![ComponentSpec::RandomMp {
                    count: 18,
                    band_hz: (2e9, 18e9),
                    min_separation_hz: 140e6,
                    amplitude: 1.0,
                }],
                noise: Some(ScenarioNoise { snr_db: 5.0, seed: None }),
                seed: 92_000 + t,
                delay_samples: delay,
            };
            let g = generate(&scenario, &scheme).unwrap();
            let out = estimator.estimate_frame(&g.frame).unwrap();
            let peaks = detect_peaks(&out.spectrum, PeakCount::Fixed(18));
            for c in &g.components {
                let f = c.center_freq_hz();
                let err = peaks
                    .peaks
                    .iter()
                    .map(|p| (p.frequency_hz - f).abs())
                    .fold(f64::INFINITY, f64::min)
                    .min(scheme.fs_hz() / 2.0);
                let ebins = err / bin;
                let slot = match ebins as usize {
                    0 => 0,
                    1 => 1,
                    2 => 2,
                    3 => 3,
                    4..=7 => 4,
                    8..=15 => 5,
                    16..=63 => 6,
                    _ => 7,
                };
                hist[slot] += 1;
                if ebins >= 8.0 {
                    worst.push((f / 1e9, ebins));
                }
            }
        }
        println!("delay {delay}: hist(bins 0/1/2/3/4-7/8-15/16-63/64+) = {hist:?}");
        worst.sort_by(|a, b| b.1.total_cmp(&a.1));
        for (f, e) in worst.iter().take(8) {
            println!("   outlier: tone {f:.3} GHz, error {e:.1} bins");
        }
    }
}
