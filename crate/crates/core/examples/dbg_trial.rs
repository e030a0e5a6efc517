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
    // Find the worst trial among the first 500.
    let mut worst_trial = 0u64;
    let mut worst_err = 0.0f64;
    for t in 0..500u64 {
        let scenario = scenario(92_000 + t);
        let g = generate(&scenario, &scheme).unwrap();
        let out = estimator.estimate_frame(&g.frame).unwrap();
        let peaks = detect_peaks(&out.spectrum, PeakCount::Fixed(18));
        for c in &g.components {
            let f = c.center_freq_hz();
            let err = peaks
                .peaks
                .iter()
                .map(|p| (p.frequency_hz - f).abs())
                .fold(f64::INFINITY, f64::min);
            if err > worst_err {
                worst_err = err;
                worst_trial = t;
            }
        }
    }
    println!("worst trial offset {worst_trial}, err {:.1} bins", worst_err / bin);
    let scenario = scenario(92_000 + worst_trial);
    let g = generate(&scenario, &scheme).unwrap();
    let out = estimator.estimate_frame(&g.frame).unwrap();
    let peaks = detect_peaks(&out.spectrum, PeakCount::Fixed(18));
    let mut truths: Vec<f64> = g.components.iter().map(|c| c.center_freq_hz()).collect();
    truths.sort_by(f64::total_cmp);
    println!("truths (GHz): {:?}", truths.iter().map(|f| (f / 1e8).round() / 10.0).collect::<Vec<_>>());
    let mut ps: Vec<(f64, f64)> = peaks.peaks.iter().map(|p| (p.frequency_hz, p.magnitude)).collect();
    ps.sort_by(|a, b| a.0.total_cmp(&b.0));
    for (f, m) in &ps {
        println!("  peak {:7.3} GHz  mag {m:.2}", f / 1e9);
    }
    // Show the 30 strongest local maxima for context.
    let all = detect_peaks(&out.spectrum, PeakCount::Fixed(30));
    println!("-- top 30 --");
    for p in &all.peaks {
        println!("  {:7.3} GHz  mag {:.2}", p.frequency_hz / 1e9, p.magnitude);
    }
}

fn scenario(seed: u64) -> Scenario {
    Scenario {
        components: vec![ComponentSpec::RandomMp {
            count: 18,
            band_hz: (2e9, 18e9),
            min_separation_hz: 140e6,
            amplitude: 1.0,
        }],
        noise: Some(ScenarioNoise { snr_db: 5.0, seed: None }),
        seed,
        delay_samples: 0,
    }
}
