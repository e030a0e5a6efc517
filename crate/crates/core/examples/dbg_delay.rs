use coprime_psd::eval::{monte_carlo_sweep, SweepAxis, SweepConfig};
use coprime_psd::scheme::CoprimeScheme;
use coprime_psd::siggen::{ComponentSpec, Scenario, ScenarioNoise};

fn main() {
    let scheme = CoprimeScheme::new(3, 4, 300, 1, 32e9).unwrap();
    for base_seed in [92_000u64, 17, 555_000] {
        let config = SweepConfig {
            axis: SweepAxis::DelaySamples,
            grid: vec![0.0, 1e3, 1e4, 5e4, 1e5, 2e5],
            trials: 500,
            scheme,
            scenario: Scenario {
                components: vec![ComponentSpec::RandomMp {
                    count: 18,
                    band_hz: (2e9, 18e9),
                    min_separation_hz: 560e6,
                    amplitude: 1.0,
                }],
                noise: Some(ScenarioNoise { snr_db: 5.0, seed: None }),
                seed: 7200,
                delay_samples: 0,
            },
            delta_f_hz: Some(80e6),
            base_seed,
        };
        let table = monte_carlo_sweep(&config).unwrap();
        print!("seed {base_seed:>7}: ");
        for row in &table.rows {
            print!("d={:>6}: {:.3e}  ", row.axis_value, row.rmse);
        }
        println!();
    }
}
