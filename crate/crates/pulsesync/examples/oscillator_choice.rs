//! Picking the timer frequency: the quantization term falls with
//! frequency while drift and accumulated jitter grow with it, leaving an
//! optimum a little below 10 kHz. Writes the curve as CSV and SVG.
//!
//! ```bash
//! cargo run -p pulsesync --example oscillator_choice
//! ```

use pulsesync::chart::{emit_svg, PlotSpec};
use pulsesync::commands::{cmd_sweep, RangeSpec};
use pulsesync::scenario::default_config;
use pulsesync::{inaccuracy_vs_fosc, SweepAxis};

fn main() {
    let cfg = default_config();
    let grid: Vec<f64> = (0..300)
        .map(|i| 100.0 * (1e7f64 / 100.0).powf(i as f64 / 299.0))
        .collect();
    let horizon = cfg.scenario.superframe_s();
    let points = inaccuracy_vs_fosc(cfg.scenario.osc(), horizon, &grid).unwrap();

    let best = points
        .iter()
        .min_by(|a, b| a.total_s.total_cmp(&b.total_s))
        .unwrap();
    let at_10k = inaccuracy_vs_fosc(cfg.scenario.osc(), horizon, &[10e3]).unwrap()[0];

    println!("per-clock inaccuracy after {horizon} s, over 100 Hz .. 10 MHz:");
    println!(
        "  best grid point: {:.0} Hz with {:.1} us total",
        best.f_osc_hz,
        best.total_s * 1e6
    );
    println!(
        "  at 10 kHz: {:.1} us ({:.0} counter + {:.0} drift + {:.1} jitter)",
        at_10k.total_s * 1e6,
        at_10k.dt_counter_s * 1e6,
        at_10k.dt_drift_s * 1e6,
        at_10k.dt_jitter_s * 1e6
    );

    let range = RangeSpec {
        from: 100.0,
        to: 1e7,
        points: 300,
        log: true,
    };
    let table = cmd_sweep(&cfg, SweepAxis::FOsc, &range).unwrap();
    table.write_csv("oscillator_tradeoff.csv".as_ref()).unwrap();
    let spec = PlotSpec {
        x: "f_osc_hz".into(),
        ys: vec![
            "total_inaccuracy_s".into(),
            "dt_counter_s".into(),
            "dt_drift_s".into(),
            "dt_jitter_s".into(),
        ],
        err: None,
        log_x: true,
        title: "timing inaccuracy vs oscillator frequency".into(),
    };
    emit_svg(&table, &spec, "oscillator_tradeoff.svg".as_ref()).unwrap();
    println!("wrote oscillator_tradeoff.csv and oscillator_tradeoff.svg");
}
