//! The duty-cycled wake-up-receiver baseline: mean power is U-shaped in
//! the duty-cycle ratio (listening dominates on the right, beaconing
//! through long waits on the left) and the rendezvous latency blows up as
//! 1/delta. Writes the sweep as CSV and an error-bar SVG.
//!
//! ```bash
//! cargo run -p pulsesync --example wakeup_baseline
//! ```

use pulsesync::commands::{baseline_plot_spec, cmd_baseline, RangeSpec};
use pulsesync::chart::emit_svg;
use pulsesync::dutycycle::optimal_delta;
use pulsesync::scenario::default_config;

fn main() {
    let cfg = default_config();
    let range = RangeSpec {
        from: 0.005,
        to: 0.5,
        points: 25,
        log: true,
    };
    let table = cmd_baseline(&cfg, Some(&range), Some(20_000)).unwrap();

    let deltas = table.column_values("delta").unwrap();
    let p_mean = table.column_values("p_mean_w").unwrap();
    let lat_mean = table.column_values("extra_latency_mean_s").unwrap();
    let lat_max = table.column_values("extra_latency_max_s").unwrap();

    let best = (0..deltas.len())
        .min_by(|&a, &b| p_mean[a].total_cmp(&p_mean[b]))
        .unwrap();
    println!("duty-cycle sweep, 20000 trials per point:");
    println!(
        "  grid minimum {:.3} uW at delta = {:.1}% (analytic optimum {:.1}%)",
        p_mean[best] * 1e6,
        deltas[best] * 100.0,
        optimal_delta(&cfg.dutycycle_config().unwrap()) * 100.0
    );
    println!(
        "  at delta = 0.5%: {:.2} uW mean power, rendezvous {:.1} ms mean / {:.1} ms max",
        p_mean[0] * 1e6,
        lat_mean[0] * 1e3,
        lat_max[0] * 1e3
    );
    println!(
        "  at delta =  50%: {:.2} uW mean power, rendezvous {:.2} ms mean",
        p_mean.last().unwrap() * 1e6,
        lat_mean.last().unwrap() * 1e3
    );

    table.write_csv("wakeup_baseline.csv".as_ref()).unwrap();
    emit_svg(&table, &baseline_plot_spec(), "wakeup_baseline.svg".as_ref()).unwrap();
    println!("  wrote wakeup_baseline.csv and wakeup_baseline.svg");
}
