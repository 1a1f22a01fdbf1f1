//! Channel availability and power across superframe durations for the
//! two latency targets. Shorter upload intervals mean more punctures and
//! more margin; longer superframes let drift and jitter accumulate.
//! Writes one CSV and one SVG per latency.
//!
//! ```bash
//! cargo run -p pulsesync --example availability_sweep
//! ```

use pulsesync::chart::{emit_svg, PlotSpec};
use pulsesync::commands::{cmd_sweep, RangeSpec};
use pulsesync::scenario::default_config;
use pulsesync::SweepAxis;

fn main() {
    let cfg = default_config();
    let range = RangeSpec {
        from: 0.4,
        to: 1.2,
        points: 17,
        log: false,
    };

    for latency in [0.05, 0.2] {
        let cfg_l = cfg
            .clone()
            .with_scenario(cfg.scenario.with_latency(latency).unwrap());
        let table = cmd_sweep(&cfg_l, SweepAxis::Superframe, &range).unwrap();
        let ca = table.column_values("ca_real").unwrap();
        let p = table.column_values("p_real_w").unwrap();
        println!(
            "latency {:>5} ms: ca_real {:.2}% .. {:.2}%, p_real {:.0} .. {:.0} nW over T = 0.4 .. 1.2 s",
            latency * 1e3,
            ca.last().unwrap() * 100.0,
            ca[0] * 100.0,
            p[0] * 1e9,
            p.last().unwrap() * 1e9,
        );
        let tag = format!("{:.0}ms", latency * 1e3);
        let csv = format!("availability_{tag}.csv");
        let svg = format!("availability_{tag}.svg");
        table.write_csv(csv.as_ref()).unwrap();
        emit_svg(
            &table,
            &PlotSpec {
                x: "superframe_s".into(),
                ys: vec!["ca_real".into(), "ca_ideal".into()],
                err: None,
                log_x: false,
                title: format!("channel availability vs superframe, {tag} latency"),
            },
            svg.as_ref(),
        )
        .unwrap();
        println!("  wrote {csv} and {svg}");
    }
}
