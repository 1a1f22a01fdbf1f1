//! How the per-puncture synchronization margin builds up over a
//! superframe: skew, counter quantization, drift and accumulated jitter.
//!
//! ```bash
//! cargo run -p pulsesync --example margin_budget
//! ```

use pulsesync::{sync_margin, BodyChannel, OscillatorSpec};

fn main() {
    let osc = OscillatorSpec::new(10e3, 1e-6, 500.0).unwrap();
    let channel = BodyChannel::at_distance(0.15).unwrap();

    println!("margin budget for a 10 kHz timer, 1 us jitter, 500 ppm drift, 15 cm separation");
    println!(
        "{:>8}  {:>9} {:>9} {:>9} {:>9}  {:>9}",
        "t (ms)", "skew", "counter", "drift", "jitter", "total"
    );
    for t_ms in [50, 100, 200, 400, 800] {
        let m = sync_margin(&osc, &channel, t_ms as f64 / 1e3).unwrap();
        println!(
            "{:>8}  {:>8.1}u {:>8.1}u {:>8.1}u {:>8.1}u  {:>8.1}u",
            t_ms,
            m.t_hb_s * 1e6,
            m.dt_counter_s * 1e6,
            m.dt_drift_s * 1e6,
            m.dt_jitter_s * 1e6,
            m.total_s * 1e6
        );
    }

    let end = sync_margin(&osc, &channel, 0.8).unwrap();
    println!();
    println!(
        "a receive window at the end of the superframe opens {:.2} ms early and closes {:.2} ms late",
        end.total_s * 1e3,
        end.total_s * 1e3
    );
}
