//! Worst-to-best comparison: the heartbeat scheme at its most expensive
//! superframe against the duty-cycled baseline at its best duty-cycle
//! ratio, for both latency targets.
//!
//! ```bash
//! cargo run -p pulsesync --example scheme_comparison
//! ```

use pulsesync::commands::cmd_compare;
use pulsesync::scenario::default_config;

fn main() {
    let cfg = default_config();
    let (t_lo, t_hi) = cfg.compare_superframe_range();
    let table = cmd_compare(&cfg, &[0.05, 0.2]).unwrap();

    println!(
        "heartbeat worst case over superframes {t_lo:.1} .. {t_hi:.1} s vs baseline at its best delta"
    );
    println!();
    println!(
        "{:>10}  {:>12} {:>12}  {:>8}  {:>9}  {:>16}",
        "latency", "hb worst", "dc best", "saving", "dc delta", "dc extra latency"
    );
    for row in table.rows() {
        let col = |name: &str| row[table.column_index(name).unwrap()];
        println!(
            "{:>7} ms  {:>9.3} uW {:>9.3} uW  {:>7.1}%  {:>8.1}%  {:>13.2} ms",
            col("latency_s") * 1e3,
            col("p_hb_worst_w") * 1e6,
            col("p_dc_min_w") * 1e6,
            col("saving") * 100.0,
            col("delta_at_min") * 100.0,
            col("extra_latency_dc_mean_s") * 1e3
        );
    }
    println!();
    println!(
        "the heartbeat scheme adds no coordination latency; the baseline waits on its wake cycle"
    );
}
