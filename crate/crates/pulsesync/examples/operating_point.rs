//! Availability and power at the reference operating point, for the two
//! upload latency targets.
//!
//! ```bash
//! cargo run -p pulsesync --example operating_point
//! ```

use pulsesync::{evaluate, Scenario};

fn main() {
    let scenario = Scenario::default();
    println!(
        "one hub, {} leaf, {} s superframe",
        scenario.n_leaves(),
        scenario.superframe_s()
    );
    println!();
    println!(
        "{:>12}  {:>9} {:>9}  {:>11} {:>11}  {:>10}",
        "latency", "ca_ideal", "ca_real", "p_ideal", "p_real", "wait"
    );
    for latency in [0.05, 0.2] {
        let r = evaluate(&scenario.with_latency(latency).unwrap()).unwrap();
        println!(
            "{:>9} ms  {:>8.2}% {:>8.2}%  {:>9.0} nW {:>9.0} nW  {:>7.2} ms",
            latency * 1e3,
            r.ca_ideal * 100.0,
            r.ca_real * 100.0,
            r.p_ideal_w * 1e9,
            r.p_real_w * 1e9,
            r.t_wait_s * 1e3
        );
    }
    println!();
    let fast = evaluate(&scenario).unwrap();
    println!(
        "at the 50 ms target the margins more than double the power ({:.2}x) and cost \
         {:.1} points of availability",
        fast.p_real_w / fast.p_ideal_w,
        (fast.ca_ideal - fast.ca_real) * 100.0
    );
}
