//! Heartbeat-synchronized body area network scheduling: closed-form
//! timing/availability/power models, a stochastic discrete-event
//! simulation of drifting node clocks, and a duty-cycled wake-up-receiver
//! baseline for comparison.
//!
//! Every node resets its timer on the shared cardiac event, divides the
//! inter-beat interval (the superframe) into sub-frames, and uploads its
//! data by briefly puncturing the hub-to-hub channel at scheduled
//! instants. The models here quantify what that costs: how wide the
//! receive windows must be to absorb clock error, how much channel
//! availability and power the margins consume, and how the scheme stacks
//! up against leaves that instead duty-cycle their receivers and wait for
//! wake-up beacons.
//!
//! Start with the runnable examples, one per capability:
//!
//! ```bash
//! cargo run -p pulsesync --example margin_budget
//! cargo run -p pulsesync --example operating_point
//! cargo run -p pulsesync --example oscillator_choice
//! cargo run -p pulsesync --example availability_sweep
//! cargo run -p pulsesync --example drift_simulation
//! cargo run -p pulsesync --example wakeup_baseline
//! cargo run -p pulsesync --example scheme_comparison
//! ```
//!
//! The same capabilities are exposed as `pulsesync` CLI subcommands
//! (`analyze`, `sweep`, `simulate`, `baseline`, `compare`, `plot`); see
//! the README for flags and file formats.

pub mod analytic;
pub mod chart;
pub mod commands;
pub mod dutycycle;
pub mod error;
pub mod eventsim;
pub mod scenario;
pub mod table;
pub mod timing;

pub use analytic::{
    build_schedule, ca_ideal, ca_real, evaluate, inaccuracy_vs_fosc, p_ideal, p_real, sweep,
    total_margin, wait_time, InaccuracyPoint, LinkSpec, MetricsReport, PowerSpec,
    PunctureSchedule, Scenario, SweepAxis,
};
pub use dutycycle::{simulate_rendezvous, sweep_delta, DutyCycleConfig, DutyCycleReport};
pub use error::{Error, Result};
pub use eventsim::{
    empirical_metrics, run_simulation, run_simulation_with, EmpiricalMetrics, HeartRateModel,
    NodeClock, SimEvent, SimEventKind, SimOptions, SimTrace,
};
pub use scenario::{parse_scenario, parse_scenario_str, ResolvedConfig};
pub use table::{Provenance, ResultTable};
pub use timing::{
    counter_quantization, drift_inaccuracy, heartbeat_skew, jitter_inaccuracy, sync_margin,
    BodyChannel, MarginBreakdown, OscillatorSpec, DEFAULT_HEARTBEAT_SPEED_MPS,
};

/// Tool name and version embedded in result-table provenance headers.
pub fn tool_version() -> String {
    format!("pulsesync {}", env!("CARGO_PKG_VERSION"))
}
