//! Stochastic discrete-event simulation of the heartbeat scheme.
//!
//! Each node owns a drifting, jittering, quantized clock that is reset on
//! every heartbeat detection (offset by a per-node skew draw). Leaves
//! transmit at their locally-measured puncture instants; the hub opens a
//! receive window widened by the analytic per-puncture margin around its
//! own locally-measured instant. The run produces an event trace and
//! empirical hit-rate/availability/power figures that the closed-form
//! worst-case model must dominate.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Normal};

use crate::analytic::{build_schedule, Scenario};
use crate::error::{validation, Error, Result};
use crate::timing::{heartbeat_skew, sync_margin, OscillatorSpec};

/// Slack applied when deciding whether a nominal puncture instant still
/// fits inside a realized superframe.
const FIT_EPS: f64 = 1e-9;

/// One node's free-running clock state.
#[derive(Debug, Clone)]
pub struct NodeClock {
    node: u32,
    osc: OscillatorSpec,
    realized_drift_ppm: f64,
    last_reset_s: f64,
    skew_s: f64,
    rng: ChaCha12Rng,
}

impl NodeClock {
    /// Build a clock with a fixed drift realization (ppm, within the spec
    /// bound) and its own jitter RNG stream.
    pub fn new(node: u32, osc: OscillatorSpec, realized_drift_ppm: f64, rng_seed: u64) -> Result<Self> {
        if realized_drift_ppm.abs() > osc.drift_ppm() {
            return Err(validation(
                "realized_drift_ppm",
                "must lie within the oscillator drift bound",
            ));
        }
        Ok(Self {
            node,
            osc,
            realized_drift_ppm,
            last_reset_s: 0.0,
            skew_s: 0.0,
            rng: ChaCha12Rng::seed_from_u64(rng_seed),
        })
    }

    pub fn node(&self) -> u32 {
        self.node
    }

    pub fn realized_drift_ppm(&self) -> f64 {
        self.realized_drift_ppm
    }

    pub fn last_reset_s(&self) -> f64 {
        self.last_reset_s
    }

    pub fn skew_s(&self) -> f64 {
        self.skew_s
    }

    /// Reset the counter at a heartbeat: the node detects the beat after
    /// its skew and restarts local time from zero.
    pub fn reset(&mut self, beat_true_time_s: f64, skew_s: f64) {
        self.skew_s = skew_s;
        self.last_reset_s = beat_true_time_s + skew_s;
    }

    /// One accumulated-jitter draw after `n_cycles` oscillator cycles:
    /// Gaussian with standard deviation sigma * sqrt(n_cycles).
    pub fn accumulated_jitter_sample(&mut self, n_cycles: f64) -> f64 {
        let std = self.osc.sigma_s() * n_cycles.max(0.0).sqrt();
        if std == 0.0 {
            return 0.0;
        }
        Normal::new(0.0, std).expect("finite std").sample(&mut self.rng)
    }

    /// Local reading of this clock after `nominal_elapsed` seconds of true
    /// time since the last reset, before counter quantization.
    pub fn advance_clock_raw(&mut self, nominal_elapsed: f64) -> Result<f64> {
        if nominal_elapsed < 0.0 || nominal_elapsed.is_nan() {
            return Err(Error::NegativeDuration {
                value: nominal_elapsed,
            });
        }
        if self.osc.is_ideal() {
            return Ok(nominal_elapsed);
        }
        let n_cycles = (self.osc.f_osc_hz() * nominal_elapsed).round();
        let jitter = self.accumulated_jitter_sample(n_cycles);
        Ok(nominal_elapsed * (1.0 + self.realized_drift_ppm * 1e-6) + jitter)
    }

    /// Local reading after `nominal_elapsed` seconds of true time,
    /// quantized to whole oscillator periods (the counter granularity).
    pub fn advance_clock(&mut self, nominal_elapsed: f64) -> Result<f64> {
        let raw = self.advance_clock_raw(nominal_elapsed)?;
        if self.osc.is_ideal() {
            return Ok(raw);
        }
        Ok((raw * self.osc.f_osc_hz()).round() / self.osc.f_osc_hz())
    }

    /// True time at which this clock's counter reaches the local target
    /// (seconds since reset). The calibrated counter compare value is the
    /// nearest whole number of periods; drift stretches the realized
    /// period and the accumulated jitter shifts the crossing.
    pub fn true_time_of_local_target(&mut self, local_target_s: f64) -> f64 {
        if self.osc.is_ideal() {
            return self.last_reset_s + local_target_s;
        }
        let count = (local_target_s * self.osc.f_osc_hz()).round();
        let nominal = count / self.osc.f_osc_hz();
        let jitter = self.accumulated_jitter_sample(count);
        self.last_reset_s + nominal / (1.0 + self.realized_drift_ppm * 1e-6) + jitter
    }
}

/// Event vocabulary of a simulation trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimEventKind {
    Heartbeat,
    TimerTick,
    TxStart,
    TxEnd,
    RxOpen,
    RxClose,
    Hit,
    Miss,
}

impl SimEventKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SimEventKind::Heartbeat => "heartbeat",
            SimEventKind::TimerTick => "timer_tick",
            SimEventKind::TxStart => "tx_start",
            SimEventKind::TxEnd => "tx_end",
            SimEventKind::RxOpen => "rx_open",
            SimEventKind::RxClose => "rx_close",
            SimEventKind::Hit => "hit",
            SimEventKind::Miss => "miss",
        }
    }

    fn sort_rank(&self) -> u8 {
        match self {
            SimEventKind::RxOpen => 0,
            SimEventKind::TimerTick => 1,
            SimEventKind::TxStart => 2,
            SimEventKind::TxEnd => 3,
            SimEventKind::RxClose => 4,
            SimEventKind::Hit | SimEventKind::Miss => 5,
            SimEventKind::Heartbeat => 6,
        }
    }
}

/// One trace record. For puncture events `node` is the leaf whose slot
/// the event belongs to (receive windows included); heartbeat events use
/// node 0 and mark the physical beat. `puncture` is the 1-based schedule
/// index, 0 for non-puncture events.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimEvent {
    pub kind: SimEventKind,
    pub true_time_s: f64,
    pub node: u32,
    pub superframe: u32,
    pub puncture: u32,
}

/// Event-level record of one simulation run, ordered by true time.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SimTrace {
    pub events: Vec<SimEvent>,
}

impl SimTrace {
    /// Line-delimited export: `kind,true_time,node,superframe,puncture`.
    pub fn export_string(&self) -> String {
        let mut out = String::with_capacity(self.events.len() * 32);
        for e in &self.events {
            writeln!(
                out,
                "{},{},{},{},{}",
                e.kind.as_str(),
                e.true_time_s,
                e.node,
                e.superframe,
                e.puncture
            )
            .expect("write to string");
        }
        out
    }
}

/// Heartbeat interval model for a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HeartRateModel {
    /// Every superframe lasts exactly the scenario period.
    Fixed,
    /// Each superframe duration is drawn uniformly from the interval,
    /// exercising the scheme's automatic adaptation: scheduled punctures
    /// falling beyond a short beat are skipped.
    Uniform { t_min_s: f64, t_max_s: f64 },
}

/// Knobs for a simulation run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimOptions {
    pub heart_rate: HeartRateModel,
    /// When set, the per-puncture margin is split between the two sides:
    /// the hub window opens only half a margin early and the leaf widens
    /// its transmission envelope by the other half. Default off: the full
    /// margin sits on the receive window.
    pub split_margin: bool,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self {
            heart_rate: HeartRateModel::Fixed,
            split_margin: false,
        }
    }
}

/// Aggregated outcome of one run, recomputable from its trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmpiricalMetrics {
    pub punctures_total: u64,
    pub punctures_hit: u64,
    pub hit_rate: f64,
    pub ca_empirical: f64,
    pub p_empirical_w: f64,
    pub mean_rx_wait_s: f64,
}

/// Run the simulation with default options (fixed heart rate, full margin
/// on the receive window).
pub fn run_simulation(
    scenario: &Scenario,
    n_superframes: u32,
    seed: u64,
) -> Result<(SimTrace, EmpiricalMetrics)> {
    run_simulation_with(scenario, n_superframes, seed, &SimOptions::default())
}

/// Run the simulation. Identical (scenario, superframes, seed, options)
/// produce an identical trace byte stream.
pub fn run_simulation_with(
    scenario: &Scenario,
    n_superframes: u32,
    seed: u64,
    options: &SimOptions,
) -> Result<(SimTrace, EmpiricalMetrics)> {
    if n_superframes < 1 {
        return Err(validation("sim.superframes", "must be >= 1"));
    }
    if let HeartRateModel::Uniform { t_min_s, t_max_s } = options.heart_rate {
        if !t_min_s.is_finite() || !t_max_s.is_finite() || t_min_s <= 0.0 || t_max_s < t_min_s {
            return Err(validation("sim.t_min_s", "need 0 < t_min_s <= t_max_s"));
        }
    }

    let schedule = build_schedule(scenario)?;
    let n_leaves = scenario.n_leaves();
    let tx_pp = schedule.tx_per_puncture_s;
    let skew_bound = heartbeat_skew(scenario.channel());

    let mut master = ChaCha12Rng::seed_from_u64(seed);
    let mut clocks: Vec<NodeClock> = (0..=n_leaves)
        .map(|node| {
            let drift_bound = scenario.osc().drift_ppm();
            let realized = if drift_bound > 0.0 && !scenario.osc().is_ideal() {
                master.gen_range(-drift_bound..=drift_bound)
            } else {
                0.0
            };
            let node_seed: u64 = master.gen();
            NodeClock::new(node, *scenario.osc(), realized, node_seed)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut events: Vec<SimEvent> = Vec::new();
    let mut beat_time = 0.0f64;

    for superframe in 0..n_superframes {
        let period = match options.heart_rate {
            HeartRateModel::Fixed => scenario.superframe_s(),
            HeartRateModel::Uniform { t_min_s, t_max_s } => {
                if t_max_s > t_min_s {
                    master.gen_range(t_min_s..=t_max_s)
                } else {
                    t_min_s
                }
            }
        };
        events.push(SimEvent {
            kind: SimEventKind::Heartbeat,
            true_time_s: beat_time,
            node: 0,
            superframe,
            puncture: 0,
        });
        for clock in clocks.iter_mut() {
            let skew = if skew_bound > 0.0 {
                clock.rng.gen_range(0.0..=skew_bound)
            } else {
                0.0
            };
            clock.reset(beat_time, skew);
        }

        for leaf in 1..=n_leaves {
            for (idx, &t_j) in schedule.instants_s.iter().enumerate() {
                let puncture = idx as u32 + 1;
                // Punctures scheduled past the realized beat never fire:
                // the next heartbeat resets the counter first.
                if t_j > period * (1.0 + FIT_EPS) {
                    continue;
                }
                // Leaves are serialized back-to-back within a slot.
                let t_target = t_j + (leaf - 1) as f64 * tx_pp;
                let margin =
                    sync_margin(scenario.osc(), scenario.channel(), t_target)?.total_s;

                let (hub_center, leaf_fire) = {
                    let (hubs, leaves) = clocks.split_at_mut(1);
                    (
                        hubs[0].true_time_of_local_target(t_target),
                        leaves[leaf as usize - 1].true_time_of_local_target(t_target),
                    )
                };

                let rx_margin = if options.split_margin { margin / 2.0 } else { margin };
                let rx_open = (hub_center - rx_margin).max(clocks[0].last_reset_s());
                let rx_sched_close = hub_center + tx_pp + rx_margin;

                let (tx_start, tx_end) = if options.split_margin {
                    (leaf_fire - margin / 2.0, leaf_fire + tx_pp + margin / 2.0)
                } else {
                    (leaf_fire, leaf_fire + tx_pp)
                };

                let hit = if options.split_margin {
                    // The hub must hear continuous signal for at least one
                    // full payload inside its window.
                    let overlap = tx_end.min(rx_sched_close) - tx_start.max(rx_open);
                    overlap >= tx_pp
                } else {
                    tx_start >= rx_open && tx_end <= rx_sched_close
                };
                let rx_close = if hit {
                    tx_start.max(rx_open) + tx_pp
                } else {
                    rx_sched_close
                };

                let ev = |kind, true_time_s| SimEvent {
                    kind,
                    true_time_s,
                    node: leaf,
                    superframe,
                    puncture,
                };
                events.push(ev(SimEventKind::RxOpen, rx_open));
                events.push(ev(SimEventKind::TimerTick, tx_start));
                events.push(ev(SimEventKind::TxStart, tx_start));
                events.push(ev(SimEventKind::TxEnd, tx_end));
                events.push(ev(SimEventKind::RxClose, rx_close));
                events.push(ev(
                    if hit { SimEventKind::Hit } else { SimEventKind::Miss },
                    rx_close,
                ));
            }
        }
        beat_time += period;
    }

    // The terminal beat closes the last superframe so the trace carries
    // the exact simulated span.
    events.push(SimEvent {
        kind: SimEventKind::Heartbeat,
        true_time_s: beat_time,
        node: 0,
        superframe: n_superframes,
        puncture: 0,
    });

    events.sort_by(|a, b| {
        a.true_time_s
            .total_cmp(&b.true_time_s)
            .then(a.kind.sort_rank().cmp(&b.kind.sort_rank()))
    });

    let trace = SimTrace { events };
    let metrics = empirical_metrics(&trace, scenario)?;
    Ok((trace, metrics))
}

#[derive(Default, Clone, Copy)]
struct PunctureIntervals {
    tx_start: Option<f64>,
    tx_end: Option<f64>,
    rx_open: Option<f64>,
    rx_close: Option<f64>,
}

/// Recompute the aggregate metrics purely from a trace. The metrics
/// returned by [`run_simulation`] come from this same accounting, so the
/// two always agree.
pub fn empirical_metrics(trace: &SimTrace, scenario: &Scenario) -> Result<EmpiricalMetrics> {
    let mut prev = f64::NEG_INFINITY;
    for e in &trace.events {
        if e.true_time_s < prev {
            return Err(Error::MalformedTrace(format!(
                "event times decrease at {} ({})",
                e.true_time_s,
                e.kind.as_str()
            )));
        }
        prev = e.true_time_s;
    }

    let beats: Vec<f64> = trace
        .events
        .iter()
        .filter(|e| e.kind == SimEventKind::Heartbeat)
        .map(|e| e.true_time_s)
        .collect();
    if beats.len() < 2 {
        return Err(Error::MalformedTrace(
            "need at least two heartbeat events to span a superframe".into(),
        ));
    }
    let n_superframes = (beats.len() - 1) as f64;
    let span = beats[beats.len() - 1] - beats[0];
    if !span.is_finite() || span <= 0.0 {
        return Err(Error::MalformedTrace("zero simulated span".into()));
    }

    let mut punctures: BTreeMap<(u32, u32, u32), PunctureIntervals> = BTreeMap::new();
    let mut hits = 0u64;
    for e in &trace.events {
        let key = (e.node, e.superframe, e.puncture);
        match e.kind {
            SimEventKind::TxStart => punctures.entry(key).or_default().tx_start = Some(e.true_time_s),
            SimEventKind::TxEnd => punctures.entry(key).or_default().tx_end = Some(e.true_time_s),
            SimEventKind::RxOpen => punctures.entry(key).or_default().rx_open = Some(e.true_time_s),
            SimEventKind::RxClose => punctures.entry(key).or_default().rx_close = Some(e.true_time_s),
            SimEventKind::Hit => hits += 1,
            _ => {}
        }
    }

    let mut tx_sum = 0.0;
    let mut rx_sum = 0.0;
    let mut union_sum = 0.0;
    let mut wait_sum = 0.0;
    let mut total = 0u64;
    for (key, p) in &punctures {
        let (Some(ts), Some(te), Some(ro), Some(rc)) = (p.tx_start, p.tx_end, p.rx_open, p.rx_close)
        else {
            return Err(Error::MalformedTrace(format!(
                "unpaired tx/rx events for node {} superframe {} puncture {}",
                key.0, key.1, key.2
            )));
        };
        if te < ts || rc < ro {
            return Err(Error::MalformedTrace(format!(
                "interval ends before it starts for node {} superframe {} puncture {}",
                key.0, key.1, key.2
            )));
        }
        total += 1;
        let tx_len = te - ts;
        let rx_len = rc - ro;
        let overlap = (te.min(rc) - ts.max(ro)).max(0.0);
        tx_sum += tx_len;
        rx_sum += rx_len;
        union_sum += tx_len + rx_len - overlap;
        wait_sum += rx_len - overlap;
    }
    if hits > total {
        return Err(Error::MalformedTrace(format!(
            "{hits} hit events for {total} punctures"
        )));
    }

    let n = scenario.n_leaves() as f64;
    let static_w = (n + 1.0) * (scenario.power().p_hbd_w() + scenario.power().p_timer_w());
    let listen_w = match scenario.leaf_listen_window_s() {
        Some(w) => n * scenario.p_rx_w() * w * n_superframes / span,
        None => 0.0,
    };
    let p_empirical_w =
        static_w + (scenario.p_tx_w() * tx_sum + scenario.p_rx_w() * rx_sum) / span + listen_w;

    Ok(EmpiricalMetrics {
        punctures_total: total,
        punctures_hit: hits,
        hit_rate: if total > 0 { hits as f64 / total as f64 } else { 1.0 },
        ca_empirical: (1.0 - union_sum / span).clamp(0.0, 1.0),
        p_empirical_w,
        mean_rx_wait_s: if total > 0 { wait_sum / total as f64 } else { 0.0 },
    })
}
