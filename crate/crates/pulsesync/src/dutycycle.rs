//! Monte Carlo model of the duty-cycled wake-up-receiver baseline.
//!
//! Baseline leaves are not synchronized: each one wakes its receiver for a
//! short listening window once per wake period and otherwise sleeps. When
//! a leaf has data ready, the hub repeats wake-up beacons until the leaf's
//! next window catches a full one, after which the data transfer runs.
//! The rendezvous wait is random, so availability, power and the extra
//! latency are reported as mean/min/max over seeded trials.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::Serialize;

use crate::analytic::{LinkSpec, PowerSpec};
use crate::error::{validation, Result};

/// Configuration of the duty-cycled baseline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DutyCycleConfig {
    delta: f64,
    gap_s: f64,
    link: LinkSpec,
    power: PowerSpec,
    t_lat_s: f64,
    n_leaves: u32,
    miss_prob: f64,
}

impl DutyCycleConfig {
    /// Build a config. `delta` is the receiver duty-cycle ratio in (0, 1],
    /// `gap_s` the inter-beacon gap, `t_lat_s` the data-ready interval.
    pub fn new(
        delta: f64,
        gap_s: f64,
        link: LinkSpec,
        power: PowerSpec,
        t_lat_s: f64,
        n_leaves: u32,
    ) -> Result<Self> {
        if !delta.is_finite() || delta <= 0.0 || delta > 1.0 {
            return Err(validation("baseline.delta", "must be in (0, 1]"));
        }
        if !gap_s.is_finite() || gap_s < 0.0 {
            return Err(validation("baseline.gap_s", "must be finite and >= 0"));
        }
        if !t_lat_s.is_finite() || t_lat_s <= 0.0 {
            return Err(validation("system.latency_s", "must be finite and > 0"));
        }
        if n_leaves < 1 {
            return Err(validation(
                "system.n_leaves",
                "the baseline model needs at least one leaf",
            ));
        }
        Ok(Self {
            delta,
            gap_s,
            link,
            power,
            t_lat_s,
            n_leaves,
            miss_prob: 0.0,
        })
    }

    /// Probability that a leaf fails to decode a beacon inside a window
    /// and sleeps through to the next one. Default 0 (every window
    /// catches).
    pub fn with_miss_prob(mut self, miss_prob: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&miss_prob) {
            return Err(validation("baseline.miss_prob", "must be in [0, 1)"));
        }
        self.miss_prob = miss_prob;
        Ok(self)
    }

    pub fn with_delta(&self, delta: f64) -> Result<Self> {
        let mut c =
            DutyCycleConfig::new(delta, self.gap_s, self.link, self.power, self.t_lat_s, self.n_leaves)?;
        c.miss_prob = self.miss_prob;
        Ok(c)
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn gap_s(&self) -> f64 {
        self.gap_s
    }

    pub fn link(&self) -> &LinkSpec {
        &self.link
    }

    pub fn power(&self) -> &PowerSpec {
        &self.power
    }

    pub fn t_lat_s(&self) -> f64 {
        self.t_lat_s
    }

    pub fn n_leaves(&self) -> u32 {
        self.n_leaves
    }

    pub fn miss_prob(&self) -> f64 {
        self.miss_prob
    }

    /// Airtime of one wake-up beacon.
    pub fn beacon_time_s(&self) -> f64 {
        self.link.beacon_time_s()
    }

    /// Leaf listening window: two beacons plus one inter-beacon gap, wide
    /// enough that a continuously beaconing hub always lands one full
    /// beacon inside it.
    pub fn listen_window_s(&self) -> f64 {
        2.0 * self.beacon_time_s() + self.gap_s
    }

    /// Wake period: the listening window stretched by the duty-cycle
    /// ratio, always at least one window long.
    pub fn wake_period_s(&self) -> f64 {
        self.listen_window_s() / self.delta
    }
}

/// Trial aggregates of one baseline operating point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DutyCycleReport {
    pub delta: f64,
    pub ca_mean: f64,
    pub ca_min: f64,
    pub ca_max: f64,
    pub p_mean_w: f64,
    pub p_min_w: f64,
    pub p_max_w: f64,
    pub extra_latency_mean_s: f64,
    pub extra_latency_min_s: f64,
    pub extra_latency_max_s: f64,
    pub trials: u64,
    pub seed: u64,
}

/// Listening window duration for a config (two beacons plus the gap).
pub fn listen_window(config: &DutyCycleConfig) -> f64 {
    config.listen_window_s()
}

struct Accumulator {
    sum: f64,
    min: f64,
    max: f64,
}

impl Accumulator {
    fn new() -> Self {
        Self {
            sum: 0.0,
            min: f64::INFINITY,
            max: f64::NEG_INFINITY,
        }
    }

    fn push(&mut self, v: f64) {
        self.sum += v;
        self.min = self.min.min(v);
        self.max = self.max.max(v);
    }
}

/// Run seeded rendezvous trials for one duty-cycle operating point.
///
/// Each trial models one data-ready event: the wake phase is drawn
/// uniformly over the wake period, the hub beacons continuously from
/// data-ready until the leaf's window catches a full beacon, and the
/// trial's extra latency is the wait to that window start plus one beacon
/// time. Channel cost charges the beacon airtime and the data
/// transmission against the data-ready interval; power charges the leaf
/// duty-cycled listening, the hub beaconing, the data transfer on both
/// ends and the always-on timers.
pub fn simulate_rendezvous(
    config: &DutyCycleConfig,
    trials: u64,
    seed: u64,
) -> Result<DutyCycleReport> {
    if trials < 1 {
        return Err(validation("baseline.trials", "must be >= 1"));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let t_wb = config.beacon_time_s();
    let period = config.wake_period_s();
    let tx_time = config.link.data_gen_bps() * config.t_lat_s / config.link.data_rate_bps();
    let n = config.n_leaves as f64;
    let p_tx = config.power.p_tx_w(config.link.data_rate_bps());
    let p_rx = config.power.p_rx_w(config.link.data_rate_bps());
    let always_listening = config.delta >= 1.0;

    let mut ca = Accumulator::new();
    let mut p = Accumulator::new();
    let mut lat = Accumulator::new();

    for _ in 0..trials {
        // Wait until the start of the first listening window at or after
        // data-ready; an always-on receiver catches the first beacon
        // immediately.
        let mut wait = if always_listening {
            0.0
        } else {
            rng.gen_range(0.0..period)
        };
        if config.miss_prob > 0.0 {
            while rng.gen::<f64>() < config.miss_prob {
                wait += period;
            }
        }
        let extra_latency = wait + t_wb;

        // The hub transmits beacons from data-ready until rendezvous.
        let beacon_airtime = extra_latency;
        let ca_trial = (1.0 - (beacon_airtime + tx_time) / config.t_lat_s).max(0.0);
        let p_trial = n * config.delta * p_rx
            + p_tx * beacon_airtime / config.t_lat_s
            + (p_tx + p_rx) * tx_time / config.t_lat_s
            + (n + 1.0) * config.power.p_timer_w();

        ca.push(ca_trial);
        p.push(p_trial);
        lat.push(extra_latency);
    }

    let t = trials as f64;
    Ok(DutyCycleReport {
        delta: config.delta,
        ca_mean: ca.sum / t,
        ca_min: ca.min,
        ca_max: ca.max,
        p_mean_w: p.sum / t,
        p_min_w: p.min,
        p_max_w: p.max,
        extra_latency_mean_s: lat.sum / t,
        extra_latency_min_s: lat.min,
        extra_latency_max_s: lat.max,
        trials,
        seed,
    })
}

/// One report per duty-cycle value, in input order. Every point reuses the
/// same seed, so the underlying phase draws are common random numbers and
/// the reported curve is smooth in delta.
pub fn sweep_delta(
    config: &DutyCycleConfig,
    deltas: &[f64],
    trials: u64,
    seed: u64,
) -> Result<Vec<DutyCycleReport>> {
    deltas
        .iter()
        .map(|&d| simulate_rendezvous(&config.with_delta(d)?, trials, seed))
        .collect()
}

/// Duty-cycle ratio minimizing the mean power for a config, from setting
/// the derivative of the mean-power expression to zero.
pub fn optimal_delta(config: &DutyCycleConfig) -> f64 {
    let p_tx = config.power.p_tx_w(config.link.data_rate_bps());
    let p_rx = config.power.p_rx_w(config.link.data_rate_bps());
    let w = config.listen_window_s();
    (w * p_tx / (2.0 * config.t_lat_s * config.n_leaves as f64 * p_rx)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn table_config(delta: f64) -> DutyCycleConfig {
        let link = LinkSpec::new(100e3, 1e3, 16).unwrap();
        let power = PowerSpec::new(100e-9, 100e-9, 100e-12, 100e-12).unwrap();
        DutyCycleConfig::new(delta, 160e-6, link, power, 0.05, 1).unwrap()
    }

    #[test]
    fn listen_window_examples() {
        let c = table_config(0.1);
        assert_relative_eq!(listen_window(&c), 480e-6, max_relative = 1e-12);

        let link = LinkSpec::new(100e3, 1e3, 16).unwrap();
        let power = *c.power();
        let no_gap = DutyCycleConfig::new(0.1, 0.0, link, power, 0.05, 1).unwrap();
        assert_relative_eq!(listen_window(&no_gap), 320e-6, max_relative = 1e-12);

        let wide = LinkSpec::new(100e3, 1e3, 32).unwrap();
        let sym = DutyCycleConfig::new(0.1, wide.beacon_time_s(), wide, power, 0.05, 1).unwrap();
        assert_relative_eq!(listen_window(&sym), 960e-6, max_relative = 1e-12);
    }

    #[test]
    fn always_listening_rendezvous_is_immediate() {
        let c = table_config(1.0);
        let r = simulate_rendezvous(&c, 1000, 5).unwrap();
        assert!(r.extra_latency_max_s <= c.beacon_time_s());
        assert_eq!(r.extra_latency_min_s, r.extra_latency_max_s);
        // All leaf receivers on all the time.
        let p_rx = c.power().p_rx_w(c.link().data_rate_bps());
        assert!(r.p_mean_w > p_rx);
    }

    #[test]
    fn ten_percent_duty_cycle_latency_oracle() {
        // Wake period 4.8 ms: max wait just under one period plus a
        // beacon, mean wait half a period plus a beacon.
        let c = table_config(0.1);
        assert_relative_eq!(c.wake_period_s(), 4.8e-3, max_relative = 1e-12);
        let r = simulate_rendezvous(&c, 100_000, 9).unwrap();
        assert_relative_eq!(r.extra_latency_max_s, 4.8e-3 + 160e-6, max_relative = 0.01);
        assert_relative_eq!(r.extra_latency_mean_s, 2.4e-3 + 160e-6, max_relative = 0.02);
        assert!(r.extra_latency_max_s <= c.wake_period_s() + c.beacon_time_s());
    }

    #[test]
    fn one_percent_duty_cycle_bound() {
        let c = table_config(0.01);
        let r = simulate_rendezvous(&c, 50_000, 17).unwrap();
        assert_relative_eq!(r.extra_latency_max_s, 48e-3 + 160e-6, max_relative = 0.01);
        assert!(r.extra_latency_max_s <= c.wake_period_s() + c.beacon_time_s());
    }

    #[test]
    fn reproducible_reports() {
        let c = table_config(0.07);
        let a = simulate_rendezvous(&c, 5000, 123).unwrap();
        let b = simulate_rendezvous(&c, 5000, 123).unwrap();
        assert_eq!(a, b);
        let other_seed = simulate_rendezvous(&c, 5000, 124).unwrap();
        assert_ne!(a, other_seed);
    }

    #[test]
    fn mean_latency_converges_to_half_period_plus_beacon() {
        let c = table_config(0.1);
        let trials = 100_000u64;
        let r = simulate_rendezvous(&c, trials, 77).unwrap();
        let period = c.wake_period_s();
        let expected = period / 2.0 + c.beacon_time_s();
        // Uniform wait: std = period / sqrt(12); three standard errors.
        let se = period / 12f64.sqrt() / (trials as f64).sqrt();
        assert!(
            (r.extra_latency_mean_s - expected).abs() < 3.0 * se,
            "mean {} vs expected {} (3 se = {})",
            r.extra_latency_mean_s,
            expected,
            3.0 * se
        );
    }

    #[test]
    fn mean_latency_grows_inversely_with_delta() {
        let c = table_config(0.1);
        let reports = sweep_delta(&c, &[0.08, 0.04, 0.02, 0.01], 20_000, 3).unwrap();
        for pair in reports.windows(2) {
            // Halving delta roughly doubles the mean wait.
            let ratio = (pair[1].extra_latency_mean_s - c.beacon_time_s())
                / (pair[0].extra_latency_mean_s - c.beacon_time_s());
            assert!((ratio - 2.0).abs() < 0.1, "ratio {ratio}");
        }
    }

    #[test]
    fn power_curve_is_u_shaped_with_low_argmin() {
        let c = table_config(0.1);
        let deltas: Vec<f64> = (0..40)
            .map(|i| 0.005 * (0.5f64 / 0.005).powf(i as f64 / 39.0))
            .collect();
        let reports = sweep_delta(&c, &deltas, 10_000, 41).unwrap();

        let argmin = reports
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.p_mean_w.partial_cmp(&b.1.p_mean_w).unwrap())
            .map(|(i, _)| i)
            .unwrap();
        assert!(deltas[argmin] < 0.10, "argmin at delta {}", deltas[argmin]);
        assert_relative_eq!(optimal_delta(&c), 0.0693, max_relative = 1e-2);

        // Common random numbers make the sampled curve exactly V-shaped
        // on the grid: strictly decreasing to the argmin, increasing after.
        for i in 1..=argmin {
            assert!(reports[i].p_mean_w < reports[i - 1].p_mean_w);
        }
        for i in argmin + 1..reports.len() {
            assert!(reports[i].p_mean_w > reports[i - 1].p_mean_w);
        }
    }

    #[test]
    fn error_bars_are_strict_for_partial_duty_cycles() {
        let r = simulate_rendezvous(&table_config(0.2), 200, 7).unwrap();
        assert!(r.ca_min < r.ca_mean && r.ca_mean < r.ca_max);
        assert!(r.p_min_w < r.p_mean_w && r.p_mean_w < r.p_max_w);
        assert!(r.extra_latency_min_s < r.extra_latency_mean_s);
        assert!(r.extra_latency_mean_s < r.extra_latency_max_s);
    }

    #[test]
    fn miss_probability_extends_waits() {
        let base = simulate_rendezvous(&table_config(0.1), 50_000, 11).unwrap();
        let lossy = table_config(0.1).with_miss_prob(0.5).unwrap();
        let r = simulate_rendezvous(&lossy, 50_000, 11).unwrap();
        assert!(r.extra_latency_mean_s > base.extra_latency_mean_s);
        // Geometric retries add one period per expected miss.
        let expected = base.extra_latency_mean_s + table_config(0.1).wake_period_s();
        assert_relative_eq!(r.extra_latency_mean_s, expected, max_relative = 0.05);
    }

    #[test]
    fn invalid_configs_rejected() {
        let link = LinkSpec::new(100e3, 1e3, 16).unwrap();
        let power = PowerSpec::new(100e-9, 100e-9, 100e-12, 100e-12).unwrap();
        assert!(DutyCycleConfig::new(0.0, 0.0, link, power, 0.05, 1).is_err());
        assert!(DutyCycleConfig::new(1.1, 0.0, link, power, 0.05, 1).is_err());
        assert!(DutyCycleConfig::new(0.1, -1e-6, link, power, 0.05, 1).is_err());
        assert!(DutyCycleConfig::new(0.1, 0.0, link, power, 0.05, 0).is_err());
        assert!(simulate_rendezvous(&table_config(0.1), 0, 1).is_err());
    }
}
