//! Closed-form evaluation of the heartbeat scheme: puncture schedules,
//! total synchronization margins, channel availability, system power and
//! the oscillator-frequency trade-off sweep.
//!
//! Availability and power come in two flavors. The ideal case charges
//! only the scheduled transmission airtime. The realistic case books the
//! worst-case wait: the receiver may have to sit through twice the
//! per-puncture synchronization margin before the data lands, and both
//! the availability loss and the receive-power penalty are driven by the
//! same accumulated wait fraction.

use serde::Serialize;

use crate::error::{validation, Error, Result};
use crate::timing::{
    counter_quantization, drift_inaccuracy, jitter_inaccuracy, sync_margin, BodyChannel,
    OscillatorSpec,
};

/// Guard against floating-point noise in T / t_lat when the division is
/// conceptually exact (e.g. 0.7 / 0.05).
const RATIO_EPS: f64 = 1e-9;

/// Radio link parameters shared by hub and leaves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinkSpec {
    data_rate_bps: f64,
    data_gen_bps: f64,
    wb_bits: u32,
}

impl LinkSpec {
    pub fn new(data_rate_bps: f64, data_gen_bps: f64, wb_bits: u32) -> Result<Self> {
        if !data_rate_bps.is_finite() || data_rate_bps <= 0.0 {
            return Err(validation("link.data_rate_bps", "must be finite and > 0"));
        }
        if !data_gen_bps.is_finite() || data_gen_bps < 0.0 {
            return Err(validation("link.data_gen_bps", "must be finite and >= 0"));
        }
        if data_gen_bps > data_rate_bps {
            return Err(validation(
                "link.data_gen_bps",
                "must not exceed link.data_rate_bps",
            ));
        }
        if wb_bits < 1 {
            return Err(validation("link.wb_bits", "must be >= 1"));
        }
        Ok(Self {
            data_rate_bps,
            data_gen_bps,
            wb_bits,
        })
    }

    pub fn data_rate_bps(&self) -> f64 {
        self.data_rate_bps
    }

    pub fn data_gen_bps(&self) -> f64 {
        self.data_gen_bps
    }

    pub fn wb_bits(&self) -> u32 {
        self.wb_bits
    }

    /// Airtime of one wake-up beacon.
    pub fn beacon_time_s(&self) -> f64 {
        self.wb_bits as f64 / self.data_rate_bps
    }

    /// Fraction of channel time one leaf's generated data occupies.
    pub fn tx_fraction(&self) -> f64 {
        self.data_gen_bps / self.data_rate_bps
    }
}

/// Static power of the always-on blocks and the radio energy efficiency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerSpec {
    p_hbd_w: f64,
    p_timer_w: f64,
    e_tx_j_per_bit: f64,
    e_rx_j_per_bit: f64,
}

impl PowerSpec {
    pub fn new(p_hbd_w: f64, p_timer_w: f64, e_tx_j_per_bit: f64, e_rx_j_per_bit: f64) -> Result<Self> {
        for (name, v) in [
            ("power.p_hbd_w", p_hbd_w),
            ("power.p_timer_w", p_timer_w),
            ("power.e_tx_j_per_bit", e_tx_j_per_bit),
            ("power.e_rx_j_per_bit", e_rx_j_per_bit),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(validation(name, "must be finite and >= 0"));
            }
        }
        Ok(Self {
            p_hbd_w,
            p_timer_w,
            e_tx_j_per_bit,
            e_rx_j_per_bit,
        })
    }

    pub fn p_hbd_w(&self) -> f64 {
        self.p_hbd_w
    }

    pub fn p_timer_w(&self) -> f64 {
        self.p_timer_w
    }

    pub fn e_tx_j_per_bit(&self) -> f64 {
        self.e_tx_j_per_bit
    }

    pub fn e_rx_j_per_bit(&self) -> f64 {
        self.e_rx_j_per_bit
    }

    /// Transmitter power while active: data rate times Tx energy per bit.
    pub fn p_tx_w(&self, data_rate_bps: f64) -> f64 {
        data_rate_bps * self.e_tx_j_per_bit
    }

    /// Receiver power while listening: data rate times Rx energy per bit.
    pub fn p_rx_w(&self, data_rate_bps: f64) -> f64 {
        data_rate_bps * self.e_rx_j_per_bit
    }
}

/// Full system description for one operating point: node counts, clock and
/// channel specs, link rates, power figures, superframe period and the
/// upload latency target.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Scenario {
    n_leaves: u32,
    osc: OscillatorSpec,
    channel: BodyChannel,
    link: LinkSpec,
    power: PowerSpec,
    superframe_s: f64,
    latency_s: f64,
    /// Optional once-per-superframe leaf listening window; when set, its
    /// receive power is charged on top of the puncture accounting.
    leaf_listen_window_s: Option<f64>,
}

impl Scenario {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        n_leaves: u32,
        osc: OscillatorSpec,
        channel: BodyChannel,
        link: LinkSpec,
        power: PowerSpec,
        superframe_s: f64,
        latency_s: f64,
    ) -> Result<Self> {
        if !superframe_s.is_finite() || superframe_s <= 0.0 {
            return Err(validation("system.superframe_s", "must be finite and > 0"));
        }
        if !latency_s.is_finite() || latency_s <= 0.0 {
            return Err(validation("system.latency_s", "must be finite and > 0"));
        }
        if latency_s > superframe_s {
            return Err(validation(
                "system.latency_s",
                "must not exceed system.superframe_s",
            ));
        }
        Ok(Self {
            n_leaves,
            osc,
            channel,
            link,
            power,
            superframe_s,
            latency_s,
            leaf_listen_window_s: None,
        })
    }

    pub fn n_leaves(&self) -> u32 {
        self.n_leaves
    }

    pub fn osc(&self) -> &OscillatorSpec {
        &self.osc
    }

    pub fn channel(&self) -> &BodyChannel {
        &self.channel
    }

    pub fn link(&self) -> &LinkSpec {
        &self.link
    }

    pub fn power(&self) -> &PowerSpec {
        &self.power
    }

    pub fn superframe_s(&self) -> f64 {
        self.superframe_s
    }

    pub fn latency_s(&self) -> f64 {
        self.latency_s
    }

    pub fn leaf_listen_window_s(&self) -> Option<f64> {
        self.leaf_listen_window_s
    }

    pub fn p_tx_w(&self) -> f64 {
        self.power.p_tx_w(self.link.data_rate_bps)
    }

    pub fn p_rx_w(&self) -> f64 {
        self.power.p_rx_w(self.link.data_rate_bps)
    }

    /// Enable the once-per-superframe leaf listening window charge.
    pub fn with_leaf_listen_window(mut self, window_s: f64) -> Result<Self> {
        if !window_s.is_finite() || window_s < 0.0 {
            return Err(validation(
                "system.leaf_listen_window_s",
                "must be finite and >= 0",
            ));
        }
        self.leaf_listen_window_s = Some(window_s);
        Ok(self)
    }

    pub fn with_latency(&self, latency_s: f64) -> Result<Self> {
        let mut s = Scenario::new(
            self.n_leaves,
            self.osc,
            self.channel,
            self.link,
            self.power,
            self.superframe_s,
            latency_s,
        )?;
        s.leaf_listen_window_s = self.leaf_listen_window_s;
        Ok(s)
    }

    pub fn with_superframe(&self, superframe_s: f64) -> Result<Self> {
        let mut s = Scenario::new(
            self.n_leaves,
            self.osc,
            self.channel,
            self.link,
            self.power,
            superframe_s,
            self.latency_s,
        )?;
        s.leaf_listen_window_s = self.leaf_listen_window_s;
        Ok(s)
    }

    pub fn with_n_leaves(&self, n_leaves: u32) -> Self {
        let mut s = *self;
        s.n_leaves = n_leaves;
        s
    }

    pub fn with_osc(&self, osc: OscillatorSpec) -> Self {
        let mut s = *self;
        s.osc = osc;
        s
    }

    pub fn with_channel(&self, channel: BodyChannel) -> Self {
        let mut s = *self;
        s.channel = channel;
        s
    }
}

impl Default for Scenario {
    /// Reference low-power BAN operating point: 10 kHz timer with 1 us
    /// per-cycle jitter and 500 ppm drift, 15 cm leaf-hub separation,
    /// 100 kb/s link carrying 1 kb/s per leaf, 16-bit beacons, 100 nW
    /// detector and timer, 100 pJ/b radios, one leaf, 0.8 s superframe
    /// (75 bpm) and a 50 ms upload latency target.
    fn default() -> Self {
        Scenario::new(
            1,
            OscillatorSpec::new(10e3, 1e-6, 500.0).expect("default oscillator"),
            BodyChannel::at_distance(0.15).expect("default channel"),
            LinkSpec::new(100e3, 1e3, 16).expect("default link"),
            PowerSpec::new(100e-9, 100e-9, 100e-12, 100e-12).expect("default power"),
            0.8,
            0.05,
        )
        .expect("default scenario")
    }
}

/// Per-superframe puncture instants and transmission durations, identical
/// for every leaf (homogeneous-leaf assumption).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PunctureSchedule {
    /// Punctures per superframe per leaf.
    pub punctures_per_superframe: u32,
    /// Scheduled instants t_j = j * t_lat, j = 1..=n_p, seconds from the
    /// superframe start.
    pub instants_s: Vec<f64>,
    /// Transmission duration of a single puncture.
    pub tx_per_puncture_s: f64,
    /// Total per-leaf transmission time per superframe.
    pub tx_total_s: f64,
}

impl PunctureSchedule {
    /// Build the schedule for one superframe: as many latency intervals as
    /// fit, each puncture uploading the data generated during one interval.
    pub fn build(superframe_s: f64, latency_s: f64, link: &LinkSpec) -> Result<Self> {
        if !latency_s.is_finite()
            || latency_s <= 0.0
            || !superframe_s.is_finite()
            || superframe_s <= 0.0
        {
            return Err(validation(
                "system.latency_s",
                "superframe and latency must be > 0",
            ));
        }
        let n_p = (superframe_s / latency_s + RATIO_EPS).floor() as u32;
        if n_p == 0 {
            return Err(Error::EmptySchedule {
                superframe_s,
                latency_s,
            });
        }
        let instants_s: Vec<f64> = (1..=n_p).map(|j| j as f64 * latency_s).collect();
        let tx_per_puncture_s = link.data_gen_bps * latency_s / link.data_rate_bps;
        let tx_total_s = n_p as f64 * tx_per_puncture_s;
        Ok(Self {
            punctures_per_superframe: n_p,
            instants_s,
            tx_per_puncture_s,
            tx_total_s,
        })
    }
}

/// Schedule for the scenario's superframe, latency and link settings.
pub fn build_schedule(scenario: &Scenario) -> Result<PunctureSchedule> {
    PunctureSchedule::build(scenario.superframe_s, scenario.latency_s, &scenario.link)
}

/// Total synchronization margin accumulated by one leaf over a superframe:
/// the per-puncture margin summed over every scheduled instant.
pub fn total_margin(
    schedule: &PunctureSchedule,
    osc: &OscillatorSpec,
    channel: &BodyChannel,
) -> Result<f64> {
    let mut sum = 0.0;
    for &t in &schedule.instants_s {
        sum += sync_margin(osc, channel, t)?.total_s;
    }
    Ok(sum)
}

/// Worst-case wait time per leaf per superframe: the receiver can lag the
/// transmitter by the full margin on each side, so each puncture costs
/// twice its synchronization margin.
pub fn wait_time(
    schedule: &PunctureSchedule,
    osc: &OscillatorSpec,
    channel: &BodyChannel,
) -> Result<f64> {
    Ok(2.0 * total_margin(schedule, osc, channel)?)
}

/// Aggregate wait fraction sum(t_w_i) / T over all leaves.
fn wait_fraction(scenario: &Scenario) -> Result<f64> {
    let schedule = build_schedule(scenario)?;
    let per_leaf_wait = wait_time(&schedule, &scenario.osc, &scenario.channel)?;
    Ok(scenario.n_leaves as f64 * per_leaf_wait / scenario.superframe_s)
}

fn tx_fraction_total(scenario: &Scenario) -> Result<f64> {
    let fraction = scenario.n_leaves as f64 * scenario.link.tx_fraction();
    if fraction > 1.0 {
        return Err(Error::Oversubscribed {
            tx_fraction: fraction,
        });
    }
    Ok(fraction)
}

/// Ideal channel availability: one minus the transmission fraction of all
/// leaves. Depends only on the generation/channel rate ratio, not on the
/// latency target.
pub fn ca_ideal(scenario: &Scenario) -> Result<f64> {
    Ok(1.0 - tx_fraction_total(scenario)?)
}

/// Realistic channel availability: the ideal value degraded by the
/// accumulated worst-case wait fraction. Errors with [`Error::Saturated`]
/// when the waits exceed the ideal availability.
pub fn ca_real(scenario: &Scenario) -> Result<f64> {
    let ideal = ca_ideal(scenario)?;
    let wf = if scenario.n_leaves == 0 {
        0.0
    } else {
        wait_fraction(scenario)?
    };
    let real = ideal - wf;
    if real < 0.0 {
        return Err(Error::Saturated { wait_fraction: wf });
    }
    Ok(real)
}

/// Ideal system power for n leaves and one hub: always-on detector and
/// timer blocks plus transmit and receive power during the scheduled
/// airtime (plus the optional leaf listening window when enabled).
pub fn p_ideal(scenario: &Scenario) -> Result<f64> {
    let n = scenario.n_leaves as f64;
    let static_w = (n + 1.0) * (scenario.power.p_hbd_w + scenario.power.p_timer_w);
    let tx_fraction = if scenario.n_leaves == 0 {
        0.0
    } else {
        tx_fraction_total(scenario)?
    };
    let radio_w = (scenario.p_tx_w() + scenario.p_rx_w()) * tx_fraction;
    let listen_w = match scenario.leaf_listen_window_s {
        Some(w) => n * scenario.p_rx_w() * w / scenario.superframe_s,
        None => 0.0,
    };
    Ok(static_w + radio_w + listen_w)
}

/// Realistic system power: the ideal value plus receive power during the
/// accumulated wait time.
pub fn p_real(scenario: &Scenario) -> Result<f64> {
    let ideal = p_ideal(scenario)?;
    let wf = if scenario.n_leaves == 0 {
        0.0
    } else {
        wait_fraction(scenario)?
    };
    Ok(ideal + scenario.p_rx_w() * wf)
}

/// Availability, power, margin and wait figures for one operating point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricsReport {
    pub ca_ideal: f64,
    pub ca_real: f64,
    pub p_ideal_w: f64,
    pub p_real_w: f64,
    /// Total margin summed over punctures and leaves.
    pub m_tot_s: f64,
    /// Total worst-case wait, exactly twice `m_tot_s`.
    pub t_wait_s: f64,
    /// Echo of the latency target the report was computed for.
    pub latency_s: f64,
    /// Set when the waits exceeded the ideal availability and `ca_real`
    /// was clamped to zero.
    pub saturated: bool,
}

/// Evaluate every metric for a scenario. Saturated points clamp `ca_real`
/// to zero and set the flag instead of failing, so sweeps survive extreme
/// corners; schedule and oversubscription errors still propagate.
pub fn evaluate(scenario: &Scenario) -> Result<MetricsReport> {
    let ideal = ca_ideal(scenario)?;
    let (m_tot, wf) = if scenario.n_leaves == 0 {
        (0.0, 0.0)
    } else {
        let schedule = build_schedule(scenario)?;
        let per_leaf = total_margin(&schedule, &scenario.osc, &scenario.channel)?;
        let m_tot = scenario.n_leaves as f64 * per_leaf;
        (m_tot, 2.0 * m_tot / scenario.superframe_s)
    };
    let raw_real = ideal - wf;
    let saturated = raw_real < 0.0;
    let ca_real = if saturated { 0.0 } else { raw_real };
    let p_ideal_w = p_ideal(scenario)?;
    let p_real_w = p_ideal_w + scenario.p_rx_w() * wf;
    Ok(MetricsReport {
        ca_ideal: ideal,
        ca_real,
        p_ideal_w,
        p_real_w,
        m_tot_s: m_tot,
        t_wait_s: 2.0 * m_tot,
        latency_s: scenario.latency_s,
        saturated,
    })
}

/// One point of the timing-inaccuracy versus oscillator-frequency curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InaccuracyPoint {
    pub f_osc_hz: f64,
    pub dt_counter_s: f64,
    pub dt_drift_s: f64,
    pub dt_jitter_s: f64,
    pub total_s: f64,
}

/// Per-clock timing inaccuracy at elapsed time `t` across a frequency
/// grid: quantization falls with frequency while accumulated jitter grows
/// with it, so the total has an interior optimum.
pub fn inaccuracy_vs_fosc(
    osc_template: &OscillatorSpec,
    t: f64,
    f_grid: &[f64],
) -> Result<Vec<InaccuracyPoint>> {
    if f_grid.is_empty() {
        return Err(Error::InvalidRange("empty frequency grid".into()));
    }
    f_grid
        .iter()
        .map(|&f| {
            let osc = osc_template.with_frequency(f)?;
            let dt_counter_s = counter_quantization(&osc);
            let dt_drift_s = drift_inaccuracy(&osc, t)?;
            let dt_jitter_s = jitter_inaccuracy(&osc, t)?;
            Ok(InaccuracyPoint {
                f_osc_hz: f,
                dt_counter_s,
                dt_drift_s,
                dt_jitter_s,
                total_s: dt_counter_s + dt_drift_s + dt_jitter_s,
            })
        })
        .collect()
}

/// Scenario parameter that an evaluation sweep can vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    Superframe,
    Latency,
    NLeaves,
    Distance,
    FOsc,
    DriftPpm,
    Sigma,
}

impl SweepAxis {
    pub fn name(&self) -> &'static str {
        match self {
            SweepAxis::Superframe => "superframe",
            SweepAxis::Latency => "latency",
            SweepAxis::NLeaves => "n_leaves",
            SweepAxis::Distance => "distance",
            SweepAxis::FOsc => "f_osc",
            SweepAxis::DriftPpm => "drift_ppm",
            SweepAxis::Sigma => "sigma",
        }
    }
}

impl std::str::FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "superframe" => Ok(SweepAxis::Superframe),
            "latency" => Ok(SweepAxis::Latency),
            "n_leaves" => Ok(SweepAxis::NLeaves),
            "distance" => Ok(SweepAxis::Distance),
            "f_osc" => Ok(SweepAxis::FOsc),
            "drift_ppm" => Ok(SweepAxis::DriftPpm),
            "sigma" => Ok(SweepAxis::Sigma),
            other => Err(Error::UnknownAxis(other.to_string())),
        }
    }
}

/// The scenario with one parameter replaced by a sweep value.
pub fn apply_axis(scenario: &Scenario, axis: SweepAxis, value: f64) -> Result<Scenario> {
    match axis {
        SweepAxis::Superframe => scenario.with_superframe(value),
        SweepAxis::Latency => scenario.with_latency(value),
        SweepAxis::NLeaves => {
            if !value.is_finite() || value < 0.0 || value.fract().abs() > 1e-9 || value > u32::MAX as f64 {
                return Err(validation("n_leaves", "must be a non-negative integer"));
            }
            Ok(scenario.with_n_leaves(value.round() as u32))
        }
        SweepAxis::Distance => Ok(scenario.with_channel(BodyChannel::new(
            value,
            scenario.channel.v_hb_mps(),
        )?)),
        SweepAxis::FOsc => Ok(scenario.with_osc(scenario.osc.with_frequency(value)?)),
        SweepAxis::DriftPpm => Ok(scenario.with_osc(OscillatorSpec::new(
            scenario.osc.f_osc_hz(),
            scenario.osc.sigma_s(),
            value,
        )?)),
        SweepAxis::Sigma => Ok(scenario.with_osc(OscillatorSpec::new(
            scenario.osc.f_osc_hz(),
            value,
            scenario.osc.drift_ppm(),
        )?)),
    }
}

/// Evaluate the scenario once per axis value, in input order.
pub fn sweep(scenario: &Scenario, axis: SweepAxis, values: &[f64]) -> Result<Vec<MetricsReport>> {
    values
        .iter()
        .map(|&v| evaluate(&apply_axis(scenario, axis, v)?))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    // Frozen by direct summation of the margin formula over j = 1..=16
    // and j = 1..=4 (see the brute-force oracle below).
    const M_TOT_50MS: f64 = 27.5549e-3;
    const M_TOT_200MS: f64 = 7.39895e-3;

    /// Independent oracle: re-derive the total margin from scalar
    /// arithmetic without going through the timing module.
    fn brute_force_margin(t_lat: f64, n_p: u32) -> f64 {
        let (f, sigma, drift_ppm, d, v) = (10e3, 1e-6, 500.0, 0.15, 250.0);
        (1..=n_p)
            .map(|j| {
                let t = j as f64 * t_lat;
                d / v + 2.0 * (1.0 / f + drift_ppm * 1e-6 * t + 4.0 * (f * t).sqrt() * sigma)
            })
            .sum()
    }

    #[test]
    fn schedule_examples() {
        let s = Scenario::default();
        let sched = build_schedule(&s).unwrap();
        assert_eq!(sched.punctures_per_superframe, 16);
        assert_relative_eq!(sched.tx_per_puncture_s, 0.5e-3, max_relative = 1e-12);
        assert_relative_eq!(sched.tx_total_s, 8e-3, max_relative = 1e-12);
        assert_eq!(sched.instants_s.len(), 16);
        assert_relative_eq!(sched.instants_s[0], 0.05, max_relative = 1e-12);
        assert_relative_eq!(sched.instants_s[15], 0.8, max_relative = 1e-12);

        let sched = build_schedule(&s.with_latency(0.2).unwrap()).unwrap();
        assert_eq!(sched.punctures_per_superframe, 4);
        assert_relative_eq!(sched.tx_per_puncture_s, 2e-3, max_relative = 1e-12);

        // No puncture fits when the latency exceeds the superframe.
        let err = PunctureSchedule::build(0.8, 0.9, s.link()).unwrap_err();
        assert!(matches!(err, Error::EmptySchedule { .. }));
    }

    #[test]
    fn schedule_instants_increase_and_fit() {
        let s = Scenario::default();
        for t_lat in [0.03, 0.05, 0.07, 0.11, 0.2, 0.8] {
            let sched = PunctureSchedule::build(0.8, t_lat, s.link()).unwrap();
            let mut prev = 0.0;
            for &t in &sched.instants_s {
                assert!(t > prev);
                assert!(t <= 0.8 * (1.0 + 1e-9));
                prev = t;
            }
            assert_relative_eq!(
                sched.tx_total_s,
                sched.punctures_per_superframe as f64 * sched.tx_per_puncture_s,
                max_relative = 1e-15
            );
        }
    }

    #[test]
    fn total_margin_matches_summation_oracle() {
        let s = Scenario::default();
        let sched = build_schedule(&s).unwrap();
        let m = total_margin(&sched, s.osc(), s.channel()).unwrap();
        assert_relative_eq!(m, brute_force_margin(0.05, 16), max_relative = 1e-12);
        assert_relative_eq!(m, M_TOT_50MS, max_relative = 1e-4);

        let s200 = s.with_latency(0.2).unwrap();
        let sched = build_schedule(&s200).unwrap();
        let m = total_margin(&sched, s.osc(), s.channel()).unwrap();
        assert_relative_eq!(m, brute_force_margin(0.2, 4), max_relative = 1e-12);
        assert_relative_eq!(m, M_TOT_200MS, max_relative = 1e-4);

        // A single puncture reduces to one sync_margin call.
        let sched = PunctureSchedule::build(0.8, 0.8, s.link()).unwrap();
        assert_eq!(sched.punctures_per_superframe, 1);
        let m = total_margin(&sched, s.osc(), s.channel()).unwrap();
        assert_eq!(m, sync_margin(s.osc(), s.channel(), 0.8).unwrap().total_s);
    }

    #[test]
    fn wait_time_examples() {
        let s = Scenario::default();
        let sched = build_schedule(&s).unwrap();
        let w = wait_time(&sched, s.osc(), s.channel()).unwrap();
        assert_relative_eq!(w, 55.11e-3, max_relative = 1e-3);

        let sched = build_schedule(&s.with_latency(0.2).unwrap()).unwrap();
        let w = wait_time(&sched, s.osc(), s.channel()).unwrap();
        assert_relative_eq!(w, 14.80e-3, max_relative = 1e-3);

        let ideal = s
            .with_osc(OscillatorSpec::ideal(10e3))
            .with_channel(BodyChannel::at_distance(0.0).unwrap());
        let sched = build_schedule(&ideal).unwrap();
        assert_eq!(wait_time(&sched, ideal.osc(), ideal.channel()).unwrap(), 0.0);
    }

    #[test]
    fn ca_examples() {
        let s = Scenario::default();
        assert_relative_eq!(ca_ideal(&s).unwrap(), 0.99, max_relative = 1e-12);
        assert_eq!(ca_ideal(&s.with_n_leaves(0)).unwrap(), 1.0);
        assert_relative_eq!(ca_ideal(&s.with_n_leaves(3)).unwrap(), 0.97, max_relative = 1e-12);

        assert_relative_eq!(ca_real(&s).unwrap(), 0.9211, max_relative = 1e-3);
        assert_relative_eq!(
            ca_real(&s.with_latency(0.2).unwrap()).unwrap(),
            0.9715,
            max_relative = 1e-3
        );

        let ideal = s
            .with_osc(OscillatorSpec::ideal(10e3))
            .with_channel(BodyChannel::at_distance(0.0).unwrap());
        assert_eq!(ca_real(&ideal).unwrap(), ca_ideal(&ideal).unwrap());
    }

    #[test]
    fn oversubscription_rejected() {
        // 80 leaves at 1.25% each exceed the channel.
        let s = Scenario::default().with_n_leaves(200);
        assert!(matches!(ca_ideal(&s), Err(Error::Oversubscribed { .. })));
        assert!(matches!(evaluate(&s), Err(Error::Oversubscribed { .. })));
    }

    #[test]
    fn power_examples() {
        let s = Scenario::default();
        assert_relative_eq!(p_ideal(&s).unwrap(), 600e-9, max_relative = 1e-12);
        assert_relative_eq!(p_ideal(&s.with_n_leaves(3)).unwrap(), 1.4e-6, max_relative = 1e-12);

        let no_data = Scenario::new(
            1,
            *s.osc(),
            *s.channel(),
            LinkSpec::new(100e3, 0.0, 16).unwrap(),
            *s.power(),
            0.8,
            0.05,
        )
        .unwrap();
        assert_relative_eq!(p_ideal(&no_data).unwrap(), 400e-9, max_relative = 1e-12);

        assert_relative_eq!(p_real(&s).unwrap(), 1.289e-6, max_relative = 1e-3);
        assert_relative_eq!(
            p_real(&s.with_latency(0.2).unwrap()).unwrap(),
            785e-9,
            max_relative = 1e-3
        );

        let ideal = s
            .with_osc(OscillatorSpec::ideal(10e3))
            .with_channel(BodyChannel::at_distance(0.0).unwrap());
        assert_eq!(p_real(&ideal).unwrap(), p_ideal(&ideal).unwrap());
    }

    #[test]
    fn evaluate_examples() {
        let s = Scenario::default();
        let r = evaluate(&s).unwrap();
        assert_relative_eq!(r.ca_real, 0.9211, max_relative = 1e-3);
        assert_relative_eq!(r.p_real_w, 1.289e-6, max_relative = 1e-3);
        assert_relative_eq!(r.t_wait_s, 55.11e-3, max_relative = 1e-3);
        assert_eq!(r.t_wait_s, 2.0 * r.m_tot_s);
        assert!(!r.saturated);

        let hub_alone = evaluate(&s.with_n_leaves(0)).unwrap();
        assert_eq!(hub_alone.ca_ideal, 1.0);
        assert_eq!(hub_alone.ca_real, 1.0);
        assert_relative_eq!(hub_alone.p_ideal_w, 200e-9, max_relative = 1e-12);
        assert_eq!(hub_alone.p_real_w, hub_alone.p_ideal_w);
        assert_eq!(hub_alone.t_wait_s, 0.0);

        let r = evaluate(&s.with_latency(0.2).unwrap()).unwrap();
        assert_relative_eq!(r.ca_real, 0.9715, max_relative = 1e-3);
        assert_relative_eq!(r.p_real_w, 785e-9, max_relative = 1e-3);
    }

    #[test]
    fn real_bounded_by_ideal_on_random_scenarios() {
        let mut rng = ChaCha12Rng::seed_from_u64(31);
        for _ in 0..200 {
            let osc = OscillatorSpec::new(
                rng.gen_range(100.0..1e6),
                rng.gen_range(0.0..3e-6),
                rng.gen_range(0.0..800.0),
            )
            .unwrap();
            let channel = BodyChannel::at_distance(rng.gen_range(0.0..0.5)).unwrap();
            let superframe: f64 = rng.gen_range(0.3..1.5);
            let latency = rng.gen_range(0.02..superframe.min(0.3));
            let s = Scenario::new(
                rng.gen_range(0..4),
                osc,
                channel,
                LinkSpec::new(100e3, 1e3, 16).unwrap(),
                PowerSpec::new(100e-9, 100e-9, 100e-12, 100e-12).unwrap(),
                superframe,
                latency,
            )
            .unwrap();
            let r = evaluate(&s).unwrap();
            assert!(r.ca_real <= r.ca_ideal && r.ca_ideal <= 1.0);
            assert!(0.0 <= r.ca_real);
            assert!(r.p_real_w >= r.p_ideal_w);
        }
    }

    #[test]
    fn forced_ideal_collapses_real_to_ideal_exactly() {
        let s = Scenario::default()
            .with_osc(OscillatorSpec::ideal(10e3))
            .with_channel(BodyChannel::at_distance(0.0).unwrap());
        let r = evaluate(&s).unwrap();
        assert_eq!(r.ca_real, r.ca_ideal);
        assert_eq!(r.p_real_w, r.p_ideal_w);
        assert_eq!(r.t_wait_s, 0.0);
    }

    #[test]
    fn ca_ideal_independent_of_latency_and_ca_real_decreasing_with_shorter_latency() {
        let s = Scenario::default();
        let base = ca_ideal(&s).unwrap();
        let mut prev_real = 0.0;
        for t_lat in [0.05, 0.08, 0.1, 0.2] {
            let v = s.with_latency(t_lat).unwrap();
            assert_eq!(ca_ideal(&v).unwrap(), base);
            let real = ca_real(&v).unwrap();
            assert!(real > prev_real, "ca_real not increasing with latency at {t_lat}");
            prev_real = real;
        }
    }

    #[test]
    fn availability_loss_and_power_penalty_are_coupled() {
        let mut rng = ChaCha12Rng::seed_from_u64(37);
        for _ in 0..100 {
            let s = Scenario::default()
                .with_latency(rng.gen_range(0.02..0.3))
                .unwrap()
                .with_n_leaves(rng.gen_range(1..4));
            let r = evaluate(&s).unwrap();
            if r.saturated {
                continue;
            }
            let loss = r.ca_ideal - r.ca_real;
            let penalty = r.p_real_w - r.p_ideal_w;
            assert_relative_eq!(penalty, s.p_rx_w() * loss, max_relative = 1e-9);
        }
    }

    #[test]
    fn rate_and_efficiency_scaling() {
        let s = Scenario::default();
        let doubled_link = LinkSpec::new(200e3, 2e3, 16).unwrap();
        let d = Scenario::new(1, *s.osc(), *s.channel(), doubled_link, *s.power(), 0.8, 0.05).unwrap();
        assert_eq!(ca_ideal(&d).unwrap(), ca_ideal(&s).unwrap());

        let p = s.power();
        let doubled_power =
            PowerSpec::new(p.p_hbd_w(), p.p_timer_w(), 2.0 * p.e_tx_j_per_bit(), p.e_rx_j_per_bit())
                .unwrap();
        let d = Scenario::new(1, *s.osc(), *s.channel(), *s.link(), doubled_power, 0.8, 0.05).unwrap();
        // Doubling e_tx adds exactly one extra Tx contribution.
        let base_tx = s.p_tx_w() * s.link().tx_fraction();
        assert_relative_eq!(
            p_ideal(&d).unwrap() - p_ideal(&s).unwrap(),
            base_tx,
            max_relative = 1e-12
        );
    }

    #[test]
    fn saturation_clamps_and_flags() {
        // A very noisy oscillator blows the margins past the superframe.
        let noisy = OscillatorSpec::new(10e3, 5e-4, 500.0).unwrap();
        let s = Scenario::default().with_osc(noisy);
        assert!(matches!(ca_real(&s), Err(Error::Saturated { .. })));
        let r = evaluate(&s).unwrap();
        assert!(r.saturated);
        assert_eq!(r.ca_real, 0.0);
        assert!(r.p_real_w > r.p_ideal_w);
    }

    #[test]
    fn inaccuracy_curve_examples() {
        let osc = Scenario::default();
        let pts = inaccuracy_vs_fosc(osc.osc(), 0.8, &[10e3]).unwrap();
        assert_relative_eq!(pts[0].total_s, 857.8e-6, max_relative = 2e-4);
        assert_relative_eq!(
            pts[0].total_s,
            1e-4 + 4e-4 + 4.0 * 8000f64.sqrt() * 1e-6,
            max_relative = 1e-12
        );

        // At 1 Hz the counter term is one full second and dominates.
        let pts = inaccuracy_vs_fosc(osc.osc(), 0.8, &[1.0]).unwrap();
        assert_eq!(pts[0].dt_counter_s, 1.0);
        assert!(pts[0].dt_counter_s / pts[0].total_s > 0.9);
    }

    #[test]
    fn inaccuracy_argmin_in_expected_band() {
        let s = Scenario::default();
        let grid: Vec<f64> = (0..400)
            .map(|i| 100.0 * (1e7f64 / 100.0).powf(i as f64 / 399.0))
            .collect();
        let pts = inaccuracy_vs_fosc(s.osc(), 0.8, &grid).unwrap();
        let best = pts
            .iter()
            .min_by(|a, b| a.total_s.partial_cmp(&b.total_s).unwrap())
            .unwrap();
        assert!(
            (5e3..=20e3).contains(&best.f_osc_hz),
            "argmin at {} Hz",
            best.f_osc_hz
        );
    }

    #[test]
    fn sweep_examples() {
        let s = Scenario::default();

        // Superframe axis at fixed 50 ms latency: later punctures carry
        // more drift and jitter, so availability erodes as the superframe
        // stretches.
        let t_values: Vec<f64> = (8..=24).map(|k| k as f64 * 0.05).collect();
        let reports = sweep(&s, SweepAxis::Superframe, &t_values).unwrap();
        for pair in reports.windows(2) {
            assert!(pair[1].ca_real < pair[0].ca_real);
        }

        // Latency axis reproduces the two single-point evaluations.
        let reports = sweep(&s, SweepAxis::Latency, &[0.05, 0.2]).unwrap();
        assert_eq!(reports[0], evaluate(&s).unwrap());
        assert_eq!(reports[1], evaluate(&s.with_latency(0.2).unwrap()).unwrap());

        // Leaf-count axis walks the ideal availability down in 1% steps.
        let reports = sweep(&s, SweepAxis::NLeaves, &[1.0, 2.0, 3.0]).unwrap();
        let expected = [0.99, 0.98, 0.97];
        for (r, e) in reports.iter().zip(expected) {
            assert_relative_eq!(r.ca_ideal, e, max_relative = 1e-12);
        }
    }

    #[test]
    fn sweep_rejects_bad_axis_values() {
        let s = Scenario::default();
        assert!(sweep(&s, SweepAxis::Latency, &[0.9]).is_err());
        assert!(sweep(&s, SweepAxis::NLeaves, &[1.5]).is_err());
        assert!(sweep(&s, SweepAxis::Distance, &[-0.1]).is_err());
        assert!(sweep(&s, SweepAxis::FOsc, &[0.0]).is_err());
        assert!("availability".parse::<SweepAxis>().is_err());
        assert_eq!("latency".parse::<SweepAxis>().unwrap(), SweepAxis::Latency);
    }
}
