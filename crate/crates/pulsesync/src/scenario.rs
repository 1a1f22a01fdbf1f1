//! Scenario files: a JSON document with optional sections whose absent
//! keys fall back to the reference operating-point defaults. Unknown keys
//! are rejected and invariant violations report the offending key path.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::analytic::{LinkSpec, PowerSpec, Scenario};
use crate::dutycycle::DutyCycleConfig;
use crate::error::{validation, Error, Result};
use crate::eventsim::{HeartRateModel, SimOptions};
use crate::timing::{BodyChannel, OscillatorSpec, DEFAULT_HEARTBEAT_SPEED_MPS};

pub const DEFAULT_F_OSC_HZ: f64 = 10e3;
pub const DEFAULT_SIGMA_S: f64 = 1e-6;
pub const DEFAULT_DRIFT_PPM: f64 = 500.0;
pub const DEFAULT_DISTANCE_M: f64 = 0.15;
pub const DEFAULT_DATA_RATE_BPS: f64 = 100e3;
pub const DEFAULT_DATA_GEN_BPS: f64 = 1e3;
pub const DEFAULT_WB_BITS: u32 = 16;
pub const DEFAULT_P_HBD_W: f64 = 100e-9;
pub const DEFAULT_P_TIMER_W: f64 = 100e-9;
pub const DEFAULT_E_TX_J_PER_BIT: f64 = 100e-12;
pub const DEFAULT_E_RX_J_PER_BIT: f64 = 100e-12;
pub const DEFAULT_N_LEAVES: u32 = 1;
pub const DEFAULT_SUPERFRAME_S: f64 = 0.8;
pub const DEFAULT_LATENCY_S: f64 = 0.05;
pub const DEFAULT_BASELINE_DELTA: f64 = 0.1;
pub const DEFAULT_BASELINE_TRIALS: u64 = 10_000;
pub const DEFAULT_SIM_SUPERFRAMES: u32 = 100;
pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct OscillatorSection {
    f_osc_hz: Option<f64>,
    sigma_s: Option<f64>,
    drift_ppm: Option<f64>,
    ideal: Option<bool>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChannelSection {
    distance_m: Option<f64>,
    v_hb_mps: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct LinkSection {
    data_rate_bps: Option<f64>,
    data_gen_bps: Option<f64>,
    wb_bits: Option<u32>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct PowerSection {
    p_hbd_w: Option<f64>,
    p_timer_w: Option<f64>,
    e_tx_j_per_bit: Option<f64>,
    e_rx_j_per_bit: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SystemSection {
    n_leaves: Option<u32>,
    superframe_s: Option<f64>,
    latency_s: Option<f64>,
    leaf_listen_window_s: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct BaselineSection {
    delta: Option<f64>,
    gap_s: Option<f64>,
    trials: Option<u64>,
    miss_prob: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SimSection {
    superframes: Option<u32>,
    seed: Option<u64>,
    t_min_s: Option<f64>,
    t_max_s: Option<f64>,
    split_margin: Option<bool>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    #[serde(default)]
    oscillator: OscillatorSection,
    #[serde(default)]
    channel: ChannelSection,
    #[serde(default)]
    link: LinkSection,
    #[serde(default)]
    power: PowerSection,
    #[serde(default)]
    system: SystemSection,
    #[serde(default)]
    baseline: BaselineSection,
    #[serde(default)]
    sim: SimSection,
}

/// Baseline settings resolved from the file (gap defaults to one beacon
/// time of the resolved link).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BaselineSettings {
    pub delta: f64,
    pub gap_s: f64,
    pub trials: u64,
    pub miss_prob: f64,
}

/// Simulation settings resolved from the file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimSettings {
    pub superframes: u32,
    pub seed: u64,
    pub t_min_s: Option<f64>,
    pub t_max_s: Option<f64>,
    pub split_margin: bool,
}

/// A validated scenario plus the baseline and simulation sections, with a
/// content hash for provenance headers.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedConfig {
    pub scenario: Scenario,
    pub baseline: BaselineSettings,
    pub sim: SimSettings,
    hash: String,
}

impl ResolvedConfig {
    /// Short content hash of the resolved configuration.
    pub fn scenario_hash(&self) -> &str {
        &self.hash
    }

    /// Override the RNG seed (command line and environment beat the file).
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.sim.seed = seed;
        self.rehash();
        self
    }

    /// Swap the scenario (e.g. for a sweep point) keeping the sections.
    pub fn with_scenario(mut self, scenario: Scenario) -> Self {
        self.scenario = scenario;
        self.rehash();
        self
    }

    /// Duty-cycle configuration matching this scenario's link, power,
    /// latency and leaf count.
    pub fn dutycycle_config(&self) -> Result<DutyCycleConfig> {
        DutyCycleConfig::new(
            self.baseline.delta,
            self.baseline.gap_s,
            *self.scenario.link(),
            *self.scenario.power(),
            self.scenario.latency_s(),
            self.scenario.n_leaves().max(1),
        )?
        .with_miss_prob(self.baseline.miss_prob)
    }

    /// Event-simulation options from the sim section.
    pub fn sim_options(&self) -> SimOptions {
        let heart_rate = match (self.sim.t_min_s, self.sim.t_max_s) {
            (Some(t_min_s), Some(t_max_s)) => HeartRateModel::Uniform { t_min_s, t_max_s },
            _ => HeartRateModel::Fixed,
        };
        SimOptions {
            heart_rate,
            split_margin: self.sim.split_margin,
        }
    }

    /// Superframe range for worst-case comparisons: the configured
    /// heart-period band when present, otherwise +/-50% around the
    /// scenario superframe.
    pub fn compare_superframe_range(&self) -> (f64, f64) {
        match (self.sim.t_min_s, self.sim.t_max_s) {
            (Some(lo), Some(hi)) => (lo, hi),
            _ => (
                0.5 * self.scenario.superframe_s(),
                1.5 * self.scenario.superframe_s(),
            ),
        }
    }

    fn rehash(&mut self) {
        self.hash = hash_resolved(&self.scenario, &self.baseline, &self.sim);
    }
}

fn hash_resolved(scenario: &Scenario, baseline: &BaselineSettings, sim: &SimSettings) -> String {
    #[derive(Serialize)]
    struct Canonical<'a> {
        scenario: &'a Scenario,
        baseline: &'a BaselineSettings,
        sim: &'a SimSettings,
    }
    let json = serde_json::to_string(&Canonical {
        scenario,
        baseline,
        sim,
    })
    .expect("resolved config serializes");
    let digest = Sha256::digest(json.as_bytes());
    let mut hex = String::with_capacity(12);
    for b in digest.iter().take(6) {
        hex.push_str(&format!("{b:02x}"));
    }
    hex
}

/// Parse and validate a scenario document from a string.
pub fn parse_scenario_str(text: &str) -> Result<ResolvedConfig> {
    let file: ScenarioFile = serde_json::from_str(text)
        .map_err(|e| Error::ScenarioLoad(format!("malformed JSON: {e}")))?;
    resolve(file)
}

/// Parse and validate a scenario document from a file path.
pub fn parse_scenario(path: &Path) -> Result<ResolvedConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::ScenarioLoad(format!("{}: {e}", path.display())))?;
    parse_scenario_str(&text)
}

/// The all-defaults configuration (equivalent to parsing `{}`).
pub fn default_config() -> ResolvedConfig {
    parse_scenario_str("{}").expect("default scenario resolves")
}

fn resolve(file: ScenarioFile) -> Result<ResolvedConfig> {
    let osc = if file.oscillator.ideal.unwrap_or(false) {
        OscillatorSpec::ideal(file.oscillator.f_osc_hz.unwrap_or(DEFAULT_F_OSC_HZ))
    } else {
        OscillatorSpec::new(
            file.oscillator.f_osc_hz.unwrap_or(DEFAULT_F_OSC_HZ),
            file.oscillator.sigma_s.unwrap_or(DEFAULT_SIGMA_S),
            file.oscillator.drift_ppm.unwrap_or(DEFAULT_DRIFT_PPM),
        )?
    };
    let channel = BodyChannel::new(
        file.channel.distance_m.unwrap_or(DEFAULT_DISTANCE_M),
        file.channel.v_hb_mps.unwrap_or(DEFAULT_HEARTBEAT_SPEED_MPS),
    )?;
    let link = LinkSpec::new(
        file.link.data_rate_bps.unwrap_or(DEFAULT_DATA_RATE_BPS),
        file.link.data_gen_bps.unwrap_or(DEFAULT_DATA_GEN_BPS),
        file.link.wb_bits.unwrap_or(DEFAULT_WB_BITS),
    )?;
    let power = PowerSpec::new(
        file.power.p_hbd_w.unwrap_or(DEFAULT_P_HBD_W),
        file.power.p_timer_w.unwrap_or(DEFAULT_P_TIMER_W),
        file.power.e_tx_j_per_bit.unwrap_or(DEFAULT_E_TX_J_PER_BIT),
        file.power.e_rx_j_per_bit.unwrap_or(DEFAULT_E_RX_J_PER_BIT),
    )?;
    let mut scenario = Scenario::new(
        file.system.n_leaves.unwrap_or(DEFAULT_N_LEAVES),
        osc,
        channel,
        link,
        power,
        file.system.superframe_s.unwrap_or(DEFAULT_SUPERFRAME_S),
        file.system.latency_s.unwrap_or(DEFAULT_LATENCY_S),
    )?;
    if let Some(window) = file.system.leaf_listen_window_s {
        scenario = scenario.with_leaf_listen_window(window)?;
    }

    let baseline = BaselineSettings {
        delta: file.baseline.delta.unwrap_or(DEFAULT_BASELINE_DELTA),
        gap_s: file.baseline.gap_s.unwrap_or_else(|| link.beacon_time_s()),
        trials: file.baseline.trials.unwrap_or(DEFAULT_BASELINE_TRIALS),
        miss_prob: file.baseline.miss_prob.unwrap_or(0.0),
    };
    if !baseline.delta.is_finite() || baseline.delta <= 0.0 || baseline.delta > 1.0 {
        return Err(validation("baseline.delta", "must be in (0, 1]"));
    }
    if baseline.trials < 1 {
        return Err(validation("baseline.trials", "must be >= 1"));
    }

    let sim = SimSettings {
        superframes: file.sim.superframes.unwrap_or(DEFAULT_SIM_SUPERFRAMES),
        seed: file.sim.seed.unwrap_or(DEFAULT_SEED),
        t_min_s: file.sim.t_min_s,
        t_max_s: file.sim.t_max_s,
        split_margin: file.sim.split_margin.unwrap_or(false),
    };
    if sim.superframes < 1 {
        return Err(validation("sim.superframes", "must be >= 1"));
    }
    match (sim.t_min_s, sim.t_max_s) {
        (None, None) => {}
        (Some(lo), Some(hi)) => {
            if !lo.is_finite() || !hi.is_finite() || lo <= 0.0 || hi < lo {
                return Err(validation("sim.t_min_s", "need 0 < t_min_s <= t_max_s"));
            }
        }
        _ => {
            return Err(validation(
                "sim.t_min_s",
                "t_min_s and t_max_s must be set together",
            ));
        }
    }

    let hash = hash_resolved(&scenario, &baseline, &sim);
    Ok(ResolvedConfig {
        scenario,
        baseline,
        sim,
        hash,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn empty_object_yields_full_defaults() {
        let cfg = parse_scenario_str("{}").unwrap();
        let s = &cfg.scenario;
        assert_eq!(s.n_leaves(), 1);
        assert_relative_eq!(s.superframe_s(), 0.8, max_relative = 1e-12);
        assert_relative_eq!(s.latency_s(), 0.05, max_relative = 1e-12);
        assert_relative_eq!(s.osc().f_osc_hz(), 10e3, max_relative = 1e-12);
        assert_relative_eq!(s.osc().sigma_s(), 1e-6, max_relative = 1e-12);
        assert_relative_eq!(s.osc().drift_ppm(), 500.0, max_relative = 1e-12);
        assert_relative_eq!(s.channel().distance_m(), 0.15, max_relative = 1e-12);
        assert_relative_eq!(s.link().data_rate_bps(), 100e3, max_relative = 1e-12);
        assert_eq!(s.link().wb_bits(), 16);
        assert_relative_eq!(s.power().p_hbd_w(), 100e-9, max_relative = 1e-12);
        assert_relative_eq!(cfg.baseline.gap_s, 160e-6, max_relative = 1e-12);
        assert_eq!(cfg.baseline.trials, 10_000);
        assert_eq!(cfg.sim.seed, 42);
        assert_eq!(cfg.sim.superframes, 100);
        assert_eq!(cfg.scenario_hash().len(), 12);
    }

    #[test]
    fn single_override_keeps_other_defaults() {
        let cfg = parse_scenario_str(r#"{"system":{"latency_s":0.2}}"#).unwrap();
        assert_relative_eq!(cfg.scenario.latency_s(), 0.2, max_relative = 1e-12);
        assert_relative_eq!(cfg.scenario.superframe_s(), 0.8, max_relative = 1e-12);
        assert_ne!(cfg.scenario_hash(), default_config().scenario_hash());
    }

    #[test]
    fn invalid_value_names_its_key_path() {
        let err = parse_scenario_str(r#"{"oscillator":{"f_osc_hz":-1}}"#).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("oscillator.f_osc_hz"), "message: {msg}");
        assert_eq!(err.exit_code(), 2);

        let err = parse_scenario_str(r#"{"system":{"latency_s":0.9}}"#).unwrap_err();
        assert!(err.to_string().contains("system.latency_s"));
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(parse_scenario_str(r#"{"oscillator":{"freq_hz":1000}}"#).is_err());
        assert!(parse_scenario_str(r#"{"extras":{}}"#).is_err());
        assert!(parse_scenario_str("not json").is_err());
    }

    #[test]
    fn gap_default_tracks_beacon_time() {
        let cfg = parse_scenario_str(r#"{"link":{"wb_bits":32}}"#).unwrap();
        assert_relative_eq!(cfg.baseline.gap_s, 320e-6, max_relative = 1e-12);
        let cfg = parse_scenario_str(r#"{"baseline":{"gap_s":0.0}}"#).unwrap();
        assert_eq!(cfg.baseline.gap_s, 0.0);
    }

    #[test]
    fn heart_rate_band_requires_both_bounds() {
        assert!(parse_scenario_str(r#"{"sim":{"t_min_s":0.5}}"#).is_err());
        let cfg = parse_scenario_str(r#"{"sim":{"t_min_s":0.5,"t_max_s":0.7}}"#).unwrap();
        assert_eq!(cfg.compare_superframe_range(), (0.5, 0.7));
        assert!(matches!(
            cfg.sim_options().heart_rate,
            HeartRateModel::Uniform { .. }
        ));
        let cfg = default_config();
        assert_eq!(cfg.compare_superframe_range(), (0.4, 1.2000000000000002));
        assert!(matches!(cfg.sim_options().heart_rate, HeartRateModel::Fixed));
    }

    #[test]
    fn ideal_oscillator_flag() {
        let cfg = parse_scenario_str(r#"{"oscillator":{"ideal":true}}"#).unwrap();
        assert!(cfg.scenario.osc().is_ideal());
    }

    #[test]
    fn seed_override_changes_hash() {
        let cfg = default_config();
        let reseeded = cfg.clone().with_seed(7);
        assert_eq!(reseeded.sim.seed, 7);
        assert_ne!(cfg.scenario_hash(), reseeded.scenario_hash());
    }
}
