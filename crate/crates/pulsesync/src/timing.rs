//! Closed-form models of per-node timing inaccuracy and body-channel skew.
//!
//! Three error sources accumulate between two consecutive heartbeat resets:
//! counter quantization (one oscillator period after offset calibration),
//! bounded frequency drift (linear in elapsed time) and accumulated random
//! jitter (a zero-mean Gaussian whose standard deviation grows with the
//! square root of the cycle count). The body channel adds a propagation
//! skew bounded by distance over the cardiac signal speed. All durations
//! are double-precision seconds.

use serde::Serialize;

use crate::error::{validation, Error, Result};

/// Default propagation speed of the cardiac pressure/electric signal
/// along the body, in m/s (lower bound, worst case for skew).
pub const DEFAULT_HEARTBEAT_SPEED_MPS: f64 = 250.0;

/// Free-running oscillator behind a node timer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OscillatorSpec {
    f_osc_hz: f64,
    sigma_s: f64,
    drift_ppm: f64,
    ideal: bool,
}

impl OscillatorSpec {
    /// Build a spec from frequency (Hz), per-cycle jitter standard
    /// deviation (s) and bounded drift (ppm).
    pub fn new(f_osc_hz: f64, sigma_s: f64, drift_ppm: f64) -> Result<Self> {
        if !f_osc_hz.is_finite() || f_osc_hz <= 0.0 {
            return Err(validation("oscillator.f_osc_hz", "must be finite and > 0"));
        }
        if !sigma_s.is_finite() || sigma_s < 0.0 {
            return Err(validation("oscillator.sigma_s", "must be finite and >= 0"));
        }
        if !drift_ppm.is_finite() || drift_ppm < 0.0 {
            return Err(validation("oscillator.drift_ppm", "must be finite and >= 0"));
        }
        Ok(Self {
            f_osc_hz,
            sigma_s,
            drift_ppm,
            ideal: false,
        })
    }

    /// A perfect timer: no jitter, no drift, and the counter quantization
    /// term forced to zero. Used to isolate scheduling effects from clock
    /// effects in tests and sweeps.
    pub fn ideal(f_osc_hz: f64) -> Self {
        Self {
            f_osc_hz,
            sigma_s: 0.0,
            drift_ppm: 0.0,
            ideal: true,
        }
    }

    pub fn f_osc_hz(&self) -> f64 {
        self.f_osc_hz
    }

    pub fn sigma_s(&self) -> f64 {
        self.sigma_s
    }

    pub fn drift_ppm(&self) -> f64 {
        self.drift_ppm
    }

    pub fn is_ideal(&self) -> bool {
        self.ideal
    }

    /// Nominal oscillator period 1 / f_osc.
    pub fn period_s(&self) -> f64 {
        1.0 / self.f_osc_hz
    }

    /// Same oscillator with a different nominal frequency.
    pub fn with_frequency(&self, f_osc_hz: f64) -> Result<Self> {
        let mut osc = OscillatorSpec::new(f_osc_hz, self.sigma_s, self.drift_ppm)?;
        osc.ideal = self.ideal;
        Ok(osc)
    }
}

/// Separation between two body-worn nodes and the cardiac signal speed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BodyChannel {
    distance_m: f64,
    v_hb_mps: f64,
}

impl BodyChannel {
    pub fn new(distance_m: f64, v_hb_mps: f64) -> Result<Self> {
        if !distance_m.is_finite() || distance_m < 0.0 {
            return Err(validation("channel.distance_m", "must be finite and >= 0"));
        }
        if !v_hb_mps.is_finite() || v_hb_mps <= 0.0 {
            return Err(validation("channel.v_hb_mps", "must be finite and > 0"));
        }
        Ok(Self {
            distance_m,
            v_hb_mps,
        })
    }

    /// Channel at the given separation with the default signal speed.
    pub fn at_distance(distance_m: f64) -> Result<Self> {
        Self::new(distance_m, DEFAULT_HEARTBEAT_SPEED_MPS)
    }

    pub fn distance_m(&self) -> f64 {
        self.distance_m
    }

    pub fn v_hb_mps(&self) -> f64 {
        self.v_hb_mps
    }
}

/// Per-puncture synchronization margin and its components, all in seconds.
///
/// `total_s` is exactly `t_hb_s + 2 * (dt_counter_s + dt_drift_s + dt_jitter_s)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MarginBreakdown {
    /// Heartbeat propagation skew between the two nodes.
    pub t_hb_s: f64,
    /// Counter quantization residual (one oscillator period).
    pub dt_counter_s: f64,
    /// Bounded drift accumulated since the last reset.
    pub dt_drift_s: f64,
    /// Four-sigma window on the accumulated random jitter.
    pub dt_jitter_s: f64,
    /// Total margin taken per puncturing event.
    pub total_s: f64,
}

/// Worst-case heartbeat propagation delay between the two nodes.
pub fn heartbeat_skew(channel: &BodyChannel) -> f64 {
    channel.distance_m / channel.v_hb_mps
}

/// Residual timing uncertainty after one-time offset calibration: a single
/// oscillator period (zero for a forced-ideal oscillator).
pub fn counter_quantization(osc: &OscillatorSpec) -> f64 {
    if osc.ideal {
        0.0
    } else {
        1.0 / osc.f_osc_hz
    }
}

/// Deterministic, bounded drift after `t` seconds since the last reset.
pub fn drift_inaccuracy(osc: &OscillatorSpec, t: f64) -> Result<f64> {
    if t < 0.0 || t.is_nan() {
        return Err(Error::NegativeDuration { value: t });
    }
    Ok(osc.drift_ppm * 1e-6 * t)
}

/// Four-sigma window on the random jitter accumulated over N = f_osc * t
/// cycles. The per-cycle jitters are independent and zero-mean, so the
/// accumulated deviation is Gaussian with standard deviation sigma * sqrt(N).
pub fn jitter_inaccuracy(osc: &OscillatorSpec, t: f64) -> Result<f64> {
    if t < 0.0 || t.is_nan() {
        return Err(Error::NegativeDuration { value: t });
    }
    Ok(4.0 * (osc.f_osc_hz * t).sqrt() * osc.sigma_s)
}

/// Synchronization margin taken per puncturing event at elapsed time `t`
/// since the last heartbeat reset. Both clocks can deviate in opposite
/// directions, hence the factor two on every per-clock term; the skew
/// enters once as the worst-case detection offset between the nodes.
pub fn sync_margin(osc: &OscillatorSpec, channel: &BodyChannel, t: f64) -> Result<MarginBreakdown> {
    let t_hb_s = heartbeat_skew(channel);
    let dt_counter_s = counter_quantization(osc);
    let dt_drift_s = drift_inaccuracy(osc, t)?;
    let dt_jitter_s = jitter_inaccuracy(osc, t)?;
    let total_s = t_hb_s + 2.0 * (dt_counter_s + dt_drift_s + dt_jitter_s);
    Ok(MarginBreakdown {
        t_hb_s,
        dt_counter_s,
        dt_drift_s,
        dt_jitter_s,
        total_s,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;
    use rand_distr::{Distribution, Normal};

    fn table_osc() -> OscillatorSpec {
        OscillatorSpec::new(10e3, 1e-6, 500.0).unwrap()
    }

    #[test]
    fn skew_examples() {
        let c = BodyChannel::at_distance(0.15).unwrap();
        assert_relative_eq!(heartbeat_skew(&c), 600e-6, max_relative = 1e-12);
        let zero = BodyChannel::at_distance(0.0).unwrap();
        assert_eq!(heartbeat_skew(&zero), 0.0);
        let half = BodyChannel::at_distance(0.5).unwrap();
        assert_relative_eq!(heartbeat_skew(&half), 2e-3, max_relative = 1e-12);
    }

    #[test]
    fn quantization_examples() {
        assert_relative_eq!(counter_quantization(&table_osc()), 100e-6, max_relative = 1e-12);
        let one = OscillatorSpec::new(1.0, 0.0, 0.0).unwrap();
        assert_eq!(counter_quantization(&one), 1.0);
        let khz = OscillatorSpec::new(1e3, 0.0, 0.0).unwrap();
        assert_relative_eq!(counter_quantization(&khz), 1e-3, max_relative = 1e-12);
        assert_eq!(counter_quantization(&OscillatorSpec::ideal(10e3)), 0.0);
    }

    #[test]
    fn drift_examples() {
        let osc = table_osc();
        assert_relative_eq!(drift_inaccuracy(&osc, 0.8).unwrap(), 400e-6, max_relative = 1e-12);
        assert_eq!(drift_inaccuracy(&osc, 0.0).unwrap(), 0.0);
        assert_relative_eq!(drift_inaccuracy(&osc, 0.05).unwrap(), 25e-6, max_relative = 1e-12);
        assert!(drift_inaccuracy(&osc, -1.0).is_err());
    }

    #[test]
    fn jitter_examples() {
        let osc = table_osc();
        // 4 * sqrt(8000) us and 4 * sqrt(500) us, worked by hand.
        assert_relative_eq!(
            jitter_inaccuracy(&osc, 0.8).unwrap(),
            4.0 * 8000f64.sqrt() * 1e-6,
            max_relative = 1e-15
        );
        assert_relative_eq!(jitter_inaccuracy(&osc, 0.8).unwrap(), 357.77e-6, max_relative = 1e-4);
        assert_eq!(jitter_inaccuracy(&osc, 0.0).unwrap(), 0.0);
        assert_relative_eq!(jitter_inaccuracy(&osc, 0.05).unwrap(), 89.44e-6, max_relative = 1e-4);
        assert!(jitter_inaccuracy(&osc, -0.1).is_err());
    }

    #[test]
    fn margin_examples() {
        let osc = table_osc();
        let c = BodyChannel::at_distance(0.15).unwrap();
        let m = sync_margin(&osc, &c, 0.8).unwrap();
        assert_relative_eq!(m.total_s, 2315.5e-6, max_relative = 1e-4);
        let m = sync_margin(&osc, &c, 0.05).unwrap();
        assert_relative_eq!(m.total_s, 1028.9e-6, max_relative = 1e-4);

        // Only the quantization term remains for a noiseless co-located pair.
        let quiet = OscillatorSpec::new(10e3, 0.0, 0.0).unwrap();
        let here = BodyChannel::at_distance(0.0).unwrap();
        let m = sync_margin(&quiet, &here, 3.7).unwrap();
        assert_eq!(m.total_s, 2.0 / 10e3);
    }

    #[test]
    fn margin_identity_is_bit_exact() {
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        for _ in 0..200 {
            let osc = OscillatorSpec::new(
                rng.gen_range(1.0..1e7),
                rng.gen_range(0.0..1e-5),
                rng.gen_range(0.0..1e3),
            )
            .unwrap();
            let c = BodyChannel::new(rng.gen_range(0.0..1.0), rng.gen_range(1.0..500.0)).unwrap();
            let t = rng.gen_range(0.0..2.0);
            let m = sync_margin(&osc, &c, t).unwrap();
            assert!(m.t_hb_s >= 0.0 && m.dt_counter_s >= 0.0 && m.dt_drift_s >= 0.0);
            assert!(m.dt_jitter_s >= 0.0 && m.total_s >= 0.0);
            let recomputed = m.t_hb_s + 2.0 * (m.dt_counter_s + m.dt_drift_s + m.dt_jitter_s);
            assert_eq!(m.total_s, recomputed);
        }
    }

    #[test]
    fn margin_monotone_in_elapsed_time() {
        let osc = table_osc();
        let c = BodyChannel::at_distance(0.15).unwrap();
        let mut prev = 0.0;
        for i in 0..100 {
            let t = i as f64 * 0.013;
            let m = sync_margin(&osc, &c, t).unwrap().total_s;
            assert!(m >= prev, "margin decreased at t={t}");
            prev = m;
        }
    }

    #[test]
    fn jitter_sqrt_scaling_is_exact() {
        let osc = table_osc();
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        for _ in 0..100 {
            let t = rng.gen_range(1e-6..10.0);
            let j1 = jitter_inaccuracy(&osc, t).unwrap();
            let j4 = jitter_inaccuracy(&osc, 4.0 * t).unwrap();
            assert_eq!(j4, 2.0 * j1);
        }
    }

    #[test]
    fn drift_is_linear() {
        let osc = table_osc();
        let mut rng = ChaCha12Rng::seed_from_u64(13);
        for _ in 0..100 {
            let a = rng.gen_range(0.0..5.0);
            let b = rng.gen_range(0.0..5.0);
            let lhs = drift_inaccuracy(&osc, a + b).unwrap();
            let rhs = drift_inaccuracy(&osc, a).unwrap() + drift_inaccuracy(&osc, b).unwrap();
            assert_relative_eq!(lhs, rhs, max_relative = 1e-14);
            // Doubling scales exactly (power-of-two factor).
            assert_eq!(
                drift_inaccuracy(&osc, 2.0 * a).unwrap(),
                2.0 * drift_inaccuracy(&osc, a).unwrap()
            );
        }
    }

    #[test]
    fn accumulated_jitter_matches_per_cycle_sums() {
        // Brute-force oracle: summing n independent per-cycle jitters must
        // have the same spread as a single sigma * sqrt(n) Gaussian draw.
        let sigma = 1e-6;
        let n_cycles = 256;
        let normal = Normal::new(0.0, sigma).unwrap();
        for (samples, seed) in [(10_000usize, 21u64), (100_000usize, 22u64)] {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            let mut sum_sq = 0.0;
            for _ in 0..samples {
                let acc: f64 = (0..n_cycles).map(|_| normal.sample(&mut rng)).sum();
                sum_sq += acc * acc;
            }
            let sample_std = (sum_sq / samples as f64).sqrt();
            let expected = sigma * (n_cycles as f64).sqrt();
            assert!(
                (sample_std / expected - 1.0).abs() < 0.03,
                "sample std {sample_std} vs expected {expected} at {samples} samples"
            );
        }
    }

    #[test]
    fn construction_rejects_invalid_specs() {
        assert!(OscillatorSpec::new(0.0, 0.0, 0.0).is_err());
        assert!(OscillatorSpec::new(-10.0, 0.0, 0.0).is_err());
        assert!(OscillatorSpec::new(10.0, -1e-9, 0.0).is_err());
        assert!(OscillatorSpec::new(10.0, 0.0, -1.0).is_err());
        assert!(OscillatorSpec::new(f64::NAN, 0.0, 0.0).is_err());
        assert!(BodyChannel::new(-0.1, 250.0).is_err());
        assert!(BodyChannel::new(0.1, 0.0).is_err());
    }
}
