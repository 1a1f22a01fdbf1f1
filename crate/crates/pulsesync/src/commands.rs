//! Command implementations behind the CLI: each one turns a resolved
//! configuration into a provenance-stamped result table (plus a trace for
//! the simulator). The thin binary handles flags and file writing.

use crate::analytic::{evaluate, inaccuracy_vs_fosc, p_real, sweep, SweepAxis};
use crate::chart::PlotSpec;
use crate::dutycycle::sweep_delta;
use crate::error::{Error, Result};
use crate::eventsim::{run_simulation_with, SimTrace};
use crate::scenario::ResolvedConfig;
use crate::table::{Provenance, ResultTable};
use crate::tool_version;

/// Default duty-cycle band swept by `baseline` and `compare`.
pub const BASELINE_DELTA_RANGE: RangeSpec = RangeSpec {
    from: 0.005,
    to: 0.5,
    points: 25,
    log: true,
};

/// Default latency pair compared by `compare`.
pub const COMPARE_LATENCIES: [f64; 2] = [0.05, 0.2];

/// Number of superframe grid points scanned for the worst-case heartbeat
/// power in `compare`.
const COMPARE_T_POINTS: u32 = 33;

/// A numeric range specification: `points` values from `from` to `to`,
/// spaced linearly or logarithmically.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeSpec {
    pub from: f64,
    pub to: f64,
    pub points: u32,
    pub log: bool,
}

impl RangeSpec {
    pub fn values(&self) -> Result<Vec<f64>> {
        if self.points < 1 {
            return Err(Error::InvalidRange("points must be >= 1".into()));
        }
        if !self.from.is_finite() || !self.to.is_finite() {
            return Err(Error::InvalidRange("bounds must be finite".into()));
        }
        if self.log && (self.from <= 0.0 || self.to <= 0.0) {
            return Err(Error::InvalidRange(
                "log spacing requires positive bounds".into(),
            ));
        }
        if self.points == 1 {
            return Ok(vec![self.from]);
        }
        let n = self.points as usize;
        let values = if self.log {
            let (lo, hi) = (self.from.ln(), self.to.ln());
            (0..n)
                .map(|i| (lo + (hi - lo) * i as f64 / (n - 1) as f64).exp())
                .collect()
        } else {
            (0..n)
                .map(|i| self.from + (self.to - self.from) * i as f64 / (n - 1) as f64)
                .collect()
        };
        Ok(values)
    }
}

fn provenance(cfg: &ResolvedConfig) -> Provenance {
    Provenance {
        tool: tool_version(),
        seed: cfg.sim.seed,
        scenario_hash: cfg.scenario_hash().to_string(),
    }
}

const METRIC_COLUMNS: [&str; 7] = [
    "ca_ideal",
    "ca_real",
    "p_ideal_w",
    "p_real_w",
    "m_tot_s",
    "t_wait_s",
    "saturated",
];

fn metric_row(report: &crate::analytic::MetricsReport) -> Vec<f64> {
    vec![
        report.ca_ideal,
        report.ca_real,
        report.p_ideal_w,
        report.p_real_w,
        report.m_tot_s,
        report.t_wait_s,
        if report.saturated { 1.0 } else { 0.0 },
    ]
}

/// Single-point analysis: one row of availability/power/margin metrics.
pub fn cmd_analyze(cfg: &ResolvedConfig) -> Result<ResultTable> {
    let report = evaluate(&cfg.scenario)?;
    let mut columns = vec!["latency_s".to_string()];
    columns.extend(METRIC_COLUMNS.iter().map(|c| c.to_string()));
    let mut table = ResultTable::new(columns, provenance(cfg))?;
    let mut row = vec![cfg.scenario.latency_s()];
    row.extend(metric_row(&report));
    table.push_row(row)?;
    Ok(table)
}

fn axis_column(axis: SweepAxis) -> &'static str {
    match axis {
        SweepAxis::Superframe => "superframe_s",
        SweepAxis::Latency => "latency_s",
        SweepAxis::NLeaves => "n_leaves",
        SweepAxis::Distance => "distance_m",
        SweepAxis::FOsc => "f_osc_hz",
        SweepAxis::DriftPpm => "drift_ppm",
        SweepAxis::Sigma => "sigma_s",
    }
}

/// Evaluate the scenario across a parameter range, one row per value. The
/// oscillator-frequency axis additionally reports the per-clock timing
/// inaccuracy breakdown at the end of the superframe.
pub fn cmd_sweep(cfg: &ResolvedConfig, axis: SweepAxis, range: &RangeSpec) -> Result<ResultTable> {
    let values = range.values()?;
    let reports = sweep(&cfg.scenario, axis, &values)?;
    let mut columns = vec![axis_column(axis).to_string()];
    columns.extend(METRIC_COLUMNS.iter().map(|c| c.to_string()));
    let with_inaccuracy = axis == SweepAxis::FOsc;
    if with_inaccuracy {
        for c in ["dt_counter_s", "dt_drift_s", "dt_jitter_s", "total_inaccuracy_s"] {
            columns.push(c.to_string());
        }
    }
    let mut table = ResultTable::new(columns, provenance(cfg))?;
    for (value, report) in values.iter().zip(reports.iter()) {
        let mut row = vec![*value];
        row.extend(metric_row(report));
        if with_inaccuracy {
            let pt = inaccuracy_vs_fosc(cfg.scenario.osc(), cfg.scenario.superframe_s(), &[*value])?
                [0];
            row.extend([pt.dt_counter_s, pt.dt_drift_s, pt.dt_jitter_s, pt.total_s]);
        }
        table.push_row(row)?;
    }
    Ok(table)
}

/// Run the event simulation and summarize it next to the analytic bounds.
pub fn cmd_simulate(
    cfg: &ResolvedConfig,
    superframes: Option<u32>,
) -> Result<(ResultTable, SimTrace)> {
    let n = superframes.unwrap_or(cfg.sim.superframes);
    let options = cfg.sim_options();
    let (trace, m) = run_simulation_with(&cfg.scenario, n, cfg.sim.seed, &options)?;
    let analytic = evaluate(&cfg.scenario)?;
    let mut table = ResultTable::new(
        [
            "superframes",
            "punctures_total",
            "punctures_hit",
            "hit_rate",
            "ca_empirical",
            "p_empirical_w",
            "mean_rx_wait_s",
            "ca_ideal",
            "ca_real",
            "p_ideal_w",
            "p_real_w",
        ]
        .iter()
        .map(|c| c.to_string())
        .collect(),
        provenance(cfg),
    )?;
    table.push_row(vec![
        n as f64,
        m.punctures_total as f64,
        m.punctures_hit as f64,
        m.hit_rate,
        m.ca_empirical,
        m.p_empirical_w,
        m.mean_rx_wait_s,
        analytic.ca_ideal,
        analytic.ca_real,
        analytic.p_ideal_w,
        analytic.p_real_w,
    ])?;
    Ok((table, trace))
}

/// Sweep the duty-cycle baseline over a delta range, one row of trial
/// aggregates per point.
pub fn cmd_baseline(
    cfg: &ResolvedConfig,
    range: Option<&RangeSpec>,
    trials: Option<u64>,
) -> Result<ResultTable> {
    let range = range.copied().unwrap_or(BASELINE_DELTA_RANGE);
    let deltas = range.values()?;
    let trials = trials.unwrap_or(cfg.baseline.trials);
    let config = cfg.dutycycle_config()?;
    let reports = sweep_delta(&config, &deltas, trials, cfg.sim.seed)?;
    let mut table = ResultTable::new(
        [
            "delta",
            "ca_mean",
            "ca_min",
            "ca_max",
            "p_mean_w",
            "p_min_w",
            "p_max_w",
            "extra_latency_mean_s",
            "extra_latency_min_s",
            "extra_latency_max_s",
            "trials",
        ]
        .iter()
        .map(|c| c.to_string())
        .collect(),
        provenance(cfg),
    )?;
    for r in reports {
        table.push_row(vec![
            r.delta,
            r.ca_mean,
            r.ca_min,
            r.ca_max,
            r.p_mean_w,
            r.p_min_w,
            r.p_max_w,
            r.extra_latency_mean_s,
            r.extra_latency_min_s,
            r.extra_latency_max_s,
            r.trials as f64,
        ])?;
    }
    Ok(table)
}

/// Worst-to-best comparison of the heartbeat scheme against the
/// duty-cycled baseline, one row per latency target: the heartbeat power
/// is taken at its worst superframe over the configured heart-period
/// range, the baseline at its best duty-cycle ratio.
pub fn cmd_compare(cfg: &ResolvedConfig, latencies: &[f64]) -> Result<ResultTable> {
    if latencies.is_empty() {
        return Err(Error::InvalidRange("no latencies to compare".into()));
    }
    let (t_lo, t_hi) = cfg.compare_superframe_range();
    let mut table = ResultTable::new(
        [
            "latency_s",
            "p_hb_real_w",
            "p_hb_worst_w",
            "p_dc_min_w",
            "delta_at_min",
            "saving",
            "ca_hb_real",
            "ca_dc_mean",
            "extra_latency_hb_s",
            "extra_latency_dc_mean_s",
        ]
        .iter()
        .map(|c| c.to_string())
        .collect(),
        provenance(cfg),
    )?;

    for &latency in latencies {
        let scenario = cfg.scenario.with_latency(latency)?;
        let at_operating_point = evaluate(&scenario)?;

        // Worst heartbeat power across the heart-period band.
        let mut p_hb_worst = f64::NEG_INFINITY;
        let grid = RangeSpec {
            from: t_lo,
            to: t_hi,
            points: COMPARE_T_POINTS,
            log: false,
        }
        .values()?;
        let mut feasible = 0u32;
        for t in grid {
            if t < latency {
                continue;
            }
            feasible += 1;
            p_hb_worst = p_hb_worst.max(p_real(&scenario.with_superframe(t)?)?);
        }
        if feasible == 0 {
            return Err(Error::InvalidRange(format!(
                "no superframe in [{t_lo}, {t_hi}] admits latency {latency}"
            )));
        }

        // Best baseline over the duty-cycle band at this latency.
        let base = cfg.dutycycle_config()?;
        let dc_config = crate::dutycycle::DutyCycleConfig::new(
            base.delta(),
            base.gap_s(),
            *base.link(),
            *base.power(),
            latency,
            base.n_leaves(),
        )?
        .with_miss_prob(base.miss_prob())?;
        let reports = sweep_delta(
            &dc_config,
            &BASELINE_DELTA_RANGE.values()?,
            cfg.baseline.trials,
            cfg.sim.seed,
        )?;
        let best = reports
            .iter()
            .min_by(|a, b| a.p_mean_w.total_cmp(&b.p_mean_w))
            .expect("non-empty delta grid");

        let saving = 1.0 - p_hb_worst / best.p_mean_w;
        table.push_row(vec![
            latency,
            at_operating_point.p_real_w,
            p_hb_worst,
            best.p_mean_w,
            best.delta,
            saving,
            at_operating_point.ca_real,
            best.ca_mean,
            0.0,
            best.extra_latency_mean_s,
        ])?;
    }
    Ok(table)
}

/// Default chart for a sweep table.
pub fn sweep_plot_spec(axis: SweepAxis) -> PlotSpec {
    match axis {
        SweepAxis::FOsc => PlotSpec {
            x: "f_osc_hz".into(),
            ys: vec![
                "total_inaccuracy_s".into(),
                "dt_counter_s".into(),
                "dt_drift_s".into(),
                "dt_jitter_s".into(),
            ],
            err: None,
            log_x: true,
            title: "timing inaccuracy vs oscillator frequency".into(),
        },
        axis => PlotSpec {
            x: axis_column(axis).into(),
            ys: vec!["ca_real".into(), "ca_ideal".into()],
            err: None,
            log_x: false,
            title: format!("channel availability vs {}", axis.name()),
        },
    }
}

/// Default chart for a baseline table.
pub fn baseline_plot_spec() -> PlotSpec {
    PlotSpec {
        x: "delta".into(),
        ys: vec!["p_mean_w".into()],
        err: Some(("p_min_w".into(), "p_max_w".into())),
        log_x: true,
        title: "duty-cycled baseline power vs duty-cycle ratio".into(),
    }
}

/// Default chart for a compare table.
pub fn compare_plot_spec() -> PlotSpec {
    PlotSpec {
        x: "latency_s".into(),
        ys: vec!["p_hb_worst_w".into(), "p_dc_min_w".into()],
        err: None,
        log_x: false,
        title: "worst heartbeat power vs best baseline power".into(),
    }
}

/// Fallback chart for single-row tables (analyze, simulate).
pub fn single_row_plot_spec(table: &ResultTable) -> PlotSpec {
    PlotSpec {
        x: table.columns()[0].clone(),
        ys: vec![table.columns()[1].clone()],
        err: None,
        log_x: false,
        title: String::new(),
    }
}
