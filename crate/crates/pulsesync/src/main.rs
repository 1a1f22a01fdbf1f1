//! Thin command-line front end. Every flag can also be set through a
//! `PULSESYNC_`-prefixed environment variable; flags win over the
//! environment, which wins over the scenario file.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use pulsesync::chart::{emit_svg, render_svg, PlotSpec};
use pulsesync::commands::{
    baseline_plot_spec, cmd_analyze, cmd_baseline, cmd_compare, cmd_simulate, cmd_sweep,
    compare_plot_spec, single_row_plot_spec, sweep_plot_spec, RangeSpec, COMPARE_LATENCIES,
};
use pulsesync::scenario::{default_config, parse_scenario, ResolvedConfig};
use pulsesync::table::ResultTable;
use pulsesync::{Result, SweepAxis};

#[derive(Debug, Parser)]
#[command(
    name = "pulsesync",
    version,
    about = "Heartbeat-synchronized BAN scheduling: analysis, simulation and baseline comparison"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Csv,
    Svg,
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// Scenario file (JSON); defaults apply for absent keys.
    #[arg(long, env = "PULSESYNC_SCENARIO")]
    scenario: Option<PathBuf>,

    /// Output path; stdout when omitted.
    #[arg(long, env = "PULSESYNC_OUT")]
    out: Option<PathBuf>,

    /// RNG seed, overriding the scenario file.
    #[arg(long, env = "PULSESYNC_SEED")]
    seed: Option<u64>,

    /// Output format.
    #[arg(long, env = "PULSESYNC_FORMAT", value_enum, default_value = "csv")]
    format: OutputFormat,
}

#[derive(Debug, Args)]
struct SweepRangeArgs {
    /// First value of the sweep.
    #[arg(long, env = "PULSESYNC_FROM")]
    from: f64,

    /// Last value of the sweep.
    #[arg(long, env = "PULSESYNC_TO")]
    to: f64,

    /// Number of points.
    #[arg(long, env = "PULSESYNC_POINTS", default_value_t = 20)]
    points: u32,

    /// Logarithmic spacing.
    #[arg(long, env = "PULSESYNC_LOG", default_value_t = false)]
    log: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate availability, power and margins at one operating point.
    Analyze {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Evaluate across a parameter range.
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        /// Parameter to vary: superframe, latency, n_leaves, distance,
        /// f_osc, drift_ppm or sigma.
        #[arg(long, env = "PULSESYNC_AXIS")]
        axis: String,
        #[command(flatten)]
        range: SweepRangeArgs,
    },
    /// Run the stochastic clock simulation.
    Simulate {
        #[command(flatten)]
        common: CommonArgs,
        /// Superframes to simulate, overriding the scenario file.
        #[arg(long, env = "PULSESYNC_SUPERFRAMES")]
        superframes: Option<u32>,
        /// Write the event trace (one `kind,true_time,node,superframe,puncture`
        /// record per line) to this path.
        #[arg(long, env = "PULSESYNC_TRACE")]
        trace: Option<PathBuf>,
    },
    /// Monte Carlo sweep of the duty-cycled wake-up-receiver baseline.
    Baseline {
        #[command(flatten)]
        common: CommonArgs,
        /// First duty-cycle ratio (default 0.005).
        #[arg(long, env = "PULSESYNC_FROM")]
        from: Option<f64>,
        /// Last duty-cycle ratio (default 0.5).
        #[arg(long, env = "PULSESYNC_TO")]
        to: Option<f64>,
        /// Number of points (default 25).
        #[arg(long, env = "PULSESYNC_POINTS")]
        points: Option<u32>,
        /// Linear instead of logarithmic spacing.
        #[arg(long, env = "PULSESYNC_LINEAR", default_value_t = false)]
        linear: bool,
        /// Trials per point, overriding the scenario file.
        #[arg(long, env = "PULSESYNC_TRIALS")]
        trials: Option<u64>,
    },
    /// Worst-to-best comparison against the duty-cycled baseline.
    Compare {
        #[command(flatten)]
        common: CommonArgs,
        /// Comma-separated latency targets in seconds (default 0.05,0.2).
        #[arg(long, env = "PULSESYNC_LATENCIES", value_delimiter = ',')]
        latencies: Option<Vec<f64>>,
    },
    /// Render an SVG chart from a previously emitted CSV table.
    Plot {
        /// Input CSV path.
        #[arg(long, env = "PULSESYNC_INPUT")]
        input: PathBuf,
        /// Output SVG path; stdout when omitted.
        #[arg(long, env = "PULSESYNC_OUT")]
        out: Option<PathBuf>,
        /// Column for the x axis.
        #[arg(long, env = "PULSESYNC_X")]
        x: String,
        /// Comma-separated y columns.
        #[arg(long, env = "PULSESYNC_Y", value_delimiter = ',')]
        y: Vec<String>,
        /// Lower error-bar column (requires --err-hi).
        #[arg(long, env = "PULSESYNC_ERR_LO", requires = "err_hi")]
        err_lo: Option<String>,
        /// Upper error-bar column (requires --err-lo).
        #[arg(long, env = "PULSESYNC_ERR_HI", requires = "err_lo")]
        err_hi: Option<String>,
        /// Logarithmic x axis.
        #[arg(long, env = "PULSESYNC_LOG_X", default_value_t = false)]
        log_x: bool,
        /// Chart title.
        #[arg(long, env = "PULSESYNC_TITLE", default_value = "")]
        title: String,
    },
}

fn load_config(common: &CommonArgs) -> Result<ResolvedConfig> {
    let cfg = match &common.scenario {
        Some(path) => parse_scenario(path)?,
        None => default_config(),
    };
    Ok(match common.seed {
        Some(seed) => cfg.with_seed(seed),
        None => cfg,
    })
}

fn write_output(text: &str, out: Option<&PathBuf>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn emit(table: &ResultTable, common: &CommonArgs, plot: PlotSpec) -> Result<()> {
    match common.format {
        OutputFormat::Csv => write_output(&table.to_csv_string(), common.out.as_ref()),
        OutputFormat::Svg => write_output(&render_svg(table, &plot)?, common.out.as_ref()),
    }
}

fn run() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Analyze { common } => {
            let cfg = load_config(&common)?;
            let table = cmd_analyze(&cfg)?;
            let spec = single_row_plot_spec(&table);
            emit(&table, &common, spec)
        }
        Command::Sweep {
            common,
            axis,
            range,
        } => {
            let cfg = load_config(&common)?;
            let axis: SweepAxis = axis.parse()?;
            let spec = RangeSpec {
                from: range.from,
                to: range.to,
                points: range.points,
                log: range.log,
            };
            let table = cmd_sweep(&cfg, axis, &spec)?;
            emit(&table, &common, sweep_plot_spec(axis))
        }
        Command::Simulate {
            common,
            superframes,
            trace,
        } => {
            let cfg = load_config(&common)?;
            let (table, sim_trace) = cmd_simulate(&cfg, superframes)?;
            if let Some(path) = trace {
                std::fs::write(&path, sim_trace.export_string())?;
            }
            let spec = single_row_plot_spec(&table);
            emit(&table, &common, spec)
        }
        Command::Baseline {
            common,
            from,
            to,
            points,
            linear,
            trials,
        } => {
            let cfg = load_config(&common)?;
            let defaults = pulsesync::commands::BASELINE_DELTA_RANGE;
            let range = RangeSpec {
                from: from.unwrap_or(defaults.from),
                to: to.unwrap_or(defaults.to),
                points: points.unwrap_or(defaults.points),
                log: !linear,
            };
            let table = cmd_baseline(&cfg, Some(&range), trials)?;
            emit(&table, &common, baseline_plot_spec())
        }
        Command::Compare { common, latencies } => {
            let cfg = load_config(&common)?;
            let latencies = latencies.unwrap_or_else(|| COMPARE_LATENCIES.to_vec());
            let table = cmd_compare(&cfg, &latencies)?;
            emit(&table, &common, compare_plot_spec())
        }
        Command::Plot {
            input,
            out,
            x,
            y,
            err_lo,
            err_hi,
            log_x,
            title,
        } => {
            let table = ResultTable::read_csv(&input)?;
            let spec = PlotSpec {
                x,
                ys: y,
                err: err_lo.zip(err_hi),
                log_x,
                title,
            };
            match out {
                Some(path) => emit_svg(&table, &spec, &path),
                None => write_output(&render_svg(&table, &spec)?, None),
            }
        }
    }
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
