//! Command-line front end: run, sweep, report, validate, export-lp.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use aev_dispatch::controller::{run, sweep, DemandVisibility, RunLog, RunOptions, SolveMode};
use aev_dispatch::dispatch::build_lp;
use aev_dispatch::grid::{init_uniform_idle, SoeGrid};
use aev_dispatch::reporting::{annualize, emit_outputs, revenue_report};
use aev_dispatch::scenario::synthetic::{synthetic_day, OutageDay};
use aev_dispatch::scenario::{builtin, load_scenario, Quantization, ScenarioSpec};
use aev_dispatch::{Error, Result};

/// Environment variable naming the default output root.
const OUT_ENV: &str = "FLEETDISPATCH_OUT";

#[derive(Parser, Debug)]
#[command(name = "aev-dispatch", version, about = "Receding-horizon dispatch of autonomous EV fleets")]
struct Cli {
    /// Increase log verbosity (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Simulate one scenario and write its outputs.
    Run {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Override the scenario's fleet size.
        #[arg(long)]
        fleet_size: Option<f64>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Simulate one scenario at several fleet sizes.
    Sweep {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Comma-separated fleet sizes, e.g. 7500,15000,40000.
        #[arg(long, value_delimiter = ',', required = true)]
        fleet_sizes: Vec<f64>,
        /// Number of runs executed in parallel.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Annualize an extreme-day and a moderate-day run log.
    Report {
        /// runlog JSON of the extreme-outage day.
        #[arg(long)]
        extreme_log: PathBuf,
        /// runlog JSON of the moderate-outage day.
        #[arg(long)]
        moderate_log: PathBuf,
        #[arg(long, default_value = "builtin:extreme-day")]
        extreme_scenario: String,
        #[arg(long, default_value = "builtin:moderate-day")]
        moderate_scenario: String,
        /// Comma-separated counts of extreme-outage days per year.
        #[arg(long, value_delimiter = ',', default_value = "10,12,14,16,18,20")]
        extreme_days: Vec<u32>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Load and validate a scenario; prints OK.
    Validate {
        #[command(flatten)]
        scenario: ScenarioArgs,
    },
    /// Write the window LP at a given step in CPLEX LP format.
    ExportLp {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long)]
        fleet_size: Option<f64>,
        /// Window start step (the fleet is in its initial all-idle state).
        #[arg(long, default_value_t = 0)]
        step: usize,
        /// Output file; defaults to standard output.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args, Debug, Clone, Serialize)]
struct ScenarioArgs {
    /// Scenario file, or builtin:NAME (extreme-day, moderate-day, zero-demand, network-tables).
    #[arg(long, short)]
    scenario: String,
    /// Time step in minutes.
    #[arg(long)]
    dt: Option<f64>,
    /// SOE bin width.
    #[arg(long)]
    dx: Option<f64>,
    /// Window length in steps.
    #[arg(long)]
    horizon: Option<usize>,
    /// Number of simulated steps.
    #[arg(long)]
    sim_steps: Option<usize>,
    /// Outage demand visibility: window | persistence.
    #[arg(long)]
    visibility: Option<DemandVisibility>,
    /// Trip quantization: ceiling | nearest.
    #[arg(long)]
    quantization: Option<Quantization>,
    /// Solve mode: roll-by-one | block.
    #[arg(long)]
    solve_mode: Option<SolveMode>,
    /// Regenerate the synthetic demand of a bundled scenario with this seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug, Clone)]
struct OutArgs {
    /// Output directory (default: $FLEETDISPATCH_OUT, else ./out).
    #[arg(long, short)]
    out: Option<PathBuf>,
}

impl OutArgs {
    fn dir(&self) -> PathBuf {
        self.out
            .clone()
            .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("out"))
    }
}

impl ScenarioArgs {
    fn load(&self) -> Result<ScenarioSpec> {
        let mut spec = match self.scenario.strip_prefix("builtin:") {
            Some(name) => match self.seed {
                Some(seed) => {
                    let day = match builtin::load(name)?.label.as_str() {
                        l if l.starts_with("extreme") => OutageDay::Extreme,
                        l if l.starts_with("moderate") => OutageDay::Moderate,
                        _ => OutageDay::None,
                    };
                    synthetic_day(day, seed)?
                }
                None => builtin::load(name)?,
            },
            None => {
                if self.seed.is_some() {
                    return Err(Error::Configuration("--seed only applies to builtin scenarios".into()));
                }
                load_scenario(&self.scenario)?
            }
        };
        let g = spec.grid;
        if self.dt.is_some() || self.dx.is_some() || self.horizon.is_some() || self.sim_steps.is_some() || self.quantization.is_some() {
            let grid = SoeGrid::with_dx(
                self.dx.unwrap_or(g.dx),
                self.dt.unwrap_or(g.dt_minutes),
                self.horizon.unwrap_or(g.horizon_steps),
                self.sim_steps.unwrap_or(g.n_sim_steps),
            )?;
            spec = spec.with_grid(grid, self.quantization.unwrap_or(spec.quantization))?;
        }
        spec.validate()?;
        Ok(spec)
    }

    fn run_options(&self) -> RunOptions {
        let mut opts = RunOptions::default();
        if let Some(v) = self.visibility {
            opts.build.visibility = v;
        }
        if let Some(m) = self.solve_mode {
            opts.solve_mode = m;
        }
        opts
    }
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    argv: Vec<String>,
    created_unix_seconds: u64,
    scenario: &'a ScenarioArgs,
    label: &'a str,
    grid: SoeGrid,
    quantization: Quantization,
    solve_mode: SolveMode,
    visibility: DemandVisibility,
    fleet_sizes: Vec<f64>,
    outputs: Vec<String>,
}

fn write_manifest(dir: &Path, command: &str, args: &ScenarioArgs, spec: &ScenarioSpec, opts: &RunOptions, fleet_sizes: Vec<f64>, outputs: &[PathBuf]) -> Result<()> {
    let m = Manifest {
        tool: "aev-dispatch",
        version: env!("CARGO_PKG_VERSION"),
        command,
        argv: std::env::args().collect(),
        created_unix_seconds: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
        scenario: args,
        label: &spec.label,
        grid: spec.grid,
        quantization: spec.quantization,
        solve_mode: opts.solve_mode,
        visibility: opts.build.visibility,
        fleet_sizes,
        outputs: outputs
            .iter()
            .map(|p| p.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default())
            .collect(),
    };
    let path = dir.join("run_manifest.toml");
    let text = toml::to_string(&m).map_err(|e| Error::Validation(format!("manifest: {e}")))?;
    std::fs::write(&path, text).map_err(|e| io_error(&path, e))
}

fn io_error(path: &Path, e: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source: e,
    }
}

fn write_log(dir: &Path, log: &RunLog, suffix: &str) -> Result<PathBuf> {
    let path = dir.join(format!("runlog{suffix}.json"));
    let text = serde_json::to_string_pretty(log).map_err(|e| Error::Validation(format!("runlog: {e}")))?;
    std::fs::write(&path, text).map_err(|e| io_error(&path, e))?;
    Ok(path)
}

fn read_log(path: &Path) -> Result<RunLog> {
    let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Validation(format!("{}: not a run log: {e}", path.display())))
}

fn load_named(s: &str) -> Result<ScenarioSpec> {
    match s.strip_prefix("builtin:") {
        Some(name) => builtin::load(name),
        None => load_scenario(s),
    }
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { scenario, fleet_size, out } => {
            let mut spec = scenario.load()?;
            if let Some(f) = fleet_size {
                spec = spec.with_fleet_size(f);
            }
            let opts = scenario.run_options();
            let log = run(&spec, &opts)?;
            let dir = out.dir();
            let report = revenue_report(&log, &spec);
            let mut files = emit_outputs(&report, &log, None, &dir, "")?;
            files.push(write_log(&dir, &log, "")?);
            write_manifest(&dir, "run", &scenario, &spec, &opts, vec![spec.fleet_size], &files)?;
            println!(
                "{}: total ${:.2} (trips {:.2}, V2B {:.2}, G2V {:.2}); outputs in {}",
                spec.label,
                report.total,
                report.trips_revenue,
                report.v2b_revenue,
                report.g2v_cost,
                dir.display()
            );
        }
        Command::Sweep {
            scenario,
            fleet_sizes,
            jobs,
            out,
        } => {
            let spec = scenario.load()?;
            let opts = scenario.run_options();
            let logs = sweep(&spec, &fleet_sizes, &opts, jobs)?;
            let dir = out.dir();
            let mut files = Vec::new();
            for log in &logs {
                let suffix = format!("_{}", log.fleet_size);
                let s = spec.with_fleet_size(log.fleet_size);
                let report = revenue_report(log, &s);
                files.extend(emit_outputs(&report, log, None, &dir, &suffix)?);
                files.push(write_log(&dir, log, &suffix)?);
                println!("{} fleet {}: total ${:.2}", spec.label, log.fleet_size, report.total);
            }
            write_manifest(&dir, "sweep", &scenario, &spec, &opts, fleet_sizes, &files)?;
        }
        Command::Report {
            extreme_log,
            moderate_log,
            extreme_scenario,
            moderate_scenario,
            extreme_days,
            out,
        } => {
            let elog = read_log(&extreme_log)?;
            let mlog = read_log(&moderate_log)?;
            let espec = load_named(&extreme_scenario)?.with_fleet_size(elog.fleet_size);
            let mspec = load_named(&moderate_scenario)?.with_fleet_size(mlog.fleet_size);
            let erep = revenue_report(&elog, &espec);
            let mrep = revenue_report(&mlog, &mspec);
            let table = annualize(&erep, &mrep, &extreme_days, elog.fleet_size)?;
            let dir = out.dir();
            emit_outputs(&erep, &elog, Some(&table), &dir, "")?;
            println!("extreme_days,new_revenue_per_vehicle,percent_increase");
            for r in &table.rows {
                println!("{},{:.2},{:.3}", r.extreme_days, r.new_revenue_per_vehicle, r.percent_increase);
            }
            println!(
                "per-event V2B uplift: extreme {:.1}%, moderate {:.1}%",
                erep.v2b_uplift_percent, mrep.v2b_uplift_percent
            );
        }
        Command::Validate { scenario } => {
            scenario.load()?;
            println!("OK");
        }
        Command::ExportLp {
            scenario,
            fleet_size,
            step,
            output,
        } => {
            let mut spec = scenario.load()?;
            if let Some(f) = fleet_size {
                spec = spec.with_fleet_size(f);
            }
            let opts = scenario.run_options();
            let mut state = init_uniform_idle(spec.fleet_size, &spec.grid, spec.n_nodes(), &spec.initial_weights)?;
            state.step = step;
            let lp = build_lp(&state, &spec, step, &spec.charge_rates()?, &opts.build)?;
            match output {
                Some(path) => {
                    let mut f = std::fs::File::create(&path).map_err(|e| io_error(&path, e))?;
                    lp.write_lp(&mut f).map_err(|e| io_error(&path, e))?;
                }
                None => {
                    let stdout = std::io::stdout();
                    lp.write_lp(&mut stdout.lock()).map_err(|e| io_error(Path::new("<stdout>"), e))?;
                }
            }
        }
    }
    Ok(())
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Scenario(_) | Error::Validation(_) | Error::Dimension(_) | Error::Configuration(_) => 3,
        Error::Solver { .. } | Error::InfeasibleControl { .. } => 4,
        Error::Io { .. } => 5,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            // One line: class for scripts, then the human-readable detail.
            let detail = e.to_string().split_whitespace().collect::<Vec<_>>().join(" ");
            eprintln!("error[{}]: {detail}", e.class());
            ExitCode::from(exit_code(&e))
        }
    }
}
