//! `theta-reset`: simulations, mean-field integration, continuation, two-parameter
//! scans and reference-table reproduction from the command line.

// `!(x > 0.0)` style checks reject NaN along with out-of-range values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};
use theta_reset::bifurcation::{
    analyze_family, fold_loci, hopf_loci, BifurcationPoint, ContinuationParam, MeanFieldFamily,
    ScanResult,
};
use theta_reset::io::{branch_csv, series_csv, write_atomic, write_json};
use theta_reset::network::{ensemble_average, ExcitabilitySampling, SimRecord};
use theta_reset::ode::integrate;
use theta_reset::reproduce::{check_table_id, reproduce_table};
use theta_reset::{Error, MeanFieldSystem, Reduction, ResetRate, Result};

use config::{parse_complex, parse_grid, parse_range, ExperimentConfig, Mode, ScanGrid};

const THREADS_ENV: &str = "THETA_RESET_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "theta-reset",
    version,
    about = "Theta-neuron networks with partial stochastic resetting"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// JSON experiment configuration; flags override its values.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Overwrite existing output files.
    #[arg(long, global = true)]
    force: bool,
    /// Worker threads (0 = all cores). Falls back to THETA_RESET_THREADS.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Set any configuration leaf, e.g. `--set sim.dt=0.005`.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate the microscopic network.
    Simulate(SimulateArgs),
    /// Integrate a reduced mean-field system.
    Meanfield(MeanfieldArgs),
    /// Continue equilibria in one parameter and detect folds and Hopf points.
    Branch(BranchArgs),
    /// Scan fold and Hopf loci over a second parameter; locate Cusp and BT points.
    Scan2(Scan2Args),
    /// Recompute a reference table (t1, t2, t3, t4, t6).
    Reproduce(ReproduceArgs),
}

#[derive(Debug, Args)]
struct ModelArgs {
    /// Reduced system: infinite, polar or finite.
    #[arg(long)]
    system: Option<Reduction>,
    /// Median excitability η0
    #[arg(long, allow_hyphen_values = true)]
    eta0: Option<f64>,
    /// Half-width of the excitability distribution.
    #[arg(long)]
    delta: Option<f64>,
    /// Coupling strength K.
    #[arg(long = "k", alias = "coupling-k", allow_hyphen_values = true)]
    coupling_k: Option<f64>,
    /// Pulse sharpness n.
    #[arg(long)]
    sharpness: Option<u32>,
    /// Proportion of reset neurons.
    #[arg(long)]
    gamma: Option<f64>,
    /// Reset rate (a number or `inf`).
    #[arg(long)]
    lambda: Option<ResetRate>,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Network size N
    #[arg(long = "n-neurons", alias = "n")]
    n_neurons: Option<usize>,
    /// Simulated time
    #[arg(long)]
    time: Option<f64>,
    /// Integration step
    #[arg(long)]
    dt: Option<f64>,
    /// Steps between recorded samples
    #[arg(long)]
    record_stride: Option<usize>,
    /// Fraction of the run discarded before time averages.
    #[arg(long)]
    transient: Option<f64>,
    /// Independent realizations to average
    #[arg(long)]
    realizations: Option<usize>,
    /// Excitability sampling: stratified or iid.
    #[arg(long)]
    sampling: Option<String>,
}

#[derive(Debug, Args)]
struct MeanfieldArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Simulated time
    #[arg(long)]
    time: Option<f64>,
    /// Integration step
    #[arg(long)]
    dt: Option<f64>,
    /// Steps between recorded samples
    #[arg(long)]
    record_stride: Option<usize>,
    /// Initial non-reset mean field `RE,IM`.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    z0: Option<[f64; 2]>,
    /// Initial reset mean field `RE,IM` (finite-rate system).
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    zr0: Option<[f64; 2]>,
}

#[derive(Debug, Args)]
struct ContinuationArgs {
    /// Continuation parameter: eta0, k, gamma or lambda.
    #[arg(long)]
    param: Option<ContinuationParam>,
    /// Parameter range `START:END`.
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
    range: Option<[f64; 2]>,
    /// Initial arclength step
    #[arg(long)]
    step: Option<f64>,
    /// Largest arclength step
    #[arg(long)]
    max_step: Option<f64>,
}

#[derive(Debug, Args)]
struct BranchArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    cont: ContinuationArgs,
}

#[derive(Debug, Args)]
struct Scan2Args {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    cont: ContinuationArgs,
    /// Second parameter.
    #[arg(long)]
    param2: Option<ContinuationParam>,
    /// Second-parameter grid `START:END:POINTS`.
    #[arg(long, value_parser = parse_grid, allow_hyphen_values = true)]
    grid: Option<(f64, f64, usize)>,
    /// Space the grid logarithmically.
    #[arg(long)]
    log_grid: bool,
}

#[derive(Debug, Args)]
struct ReproduceArgs {
    /// Table identifier.
    table: Option<String>,
}

/// How a run ended.
enum Outcome {
    Done,
    /// Ran to completion but the comparison did not hold.
    Mismatch,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::Mismatch) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config() { 2 } else { 3 })
        }
    }
}

fn apply_model(c: &mut ExperimentConfig, m: &ModelArgs) {
    if let Some(s) = m.system {
        c.system = Some(s);
    }
    let p = &mut c.params;
    if let Some(v) = m.eta0 {
        p.eta0 = v;
    }
    if let Some(v) = m.delta {
        p.delta = v;
    }
    if let Some(v) = m.coupling_k {
        p.coupling_k = v;
    }
    if let Some(v) = m.sharpness {
        p.sharpness_n = v;
    }
    if let Some(v) = m.gamma {
        p.gamma = v;
    }
    if let Some(v) = m.lambda {
        p.lambda = v;
    }
}

fn apply_continuation(c: &mut ExperimentConfig, a: &ContinuationArgs) {
    let cont = &mut c.continuation;
    if let Some(p) = a.param {
        cont.param = p;
    }
    if let Some(r) = a.range {
        cont.range = r;
    }
    if let Some(v) = a.step {
        cont.settings.step = v;
    }
    if let Some(v) = a.max_step {
        cont.settings.max_step = v;
    }
}

/// Merges the config file, `--set` overrides and flags, in that order.
fn build_config(cli: &Cli) -> Result<ExperimentConfig> {
    let mode = match &cli.command {
        Command::Simulate(_) => Mode::Simulate,
        Command::Meanfield(_) => Mode::Meanfield,
        Command::Branch(_) => Mode::Branch,
        Command::Scan2(_) => Mode::Scan2,
        Command::Reproduce(_) => Mode::Reproduce,
    };
    let mut c = match &cli.global.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::new(mode),
    };
    c.mode = mode;
    for kv in &cli.global.set {
        let (k, v) = kv.split_once('=').ok_or_else(|| {
            Error::InvalidParameter(format!("--set expects KEY=VALUE, got {kv:?}"))
        })?;
        c.set_path(k.trim(), v.trim())?;
    }
    if let Some(s) = cli.global.seed {
        c.seed = Some(s);
    }
    if let Some(o) = &cli.global.out {
        c.output_path = o.clone();
    }
    match &cli.command {
        Command::Simulate(a) => {
            apply_model(&mut c, &a.model);
            let s = &mut c.sim;
            if let Some(v) = a.n_neurons {
                s.n_neurons = v;
            }
            if let Some(v) = a.time {
                s.total_time = v;
            }
            if let Some(v) = a.dt {
                s.dt = v;
            }
            if let Some(v) = a.record_stride {
                s.record_stride = v;
            }
            if let Some(v) = a.transient {
                s.transient_fraction = v;
            }
            if let Some(v) = &a.sampling {
                s.sampling = match v.to_ascii_lowercase().as_str() {
                    "stratified" => ExcitabilitySampling::Stratified,
                    "iid" => ExcitabilitySampling::Iid,
                    other => {
                        return Err(Error::InvalidParameter(format!(
                            "unknown sampling {other:?} (expected stratified or iid)"
                        )))
                    }
                };
            }
            if let Some(v) = a.realizations {
                c.realizations = v;
            }
        }
        Command::Meanfield(a) => {
            apply_model(&mut c, &a.model);
            let m = &mut c.meanfield;
            if let Some(v) = a.time {
                m.total_time = v;
            }
            if let Some(v) = a.dt {
                m.dt = v;
            }
            if let Some(v) = a.record_stride {
                m.record_stride = v;
            }
            if let Some(v) = a.z0 {
                m.initial_nr = v;
            }
            if let Some(v) = a.zr0 {
                m.initial_r = Some(v);
            }
        }
        Command::Branch(a) => {
            apply_model(&mut c, &a.model);
            apply_continuation(&mut c, &a.cont);
        }
        Command::Scan2(a) => {
            apply_model(&mut c, &a.model);
            apply_continuation(&mut c, &a.cont);
            if a.param2.is_some() || a.grid.is_some() || a.log_grid {
                let mut g = c.grid.unwrap_or(ScanGrid {
                    param: ContinuationParam::Gamma,
                    start: 0.0,
                    end: 1.0,
                    points: 41,
                    log: false,
                });
                if let Some(p) = a.param2 {
                    g.param = p;
                }
                if let Some((s, e, n)) = a.grid {
                    g.start = s;
                    g.end = e;
                    g.points = n;
                }
                if a.log_grid {
                    g.log = true;
                }
                c.grid = Some(g);
            }
        }
        Command::Reproduce(a) => {
            if let Some(t) = &a.table {
                c.table = Some(t.clone());
            }
        }
    }
    if c.mode == Mode::Simulate {
        c.sim.seed = c.effective_seed();
    }
    Ok(c)
}

fn configure_threads(flag: Option<usize>) -> Result<()> {
    let n = match flag {
        Some(n) => n,
        None => match std::env::var(THREADS_ENV) {
            Ok(v) => v.trim().parse().map_err(|_| {
                Error::InvalidParameter(format!("{THREADS_ENV} must be an integer, got {v:?}"))
            })?,
            Err(_) => 0,
        },
    };
    if n > 0 {
        // the global pool can only be built once per process
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    Ok(())
}

/// Output files of a run, checked for collisions before any work starts.
struct Outputs {
    primary: PathBuf,
    summary: PathBuf,
    force: bool,
}

impl Outputs {
    fn new(dir: &Path, primary: &str, force: bool) -> Result<Self> {
        let out = Self {
            primary: dir.join(primary),
            summary: dir.join("summary.json"),
            force,
        };
        if !force {
            for p in [&out.primary, &out.summary] {
                if p.exists() {
                    return Err(Error::OutputExists(p.display().to_string()));
                }
            }
        }
        Ok(out)
    }

    fn write(&self, csv: &str, summary: &Value) -> Result<()> {
        write_atomic(&self.primary, csv.as_bytes(), self.force)?;
        write_json(&self.summary, summary, self.force)
    }
}

fn summary(config: &ExperimentConfig, start: Instant, extra: Value) -> Result<Value> {
    let mut doc = json!({
        "mode": config.mode.name(),
        "version": env!("CARGO_PKG_VERSION"),
        "elapsed_seconds": start.elapsed().as_secs_f64(),
        "config": serde_json::to_value(config)?,
    });
    if let (Some(obj), Value::Object(more)) = (doc.as_object_mut(), extra) {
        obj.extend(more);
    }
    Ok(doc)
}

fn run(cli: Cli) -> Result<Outcome> {
    let config = build_config(&cli)?;
    config.validate()?;
    configure_threads(cli.global.threads)?;
    let force = cli.global.force;
    let start = Instant::now();
    match config.mode {
        Mode::Simulate => run_simulate(&config, force, start),
        Mode::Meanfield => run_meanfield(&config, force, start),
        Mode::Branch => run_branch(&config, force, start),
        Mode::Scan2 => run_scan2(&config, force, start),
        Mode::Reproduce => run_reproduce(&config, force, start),
    }
}

fn run_simulate(config: &ExperimentConfig, force: bool, start: Instant) -> Result<Outcome> {
    let out = Outputs::new(&config.output_path, "series.csv", force)?;
    let record = ensemble_average(&config.sim, &config.params, config.realizations)?;
    let f = record.steady_f_nr();
    let rate = record.nonreset_population_rate();
    let extra = json!({
        "steady_f_nr": f,
        "nonreset_population_rate": rate,
        "reset_count": record.reset_count,
        "averaging_start": record.averaging_start,
        "realizations": record.realizations,
    });
    out.write(&series_csv(&record), &summary(config, start, extra)?)?;
    println!(
        "steady f_nr = {f:.6} (N = {}, realizations = {}, seed = {})",
        config.sim.n_neurons, record.realizations, config.sim.seed
    );
    Ok(Outcome::Done)
}

fn run_meanfield(config: &ExperimentConfig, force: bool, start: Instant) -> Result<Outcome> {
    let out = Outputs::new(&config.output_path, "series.csv", force)?;
    let sys = MeanFieldSystem::new(config.reduction(), config.params)?;
    let m = &config.meanfield;
    let nr = num_complex::Complex64::new(m.initial_nr[0], m.initial_nr[1]);
    let mut state0 = sys.state_from_field(nr);
    if let (Some(r), Reduction::Finite) = (m.initial_r, sys.reduction) {
        state0[0] = r[0];
        state0[1] = r[1];
    }
    let traj = integrate(&sys.field(), &state0, m.total_time, m.dt, m.record_stride)?;
    let mut record = SimRecord {
        times: traj.times.clone(),
        z_r_series: Vec::with_capacity(traj.times.len()),
        z_nr_series: Vec::with_capacity(traj.times.len()),
        f_nr_series: Vec::with_capacity(traj.times.len()),
        per_neuron_rates: Vec::new(),
        reset_count: 0,
        averaging_start: 0.0,
        realizations: 1,
    };
    for s in &traj.states {
        if s.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("mean-field trajectory diverged".into()));
        }
        // reset neurons sit at π when the rate is infinite
        record.z_r_series.push(
            sys.reset(s)
                .unwrap_or(num_complex::Complex64::new(-1.0, 0.0)),
        );
        record.z_nr_series.push(sys.nonreset(s));
        record.f_nr_series.push(sys.f_nr(s));
    }
    let last = traj
        .states
        .last()
        .expect("trajectory records its initial state");
    let f = sys.f_nr(last);
    let extra = json!({ "final_state": last, "final_f_nr": f });
    out.write(&series_csv(&record), &summary(config, start, extra)?)?;
    println!(
        "final f_nr = {f:.6} at t = {}",
        traj.times.last().copied().unwrap_or(0.0)
    );
    Ok(Outcome::Done)
}

fn components(reduction: Reduction) -> &'static [&'static str] {
    match reduction {
        Reduction::Infinite => &["x_nr", "y_nr"],
        Reduction::Polar => &["r_nr", "psi_nr"],
        Reduction::Finite => &["x_r", "y_r", "x_nr", "y_nr"],
    }
}

fn point_list(points: &[&BifurcationPoint], names: &[&str]) -> String {
    let mut s = String::new();
    for (i, p) in points.iter().enumerate() {
        if i > 0 {
            s.push_str(", ");
        }
        let _ = write!(s, "{}(", p.kind);
        for (j, n) in names.iter().enumerate() {
            if j > 0 {
                s.push_str(", ");
            }
            let _ = write!(s, "{n}={:.4}", p.param(n).unwrap_or(f64::NAN));
        }
        if names.len() == 1 {
            let _ = write!(s, ", f_nr={:.4}", p.f_nr);
        }
        s.push(')');
    }
    s
}

fn run_branch(config: &ExperimentConfig, force: bool, start: Instant) -> Result<Outcome> {
    let out = Outputs::new(&config.output_path, "branch.csv", force)?;
    let cont = &config.continuation;
    let family = MeanFieldFamily::new(config.reduction(), config.model_params(), cont.param)?;
    let analysis = analyze_family(&family, (cont.range[0], cont.range[1]), &cont.settings)?;
    let csv = branch_csv(&analysis.branches, components(config.reduction()));
    let mut points: Vec<&BifurcationPoint> = analysis.folds.iter().chain(&analysis.hopf).collect();
    let name = cont.param.name();
    points.sort_by(|a, b| {
        a.param(name)
            .partial_cmp(&b.param(name))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let extra = json!({
        "points": points,
        "tolerances": cont.settings,
        "branches": analysis.branches.iter().map(|b| json!({
            "points": b.points.len(),
            "termination": b.termination,
        })).collect::<Vec<_>>(),
    });
    out.write(&csv, &summary(config, start, extra)?)?;
    println!(
        "{} branch(es), {} SN, {} Hopf: {}",
        analysis.branches.len(),
        analysis.folds.len(),
        analysis.hopf.len(),
        if points.is_empty() {
            "none".to_string()
        } else {
            point_list(&points, &[name])
        }
    );
    Ok(Outcome::Done)
}

#[derive(Serialize)]
struct ScanNote {
    kind: &'static str,
    message: String,
}

fn scan_csv(name1: &str, name2: &str, results: &[&ScanResult]) -> String {
    let mut out = format!("{name2},kind,{name1},f_nr,r_nr\n");
    for r in results {
        for s in &r.samples {
            for p in &s.points {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{}",
                    s.param2,
                    p.kind,
                    p.param(name1).unwrap_or(f64::NAN),
                    p.f_nr,
                    p.r_nr
                );
            }
        }
    }
    out
}

fn run_scan2(config: &ExperimentConfig, force: bool, start: Instant) -> Result<Outcome> {
    let out = Outputs::new(&config.output_path, "scan.csv", force)?;
    let cont = &config.continuation;
    let g = config.grid.expect("validated");
    let family = MeanFieldFamily::new(config.reduction(), config.model_params(), cont.param)?;
    let make = |v: f64| Ok(family.with_fixed(g.param, v));
    let range = (cont.range[0], cont.range[1]);
    let (n1, n2) = (cont.param.name(), g.param.name());
    let (folds, hopf) = rayon::join(
        || fold_loci(make, n2, range, &g.grid(), &cont.settings),
        || hopf_loci(make, n2, range, &g.grid(), &cont.settings),
    );
    let (folds, hopf) = (folds?, hopf?);
    let mut notes = Vec::new();
    if folds.codim2.is_empty() {
        notes.push(ScanNote {
            kind: "Cusp",
            message: "no cusp in range".into(),
        });
    }
    if hopf.codim2.is_empty() {
        notes.push(ScanNote {
            kind: "BT",
            message: "no BT in range".into(),
        });
    }
    let failed: Vec<Value> = folds
        .samples
        .iter()
        .filter_map(|s| {
            s.error
                .as_ref()
                .map(|e| json!({ n2: s.param2, "error": e }))
        })
        .collect();
    let codim2: Vec<&BifurcationPoint> = folds.codim2.iter().chain(&hopf.codim2).collect();
    let extra = json!({
        "points": codim2,
        "notes": notes,
        "failed_samples": failed,
        "tolerances": cont.settings,
    });
    out.write(
        &scan_csv(n1, n2, &[&folds, &hopf]),
        &summary(config, start, extra)?,
    )?;
    let mut line = format!("{} Cusp, {} BT", folds.codim2.len(), hopf.codim2.len());
    if !codim2.is_empty() {
        let _ = write!(line, ": {}", point_list(&codim2, &[n1, n2]));
    }
    for n in &notes {
        let _ = write!(line, "; {}", n.message);
    }
    println!("{line}");
    Ok(Outcome::Done)
}

fn run_reproduce(config: &ExperimentConfig, force: bool, start: Instant) -> Result<Outcome> {
    let table = check_table_id(config.table.as_deref().expect("validated"))?;
    let settings = &config.continuation.settings;
    let out = Outputs::new(&config.output_path, &format!("{table}.csv"), force)?;
    let report = reproduce_table(&table, settings)?;
    let mut csv = format!(
        "source,label,kind,ref_{c0},ref_{c1},{c0},{c1},err_{c0},err_{c1},tol_{c0},tol_{c1},pass\n",
        c0 = report.columns[0],
        c1 = report.columns[1]
    );
    for r in &report.rows {
        let c = r.computed.unwrap_or([f64::NAN; 2]);
        let e = r.abs_error.unwrap_or([f64::NAN; 2]);
        let _ = writeln!(
            csv,
            "\"{}\",{},{},{},{},{},{},{},{},{},{},{}",
            r.source,
            r.label,
            r.kind,
            r.reference[0],
            r.reference[1],
            c[0],
            c[1],
            e[0],
            e[1],
            r.tolerance[0],
            r.tolerance[1],
            u8::from(r.pass)
        );
    }
    let extra = json!({
        "table": report.table,
        "pass": report.pass(),
        "passed": report.passed(),
        "total": report.rows.len(),
        "rows": report.rows,
        "tolerances": settings,
    });
    out.write(&csv, &summary(config, start, extra)?)?;
    print!("{}", report.render());
    println!(
        "{}: {}",
        report.table,
        if report.pass() { "PASS" } else { "FAIL" }
    );
    Ok(if report.pass() {
        Outcome::Done
    } else {
        Outcome::Mismatch
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config_from(args: &[&str]) -> ExperimentConfig {
        let cli = Cli::try_parse_from(std::iter::once("theta-reset").chain(args.iter().copied()))
            .unwrap();
        build_config(&cli).unwrap()
    }

    #[test]
    fn flags_round_trip_through_json() {
        for args in [
            &[
                "branch", "--system", "infinite", "--param", "eta0", "--range", "0:1", "--k", "-2",
                "--gamma", "0",
            ][..],
            &[
                "scan2",
                "--k",
                "2",
                "--lambda",
                "1",
                "--param",
                "k",
                "--param2",
                "lambda",
                "--grid",
                "0.01:10:41",
                "--log-grid",
            ][..],
            &[
                "simulate",
                "--n-neurons",
                "200",
                "--lambda",
                "inf",
                "--seed",
                "9",
                "--sampling",
                "iid",
            ][..],
            &[
                "meanfield",
                "--z0",
                "0.1,0.2",
                "--lambda",
                "0.5",
                "--set",
                "meanfield.dt=0.002",
            ][..],
            &["reproduce", "t2"][..],
        ] {
            let c = config_from(args);
            let text = serde_json::to_string(&c).unwrap();
            assert_eq!(ExperimentConfig::from_json(&text).unwrap(), c, "{args:?}");
            c.validate().unwrap();
        }
    }

    #[test]
    fn flags_override_set_and_seed_reaches_simulation() {
        let c = config_from(&[
            "simulate",
            "--set",
            "sim.dt=0.02",
            "--dt",
            "0.005",
            "--seed",
            "4",
        ]);
        assert_eq!(c.sim.dt, 0.005);
        assert_eq!(c.sim.seed, 4);
        assert_eq!(c.mode, Mode::Simulate);
    }
}
