//! The `fhme` command line: runs, sweeps, filter validation, the
//! free-streaming recurrence demo and damping fits of saved series.
//!
//! Any `--key value` (or `--key=value`) that is not one of a command's own
//! flags is a config override, e.g. `--filter.kind none --n 800`.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::diagnostics::{estimate_frequency, find_peaks, fit_damping_rate, fit_line};
use crate::error::{Error, Result};
use crate::filter::validate_filter;
use crate::reference::{dvm_density, exact_free_streaming_density, dvm_vlasov_run, HermiteCollocation};
use crate::simulation::{run, RunFailure, RunRecord, SimConfig, TimeSeries};

/// Exit status for a run that aborted or a check that failed.
pub const EXIT_FAILURE: i32 = 1;
/// Exit status for bad configuration or usage.
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "fhme", version, about = "Filtered hyperbolic moment method for Vlasov-Poisson")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one simulation and write series.csv, meta.txt and spectra.
    Run(RunArgs),
    /// Run every combination of sweep.n × sweep.m × sweep.cfl.
    Sweep(RunArgs),
    /// Check the four filter conditions for the configured filter.
    ValidateFilter(ValidateArgs),
    /// Tabulate exact, discrete-velocity and Hermite-collocation
    /// free-streaming densities.
    RecurrenceDemo(RecurrenceArgs),
    /// Fit the damping rate and frequency of a saved series.
    Fit(FitArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Config file of `key = value` lines.
    #[arg(short, long)]
    pub config: Option<PathBuf>,
    /// Output directory; must not exist unless `--force`.
    #[arg(short, long, default_value = "out")]
    pub out: PathBuf,
    #[arg(long)]
    pub force: bool,
    /// Use the discrete-velocity reference solver instead of the moment method.
    #[arg(long)]
    pub dvm: bool,
    #[arg(skip)]
    pub overrides: Vec<(String, String)>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(short, long)]
    pub config: Option<PathBuf>,
    /// Time step entering the time-dependent filters.
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    /// Orders to check (default: the configured `m`).
    #[arg(long, value_delimiter = ',')]
    pub orders: Vec<usize>,
    #[arg(skip)]
    pub overrides: Vec<(String, String)>,
}

#[derive(Debug, Args)]
pub struct RecurrenceArgs {
    #[arg(long, default_value_t = 0.5)]
    pub amplitude: f64,
    #[arg(long, default_value_t = 0.5)]
    pub k: f64,
    /// Velocity spacing (default π/10).
    #[arg(long)]
    pub dv: Option<f64>,
    /// Hermite collocation order.
    #[arg(long, default_value_t = 50)]
    pub m: usize,
    #[arg(long, default_value_t = 60.0)]
    pub t_end: f64,
    #[arg(long, default_value_t = 0.25)]
    pub dt: f64,
    /// Sample points over one period `2π/k`.
    #[arg(long, default_value_t = 128)]
    pub nx: usize,
    #[arg(short, long, default_value = "recurrence")]
    pub out: PathBuf,
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// A series.csv written by `run`.
    pub series: PathBuf,
    #[arg(long, default_value_t = 0.0)]
    pub t_start: f64,
    /// End of the fit window (default: last sample).
    #[arg(long)]
    pub t_end: Option<f64>,
}

/// Flags owned by each command; every other `--x` is a config override.
fn own_flags(command: &str) -> Option<&'static [&'static str]> {
    match command {
        "run" | "sweep" => Some(&["-c", "--config", "-o", "--out", "--force", "--dvm", "-h", "--help"]),
        "validate-filter" => Some(&["-c", "--config", "--dt", "--orders", "-h", "--help"]),
        _ => None,
    }
}

const SWITCHES: &[&str] = &["--force", "--dvm", "-h", "--help"];

/// Split config overrides out of `args` (program name first).
pub fn split_overrides(args: &[String]) -> std::result::Result<(Vec<String>, Vec<(String, String)>), String> {
    let Some(flags) = args.get(1).and_then(|c| own_flags(c)) else {
        return Ok((args.to_vec(), Vec::new()));
    };
    let mut kept = args[..2].to_vec();
    let mut overrides = Vec::new();
    let mut it = args[2..].iter();
    while let Some(arg) = it.next() {
        let (name, inline) = match arg.split_once('=') {
            Some((n, v)) if arg.starts_with("--") => (n, Some(v.to_string())),
            _ => (arg.as_str(), None),
        };
        if flags.contains(&name) || !arg.starts_with("--") {
            kept.push(arg.clone());
            if inline.is_none() && flags.contains(&name) && !SWITCHES.contains(&name) {
                if let Some(v) = it.next() {
                    kept.push(v.clone());
                }
            }
            continue;
        }
        let key = name.trim_start_matches("--").to_string();
        let value = match inline {
            Some(v) => v,
            None => it.next().cloned().ok_or_else(|| format!("override --{key} needs a value"))?,
        };
        overrides.push((key, value));
    }
    Ok((kept, overrides))
}

/// Parse and execute; returns the process exit status.
pub fn main_with_args(args: &[String]) -> i32 {
    let (kept, overrides) = match split_overrides(args) {
        Ok(x) => x,
        Err(msg) => {
            eprintln!("error: {msg}");
            return EXIT_USAGE;
        }
    };
    let cli = match Cli::try_parse_from(&kept) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Run(mut a) => {
            a.overrides = overrides;
            cmd_run(&a)
        }
        Command::Sweep(mut a) => {
            a.overrides = overrides;
            cmd_sweep(&a)
        }
        Command::ValidateFilter(mut a) => {
            a.overrides = overrides;
            cmd_validate_filter(&a)
        }
        Command::RecurrenceDemo(a) => cmd_recurrence_demo(&a),
        Command::Fit(a) => cmd_fit(&a),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::InvalidParameter(_) => EXIT_USAGE,
        _ => EXIT_FAILURE,
    }
}

fn load_config(path: Option<&Path>, overrides: &[(String, String)]) -> Result<SimConfig> {
    Ok(match path {
        Some(p) => SimConfig::from_file(p, overrides)?,
        None => SimConfig::parse("", overrides)?,
    })
}

fn prepare_dir(dir: &Path, force: bool) -> Result<()> {
    if dir.exists() && !force {
        return Err(Error::InvalidParameter(format!(
            "output directory {} exists (pass --force to overwrite)",
            dir.display()
        )));
    }
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Config echo followed by `#` comment lines; parses back as the same config.
pub fn meta_text(config: &SimConfig, record: &RunRecord, solver: &str, status: &str) -> String {
    let mut s = config.to_config_string();
    let _ = writeln!(s, "# fhme {}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(s, "# solver {solver}");
    let _ = writeln!(s, "# status {status}");
    let _ = writeln!(s, "# steps {}", record.steps);
    let _ = writeln!(s, "# final_time {}", record.final_time);
    let _ = writeln!(s, "# wall_seconds {:.3}", record.wall_seconds);
    s
}

/// Run `config` and write its outputs into `dir`. A failed run still
/// writes the partial series.
pub fn write_run(config: &SimConfig, dir: &Path, dvm: bool) -> Result<std::result::Result<RunRecord, RunFailure>> {
    let outcome = if dvm { dvm_vlasov_run(config) } else { run(config) };
    let solver = if dvm { "dvm" } else { "hme" };
    let (record, status) = match &outcome {
        Ok(r) => (r, "ok".to_string()),
        Err(f) => (&f.partial, format!("aborted: {}", f.error)),
    };
    record.series.write_csv(&dir.join("series.csv"))?;
    for spectrum in &record.spectra {
        write(&dir.join(spectrum.file_name()), &spectrum.to_csv())?;
    }
    write(&dir.join("meta.txt"), &meta_text(config, record, solver, &status))?;
    Ok(outcome)
}

pub fn cmd_run(args: &RunArgs) -> Result<i32> {
    let config = load_config(args.config.as_deref(), &args.overrides)?;
    prepare_dir(&args.out, args.force)?;
    match write_run(&config, &args.out, args.dvm)? {
        Ok(r) => {
            println!(
                "{} steps to t = {} in {:.1} s; wrote {}",
                r.steps,
                r.final_time,
                r.wall_seconds,
                args.out.display()
            );
            Ok(0)
        }
        Err(f) => {
            eprintln!("run aborted: {}", f.error);
            Ok(EXIT_FAILURE)
        }
    }
}

/// Fitted rate and frequency of a series over `window`.
pub fn fit_series(series: &TimeSeries, window: (f64, f64)) -> Result<(f64, f64)> {
    let peaks = find_peaks(&series.t, &series.e);
    let fit = fit_damping_rate(&peaks, window)?;
    let omega = estimate_frequency(&peaks.window(window.0, window.1))?;
    Ok((fit.rate, omega))
}

/// One row of `summary.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub n: usize,
    pub m: usize,
    pub cfl: f64,
    pub dx: f64,
    pub gamma: Option<f64>,
    pub omega: Option<f64>,
    pub steps: usize,
    pub status: String,
}

fn opt(x: Option<f64>) -> String {
    x.map_or(String::new(), |v| format!("{v:.16e}"))
}

pub fn summary_csv(rows: &[SweepRow]) -> String {
    let mut s = String::from("n,m,cfl,dx,gamma,omega,steps,status\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{:.16e},{},{},{},{}",
            r.n,
            r.m,
            r.cfl,
            r.dx,
            opt(r.gamma),
            opt(r.omega),
            r.steps,
            r.status.replace(',', ";")
        );
    }
    s
}

/// Per `(m, cfl)` group with at least two successful grid sizes, the
/// least-squares line of `γ` and `ω_R` against `Δx`, read at `Δx = 0`.
pub fn extrapolation_csv(rows: &[SweepRow]) -> String {
    let mut s = String::from("m,cfl,points,gamma_extrapolated,gamma_slope,omega_extrapolated\n");
    let mut groups: Vec<(usize, f64)> = Vec::new();
    for r in rows {
        if !groups.contains(&(r.m, r.cfl)) {
            groups.push((r.m, r.cfl));
        }
    }
    for (m, cfl) in groups {
        let ok: Vec<&SweepRow> = rows
            .iter()
            .filter(|r| r.m == m && r.cfl == cfl && r.gamma.is_some() && r.omega.is_some())
            .collect();
        let dx: Vec<f64> = ok.iter().map(|r| r.dx).collect();
        let gamma: Vec<f64> = ok.iter().filter_map(|r| r.gamma).collect();
        let omega: Vec<f64> = ok.iter().filter_map(|r| r.omega).collect();
        let distinct = dx.iter().any(|&d| d != dx[0]);
        if let (true, Ok(g), Ok(w)) = (distinct, fit_line(&dx, &gamma), fit_line(&dx, &omega)) {
            let _ = writeln!(
                s,
                "{m},{cfl},{},{:.16e},{:.16e},{:.16e}",
                ok.len(),
                g.intercept,
                g.rate,
                w.intercept
            );
        }
    }
    s
}

fn or_base<T: Copy>(list: &[T], base: T) -> Vec<T> {
    if list.is_empty() {
        vec![base]
    } else {
        list.to_vec()
    }
}

pub fn cmd_sweep(args: &RunArgs) -> Result<i32> {
    let base = load_config(args.config.as_deref(), &args.overrides)?;
    prepare_dir(&args.out, args.force)?;
    let mut rows = Vec::new();
    for &n in &or_base(&base.sweep_n, base.nx) {
        for &m in &or_base(&base.sweep_m, base.m) {
            for &cfl in &or_base(&base.sweep_cfl, base.cfl) {
                let config = SimConfig { nx: n, m, cfl, ..base.clone() };
                let dir = args.out.join(format!("n{n}_m{m}_cfl{cfl}"));
                prepare_dir(&dir, true)?;
                let dx = config.lengths().0 / n as f64;
                let mut row = SweepRow {
                    n,
                    m,
                    cfl,
                    dx,
                    gamma: None,
                    omega: None,
                    steps: 0,
                    status: "ok".into(),
                };
                match write_run(&config, &dir, args.dvm)? {
                    Ok(r) => {
                        row.steps = r.steps;
                        match fit_series(&r.series, config.fit_window()) {
                            Ok((g, w)) => {
                                row.gamma = Some(g);
                                row.omega = Some(w);
                            }
                            Err(e) => row.status = format!("fit failed: {e}"),
                        }
                    }
                    Err(f) => {
                        row.steps = f.partial.steps;
                        row.status = format!("aborted: {}", f.error);
                    }
                }
                println!(
                    "n={n} m={m} cfl={cfl}: gamma={} omega={} ({})",
                    opt(row.gamma),
                    opt(row.omega),
                    row.status
                );
                rows.push(row);
            }
        }
    }
    write(&args.out.join("summary.csv"), &summary_csv(&rows))?;
    let extrapolated = extrapolation_csv(&rows);
    write(&args.out.join("extrapolation.csv"), &extrapolated)?;
    print!("{extrapolated}");
    Ok(0)
}

pub fn cmd_validate_filter(args: &ValidateArgs) -> Result<i32> {
    let config = load_config(args.config.as_deref(), &args.overrides)?;
    let orders = or_base(&args.orders, config.m);
    let mut out = std::io::stdout().lock();
    let mut all = true;
    for m in orders {
        let report = validate_filter(&config.filter, m, args.dt)?;
        let _ = writeln!(out, "filter {} M={m} dt={}:\n{report}", config.filter.kind, args.dt);
        all &= report.all_pass();
    }
    Ok(if all { 0 } else { EXIT_FAILURE })
}

pub fn cmd_recurrence_demo(args: &RecurrenceArgs) -> Result<i32> {
    if !(args.dt > 0.0 && args.t_end >= 0.0 && args.nx > 0 && args.k > 0.0) {
        return Err(Error::InvalidParameter("need dt > 0, t_end >= 0, nx > 0, k > 0".into()));
    }
    let dv = args.dv.unwrap_or(std::f64::consts::PI / 10.0);
    let j = crate::reference::dvm_half_width(dv);
    let hermite = HermiteCollocation::new(args.m)?;
    prepare_dir(&args.out, args.force)?;
    let (a, k) = (args.amplitude, args.k);
    let length = 2.0 * std::f64::consts::PI / k;
    let times: Vec<f64> = (0..=(args.t_end / args.dt).round() as usize)
        .map(|i| i as f64 * args.dt)
        .collect();
    let mut dens = String::from("t,x,exact,dvm,hermite\n");
    let mut amp = String::from("t,exact,dvm,hermite\n");
    for &t in &times {
        let mut peak = [0.0f64; 3];
        for i in 0..args.nx {
            let x = i as f64 * length / args.nx as f64;
            let n = [
                exact_free_streaming_density(x, t, a, k),
                dvm_density(x, t, a, k, dv, j),
                hermite.density(x, t, a, k),
            ];
            let _ = writeln!(dens, "{t:.16e},{x:.16e},{:.16e},{:.16e},{:.16e}", n[0], n[1], n[2]);
            for (p, v) in peak.iter_mut().zip(n) {
                *p = p.max((v - 1.0).abs());
            }
        }
        let _ = writeln!(amp, "{t:.16e},{:.16e},{:.16e},{:.16e}", peak[0], peak[1], peak[2]);
    }
    write(&args.out.join("densities.csv"), &dens)?;
    write(&args.out.join("amplitude.csv"), &amp)?;
    println!(
        "dv={dv} (J={j}, period {:.4}); M={}; wrote {}",
        crate::reference::dvm_period(k, dv),
        args.m,
        args.out.display()
    );
    Ok(0)
}

pub fn cmd_fit(args: &FitArgs) -> Result<i32> {
    let series = TimeSeries::read_csv(&args.series)?;
    let end = args.t_end.unwrap_or_else(|| series.t.last().copied().unwrap_or(0.0));
    let (gamma, omega) = fit_series(&series, (args.t_start, end))?;
    println!("gamma = {gamma:.6}");
    println!("omega = {omega:.6}");
    Ok(0)
}
