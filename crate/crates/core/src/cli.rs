//! Command-line front end: orchestrates the pipeline, emits figure/table
//! data as CSV/JSON, and writes a run manifest per invocation.
//!
//! Exit codes: 0 success, 2 parameter error, 3 numeric error. Identical
//! config and flags produce byte-identical CSV outputs (shortest round-trip
//! float formatting, fixed iteration orders).

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::dispersion;
use crate::error::{Error, Result};
use crate::params::MediumParams;
use crate::propagator::{self, SplitStep};
use crate::reduction::{self, CalibrationTargets, NlseCoefficients};
use crate::soliton::{self, SolitonParams};
use crate::twophoton;

/// Environment variable capping internal parallelism.
pub const THREADS_ENV: &str = "EIT_QNLSE_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "eit-qnlse",
    version,
    about = "EIT medium dispersion, envelope-equation coefficients, solitons, and two-photon bound states"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Scan the linear dispersion relation over a frequency window.
    Dispersion(DispersionArgs),
    /// Recover kappa13 and |g_p|^2 from reference (K2, W) values.
    Calibrate(CalibrateArgs),
    /// Analytic bright-soliton surface and derived quantities.
    Soliton(SolitonArgs),
    /// Split-step propagation of the envelope equation.
    Propagate(PropagateArgs),
    /// Two-photon bound state: density map plus lattice cross-check.
    Boundstate(BoundstateArgs),
}

#[derive(Debug, Args)]
pub struct DispersionArgs {
    /// Medium config file.
    pub config: PathBuf,
    /// Scan window lower edge, rad/s.
    #[arg(long, default_value_t = -7.5398223686155e8, allow_hyphen_values = true)]
    pub omega_min: f64,
    /// Scan window upper edge, rad/s.
    #[arg(long, default_value_t = 3.7699111843077e8)]
    pub omega_max: f64,
    /// Number of scan points.
    #[arg(long, default_value_t = 2001)]
    pub n: usize,
    /// Output prefix (writes `<out>.csv`, `<out>.summary.json`, `<out>.manifest.json`).
    #[arg(long)]
    pub out: PathBuf,
    /// Refuse to run when the couplings have not been calibrated.
    #[arg(long, default_value_t = false)]
    pub require_calibrated: bool,
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    pub config: PathBuf,
    /// Target Re K2, cm^-1 s^2.
    #[arg(long, default_value_t = 4.82e-15)]
    pub k2_target: f64,
    /// Target Re W, cm^-1.
    #[arg(long, default_value_t = -2.28e-7, allow_hyphen_values = true)]
    pub w_target: f64,
    /// Output prefix (writes `<out>.conf`, `<out>.report.json`, `<out>.manifest.json`).
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SolitonArgs {
    pub config: PathBuf,
    #[arg(long, default_value_t = soliton::DEFAULT_ETA0)]
    pub eta0: f64,
    #[arg(long, default_value_t = 0.1)]
    pub xi0: f64,
    /// Pulse duration t0, s.
    #[arg(long, default_value_t = 2.4e-7)]
    pub t0: f64,
    #[arg(long, default_value_t = 0.0)]
    pub z0: f64,
    #[arg(long, default_value_t = 0.0)]
    pub phi0: f64,
    /// Surface grid as NSxNT (s samples x t/t0 samples).
    #[arg(long, default_value = "241x61")]
    pub plot_grid: String,
    /// Output prefix.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct PropagateArgs {
    pub config: PathBuf,
    /// Grid size (power of two).
    #[arg(long, default_value_t = 4096)]
    pub grid: usize,
    /// Comoving window width, cm.
    #[arg(long, default_value_t = 12.0)]
    pub xi_span: f64,
    /// Time step, s.
    #[arg(long, default_value_t = 1.2e-10, allow_hyphen_values = true)]
    pub dt: f64,
    /// Total evolution time, s.
    #[arg(long, alias = "T", default_value_t = 1.2e-6, allow_hyphen_values = true)]
    pub t_total: f64,
    /// Initial condition: soliton | sech | file.
    #[arg(long, default_value = "soliton")]
    pub init: String,
    /// Snapshot CSV for --init file (columns `xi_cm,ReB,ImB[,absB]`, one row per grid cell).
    #[arg(long)]
    pub init_file: Option<PathBuf>,
    #[arg(long, default_value_t = soliton::DEFAULT_ETA0)]
    pub eta0: f64,
    #[arg(long, default_value_t = 0.1)]
    pub xi0: f64,
    #[arg(long, default_value_t = 2.4e-7)]
    pub t0: f64,
    /// Sech width for --init sech, cm.
    #[arg(long)]
    pub width: Option<f64>,
    /// Peak amplitude for --init sech.
    #[arg(long)]
    pub amplitude: Option<f64>,
    /// Observable sampling stride in steps.
    #[arg(long, default_value_t = 100)]
    pub sample_every: usize,
    /// Keep Im K2 and Im W instead of the real-part-only default.
    #[arg(long, default_value_t = false)]
    pub complex_coefficients: bool,
    /// Output prefix.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct BoundstateArgs {
    pub config: PathBuf,
    /// Center-of-mass momentum.
    #[arg(long, default_value_t = 0.0)]
    pub p0: f64,
    /// Lattice sites (odd).
    #[arg(long, default_value_t = 4001)]
    pub n: usize,
    /// Lattice spacing; default picks 1/(100 zeta0).
    #[arg(long)]
    pub dx: Option<f64>,
    /// Density-map samples per axis.
    #[arg(long, default_value_t = 201)]
    pub map_n: usize,
    /// Output prefix.
    #[arg(long)]
    pub out: PathBuf,
}

/// Run manifest written next to every command's outputs.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    /// Resolved command knobs (grid, steps, targets, ...) for reproducibility.
    pub args: serde_json::Value,
    pub config_hash: String,
    pub parameter_snapshot: MediumParams,
    pub tool_version: &'static str,
    pub output_files: Vec<String>,
    pub wall_time_s: f64,
    pub threads: usize,
}

/// Files produced by a successful command (manifest path last).
#[derive(Debug)]
pub struct CommandOutput {
    pub files: Vec<PathBuf>,
}

pub fn thread_cap() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .unwrap_or(1)
}

fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut s = String::with_capacity(64);
    for b in digest {
        s.push_str(&format!("{b:02x}"));
    }
    s
}

fn load(config: &Path) -> Result<(MediumParams, String)> {
    let bytes = std::fs::read(config)?;
    let hash = sha256_hex(&bytes);
    let text = String::from_utf8(bytes)
        .map_err(|_| Error::InvalidParam("config is not valid UTF-8".into()))?;
    let p = MediumParams::from_config_str(&text)?;
    Ok((p, hash))
}

fn write_manifest(
    prefix: &Path,
    command: &str,
    args: serde_json::Value,
    hash: &str,
    p: &MediumParams,
    files: &[PathBuf],
    started: Instant,
) -> Result<PathBuf> {
    let manifest = RunManifest {
        command: command.to_string(),
        args,
        config_hash: hash.to_string(),
        parameter_snapshot: p.clone(),
        tool_version: env!("CARGO_PKG_VERSION"),
        output_files: files
            .iter()
            .map(|f| f.to_string_lossy().into_owned())
            .collect(),
        wall_time_s: started.elapsed().as_secs_f64(),
        threads: thread_cap(),
    };
    let path = with_suffix(prefix, "manifest.json");
    std::fs::write(&path, serde_json::to_string_pretty(&manifest)?)?;
    Ok(path)
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut name = prefix.file_name().map(|s| s.to_os_string()).unwrap_or_default();
    name.push(".");
    name.push(suffix);
    prefix.with_file_name(name)
}

/// Execute a parsed command. Returns the list of files written.
pub fn execute(cli: Cli) -> Result<CommandOutput> {
    match cli.command {
        Command::Dispersion(args) => cmd_dispersion(args),
        Command::Calibrate(args) => cmd_calibrate(args),
        Command::Soliton(args) => cmd_soliton(args),
        Command::Propagate(args) => cmd_propagate(args),
        Command::Boundstate(args) => cmd_boundstate(args),
    }
}

#[derive(Serialize)]
struct DispersionSummary {
    vg: f64,
    k0_re: f64,
    k0_im: f64,
    k2_re: f64,
    k2_im: f64,
    omega_min_imk: f64,
    min_imk: f64,
    peaks: Vec<(f64, f64)>,
    eit_ratio: f64,
    eit_satisfied: bool,
    eit_floor_used: bool,
}

fn cmd_dispersion(args: DispersionArgs) -> Result<CommandOutput> {
    let started = Instant::now();
    let (p, hash) = load(&args.config)?;
    if args.require_calibrated && p.kappa13.is_none() {
        return Err(Error::MissingCalibration("kappa13"));
    }
    let scan = dispersion::transparency_scan(&p, args.omega_min, args.omega_max, args.n)?;
    let taylor = dispersion::taylor_coefficients(&p)?;

    let csv_path = with_suffix(&args.out, "csv");
    let mut csv = Vec::new();
    dispersion::write_scan_csv(&scan, &mut csv)?;
    std::fs::write(&csv_path, csv)?;

    let eit = p.eit_condition();
    let summary = DispersionSummary {
        vg: taylor.vg,
        k0_re: taylor.k0.re,
        k0_im: taylor.k0.im,
        k2_re: taylor.k2.re,
        k2_im: taylor.k2.im,
        omega_min_imk: scan.omega_min_imk,
        min_imk: scan.min_imk,
        peaks: scan.peaks.clone(),
        eit_ratio: eit.ratio,
        eit_satisfied: eit.satisfied,
        eit_floor_used: eit.floor_used,
    };
    let summary_path = with_suffix(&args.out, "summary.json");
    std::fs::write(&summary_path, serde_json::to_string_pretty(&summary)?)?;

    let mut files = vec![csv_path, summary_path];
    let knobs = serde_json::json!({
        "omega_min": args.omega_min,
        "omega_max": args.omega_max,
        "n": args.n,
        "require_calibrated": args.require_calibrated,
    });
    let manifest = write_manifest(&args.out, "dispersion", knobs, &hash, &p, &files, started)?;
    files.push(manifest);
    Ok(CommandOutput { files })
}

fn cmd_calibrate(args: CalibrateArgs) -> Result<CommandOutput> {
    let started = Instant::now();
    let (p, hash) = load(&args.config)?;
    let (cal, report) = reduction::calibrate(
        &p,
        CalibrationTargets {
            k2: args.k2_target,
            w: args.w_target,
        },
    )?;

    let conf_path = with_suffix(&args.out, "conf");
    cal.save_config(&conf_path)?;
    let report_path = with_suffix(&args.out, "report.json");
    std::fs::write(&report_path, serde_json::to_string_pretty(&report)?)?;

    let mut files = vec![conf_path, report_path];
    let knobs = serde_json::json!({
        "k2_target": args.k2_target,
        "w_target": args.w_target,
    });
    let manifest = write_manifest(&args.out, "calibrate", knobs, &hash, &cal, &files, started)?;
    files.push(manifest);
    Ok(CommandOutput { files })
}

#[derive(Serialize)]
struct SolitonDerivedTable {
    eta0: f64,
    xi0: f64,
    t0: f64,
    b0: f64,
    l0: f64,
    vg: f64,
    vs: f64,
    vs_over_c: f64,
    vg_over_c: f64,
    k2: f64,
    w: f64,
    carrier_wavenumber: f64,
}

fn parse_plot_grid(spec: &str) -> Result<(usize, usize)> {
    let (a, b) = spec
        .split_once('x')
        .ok_or_else(|| Error::InvalidParam(format!("bad --plot-grid \"{spec}\", want NSxNT")))?;
    let ns = a
        .parse::<usize>()
        .map_err(|_| Error::InvalidParam(format!("bad grid count \"{a}\"")))?;
    let nt = b
        .parse::<usize>()
        .map_err(|_| Error::InvalidParam(format!("bad grid count \"{b}\"")))?;
    Ok((ns, nt))
}

fn cmd_soliton(args: SolitonArgs) -> Result<CommandOutput> {
    let started = Instant::now();
    let (p, hash) = load(&args.config)?;
    let coeffs = NlseCoefficients::assemble(&p)?;
    let sp = SolitonParams::new(&coeffs, args.eta0, args.xi0, args.t0, args.z0, args.phi0)?;
    let (ns, nt) = parse_plot_grid(&args.plot_grid)?;

    let surf = soliton::soliton_surface(&sp, -12.0, 12.0, ns, 3.0, nt)?;
    let surface_path = with_suffix(&args.out, "surface.csv");
    let mut buf = Vec::new();
    soliton::write_surface_csv(&surf, &mut buf)?;
    std::fs::write(&surface_path, buf)?;

    // real-space dumps over one window around the trajectory
    let zs: Vec<f64> = (0..ns)
        .map(|j| sp.z0 - 12.0 * sp.l0 + 24.0 * sp.l0 * j as f64 / (ns - 1) as f64)
        .collect();
    let ts: Vec<f64> = (0..nt)
        .map(|j| 3.0 * sp.t0 * j as f64 / (nt - 1) as f64)
        .collect();
    let field_path = with_suffix(&args.out, "field.csv");
    let mut buf = Vec::new();
    soliton::write_field_dump_csv(&sp, &zs, &ts, &mut buf)?;
    std::fs::write(&field_path, buf)?;
    let probe_path = with_suffix(&args.out, "probe.csv");
    let mut buf = Vec::new();
    soliton::write_probe_dump_csv(&sp, &p, &zs, &ts, &mut buf)?;
    std::fs::write(&probe_path, buf)?;

    let table = SolitonDerivedTable {
        eta0: sp.eta0,
        xi0: sp.xi0,
        t0: sp.t0,
        b0: sp.b0,
        l0: sp.l0,
        vg: sp.vg,
        vs: sp.vs,
        vs_over_c: sp.vs / p.c_light,
        vg_over_c: sp.vg / p.c_light,
        k2: sp.k2,
        w: sp.w,
        carrier_wavenumber: sp.carrier_wavenumber(&p),
    };
    let table_path = with_suffix(&args.out, "derived.json");
    std::fs::write(&table_path, serde_json::to_string_pretty(&table)?)?;

    let mut files = vec![surface_path, field_path, probe_path, table_path];
    let knobs = serde_json::json!({
        "eta0": args.eta0,
        "xi0": args.xi0,
        "t0": args.t0,
        "z0": args.z0,
        "phi0": args.phi0,
        "plot_grid": args.plot_grid,
    });
    let manifest = write_manifest(&args.out, "soliton", knobs, &hash, &p, &files, started)?;
    files.push(manifest);
    Ok(CommandOutput { files })
}

fn read_init_file(path: &Path, n: usize) -> Result<Vec<Complex64>> {
    let text = std::fs::read_to_string(path)?;
    let mut values = Vec::with_capacity(n);
    for (idx, line) in text.lines().enumerate() {
        if idx == 0 && line.starts_with("xi_cm") {
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() < 3 {
            return Err(Error::InvalidParam(format!(
                "init file line {} needs xi_cm,ReB,ImB columns",
                idx + 1
            )));
        }
        let re: f64 = cols[1]
            .parse()
            .map_err(|_| Error::InvalidParam(format!("init file line {}: bad ReB", idx + 1)))?;
        let im: f64 = cols[2]
            .parse()
            .map_err(|_| Error::InvalidParam(format!("init file line {}: bad ImB", idx + 1)))?;
        values.push(Complex64::new(re, im));
    }
    if values.len() != n {
        return Err(Error::InvalidParam(format!(
            "init file has {} samples, grid needs {}",
            values.len(),
            n
        )));
    }
    Ok(values)
}

fn cmd_propagate(args: PropagateArgs) -> Result<CommandOutput> {
    let started = Instant::now();
    let (p, hash) = load(&args.config)?;
    if args.dt.is_nan() || args.dt <= 0.0 || !args.dt.is_finite() {
        return Err(Error::InvalidParam("dt must be positive and finite".into()));
    }
    if args.t_total.is_nan() || args.t_total <= 0.0 || !args.t_total.is_finite() {
        return Err(Error::InvalidParam("t-total must be positive and finite".into()));
    }
    let coeffs = NlseCoefficients::assemble(&p)?;

    let mut grid = match args.init.as_str() {
        "soliton" => {
            let sp = SolitonParams::new(&coeffs, args.eta0, args.xi0, args.t0, 0.0, 0.0)?;
            propagator::make_grid(args.grid, args.xi_span, coeffs.vg, |xi| {
                sp.comoving_envelope(xi, 0.0)
            })?
        }
        "sech" => {
            let width = args.width.ok_or_else(|| {
                Error::InvalidParam("--init sech needs --width".into())
            })?;
            let amplitude = args.amplitude.ok_or_else(|| {
                Error::InvalidParam("--init sech needs --amplitude".into())
            })?;
            if width.is_nan() || width <= 0.0 {
                return Err(Error::InvalidParam("--width must be > 0".into()));
            }
            propagator::make_grid(args.grid, args.xi_span, coeffs.vg, |xi| {
                Complex64::from(amplitude * soliton::sech(xi / width))
            })?
        }
        "file" => {
            let path = args.init_file.as_ref().ok_or_else(|| {
                Error::InvalidParam("--init file needs --init-file".into())
            })?;
            let values = read_init_file(path, args.grid)?;
            let mut j = 0;
            propagator::make_grid(args.grid, args.xi_span, coeffs.vg, |_| {
                let v = values[j.min(values.len() - 1)];
                j += 1;
                v
            })?
        }
        other => {
            return Err(Error::InvalidParam(format!(
                "unknown --init \"{other}\" (want soliton | sech | file)"
            )))
        }
    };
    if !grid.edge_guard_ok() {
        eprintln!("warning: envelope magnitude at the grid edges exceeds the wraparound guard");
    }

    // step manually so the real-space surface can be sampled alongside the
    // scalar trajectory; the xi axis is downsampled to keep files reasonable
    let mut stepper = SplitStep::with_mode(&coeffs, &grid, args.complex_coefficients);
    let steps = (args.t_total / args.dt).round().max(1.0) as usize;
    let every = args.sample_every.max(1);
    let stride = (grid.n() / 256).max(1);
    // axes in soliton units when the scale is known, otherwise raw
    let scales = if args.init == "soliton" {
        let sp = SolitonParams::new(&coeffs, args.eta0, args.xi0, args.t0, 0.0, 0.0)?;
        Some((sp.l0, sp.t0))
    } else {
        None
    };
    let mut traj = vec![propagator::observables(&grid)];
    let mut surface = Vec::new();
    {
        use std::io::Write as _;
        let w: &mut Vec<u8> = &mut surface;
        if scales.is_some() {
            writeln!(w, "s,t_over_t0,absB")?;
        } else {
            writeln!(w, "xi_cm,t_s,absB")?;
        }
        let dump_slice = |grid: &propagator::FieldGrid, w: &mut Vec<u8>| -> Result<()> {
            let (lx, lt) = scales.unwrap_or((1.0, 1.0));
            for j in (0..grid.n()).step_by(stride) {
                writeln!(
                    w,
                    "{},{},{}",
                    grid.xi(j) / lx,
                    grid.t_elapsed / lt,
                    grid.values[j].norm()
                )?;
            }
            Ok(())
        };
        dump_slice(&grid, w)?;
        for s in 1..=steps {
            stepper.step(&mut grid, args.dt)?;
            if s % every == 0 || s == steps {
                traj.push(propagator::observables(&grid));
                dump_slice(&grid, w)?;
            }
        }
    }
    // wraparound guard on the final state
    {
        let peak = grid.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let edge = grid.values[0].norm().max(grid.values[grid.n() - 1].norm());
        if peak > 0.0 && edge > propagator::EDGE_GUARD_FRAC * peak {
            eprintln!("warning: final state reaches the grid edges; wraparound suspected");
        }
    }

    let traj_path = with_suffix(&args.out, "trajectory.csv");
    let mut buf = Vec::new();
    propagator::write_trajectory_csv(&traj, &mut buf)?;
    std::fs::write(&traj_path, buf)?;

    let final_path = with_suffix(&args.out, "final.csv");
    let mut buf = Vec::new();
    propagator::write_snapshot_csv(&grid, &mut buf)?;
    std::fs::write(&final_path, buf)?;

    let surface_path = with_suffix(&args.out, "surface.csv");
    std::fs::write(&surface_path, surface)?;

    let mut files = vec![traj_path, final_path, surface_path];
    let knobs = serde_json::json!({
        "grid": args.grid,
        "xi_span": args.xi_span,
        "dt": args.dt,
        "t_total": args.t_total,
        "init": args.init,
        "sample_every": args.sample_every,
        "complex_coefficients": args.complex_coefficients,
    });
    let manifest = write_manifest(&args.out, "propagate", knobs, &hash, &p, &files, started)?;
    files.push(manifest);
    Ok(CommandOutput { files })
}

fn cmd_boundstate(args: BoundstateArgs) -> Result<CommandOutput> {
    let started = Instant::now();
    let (p, hash) = load(&args.config)?;
    let coeffs = NlseCoefficients::assemble(&p)?;
    let em = reduction::effective_masses(&coeffs, p.cell_length)?;

    let dx = args.dx.unwrap_or(1.0 / (100.0 * em.zeta0));
    let lattice = twophoton::lattice_ground_state(em.m0, em.a0, args.n, dx)?;
    let report = twophoton::bound_state_report(em.m0, em.a0, &lattice);

    let box_len = 24.0 / em.zeta0;
    let bound = twophoton::analytic_bound_state(em.m0, em.a0, args.p0, box_len, args.map_n)?;
    let map = density_map_parallel(&bound, thread_cap());

    let density_path = with_suffix(&args.out, "density.csv");
    let mut buf = Vec::new();
    twophoton::write_density_csv(&map, &mut buf)?;
    std::fs::write(&density_path, buf)?;

    #[derive(Serialize)]
    struct FullReport {
        zeta0_analytic: f64,
        zeta0_fit: Option<f64>,
        e_rel_lattice: f64,
        e_rel_analytic: f64,
        dx: f64,
        n: usize,
        p0: f64,
        m0: f64,
        a0: f64,
        energy: twophoton::EnergyBreakdown,
        box_len: f64,
        truncation_error: f64,
    }
    let full = FullReport {
        zeta0_analytic: report.zeta0_analytic,
        zeta0_fit: report.zeta0_fit,
        e_rel_lattice: report.e_rel_lattice,
        e_rel_analytic: report.e_rel_analytic,
        dx: report.dx,
        n: report.n,
        p0: args.p0,
        m0: em.m0,
        a0: em.a0,
        energy: bound.energy,
        box_len,
        truncation_error: bound.truncation_error,
    };
    let report_path = with_suffix(&args.out, "report.json");
    std::fs::write(&report_path, serde_json::to_string_pretty(&full)?)?;

    let mut files = vec![density_path, report_path];
    let knobs = serde_json::json!({
        "p0": args.p0,
        "n": args.n,
        "dx": dx,
        "map_n": args.map_n,
    });
    let manifest = write_manifest(&args.out, "boundstate", knobs, &hash, &p, &files, started)?;
    files.push(manifest);
    Ok(CommandOutput { files })
}

/// Density map evaluated row-parallel under the EIT_QNLSE_THREADS cap;
/// rows are written in index order, so the output is identical for any cap.
fn density_map_parallel(bound: &twophoton::BoundStateResult, threads: usize) -> twophoton::DensityMap {
    if threads <= 1 {
        return twophoton::density_map(bound);
    }
    let n = bound.n;
    let coords: Vec<f64> = (0..n).map(|j| (j as f64 + 0.5) / n as f64).collect();
    let mut density = vec![0.0; n * n];
    let chunk = n.div_ceil(threads);
    std::thread::scope(|scope| {
        for (t, rows) in density.chunks_mut(chunk * n).enumerate() {
            let grid = &bound.grid;
            scope.spawn(move || {
                let row0 = t * chunk;
                for (local, out) in rows.chunks_mut(n).enumerate() {
                    let j2 = row0 + local;
                    for j1 in 0..n {
                        out[j1] = grid[j2 * n + j1].norm_sqr();
                    }
                }
            });
        }
    });
    twophoton::DensityMap { n, coords, density }
}

/// Entry point used by the binary: execute and map errors to exit codes.
pub fn run(cli: Cli) -> i32 {
    match execute(cli) {
        Ok(output) => {
            for f in &output.files {
                println!("{}", f.display());
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
