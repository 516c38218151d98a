//! `zeno` — scenario runner for the indirect-measurement decay simulator.
//!
//! Subcommands: `run`, `sweep`, `intensity`, `converge`, `oracle-check`,
//! `presets`. Exit codes: 0 success, 1 configuration error, 2 integration
//! failure.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use zeno_core::convergence::refine;
use zeno_core::coupling::{detector_response, photon_coupling};
use zeno_core::dynamics::{integrate_from, Frame};
use zeno_core::grid::build_mode_grid;
use zeno_core::kernel::delta_kernel;
use zeno_core::model::SystemModel;
use zeno_core::observables::{decay_rate_ratio, intensity_map, plateau};
use zeno_core::oracle::propagate_dense;
use zeno_core::scenario::{
    apply_config_str, apply_key_value, apply_literal_eta, preset, run_scenario, sweep_parameter,
    to_config_string, ScenarioConfig, PRESET_NAMES, SWEEP_PARAMETERS,
};
use zeno_core::state::init_state;

/// Environment variable naming the default output directory.
const OUT_DIR_ENV: &str = "ZENO_OUT_DIR";

#[derive(Parser)]
#[command(
    name = "zeno",
    version,
    about = "Simulate a two-level emitter decaying into a monitored photon continuum"
)]
struct Cli {
    /// Output directory (default: $ZENO_OUT_DIR, then ./zeno-out)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the available scenario presets
    Presets,
    /// Integrate one scenario and write its observable series as CSV
    Run(ScenarioArgs),
    /// Run one scenario per parameter value and summarize the plateaus
    Sweep {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Parameter to sweep: x_d, eta_peak, kernel_width, or delta_bw
        #[arg(long)]
        param: String,
        /// Comma-separated parameter values
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        values: Vec<f64>,
        /// Worker threads for the sweep (default: all cores)
        #[arg(long)]
        parallel: Option<usize>,
    },
    /// Write the space-time intensity map (distance measured from the emitter)
    Intensity {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Approximate number of time samples in the map
        #[arg(long)]
        t_samples: Option<usize>,
    },
    /// Run a grid-refinement ladder and write a convergence report
    Converge {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Comma-separated density factors, e.g. 1,2,4
        #[arg(long, value_delimiter = ',', default_value = "1,2,4")]
        density: Vec<f64>,
        /// Comma-separated range factors (defaults to all ones)
        #[arg(long, value_delimiter = ',')]
        range: Option<Vec<f64>>,
        /// Worker threads for the ladder (default: all cores)
        #[arg(long)]
        parallel: Option<usize>,
    },
    /// Compare the structured integrator against the dense oracle
    OracleCheck {
        #[arg(long, default_value_t = 4)]
        n_k: usize,
        #[arg(long, default_value_t = 3)]
        n_omega: usize,
        #[arg(long, default_value_t = 10.0)]
        t: f64,
        #[arg(long, default_value_t = 0.001)]
        dt: f64,
    },
}

#[derive(Args)]
struct ScenarioArgs {
    /// Start from a named preset (see `zeno presets`)
    #[arg(long)]
    preset: Option<String>,
    /// Apply `key = value` lines from a file over the base configuration
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override one configuration key (repeatable), e.g. --set t_end=50
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Use the literal caption detector strength, dropping the factor-10
    /// correction the presets apply
    #[arg(long = "ks-eta-convention")]
    ks_eta_convention: bool,
}

struct CliError {
    code: u8,
    msg: String,
}

impl CliError {
    fn config(msg: impl Into<String>) -> Self {
        CliError {
            code: 1,
            msg: msg.into(),
        }
    }
}

impl From<zeno_core::Error> for CliError {
    fn from(e: zeno_core::Error) -> Self {
        let code = match e {
            zeno_core::Error::NormDrift { .. } => 2,
            _ => 1,
        };
        CliError {
            code,
            msg: e.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError {
            code: 1,
            msg: format!("i/o error: {e}"),
        }
    }
}

fn main() -> ExitCode {
    env_logger::init();
    // flag parse failures are configuration errors (exit 1); --help and
    // --version keep exit 0
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.msg);
            ExitCode::from(e.code)
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Presets => {
            for name in PRESET_NAMES {
                let cfg = preset(name).expect("listed presets exist");
                println!(
                    "{name:14} eta_peak={:<8} kernel={:<12} x_d={}",
                    cfg.eta_peak,
                    kernel_label(&cfg),
                    cfg.x_d
                );
            }
            Ok(())
        }
        Command::Run(args) => cmd_run(&args, cli.out.as_deref()),
        Command::Sweep {
            scenario,
            param,
            values,
            parallel,
        } => cmd_sweep(&scenario, &param, &values, parallel, cli.out.as_deref()),
        Command::Intensity {
            scenario,
            t_samples,
        } => cmd_intensity(&scenario, t_samples, cli.out.as_deref()),
        Command::Converge {
            scenario,
            density,
            range,
            parallel,
        } => cmd_converge(&scenario, &density, range, parallel, cli.out.as_deref()),
        Command::OracleCheck {
            n_k,
            n_omega,
            t,
            dt,
        } => cmd_oracle_check(n_k, n_omega, t, dt),
    }
}

fn kernel_label(cfg: &ScenarioConfig) -> &'static str {
    match cfg.kernel {
        zeno_core::KernelSpec::Delta => "delta",
        zeno_core::KernelSpec::Gaussian { .. } => "gaussian",
        zeno_core::KernelSpec::Attenuation { .. } => "attenuation",
    }
}

fn resolve_config(args: &ScenarioArgs) -> Result<ScenarioConfig, CliError> {
    let mut cfg = match &args.preset {
        Some(name) => preset(name)?,
        None => ScenarioConfig::default(),
    };
    if args.ks_eta_convention {
        apply_literal_eta(&mut cfg);
    }
    if let Some(path) = &args.config {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
        apply_config_str(&mut cfg, &text)?;
    }
    for kv in &args.set {
        let (key, value) = kv
            .split_once('=')
            .ok_or_else(|| CliError::config(format!("--set expects KEY=VALUE, got `{kv}`")))?;
        apply_key_value(&mut cfg, key.trim(), value.trim())?;
    }
    Ok(cfg)
}

fn out_dir(flag: Option<&Path>) -> Result<PathBuf, CliError> {
    let dir = match flag {
        Some(p) => p.to_path_buf(),
        None => match std::env::var_os(OUT_DIR_ENV) {
            Some(v) => PathBuf::from(v),
            None => PathBuf::from("zeno-out"),
        },
    };
    fs::create_dir_all(&dir)
        .map_err(|e| CliError::config(format!("cannot create {}: {e}", dir.display())))?;
    Ok(dir)
}

/// Twelve significant digits, the documented CSV precision.
fn fmt12(v: f64) -> String {
    format!("{v:.11e}")
}

fn write_resolved_config(dir: &Path, cfg: &ScenarioConfig) -> Result<PathBuf, CliError> {
    let path = dir.join("config.resolved");
    fs::write(&path, to_config_string(cfg))?;
    Ok(path)
}

fn cmd_run(args: &ScenarioArgs, out: Option<&Path>) -> Result<(), CliError> {
    let cfg = resolve_config(args)?;
    cfg.validate()?;
    let dir = out_dir(out)?;
    let traj = run_scenario(&cfg)?;
    let ratio = decay_rate_ratio(&traj, cfg.gamma_free);

    let path = dir.join("series.csv");
    let mut csv = String::from("t,P_e,ratio,norm,detector_occupation\n");
    for i in 0..ratio.len() {
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt12(i as f64 * traj.dt),
            fmt12(traj.population[i]),
            fmt12(ratio.values[i]),
            fmt12(traj.norms[i]),
            fmt12(traj.detector_population[i]),
        ));
    }
    fs::write(&path, csv)?;
    let resolved = write_resolved_config(&dir, &cfg)?;

    let p = plateau(&ratio, traj.t_rec);
    let plateau_label = if p.is_nan() {
        "n/a (t_end precedes the plateau window)".to_string()
    } else {
        format!("{p:.4}")
    };
    println!(
        "wrote {} ({} rows) and {}",
        path.display(),
        ratio.len(),
        resolved.display()
    );
    println!(
        "plateau = {plateau_label}, max norm drift = {:.3e}, t_end = {}",
        traj.max_norm_drift,
        traj.t_end()
    );
    Ok(())
}

fn install_pool<T: Send>(
    parallel: Option<usize>,
    work: impl FnOnce() -> T + Send,
) -> Result<T, CliError> {
    match parallel {
        None => Ok(work()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| CliError::config(format!("cannot build thread pool: {e}")))?;
            Ok(pool.install(work))
        }
    }
}

fn cmd_sweep(
    args: &ScenarioArgs,
    param: &str,
    values: &[f64],
    parallel: Option<usize>,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let cfg = resolve_config(args)?;
    cfg.validate()?;
    if !SWEEP_PARAMETERS.contains(&param) {
        return Err(CliError::config(format!(
            "unknown sweep parameter `{param}`; available: {}",
            SWEEP_PARAMETERS.join(", ")
        )));
    }
    let dir = out_dir(out)?;
    let rows = install_pool(parallel, || sweep_parameter(&cfg, param, values))??;

    let path = dir.join("sweep.csv");
    let mut csv = String::from("parameter,value,plateau,max_norm_drift,status\n");
    for row in &rows {
        let plateau = row.plateau.map(fmt12).unwrap_or_default();
        let drift = row.max_norm_drift.map(fmt12).unwrap_or_default();
        let status = match &row.error {
            None => "ok".to_string(),
            Some(e) => format!("\"{}\"", e.replace('"', "'")),
        };
        csv.push_str(&format!(
            "{param},{},{plateau},{drift},{status}\n",
            fmt12(row.value)
        ));
    }
    fs::write(&path, csv)?;
    write_resolved_config(&dir, &cfg)?;

    let failures = rows.iter().filter(|r| r.error.is_some()).count();
    println!(
        "wrote {} ({} runs, {failures} failed)",
        path.display(),
        rows.len()
    );
    for row in &rows {
        match (&row.plateau, &row.error) {
            (Some(p), _) => println!("  {param} = {:<10} plateau = {p:.4}", row.value),
            (None, Some(e)) => println!("  {param} = {:<10} failed: {e}", row.value),
            _ => {}
        }
    }
    Ok(())
}

fn cmd_intensity(
    args: &ScenarioArgs,
    t_samples: Option<usize>,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let mut cfg = resolve_config(args)?;
    if let Some(n) = t_samples {
        let steps = (cfg.t_end / cfg.dt).round() as usize;
        cfg.sample_stride = (steps / n.max(1)).max(1);
    } else if cfg.sample_stride == 0 {
        return Err(CliError::config(
            "intensity map needs stored states; set sample_stride > 0 or pass --t-samples",
        ));
    }
    cfg.validate()?;
    let dir = out_dir(out)?;
    let traj = run_scenario(&cfg)?;
    let grid = cfg.photon_grid()?;
    let map = intensity_map(&traj, &grid, cfg.x_d)?;

    let path = dir.join("intensity.csv");
    let mut csv = String::from("x,t,I\n");
    for (it, t) in map.t.iter().enumerate() {
        for (ix, x) in map.x.iter().enumerate() {
            csv.push_str(&format!(
                "{},{},{}\n",
                fmt12(*x),
                fmt12(*t),
                fmt12(map.values[it][ix])
            ));
        }
    }
    fs::write(&path, csv)?;

    // companion file: the detector's spatial absorption profile on the same
    // axis (distance from the emitter), for plotting next to the map
    let kernel = cfg.build_kernel(&grid)?;
    let profile = kernel.spatial_profile(&grid, cfg.atom_frequency, &map.x, cfg.x_d);
    let ppath = dir.join("detector_profile.csv");
    let mut pcsv = String::from("x,weight\n");
    for (x, w) in map.x.iter().zip(&profile) {
        pcsv.push_str(&format!("{},{}\n", fmt12(*x), fmt12(*w)));
    }
    fs::write(&ppath, pcsv)?;
    write_resolved_config(&dir, &cfg)?;

    println!(
        "wrote {} ({} times x {} positions) and {}",
        path.display(),
        map.t.len(),
        map.x.len(),
        ppath.display()
    );
    Ok(())
}

fn cmd_converge(
    args: &ScenarioArgs,
    density: &[f64],
    range: Option<Vec<f64>>,
    parallel: Option<usize>,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let cfg = resolve_config(args)?;
    cfg.validate()?;
    let range = range.unwrap_or_else(|| vec![1.0; density.len()]);
    let dir = out_dir(out)?;
    let report = install_pool(parallel, || refine(&cfg, density, &range))??;

    let path = dir.join("convergence.json");
    let json = serde_json::to_string_pretty(&report)
        .map_err(|e| CliError::config(format!("cannot serialize report: {e}")))?;
    fs::write(&path, json)?;
    write_resolved_config(&dir, &cfg)?;

    println!("wrote {}", path.display());
    println!("density  range  n_k   n_omega  plateau");
    for r in &report.rungs {
        match r.plateau {
            Some(p) => println!(
                "{:<8} {:<6} {:<5} {:<8} {p:.5}",
                r.density_factor, r.range_factor, r.n_k, r.n_omega
            ),
            None => println!(
                "{:<8} {:<6} {:<5} {:<8} failed: {}",
                r.density_factor,
                r.range_factor,
                r.n_k,
                r.n_omega,
                r.error.clone().unwrap_or_default()
            ),
        }
    }
    println!(
        "successive deviations: {:?}; converged: {}",
        report.successive_deviations, report.passed
    );
    if report.rungs.iter().any(|r| r.error.is_some()) {
        return Err(CliError {
            code: 2,
            msg: "one or more ladder rungs failed to integrate".into(),
        });
    }
    Ok(())
}

fn cmd_oracle_check(n_k: usize, n_omega: usize, t: f64, dt: f64) -> Result<(), CliError> {
    let pg = build_mode_grid(0.0, 2.0, n_k)?;
    let og = build_mode_grid(0.0, 2.0, n_omega)?;
    let coupling = photon_coupling(&pg, 0.02, 0.5)?;
    let response = detector_response(&pg, 0.2, 2.0 / std::f64::consts::TAU, 1.0, 6)?;
    let model = SystemModel::new(pg.clone(), og, coupling, response, delta_kernel(&pg), 1.0)?;

    let start = init_state(&model);
    let traj = integrate_from(&model, &start, t, dt, 0, Frame::Direct)?;
    let dense = propagate_dense(&model, traj.t_end(), &start)?;
    let deviation = traj
        .final_state
        .to_flat()
        .iter()
        .zip(dense.to_flat())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    let norm_dev = (dense.norm() - 1.0).abs();
    println!(
        "dimension {}: max amplitude deviation {deviation:.3e} at t = {}, oracle norm deviation {norm_dev:.3e}",
        model.dim(),
        traj.t_end()
    );
    if deviation < 1e-8 {
        println!("oracle check PASS (tolerance 1e-8)");
        Ok(())
    } else {
        println!("oracle check FAIL (tolerance 1e-8)");
        Err(CliError {
            code: 2,
            msg: format!("integrator deviates from the dense oracle by {deviation:.3e}"),
        })
    }
}
