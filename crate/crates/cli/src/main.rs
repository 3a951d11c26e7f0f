//! `thermo1d`: run simulations and verification studies from the command line.
//!
//! Exit codes: 0 success, 1 failed checks or runtime error, 2 usage or config error.

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use thermo1d::bounds::{ln_time_shift_constant, BaseConstants, ConstantsLedger};
use thermo1d::experiments::{self, MmsConfig, Perturbation, Report, RoughTolerances, RunSpec};
use thermo1d::grid::gn_constants_for_width;
use thermo1d::init::{InitialData, RoughKind, RoughParams};
use thermo1d::io::config::{parse_config, serialize_config, RunConfig};
use thermo1d::io::{export, plot};
use thermo1d::{Error, Exec, Material, Scheme};

const OUTPUT_ROOT_ENV: &str = "THERMO1D_OUTPUT_ROOT";

#[derive(Parser)]
#[command(
    name = "thermo1d",
    version,
    about = "1D nonlinear thermoelasticity solver and verification studies"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Common {
    /// Run configuration (sectioned `key = value` file).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory. Defaults to `$THERMO1D_OUTPUT_ROOT/<name>`, or `./<name>`.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Also write gnuplot scripts next to the data.
    #[arg(long, global = true)]
    plot: bool,
    /// Run independent simulations one after another.
    #[arg(long, global = true)]
    sequential: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one simulation and export diagnostics and snapshots.
    Run,
    /// Energy drift of the limit solver and its decay under refinement.
    EnergyAudit {
        #[arg(long, default_value_t = 2)]
        levels: usize,
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
        #[arg(long, default_value_t = 1.8)]
        min_ratio: f64,
    },
    /// Continuous dependence on the initial temperature.
    Stability {
        #[arg(long, value_delimiter = ',', default_value = "1e-2,1e-3,1e-4")]
        deltas: Vec<f64>,
        #[arg(long, default_value_t = 0.9)]
        exponent_lo: f64,
        #[arg(long, default_value_t = 1.1)]
        exponent_hi: f64,
    },
    /// Distances between runs along a decreasing epsilon ladder.
    EpsCauchy {
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "1e-1,3e-2,1e-2,3e-3,1e-3"
        )]
        ladder: Vec<f64>,
        #[arg(long, default_value_t = 0.25)]
        final_fraction: f64,
    },
    /// Time-shift difference estimate of a regularized run.
    TimeShift {
        #[arg(long, value_delimiter = ',', default_value = "0.01,0.05,0.1")]
        shifts: Vec<f64>,
    },
    /// Tent-shaped displacement, grid refinement study.
    RoughData {
        #[arg(long, default_value_t = 3)]
        levels: usize,
        #[arg(long, default_value_t = 1e-2)]
        energy_rel: f64,
        #[arg(long, default_value_t = 0.1)]
        dissipation_rel: f64,
    },
    /// Manufactured-solution convergence orders (ignores --config).
    Mms {
        #[arg(long, default_value = "identity")]
        material: String,
        #[arg(long, default_value_t = 0.0)]
        epsilon: f64,
        #[arg(long, default_value = "imex1")]
        scheme: String,
        #[arg(long, default_value_t = 3)]
        levels: usize,
        #[arg(long, default_value_t = 1.9)]
        min_spatial: f64,
        #[arg(long, default_value_t = 0.2)]
        temporal_tol: f64,
    },
    /// Print the stability constants for (eta, K, T, Omega, material).
    Constants {
        #[arg(long)]
        eta: f64,
        #[arg(long = "K")]
        k: f64,
        #[arg(long, value_delimiter = ',', default_value = "0,1")]
        omega: Vec<f64>,
        #[arg(long, default_value = "identity")]
        material: String,
        #[arg(long = "T", default_value_t = 1.0)]
        t: f64,
    },
}

enum Failure {
    Usage(String),
    Runtime(String),
    Checks,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) => Failure::Usage(e.to_string()),
            other => Failure::Runtime(other.to_string()),
        }
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checks) => ExitCode::from(1),
        Err(Failure::Runtime(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: &Cli) -> Outcome {
    let c = &cli.common;
    let exec = if c.sequential {
        Exec::Sequential
    } else {
        Exec::default()
    };
    match &cli.cmd {
        Cmd::Run => run(c),
        Cmd::EnergyAudit {
            levels,
            tol,
            min_ratio,
        } => {
            let spec = base_spec(c, |_| {})?;
            let r = experiments::energy_audit(&spec, *levels, *tol, *min_ratio, exec)?;
            finish(c, "energy-audit", &r)
        }
        Cmd::Stability {
            deltas,
            exponent_lo,
            exponent_hi,
        } => {
            let spec = base_spec(c, |r| r.solver.t_end = 0.5)?;
            let r = experiments::stability(
                &spec,
                Perturbation::theta_only(),
                deltas,
                (*exponent_lo, *exponent_hi),
                exec,
            )?;
            finish(c, "stability", &r)
        }
        Cmd::EpsCauchy {
            ladder,
            final_fraction,
        } => {
            let spec = base_spec(c, |r| r.grid.n_cells = 128)?;
            let r = experiments::eps_cauchy(&spec, ladder, *final_fraction, exec)?;
            finish(c, "eps-cauchy", &r)
        }
        Cmd::TimeShift { shifts } => {
            let spec = base_spec(c, |r| {
                r.grid.n_cells = 100;
                r.solver.epsilon = 1e-2;
            })?;
            let r = experiments::time_shift(&spec, shifts)?;
            finish(c, "time-shift", &r)
        }
        Cmd::RoughData {
            levels,
            energy_rel,
            dissipation_rel,
        } => {
            let spec = base_spec(c, |r| {
                r.initial_data = InitialData::Rough(
                    RoughParams::new(RoughKind::StepStrain {
                        jump_at: 0.5,
                        left_slope: 1.0,
                    })
                    .theta_base(1.0),
                );
            })?;
            let tol = RoughTolerances {
                energy_rel: *energy_rel,
                dissipation_rel: *dissipation_rel,
            };
            let r = experiments::rough_data(&spec, *levels, tol, exec)?;
            finish(c, "rough-data", &r)
        }
        Cmd::Mms {
            material,
            epsilon,
            scheme,
            levels,
            min_spatial,
            temporal_tol,
        } => {
            let scheme = Scheme::from_name(scheme).ok_or_else(|| {
                Failure::Usage(format!("unknown scheme `{scheme}` (imex1, imex2)"))
            })?;
            let mut cfg = MmsConfig::new(material_by_name(material)?, *epsilon, scheme);
            cfg.levels = *levels;
            let r = experiments::mms(&cfg, *min_spatial, *temporal_tol, exec)?;
            finish(c, "mms", &r)
        }
        Cmd::Constants {
            eta,
            k,
            omega,
            material,
            t,
        } => constants(*eta, *k, omega, material, *t),
    }
}

fn material_by_name(name: &str) -> Result<Material, Failure> {
    match name {
        "identity" => Ok(Material::identity()),
        "log1p" => Ok(Material::log1p()),
        "rational_saturating" => Ok(Material::rational_saturating()),
        other => Err(Failure::Usage(format!(
            "unknown material `{other}` (identity, log1p, rational_saturating)"
        ))),
    }
}

fn load_config(path: &Path) -> Result<RunConfig, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read config {}: {e}", path.display())))?;
    Ok(parse_config(&text)?)
}

/// The `--config` file if given, else the defaults adjusted by `tweak`.
fn base_spec(c: &Common, tweak: impl FnOnce(&mut RunConfig)) -> Result<RunSpec, Failure> {
    let rc = match &c.config {
        Some(p) => load_config(p)?,
        None => {
            let mut rc = RunConfig::default();
            tweak(&mut rc);
            rc
        }
    };
    Ok(rc.run_spec()?)
}

fn output_dir(c: &Common, leaf: &str) -> PathBuf {
    if let Some(p) = &c.output {
        return p.clone();
    }
    match std::env::var_os(OUTPUT_ROOT_ENV) {
        Some(root) => PathBuf::from(root).join(leaf),
        None => PathBuf::from(leaf),
    }
}

fn run(c: &Common) -> Outcome {
    let rc = match &c.config {
        Some(p) => load_config(p)?,
        None => RunConfig::default(),
    };
    let spec = rc.run_spec()?;
    let traj = spec.run()?;
    let dir = output_dir(c, &rc.output.directory);
    let files = export::write_trajectory(&dir, &traj, &rc.output.formats)?;
    write_text(&dir.join("config.txt"), &serialize_config(&rc))?;
    if c.plot {
        let last = files
            .iter()
            .filter(|p| p.extension().is_some_and(|e| e == "csv"))
            .filter_map(|p| p.strip_prefix(&dir).ok())
            .rfind(|p| p.starts_with("snapshots"))
            .map(|p| p.to_string_lossy().replace('\\', "/"));
        plot::write_plot_scripts(&dir, last.as_deref())?;
    }
    let first = traj.records[0];
    let last = traj.records.last().copied().unwrap_or(first);
    println!("steps        {}", traj.records.len() - 1);
    println!("t_end        {:.6e}", last.t);
    println!("E(0)         {:.16e}", first.energy);
    println!("E(T)         {:.16e}", last.energy);
    println!(
        "|dE|/E(0)    {:.3e}",
        (last.energy - first.energy).abs() / first.energy.abs().max(f64::MIN_POSITIVE)
    );
    println!("min Theta    {:.6e}", traj.theta_min());
    println!("output       {}", dir.display());
    Ok(())
}

fn write_text(path: &Path, text: &str) -> Outcome {
    std::fs::write(path, text)
        .map_err(|e| Failure::Runtime(format!("cannot write {}: {e}", path.display())))
}

fn finish<R: Report + Serialize>(c: &Common, leaf: &str, report: &R) -> Outcome {
    let dir = output_dir(c, leaf);
    export::write_report(&dir, report)?;
    if c.plot {
        for t in report.tables() {
            let log = t.rows.iter().flatten().all(|x| *x > 0.0);
            let script = plot::table_script(
                &format!("{}.csv", t.name),
                &format!("{}.png", t.name),
                &t.columns,
                log,
            );
            write_text(&dir.join(format!("plot_{}.gp", t.name)), &script)?;
        }
    }
    print!("{}", report.summary());
    let verdict = if report.passed() { "PASS" } else { "FAIL" };
    println!("{}: {verdict} (output in {})", report.name(), dir.display());
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Checks)
    }
}

fn constants(eta: f64, k: f64, omega: &[f64], material: &str, t: f64) -> Outcome {
    let [a, b] = omega else {
        return Err(Failure::Usage("--omega takes two numbers a,b".into()));
    };
    if b <= a {
        return Err(Failure::Usage(format!("--omega: need a < b, got {a},{b}")));
    }
    let m = material_by_name(material)?;
    let base = BaseConstants::for_interval(*a, *b, &m)?;
    let c10 = gn_constants_for_width(b - a)?.c10;
    let ledger = ConstantsLedger::new(base, c10, eta, k, t)?;
    println!("material   = {}", m.kind().name());
    print!("{}", ledger.report());
    println!(
        "{:<10} = {:<24} # log of the time-shift constant C(T), run constant set to K",
        "lnC",
        format!("{:.10e}", ln_time_shift_constant(k, t, &base)?)
    );
    Ok(())
}
