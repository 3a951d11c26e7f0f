//! Short-time bound on the `ρ`-weighted functional for the regularized system.

use super::{fmt_e, gn_for, impl_report, Check, RunSpec, Table};
use crate::bounds::{tau_bound, RunBounds, TauBound};
use crate::diagnostics::hfunc;
use crate::error::{Error, Result};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegularityReport {
    pub y0: f64,
    /// Bounds evaluated on the temperature range observed up to the horizon.
    pub bounds: RunBounds,
    pub tau: TauBound,
    pub dt: f64,
    /// `max_{t<τ} y(t)`.
    pub y_max: f64,
    /// `∫₀^τ‖Θ_xx‖²`, from the first record at or after `τ`.
    pub theta_xx_integral: f64,
    pub checks: Vec<Check>,
    pub tables: Vec<Table>,
}

impl_report!(RegularityReport, "short-time-regularity");

/// Steps per horizon at least.
const STEPS_PER_TAU: f64 = 20.0;

/// Compute the horizon `τ` from the data and run up to it.
///
/// The constants depend on the temperature range along the run, which is only
/// known afterwards: the first horizon uses the range of `Θ₀`, the final one
/// the range observed on `[0, τ₀]`. The observed range contains the initial
/// one, so the final horizon is never longer than the simulated interval.
pub fn short_time_regularity(spec: &RunSpec) -> Result<RegularityReport> {
    if !(spec.solver.epsilon > 0.0) {
        return Err(Error::Contract(format!(
            "the short-time bound concerns the regularized system, got epsilon = {}",
            spec.solver.epsilon
        )));
    }
    let g = &spec.grid;
    let init = spec.initial_state()?;
    let y0 = hfunc(&init, g, &spec.material).ok_or_else(|| {
        Error::Contract("initial temperature must be bounded away from zero".into())
    })?;
    let c10 = gn_for(g)?.c10;
    let th = init.theta.values();
    let (lo, hi) = th
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(l, h), t| (l.min(*t), h.max(*t)));
    let tau0 = tau_bound(
        y0,
        &RunBounds::from_range(&spec.material, lo, hi, 400)?,
        c10,
    )?
    .tau;

    let mut run = spec.clone();
    run.solver.dt = spec.solver.dt.min(tau0 / STEPS_PER_TAU);
    run.solver.t_end = tau0;
    run.solver.record_every = 1;
    let traj = run.run_from(&init)?;
    let lo = traj
        .records
        .iter()
        .map(|r| r.theta_min)
        .fold(f64::INFINITY, f64::min);
    let hi = traj.records.iter().map(|r| r.theta_max).fold(0.0, f64::max);
    let bounds = RunBounds::from_range(&spec.material, lo, hi, 400)?;
    let tau = tau_bound(y0, &bounds, c10)?;

    let mut table = Table::new("hfunc", &["t", "y", "int_Theta_xx2"]);
    let mut y_max = y0;
    let mut flagged = false;
    for r in &traj.records {
        match r.hfunc {
            Some(y) => {
                if r.t < tau.tau {
                    y_max = y_max.max(y);
                }
                table.push(vec![r.t, y, r.theta_xx_accum]);
            }
            None => flagged = true,
        }
    }
    let theta_xx_integral = traj
        .records
        .iter()
        .find(|r| r.t >= tau.tau * (1.0 - 1e-12))
        .or(traj.records.last())
        .map_or(0.0, |r| r.theta_xx_accum);
    let checks = vec![
        Check::new(
            "functional stays below √2·y(0) before τ",
            !flagged && y_max <= tau.y_cap,
            format!(
                "max y = {y_max:.6}, cap {:.6}, τ = {}",
                tau.y_cap,
                fmt_e(tau.tau)
            ),
        ),
        Check::new(
            "∫₀^τ‖Θxx‖² within its cap",
            theta_xx_integral <= tau.dissipation_cap,
            format!(
                "{} ≤ {}",
                fmt_e(theta_xx_integral),
                fmt_e(tau.dissipation_cap)
            ),
        ),
    ];
    Ok(RegularityReport {
        y0,
        bounds,
        tau,
        dt: run.solver.dt,
        y_max,
        theta_xx_integral,
        checks,
        tables: vec![table],
    })
}
