//! Sign of the temperature along randomized smooth runs.

use super::{fmt_e, impl_report, Check, RunSpec, Table};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::init::InitialData;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PositivityReport {
    pub theta0_min: f64,
    /// `(seed, min Θ₀, min over all steps of Θ)` per run.
    pub runs: Vec<(u64, f64, f64)>,
    pub overall_min: f64,
    pub checks: Vec<Check>,
    pub tables: Vec<Table>,
}

impl_report!(PositivityReport, "positivity");

/// `count` runs of `spec` with [`InitialData::RandomFourier`] data, seeds
/// `seed..seed+count`, `min Θ₀ ≥ theta0_min`.
///
/// Checks: the minimum over all runs and steps is `≥ -tol`; when
/// `theta0_min > 0` it must also stay strictly positive.
pub fn positivity(
    spec: &RunSpec,
    count: usize,
    seed: u64,
    modes: usize,
    theta0_min: f64,
    tol: f64,
    exec: Exec,
) -> Result<PositivityReport> {
    let seeds: Vec<u64> = (0..count as u64).map(|k| seed + k).collect();
    let results = exec.map(seeds, |s| -> Result<(u64, f64, f64)> {
        let mut run = spec.clone();
        run.data = InitialData::RandomFourier {
            seed: s,
            modes,
            theta_min: theta0_min,
        };
        // a solver-side floor violation is reported as the observed minimum
        run.solver.positivity_tol = f64::INFINITY;
        let init = run.initial_state()?;
        let traj = run.run_from(&init)?;
        Ok((s, init.theta_min(), traj.theta_min()))
    });
    let runs = results.into_iter().collect::<Result<Vec<_>>>()?;
    if runs.is_empty() {
        return Err(Error::Contract(
            "positivity study needs at least one run".into(),
        ));
    }
    let overall_min = runs.iter().map(|r| r.2).fold(f64::INFINITY, f64::min);
    let mut table = Table::new("positivity", &["seed", "min_Theta0", "min_Theta"]);
    for r in &runs {
        table.push(vec![r.0 as f64, r.1, r.2]);
    }
    let mut checks = vec![Check::new(
        "temperature stays nonnegative",
        overall_min >= -tol,
        format!("min Θ = {} ≥ -{}", fmt_e(overall_min), fmt_e(tol)),
    )];
    if theta0_min > 0.0 {
        checks.push(Check::new(
            "temperature stays bounded away from zero",
            overall_min > 0.0,
            format!("min Θ = {} with min Θ₀ ≥ {theta0_min}", fmt_e(overall_min)),
        ));
    }
    Ok(PositivityReport {
        theta0_min,
        runs,
        overall_min,
        checks,
        tables: vec![table],
    })
}
