//! End-to-end verification studies.
//!
//! Each study runs one or more simulations, reduces them to a report with raw
//! tables and a list of named pass/fail [`Check`]s. Independent runs go through
//! [`Exec::map`](crate::Exec::map); the reduction is sequential, so a report
//! only depends on its inputs.

mod admissibility;
mod cauchy;
mod energy;
mod mms;
mod positivity;
mod regularity;
mod rough;
mod stability;
mod time_shift;
mod weak;

pub use admissibility::{gamma1_admissibility, AdmissibilityReport};
pub use cauchy::{eps_cauchy, EpsCauchyReport};
pub use energy::{energy_audit, EnergyAuditReport, EnergyLevel};
pub use mms::{mms, Manufactured, MmsConfig, MmsReport};
pub use positivity::{positivity, PositivityReport};
pub use regularity::{short_time_regularity, RegularityReport};
pub use rough::{rough_data, RoughDataReport, RoughLevel, RoughTolerances};
pub use stability::{stability, Perturbation, StabilityReport, StabilityRow};
pub use time_shift::{time_shift, TimeShiftReport, TimeShiftRow};
pub use weak::{weak_residual_ladder, WeakLadderReport};

use crate::error::{Error, Result};
use crate::grid::{GnConstants, Grid};
use crate::init::InitialData;
use crate::material::Material;
use crate::solver::{self, SolverConfig, State, Trajectory};
use serde::Serialize;

/// One named verdict.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

/// A raw numeric table, exported as CSV.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(name: impl Into<String>, columns: &[&str]) -> Self {
        Table {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

pub trait Report {
    fn name(&self) -> &'static str;
    fn checks(&self) -> &[Check];
    fn tables(&self) -> Vec<Table>;

    fn passed(&self) -> bool {
        self.checks().iter().all(|c| c.passed)
    }

    /// One line per check.
    fn summary(&self) -> String {
        self.checks()
            .iter()
            .map(|c| {
                format!(
                    "[{}] {}: {} ({})\n",
                    if c.passed { "PASS" } else { "FAIL" },
                    self.name(),
                    c.name,
                    c.detail
                )
            })
            .collect()
    }
}

macro_rules! impl_report {
    ($ty:ty, $name:literal) => {
        impl $crate::experiments::Report for $ty {
            fn name(&self) -> &'static str {
                $name
            }
            fn checks(&self) -> &[$crate::experiments::Check] {
                &self.checks
            }
            fn tables(&self) -> Vec<$crate::experiments::Table> {
                self.tables.clone()
            }
        }
    };
}
pub(crate) use impl_report;

/// Everything needed to reproduce one run.
#[derive(Debug, Clone)]
pub struct RunSpec {
    pub grid: Grid,
    pub material: Material,
    pub solver: SolverConfig,
    pub data: InitialData,
}

impl RunSpec {
    pub fn new(grid: Grid, material: Material, solver: SolverConfig, data: InitialData) -> Self {
        RunSpec {
            grid,
            material,
            solver,
            data,
        }
    }

    pub fn initial_state(&self) -> Result<State> {
        self.data.build(&self.grid)
    }

    pub fn run(&self) -> Result<Trajectory> {
        self.run_from(&self.initial_state()?)
    }

    pub fn run_from(&self, init: &State) -> Result<Trajectory> {
        solver::run(init, &self.material, &self.solver, &self.grid)
    }

    /// `space` times more cells, `time` times smaller steps. `record_every`
    /// is scaled by `time` so snapshots stay on the same instants.
    pub fn refined(&self, space: usize, time: usize) -> Result<RunSpec> {
        if space == 0 || time == 0 {
            return Err(Error::Contract(
                "refinement factors must be positive".into(),
            ));
        }
        let grid = Grid::new(self.grid.a(), self.grid.b(), self.grid.n_cells() * space)?;
        let mut solver = self.solver.clone();
        solver.dt /= time as f64;
        solver.record_every *= time;
        Ok(RunSpec {
            grid,
            material: self.material.clone(),
            solver,
            data: self.data,
        })
    }

    pub fn with_epsilon(&self, epsilon: f64) -> RunSpec {
        let mut s = self.clone();
        s.solver.epsilon = epsilon;
        s
    }
}

/// Least-squares slope of `ln y` against `ln x`; `NaN` if fewer than two
/// positive pairs.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter(|(a, b)| **a > 0.0 && **b > 0.0 && a.is_finite() && b.is_finite())
        .map(|(a, b)| (a.ln(), b.ln()))
        .collect();
    if pts.len() < 2 {
        return f64::NAN;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Sup-in-time `‖v‖`, `‖Θ‖₁` over the snapshots and `∫₀ᵀ‖Θ_x‖²` from the
/// record stream.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrajectoryBounds {
    pub sup_v_l2: f64,
    pub sup_theta_l1: f64,
    pub sup_v_plus_theta: f64,
    pub dissipation: f64,
}

pub fn trajectory_bounds(traj: &Trajectory) -> TrajectoryBounds {
    let g = &traj.grid;
    let mut b = TrajectoryBounds {
        sup_v_l2: 0.0,
        sup_theta_l1: 0.0,
        sup_v_plus_theta: 0.0,
        dissipation: traj.records.last().map_or(0.0, |r| r.dissipation_accum),
    };
    for s in &traj.states {
        let v = g.norm_sq(s.v.values()).sqrt();
        let abs: Vec<f64> = s.theta.values().iter().map(|t| t.abs()).collect();
        let th = g.integrate(&abs);
        b.sup_v_l2 = b.sup_v_l2.max(v);
        b.sup_theta_l1 = b.sup_theta_l1.max(th);
        b.sup_v_plus_theta = b.sup_v_plus_theta.max(v + th);
    }
    b
}

pub(crate) fn gn_for(grid: &Grid) -> Result<GnConstants> {
    crate::grid::gn_constants(grid)
}

pub(crate) fn fmt_e(x: f64) -> String {
    format!("{x:.3e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_power_law() {
        let x = [1.0, 0.5, 0.25, 0.125];
        let y: Vec<f64> = x.iter().map(|h: &f64| 3.0 * h.powf(1.7)).collect();
        assert!((loglog_slope(&x, &y) - 1.7).abs() < 1e-12);
        assert!(loglog_slope(&[1.0], &[1.0]).is_nan());
        assert!(loglog_slope(&[1.0, 2.0], &[0.0, 0.0]).is_nan());
    }

    #[test]
    fn refinement_scales_dt_and_recording() {
        let g = Grid::unit(16).unwrap();
        let spec = RunSpec::new(
            g,
            Material::identity(),
            SolverConfig::for_grid(&g, 0.0, 0.1).with_record_every(3),
            InitialData::SmoothReference,
        );
        let r = spec.refined(2, 4).unwrap();
        assert_eq!(r.grid.n_cells(), 32);
        assert_eq!(r.solver.dt, spec.solver.dt / 4.0);
        assert_eq!(r.solver.record_every, 12);
        assert!(spec.refined(0, 1).is_err());
    }
}
