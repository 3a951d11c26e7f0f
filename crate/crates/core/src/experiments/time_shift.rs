//! Time-shift estimate for the regularized system.

use super::{fmt_e, gn_for, impl_report, trajectory_bounds, Check, RunSpec, Table};
use crate::bounds::{ln_time_shift_constant, BaseConstants};
use crate::diagnostics::state_difference_sq;
use crate::error::{Error, Result};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimeShiftRow {
    pub shift: f64,
    /// `Σ` of the squared differences between the states at `h` and `0`.
    pub rhs: f64,
    /// `max_t LHS(t, h) / RHS(h)`; zero when both sides vanish.
    pub max_ratio: f64,
    /// Time of the maximum.
    pub t_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimeShiftReport {
    pub horizon: f64,
    pub rows: Vec<TimeShiftRow>,
    /// Run bound entering the constant: `max(sup(‖v‖ + ‖Θ‖₁), ∫∫Θ_x²)`.
    pub c1: f64,
    /// `ln C(T)`.
    pub ln_c: f64,
    pub checks: Vec<Check>,
    pub tables: Vec<Table>,
}

impl_report!(TimeShiftReport, "time-shift");

/// Compare `Σ‖w(t+h) - w(t)‖²` with `Σ‖w(h) - w(0)‖²`, `w = (v, u_x, Θ)`, for
/// `t ∈ [0, T]`, `T = spec.solver.t_end`. The run extends to `T + max h`.
/// Every shift must be a positive multiple of `dt`.
pub fn time_shift(spec: &RunSpec, shifts: &[f64]) -> Result<TimeShiftReport> {
    if !(spec.solver.epsilon > 0.0) {
        return Err(Error::Contract(format!(
            "the time-shift estimate concerns the regularized system, got epsilon = {}",
            spec.solver.epsilon
        )));
    }
    let dt = spec.solver.dt;
    let steps = shifts
        .iter()
        .map(|&h| {
            let k = (h / dt).round();
            if !(h > 0.0) || k < 1.0 || (k * dt - h).abs() > 1e-9 * h {
                Err(Error::Contract(format!(
                    "shift {h} is not a positive multiple of dt = {dt}"
                )))
            } else {
                Ok(k as usize)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let horizon = spec.solver.t_end;
    let max_k = steps.iter().copied().max().unwrap_or(0);
    let mut run_spec = spec.clone();
    run_spec.solver.record_every = 1;
    run_spec.solver.t_end = horizon + max_k as f64 * dt;
    let traj = run_spec.run()?;
    let states = &traj.states;
    let g = &spec.grid;

    let mut rows = Vec::with_capacity(shifts.len());
    let mut table = Table::new("time_shift", &["h", "t", "lhs", "rhs", "ratio"]);
    for (&h, &k) in shifts.iter().zip(&steps) {
        let rhs: f64 = state_difference_sq(&states[k], &states[0], g).iter().sum();
        let mut row = TimeShiftRow {
            shift: h,
            rhs,
            max_ratio: 0.0,
            t_max: 0.0,
        };
        for j in 0..states.len() - k {
            if states[j].t > horizon * (1.0 + 1e-12) {
                break;
            }
            let lhs: f64 = state_difference_sq(&states[j + k], &states[j], g)
                .iter()
                .sum();
            let ratio = if lhs == 0.0 {
                0.0
            } else if rhs == 0.0 {
                f64::INFINITY
            } else {
                lhs / rhs
            };
            if ratio > row.max_ratio {
                row.max_ratio = ratio;
                row.t_max = states[j].t;
            }
            table.push(vec![h, states[j].t, lhs, rhs, ratio]);
        }
        rows.push(row);
    }

    let b = trajectory_bounds(&traj);
    let c1 = b.sup_v_plus_theta.max(b.dissipation);
    let base = BaseConstants::new(gn_for(g)?, &spec.material, g.width());
    let ln_c = ln_time_shift_constant(c1, horizon, &base)?;

    let mut checks = vec![Check::new(
        "time-shift constant is finite",
        ln_c.is_finite(),
        format!("ln C = {ln_c:.6e}, c1 = {c1:.6}"),
    )];
    for r in &rows {
        let vacuous = r.rhs == 0.0 && r.max_ratio == 0.0;
        checks.push(Check::new(
            format!("shift h = {}", r.shift),
            vacuous || (r.max_ratio.is_finite() && r.max_ratio.ln() <= ln_c),
            if vacuous {
                "both sides vanish".to_string()
            } else {
                format!("max ratio {} at t = {:.4}", fmt_e(r.max_ratio), r.t_max)
            },
        ));
    }
    Ok(TimeShiftReport {
        horizon,
        rows,
        c1,
        ln_c,
        checks,
        tables: vec![table],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::Report;
    use crate::grid::Grid;
    use crate::init::InitialData;
    use crate::material::Material;
    use crate::solver::SolverConfig;

    #[test]
    fn equilibrium_passes_at_roundoff() {
        let g = Grid::unit(16).unwrap();
        let spec = RunSpec::new(
            g,
            Material::identity(),
            SolverConfig::for_grid(&g, 1e-2, 0.2).with_dt(0.01),
            InitialData::Equilibrium { theta: 1.0 },
        );
        let r = time_shift(&spec, &[0.01, 0.05]).unwrap();
        assert!(r.passed(), "{}", r.summary());
        // the state only moves at roundoff level
        assert!(r.rows.iter().all(|row| row.rhs < 1e-24), "{:?}", r.rows);
    }

    #[test]
    fn shifts_must_align_with_the_step() {
        let g = Grid::unit(16).unwrap();
        let spec = RunSpec::new(
            g,
            Material::identity(),
            SolverConfig::for_grid(&g, 1e-2, 0.2).with_dt(0.01),
            InitialData::SmoothReference,
        );
        assert!(time_shift(&spec, &[0.015]).is_err());
        assert!(time_shift(&spec.with_epsilon(0.0), &[0.01]).is_err());
    }
}
