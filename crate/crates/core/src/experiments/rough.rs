//! Refinement study for nonsmooth initial data with the limit solver.

use super::{fmt_e, impl_report, Check, RunSpec, Table};
use crate::diagnostics::{difference_norms, energy_identity_residual, restrict_trajectory};
use crate::error::{Error, Result};
use crate::exec::Exec;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RoughLevel {
    pub n_cells: usize,
    pub dt: f64,
    /// `max_t |E(t) - E(0)| / E(0)`.
    pub energy_rel: f64,
    /// `∫₀ᵀ‖Θ_x‖²`.
    pub dissipation: f64,
    pub theta_min: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoughDataReport {
    pub levels: Vec<RoughLevel>,
    /// `(n_a, n_b, distance)` after restriction to the coarsest grid and
    /// common snapshot times, distance `sqrt(sup_sum + ∫∫|ΔΘ_x|²)`.
    pub distances: Vec<(usize, usize, f64)>,
    pub checks: Vec<Check>,
    pub tables: Vec<Table>,
}

impl_report!(RoughDataReport, "rough-data");

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RoughTolerances {
    pub energy_rel: f64,
    pub dissipation_rel: f64,
}

impl Default for RoughTolerances {
    fn default() -> Self {
        RoughTolerances {
            energy_rel: 1e-2,
            dissipation_rel: 0.1,
        }
    }
}

/// Run `spec` (with `ε = 0`) at `N·2^k`, `dt/2^k` for `k < levels`.
///
/// Checks: energy drift within tolerance at every level except the coarsest,
/// change of `∫₀ᵀ‖Θ_x‖²` between the two finest levels, and decreasing
/// distances between consecutive levels.
pub fn rough_data(
    spec: &RunSpec,
    levels: usize,
    tol: RoughTolerances,
    exec: Exec,
) -> Result<RoughDataReport> {
    if spec.solver.epsilon != 0.0 {
        return Err(Error::Contract(format!(
            "rough-data study drives the limit solver, got epsilon = {}",
            spec.solver.epsilon
        )));
    }
    if levels < 2 {
        return Err(Error::Contract(
            "rough-data study needs at least two levels".into(),
        ));
    }
    let specs = (0..levels)
        .map(|k| spec.refined(1 << k, 1 << k))
        .collect::<Result<Vec<_>>>()?;
    let runs = exec.map(specs, |s| s.run());
    let runs = runs.into_iter().collect::<Result<Vec<_>>>()?;

    let mut levels_out = Vec::with_capacity(levels);
    let mut table = Table::new(
        "levels",
        &["n_cells", "dt", "energy_rel", "int_Theta_x2", "min_Theta"],
    );
    for traj in &runs {
        let e0 = traj.records[0].energy;
        let scale = if e0 > 0.0 { e0 } else { 1.0 };
        let lvl = RoughLevel {
            n_cells: traj.grid.n_cells(),
            dt: traj.records.get(1).map_or(0.0, |r| r.t),
            energy_rel: energy_identity_residual(traj).max_abs() / scale,
            dissipation: traj.records.last().map_or(0.0, |r| r.dissipation_accum),
            theta_min: traj.theta_min(),
        };
        table.push(vec![
            lvl.n_cells as f64,
            lvl.dt,
            lvl.energy_rel,
            lvl.dissipation,
            lvl.theta_min,
        ]);
        levels_out.push(lvl);
    }

    let restricted = runs
        .iter()
        .enumerate()
        .map(|(k, t)| restrict_trajectory(t, 1 << k, 1))
        .collect::<Result<Vec<_>>>()?;
    let mut distances = Vec::new();
    let mut dtable = Table::new("distances", &["n_a", "n_b", "distance"]);
    for i in 0..levels {
        for j in i + 1..levels {
            let d = difference_norms(&restricted[i], &restricted[j])?
                .total()
                .sqrt();
            let (na, nb) = (levels_out[i].n_cells, levels_out[j].n_cells);
            dtable.push(vec![na as f64, nb as f64, d]);
            distances.push((na, nb, d));
        }
    }

    let mut checks = Vec::new();
    for l in &levels_out[1..] {
        checks.push(Check::new(
            format!("energy identity at N = {}", l.n_cells),
            l.energy_rel <= tol.energy_rel,
            format!("{} ≤ {}", fmt_e(l.energy_rel), tol.energy_rel),
        ));
    }
    let (p, q) = (levels_out[levels - 2], levels_out[levels - 1]);
    let change = if q.dissipation == 0.0 && p.dissipation == 0.0 {
        0.0
    } else {
        (q.dissipation - p.dissipation).abs() / q.dissipation.abs().max(p.dissipation.abs())
    };
    checks.push(Check::new(
        format!("∫∫Θx² change N = {} → {}", p.n_cells, q.n_cells),
        change <= tol.dissipation_rel,
        format!("{change:.4} ≤ {}", tol.dissipation_rel),
    ));
    let consecutive: Vec<f64> = (1..levels)
        .map(|k| {
            distances
                .iter()
                .find(|d| d.0 == levels_out[k - 1].n_cells && d.1 == levels_out[k].n_cells)
                .map_or(f64::NAN, |d| d.2)
        })
        .collect();
    if consecutive.len() >= 2 {
        let ok = consecutive
            .windows(2)
            .all(|w| w[1] < w[0] || (w[0] == 0.0 && w[1] == 0.0));
        checks.push(Check::new(
            "refinement distances decrease",
            ok,
            consecutive
                .iter()
                .map(|d| fmt_e(*d))
                .collect::<Vec<_>>()
                .join(" > "),
        ));
    }
    Ok(RoughDataReport {
        levels: levels_out,
        distances,
        checks,
        tables: vec![table, dtable],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use crate::init::{InitialData, RoughKind, RoughParams};
    use crate::material::Material;
    use crate::solver::SolverConfig;

    #[test]
    fn cold_rough_strain_stays_cold() {
        let g = Grid::unit(16).unwrap();
        let data = InitialData::Rough(RoughParams::new(RoughKind::StepStrain {
            jump_at: 0.5,
            left_slope: 1.0,
        }));
        let spec = RunSpec::new(
            g,
            Material::identity(),
            SolverConfig::for_grid(&g, 0.0, 0.2),
            data,
        );
        let r = rough_data(&spec, 2, RoughTolerances::default(), Exec::Sequential).unwrap();
        assert!(r
            .levels
            .iter()
            .all(|l| l.dissipation == 0.0 && l.theta_min == 0.0));
        let traj = spec.run().unwrap();
        assert!(traj
            .states
            .iter()
            .all(|s| s.theta.values().iter().all(|t| *t == 0.0)));
    }
}
