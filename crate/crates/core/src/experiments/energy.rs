//! Energy audit of the limit solver under joint `(h, dt)` refinement.

use super::{fmt_e, impl_report, loglog_slope, Check, RunSpec, Table};
use crate::diagnostics::energy_identity_residual;
use crate::error::{Error, Result};
use crate::exec::Exec;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyLevel {
    pub n_cells: usize,
    pub dt: f64,
    pub e0: f64,
    /// `max_t |E(t) - E(0)| / E(0)` (absolute when `E(0) = 0`).
    pub max_rel: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyAuditReport {
    pub levels: Vec<EnergyLevel>,
    /// `max_rel[k] / max_rel[k+1]`.
    pub ratios: Vec<f64>,
    /// Observed order of the drift in `h`.
    pub slope: f64,
    pub checks: Vec<Check>,
    pub tables: Vec<Table>,
}

impl_report!(EnergyAuditReport, "energy-audit");

/// Drift below this multiple of `f64::EPSILON` counts as exact conservation.
const ROUNDOFF: f64 = 1e3 * f64::EPSILON;

/// Run `spec` at `(N, dt)`, `(2N, dt/2)`, ... for `levels` levels.
///
/// Checks: drift at the base level `≤ tol`, and each refinement reduces the
/// drift by at least `min_ratio` (or both levels are at round-off).
pub fn energy_audit(
    spec: &RunSpec,
    levels: usize,
    tol: f64,
    min_ratio: f64,
    exec: Exec,
) -> Result<EnergyAuditReport> {
    if spec.solver.epsilon != 0.0 {
        return Err(Error::Contract(format!(
            "energy audit drives the limit solver, got epsilon = {}",
            spec.solver.epsilon
        )));
    }
    if levels == 0 {
        return Err(Error::Contract(
            "energy audit needs at least one level".into(),
        ));
    }
    let specs = (0..levels)
        .map(|k| spec.refined(1 << k, 1 << k))
        .collect::<Result<Vec<_>>>()?;
    let results = exec.map(specs, |s| -> Result<(EnergyLevel, Vec<(f64, f64)>)> {
        let traj = s.run()?;
        let res = energy_identity_residual(&traj);
        let e0 = traj.records[0].energy;
        let scale = if e0 > 0.0 { e0 } else { 1.0 };
        let series: Vec<(f64, f64)> = res
            .t
            .iter()
            .zip(&res.r)
            .map(|(t, r)| (*t, r / scale))
            .collect();
        Ok((
            EnergyLevel {
                n_cells: s.grid.n_cells(),
                dt: s.solver.dt,
                e0,
                max_rel: res.max_abs() / scale,
            },
            series,
        ))
    });
    let mut levels_out = Vec::with_capacity(levels);
    let mut tables = vec![Table::new(
        "levels",
        &["n_cells", "dt", "E0", "max_rel_drift"],
    )];
    for (k, r) in results.into_iter().enumerate() {
        let (lvl, series) = r?;
        tables[0].push(vec![lvl.n_cells as f64, lvl.dt, lvl.e0, lvl.max_rel]);
        let mut t = Table::new(format!("drift_n{}", lvl.n_cells), &["t", "rel_drift"]);
        for (a, b) in series {
            t.push(vec![a, b]);
        }
        if k == 0 || k + 1 == levels {
            tables.push(t);
        }
        levels_out.push(lvl);
    }
    let ratios: Vec<f64> = levels_out
        .windows(2)
        .map(|w| w[0].max_rel / w[1].max_rel)
        .collect();
    let h: Vec<f64> = levels_out.iter().map(|l| 1.0 / l.n_cells as f64).collect();
    let drift: Vec<f64> = levels_out.iter().map(|l| l.max_rel).collect();
    let slope = loglog_slope(&h, &drift);

    let base = levels_out[0];
    let mut checks = vec![Check::new(
        "relative energy drift at base resolution",
        base.max_rel <= tol,
        format!("{} ≤ {}", fmt_e(base.max_rel), fmt_e(tol)),
    )];
    for (k, w) in levels_out.windows(2).enumerate() {
        let exact = w[0].max_rel <= ROUNDOFF && w[1].max_rel <= ROUNDOFF;
        let r = ratios[k];
        checks.push(Check::new(
            format!("drift reduction N={} → N={}", w[0].n_cells, w[1].n_cells),
            exact || r >= min_ratio,
            if exact {
                "conserved to round-off".to_string()
            } else {
                format!("ratio {r:.3} ≥ {min_ratio}")
            },
        ));
    }
    Ok(EnergyAuditReport {
        levels: levels_out,
        ratios,
        slope,
        checks,
        tables,
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
    fn equilibrium_audit_is_exact() {
        let g = Grid::unit(16).unwrap();
        let spec = RunSpec::new(
            g,
            Material::identity(),
            SolverConfig::for_grid(&g, 0.0, 0.25),
            InitialData::Equilibrium { theta: 1.0 },
        );
        let r = energy_audit(&spec, 2, 1e-3, 1.8, Exec::Sequential).unwrap();
        assert!(r.passed(), "{}", r.summary());
        assert!(r.levels.iter().all(|l| l.max_rel <= ROUNDOFF));
    }

    #[test]
    fn regularized_config_is_rejected() {
        let g = Grid::unit(16).unwrap();
        let spec = RunSpec::new(
            g,
            Material::identity(),
            SolverConfig::for_grid(&g, 0.1, 0.25),
            InitialData::Zero,
        );
        assert!(matches!(
            energy_audit(&spec, 2, 1e-3, 1.8, Exec::Sequential),
            Err(Error::Contract(_))
        ));
    }
}
