//! Weak-form residuals of the limit solver under joint `(h, dt)` refinement.

use super::{fmt_e, impl_report, loglog_slope, Check, RunSpec, Table};
use crate::diagnostics::{test_bank, weak_form_residual};
use crate::error::{Error, Result};
use crate::exec::Exec;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeakLadderReport {
    /// `[h, max |wu|, max |wt|]` per level.
    pub rows: Vec<[f64; 3]>,
    pub order_wu: f64,
    pub order_wt: f64,
    pub checks: Vec<Check>,
    pub tables: Vec<Table>,
}

impl_report!(WeakLadderReport, "weak-residuals");

/// Residuals of both identities against a fixed bank of `bank_size` test
/// functions at `(N·2^k, dt/2^k)`. Checks observed order `≥ min_order`.
pub fn weak_residual_ladder(
    spec: &RunSpec,
    levels: usize,
    bank_size: usize,
    seed: u64,
    min_order: f64,
    exec: Exec,
) -> Result<WeakLadderReport> {
    if spec.solver.epsilon != 0.0 {
        return Err(Error::Contract(format!(
            "weak residuals are evaluated for the limit solver, got epsilon = {}",
            spec.solver.epsilon
        )));
    }
    if levels < 2 {
        return Err(Error::Contract(
            "weak residual ladder needs at least two levels".into(),
        ));
    }
    let bank = test_bank(&spec.grid, spec.solver.t_end, bank_size, seed);
    let specs = (0..levels)
        .map(|k| spec.refined(1 << k, 1 << k))
        .collect::<Result<Vec<_>>>()?;
    let rows = exec.map(specs, |s| -> Result<[f64; 3]> {
        let mut s = s;
        s.solver.record_every = 1;
        let traj = s.run()?;
        let r = weak_form_residual(&traj, &s.material, &bank)?;
        Ok([s.grid.h(), r.max_wu(), r.max_wt()])
    });
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let h: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    let wu: Vec<f64> = rows.iter().map(|r| r[1]).collect();
    let wt: Vec<f64> = rows.iter().map(|r| r[2]).collect();
    let (order_wu, order_wt) = (loglog_slope(&h, &wu), loglog_slope(&h, &wt));
    let mut table = Table::new("weak_residuals", &["h", "max_wu", "max_wt"]);
    for r in &rows {
        table.push(r.to_vec());
    }
    let line = |v: &[f64]| v.iter().map(|x| fmt_e(*x)).collect::<Vec<_>>().join(", ");
    let checks = vec![
        Check::new(
            "momentum identity residual order",
            order_wu >= min_order,
            format!("{order_wu:.3} ≥ {min_order} ({})", line(&wu)),
        ),
        Check::new(
            "heat identity residual order",
            order_wt >= min_order,
            format!("{order_wt:.3} ≥ {min_order} ({})", line(&wt)),
        ),
    ];
    Ok(WeakLadderReport {
        rows,
        order_wu,
        order_wt,
        checks,
        tables: vec![table],
    })
}
