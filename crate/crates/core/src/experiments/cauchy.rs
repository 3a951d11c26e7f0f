//! Behaviour of the regularized runs as `ε → 0`.

use super::{fmt_e, impl_report, Check, RunSpec, Table};
use crate::diagnostics::difference_norms;
use crate::error::{Error, Result};
use crate::exec::Exec;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpsCauchyReport {
    pub ladder: Vec<f64>,
    /// `sqrt(sup_t(‖Δv‖² + ‖Δu_x‖² + ‖ΔΘ‖²))` between consecutive ladder runs.
    pub distances: Vec<f64>,
    /// Same distance between the smallest `ε` and the limit solver.
    pub limit_distance: Option<f64>,
    pub checks: Vec<Check>,
    pub tables: Vec<Table>,
}

impl_report!(EpsCauchyReport, "eps-cauchy");

/// Consecutive distances may grow by this factor and still count as decreasing.
pub const MONOTONE_SLACK: f64 = 1.1;

/// Run `spec` at every `ε` of a strictly decreasing ladder and once with the
/// limit solver. `spec.solver.epsilon` is ignored.
///
/// Checks (with at least two distances): consecutive distances decrease within
/// [`MONOTONE_SLACK`], the last one is at most `final_fraction` of the first,
/// and the distance to the limit run is at most twice the last distance.
pub fn eps_cauchy(
    spec: &RunSpec,
    ladder: &[f64],
    final_fraction: f64,
    exec: Exec,
) -> Result<EpsCauchyReport> {
    if ladder.iter().any(|e| !(*e > 0.0)) || ladder.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Contract(format!(
            "epsilon ladder must be positive and strictly decreasing, got {ladder:?}"
        )));
    }
    let mut eps: Vec<f64> = ladder.to_vec();
    if !ladder.is_empty() {
        eps.push(0.0);
    }
    let runs = exec.map(eps.clone(), |e| spec.with_epsilon(e).run());
    let runs = runs.into_iter().collect::<Result<Vec<_>>>()?;
    let dist = |i: usize, j: usize| -> Result<f64> {
        Ok(difference_norms(&runs[i], &runs[j])?.sup_sum.sqrt())
    };
    let m = ladder.len();
    let distances = (1..m).map(|k| dist(k - 1, k)).collect::<Result<Vec<_>>>()?;
    let limit_distance = if m > 0 { Some(dist(m - 1, m)?) } else { None };

    let mut table = Table::new("eps_cauchy", &["eps_coarse", "eps_fine", "distance"]);
    for (k, d) in distances.iter().enumerate() {
        table.push(vec![ladder[k], ladder[k + 1], *d]);
    }
    if let Some(d) = limit_distance {
        table.push(vec![ladder[m - 1], 0.0, d]);
    }

    let mut checks = Vec::new();
    if distances.len() >= 2 {
        let worst = distances
            .windows(2)
            .map(|w| w[1] / w[0])
            .fold(0.0f64, f64::max);
        checks.push(Check::new(
            "consecutive distances decrease",
            worst <= MONOTONE_SLACK,
            format!("max ratio {worst:.4} ≤ {MONOTONE_SLACK}"),
        ));
        let (first, last) = (distances[0], distances[distances.len() - 1]);
        checks.push(Check::new(
            "final pair distance against first",
            last <= final_fraction * first,
            format!("{} ≤ {final_fraction}·{}", fmt_e(last), fmt_e(first)),
        ));
        let ld = limit_distance.expect("ladder is nonempty");
        checks.push(Check::new(
            "distance to the limit run",
            ld <= 2.0 * last,
            format!("{} ≤ 2·{}", fmt_e(ld), fmt_e(last)),
        ));
    }
    Ok(EpsCauchyReport {
        ladder: ladder.to_vec(),
        distances,
        limit_distance,
        checks,
        tables: vec![table],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use crate::init::InitialData;
    use crate::material::Material;
    use crate::solver::SolverConfig;

    fn spec() -> RunSpec {
        let g = Grid::unit(16).unwrap();
        RunSpec::new(
            g,
            Material::identity(),
            SolverConfig::for_grid(&g, 0.0, 0.1),
            InitialData::SmoothReference,
        )
    }

    #[test]
    fn single_rung_has_no_pair_distances() {
        let r = eps_cauchy(&spec(), &[0.1], 0.25, Exec::Sequential).unwrap();
        assert!(r.distances.is_empty());
        assert!(r.limit_distance.is_some());
        assert!(r.checks.is_empty());
    }

    #[test]
    fn ladder_must_decrease() {
        assert!(eps_cauchy(&spec(), &[0.1, 0.1], 0.25, Exec::Sequential).is_err());
        assert!(eps_cauchy(&spec(), &[0.1, -0.1], 0.25, Exec::Sequential).is_err());
    }
}
