//! Continuous dependence on the initial data.

use super::{fmt_e, impl_report, loglog_slope, trajectory_bounds, Check, RunSpec, Table};
use crate::bounds::{ln_gamma3, BaseConstants};
use crate::diagnostics::{difference_norms, state_difference_sq, DifferenceNorms};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::grid::{BcKind, Field};
use crate::solver::{State, Trajectory};
use serde::Serialize;
use std::f64::consts::PI;

/// Weights of the fixed perturbation shapes, scaled by `δ`:
/// `δ·velocity·sin(πs)` for `u₀ₜ`, `δ·strain·cos(πs)` for `u₀ₓ` and
/// `δ·theta·cos(πs)` for `Θ₀`, with `s = (x - a)/|Ω|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Perturbation {
    pub velocity: f64,
    pub strain: f64,
    pub theta: f64,
}

impl Perturbation {
    pub fn theta_only() -> Self {
        Perturbation {
            velocity: 0.0,
            strain: 0.0,
            theta: 1.0,
        }
    }

    pub fn apply(&self, base: &State, delta: f64, spec: &RunSpec) -> Result<State> {
        let g = &spec.grid;
        let (a, w) = (g.a(), g.width());
        let s = |x: f64| PI * (x - a) / w;
        let add = |f: &Field, bc: BcKind, p: &dyn Fn(f64) -> f64| -> Result<Field> {
            let mut vals: Vec<f64> = f
                .values()
                .iter()
                .enumerate()
                .map(|(i, y)| y + delta * p(g.x(i)))
                .collect();
            // sin(π) is not exactly zero
            if bc != BcKind::NeumannZero {
                let n = vals.len() - 1;
                vals[0] = 0.0;
                vals[n] = 0.0;
            }
            Field::new(vals, bc)
        };
        let v = add(&base.v, BcKind::Hinged, &|x| self.velocity * s(x).sin())?;
        let u = add(&base.u, BcKind::DirichletZero, &|x| {
            self.strain * w / PI * s(x).sin()
        })?;
        let th = add(&base.theta, BcKind::NeumannZero, &|x| {
            self.theta * s(x).cos()
        })?;
        if th.values().iter().any(|t| *t < 0.0) {
            return Err(Error::Contract(format!(
                "perturbation δ = {delta} makes the initial temperature negative"
            )));
        }
        State::new(0.0, v, u, th)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StabilityRow {
    pub delta: f64,
    /// Sum of the squared initial differences.
    pub input: f64,
    pub output: DifferenceNorms,
    /// Bound constant instantiated from both trajectories.
    pub k: f64,
    pub ln_gamma3: f64,
    /// `ln(output) - ln(Γ₃·input)`; `-∞` for identical runs.
    pub log_margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityReport {
    pub rows: Vec<StabilityRow>,
    /// Slope of `ln output` against `ln input` over the positive rows.
    pub exponent: f64,
    pub checks: Vec<Check>,
    pub tables: Vec<Table>,
}

impl_report!(StabilityReport, "stability");

/// `K` covering the hypotheses of the difference estimate for the pair,
/// in both orderings: `sup‖v̂‖ + sup‖Θ‖₁` and `∫₀ᵀ‖Θ_x‖²`.
fn pair_constant(a: &Trajectory, b: &Trajectory) -> f64 {
    let (ba, bb) = (trajectory_bounds(a), trajectory_bounds(b));
    (bb.sup_v_l2 + ba.sup_theta_l1)
        .max(ba.sup_v_l2 + bb.sup_theta_l1)
        .max(ba.dissipation)
        .max(bb.dissipation)
}

/// Run the base data and its `δ`-perturbations for every `δ` in `deltas`.
///
/// Checks: scaling exponent in `exponent_range` when at least two `δ > 0`
/// and, for every `δ`, `output ≤ Γ₃(K,T)·input` (in logarithms).
pub fn stability(
    spec: &RunSpec,
    pert: Perturbation,
    deltas: &[f64],
    exponent_range: (f64, f64),
    exec: Exec,
) -> Result<StabilityReport> {
    let base_init = spec.initial_state()?;
    let inits = deltas
        .iter()
        .map(|&d| pert.apply(&base_init, d, spec).map(|s| (d, s)))
        .collect::<Result<Vec<_>>>()?;
    let mut jobs: Vec<Option<(f64, State)>> = vec![None];
    jobs.extend(inits.into_iter().map(Some));
    let runs = exec.map(jobs, |job| -> Result<Trajectory> {
        match job {
            None => spec.run_from(&base_init),
            Some((_, s)) => spec.run_from(&s),
        }
    });
    let mut runs = runs.into_iter();
    let base = runs.next().expect("base run")?;
    let consts = BaseConstants::for_interval(spec.grid.a(), spec.grid.b(), &spec.material)?;
    let t_end = spec.solver.t_end;

    let mut rows = Vec::with_capacity(deltas.len());
    let mut table = Table::new(
        "stability",
        &[
            "delta",
            "input",
            "sup_v",
            "sup_ux",
            "sup_theta",
            "thetax_l2l2",
            "output",
            "K",
            "ln_Gamma3",
            "log_margin",
        ],
    );
    for (&delta, traj) in deltas.iter().zip(runs) {
        let traj = traj?;
        let input: f64 = state_difference_sq(&traj.states[0], &base.states[0], &spec.grid)
            .iter()
            .sum();
        let output = difference_norms(&base, &traj)?;
        let k = pair_constant(&base, &traj);
        let lg3 = ln_gamma3(k, t_end, &consts)?;
        let log_margin = if output.total() == 0.0 {
            f64::NEG_INFINITY
        } else {
            output.total().ln() - lg3 - input.ln()
        };
        table.push(vec![
            delta,
            input,
            output.sup_v_l2,
            output.sup_ux_l2,
            output.sup_theta_l2,
            output.thetax_l2l2,
            output.total(),
            k,
            lg3,
            log_margin,
        ]);
        rows.push(StabilityRow {
            delta,
            input,
            output,
            k,
            ln_gamma3: lg3,
            log_margin,
        });
    }
    let inputs: Vec<f64> = rows.iter().map(|r| r.input).collect();
    let outputs: Vec<f64> = rows.iter().map(|r| r.output.total()).collect();
    let exponent = loglog_slope(&inputs, &outputs);

    let mut checks = Vec::new();
    let positive = rows
        .iter()
        .filter(|r| r.input > 0.0 && r.output.total() > 0.0)
        .count();
    if positive >= 2 {
        checks.push(Check::new(
            "output/input scaling exponent",
            exponent >= exponent_range.0 && exponent <= exponent_range.1,
            format!(
                "{exponent:.4} in [{}, {}]",
                exponent_range.0, exponent_range.1
            ),
        ));
    }
    for r in &rows {
        checks.push(Check::new(
            format!("difference bound at δ = {}", fmt_e(r.delta)),
            r.log_margin <= 0.0,
            format!(
                "ln(LHS/RHS) = {:.4}, ln Γ₃ = {:.4e}, K = {:.4}",
                r.log_margin + r.ln_gamma3,
                r.ln_gamma3,
                r.k
            ),
        ));
    }
    Ok(StabilityReport {
        rows,
        exponent,
        checks,
        tables: vec![table],
    })
}
