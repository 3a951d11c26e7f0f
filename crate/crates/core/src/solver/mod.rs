//! Time integrators for the regularized (`ε > 0`) and limit (`ε = 0`) systems.
//!
//! Unknowns are `v ≈ u_t` (hinged), `u` (clamped) and `Θ` (insulated). The
//! regularized system reads
//!
//! ```text
//! v_t = -ε v_xxxx + u_xx - (f(Θ))_x
//! u_t =  ε u_xx + v
//! Θ_t =  Θ_xx - f(Θ) v_x
//! ```
//!
//! and reduces to the limit system for `ε = 0`, where `u_t = v`.

mod eps;
mod limit;
mod ops;

pub use eps::{run_eps, step_eps};
pub use limit::{run_limit, shadow_energy, step_limit};

use crate::diagnostics::{self, DiagnosticsRecord};
use crate::error::{Error, Result};
use crate::grid::{BcKind, Field, Grid};
use crate::material::Material;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Time-stamped triple `(v, u, Θ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub t: f64,
    pub v: Field,
    pub u: Field,
    pub theta: Field,
}

impl State {
    pub fn new(t: f64, v: Field, u: Field, theta: Field) -> Result<Self> {
        let expect = [
            ("v", &v, BcKind::Hinged),
            ("u", &u, BcKind::DirichletZero),
            ("theta", &theta, BcKind::NeumannZero),
        ];
        for (name, field, bc) in expect {
            if field.bc() != bc {
                return Err(Error::Contract(format!(
                    "{name} must carry {bc:?} boundary conditions, got {:?}",
                    field.bc()
                )));
            }
        }
        if v.len() != u.len() || u.len() != theta.len() {
            return Err(Error::Structural(format!(
                "state fields have lengths {}, {}, {}",
                v.len(),
                u.len(),
                theta.len()
            )));
        }
        Ok(State { t, v, u, theta })
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    pub fn theta_min(&self) -> f64 {
        self.theta
            .values()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    pub(crate) fn check_grid(&self, grid: &Grid) -> Result<()> {
        if self.len() != grid.len() {
            return Err(Error::Structural(format!(
                "state has {} nodes, grid has {}",
                self.len(),
                grid.len()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// First order: implicit stiff parts, symplectic-Euler ordering of the coupling.
    Imex1,
    /// Second order: Strang splitting of Crank–Nicolson stiff half steps around
    /// a Verlet coupling step.
    Imex2,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Imex1 => "imex1",
            Scheme::Imex2 => "imex2",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "imex1" => Some(Scheme::Imex1),
            "imex2" => Some(Scheme::Imex2),
            _ => None,
        }
    }

    /// Formal order in time.
    pub fn order(self) -> f64 {
        match self {
            Scheme::Imex1 => 1.0,
            Scheme::Imex2 => 2.0,
        }
    }
}

/// Treatment of `f(Θ)` in the coupling term of the limit solver's heat step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThetaCoupling {
    /// `½(f(Θⁿ) + f(Θⁿ⁺¹))`, solved by Newton. The discrete exchange between
    /// kinetic and thermal energy then cancels to round-off.
    Trapezoidal,
    /// `f(Θⁿ)`; linear heat step, first-order energy drift.
    Lagged,
}

impl ThetaCoupling {
    pub fn name(self) -> &'static str {
        match self {
            ThetaCoupling::Trapezoidal => "trapezoidal",
            ThetaCoupling::Lagged => "lagged",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "trapezoidal" => Some(ThetaCoupling::Trapezoidal),
            "lagged" => Some(ThetaCoupling::Lagged),
            _ => None,
        }
    }
}

/// Manufactured source terms `(s_v, s_u, s_Θ)` as functions of `(t, x)`,
/// added to the right-hand sides of the `v`, `u` and `Θ` equations.
pub type SourceFn = Arc<dyn Fn(f64, f64) -> [f64; 3] + Send + Sync>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub epsilon: f64,
    pub dt: f64,
    pub t_end: f64,
    pub scheme: Scheme,
    pub coupling: ThetaCoupling,
    pub cfl_safety: f64,
    pub positivity_tol: f64,
    pub newton_tol: f64,
    pub newton_max_iters: usize,
    /// Keep a snapshot every `record_every` steps (the final state is always kept).
    pub record_every: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            epsilon: 0.0,
            dt: 1e-3,
            t_end: 1.0,
            scheme: Scheme::Imex1,
            coupling: ThetaCoupling::Trapezoidal,
            cfl_safety: 0.5,
            positivity_tol: 1e-12,
            newton_tol: 1e-10,
            newton_max_iters: 25,
            record_every: 1,
        }
    }
}

impl SolverConfig {
    /// Config with `dt = cfl_safety · h`.
    pub fn for_grid(grid: &Grid, epsilon: f64, t_end: f64) -> Self {
        let base = SolverConfig::default();
        SolverConfig {
            epsilon,
            t_end,
            dt: base.cfl_safety * grid.h(),
            ..base
        }
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = dt;
        self
    }

    pub fn with_scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn with_record_every(mut self, every: usize) -> Self {
        self.record_every = every;
        self
    }

    /// Every violated constraint, as field-path messages.
    pub fn problems(&self, grid: Option<&Grid>) -> Vec<String> {
        let mut out = Vec::new();
        if !(self.epsilon >= 0.0) || !self.epsilon.is_finite() {
            out.push("solver.epsilon must be ≥ 0".to_string());
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            out.push("solver.dt must be > 0".to_string());
        }
        if !(self.t_end > 0.0) || !self.t_end.is_finite() {
            out.push("solver.t_end must be > 0".to_string());
        }
        if self.dt > self.t_end {
            out.push(format!(
                "solver.dt = {} must not exceed solver.t_end = {}",
                self.dt, self.t_end
            ));
        }
        if !(self.cfl_safety > 0.0) {
            out.push("solver.cfl_safety must be > 0".to_string());
        }
        if !(self.positivity_tol >= 0.0) {
            out.push("solver.positivity_tol must be ≥ 0".to_string());
        }
        if !(self.newton_tol > 0.0) {
            out.push("solver.newton_tol must be > 0".to_string());
        }
        if self.newton_max_iters == 0 {
            out.push("solver.newton_max_iters must be ≥ 1".to_string());
        }
        if self.record_every == 0 {
            out.push("output.record_every must be ≥ 1".to_string());
        }
        if let Some(g) = grid {
            let limit = self.cfl_safety * g.h();
            if self.dt > limit * (1.0 + 1e-12) {
                out.push(format!(
                    "solver.dt = {} violates the wave CFL limit cfl_safety·h = {limit}",
                    self.dt
                ));
            }
        }
        out
    }

    pub fn validate(&self, grid: &Grid) -> Result<()> {
        let p = self.problems(Some(grid));
        if p.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(p))
        }
    }

    /// Number of steps and the length of the last one.
    pub(crate) fn step_plan(&self) -> (usize, f64) {
        let ratio = self.t_end / self.dt;
        let n = (ratio - 1e-9).ceil().max(1.0) as usize;
        let last = self.t_end - (n - 1) as f64 * self.dt;
        (n, last)
    }
}

/// Recorded snapshots plus the per-step diagnostics stream of one run.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub grid: Grid,
    pub material: Material,
    pub epsilon: f64,
    pub states: Vec<State>,
    /// One record per step, starting at `t = 0`.
    pub records: Vec<DiagnosticsRecord>,
}

impl Trajectory {
    pub fn final_state(&self) -> &State {
        self.states
            .last()
            .expect("trajectory holds at least the initial state")
    }

    pub fn times(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.t).collect()
    }

    /// Smallest temperature seen over all steps.
    pub fn theta_min(&self) -> f64 {
        self.records
            .iter()
            .map(|r| r.theta_min)
            .fold(f64::INFINITY, f64::min)
    }
}

/// Integrate with the limit solver when `ε = 0` and the configured IMEX
/// scheme otherwise.
pub fn run(
    init: &State,
    material: &Material,
    cfg: &SolverConfig,
    grid: &Grid,
) -> Result<Trajectory> {
    run_with_sources(init, material, cfg, grid, None)
}

pub fn run_with_sources(
    init: &State,
    material: &Material,
    cfg: &SolverConfig,
    grid: &Grid,
    sources: Option<SourceFn>,
) -> Result<Trajectory> {
    if cfg.epsilon == 0.0 {
        limit::run_limit_with_sources(init, material, cfg, grid, sources)
    } else {
        eps::run_eps_with_sources(init, material, cfg, grid, sources)
    }
}

/// Shared run loop: validate, record, step, check positivity.
pub(crate) fn drive(
    init: &State,
    material: &Material,
    cfg: &SolverConfig,
    grid: &Grid,
    mut step: impl FnMut(&State, f64, usize) -> Result<State>,
) -> Result<Trajectory> {
    cfg.validate(grid)?;
    init.check_grid(grid)?;
    if init.t != 0.0 {
        return Err(Error::Contract(format!(
            "runs start at t = 0, initial state has t = {}",
            init.t
        )));
    }
    check_positivity(init, cfg.positivity_tol)?;
    let (n_steps, last_dt) = cfg.step_plan();
    let mut records = Vec::with_capacity(n_steps + 1);
    let mut states = Vec::with_capacity(n_steps / cfg.record_every + 2);
    let mut acc = diagnostics::Accumulator::new(grid, material, cfg.epsilon, init);
    records.push(acc.current());
    states.push(init.clone());
    let mut state = init.clone();
    for k in 0..n_steps {
        let dt = if k + 1 == n_steps { last_dt } else { cfg.dt };
        let mut next = step(&state, dt, k).map_err(|e| e.at_time(state.t))?;
        next.t = if k + 1 == n_steps {
            cfg.t_end
        } else {
            (k + 1) as f64 * cfg.dt
        };
        check_positivity(&next, cfg.positivity_tol)?;
        records.push(acc.advance(&next));
        if (k + 1) % cfg.record_every == 0 || k + 1 == n_steps {
            states.push(next.clone());
        }
        state = next;
    }
    Ok(Trajectory {
        grid: *grid,
        material: material.clone(),
        epsilon: cfg.epsilon,
        states,
        records,
    })
}

pub(crate) fn check_positivity(s: &State, tol: f64) -> Result<()> {
    let min = s.theta_min();
    if !(min >= -tol) {
        return Err(Error::Positivity { t: s.t, min, tol });
    }
    Ok(())
}

/// Evaluate the source at interior/boundary nodes, `[s_v, s_u, s_Θ]` per node.
pub(crate) fn sample_sources(src: &SourceFn, grid: &Grid, t: f64) -> [Vec<f64>; 3] {
    let n = grid.len();
    let mut out = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    for i in 0..n {
        let s = src(t, grid.x(i));
        out[0][i] = s[0];
        out[1][i] = s[1];
        out[2][i] = s[2];
    }
    // clamped and hinged unknowns keep zero boundary values
    for row in out.iter_mut().take(2) {
        row[0] = 0.0;
        row[n - 1] = 0.0;
    }
    out
}
