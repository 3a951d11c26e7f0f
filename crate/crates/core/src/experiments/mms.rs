//! Convergence orders by the method of manufactured solutions.
//!
//! Manufactured fields, with `S = sin(k(x-a))`, `C = cos(k(x-a))`, `k = π/|Ω|`:
//!
//! ```text
//! u* = A S cos t,  v* = u*_t - ε u*_xx = A S (εk² cos t - sin t),  Θ* = θ̄ + B C e^{-t}
//! ```
//!
//! They satisfy all boundary conditions. The sources are what is left after
//! substituting them into the equations:
//!
//! ```text
//! s_v = v*_t + ε v*_xxxx - u*_xx + f'(Θ*) Θ*_x,   s_u = 0,   s_Θ = Θ*_t - Θ*_xx + f(Θ*) v*_x
//! ```

use super::{impl_report, loglog_slope, Check, Table};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::grid::{BcKind, Field, Grid};
use crate::material::Material;
use crate::solver::{run_with_sources, Scheme, SolverConfig, SourceFn, State};
use serde::Serialize;
use std::f64::consts::PI;
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq)]
pub struct Manufactured {
    pub a: f64,
    pub b: f64,
    pub epsilon: f64,
    pub amp_u: f64,
    pub theta_bar: f64,
    pub amp_theta: f64,
    pub material: Material,
}

impl Manufactured {
    /// `A = 1`, `θ̄ = 1`, `B = ½`.
    pub fn standard(a: f64, b: f64, epsilon: f64, material: Material) -> Self {
        Manufactured {
            a,
            b,
            epsilon,
            amp_u: 1.0,
            theta_bar: 1.0,
            amp_theta: 0.5,
            material,
        }
    }

    fn k(&self) -> f64 {
        PI / (self.b - self.a)
    }

    /// `(v*, u*, Θ*)` at `(t, x)`.
    pub fn exact(&self, t: f64, x: f64) -> [f64; 3] {
        let k = self.k();
        let (s, c) = (k * (x - self.a)).sin_cos();
        let g = self.epsilon * k * k * t.cos() - t.sin();
        [
            self.amp_u * s * g,
            self.amp_u * s * t.cos(),
            self.theta_bar + self.amp_theta * c * (-t).exp(),
        ]
    }

    /// `(s_v, s_u, s_Θ)` at `(t, x)`.
    pub fn source(&self, t: f64, x: f64) -> [f64; 3] {
        let (eps, k, a) = (self.epsilon, self.k(), self.amp_u);
        let (s, c) = (k * (x - self.a)).sin_cos();
        let e = (-t).exp();
        let g = eps * k * k * t.cos() - t.sin();
        let gp = -eps * k * k * t.sin() - t.cos();
        let theta = self.theta_bar + self.amp_theta * c * e;
        let theta_x = -self.amp_theta * k * s * e;
        let theta_xx = -self.amp_theta * k * k * c * e;
        let theta_t = -self.amp_theta * c * e;
        let (f, fp, _) = self.material.eval_all(theta.max(0.0));
        let v_t = a * s * gp;
        let v_xxxx = a * k.powi(4) * s * g;
        let v_x = a * k * c * g;
        let u_xx = -a * k * k * s * t.cos();
        [
            v_t + eps * v_xxxx - u_xx + fp * theta_x,
            0.0,
            theta_t - theta_xx + f * v_x,
        ]
    }

    pub fn sources(&self) -> SourceFn {
        let m = self.clone();
        Arc::new(move |t, x| m.source(t, x))
    }

    pub fn state(&self, grid: &Grid, t: f64) -> Result<State> {
        let field = |k: usize, bc: BcKind| Field::from_fn(grid, bc, |x| self.exact(t, x)[k]);
        State::new(
            t,
            field(0, BcKind::Hinged),
            field(1, BcKind::DirichletZero),
            field(2, BcKind::NeumannZero),
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MmsConfig {
    pub a: f64,
    pub b: f64,
    pub material: Material,
    pub epsilon: f64,
    pub scheme: Scheme,
    pub t_end: f64,
    /// Coarsest grid of the spatial ladder.
    pub n_cells: usize,
    /// Spatial ladder step `dt = spatial_dt_factor · h²`.
    pub spatial_dt_factor: f64,
    /// Fixed grid of the temporal ladder.
    pub temporal_n_cells: usize,
    /// Coarsest step of the temporal ladder.
    pub temporal_dt: f64,
    pub levels: usize,
}

impl MmsConfig {
    pub fn new(material: Material, epsilon: f64, scheme: Scheme) -> Self {
        MmsConfig {
            a: 0.0,
            b: 1.0,
            material,
            epsilon,
            scheme,
            t_end: 0.5,
            n_cells: 32,
            spatial_dt_factor: 0.25,
            temporal_n_cells: 64,
            temporal_dt: 1.0 / 128.0,
            levels: 3,
        }
    }

    /// Temporal order the configured integrator is built for.
    pub fn scheme_order(&self) -> f64 {
        if self.epsilon == 0.0 {
            1.0
        } else {
            self.scheme.order()
        }
    }

    fn manufactured(&self) -> Manufactured {
        Manufactured::standard(self.a, self.b, self.epsilon, self.material.clone())
    }

    fn run_final(&self, n_cells: usize, dt: f64) -> Result<(Grid, State)> {
        let grid = Grid::new(self.a, self.b, n_cells)?;
        let m = self.manufactured();
        let mut cfg = SolverConfig::for_grid(&grid, self.epsilon, self.t_end)
            .with_dt(dt)
            .with_scheme(self.scheme);
        cfg.record_every = usize::MAX;
        let traj = run_with_sources(
            &m.state(&grid, 0.0)?,
            &self.material,
            &cfg,
            &grid,
            Some(m.sources()),
        )?;
        Ok((grid, traj.final_state().clone()))
    }
}

fn field_errors(grid: &Grid, a: &State, b: &State) -> [f64; 3] {
    let d = |p: &Field, q: &Field| -> f64 {
        let diff: Vec<f64> = p
            .values()
            .iter()
            .zip(q.values())
            .map(|(x, y)| x - y)
            .collect();
        grid.norm_sq(&diff).sqrt()
    };
    [d(&a.v, &b.v), d(&a.u, &b.u), d(&a.theta, &b.theta)]
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MmsReport {
    pub scheme_order: f64,
    /// `[h, e_v, e_u, e_Θ]` against the manufactured solution.
    pub spatial: Vec<[f64; 4]>,
    pub spatial_orders: [f64; 3],
    /// `[dt, d_v, d_u, d_Θ]`, differences between consecutive step sizes.
    pub temporal: Vec<[f64; 4]>,
    pub temporal_orders: [f64; 3],
    pub checks: Vec<Check>,
    pub tables: Vec<Table>,
}

impl_report!(MmsReport, "mms");

const FIELDS: [&str; 3] = ["v", "u", "Theta"];

/// Spatial ladder `N·2^k` with `dt = c h²` against the exact solution, and a
/// temporal ladder `dt·2^-k` on a fixed grid measured by differences of
/// consecutive runs (free of spatial error).
///
/// Checks: every spatial order `≥ min_spatial`, every temporal order within
/// `temporal_tol` of [`MmsConfig::scheme_order`].
pub fn mms(cfg: &MmsConfig, min_spatial: f64, temporal_tol: f64, exec: Exec) -> Result<MmsReport> {
    if cfg.levels < 2 {
        return Err(Error::Contract(
            "convergence study needs at least two levels".into(),
        ));
    }
    let spatial_jobs: Vec<(usize, f64)> = (0..cfg.levels)
        .map(|k| {
            let n = cfg.n_cells << k;
            let h = (cfg.b - cfg.a) / n as f64;
            (n, cfg.spatial_dt_factor * h * h)
        })
        .collect();
    let temporal_jobs: Vec<(usize, f64)> = (0..=cfg.levels)
        .map(|k| (cfg.temporal_n_cells, cfg.temporal_dt / (1u64 << k) as f64))
        .collect();
    let mut jobs = spatial_jobs.clone();
    jobs.extend(&temporal_jobs);
    let results = exec.map(jobs, |(n, dt)| cfg.run_final(n, dt));
    let results = results.into_iter().collect::<Result<Vec<_>>>()?;
    let (sp, tm) = results.split_at(cfg.levels);
    let m = cfg.manufactured();

    let mut spatial = Vec::new();
    let mut st = Table::new("spatial", &["h", "err_v", "err_u", "err_Theta"]);
    for (grid, s) in sp {
        let e = field_errors(grid, s, &m.state(grid, cfg.t_end)?);
        let row = [grid.h(), e[0], e[1], e[2]];
        st.push(row.to_vec());
        spatial.push(row);
    }
    let mut temporal = Vec::new();
    let mut tt = Table::new("temporal", &["dt", "diff_v", "diff_u", "diff_Theta"]);
    for k in 0..cfg.levels {
        let e = field_errors(&tm[k].0, &tm[k].1, &tm[k + 1].1);
        let row = [temporal_jobs[k].1, e[0], e[1], e[2]];
        tt.push(row.to_vec());
        temporal.push(row);
    }
    let orders = |rows: &[[f64; 4]]| -> [f64; 3] {
        let x: Vec<f64> = rows.iter().map(|r| r[0]).collect();
        std::array::from_fn(|f| {
            let y: Vec<f64> = rows.iter().map(|r| r[f + 1]).collect();
            loglog_slope(&x, &y)
        })
    };
    let spatial_orders = orders(&spatial);
    let temporal_orders = orders(&temporal);
    let target = cfg.scheme_order();
    let mut checks = Vec::new();
    for f in 0..3 {
        let p = spatial_orders[f];
        checks.push(Check::new(
            format!("spatial order of {}", FIELDS[f]),
            p >= min_spatial,
            format!("{p:.3} ≥ {min_spatial}"),
        ));
    }
    for f in 0..3 {
        let p = temporal_orders[f];
        checks.push(Check::new(
            format!("temporal order of {}", FIELDS[f]),
            (p - target).abs() <= temporal_tol,
            format!("{p:.3} vs {target} ± {temporal_tol}"),
        ));
    }
    Ok(MmsReport {
        scheme_order: target,
        spatial,
        spatial_orders,
        temporal,
        temporal_orders,
        checks,
        tables: vec![st, tt],
    })
}
