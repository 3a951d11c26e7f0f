//! Direct integrator for the limit system `u_tt = u_xx - (f(Θ))_x`,
//! `Θ_t = Θ_xx - f(Θ) u_xt`.
//!
//! Velocity-Verlet for the wave part and an implicit heat step in between:
//!
//! ```text
//! v½   = vⁿ + (dt/2)(A uⁿ - Dₓ f(Θⁿ))
//! uⁿ⁺¹ = uⁿ + dt v½
//! (I - dt Aₙ) Θⁿ⁺¹ = Θⁿ - dt F Dₓv½
//! vⁿ⁺¹ = v½ + (dt/2)(A uⁿ⁺¹ - Dₓ f(Θⁿ⁺¹))
//! ```
//!
//! With `F = ½(f(Θⁿ) + f(Θⁿ⁺¹))` the work done by the two kicks matches the
//! heat produced exactly, and `E - (dt²/8)|A u - Dₓ f(Θ)|²` is conserved up to
//! the solver tolerance. With `F = f(Θⁿ)` the heat step is linear but the
//! energy drifts at first order.

use super::eps::assemble;
use super::ops::{self, Kernels};
use super::{drive, sample_sources, SolverConfig, SourceFn, State, ThetaCoupling, Trajectory};
use crate::banded::Tridiagonal;
use crate::error::{Error, Result};
use crate::grid::{grad_sq, Grid};
use crate::material::{Material, MaterialKind};

pub(crate) struct LimitStepper<'a> {
    grid: &'a Grid,
    material: &'a Material,
    cfg: &'a SolverConfig,
    k: Kernels,
    sources: Option<SourceFn>,
    heat_cache: Vec<(f64, Tridiagonal)>,
}

impl<'a> LimitStepper<'a> {
    pub fn new(
        grid: &'a Grid,
        material: &'a Material,
        cfg: &'a SolverConfig,
        sources: Option<SourceFn>,
    ) -> Self {
        LimitStepper {
            grid,
            material,
            cfg,
            k: Kernels::new(grid),
            sources,
            heat_cache: Vec::with_capacity(2),
        }
    }

    fn heat(&mut self, dt: f64) -> Result<usize> {
        if let Some(i) = self.heat_cache.iter().position(|(d, _)| *d == dt) {
            return Ok(i);
        }
        self.heat_cache.push((dt, ops::heat(self.grid, dt, None)?));
        Ok(self.heat_cache.len() - 1)
    }

    pub fn step(&mut self, s: &State, dt: f64) -> Result<State> {
        let k = &self.k;
        let n = k.n - 1;
        let half = 0.5 * dt;
        let t = s.t;
        let src0 = self
            .sources
            .as_ref()
            .map(|f| sample_sources(f, self.grid, t));
        let src_mid = self
            .sources
            .as_ref()
            .map(|f| sample_sources(f, self.grid, t + half));
        let src1 = self
            .sources
            .as_ref()
            .map(|f| sample_sources(f, self.grid, t + dt));
        let (v, u, th) = (s.v.values(), s.u.values(), s.theta.values());

        let (f0, df0) = k.flux_gradient(self.material, th);
        let au0 = k.lap_dirichlet(u);
        let mut vh = k.zeros();
        for i in 1..n {
            vh[i] = v[i] + half * (au0[i] - df0[i]);
            if let Some(sv) = &src0 {
                vh[i] += half * sv[0][i];
            }
        }
        let mut u1 = k.zeros();
        for i in 1..n {
            u1[i] = u[i] + dt * vh[i];
            if let Some(sv) = &src_mid {
                u1[i] += dt * sv[1][i];
            }
        }
        let d = k.dx_hinged(&vh);
        let heat_src = src1.as_ref().map(|s| s[2].as_slice());
        let th1 = match self.cfg.coupling {
            ThetaCoupling::Lagged => {
                let mut rhs: Vec<f64> = (0..=n).map(|i| th[i] - dt * f0[i] * d[i]).collect();
                if let Some(sq) = heat_src {
                    for i in 0..=n {
                        rhs[i] += dt * sq[i];
                    }
                }
                let idx = self.heat(dt)?;
                self.heat_cache[idx].1.solve_in_place(&mut rhs)?;
                rhs
            }
            ThetaCoupling::Trapezoidal => self.trapezoidal_heat(th, &f0, &d, heat_src, dt)?,
        };
        let k = &self.k;
        let (_, df1) = k.flux_gradient(self.material, &th1);
        let au1 = k.lap_dirichlet(&u1);
        let mut v1 = k.zeros();
        for i in 1..n {
            v1[i] = vh[i] + half * (au1[i] - df1[i]);
            if let Some(sv) = &src1 {
                v1[i] += half * sv[0][i];
            }
        }
        assemble(t + dt, v1, u1, th1)
    }

    /// Newton on `(I - dt Aₙ)Θ' + (dt/2) f(Θ')∘d = Θ - (dt/2) f(Θ)∘d + dt s`.
    fn trapezoidal_heat(
        &self,
        th: &[f64],
        f0: &[f64],
        d: &[f64],
        src: Option<&[f64]>,
        dt: f64,
    ) -> Result<Vec<f64>> {
        let half = 0.5 * dt;
        let n = th.len();
        let mut b: Vec<f64> = (0..n).map(|i| th[i] - half * f0[i] * d[i]).collect();
        if let Some(sq) = src {
            for i in 0..n {
                b[i] += dt * sq[i];
            }
        }
        if let MaterialKind::Identity = self.material.kind() {
            let extra: Vec<f64> = d.iter().map(|di| half * di).collect();
            ops::heat(self.grid, dt, Some(&extra))?.solve_in_place(&mut b)?;
            return Ok(b);
        }
        let mut x = th.to_vec();
        for _ in 0..self.cfg.newton_max_iters {
            let lap = self.k.lap_neumann(&x);
            let mut r = vec![0.0; n];
            let mut extra = vec![0.0; n];
            for i in 0..n {
                let (f, fp, _) = self.material.eval_all(x[i].max(0.0));
                r[i] = x[i] - dt * lap[i] + half * f * d[i] - b[i];
                extra[i] = half * fp * d[i];
            }
            ops::heat(self.grid, dt, Some(&extra))?.solve_in_place(&mut r)?;
            let scale = x.iter().fold(1.0f64, |m, v| m.max(v.abs()));
            let mut step = 0.0f64;
            for i in 0..n {
                x[i] -= r[i];
                step = step.max(r[i].abs());
            }
            if step <= self.cfg.newton_tol * scale {
                return Ok(x);
            }
        }
        Err(Error::Scheme {
            t: f64::NAN,
            msg: format!(
                "heat-step Newton did not converge in {} iterations",
                self.cfg.newton_max_iters
            ),
        })
    }
}

fn require_limit(cfg: &SolverConfig) -> Result<()> {
    if cfg.epsilon != 0.0 {
        return Err(Error::Contract(format!(
            "the limit solver requires epsilon = 0, got {}",
            cfg.epsilon
        )));
    }
    Ok(())
}

/// Advance the limit system by one step of `cfg.dt`.
pub fn step_limit(
    s: &State,
    material: &Material,
    cfg: &SolverConfig,
    grid: &Grid,
) -> Result<State> {
    require_limit(cfg)?;
    cfg.validate(grid)?;
    s.check_grid(grid)?;
    let mut st = LimitStepper::new(grid, material, cfg, None);
    let next = st.step(s, cfg.dt).map_err(|e| e.at_time(s.t))?;
    super::check_positivity(&next, cfg.positivity_tol)?;
    Ok(next)
}

/// Integrate the limit system from `init` to `cfg.t_end`.
pub fn run_limit(
    init: &State,
    material: &Material,
    cfg: &SolverConfig,
    grid: &Grid,
) -> Result<Trajectory> {
    run_limit_with_sources(init, material, cfg, grid, None)
}

pub(crate) fn run_limit_with_sources(
    init: &State,
    material: &Material,
    cfg: &SolverConfig,
    grid: &Grid,
    sources: Option<SourceFn>,
) -> Result<Trajectory> {
    require_limit(cfg)?;
    let mut st = LimitStepper::new(grid, material, cfg, sources);
    drive(init, material, cfg, grid, |s, dt, _| st.step(s, dt))
}

/// `½|v|² + ½|uₓ|² - (dt²/8)|A u - Dₓ f(Θ)|² + ∫Θ`, the quantity the Verlet
/// arrangement conserves. For the linear wave (`Θ ≡ 0`) it is exactly
/// invariant up to round-off.
pub fn shadow_energy(s: &State, material: &Material, grid: &Grid, dt: f64) -> Result<f64> {
    s.check_grid(grid)?;
    let k = Kernels::new(grid);
    let au = k.lap_dirichlet(s.u.values());
    let (_, df) = k.flux_gradient(material, s.theta.values());
    let n = grid.len() - 1;
    let force_sq: f64 = (1..n).map(|i| grid.h() * (au[i] - df[i]).powi(2)).sum();
    Ok(
        0.5 * grid.norm_sq(s.v.values()) + 0.5 * grad_sq(s.u.values(), grid.h())
            - dt * dt / 8.0 * force_sq
            + grid.integrate(s.theta.values()),
    )
}
