//! IMEX integrators for the regularized system.

use super::ops::{self, Kernels};
use super::{drive, sample_sources, Scheme, SolverConfig, SourceFn, State, Trajectory};
use crate::banded::{Pentadiagonal, Tridiagonal};
use crate::error::{Error, Result};
use crate::grid::{BcKind, Field, Grid};
use crate::material::{Material, MaterialKind};

enum Factors {
    /// `(I + ε dt A²)`, `(I - ε dt A)`, `(I - dt Aₙ)`.
    Imex1 {
        v: Pentadiagonal,
        u: Tridiagonal,
        heat: Tridiagonal,
    },
    /// Left-hand sides of the Crank–Nicolson half steps of length `dt/2`.
    Imex2 {
        v: Pentadiagonal,
        u: Tridiagonal,
        heat: Tridiagonal,
    },
}

pub(crate) struct EpsStepper<'a> {
    grid: &'a Grid,
    material: &'a Material,
    cfg: &'a SolverConfig,
    k: Kernels,
    sources: Option<SourceFn>,
    cache: Vec<(f64, Factors)>,
}

impl<'a> EpsStepper<'a> {
    pub fn new(
        grid: &'a Grid,
        material: &'a Material,
        cfg: &'a SolverConfig,
        sources: Option<SourceFn>,
    ) -> Self {
        EpsStepper {
            grid,
            material,
            cfg,
            k: Kernels::new(grid),
            sources,
            cache: Vec::with_capacity(2),
        }
    }

    fn factors(&mut self, dt: f64) -> Result<usize> {
        if let Some(i) = self.cache.iter().position(|(d, _)| *d == dt) {
            return Ok(i);
        }
        let eps = self.cfg.epsilon;
        let g = self.grid;
        let f = match self.cfg.scheme {
            Scheme::Imex1 => Factors::Imex1 {
                v: ops::biharmonic(g, eps * dt)?,
                u: ops::viscous(g, eps * dt)?,
                heat: ops::heat(g, dt, None)?,
            },
            Scheme::Imex2 => Factors::Imex2 {
                v: ops::biharmonic(g, 0.25 * eps * dt)?,
                u: ops::viscous(g, 0.25 * eps * dt)?,
                heat: ops::heat(g, 0.25 * dt, None)?,
            },
        };
        self.cache.push((dt, f));
        Ok(self.cache.len() - 1)
    }

    fn sources_at(&self, t: f64) -> Option<[Vec<f64>; 3]> {
        self.sources
            .as_ref()
            .map(|s| sample_sources(s, self.grid, t))
    }

    pub fn step(&mut self, s: &State, dt: f64) -> Result<State> {
        let idx = self.factors(dt)?;
        match self.cfg.scheme {
            Scheme::Imex1 => self.step_imex1(s, dt, idx),
            Scheme::Imex2 => self.step_imex2(s, dt, idx),
        }
    }

    fn step_imex1(&self, s: &State, dt: f64, idx: usize) -> Result<State> {
        let Factors::Imex1 { v: fv, u: fu, heat } = &self.cache[idx].1 else {
            unreachable!("factor cache holds imex1 factors");
        };
        let k = &self.k;
        let n = k.n - 1;
        let src = self.sources_at(s.t + dt);
        let (v, u, th) = (s.v.values(), s.u.values(), s.theta.values());

        let (_, df) = k.flux_gradient(self.material, th);
        let au = k.lap_dirichlet(u);
        let mut v1 = k.zeros();
        for i in 1..n {
            v1[i] = v[i] + dt * (au[i] - df[i]);
        }
        if let Some(sv) = &src {
            for i in 1..n {
                v1[i] += dt * sv[0][i];
            }
        }
        fv.solve_in_place(&mut v1)?;

        let mut u1 = k.zeros();
        for i in 1..n {
            u1[i] = u[i] + dt * v1[i];
        }
        if let Some(sv) = &src {
            for i in 1..n {
                u1[i] += dt * sv[1][i];
            }
        }
        fu.solve_in_place(&mut u1)?;

        let f_old: Vec<f64> = th.iter().map(|&t| self.material.f_clamped(t)).collect();
        let d = k.dx_hinged(&v1);
        let mut th1: Vec<f64> = (0..=n).map(|i| th[i] - dt * f_old[i] * d[i]).collect();
        if let Some(sv) = &src {
            for i in 0..=n {
                th1[i] += dt * sv[2][i];
            }
        }
        heat.solve_in_place(&mut th1)?;
        assemble(s.t + dt, v1, u1, th1)
    }

    fn step_imex2(&self, s: &State, dt: f64, idx: usize) -> Result<State> {
        let (v, u, th) = self.stiff_half(s.v.values(), s.u.values(), s.theta.values(), dt, idx)?;
        let (v, u, th) = self.coupling(s.t, &v, &u, &th, dt)?;
        let (v, u, th) = self.stiff_half(&v, &u, &th, dt, idx)?;
        assemble(s.t + dt, v, u, th)
    }

    /// Crank–Nicolson over `dt/2` for `v_t = -ε D₄ v`, `u_t = ε A u`, `Θ_t = Aₙ Θ`.
    fn stiff_half(
        &self,
        v: &[f64],
        u: &[f64],
        th: &[f64],
        dt: f64,
        idx: usize,
    ) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
        let Factors::Imex2 { v: fv, u: fu, heat } = &self.cache[idx].1 else {
            unreachable!("factor cache holds imex2 factors");
        };
        let k = &self.k;
        let c = 0.25 * dt;
        let eps = self.cfg.epsilon;
        let d4 = k.bilap_hinged(v);
        let mut v1: Vec<f64> = v.iter().zip(&d4).map(|(a, b)| a - c * eps * b).collect();
        fv.solve_in_place(&mut v1)?;
        let au = k.lap_dirichlet(u);
        let mut u1: Vec<f64> = u.iter().zip(&au).map(|(a, b)| a + c * eps * b).collect();
        fu.solve_in_place(&mut u1)?;
        let an = k.lap_neumann(th);
        let mut t1: Vec<f64> = th.iter().zip(&an).map(|(a, b)| a + c * b).collect();
        heat.solve_in_place(&mut t1)?;
        Ok((v1, u1, t1))
    }

    /// Verlet kick–drift–kick for the non-stiff coupling, with a pointwise
    /// trapezoid update of `Θ_t = -f(Θ) v_x`.
    fn coupling(
        &self,
        t: f64,
        v: &[f64],
        u: &[f64],
        th: &[f64],
        dt: f64,
    ) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
        let k = &self.k;
        let n = k.n - 1;
        let half = 0.5 * dt;
        let src0 = self.sources_at(t);
        let src_mid = self.sources_at(t + half);
        let src1 = self.sources_at(t + dt);

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
        let mut th1 = k.zeros();
        for i in 0..=n {
            let a = half * d[i];
            let mut rhs = th[i] - a * f0[i];
            if let Some(sv) = &src_mid {
                rhs += dt * sv[2][i];
            }
            th1[i] = solve_pointwise(self.material, a, rhs, th[i], self.cfg)?;
        }
        let (_, df1) = k.flux_gradient(self.material, &th1);
        let au1 = k.lap_dirichlet(&u1);
        let mut v1 = k.zeros();
        for i in 1..n {
            v1[i] = vh[i] + half * (au1[i] - df1[i]);
            if let Some(sv) = &src1 {
                v1[i] += half * sv[0][i];
            }
        }
        Ok((v1, u1, th1))
    }
}

/// Solve `θ + a f(θ) = r` by Newton from `guess`.
fn solve_pointwise(m: &Material, a: f64, r: f64, guess: f64, cfg: &SolverConfig) -> Result<f64> {
    if let MaterialKind::Identity = m.kind() {
        return Ok(r / (1.0 + a));
    }
    let mut x = guess;
    for _ in 0..cfg.newton_max_iters {
        let (f, fp, _) = m.eval_all(x.max(0.0));
        let g = x + a * f - r;
        let dg = 1.0 + a * fp;
        if !(dg.abs() > 1e-14) {
            break;
        }
        let dx = g / dg;
        x -= dx;
        if dx.abs() <= cfg.newton_tol * x.abs().max(1.0) {
            return Ok(x);
        }
    }
    Err(Error::Scheme {
        t: f64::NAN,
        msg: format!("pointwise Newton did not converge (a = {a:e}, r = {r:e})"),
    })
}

pub(crate) fn assemble(t: f64, v: Vec<f64>, u: Vec<f64>, th: Vec<f64>) -> Result<State> {
    let nan = v.iter().chain(&u).chain(&th).any(|x| !x.is_finite());
    if nan {
        return Err(Error::Scheme {
            t,
            msg: "non-finite values after step".into(),
        });
    }
    State::new(
        t,
        Field::new(v, BcKind::Hinged)?,
        Field::new(u, BcKind::DirichletZero)?,
        Field::new(th, BcKind::NeumannZero)?,
    )
}

/// Advance the regularized system by one step of `cfg.dt`.
pub fn step_eps(s: &State, material: &Material, cfg: &SolverConfig, grid: &Grid) -> Result<State> {
    cfg.validate(grid)?;
    s.check_grid(grid)?;
    let mut st = EpsStepper::new(grid, material, cfg, None);
    let next = st.step(s, cfg.dt).map_err(|e| e.at_time(s.t))?;
    super::check_positivity(&next, cfg.positivity_tol)?;
    Ok(next)
}

/// Integrate the regularized system from `init` to `cfg.t_end`.
pub fn run_eps(
    init: &State,
    material: &Material,
    cfg: &SolverConfig,
    grid: &Grid,
) -> Result<Trajectory> {
    run_eps_with_sources(init, material, cfg, grid, None)
}

pub(crate) fn run_eps_with_sources(
    init: &State,
    material: &Material,
    cfg: &SolverConfig,
    grid: &Grid,
    sources: Option<SourceFn>,
) -> Result<Trajectory> {
    let mut st = EpsStepper::new(grid, material, cfg, sources);
    drive(init, material, cfg, grid, |s, dt, _| st.step(s, dt))
}
