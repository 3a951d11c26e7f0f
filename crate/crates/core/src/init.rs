//! Initial data: equilibria, smooth profiles, seeded random Fourier data and
//! rough (nonsmooth) data.

use crate::error::{Error, Result};
use crate::grid::{BcKind, Field, Grid};
use crate::solver::State;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

/// `(v, u, Θ) = (0, 0, θ̄)`.
pub fn equilibrium(grid: &Grid, theta_bar: f64) -> Result<State> {
    if !(theta_bar >= 0.0) {
        return Err(Error::Contract(format!(
            "equilibrium temperature must be nonnegative, got {theta_bar}"
        )));
    }
    State::new(
        0.0,
        Field::zeros(grid, BcKind::Hinged),
        Field::zeros(grid, BcKind::DirichletZero),
        Field::from_fn(grid, BcKind::NeumannZero, |_| theta_bar),
    )
}

pub fn zero(grid: &Grid) -> State {
    equilibrium(grid, 0.0).expect("zero state is valid")
}

/// Sample closures for `u_t(·,0)`, `u(·,0)` and `Θ(·,0)`. Boundary values of
/// `v` and `u` are forced to zero.
pub fn from_profiles(
    grid: &Grid,
    v0: impl Fn(f64) -> f64,
    u0: impl Fn(f64) -> f64,
    theta0: impl Fn(f64) -> f64,
) -> Result<State> {
    let theta = Field::from_fn(grid, BcKind::NeumannZero, theta0);
    check_nonnegative(&theta)?;
    State::new(
        0.0,
        Field::from_fn(grid, BcKind::Hinged, v0),
        Field::from_fn(grid, BcKind::DirichletZero, u0),
        theta,
    )
}

/// The smooth reference data `u₀ = 0.3 sin(πx)`, `u₀ₜ = 0`, `Θ₀ = 1 + 0.2 cos(πx)`
/// (in coordinates scaled to the interval).
pub fn smooth_reference(grid: &Grid) -> Result<State> {
    let (a, w) = (grid.a(), grid.width());
    from_profiles(
        grid,
        |_| 0.0,
        |x| 0.3 * (PI * (x - a) / w).sin(),
        |x| 1.0 + 0.2 * (PI * (x - a) / w).cos(),
    )
}

/// Seeded random Fourier data with `min Θ₀ ≥ theta_min`.
///
/// `u₀` and `v₀` are sine series (compatible with both the clamped and the
/// hinged conditions), `Θ₀` a cosine series shifted so that its minimum is at
/// least `theta_min`.
pub fn random_fourier(grid: &Grid, seed: u64, modes: usize, theta_min: f64) -> Result<State> {
    if theta_min < 0.0 {
        return Err(Error::Contract(format!(
            "theta_min must be nonnegative, got {theta_min}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |scale: f64| -> Vec<f64> {
        (1..=modes)
            .map(|k| scale * rng.gen_range(-1.0..1.0) / (k * k) as f64)
            .collect()
    };
    let a_u = draw(0.3);
    let a_v = draw(0.3);
    let a_t = draw(0.4);
    let shift = theta_min + a_t.iter().map(|c| c.abs()).sum::<f64>() + 0.1;
    let (a0, w) = (grid.a(), grid.width());
    let series = |coef: &[f64], x: f64, trig: fn(f64) -> f64| -> f64 {
        coef.iter()
            .enumerate()
            .map(|(k, c)| c * trig((k + 1) as f64 * PI * (x - a0) / w))
            .sum()
    };
    from_profiles(
        grid,
        |x| series(&a_v, x, f64::sin),
        |x| series(&a_u, x, f64::sin),
        |x| shift + series(&a_t, x, f64::cos),
    )
}

/// Nonsmooth initial data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RoughKind {
    /// Continuous piecewise-linear `u₀` with slope `left_slope` up to `jump_at`
    /// and the slope that returns to zero at the right end afterwards.
    StepStrain { jump_at: f64, left_slope: f64 },
    /// `teeth` triangular teeth of height `amplitude`.
    SawtoothStrain { teeth: usize, amplitude: f64 },
    /// `Θ₀ = base + amplitude·ξ` with i.i.d. `ξ ~ U[0, 1)` per node.
    RandomL2Theta { amplitude: f64, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoughParams {
    pub kind: RoughKind,
    /// Constant part of `Θ₀`.
    pub theta_base: f64,
    /// Height of a discontinuous velocity plateau on the middle third.
    pub velocity_plateau: f64,
}

impl RoughParams {
    pub fn new(kind: RoughKind) -> Self {
        RoughParams {
            kind,
            theta_base: 0.0,
            velocity_plateau: 0.0,
        }
    }

    pub fn theta_base(mut self, theta_base: f64) -> Self {
        self.theta_base = theta_base;
        self
    }

    pub fn velocity_plateau(mut self, height: f64) -> Self {
        self.velocity_plateau = height;
        self
    }
}

/// Sample rough data on the grid.
pub fn prepare_rough_data(grid: &Grid, params: &RoughParams) -> Result<State> {
    let (a, b, w) = (grid.a(), grid.b(), grid.width());
    let u: Vec<f64> = match params.kind {
        RoughKind::StepStrain {
            jump_at,
            left_slope,
        } => {
            if !(jump_at > a && jump_at < b) {
                return Err(Error::Contract(format!(
                    "strain jump location {jump_at} must lie inside ({a}, {b})"
                )));
            }
            let peak = left_slope * (jump_at - a);
            let right_slope = -peak / (b - jump_at);
            grid.sample(|x| {
                if x <= jump_at {
                    left_slope * (x - a)
                } else {
                    peak + right_slope * (x - jump_at)
                }
            })
        }
        RoughKind::SawtoothStrain { teeth, amplitude } => {
            if teeth == 0 {
                return Err(Error::Contract("sawtooth needs at least one tooth".into()));
            }
            let width = w / teeth as f64;
            grid.sample(|x| {
                let s = ((x - a) / width).fract();
                amplitude * (1.0 - (2.0 * s - 1.0).abs())
            })
        }
        RoughKind::RandomL2Theta { .. } => vec![0.0; grid.len()],
    };
    let theta: Vec<f64> = match params.kind {
        RoughKind::RandomL2Theta { amplitude, seed } => {
            if amplitude < 0.0 {
                return Err(Error::Contract(format!(
                    "random temperature amplitude must be nonnegative, got {amplitude}"
                )));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..grid.len())
                .map(|_| params.theta_base + amplitude * rng.gen::<f64>())
                .collect()
        }
        _ => vec![params.theta_base; grid.len()],
    };
    let plateau = params.velocity_plateau;
    let v = Field::from_fn(grid, BcKind::Hinged, |x| {
        let s = (x - a) / w;
        if (1.0 / 3.0..=2.0 / 3.0).contains(&s) {
            plateau
        } else {
            0.0
        }
    });
    let mut u = u;
    let n = u.len() - 1;
    u[0] = 0.0;
    u[n] = 0.0;
    let theta = Field::new(theta, BcKind::NeumannZero)?;
    check_nonnegative(&theta)?;
    State::new(0.0, v, Field::new(u, BcKind::DirichletZero)?, theta)
}

fn check_nonnegative(theta: &Field) -> Result<()> {
    if let Some((i, &t)) = theta
        .values()
        .iter()
        .enumerate()
        .find(|(_, &t)| !(t >= 0.0))
    {
        return Err(Error::Contract(format!(
            "initial temperature must be nonnegative, node {i} has {t}"
        )));
    }
    Ok(())
}

/// Named initial data, rebuilt on each grid of a refinement ladder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialData {
    Equilibrium {
        theta: f64,
    },
    Zero,
    SmoothReference,
    RandomFourier {
        seed: u64,
        modes: usize,
        theta_min: f64,
    },
    Rough(RoughParams),
}

impl InitialData {
    pub fn build(&self, grid: &Grid) -> Result<State> {
        match *self {
            InitialData::Equilibrium { theta } => equilibrium(grid, theta),
            InitialData::Zero => Ok(zero(grid)),
            InitialData::SmoothReference => smooth_reference(grid),
            InitialData::RandomFourier {
                seed,
                modes,
                theta_min,
            } => random_fourier(grid, seed, modes, theta_min),
            InitialData::Rough(p) => prepare_rough_data(grid, &p),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            InitialData::Equilibrium { .. } => "equilibrium",
            InitialData::Zero => "zero",
            InitialData::SmoothReference => "smooth",
            InitialData::RandomFourier { .. } => "random_fourier",
            InitialData::Rough(p) => match p.kind {
                RoughKind::StepStrain { .. } => "step_strain",
                RoughKind::SawtoothStrain { .. } => "sawtooth_strain",
                RoughKind::RandomL2Theta { .. } => "random_theta",
            },
        }
    }
}
