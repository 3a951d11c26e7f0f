//! Functionals and identity residuals evaluated along trajectories.
//!
//! Discrete conventions:
//!
//! * `‖·‖` is the trapezoid L² norm of nodal values.
//! * Gradient energies `‖ψ_x‖²` of nodal data use cell differences
//!   ([`grad_sq`]), i.e. the exact integral for the piecewise-linear interpolant.
//!   With the clamped closure this equals `-⟨u, A u⟩` exactly, which is what the
//!   solvers conserve.
//! * `‖v_xx‖²`, `‖u_xx‖²`, `‖Θ_xx‖²` use the closed second differences.
//! * Time integrals use the trapezoid rule over the recorded steps.

use crate::error::{Error, Result};
use crate::grid::{dx_into, dxx_into, grad_sq, weighted_grad_sq, BcKind, Grid};
use crate::material::Material;
use crate::solver::{State, Trajectory};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Scalars recorded after every step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiagnosticsRecord {
    pub t: f64,
    /// `½‖v‖² + ½‖u_x‖² + ∫Θ`.
    pub energy: f64,
    /// `∫Θ`.
    pub theta_mass: f64,
    pub theta_min: f64,
    pub theta_max: f64,
    /// `1 + ½‖v_x‖² + ½‖u_xx‖² + ½∫ρ(Θ)Θ_x²`; `None` when `min Θ` is below the
    /// material's floor and the weight cannot be evaluated.
    pub hfunc: Option<f64>,
    /// `∫₀ᵗ ‖Θ_x‖²`.
    pub dissipation_accum: f64,
    /// `ε ∫₀ᵗ (‖v_xx‖² + ‖u_xx‖²)`.
    pub eps_dissipation_accum: f64,
    /// `∫₀ᵗ ‖Θ_xx‖²`.
    pub theta_xx_accum: f64,
    /// `‖Θ_x‖²` at `t`.
    pub theta_x_sq: f64,
    /// `‖Θ_xx‖²` at `t`.
    pub theta_xx_sq: f64,
    /// `ε (‖v_xx‖² + ‖u_xx‖²)` at `t`.
    pub eps_rate: f64,
    /// `∫ f'(Θ) Θ_x v`, discretized as `⟨Dₓ f(Θ), v⟩`.
    pub mass_flux: f64,
}

impl DiagnosticsRecord {
    pub fn hfunc_flagged(&self) -> bool {
        self.hfunc.is_none()
    }
}

/// `½‖v‖² + ½‖u_x‖² + ∫Θ`.
pub fn energy(s: &State, grid: &Grid) -> f64 {
    0.5 * grid.norm_sq(s.v.values())
        + 0.5 * grad_sq(s.u.values(), grid.h())
        + grid.integrate(s.theta.values())
}

/// `y = 1 + ½‖v_x‖² + ½‖u_xx‖² + ½∫ρ(Θ)Θ_x²`, with `ρ` evaluated at cell
/// midpoints. `None` if `min Θ < rho_floor`.
pub fn hfunc(s: &State, grid: &Grid, material: &Material) -> Option<f64> {
    if !(s.theta_min() >= material.rho_floor()) {
        return None;
    }
    let h = grid.h();
    let mut uxx = vec![0.0; grid.len()];
    dxx_into(s.u.values(), BcKind::DirichletZero, h, &mut uxx);
    let weighted = weighted_grad_sq(s.theta.values(), h, |xi| {
        material.rho(xi).unwrap_or(f64::NAN)
    });
    let y = 1.0 + 0.5 * grad_sq(s.v.values(), h) + 0.5 * grid.norm_sq(&uxx) + 0.5 * weighted;
    y.is_finite().then_some(y)
}

struct Rates {
    theta_x_sq: f64,
    theta_xx_sq: f64,
    eps_rate: f64,
    mass_flux: f64,
}

fn rates(s: &State, grid: &Grid, material: &Material, epsilon: f64) -> Rates {
    let h = grid.h();
    let n = grid.len();
    let mut buf = vec![0.0; n];
    dxx_into(s.theta.values(), BcKind::NeumannZero, h, &mut buf);
    let theta_xx_sq = grid.norm_sq(&buf);
    let eps_rate = if epsilon > 0.0 {
        dxx_into(s.v.values(), BcKind::Hinged, h, &mut buf);
        let v = grid.norm_sq(&buf);
        dxx_into(s.u.values(), BcKind::DirichletZero, h, &mut buf);
        epsilon * (v + grid.norm_sq(&buf))
    } else {
        0.0
    };
    let f: Vec<f64> = s
        .theta
        .values()
        .iter()
        .map(|&t| material.f_clamped(t))
        .collect();
    dx_into(&f, BcKind::NeumannZero, h, &mut buf);
    Rates {
        theta_x_sq: grad_sq(s.theta.values(), h),
        theta_xx_sq,
        eps_rate,
        mass_flux: grid.inner(&buf, s.v.values()),
    }
}

/// Incremental builder of the per-step record stream.
pub(crate) struct Accumulator<'a> {
    grid: &'a Grid,
    material: &'a Material,
    epsilon: f64,
    last: DiagnosticsRecord,
}

impl<'a> Accumulator<'a> {
    pub fn new(grid: &'a Grid, material: &'a Material, epsilon: f64, init: &State) -> Self {
        let r = rates(init, grid, material, epsilon);
        let last = snapshot(init, grid, material, &r, 0.0, 0.0, 0.0);
        Accumulator {
            grid,
            material,
            epsilon,
            last,
        }
    }

    pub fn current(&self) -> DiagnosticsRecord {
        self.last
    }

    pub fn advance(&mut self, s: &State) -> DiagnosticsRecord {
        let r = rates(s, self.grid, self.material, self.epsilon);
        let dt = s.t - self.last.t;
        let p = &self.last;
        let diss = p.dissipation_accum + 0.5 * dt * (p.theta_x_sq + r.theta_x_sq);
        let eps = p.eps_dissipation_accum + 0.5 * dt * (p.eps_rate + r.eps_rate);
        let txx = p.theta_xx_accum + 0.5 * dt * (p.theta_xx_sq + r.theta_xx_sq);
        self.last = snapshot(s, self.grid, self.material, &r, diss, eps, txx);
        self.last
    }
}

fn snapshot(
    s: &State,
    grid: &Grid,
    material: &Material,
    r: &Rates,
    diss: f64,
    eps: f64,
    txx: f64,
) -> DiagnosticsRecord {
    let th = s.theta.values();
    DiagnosticsRecord {
        t: s.t,
        energy: energy(s, grid),
        theta_mass: grid.integrate(th),
        theta_min: th.iter().copied().fold(f64::INFINITY, f64::min),
        theta_max: th.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        hfunc: hfunc(s, grid, material),
        dissipation_accum: diss,
        eps_dissipation_accum: eps,
        theta_xx_accum: txx,
        theta_x_sq: r.theta_x_sq,
        theta_xx_sq: r.theta_xx_sq,
        eps_rate: r.eps_rate,
        mass_flux: r.mass_flux,
    }
}

/// Time series `r(t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub t: Vec<f64>,
    pub r: Vec<f64>,
}

impl Series {
    pub fn max_abs(&self) -> f64 {
        self.r.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// `r(t) = E(t) - E(0) + ε∫₀ᵗ(‖v_xx‖² + ‖u_xx‖²)`.
pub fn energy_identity_residual(traj: &Trajectory) -> Series {
    let e0 = traj.records.first().map_or(0.0, |r| r.energy);
    Series {
        t: traj.records.iter().map(|r| r.t).collect(),
        r: traj
            .records
            .iter()
            .map(|r| r.energy - e0 + r.eps_dissipation_accum)
            .collect(),
    }
}

/// `r(t) = ∫Θ(t) - ∫Θ₀ - ∫₀ᵗ∫ f'(Θ)Θ_x v`, over the recorded snapshots.
pub fn mass_identity_residual(traj: &Trajectory, material: &Material) -> Series {
    let g = &traj.grid;
    let h = g.h();
    let mut buf = vec![0.0; g.len()];
    let mut flux = |s: &State| -> f64 {
        let f: Vec<f64> = s
            .theta
            .values()
            .iter()
            .map(|&t| material.f_clamped(t))
            .collect();
        dx_into(&f, BcKind::NeumannZero, h, &mut buf);
        g.inner(&buf, s.v.values())
    };
    let mut t = Vec::with_capacity(traj.states.len());
    let mut r = Vec::with_capacity(traj.states.len());
    let Some(first) = traj.states.first() else {
        return Series { t, r };
    };
    let m0 = g.integrate(first.theta.values());
    let mut acc = 0.0;
    let mut prev = (first.t, flux(first));
    for s in &traj.states {
        let q = flux(s);
        acc += 0.5 * (s.t - prev.0) * (prev.1 + q);
        prev = (s.t, q);
        t.push(s.t);
        r.push(g.integrate(s.theta.values()) - m0 - acc);
    }
    Series { t, r }
}

/// Squared difference norms between two trajectories on a common timeline.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct DifferenceNorms {
    /// `sup_t ‖v - v̂‖²`.
    pub sup_v_l2: f64,
    /// `sup_t ‖u_x - û_x‖²`.
    pub sup_ux_l2: f64,
    /// `sup_t ‖Θ - Θ̂‖²`.
    pub sup_theta_l2: f64,
    /// `∫₀ᵀ ‖Θ_x - Θ̂_x‖²`.
    pub thetax_l2l2: f64,
    /// `sup_t` of the sum of the three squared norms.
    pub sup_sum: f64,
}

impl DifferenceNorms {
    /// `sup_sum + thetax_l2l2`.
    pub fn total(&self) -> f64 {
        self.sup_sum + self.thetax_l2l2
    }
}

/// Three squared norms of the difference of two states.
pub fn state_difference_sq(a: &State, b: &State, grid: &Grid) -> [f64; 3] {
    let diff = |p: &[f64], q: &[f64]| -> Vec<f64> { p.iter().zip(q).map(|(x, y)| x - y).collect() };
    let dv = diff(a.v.values(), b.v.values());
    let du = diff(a.u.values(), b.u.values());
    let dt = diff(a.theta.values(), b.theta.values());
    [grid.norm_sq(&dv), grad_sq(&du, grid.h()), grid.norm_sq(&dt)]
}

pub fn difference_norms(a: &Trajectory, b: &Trajectory) -> Result<DifferenceNorms> {
    if !a.grid.same_as(&b.grid) {
        return Err(Error::Structural(format!(
            "trajectories live on different grids ({} and {} cells)",
            a.grid.n_cells(),
            b.grid.n_cells()
        )));
    }
    if a.states.len() != b.states.len() {
        return Err(Error::Structural(format!(
            "trajectories have {} and {} snapshots",
            a.states.len(),
            b.states.len()
        )));
    }
    let g = &a.grid;
    let mut out = DifferenceNorms::default();
    let mut prev: Option<(f64, f64)> = None;
    for (sa, sb) in a.states.iter().zip(&b.states) {
        if (sa.t - sb.t).abs() > 1e-12 * sa.t.abs().max(1.0) {
            return Err(Error::Structural(format!(
                "snapshot times differ: {} vs {}",
                sa.t, sb.t
            )));
        }
        let [v, ux, th] = state_difference_sq(sa, sb, g);
        out.sup_v_l2 = out.sup_v_l2.max(v);
        out.sup_ux_l2 = out.sup_ux_l2.max(ux);
        out.sup_theta_l2 = out.sup_theta_l2.max(th);
        out.sup_sum = out.sup_sum.max(v + ux + th);
        let dth: Vec<f64> = sa
            .theta
            .values()
            .iter()
            .zip(sb.theta.values())
            .map(|(x, y)| x - y)
            .collect();
        let q = grad_sq(&dth, g.h());
        if let Some((t0, q0)) = prev {
            out.thetax_l2l2 += 0.5 * (sa.t - t0) * (q0 + q);
        }
        prev = Some((sa.t, q));
    }
    Ok(out)
}

/// Keep every `space`-th node and every `time`-th snapshot. The per-step
/// record stream is dropped because it no longer matches the snapshots.
pub fn restrict_trajectory(traj: &Trajectory, space: usize, time: usize) -> Result<Trajectory> {
    if time == 0 {
        return Err(Error::Structural("time stride must be positive".into()));
    }
    let grid = traj.grid.coarsen(space)?;
    let states = traj
        .states
        .iter()
        .step_by(time)
        .map(|s| {
            State::new(
                s.t,
                s.v.restrict(space)?,
                s.u.restrict(space)?,
                s.theta.restrict(space)?,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Trajectory {
        grid,
        material: traj.material.clone(),
        epsilon: traj.epsilon,
        states,
        records: Vec::new(),
    })
}

/// Spatial factor of a weak-form test function.
#[derive(Debug, Clone, PartialEq)]
pub enum SpaceTest {
    /// `P(s) exp(-1/(1-s²))` with `s = (x - center)/radius`, zero for `|s| ≥ 1`.
    Bump {
        center: f64,
        radius: f64,
        poly: Vec<f64>,
    },
    /// `cos(kπ(x-a)/|Ω|)`; not compactly supported in space.
    Cosine { k: usize },
}

/// Time factor `Q(t) B(t/t_c)` with `B(σ) = exp(-σ²/(1-σ²))` on `[0, 1)` and
/// zero beyond.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeTest {
    pub cutoff: f64,
    pub poly: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TestFunction {
    pub space: SpaceTest,
    pub time: TimeTest,
}

/// `(p, p', p'')` of a polynomial with coefficients in increasing degree.
fn poly3(c: &[f64], x: f64) -> (f64, f64, f64) {
    let (mut p, mut d1, mut d2) = (0.0, 0.0, 0.0);
    for &a in c.iter().rev() {
        d2 = d2 * x + 2.0 * d1;
        d1 = d1 * x + p;
        p = p * x + a;
    }
    (p, d1, d2)
}

impl SpaceTest {
    /// `(X, X')` at `x`.
    pub fn eval(&self, x: f64, grid: &Grid) -> (f64, f64) {
        match self {
            SpaceTest::Bump {
                center,
                radius,
                poly,
            } => {
                let s = (x - center) / radius;
                if s.abs() >= 1.0 {
                    return (0.0, 0.0);
                }
                let q = 1.0 - s * s;
                let b = (-1.0 / q).exp();
                let db = b * (-2.0 * s / (q * q));
                let (p, dp, _) = poly3(poly, s);
                (p * b, (dp * b + p * db) / radius)
            }
            SpaceTest::Cosine { k } => {
                let w = std::f64::consts::PI * *k as f64 / grid.width();
                let a = w * (x - grid.a());
                (a.cos(), -w * a.sin())
            }
        }
    }

    fn compactly_supported_in(&self, grid: &Grid) -> bool {
        match self {
            SpaceTest::Bump { center, radius, .. } => {
                *radius > 0.0 && center - radius > grid.a() && center + radius < grid.b()
            }
            SpaceTest::Cosine { .. } => false,
        }
    }
}

impl TimeTest {
    /// `(τ, τ', τ'')` at `t`.
    pub fn eval(&self, t: f64) -> (f64, f64, f64) {
        let s = t / self.cutoff;
        if s >= 1.0 {
            return (0.0, 0.0, 0.0);
        }
        let q = 1.0 - s * s;
        let g1 = -2.0 * s / (q * q);
        let g2 = -2.0 / (q * q) - 8.0 * s * s / (q * q * q);
        let b = (-s * s / q).exp();
        let (db, ddb) = (
            b * g1 / self.cutoff,
            b * (g1 * g1 + g2) / (self.cutoff * self.cutoff),
        );
        let (p, dp, ddp) = poly3(&self.poly, t);
        (p * b, dp * b + p * db, ddp * b + 2.0 * dp * db + p * ddb)
    }
}

/// Fixed-seed bank of compactly supported test functions.
pub fn test_bank(grid: &Grid, t_end: f64, count: usize, seed: u64) -> Vec<TestFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (a, w) = (grid.a(), grid.width());
    (0..count)
        .map(|_| {
            let center = a + w * rng.gen_range(0.3..0.7);
            let room = (center - a).min(grid.b() - center);
            let radius = room * rng.gen_range(0.6..0.95);
            let poly = vec![1.0, rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
            let cutoff = t_end * rng.gen_range(0.6..1.0);
            let tpoly = vec![1.0, rng.gen_range(-1.0..1.0)];
            TestFunction {
                space: SpaceTest::Bump {
                    center,
                    radius,
                    poly,
                },
                time: TimeTest {
                    cutoff,
                    poly: tpoly,
                },
            }
        })
        .collect()
}

/// Residuals of the two weak identities, one entry per test function.
#[derive(Debug, Clone, PartialEq)]
pub struct WeakResiduals {
    pub wu: Vec<f64>,
    pub wt: Vec<f64>,
}

impl WeakResiduals {
    pub fn max_wu(&self) -> f64 {
        self.wu.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_wt(&self) -> f64 {
        self.wt.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Evaluate both sides of the displacement and temperature weak identities
/// by trapezoid quadrature in space and time over the recorded snapshots.
///
/// ```text
/// wu: ∫∫u φ_tt - ∫u₀ₜ φ(0) + ∫u₀ φ_t(0) + ∫∫u_x φ_x + ∫∫f'(Θ)Θ_x φ
/// wt: -∫∫Θ φ_t - ∫Θ₀ φ(0) + ∫∫Θ_x φ_x - ∫∫f'(Θ)Θ_x u_t φ - ∫∫f(Θ) u_t φ_x
/// ```
///
/// Test functions must be compactly supported inside the interval (required
/// by the displacement identity) and vanish before the final snapshot time.
pub fn weak_form_residual(
    traj: &Trajectory,
    material: &Material,
    bank: &[TestFunction],
) -> Result<WeakResiduals> {
    let g = &traj.grid;
    let t_end = traj.states.last().map_or(0.0, |s| s.t);
    for (k, tf) in bank.iter().enumerate() {
        if !tf.space.compactly_supported_in(g) {
            return Err(Error::Contract(format!(
                "test function {k} is not compactly supported inside the interval"
            )));
        }
        if !(tf.time.cutoff > 0.0 && tf.time.cutoff <= t_end * (1.0 + 1e-12)) {
            return Err(Error::Contract(format!(
                "test function {k}: time cutoff {} must lie in (0, {t_end}]",
                tf.time.cutoff
            )));
        }
    }
    let h = g.h();
    let n = g.len();
    // per-snapshot spatial integrands, shared across test functions
    struct Slice {
        t: f64,
        u: Vec<f64>,
        ux: Vec<f64>,
        v: Vec<f64>,
        th: Vec<f64>,
        thx: Vec<f64>,
        f: Vec<f64>,
        fx: Vec<f64>,
    }
    let slices: Vec<Slice> = traj
        .states
        .iter()
        .map(|s| {
            let mut ux = vec![0.0; n];
            dx_into(s.u.values(), BcKind::DirichletZero, h, &mut ux);
            let mut thx = vec![0.0; n];
            dx_into(s.theta.values(), BcKind::NeumannZero, h, &mut thx);
            let f: Vec<f64> = s
                .theta
                .values()
                .iter()
                .map(|&t| material.f_clamped(t))
                .collect();
            let mut fx = vec![0.0; n];
            dx_into(&f, BcKind::NeumannZero, h, &mut fx);
            Slice {
                t: s.t,
                u: s.u.values().to_vec(),
                ux,
                v: s.v.values().to_vec(),
                th: s.theta.values().to_vec(),
                thx,
                f,
                fx,
            }
        })
        .collect();
    let mut wu = Vec::with_capacity(bank.len());
    let mut wt = Vec::with_capacity(bank.len());
    for tf in bank {
        let xs: Vec<(f64, f64)> = (0..n).map(|i| tf.space.eval(g.x(i), g)).collect();
        let x0: Vec<f64> = xs.iter().map(|p| p.0).collect();
        let x1: Vec<f64> = xs.iter().map(|p| p.1).collect();
        let mut acc_u = 0.0;
        let mut acc_t = 0.0;
        let mut prev: Option<(f64, f64, f64)> = None;
        for sl in &slices {
            let (tau, dtau, ddtau) = tf.time.eval(sl.t);
            let mut iu = 0.0;
            let mut it = 0.0;
            for i in 0..n {
                let w = g.weight(i);
                let (phi, phix) = (x0[i] * tau, x1[i] * tau);
                let (phit, phitt) = (x0[i] * dtau, x0[i] * ddtau);
                iu += w * (sl.u[i] * phitt + sl.ux[i] * phix + sl.fx[i] * phi);
                it += w
                    * (-sl.th[i] * phit + sl.thx[i] * phix
                        - sl.fx[i] * sl.v[i] * phi
                        - sl.f[i] * sl.v[i] * phix);
            }
            if let Some((t0, pu, pt)) = prev {
                acc_u += 0.5 * (sl.t - t0) * (pu + iu);
                acc_t += 0.5 * (sl.t - t0) * (pt + it);
            }
            prev = Some((sl.t, iu, it));
        }
        if let Some(s0) = slices.first() {
            let (tau, dtau, _) = tf.time.eval(s0.t);
            for i in 0..n {
                let w = g.weight(i);
                acc_u += w * (-s0.v[i] * x0[i] * tau + s0.u[i] * x0[i] * dtau);
                acc_t -= w * s0.th[i] * x0[i] * tau;
            }
        }
        wu.push(acc_u);
        wt.push(acc_t);
    }
    Ok(WeakResiduals { wu, wt })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::init;
    use crate::solver::{run, SolverConfig};

    #[test]
    fn time_cutoff_derivatives_match_finite_differences() {
        let tt = TimeTest {
            cutoff: 0.8,
            poly: vec![1.0, -0.4, 0.3],
        };
        let h = 1e-5;
        for k in 1..70 {
            let t = k as f64 * 0.01;
            let (_, d1, d2) = tt.eval(t);
            let fd1 = (tt.eval(t + h).0 - tt.eval(t - h).0) / (2.0 * h);
            let fd2 = (tt.eval(t + h).1 - tt.eval(t - h).1) / (2.0 * h);
            assert!((fd1 - d1).abs() < 1e-6 * d1.abs().max(1.0), "t = {t}");
            assert!((fd2 - d2).abs() < 1e-5 * d2.abs().max(1.0), "t = {t}");
        }
    }

    #[test]
    fn bump_derivative_matches_finite_difference() {
        let g = Grid::unit(16).unwrap();
        let sp = SpaceTest::Bump {
            center: 0.45,
            radius: 0.3,
            poly: vec![1.0, 0.5, -0.2],
        };
        let h = 1e-6;
        for k in 1..60 {
            let x = 0.16 + k as f64 * 0.0095;
            let fd = (sp.eval(x + h, &g).0 - sp.eval(x - h, &g).0) / (2.0 * h);
            let d = sp.eval(x, &g).1;
            assert!((fd - d).abs() < 1e-6 * d.abs().max(1.0));
        }
    }

    #[test]
    fn polynomial_helper() {
        let (p, d1, d2) = poly3(&[1.0, 2.0, 3.0], 2.0);
        assert_eq!((p, d1, d2), (17.0, 14.0, 6.0));
    }

    #[test]
    fn equilibrium_trajectory_has_zero_energy_residual() {
        let g = Grid::unit(32).unwrap();
        let m = Material::identity();
        let cfg = SolverConfig::for_grid(&g, 0.0, 0.25);
        let traj = run(&init::equilibrium(&g, 1.5).unwrap(), &m, &cfg, &g).unwrap();
        assert!(energy_identity_residual(&traj).max_abs() <= 1e-13);
        assert!(mass_identity_residual(&traj, &m).max_abs() <= 1e-13);
    }

    #[test]
    fn zero_solution_has_zero_weak_residuals() {
        let g = Grid::unit(32).unwrap();
        let m = Material::identity();
        let cfg = SolverConfig::for_grid(&g, 0.0, 0.5);
        let traj = run(&init::zero(&g), &m, &cfg, &g).unwrap();
        let r = weak_form_residual(&traj, &m, &test_bank(&g, 0.5, 10, 1)).unwrap();
        assert_eq!(r.max_wu(), 0.0);
        assert_eq!(r.max_wt(), 0.0);
    }

    #[test]
    fn non_compact_test_function_is_rejected() {
        let g = Grid::unit(32).unwrap();
        let m = Material::identity();
        let cfg = SolverConfig::for_grid(&g, 0.0, 0.5);
        let traj = run(&init::zero(&g), &m, &cfg, &g).unwrap();
        let bad = TestFunction {
            space: SpaceTest::Cosine { k: 1 },
            time: TimeTest {
                cutoff: 0.5,
                poly: vec![1.0],
            },
        };
        assert!(matches!(
            weak_form_residual(&traj, &m, &[bad]),
            Err(Error::Contract(_))
        ));
        let leaky = TestFunction {
            space: SpaceTest::Bump {
                center: 0.1,
                radius: 0.2,
                poly: vec![1.0],
            },
            time: TimeTest {
                cutoff: 0.5,
                poly: vec![1.0],
            },
        };
        assert!(weak_form_residual(&traj, &m, &[leaky]).is_err());
    }

    #[test]
    fn equilibrium_satisfies_temperature_identity() {
        let g = Grid::unit(32).unwrap();
        let m = Material::identity();
        let bank = test_bank(&g, 0.5, 10, 2);
        let wt = |dt: f64| {
            let cfg = SolverConfig::for_grid(&g, 0.0, 0.5).with_dt(dt);
            let traj = run(&init::equilibrium(&g, 2.0).unwrap(), &m, &cfg, &g).unwrap();
            let r = weak_form_residual(&traj, &m, &bank).unwrap();
            assert!(r.max_wu() <= 1e-15);
            r.max_wt()
        };
        // only the time quadrature of the test function is left
        let (coarse, fine) = (wt(1.0 / 1024.0), wt(1.0 / 2048.0));
        assert!(coarse < 1e-6 && fine < coarse / 3.5, "{coarse} {fine}");
    }

    #[test]
    fn difference_norms_of_identical_runs_vanish() {
        let g = Grid::unit(32).unwrap();
        let m = Material::identity();
        let cfg = SolverConfig::for_grid(&g, 0.0, 0.2);
        let s = init::smooth_reference(&g).unwrap();
        let a = run(&s, &m, &cfg, &g).unwrap();
        let d = difference_norms(&a, &a).unwrap();
        assert_eq!(d, DifferenceNorms::default());
        let z = run(&init::zero(&g), &m, &cfg, &g).unwrap();
        let d = difference_norms(&a, &z).unwrap();
        let own = a
            .states
            .iter()
            .map(|s| grid_energy_like(s, &g))
            .fold(0.0, f64::max);
        assert!((d.sup_sum - own).abs() <= 1e-14 * own);
        let short = run(&s, &m, &SolverConfig::for_grid(&g, 0.0, 0.1), &g).unwrap();
        assert!(matches!(
            difference_norms(&a, &short),
            Err(Error::Structural(_))
        ));
    }

    fn grid_energy_like(s: &State, g: &Grid) -> f64 {
        g.norm_sq(s.v.values()) + grad_sq(s.u.values(), g.h()) + g.norm_sq(s.theta.values())
    }

    #[test]
    fn dissipation_accumulator_matches_trapezoid_of_series() {
        let g = Grid::unit(64).unwrap();
        let m = Material::log1p();
        let cfg = SolverConfig::for_grid(&g, 0.0, 0.3);
        let traj = run(&init::smooth_reference(&g).unwrap(), &m, &cfg, &g).unwrap();
        let mut acc = 0.0;
        for w in traj.records.windows(2) {
            acc += 0.5 * (w[1].t - w[0].t) * (w[0].theta_x_sq + w[1].theta_x_sq);
        }
        let last = traj.records.last().unwrap().dissipation_accum;
        assert!((acc - last).abs() <= 1e-12 * last.max(1.0));
        for w in traj.records.windows(2) {
            assert!(w[1].dissipation_accum >= w[0].dissipation_accum);
            assert!(w[1].hfunc.unwrap() >= 1.0);
        }
    }

    #[test]
    fn hfunc_is_flagged_below_floor() {
        let g = Grid::unit(16).unwrap();
        let s = init::zero(&g);
        assert!(hfunc(&s, &g, &Material::identity()).is_none());
        let s = init::equilibrium(&g, 1.0).unwrap();
        assert_eq!(hfunc(&s, &g, &Material::identity()), Some(1.0));
    }
}
