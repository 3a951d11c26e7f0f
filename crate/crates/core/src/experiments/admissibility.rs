//! Randomized check of the two difference inequalities controlled by `Γ₁`.
//!
//! For `(v, Θ)`, `(v̂, Θ̂)` with `‖v̂‖ + ‖Θ‖₁ ≤ K`:
//!
//! ```text
//! (a)  -∫(f'(Θ)Θ_x - f'(Θ̂)Θ̂_x)(v - v̂)
//! (b)   ∫(f'(Θ)Θ_x v - f'(Θ̂)Θ̂_x v̂)(Θ - Θ̂) + ∫(f(Θ)v - f(Θ̂)v̂)(Θ_x - Θ̂_x)
//!      ≤ η∫(Θ_x - Θ̂_x)² + Γ₁(η,K)(1 + ∫Θ_x²)(∫(v - v̂)² + ∫(Θ - Θ̂)²)
//! ```
//!
//! Fields are the piecewise-linear interpolants of nodal values: the left-hand
//! sides use cell midpoints with exact cell gradients, the right-hand side
//! trapezoid `L²` norms and exact gradient norms.

use super::{gn_for, impl_report, Check, Table};
use crate::bounds::{gamma1, BaseConstants};
use crate::error::Result;
use crate::grid::{grad_sq, Grid};
use crate::material::Material;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdmissibilityReport {
    pub material: String,
    pub gamma1: f64,
    pub tuples: usize,
    pub violations_a: usize,
    pub violations_b: usize,
    pub max_ratio_a: f64,
    pub max_ratio_b: f64,
    pub checks: Vec<Check>,
    pub tables: Vec<Table>,
}

impl_report!(AdmissibilityReport, "gamma1-admissibility");

struct Tuple {
    v: Vec<f64>,
    vh: Vec<f64>,
    th: Vec<f64>,
    thh: Vec<f64>,
}

fn sine_series(grid: &Grid, rng: &mut ChaCha8Rng, scale: f64) -> Vec<f64> {
    let modes = rng.gen_range(1..=8);
    let coef: Vec<f64> = (1..=modes)
        .map(|k| rng.gen_range(-1.0..1.0) / k as f64)
        .collect();
    let (a, w) = (grid.a(), grid.width());
    let mut v = grid.sample(|x| {
        coef.iter()
            .enumerate()
            .map(|(k, c)| c * ((k + 1) as f64 * PI * (x - a) / w).sin())
            .sum::<f64>()
            * scale
    });
    let n = v.len() - 1;
    v[0] = 0.0;
    v[n] = 0.0;
    v
}

/// Nonnegative cosine series.
fn cosine_series(grid: &Grid, rng: &mut ChaCha8Rng, scale: f64) -> Vec<f64> {
    let modes = rng.gen_range(1..=8);
    let coef: Vec<f64> = (1..=modes)
        .map(|k| rng.gen_range(-1.0..1.0) / k as f64)
        .collect();
    let floor: f64 = coef.iter().map(|c| c.abs()).sum::<f64>() * rng.gen_range(1.0..2.0);
    let (a, w) = (grid.a(), grid.width());
    grid.sample(|x| {
        (floor
            + coef
                .iter()
                .enumerate()
                .map(|(k, c)| c * ((k + 1) as f64 * PI * (x - a) / w).cos())
                .sum::<f64>())
        .max(0.0)
            * scale
    })
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo.ln()..hi.ln())).exp()
}

fn draw(grid: &Grid, rng: &mut ChaCha8Rng, k: f64) -> Tuple {
    let s = log_uniform(rng, 1e-2, 2.0);
    let vh = sine_series(grid, rng, s);
    let s = log_uniform(rng, 1e-2, 2.0);
    let th = cosine_series(grid, rng, s);
    let (v, thh) = if rng.gen_bool(0.5) {
        // nearby pair
        let d = log_uniform(rng, 1e-4, 0.5);
        let pv = sine_series(grid, rng, d);
        let pt = cosine_series(grid, rng, d);
        let v: Vec<f64> = vh.iter().zip(&pv).map(|(a, b)| a + b).collect();
        let thh: Vec<f64> = th.iter().zip(&pt).map(|(a, b)| a + b).collect();
        (v, thh)
    } else {
        let s = log_uniform(rng, 1e-2, 2.0);
        let v = sine_series(grid, rng, s);
        let s = log_uniform(rng, 1e-2, 2.0);
        (v, cosine_series(grid, rng, s))
    };
    // rescale v̂ and Θ (and their partners, to keep nearby pairs nearby) onto ‖v̂‖ + ‖Θ‖₁ = target
    let target = k * rng.gen_range(0.05..1.0);
    let size = grid.norm_sq(&vh).sqrt() + grid.integrate(&th);
    let lam = target / size;
    let sc = |x: Vec<f64>| -> Vec<f64> { x.into_iter().map(|y| y * lam).collect() };
    Tuple {
        v: sc(v),
        vh: sc(vh),
        th: sc(th),
        thh: sc(thh),
    }
}

/// `(lhs_a, lhs_b, rhs)` for one tuple.
fn sides(grid: &Grid, m: &Material, eta: f64, g1: f64, t: &Tuple) -> (f64, f64, f64) {
    let h = grid.h();
    let mut la = 0.0;
    let mut lb = 0.0;
    for i in 0..grid.n_cells() {
        let mid = |x: &[f64]| 0.5 * (x[i] + x[i + 1]);
        let grad = |x: &[f64]| (x[i + 1] - x[i]) / h;
        let (th, thh) = (mid(&t.th), mid(&t.thh));
        let (v, vh) = (mid(&t.v), mid(&t.vh));
        let (tx, thx) = (grad(&t.th), grad(&t.thh));
        let (f, fp, _) = m.eval_all(th);
        let (fh, fph, _) = m.eval_all(thh);
        la -= h * (fp * tx - fph * thx) * (v - vh);
        lb += h * ((fp * tx * v - fph * thx * vh) * (th - thh) + (f * v - fh * vh) * (tx - thx));
    }
    let dv: Vec<f64> = t.v.iter().zip(&t.vh).map(|(a, b)| a - b).collect();
    let dt: Vec<f64> = t.th.iter().zip(&t.thh).map(|(a, b)| a - b).collect();
    let rhs = eta * grad_sq(&dt, h)
        + g1 * (1.0 + grad_sq(&t.th, h)) * (grid.norm_sq(&dv) + grid.norm_sq(&dt));
    (la, lb, rhs)
}

pub fn gamma1_admissibility(
    grid: &Grid,
    material: &Material,
    eta: f64,
    k: f64,
    tuples: usize,
    seed: u64,
) -> Result<AdmissibilityReport> {
    let base = BaseConstants::new(gn_for(grid)?, material, grid.width());
    let g1 = gamma1(eta, k, &base)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut table = Table::new("tuples", &["lhs_a", "lhs_b", "rhs", "sum_vhat_theta"]);
    let (mut va, mut vb) = (0, 0);
    let (mut ra, mut rb) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for _ in 0..tuples {
        let t = draw(grid, &mut rng, k);
        let (la, lb, rhs) = sides(grid, material, eta, g1, &t);
        va += usize::from(la > rhs);
        vb += usize::from(lb > rhs);
        ra = ra.max(la / rhs);
        rb = rb.max(lb / rhs);
        table.push(vec![
            la,
            lb,
            rhs,
            grid.norm_sq(&t.vh).sqrt() + grid.integrate(&t.th),
        ]);
    }
    let checks = vec![
        Check::new(
            format!(
                "momentum-difference inequality, f = {}",
                material.kind().name()
            ),
            va == 0,
            format!("{va} violations in {tuples}, max LHS/RHS {ra:.3e}"),
        ),
        Check::new(
            format!("heat-difference inequality, f = {}", material.kind().name()),
            vb == 0,
            format!("{vb} violations in {tuples}, max LHS/RHS {rb:.3e}"),
        ),
    ];
    Ok(AdmissibilityReport {
        material: material.kind().name().to_string(),
        gamma1: g1,
        tuples,
        violations_a: va,
        violations_b: vb,
        max_ratio_a: ra,
        max_ratio_b: rb,
        checks,
        tables: vec![table],
    })
}
