//! Uniform collocated grid, difference operators with ghost-node closures, and
//! quadrature.
//!
//! All three unknowns live on the same `n_cells + 1` nodes. Boundary behaviour
//! is carried by [`BcKind`]:
//!
//! * `DirichletZero`: boundary values are exactly zero (displacement).
//! * `NeumannZero`: zero flux, closed by the reflected ghost `f[-1] = f[1]` (temperature).
//! * `Hinged`: `f = f_xx = 0`, closed by the antisymmetric ghost `f[-1] = -f[1]` (velocity).
//!
//! Integrals use the trapezoid rule. With these closures the second-difference
//! operators are symmetric in the trapezoid inner product, which is what makes
//! the discrete energy and mass bookkeeping close exactly.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Uniform mesh of the interval `(a, b)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    a: f64,
    b: f64,
    n_cells: usize,
    h: f64,
}

impl Grid {
    pub fn new(a: f64, b: f64, n_cells: usize) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) || b <= a {
            return Err(Error::Contract(format!(
                "grid requires finite a < b, got a = {a}, b = {b}"
            )));
        }
        if n_cells < 4 {
            return Err(Error::Contract(format!(
                "grid requires at least 4 cells, got {n_cells}"
            )));
        }
        Ok(Grid {
            a,
            b,
            n_cells,
            h: (b - a) / n_cells as f64,
        })
    }

    /// Grid on the unit interval.
    pub fn unit(n_cells: usize) -> Result<Self> {
        Grid::new(0.0, 1.0, n_cells)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Interval length `|Ω|`.
    pub fn width(&self) -> f64 {
        self.b - self.a
    }

    /// Number of nodes, `n_cells + 1`.
    pub fn len(&self) -> usize {
        self.n_cells + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Position of node `i`, computed as `a + i h` so it is exact up to one rounding.
    pub fn x(&self, i: usize) -> f64 {
        self.a + i as f64 * self.h
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.x(i)).collect()
    }

    /// Sample `f` at every node.
    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        (0..self.len()).map(|i| f(self.x(i))).collect()
    }

    /// Trapezoid weight of node `i`.
    pub fn weight(&self, i: usize) -> f64 {
        if i == 0 || i == self.n_cells {
            0.5 * self.h
        } else {
            self.h
        }
    }

    /// Trapezoid integral of nodal values.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.len());
        trapezoid(values, self.h)
    }

    /// Trapezoid inner product.
    pub fn inner(&self, f: &[f64], g: &[f64]) -> f64 {
        debug_assert_eq!(f.len(), self.len());
        debug_assert_eq!(g.len(), self.len());
        let n = f.len() - 1;
        let interior: f64 = (1..n).map(|i| f[i] * g[i]).sum();
        self.h * (interior + 0.5 * (f[0] * g[0] + f[n] * g[n]))
    }

    /// Squared trapezoid L² norm.
    pub fn norm_sq(&self, f: &[f64]) -> f64 {
        self.inner(f, f)
    }

    /// Coarser grid with `n_cells / factor` cells, sharing every `factor`-th node.
    pub fn coarsen(&self, factor: usize) -> Result<Grid> {
        if factor == 0 || !self.n_cells.is_multiple_of(factor) {
            return Err(Error::Structural(format!(
                "cannot coarsen {} cells by factor {factor}",
                self.n_cells
            )));
        }
        Grid::new(self.a, self.b, self.n_cells / factor)
    }

    /// Whether two grids describe the same mesh.
    pub fn same_as(&self, other: &Grid) -> bool {
        self.n_cells == other.n_cells
            && (self.a - other.a).abs() <= 1e-14 * self.width()
            && (self.b - other.b).abs() <= 1e-14 * self.width()
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.len() {
            return Err(Error::Structural(format!(
                "field has {len} values, grid has {} nodes",
                self.len()
            )));
        }
        Ok(())
    }
}

/// Boundary closure attached to a nodal field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BcKind {
    DirichletZero,
    NeumannZero,
    /// Value and second derivative vanish.
    Hinged,
}

/// Nodal values together with their boundary closure.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    values: Vec<f64>,
    bc: BcKind,
}

impl Field {
    /// Wrap nodal values. Dirichlet and hinged fields must vanish at both ends.
    pub fn new(values: Vec<f64>, bc: BcKind) -> Result<Self> {
        if values.len() < 5 {
            return Err(Error::Structural(format!(
                "field needs at least 5 nodes, got {}",
                values.len()
            )));
        }
        if matches!(bc, BcKind::DirichletZero | BcKind::Hinged) {
            let (first, last) = (values[0], values[values.len() - 1]);
            if first != 0.0 || last != 0.0 {
                return Err(Error::Contract(format!(
                    "{bc:?} field must vanish at the boundary, got {first:e} and {last:e}"
                )));
            }
        }
        Ok(Field { values, bc })
    }

    /// Sample `f` on the grid. Boundary values of Dirichlet and hinged fields are set to zero.
    pub fn from_fn(grid: &Grid, bc: BcKind, f: impl Fn(f64) -> f64) -> Self {
        let mut values = grid.sample(f);
        if matches!(bc, BcKind::DirichletZero | BcKind::Hinged) {
            let n = values.len() - 1;
            values[0] = 0.0;
            values[n] = 0.0;
        }
        Field { values, bc }
    }

    pub fn zeros(grid: &Grid, bc: BcKind) -> Self {
        Field {
            values: vec![0.0; grid.len()],
            bc,
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn bc(&self) -> BcKind {
        self.bc
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Every `factor`-th value, for comparison on a coarser grid.
    pub fn restrict(&self, factor: usize) -> Result<Field> {
        if factor == 0 || !(self.values.len() - 1).is_multiple_of(factor) {
            return Err(Error::Structural(format!(
                "cannot restrict {} nodes by factor {factor}",
                self.values.len()
            )));
        }
        Ok(Field {
            values: self.values.iter().step_by(factor).copied().collect(),
            bc: self.bc,
        })
    }
}

/// Trapezoid rule over uniformly spaced values.
pub fn trapezoid(values: &[f64], h: f64) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        len => {
            let n = len - 1;
            let interior: f64 = values[1..n].iter().sum();
            h * (interior + 0.5 * (values[0] + values[n]))
        }
    }
}

/// Cell-difference gradient energy `Σ h ((f[i+1] - f[i]) / h)²`, the exact
/// `∫ |f_x|²` of the piecewise-linear interpolant.
pub fn grad_sq(values: &[f64], h: f64) -> f64 {
    values
        .windows(2)
        .map(|w| {
            let d = w[1] - w[0];
            d * d
        })
        .sum::<f64>()
        / h
}

/// Like [`grad_sq`] with a per-cell weight evaluated at cell midpoints.
pub fn weighted_grad_sq(values: &[f64], h: f64, weight: impl Fn(f64) -> f64) -> f64 {
    values
        .windows(2)
        .map(|w| {
            let d = w[1] - w[0];
            weight(0.5 * (w[0] + w[1])) * d * d
        })
        .sum::<f64>()
        / h
}

pub(crate) fn dx_into(f: &[f64], bc: BcKind, h: f64, out: &mut [f64]) {
    let n = f.len() - 1;
    let inv2h = 0.5 / h;
    for i in 1..n {
        out[i] = (f[i + 1] - f[i - 1]) * inv2h;
    }
    match bc {
        BcKind::NeumannZero => {
            out[0] = 0.0;
            out[n] = 0.0;
        }
        BcKind::DirichletZero => {
            out[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) * inv2h;
            out[n] = (3.0 * f[n] - 4.0 * f[n - 1] + f[n - 2]) * inv2h;
        }
        BcKind::Hinged => {
            // ghost f[-1] = 2 f[0] - f[1]
            out[0] = (f[1] - f[0]) / h;
            out[n] = (f[n] - f[n - 1]) / h;
        }
    }
}

pub(crate) fn dxx_into(f: &[f64], bc: BcKind, h: f64, out: &mut [f64]) {
    let n = f.len() - 1;
    let inv_h2 = 1.0 / (h * h);
    for i in 1..n {
        out[i] = (f[i + 1] - 2.0 * f[i] + f[i - 1]) * inv_h2;
    }
    match bc {
        BcKind::NeumannZero => {
            out[0] = 2.0 * (f[1] - f[0]) * inv_h2;
            out[n] = 2.0 * (f[n - 1] - f[n]) * inv_h2;
        }
        BcKind::DirichletZero | BcKind::Hinged => {
            out[0] = 0.0;
            out[n] = 0.0;
        }
    }
}

pub(crate) fn dxxxx_hinged_into(f: &[f64], h: f64, out: &mut [f64]) {
    let n = f.len() - 1;
    let inv_h4 = 1.0 / (h * h * h * h);
    // antisymmetric ghosts about a zero boundary value
    let at = |i: isize| -> f64 {
        if i < 0 {
            -f[(-i) as usize]
        } else if i as usize > n {
            -f[2 * n - i as usize]
        } else {
            f[i as usize]
        }
    };
    out[0] = 0.0;
    out[n] = 0.0;
    for i in 1..n {
        let k = i as isize;
        out[i] = (at(k + 2) - 4.0 * at(k + 1) + 6.0 * at(k) - 4.0 * at(k - 1) + at(k - 2)) * inv_h4;
    }
}

/// First derivative: central differences in the interior, boundary closure per [`BcKind`].
pub fn dx(field: &Field, grid: &Grid) -> Result<Field> {
    grid.check_len(field.len())?;
    let mut out = vec![0.0; field.len()];
    dx_into(&field.values, field.bc, grid.h, &mut out);
    // the derivative of a hinged or Dirichlet field does not vanish at the boundary
    let bc = match field.bc {
        BcKind::NeumannZero => BcKind::DirichletZero,
        _ => BcKind::NeumannZero,
    };
    Ok(Field { values: out, bc })
}

/// Second derivative with the three-point stencil.
pub fn dxx(field: &Field, grid: &Grid) -> Result<Field> {
    grid.check_len(field.len())?;
    let mut out = vec![0.0; field.len()];
    dxx_into(&field.values, field.bc, grid.h, &mut out);
    Ok(Field {
        values: out,
        bc: field.bc,
    })
}

/// Fourth derivative of a hinged field (five-point stencil, antisymmetric ghosts).
pub fn dxxxx(field: &Field, grid: &Grid) -> Result<Field> {
    grid.check_len(field.len())?;
    if field.bc != BcKind::Hinged {
        return Err(Error::Contract(format!(
            "dxxxx requires a hinged field, got {:?}",
            field.bc
        )));
    }
    let mut out = vec![0.0; field.len()];
    dxxxx_hinged_into(&field.values, grid.h, &mut out);
    Ok(Field {
        values: out,
        bc: BcKind::Hinged,
    })
}

/// Discrete norms of a nodal field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Norms {
    pub l1: f64,
    pub l2: f64,
    pub linf: f64,
    /// L² norm of [`dx`] of the field.
    pub h1_semi: f64,
}

pub fn norms(field: &Field, grid: &Grid) -> Result<Norms> {
    grid.check_len(field.len())?;
    let abs: Vec<f64> = field.values.iter().map(|v| v.abs()).collect();
    let d = dx(field, grid)?;
    Ok(Norms {
        l1: grid.integrate(&abs),
        l2: grid.norm_sq(&field.values).sqrt(),
        linf: abs.iter().fold(0.0, |m: f64, &v| m.max(v)),
        h1_semi: grid.norm_sq(&d.values).sqrt(),
    })
}

/// Interval embedding constants.
///
/// `c1` satisfies `‖ψ‖∞ ≤ c1 ‖ψ_x‖^½ ‖ψ‖^½ + c1 ‖ψ‖` and `c2` satisfies
/// `‖ψ‖∞² ≤ c2 ‖ψ_x‖² + c2 ‖ψ‖₁²` for every `ψ ∈ W^{1,2}(Ω)`; `c10` satisfies
/// `‖φ‖₄⁴ ≤ c10 ‖φ_x‖ ‖φ‖³` for `φ` vanishing on the boundary.
///
/// They follow from `ψ(x)² ≤ |Ω|⁻¹‖ψ‖² + 2‖ψ‖‖ψ_x‖` and
/// `|ψ(x)| ≤ |Ω|⁻¹‖ψ‖₁ + ∫|ψ_x|`. None of them is sharp.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GnConstants {
    pub c1: f64,
    pub c2: f64,
    pub c10: f64,
}

pub fn gn_constants_for_width(width: f64) -> Result<GnConstants> {
    if !(width.is_finite() && width > 0.0) {
        return Err(Error::Contract(format!(
            "embedding constants need a positive interval length, got {width}"
        )));
    }
    Ok(GnConstants {
        c1: std::f64::consts::SQRT_2.max(width.powf(-0.5)),
        c2: (2.0 * width).max(2.0 / (width * width)),
        c10: 2.0 * 1f64.max(width.powf(-0.5)),
    })
}

pub fn gn_constants(grid: &Grid) -> Result<GnConstants> {
    gn_constants_for_width(grid.width())
}

/// Exact integrals of the piecewise-linear interpolant of nodal data.
pub mod piecewise_linear {
    /// `∫ |ψ|` with sign changes inside a cell handled exactly.
    pub fn l1(values: &[f64], h: f64) -> f64 {
        values
            .windows(2)
            .map(|w| {
                let (p, q) = (w[0], w[1]);
                if p * q >= 0.0 {
                    0.5 * h * (p.abs() + q.abs())
                } else {
                    0.5 * h * (p * p + q * q) / (p.abs() + q.abs())
                }
            })
            .sum()
    }

    /// `∫ ψ²`.
    pub fn l2_sq(values: &[f64], h: f64) -> f64 {
        values
            .windows(2)
            .map(|w| h * (w[0] * w[0] + w[0] * w[1] + w[1] * w[1]) / 3.0)
            .sum()
    }

    /// `max |ψ|`, attained at a node.
    pub fn linf(values: &[f64]) -> f64 {
        values.iter().fold(0.0, |m: f64, &v| m.max(v.abs()))
    }

    /// `∫ ψ_x²`.
    pub fn grad_sq(values: &[f64], h: f64) -> f64 {
        super::grad_sq(values, h)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn neumann(grid: &Grid, f: impl Fn(f64) -> f64) -> Field {
        Field::from_fn(grid, BcKind::NeumannZero, f)
    }

    #[test]
    fn node_positions_are_exact() {
        let g = Grid::new(-0.3, 1.7, 10).unwrap();
        assert!((g.h() - 0.2).abs() < 1e-15);
        for i in 0..g.len() {
            let exact = -0.3 + 0.2 * i as f64;
            assert!((g.x(i) - exact).abs() <= 1e-14 * g.width());
        }
        assert!((g.x(10) - 1.7).abs() <= 1e-14 * 2.0);
    }

    #[test]
    fn degenerate_grids_are_rejected() {
        assert!(matches!(Grid::new(1.0, 1.0, 8), Err(Error::Contract(_))));
        assert!(matches!(Grid::new(2.0, 1.0, 8), Err(Error::Contract(_))));
        assert!(matches!(Grid::new(0.0, 1.0, 2), Err(Error::Contract(_))));
    }

    #[test]
    fn dirichlet_fields_must_vanish_at_boundary() {
        let err = Field::new(vec![0.1, 1.0, 2.0, 1.0, 0.0], BcKind::DirichletZero);
        assert!(matches!(err, Err(Error::Contract(_))));
        let ok = Field::new(vec![0.0, 1.0, 2.0, 1.0, 0.0], BcKind::Hinged);
        assert!(ok.is_ok());
        let g = Grid::unit(8).unwrap();
        let f = Field::from_fn(&g, BcKind::DirichletZero, |x| x + 1.0);
        assert_eq!(f.values()[0], 0.0);
        assert_eq!(f.values()[8], 0.0);
    }

    #[test]
    fn dx_of_constant_vanishes() {
        let g = Grid::unit(16).unwrap();
        let f = neumann(&g, |_| 3.5);
        assert!(dx(&f, &g)
            .unwrap()
            .values()
            .iter()
            .all(|&v| v.abs() < 1e-12));
    }

    #[test]
    fn dx_is_exact_on_linears_in_interior() {
        let g = Grid::unit(10).unwrap();
        let d = dx(&neumann(&g, |x| x), &g).unwrap();
        for i in 1..10 {
            assert!((d.values()[i] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn dx_of_quadratic_at_midpoint() {
        let g = Grid::unit(4).unwrap();
        let d = dx(&neumann(&g, |x| x * x), &g).unwrap();
        // (0.5625 - 0.0625) / (2 * 0.25)
        assert!((d.values()[2] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn dx_boundary_closures() {
        let g = Grid::unit(64).unwrap();
        let d = dx(
            &Field::from_fn(&g, BcKind::DirichletZero, |x| (PI * x).sin()),
            &g,
        )
        .unwrap();
        assert!((d.values()[0] - PI).abs() < 1e-2);
        assert!((d.values()[64] + PI).abs() < 1e-2);
        let d = dx(&Field::from_fn(&g, BcKind::Hinged, |x| (PI * x).sin()), &g).unwrap();
        // the antisymmetric ghost is second order for odd profiles
        assert!((d.values()[0] - PI).abs() < 2.0 * PI.powi(3) / (6.0 * 64.0 * 64.0));
        let d = dx(&neumann(&g, |x| (PI * x).cos()), &g).unwrap();
        assert_eq!(d.values()[0], 0.0);
        assert_eq!(d.values()[64], 0.0);
    }

    #[test]
    fn dxx_examples() {
        let g = Grid::unit(16).unwrap();
        let c = dxx(&neumann(&g, |_| 2.0), &g).unwrap();
        assert!(c.values().iter().all(|v| v.abs() < 1e-9));
        let g = Grid::new(0.0, 3.0, 7).unwrap();
        let q = dxx(&neumann(&g, |x| x * x), &g).unwrap();
        for i in 1..7 {
            assert!((q.values()[i] - 2.0).abs() < 1e-10);
        }
    }

    #[test]
    fn dxx_neumann_reflection() {
        let g = Grid::new(0.0, 5.0, 5).unwrap();
        let f = Field::new(vec![4.0, 1.0, 0.0, 0.0, 0.0, 0.0], BcKind::NeumannZero).unwrap();
        let d = dxx(&f, &g).unwrap();
        assert_eq!(d.values()[0], -6.0);
    }

    #[test]
    fn dxxxx_examples() {
        let g = Grid::unit(32).unwrap();
        let z = dxxxx(&Field::zeros(&g, BcKind::Hinged), &g).unwrap();
        assert!(z.values().iter().all(|&v| v == 0.0));

        let cubic = Field::from_fn(&g, BcKind::Hinged, |x| x * (x - 1.0) * (x + 2.0));
        let d = dxxxx(&cubic, &g).unwrap();
        for i in 2..31 {
            assert!(d.values()[i].abs() < 1e-5, "node {i}: {}", d.values()[i]);
        }

        let g = Grid::unit(64).unwrap();
        let s = Field::from_fn(&g, BcKind::Hinged, |x| (PI * x).sin());
        let d = dxxxx(&s, &g).unwrap();
        let exact = PI.powi(4);
        assert!(((d.values()[32] - exact) / exact).abs() < 0.01);
    }

    #[test]
    fn dxxxx_requires_hinged() {
        let g = Grid::unit(8).unwrap();
        let f = Field::zeros(&g, BcKind::DirichletZero);
        assert!(matches!(dxxxx(&f, &g), Err(Error::Contract(_))));
    }

    #[test]
    fn length_mismatch_is_structural() {
        let g = Grid::unit(8).unwrap();
        let f = Field::zeros(&Grid::unit(16).unwrap(), BcKind::NeumannZero);
        assert!(matches!(dx(&f, &g), Err(Error::Structural(_))));
        assert!(matches!(dxx(&f, &g), Err(Error::Structural(_))));
        assert!(matches!(norms(&f, &g), Err(Error::Structural(_))));
    }

    #[test]
    fn norm_examples() {
        let g = Grid::unit(32).unwrap();
        let n = norms(&neumann(&g, |_| 1.0), &g).unwrap();
        assert!((n.l1 - 1.0).abs() < 1e-14);
        assert!((n.l2 - 1.0).abs() < 1e-14);
        assert!((n.linf - 1.0).abs() < 1e-14);
        let z = norms(&Field::zeros(&g, BcKind::NeumannZero), &g).unwrap();
        assert_eq!((z.l1, z.l2, z.linf, z.h1_semi), (0.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn l2_of_sine_matches_fine_quadrature() {
        // oracle: brute-force midpoint quadrature with 10^6 points
        let m = 1_000_000;
        let oracle: f64 = (0..m)
            .map(|k| {
                let x = (k as f64 + 0.5) / m as f64;
                (PI * x).sin().powi(2)
            })
            .sum::<f64>()
            / m as f64;
        assert!((oracle - 0.5).abs() < 1e-10);
        let g = Grid::unit(256).unwrap();
        let n = norms(
            &Field::from_fn(&g, BcKind::DirichletZero, |x| (PI * x).sin()),
            &g,
        )
        .unwrap();
        assert!((n.l2 - oracle.sqrt()).abs() < 1e-4);
    }

    #[test]
    fn gn_constant_examples() {
        let c = gn_constants_for_width(1.0).unwrap();
        assert!((c.c1 - std::f64::consts::SQRT_2).abs() < 1e-15);
        assert_eq!(c.c2, 2.0);
        let c = gn_constants_for_width(4.0).unwrap();
        assert!((c.c1 - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(c.c2, 8.0);
        let c = gn_constants_for_width(0.25).unwrap();
        assert_eq!(c.c1, 2.0);
        assert_eq!(c.c2, 32.0);
        assert!(matches!(
            gn_constants_for_width(0.0),
            Err(Error::Contract(_))
        ));
        assert!(matches!(
            gn_constants_for_width(-1.0),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn dxx_refinement_order() {
        let errs: Vec<f64> = [32usize, 64, 128, 256]
            .iter()
            .map(|&n| {
                let g = Grid::unit(n).unwrap();
                let f = Field::from_fn(&g, BcKind::DirichletZero, |x| (PI * x).sin());
                let d = dxx(&f, &g).unwrap();
                (0..g.len())
                    .map(|i| (d.values()[i] + PI * PI * (PI * g.x(i)).sin()).abs())
                    .fold(0.0, f64::max)
            })
            .collect();
        for w in errs.windows(2) {
            let order = (w[0] / w[1]).log2();
            assert!((order - 2.0).abs() < 0.1, "order {order}");
        }
    }

    #[test]
    fn piecewise_linear_integrals() {
        let h = 0.5;
        // ψ = 1 - 2x on [0, 1]: two cells, sign change at the middle node
        let v = [1.0, 0.0, -1.0];
        assert!((piecewise_linear::l1(&v, h) - 0.5).abs() < 1e-15);
        assert!((piecewise_linear::l2_sq(&v, h) - 1.0 / 3.0).abs() < 1e-15);
        assert!((piecewise_linear::grad_sq(&v, h) - 4.0).abs() < 1e-15);
        // sign change inside a cell: ψ = x - 0.5 on one cell of width 1
        let v = [-0.5, 0.5];
        assert!((piecewise_linear::l1(&v, 1.0) - 0.25).abs() < 1e-15);
    }
}
