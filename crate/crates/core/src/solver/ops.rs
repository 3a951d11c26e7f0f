//! Matrix assembly for the implicit sub-steps.
//!
//! Every matrix acts on the full nodal vector. Rows of clamped and hinged
//! unknowns at the boundary are identity rows, so a zero right-hand side there
//! reproduces the boundary condition exactly.

use crate::banded::{Pentadiagonal, Tridiagonal};
use crate::error::Result;
use crate::grid::{dx_into, dxx_into, dxxxx_hinged_into, BcKind, Grid};
use crate::material::Material;

/// `I - c Aₙ`, `Aₙ` the reflected-ghost Neumann second difference, plus an
/// optional extra diagonal.
pub(crate) fn heat(grid: &Grid, c: f64, extra_diag: Option<&[f64]>) -> Result<Tridiagonal> {
    let n = grid.len();
    let r = c / (grid.h() * grid.h());
    let mut lower = vec![-r; n];
    let mut diag = vec![1.0 + 2.0 * r; n];
    let mut upper = vec![-r; n];
    upper[0] = -2.0 * r;
    lower[n - 1] = -2.0 * r;
    lower[0] = 0.0;
    upper[n - 1] = 0.0;
    if let Some(extra) = extra_diag {
        for (d, e) in diag.iter_mut().zip(extra) {
            *d += e;
        }
    }
    Tridiagonal::factor(&lower, &diag, &upper)
}

/// `I - c A` on interior nodes, `A` the Dirichlet second difference.
pub(crate) fn viscous(grid: &Grid, c: f64) -> Result<Tridiagonal> {
    let n = grid.len();
    let r = c / (grid.h() * grid.h());
    let mut lower = vec![-r; n];
    let mut diag = vec![1.0 + 2.0 * r; n];
    let mut upper = vec![-r; n];
    for (i, j) in [(0usize, 1usize), (n - 1, n - 2)] {
        lower[i] = 0.0;
        upper[i] = 0.0;
        diag[i] = 1.0;
        // decouple interior rows from the fixed boundary value
        if j == 1 {
            lower[1] = 0.0;
        } else {
            upper[n - 2] = 0.0;
        }
    }
    Tridiagonal::factor(&lower, &diag, &upper)
}

/// `I + c A²` on interior nodes, which is `I + c D₄` with the antisymmetric
/// hinged closure.
pub(crate) fn biharmonic(grid: &Grid, c: f64) -> Result<Pentadiagonal> {
    let n = grid.len();
    let r = c / grid.h().powi(4);
    let mut bands: [Vec<f64>; 5] = [
        vec![r; n],
        vec![-4.0 * r; n],
        vec![1.0 + 6.0 * r; n],
        vec![-4.0 * r; n],
        vec![r; n],
    ];
    bands[2][1] = 1.0 + 5.0 * r;
    bands[2][n - 2] = 1.0 + 5.0 * r;
    for i in 0..n {
        for (k, off) in [-2isize, -1, 1, 2].iter().enumerate() {
            let band = if k < 2 { k } else { k + 1 };
            let j = i as isize + off;
            let boundary_row = i == 0 || i == n - 1;
            let boundary_col = j <= 0 || j >= (n - 1) as isize;
            if boundary_row || boundary_col {
                bands[band][i] = 0.0;
            }
        }
    }
    bands[2][0] = 1.0;
    bands[2][n - 1] = 1.0;
    Pentadiagonal::factor([&bands[0], &bands[1], &bands[2], &bands[3], &bands[4]])
}

/// Scratch buffers and operator applications shared by the steppers.
pub(crate) struct Kernels {
    pub h: f64,
    pub n: usize,
}

impl Kernels {
    pub fn new(grid: &Grid) -> Self {
        Kernels {
            h: grid.h(),
            n: grid.len(),
        }
    }

    pub fn zeros(&self) -> Vec<f64> {
        vec![0.0; self.n]
    }

    /// `A u` (zero at the boundary).
    pub fn lap_dirichlet(&self, u: &[f64]) -> Vec<f64> {
        let mut out = self.zeros();
        dxx_into(u, BcKind::DirichletZero, self.h, &mut out);
        out
    }

    pub fn lap_neumann(&self, theta: &[f64]) -> Vec<f64> {
        let mut out = self.zeros();
        dxx_into(theta, BcKind::NeumannZero, self.h, &mut out);
        out
    }

    pub fn bilap_hinged(&self, v: &[f64]) -> Vec<f64> {
        let mut out = self.zeros();
        dxxxx_hinged_into(v, self.h, &mut out);
        out
    }

    /// `Dₓ f(Θ)` with the Neumann closure.
    pub fn flux_gradient(&self, material: &Material, theta: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let f: Vec<f64> = theta.iter().map(|&t| material.f_clamped(t)).collect();
        let mut out = self.zeros();
        dx_into(&f, BcKind::NeumannZero, self.h, &mut out);
        (f, out)
    }

    /// `Dₓ v` with the hinged closure.
    pub fn dx_hinged(&self, v: &[f64]) -> Vec<f64> {
        let mut out = self.zeros();
        dx_into(v, BcKind::Hinged, self.h, &mut out);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn biharmonic_matrix_inverts_its_stencil() {
        let g = Grid::unit(12).unwrap();
        let k = Kernels::new(&g);
        let c = 0.3;
        let p = biharmonic(&g, c).unwrap();
        let mut x = g.sample(|x| (3.0 * x).sin() + x * x);
        x[0] = 0.0;
        x[12] = 0.0;
        let d4 = k.bilap_hinged(&x);
        let mut rhs: Vec<f64> = x.iter().zip(&d4).map(|(a, b)| a + c * b).collect();
        p.solve_in_place(&mut rhs).unwrap();
        for (a, b) in rhs.iter().zip(&x) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn heat_and_viscous_matrices_invert_their_stencils() {
        let g = Grid::unit(10).unwrap();
        let k = Kernels::new(&g);
        let c = 0.05;
        let theta = g.sample(|x| 1.0 + (2.0 * x).cos() + x);
        let a = k.lap_neumann(&theta);
        let mut rhs: Vec<f64> = theta.iter().zip(&a).map(|(t, l)| t - c * l).collect();
        heat(&g, c, None).unwrap().solve_in_place(&mut rhs).unwrap();
        for (p, q) in rhs.iter().zip(&theta) {
            assert!((p - q).abs() < 1e-12);
        }
        let mut u = g.sample(|x| x * (1.0 - x) * (1.0 + x));
        u[0] = 0.0;
        u[10] = 0.0;
        let a = k.lap_dirichlet(&u);
        let mut rhs: Vec<f64> = u.iter().zip(&a).map(|(t, l)| t - c * l).collect();
        viscous(&g, c).unwrap().solve_in_place(&mut rhs).unwrap();
        for (p, q) in rhs.iter().zip(&u) {
            assert!((p - q).abs() < 1e-12);
        }
    }
}
