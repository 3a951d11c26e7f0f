//! Direct solvers for the banded systems of the implicit sub-steps.
//!
//! Both factorizations run without pivoting. The matrices assembled by the
//! solvers are either diagonally dominant (tridiagonal heat and viscosity
//! operators) or symmetric positive definite (`I + c D₄` with hinged closure), so
//! elimination is stable; a vanishing pivot is reported as a scheme error
//! instead of producing garbage.

use crate::error::{Error, Result};

const PIVOT_TOL: f64 = 1e-13;

fn pivot_error(row: usize, pivot: f64) -> Error {
    Error::Scheme {
        t: f64::NAN,
        msg: format!("banded solve: pivot {pivot:e} at row {row}"),
    }
}

/// Factorized tridiagonal matrix (Thomas algorithm).
///
/// Row `i` reads `lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1]`;
/// `lower[0]` and `upper[n-1]` are ignored.
#[derive(Debug, Clone)]
pub struct Tridiagonal {
    lower: Vec<f64>,
    /// Reciprocal of the eliminated diagonal.
    inv_pivot: Vec<f64>,
    /// Eliminated super-diagonal `c'`.
    upper_mod: Vec<f64>,
}

impl Tridiagonal {
    pub fn factor(lower: &[f64], diag: &[f64], upper: &[f64]) -> Result<Self> {
        let n = diag.len();
        if lower.len() != n || upper.len() != n || n == 0 {
            return Err(Error::Structural(format!(
                "tridiagonal bands have lengths {}, {}, {}",
                lower.len(),
                n,
                upper.len()
            )));
        }
        let scale = diag.iter().fold(0.0f64, |m, d| m.max(d.abs())).max(1.0);
        let mut inv_pivot = vec![0.0; n];
        let mut upper_mod = vec![0.0; n];
        let mut prev_c = 0.0;
        for i in 0..n {
            let l = if i == 0 { 0.0 } else { lower[i] };
            let pivot = diag[i] - l * prev_c;
            if !pivot.is_finite() || pivot.abs() <= PIVOT_TOL * scale {
                return Err(pivot_error(i, pivot));
            }
            inv_pivot[i] = 1.0 / pivot;
            prev_c = if i + 1 < n {
                upper[i] * inv_pivot[i]
            } else {
                0.0
            };
            upper_mod[i] = prev_c;
        }
        Ok(Tridiagonal {
            lower: lower.to_vec(),
            inv_pivot,
            upper_mod,
        })
    }

    pub fn len(&self) -> usize {
        self.inv_pivot.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inv_pivot.is_empty()
    }

    /// Overwrite `rhs` with the solution.
    pub fn solve_in_place(&self, rhs: &mut [f64]) -> Result<()> {
        let n = self.len();
        if rhs.len() != n {
            return Err(Error::Structural(format!(
                "rhs has length {}, matrix order {n}",
                rhs.len()
            )));
        }
        rhs[0] *= self.inv_pivot[0];
        for i in 1..n {
            rhs[i] = (rhs[i] - self.lower[i] * rhs[i - 1]) * self.inv_pivot[i];
        }
        for i in (0..n - 1).rev() {
            rhs[i] -= self.upper_mod[i] * rhs[i + 1];
        }
        Ok(())
    }
}

/// Factorized pentadiagonal matrix (banded LU, bandwidth 2).
///
/// `bands[k][i]` holds the entry at row `i`, column `i + k - 2`.
#[derive(Debug, Clone)]
pub struct Pentadiagonal {
    n: usize,
    // unit lower factor: multipliers at offsets -2, -1
    l2: Vec<f64>,
    l1: Vec<f64>,
    // upper factor: diagonal, +1, +2
    u0: Vec<f64>,
    u1: Vec<f64>,
    u2: Vec<f64>,
}

impl Pentadiagonal {
    pub fn factor(bands: [&[f64]; 5]) -> Result<Self> {
        let n = bands[2].len();
        if n == 0 || bands.iter().any(|b| b.len() != n) {
            return Err(Error::Structural(
                "pentadiagonal bands must share a nonzero length".into(),
            ));
        }
        let [e, c, d, a, b] = bands;
        let scale = d.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
        let mut l2 = vec![0.0; n];
        let mut l1 = vec![0.0; n];
        let mut u0 = vec![0.0; n];
        let mut u1 = vec![0.0; n];
        let mut u2 = vec![0.0; n];
        for i in 0..n {
            // row i of A = sum_k L[i,k] U[k,j]
            if i >= 2 {
                l2[i] = e[i] / u0[i - 2];
            }
            if i >= 1 {
                let shift = if i >= 2 { l2[i] * u1[i - 2] } else { 0.0 };
                l1[i] = (c[i] - shift) / u0[i - 1];
            }
            let mut diag = d[i];
            if i >= 1 {
                diag -= l1[i] * u1[i - 1];
            }
            if i >= 2 {
                diag -= l2[i] * u2[i - 2];
            }
            if !diag.is_finite() || diag.abs() <= PIVOT_TOL * scale {
                return Err(pivot_error(i, diag));
            }
            u0[i] = diag;
            if i + 1 < n {
                u1[i] = a[i] - if i >= 1 { l1[i] * u2[i - 1] } else { 0.0 };
            }
            if i + 2 < n {
                u2[i] = b[i];
            }
        }
        Ok(Pentadiagonal {
            n,
            l2,
            l1,
            u0,
            u1,
            u2,
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn solve_in_place(&self, rhs: &mut [f64]) -> Result<()> {
        let n = self.n;
        if rhs.len() != n {
            return Err(Error::Structural(format!(
                "rhs has length {}, matrix order {n}",
                rhs.len()
            )));
        }
        for i in 1..n {
            let mut s = rhs[i] - self.l1[i] * rhs[i - 1];
            if i >= 2 {
                s -= self.l2[i] * rhs[i - 2];
            }
            rhs[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = rhs[i];
            if i + 1 < n {
                s -= self.u1[i] * rhs[i + 1];
            }
            if i + 2 < n {
                s -= self.u2[i] * rhs[i + 2];
            }
            rhs[i] = s / self.u0[i];
        }
        Ok(())
    }
}
