//! Constitutive function `f` with `f(0) = 0`, `f' > 0`, `f' ∈ W^{1,∞}`.

use crate::error::{Error, Result};

/// Default floor below which `ρ = f'/f` is refused.
pub const DEFAULT_RHO_FLOOR: f64 = 1e-8;

/// Monotone cubic (Fritsch–Carlson) interpolant of tabulated `(ξ, f(ξ))`
/// samples, extended linearly beyond the last knot.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    xs: Vec<f64>,
    fs: Vec<f64>,
    slopes: Vec<f64>,
}

impl Table {
    /// Knots must be strictly increasing and start at `ξ = 0`.
    pub fn from_points(xs: Vec<f64>, fs: Vec<f64>) -> Result<Self> {
        if xs.len() != fs.len() || xs.len() < 2 {
            return Err(Error::Contract(format!(
                "table needs at least two (xi, f) pairs of equal length, got {} and {}",
                xs.len(),
                fs.len()
            )));
        }
        if xs[0] != 0.0 {
            return Err(Error::Contract(format!(
                "table must start at xi = 0, got {}",
                xs[0]
            )));
        }
        if let Some(w) = xs.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::Contract(format!(
                "table xi values must be strictly increasing (row {})",
                w + 2
            )));
        }
        if xs.iter().chain(&fs).any(|v| !v.is_finite()) {
            return Err(Error::Contract("table contains non-finite values".into()));
        }
        let slopes = monotone_slopes(&xs, &fs);
        Ok(Table { xs, fs, slopes })
    }

    /// Parse two whitespace- or comma-separated columns; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut xs = Vec::new();
        let mut fs = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .collect();
            let parsed: Vec<f64> = cols.iter().filter_map(|c| c.parse().ok()).collect();
            if cols.len() != 2 || parsed.len() != 2 {
                return Err(Error::Contract(format!(
                    "table line {}: expected two numbers, got {line:?}",
                    lineno + 1
                )));
            }
            xs.push(parsed[0]);
            fs.push(parsed[1]);
        }
        Table::from_points(xs, fs)
    }

    pub fn knots(&self) -> (&[f64], &[f64]) {
        (&self.xs, &self.fs)
    }

    fn locate(&self, xi: f64) -> usize {
        match self.xs.partition_point(|&x| x <= xi) {
            0 => 0,
            k => (k - 1).min(self.xs.len() - 2),
        }
    }

    fn eval(&self, xi: f64) -> (f64, f64, f64) {
        let last = self.xs.len() - 1;
        if xi >= self.xs[last] {
            let m = self.slopes[last];
            return (self.fs[last] + m * (xi - self.xs[last]), m, 0.0);
        }
        let k = self.locate(xi);
        let h = self.xs[k + 1] - self.xs[k];
        let t = (xi - self.xs[k]) / h;
        let (y0, y1) = (self.fs[k], self.fs[k + 1]);
        let (m0, m1) = (self.slopes[k] * h, self.slopes[k + 1] * h);
        let t2 = t * t;
        let t3 = t2 * t;
        let f = (2.0 * t3 - 3.0 * t2 + 1.0) * y0
            + (t3 - 2.0 * t2 + t) * m0
            + (-2.0 * t3 + 3.0 * t2) * y1
            + (t3 - t2) * m1;
        let df = ((6.0 * t2 - 6.0 * t) * y0
            + (3.0 * t2 - 4.0 * t + 1.0) * m0
            + (-6.0 * t2 + 6.0 * t) * y1
            + (3.0 * t2 - 2.0 * t) * m1)
            / h;
        let ddf = ((12.0 * t - 6.0) * y0
            + (6.0 * t - 4.0) * m0
            + (-12.0 * t + 6.0) * y1
            + (6.0 * t - 2.0) * m1)
            / (h * h);
        (f, df, ddf)
    }
}

/// Fritsch–Carlson slopes with the shape-preserving three-point endpoint rule.
fn monotone_slopes(xs: &[f64], fs: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let h: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
    let delta: Vec<f64> = (0..n - 1).map(|k| (fs[k + 1] - fs[k]) / h[k]).collect();
    let mut m = vec![0.0; n];
    if n == 2 {
        m[0] = delta[0];
        m[1] = delta[0];
        return m;
    }
    for k in 1..n - 1 {
        let (d0, d1) = (delta[k - 1], delta[k]);
        if d0 * d1 <= 0.0 {
            m[k] = 0.0;
        } else {
            let w1 = 2.0 * h[k] + h[k - 1];
            let w2 = h[k] + 2.0 * h[k - 1];
            m[k] = (w1 + w2) / (w1 / d0 + w2 / d1);
        }
    }
    let end = |h0: f64, h1: f64, d0: f64, d1: f64| -> f64 {
        let s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if s * d0 <= 0.0 {
            0.0
        } else if d0 * d1 <= 0.0 && s.abs() > 3.0 * d0.abs() {
            3.0 * d0
        } else {
            s
        }
    };
    m[0] = end(h[0], h[1], delta[0], delta[1]);
    m[n - 1] = end(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    m
}

#[derive(Debug, Clone, PartialEq)]
pub enum MaterialKind {
    /// `f(ξ) = ξ`; reduces the system to the classical minimal model.
    Identity,
    /// `f(ξ) = ln(1 + ξ)`.
    Log1p,
    /// `f(ξ) = ξ / (1 + ξ)`.
    RationalSaturating,
    Tabulated(Table),
}

impl MaterialKind {
    pub fn name(&self) -> &'static str {
        match self {
            MaterialKind::Identity => "identity",
            MaterialKind::Log1p => "log1p",
            MaterialKind::RationalSaturating => "rational_saturating",
            MaterialKind::Tabulated(_) => "tabulated",
        }
    }
}

/// Constitutive law together with the bounds `0 ≤ f' ≤ c3`, `|f''| ≤ c4`.
#[derive(Debug, Clone, PartialEq)]
pub struct Material {
    kind: MaterialKind,
    c3: f64,
    c4: f64,
    rho_floor: f64,
}

impl Default for Material {
    fn default() -> Self {
        Material::identity()
    }
}

impl Material {
    pub fn new(kind: MaterialKind, rho_floor: f64) -> Result<Self> {
        if !(rho_floor.is_finite() && rho_floor > 0.0) {
            return Err(Error::Contract(format!(
                "rho_floor must be positive, got {rho_floor}"
            )));
        }
        let (c3, c4) = match &kind {
            MaterialKind::Identity => (1.0, 0.0),
            MaterialKind::Log1p => (1.0, 1.0),
            MaterialKind::RationalSaturating => (1.0, 2.0),
            MaterialKind::Tabulated(t) => {
                let top = *t.xs.last().unwrap();
                let (c3, c4, _) = sampled_bounds(|xi| t.eval(xi), top, 20 * t.xs.len() + 200);
                (c3, c4)
            }
        };
        Ok(Material {
            kind,
            c3,
            c4,
            rho_floor,
        })
    }

    pub fn identity() -> Self {
        Material::new(MaterialKind::Identity, DEFAULT_RHO_FLOOR).unwrap()
    }

    pub fn log1p() -> Self {
        Material::new(MaterialKind::Log1p, DEFAULT_RHO_FLOOR).unwrap()
    }

    pub fn rational_saturating() -> Self {
        Material::new(MaterialKind::RationalSaturating, DEFAULT_RHO_FLOOR).unwrap()
    }

    pub fn tabulated(table: Table) -> Result<Self> {
        Material::new(MaterialKind::Tabulated(table), DEFAULT_RHO_FLOOR)
    }

    pub fn kind(&self) -> &MaterialKind {
        &self.kind
    }

    /// `sup f'` on `[0, ∞)`.
    pub fn c3(&self) -> f64 {
        self.c3
    }

    /// `sup |f''|` on `[0, ∞)`.
    pub fn c4(&self) -> f64 {
        self.c4
    }

    pub fn rho_floor(&self) -> f64 {
        self.rho_floor
    }

    pub fn with_rho_floor(mut self, rho_floor: f64) -> Result<Self> {
        if !(rho_floor.is_finite() && rho_floor > 0.0) {
            return Err(Error::Contract(format!(
                "rho_floor must be positive, got {rho_floor}"
            )));
        }
        self.rho_floor = rho_floor;
        Ok(self)
    }

    /// `(f, f', f'')` without the domain check.
    pub(crate) fn eval_all(&self, xi: f64) -> (f64, f64, f64) {
        match &self.kind {
            MaterialKind::Identity => (xi, 1.0, 0.0),
            MaterialKind::Log1p => {
                let r = 1.0 / (1.0 + xi);
                (xi.ln_1p(), r, -r * r)
            }
            MaterialKind::RationalSaturating => {
                let r = 1.0 / (1.0 + xi);
                (xi * r, r * r, -2.0 * r * r * r)
            }
            MaterialKind::Tabulated(t) => t.eval(xi),
        }
    }

    /// `f` evaluated at `max(ξ, 0)`, for solver kernels where round-off may
    /// leave a temperature a few ulps below zero. Undershoot beyond the
    /// positivity tolerance is caught by the solver, not here.
    #[inline]
    pub(crate) fn f_clamped(&self, xi: f64) -> f64 {
        self.eval_all(xi.max(0.0)).0
    }

    fn check_domain(xi: f64) -> Result<()> {
        if xi >= 0.0 {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "constitutive function evaluated at negative temperature {xi}"
            )))
        }
    }

    pub fn eval_f(&self, xi: f64) -> Result<f64> {
        Self::check_domain(xi)?;
        Ok(self.eval_all(xi).0)
    }

    pub fn eval_fp(&self, xi: f64) -> Result<f64> {
        Self::check_domain(xi)?;
        Ok(self.eval_all(xi).1)
    }

    pub fn eval_fpp(&self, xi: f64) -> Result<f64> {
        Self::check_domain(xi)?;
        Ok(self.eval_all(xi).2)
    }

    /// `ρ(ξ) = f'(ξ) / f(ξ)`, refused below the floor.
    pub fn rho(&self, xi: f64) -> Result<f64> {
        if !(xi >= self.rho_floor) {
            return Err(Error::PositivityFloor {
                xi,
                floor: self.rho_floor,
            });
        }
        let (f, fp, _) = self.eval_all(xi);
        Ok(fp / f)
    }

    /// `ρ'(ξ) = (f'' f - f'²) / f²`.
    pub fn rho_prime(&self, xi: f64) -> Result<f64> {
        if !(xi >= self.rho_floor) {
            return Err(Error::PositivityFloor {
                xi,
                floor: self.rho_floor,
            });
        }
        let (f, fp, fpp) = self.eval_all(xi);
        Ok((fpp * f - fp * fp) / (f * f))
    }

    /// Check the structural hypotheses on `[0, ξ_max]` and extract empirical bounds.
    pub fn hypothesis_report(&self, xi_max: f64, samples: usize) -> Result<HypothesisReport> {
        if samples < 100 {
            return Err(Error::Contract(format!(
                "hypothesis check needs at least 100 samples, got {samples}"
            )));
        }
        if !(xi_max.is_finite() && xi_max > 0.0) {
            return Err(Error::Contract(format!(
                "xi_max must be positive, got {xi_max}"
            )));
        }
        let f0 = self.eval_all(0.0).0;
        if f0.abs() > 1e-14 {
            return Err(Error::Hypothesis(format!("f(0)≠0: f(0) = {f0}")));
        }
        let (c3, c4, min_fp) = sampled_bounds(|xi| self.eval_all(xi), xi_max, samples);
        if !(min_fp > 0.0) {
            return Err(Error::Hypothesis(format!(
                "f' > 0 fails: min sampled f' = {min_fp:e}"
            )));
        }
        for k in 0..samples {
            let xi = xi_max * k as f64 / (samples - 1) as f64;
            let f = self.eval_all(xi).0;
            if f < -1e-14 || f > c3 * xi * (1.0 + 1e-12) + 1e-14 {
                return Err(Error::Hypothesis(format!(
                    "0 ≤ f(ξ) ≤ c3 ξ fails at ξ = {xi}: f = {f}, c3 = {c3}"
                )));
            }
        }
        Ok(HypothesisReport {
            xi_max,
            samples,
            min_fp,
            c3,
            c4,
        })
    }
}

fn sampled_bounds(
    eval: impl Fn(f64) -> (f64, f64, f64),
    xi_max: f64,
    samples: usize,
) -> (f64, f64, f64) {
    let mut c3 = 0.0f64;
    let mut c4 = 0.0f64;
    let mut min_fp = f64::INFINITY;
    for k in 0..samples {
        let xi = xi_max * k as f64 / (samples - 1) as f64;
        let (_, fp, fpp) = eval(xi);
        c3 = c3.max(fp);
        c4 = c4.max(fpp.abs());
        min_fp = min_fp.min(fp);
    }
    (c3, c4, min_fp)
}

/// Outcome of [`Material::hypothesis_report`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HypothesisReport {
    pub xi_max: f64,
    pub samples: usize,
    pub min_fp: f64,
    /// Empirical `sup f'`.
    pub c3: f64,
    /// Empirical `sup |f''|`.
    pub c4: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn builtins() -> Vec<Material> {
        vec![
            Material::identity(),
            Material::log1p(),
            Material::rational_saturating(),
        ]
    }

    #[test]
    fn pointwise_values() {
        let id = Material::identity();
        assert_eq!(
            (
                id.eval_f(2.0).unwrap(),
                id.eval_fp(2.0).unwrap(),
                id.eval_fpp(2.0).unwrap()
            ),
            (2.0, 1.0, 0.0)
        );
        let lg = Material::log1p();
        assert_eq!(lg.eval_f(0.0).unwrap(), 0.0);
        assert_eq!(lg.eval_fp(0.0).unwrap(), 1.0);
        assert_eq!(lg.eval_fpp(0.0).unwrap(), -1.0);
        let rs = Material::rational_saturating();
        assert!((rs.eval_f(1.0).unwrap() - 0.5).abs() < 1e-15);
        assert!((rs.eval_fp(1.0).unwrap() - 0.25).abs() < 1e-15);
        assert!((rs.eval_fpp(1.0).unwrap() + 0.25).abs() < 1e-15);
    }

    #[test]
    fn negative_argument_is_a_domain_error() {
        for m in builtins() {
            assert!(matches!(m.eval_f(-1e-3), Err(Error::Domain(_))));
            assert!(matches!(m.eval_fp(-1.0), Err(Error::Domain(_))));
            assert!(matches!(m.eval_fpp(-1.0), Err(Error::Domain(_))));
        }
    }

    #[test]
    fn rho_examples() {
        let id = Material::identity();
        assert_eq!(id.rho(2.0).unwrap(), 0.5);
        assert_eq!(id.rho(0.5).unwrap(), 2.0);
        // (1/2) / ln 2
        let expected = 0.5 / std::f64::consts::LN_2;
        assert!((Material::log1p().rho(1.0).unwrap() - expected).abs() < 1e-15);
        assert!((expected - 0.72135).abs() < 1e-5);
        assert!(matches!(id.rho(1e-9), Err(Error::PositivityFloor { .. })));
        assert!(matches!(
            id.rho(f64::NAN),
            Err(Error::PositivityFloor { .. })
        ));
    }

    #[test]
    fn rho_identity_times_xi_is_one() {
        let id = Material::identity();
        let mut xi = id.rho_floor();
        while xi <= 1e6 {
            assert!((id.rho(xi).unwrap() * xi - 1.0).abs() < 1e-14);
            xi *= 1.7;
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h = 1e-4;
        for m in builtins() {
            for _ in 0..1000 {
                let xi: f64 = rng.gen_range(h..100.0);
                let (_, fp, fpp) = m.eval_all(xi);
                let fd1 = (m.eval_all(xi + h).0 - m.eval_all(xi - h).0) / (2.0 * h);
                let fd2 = (m.eval_all(xi + h).1 - m.eval_all(xi - h).1) / (2.0 * h);
                assert!(
                    (fd1 - fp).abs() <= 1e-6 * fp.abs().max(1e-12) + 1e-12,
                    "{m:?} at {xi}"
                );
                assert!(
                    (fd2 - fpp).abs() <= 1e-6 * fpp.abs().max(1e-12) + 1e-12,
                    "{m:?} at {xi}: {fd2} vs {fpp}"
                );
            }
        }
    }

    #[test]
    fn f_bounded_by_c3_xi() {
        for m in builtins() {
            for k in 0..2000 {
                let xi = k as f64 * 0.05;
                let f = m.eval_f(xi).unwrap();
                assert!(f >= 0.0 && f <= m.c3() * xi + 1e-15);
            }
        }
    }

    #[test]
    fn hypothesis_report_examples() {
        let r = Material::identity().hypothesis_report(10.0, 1000).unwrap();
        assert_eq!((r.c3, r.c4), (1.0, 0.0));
        let r = Material::log1p().hypothesis_report(10.0, 1000).unwrap();
        assert_eq!((r.c3, r.c4), (1.0, 1.0));
        assert!(matches!(
            Material::identity().hypothesis_report(10.0, 50),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn tabulated_offset_violates_hypothesis() {
        let t = Table::from_points(vec![0.0, 1.0, 2.0], vec![0.1, 1.0, 2.0]).unwrap();
        let m = Material::tabulated(t).unwrap();
        match m.hypothesis_report(2.0, 200) {
            Err(Error::Hypothesis(msg)) => assert!(msg.contains("f(0)≠0")),
            other => panic!("expected hypothesis error, got {other:?}"),
        }
    }

    #[test]
    fn tabulated_flat_segment_violates_positivity_of_derivative() {
        let t = Table::from_points(vec![0.0, 1.0, 2.0, 3.0], vec![0.0, 1.0, 1.0, 2.0]).unwrap();
        let m = Material::tabulated(t).unwrap();
        assert!(matches!(
            m.hypothesis_report(3.0, 300),
            Err(Error::Hypothesis(_))
        ));
    }

    #[test]
    fn tabulated_log1p_tracks_closed_form() {
        let xs: Vec<f64> = (0..=200).map(|k| k as f64 * 0.05).collect();
        let fs: Vec<f64> = xs.iter().map(|x| x.ln_1p()).collect();
        let m = Material::tabulated(Table::from_points(xs, fs).unwrap()).unwrap();
        let r = m.hypothesis_report(10.0, 1000).unwrap();
        assert!(r.min_fp > 0.0);
        assert!((r.c3 - 1.0).abs() < 5e-3);
        for k in 0..500 {
            let xi = k as f64 * 0.02;
            assert!((m.eval_f(xi).unwrap() - xi.ln_1p()).abs() < 2e-4);
            assert!((m.eval_fp(xi).unwrap() - 1.0 / (1.0 + xi)).abs() < 5e-3);
        }
        // linear extension past the last knot keeps f' > 0
        assert!(m.eval_fp(50.0).unwrap() > 0.0);
    }

    #[test]
    fn table_parsing() {
        let t = Table::parse("# xi f\n0 0\n1, 0.5\n\n2\t0.8 # tail\n").unwrap();
        assert_eq!(t.knots().0, &[0.0, 1.0, 2.0]);
        assert!(matches!(Table::parse("0 0\n1\n"), Err(Error::Contract(_))));
        assert!(matches!(
            Table::parse("0.5 0\n1 1\n"),
            Err(Error::Contract(_))
        ));
        assert!(matches!(
            Table::parse("0 0\n1 1\n1 2\n"),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn rho_floor_must_be_positive() {
        assert!(Material::new(MaterialKind::Identity, 0.0).is_err());
        assert!(Material::identity().with_rho_floor(-1.0).is_err());
    }
}
