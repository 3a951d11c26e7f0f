//! Closed-form stability constants and a-priori bounds.
//!
//! Notation follows the difference estimates for pairs of solutions:
//! `c1`, `c2` are the interval embedding constants of [`crate::grid::GnConstants`],
//! `c3 = sup f'`, `c4 = sup |f''|`. Wherever the estimates only ask for a
//! sufficiently large constant, the sum (or max) of all coefficient groups that
//! occur is used. The constants are admissible, not sharp.
//!
//! `Γ₃` grows like `exp(3 Γ₁ (T + K))`, which overflows `f64` for moderate
//! `K`, so `Γ₃`, `Γ₄` and the time-shift constant are carried as logarithms.

use crate::error::{Error, Result};
use crate::grid::{gn_constants_for_width, GnConstants};
use crate::material::Material;
use serde::Serialize;

/// Embedding and material constants entering `Γ₁`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BaseConstants {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    /// Interval length `|Ω|`.
    pub width: f64,
}

impl BaseConstants {
    pub fn new(gn: GnConstants, material: &Material, width: f64) -> Self {
        BaseConstants {
            c1: gn.c1,
            c2: gn.c2,
            c3: material.c3(),
            c4: material.c4(),
            width,
        }
    }

    pub fn for_interval(a: f64, b: f64, material: &Material) -> Result<Self> {
        let w = b - a;
        Ok(BaseConstants::new(gn_constants_for_width(w)?, material, w))
    }

    fn check(&self) -> Result<()> {
        let ok =
            self.c1 > 0.0 && self.c2 > 0.0 && self.c3 > 0.0 && self.c4 >= 0.0 && self.width > 0.0;
        if ok
            && [self.c1, self.c2, self.c3, self.c4, self.width]
                .iter()
                .all(|v| v.is_finite())
        {
            Ok(())
        } else {
            Err(Error::Domain(format!("invalid base constants {self:?}")))
        }
    }
}

fn positive(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "{name} must be positive and finite, got {x}"
        )))
    }
}

/// Intermediate coefficients of `Γ₁(η, K)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Gamma1Parts {
    pub c5: f64,
    pub c6: f64,
    pub c7: f64,
    pub c8: f64,
    pub c9: f64,
    pub gamma1: f64,
}

/// `Γ₁(η, K)` with all of its constituents.
///
/// ```text
/// c5 = (2/η)^⅓ (c1 c4)^{4/3}
/// c6 = (6/η)^⅓ (c1 c3)^{4/3}
/// c7 = (12/η)³ (c1 c3 K)⁴ + 3 c1² c3² K²/η
/// c8 = 6 c1⁴ c4² K²/η + 2 c1² c4 K
/// c9 = (8/η)³ (c1 c3 K)⁴ + 2 c1² c3² K²/η
/// Γ₁ = [c3²/(2η) + c5 + c1c4] + [c5 + c1c4] + [c6 + c1c3 + c7 + c8]
///    + [c9 + c2c3²K²/η + c2c3²/η]
/// ```
pub fn gamma1_parts(eta: f64, k: f64, base: &BaseConstants) -> Result<Gamma1Parts> {
    positive("eta", eta)?;
    positive("K", k)?;
    base.check()?;
    let BaseConstants { c1, c2, c3, c4, .. } = *base;
    let c5 = (2.0 / eta).cbrt() * (c1 * c4).powf(4.0 / 3.0);
    let c6 = (6.0 / eta).cbrt() * (c1 * c3).powf(4.0 / 3.0);
    let c7 = (12.0 / eta).powi(3) * (c1 * c3 * k).powi(4) + 3.0 * c1 * c1 * c3 * c3 * k * k / eta;
    let c8 = 6.0 * c1.powi(4) * c4 * c4 * k * k / eta + 2.0 * c1 * c1 * c4 * k;
    let c9 = (8.0 / eta).powi(3) * (c1 * c3 * k).powi(4) + 2.0 * c1 * c1 * c3 * c3 * k * k / eta;
    let g = (c3 * c3 / (2.0 * eta) + c5 + c1 * c4)
        + (c5 + c1 * c4)
        + (c6 + c1 * c3 + c7 + c8)
        + (c9 + c2 * c3 * c3 * k * k / eta + c2 * c3 * c3 / eta);
    Ok(Gamma1Parts {
        c5,
        c6,
        c7,
        c8,
        c9,
        gamma1: g,
    })
}

pub fn gamma1(eta: f64, k: f64, base: &BaseConstants) -> Result<f64> {
    Ok(gamma1_parts(eta, k, base)?.gamma1)
}

/// `Γ₂(K) = 2 Γ₁(½, K)`.
pub fn gamma2(k: f64, base: &BaseConstants) -> Result<f64> {
    Ok(2.0 * gamma1(0.5, k, base)?)
}

/// `ln(e^a + e^b)` without overflow.
fn log_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// `ln Γ₃(K, T)` where `Γ₃ = 2 max(e^{c}, 1 + c e^{c})`, `c = (Γ₁(½,K) + Γ₂(K))(T + K)`.
///
/// The first entry covers the sup-in-time Grönwall bound, the second the
/// dissipation integral; the factor 2 absorbs the ½-weights of the energy terms.
/// For `c > 0` the maximum is always `1 + c e^c`, evaluated as
/// `ln 2 + c + ln(c + e^{-c})`.
pub fn ln_gamma3(k: f64, t: f64, base: &BaseConstants) -> Result<f64> {
    positive("T", t)?;
    let c = (gamma1(0.5, k, base)? + gamma2(k, base)?) * (t + k);
    Ok(std::f64::consts::LN_2 + c + (c + (-c).exp()).ln())
}

/// `Γ₃(K, T)`; may be `+∞` when it exceeds the `f64` range.
pub fn gamma3(k: f64, t: f64, base: &BaseConstants) -> Result<f64> {
    Ok(ln_gamma3(k, t, base)?.exp())
}

/// Energy bound on `‖u_t‖` for data with `‖v₀‖ + ‖u₀‖_{W^{1,2}} + ‖Θ₀‖ ≤ K`.
///
/// From energy conservation, `‖u_t‖² ≤ 2E(0) ≤ ‖v₀‖² + ‖u₀ₓ‖² + 2∫Θ₀` and
/// `∫Θ₀ ≤ |Ω|^½ ‖Θ₀‖` by Cauchy–Schwarz, so `‖u_t‖² ≤ 2K² + 2|Ω|^½ K`.
pub fn energy_velocity_bound(k: f64, base: &BaseConstants) -> Result<f64> {
    positive("K", k)?;
    base.check()?;
    Ok((2.0 * k * k + 2.0 * base.width.sqrt() * k).sqrt())
}

/// `ln Γ₄(K, T)` with `Γ₄ = c + |Ω|^½ √Γ₃(c,T) K + Γ₃(c,T) K²`, `c` the
/// [`energy_velocity_bound`].
///
/// Comparing with the zero solution bounds the squared norms at time `t` and
/// the dissipation by `Γ₃(c,T) K²`; `‖Θ‖₁ ≤ |Ω|^½ ‖Θ‖` gives the middle term.
pub fn ln_gamma4(k: f64, t: f64, base: &BaseConstants) -> Result<f64> {
    let c = energy_velocity_bound(k, base)?;
    let lg3 = ln_gamma3(c, t, base)?;
    let a = c.ln();
    let b = 0.5 * base.width.ln() + 0.5 * lg3 + k.ln();
    let d = lg3 + 2.0 * k.ln();
    Ok(log_add(log_add(a, b), d))
}

pub fn gamma4(k: f64, t: f64, base: &BaseConstants) -> Result<f64> {
    Ok(ln_gamma4(k, t, base)?.exp())
}

/// `ln C(T)` of the time-shift estimate: `C = exp(4 c₂ (T + c₁))` with
/// `c₂ = Γ₁(½, c₁)`, where `c₁` bounds `‖v‖ + ‖Θ‖₁` and `∫₀ᵀ‖Θ_x‖²` along the run.
pub fn ln_time_shift_constant(c1_run: f64, t: f64, base: &BaseConstants) -> Result<f64> {
    positive("T", t)?;
    let c2 = gamma1(0.5, c1_run, base)?;
    Ok(4.0 * c2 * (t + c1_run))
}

/// Full set of constants for one `(η, K, T)` choice.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConstantsLedger {
    pub base: BaseConstants,
    pub c10: f64,
    pub eta: f64,
    pub k: f64,
    pub t: f64,
    pub parts: Gamma1Parts,
    pub gamma1: f64,
    pub gamma2: f64,
    pub ln_gamma3: f64,
    pub ln_gamma4: f64,
}

impl ConstantsLedger {
    pub fn new(base: BaseConstants, c10: f64, eta: f64, k: f64, t: f64) -> Result<Self> {
        let parts = gamma1_parts(eta, k, &base)?;
        Ok(ConstantsLedger {
            base,
            c10,
            eta,
            k,
            t,
            parts,
            gamma1: parts.gamma1,
            gamma2: gamma2(k, &base)?,
            ln_gamma3: ln_gamma3(k, t, &base)?,
            ln_gamma4: ln_gamma4(k, t, &base)?,
        })
    }

    /// Plain-text report, one constant per line with the estimate it enters.
    pub fn report(&self) -> String {
        let b = &self.base;
        let p = &self.parts;
        let mut s = String::new();
        let mut line = |name: &str, value: String, role: &str| {
            s.push_str(&format!("{name:<10} = {value:<24} # {role}\n"));
        };
        line("|Omega|", fmt(b.width), "interval length");
        line(
            "c1",
            fmt(b.c1),
            "sup-norm interpolation bound ‖ψ‖∞ ≤ c1‖ψx‖^½‖ψ‖^½ + c1‖ψ‖",
        );
        line("c2", fmt(b.c2), "sup-norm bound ‖ψ‖∞² ≤ c2‖ψx‖² + c2‖ψ‖₁²");
        line(
            "c10",
            fmt(self.c10),
            "L⁴ interpolation bound for functions vanishing on the boundary",
        );
        line("c3", fmt(b.c3), "sup f'");
        line("c4", fmt(b.c4), "sup |f''|");
        line(
            "eta",
            fmt(self.eta),
            "weight of the gradient-difference term",
        );
        line("K", fmt(self.k), "bound on ‖v̂‖ + ‖Θ‖₁ and on ∫∫Θx²");
        line("T", fmt(self.t), "time horizon");
        line("c5", fmt(p.c5), "difference-pair estimate, f'' cross term");
        line("c6", fmt(p.c6), "difference-pair estimate, transport term");
        line(
            "c7",
            fmt(p.c7),
            "difference-pair estimate, gradient-difference term",
        );
        line(
            "c8",
            fmt(p.c8),
            "difference-pair estimate, f'' transport term",
        );
        line("c9", fmt(p.c9), "difference-pair estimate, flux term");
        line(
            "Gamma1",
            fmt(self.gamma1),
            "difference-pair estimate (momentum and heat)",
        );
        line(
            "Gamma2",
            fmt(self.gamma2),
            "temperature-difference Grönwall rate, 2·Gamma1(1/2,K)",
        );
        line(
            "lnGamma3",
            fmt(self.ln_gamma3),
            "log of the continuous-dependence constant",
        );
        line(
            "lnGamma4",
            fmt(self.ln_gamma4),
            "log of the a-priori bound for weak solutions",
        );
        s
    }
}

fn fmt(x: f64) -> String {
    format!("{x:.10e}")
}

/// Two-sided bounds along a run: `c1 ≤ f(Θ) ≤ c2`, `c3 ≤ f'(Θ) ≤ c4`, `|f''(Θ)| ≤ c5`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RunBounds {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    pub c5: f64,
}

impl RunBounds {
    /// Evaluate the bounds on `[theta_min, theta_max]` by dense sampling.
    pub fn from_range(
        material: &Material,
        theta_min: f64,
        theta_max: f64,
        samples: usize,
    ) -> Result<Self> {
        if !(theta_min > 0.0 && theta_max >= theta_min) {
            return Err(Error::Domain(format!(
                "temperature range [{theta_min}, {theta_max}] must be positive"
            )));
        }
        let samples = samples.max(2);
        let mut b = RunBounds {
            c1: f64::INFINITY,
            c2: 0.0,
            c3: f64::INFINITY,
            c4: 0.0,
            c5: 0.0,
        };
        for k in 0..samples {
            let xi = theta_min + (theta_max - theta_min) * k as f64 / (samples - 1) as f64;
            let (f, fp, fpp) = (
                material.eval_f(xi)?,
                material.eval_fp(xi)?,
                material.eval_fpp(xi)?,
            );
            b.c1 = b.c1.min(f);
            b.c2 = b.c2.max(f);
            b.c3 = b.c3.min(fp);
            b.c4 = b.c4.max(fp);
            b.c5 = b.c5.max(fpp.abs());
        }
        Ok(b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TauBound {
    pub c6: f64,
    pub c7: f64,
    pub c8: f64,
    pub c9: f64,
    pub c11: f64,
    pub tau: f64,
    /// `√2 y₀`, valid on `(0, τ)`.
    pub y_cap: f64,
    /// Bound on `∫₀^τ ‖Θ_xx‖²`.
    pub dissipation_cap: f64,
}

/// Short-time horizon of the `ρ`-weighted functional.
///
/// ```text
/// c6 = c3/c2, c7 = c4/c1, c8 = c5/c1 + c4²/c1²
/// c9 = c8²/(8c6) + c4²c7² + c2²c8²/4, c11 = 1 + 8c9²c10²/c6⁴
/// τ = 1/(4 c11 y0²), y_cap = √2 y0, dissipation_cap = (4/c6)(y0 + √8 c11 y0³)
/// ```
pub fn tau_bound(y0: f64, b: &RunBounds, c10: f64) -> Result<TauBound> {
    for (name, v) in [
        ("c1", b.c1),
        ("c2", b.c2),
        ("c3", b.c3),
        ("c4", b.c4),
        ("c10", c10),
    ] {
        positive(name, v)?;
    }
    if !(b.c5 >= 0.0 && b.c5.is_finite()) {
        return Err(Error::Domain(format!(
            "c5 must be nonnegative, got {}",
            b.c5
        )));
    }
    positive("y0", y0)?;
    let c6 = b.c3 / b.c2;
    let c7 = b.c4 / b.c1;
    let c8 = b.c5 / b.c1 + b.c4 * b.c4 / (b.c1 * b.c1);
    let c9 = c8 * c8 / (8.0 * c6) + b.c4 * b.c4 * c7 * c7 + b.c2 * b.c2 * c8 * c8 / 4.0;
    let c11 = 1.0 + 8.0 * c9 * c9 * c10 * c10 / c6.powi(4);
    Ok(TauBound {
        c6,
        c7,
        c8,
        c9,
        c11,
        tau: 1.0 / (4.0 * c11 * y0 * y0),
        y_cap: std::f64::consts::SQRT_2 * y0,
        dissipation_cap: 4.0 / c6 * (y0 + 8f64.sqrt() * c11 * y0.powi(3)),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GronwallReport {
    pub ok: bool,
    /// `max_t y(t) / (y₀ exp ∫₀ᵗ b)`.
    pub max_ratio: f64,
    /// `max_t (y(t) - y₀ exp ∫₀ᵗ b)`, clipped at zero.
    pub max_violation: f64,
}

/// Check `y(t) ≤ y₀ exp(∫₀ᵗ b)` on a common time grid (trapezoid integral).
pub fn gronwall_check(t: &[f64], y: &[f64], b: &[f64], y0: f64) -> Result<GronwallReport> {
    if t.len() != y.len() || t.len() != b.len() {
        return Err(Error::Structural(format!(
            "series lengths differ: t {}, y {}, b {}",
            t.len(),
            y.len(),
            b.len()
        )));
    }
    let mut integral = 0.0;
    let mut max_ratio = 0.0f64;
    let mut max_violation = 0.0f64;
    for i in 0..t.len() {
        if i > 0 {
            integral += 0.5 * (t[i] - t[i - 1]) * (b[i - 1] + b[i]);
        }
        let bound = y0 * integral.exp();
        let ratio = if bound > 0.0 {
            y[i] / bound
        } else if y[i] > 0.0 {
            f64::INFINITY
        } else {
            1.0
        };
        max_ratio = max_ratio.max(ratio);
        max_violation = max_violation.max(y[i] - bound);
    }
    Ok(GronwallReport {
        ok: max_ratio <= 1.0 + 1e-12,
        max_ratio,
        max_violation: max_violation.max(0.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn unit_identity() -> BaseConstants {
        BaseConstants::for_interval(0.0, 1.0, &Material::identity()).unwrap()
    }

    #[test]
    fn gamma1_closed_form_for_identity_on_unit_interval() {
        let b = unit_identity();
        // independent evaluation of each group for η = K = 1, c1 = √2, c2 = 2, c3 = 1, c4 = 0
        let c6 = 6f64.cbrt() * 2f64.powf(2.0 / 3.0);
        let c7 = 12f64.powi(3) * 4.0 + 6.0;
        let c9 = 8f64.powi(3) * 4.0 + 4.0;
        let expected = 0.5 + (c6 + 2f64.sqrt() + c7) + (c9 + 2.0 + 2.0);
        let p = gamma1_parts(1.0, 1.0, &b).unwrap();
        assert_eq!(p.c5, 0.0);
        assert_eq!(p.c8, 0.0);
        assert!((p.c6 - c6).abs() < 1e-12);
        assert!((p.c7 - c7).abs() < 1e-9);
        assert!((p.c9 - c9).abs() < 1e-9);
        assert!((p.gamma1 - expected).abs() <= 1e-12 * expected);
    }

    #[test]
    fn gamma1_monotonicity() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let b = BaseConstants::for_interval(0.0, 2.0, &Material::log1p()).unwrap();
        for _ in 0..200 {
            let eta: f64 = rng.gen_range(0.01..5.0);
            let k: f64 = rng.gen_range(0.01..5.0);
            assert!(gamma1(eta, k, &b).unwrap() <= gamma1(eta, 2.0 * k, &b).unwrap());
            assert!(gamma1(eta / 8.0, k, &b).unwrap() >= gamma1(eta, k, &b).unwrap());
            assert!(ln_gamma3(k, 1.0, &b).unwrap() <= ln_gamma3(2.0 * k, 1.0, &b).unwrap());
            assert!(ln_gamma4(k, 1.0, &b).unwrap() <= ln_gamma4(2.0 * k, 1.0, &b).unwrap());
        }
    }

    #[test]
    fn gamma2_is_twice_gamma1_at_half() {
        let b = unit_identity();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..50 {
            let k: f64 = rng.gen_range(0.01..10.0);
            assert_eq!(gamma2(k, &b).unwrap() / gamma1(0.5, k, &b).unwrap(), 2.0);
        }
    }

    #[test]
    fn gamma3_matches_direct_formula_where_representable() {
        let b = unit_identity();
        // small K, short T keeps c below the f64 exponent range
        let k = 0.01;
        let t = 1e-3;
        let g1 = gamma1(0.5, k, &b).unwrap();
        let c = (g1 + 2.0 * g1) * (t + k);
        let direct = 2.0 * c.exp().max(1.0 + c * c.exp());
        assert!((gamma3(k, t, &b).unwrap() - direct).abs() <= 1e-12 * direct);
        // T → 0 keeps Γ₃ ≥ 2
        assert!(gamma3(k, 1e-12, &b).unwrap() >= 2.0);
    }

    #[test]
    fn gamma3_and_gamma4_logs_are_finite_for_large_arguments() {
        let b = unit_identity();
        let l3 = ln_gamma3(1.0, 1.0, &b).unwrap();
        assert!(l3.is_finite() && l3 > 700.0);
        assert_eq!(gamma3(1.0, 1.0, &b).unwrap(), f64::INFINITY);
        let l4 = ln_gamma4(1.0, 1.0, &b).unwrap();
        assert!(l4.is_finite() && l4 >= l3);
        let ls = ln_time_shift_constant(2.0, 1.0, &b).unwrap();
        assert!(ls.is_finite());
    }

    #[test]
    fn nonpositive_inputs_are_domain_errors() {
        let b = unit_identity();
        assert!(matches!(gamma1(0.0, 1.0, &b), Err(Error::Domain(_))));
        assert!(matches!(gamma1(1.0, -1.0, &b), Err(Error::Domain(_))));
        assert!(matches!(ln_gamma3(1.0, 0.0, &b), Err(Error::Domain(_))));
        let bad = RunBounds {
            c1: 0.0,
            c2: 1.0,
            c3: 1.0,
            c4: 1.0,
            c5: 0.0,
        };
        assert!(matches!(tau_bound(1.0, &bad, 2.0), Err(Error::Domain(_))));
    }

    #[test]
    fn tau_bound_example() {
        let rb = RunBounds::from_range(&Material::identity(), 1.0, 2.0, 100).unwrap();
        assert_eq!(
            (rb.c1, rb.c2, rb.c3, rb.c4, rb.c5),
            (1.0, 2.0, 1.0, 1.0, 0.0)
        );
        let c10 = 2.0;
        let tb = tau_bound(3.0, &rb, c10).unwrap();
        assert_eq!(tb.c6, 0.5);
        assert_eq!(tb.c7, 1.0);
        assert_eq!(tb.c8, 1.0);
        assert!((tb.c9 - 2.25).abs() < 1e-15);
        let c11 = 1.0 + 8.0 * 2.25f64.powi(2) * 4.0 / 0.0625;
        assert!((tb.c11 - c11).abs() < 1e-9);
        assert!((tb.tau - 1.0 / (4.0 * c11 * 9.0)).abs() < 1e-18);
        assert_eq!(tb.y_cap / 3.0, std::f64::consts::SQRT_2);
        let doubled = tau_bound(6.0, &rb, c10).unwrap();
        assert!((tb.tau / doubled.tau - 4.0).abs() < 1e-12);
    }

    #[test]
    fn gronwall_examples() {
        let t: Vec<f64> = (0..=100).map(|i| i as f64 * 0.01).collect();
        let r = gronwall_check(&t, &vec![2.0; t.len()], &vec![0.0; t.len()], 2.0).unwrap();
        assert!(r.ok);
        assert_eq!(r.max_ratio, 1.0);
        let y: Vec<f64> = t.iter().map(|s| (2.0 * s).exp()).collect();
        let r = gronwall_check(&t, &y, &vec![1.0; t.len()], 1.0).unwrap();
        assert!(!r.ok && r.max_violation > 0.0);
        assert!(gronwall_check(&t, &y[1..], &vec![1.0; t.len()], 1.0).is_err());
    }

    #[test]
    fn pure_functions_are_bit_reproducible() {
        let b = unit_identity();
        let l1 = ConstantsLedger::new(b, 2.0, 0.5, 1.0, 1.0).unwrap();
        let l2 = ConstantsLedger::new(b, 2.0, 0.5, 1.0, 1.0).unwrap();
        assert_eq!(l1, l2);
        assert!(l1.report().contains("Gamma1"));
    }
}
