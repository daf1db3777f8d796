//! Expansion calculus for `I[φ](t) = i·c1·t + c2·t² + c⋆·t^α|log t|^p + O(t³ + t^α R(t))`.
//!
//! Scales are restricted to the log-power family `t^α|log t|^p`, so every
//! rule reduces to exponent arithmetic on [`LogPowerScale`].

mod estermann;
mod families;
mod telescoping;

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{FalError, Result};
use crate::quad::{abs_moment, moment, MeasureSpec, PhiSpec, DEFAULT_TOL};
use crate::specfun::gamma;
use crate::C64;

pub use estermann::{
    estermann_main_terms, estermann_oracle, mu_vector, EstermannModel, EstermannOracle,
    EstermannRemainder, DEFAULT_DEPTH, KAPPA_MINUS, KAPPA_PLUS,
};
pub use families::{dedekind_expansion, floor_power_expansion, power_log_expansion};
pub use telescoping::{constant_a, h_series, telescoping_partial_sum};

/// Exponent slack used in error scales of the form `|log t|^{p+ε}`.
pub const EPSILON: f64 = 0.01;

/// The scale `t^α |log t|^p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogPowerScale {
    pub alpha: f64,
    pub p: f64,
}

impl LogPowerScale {
    pub fn new(alpha: f64, p: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 3.0) || !p.is_finite() {
            return Err(FalError::Domain(format!("scale needs alpha in (0, 3] and finite p, got ({alpha}, {p})")));
        }
        Ok(LogPowerScale { alpha, p })
    }

    /// Order as `t → 0`: `Greater` means `self` is the larger function.
    pub fn compare(&self, other: &Self) -> Ordering {
        match other.alpha.partial_cmp(&self.alpha).unwrap_or(Ordering::Equal) {
            Ordering::Equal => self.p.partial_cmp(&other.p).unwrap_or(Ordering::Equal),
            o => o,
        }
    }

    /// `t^{α₁}|log t|^{p₁} ≫ t^{α₂}|log t|^{p₂}` strictly.
    pub fn dominates(&self, other: &Self) -> bool {
        self.compare(other) == Ordering::Greater
    }

    fn larger(self, other: Self) -> Self {
        if other.dominates(&self) {
            other
        } else {
            self
        }
    }

    /// `t^α |log t|^p`, with the value 0 at `t = 0`.
    pub fn eval(&self, t: f64) -> f64 {
        if t == 0.0 {
            return 0.0;
        }
        t.powf(self.alpha) * t.ln().abs().powf(self.p)
    }
}

/// Coefficients and scales of a two-term expansion.
///
/// `c1` is complex so the `λ = 1` floor expansion fits in one record; every
/// real-valued family stores `Im c1 = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "ExpansionRecord", try_from = "ExpansionRecord")]
pub struct Expansion {
    pub c1: C64,
    pub c2: f64,
    pub c_star: C64,
    pub main: LogPowerScale,
    pub err: LogPowerScale,
    pub has_t3_error: bool,
}

impl Expansion {
    /// Checks `err.alpha ≥ main.alpha` and, when `c⋆ ≠ 0` and the alphas
    /// agree, `p_err ≤ p_main`.
    pub fn new(c1: C64, c2: f64, c_star: C64, main: LogPowerScale, err: LogPowerScale) -> Result<Self> {
        let finite = [c1.re, c1.im, c2, c_star.re, c_star.im].iter().all(|v| v.is_finite());
        if !finite {
            return Err(FalError::Domain("expansion coefficients must be finite".into()));
        }
        if err.alpha < main.alpha {
            return Err(FalError::HypothesisViolation(format!(
                "error scale alpha {} below main alpha {}",
                err.alpha, main.alpha
            )));
        }
        if c_star != C64::new(0.0, 0.0) && err.alpha == main.alpha && err.p > main.p {
            return Err(FalError::HypothesisViolation(format!(
                "error exponent p_err = {} exceeds p_main = {}",
                err.p, main.p
            )));
        }
        Ok(Expansion { c1, c2, c_star, main, err, has_t3_error: true })
    }

    pub fn zero() -> Self {
        let s = LogPowerScale { alpha: 3.0, p: 0.0 };
        Expansion {
            c1: C64::new(0.0, 0.0),
            c2: 0.0,
            c_star: C64::new(0.0, 0.0),
            main: s,
            err: s,
            has_t3_error: true,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.c1 == C64::new(0.0, 0.0) && self.c2 == 0.0 && self.c_star == C64::new(0.0, 0.0)
    }

    /// Expansion of `I[−φ]`, which is `conj(I[φ])`.
    pub fn conjugate(&self) -> Self {
        Expansion { c1: -self.c1.conj(), c_star: self.c_star.conj(), ..*self }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("expansion record serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| FalError::Domain(format!("bad expansion json: {e}")))
    }
}

#[derive(Serialize, Deserialize)]
struct ExpansionRecord {
    c1: [f64; 2],
    c2: f64,
    c_star: [f64; 2],
    alpha: f64,
    p_main: f64,
    p_err: f64,
    has_t3: bool,
    alpha_err: f64,
}

impl From<Expansion> for ExpansionRecord {
    fn from(e: Expansion) -> Self {
        ExpansionRecord {
            c1: [e.c1.re, e.c1.im],
            c2: e.c2,
            c_star: [e.c_star.re, e.c_star.im],
            alpha: e.main.alpha,
            p_main: e.main.p,
            p_err: e.err.p,
            has_t3: e.has_t3_error,
            alpha_err: e.err.alpha,
        }
    }
}

impl TryFrom<ExpansionRecord> for Expansion {
    type Error = FalError;

    fn try_from(r: ExpansionRecord) -> Result<Self> {
        let main = LogPowerScale::new(r.alpha, r.p_main)?;
        let err = LogPowerScale::new(r.alpha_err, r.p_err)?;
        let mut e = Expansion::new(
            C64::new(r.c1[0], r.c1[1]),
            r.c2,
            C64::new(r.c_star[0], r.c_star[1]),
            main,
            err,
        )?;
        e.has_t3_error = r.has_t3;
        Ok(e)
    }
}

fn check_unit(t: f64) -> Result<()> {
    if !(t > 0.0 && t < 1.0) {
        return Err(FalError::Domain(format!("t must lie in (0, 1), got {t}")));
    }
    Ok(())
}

/// `i·c1·t + c2·t² + c⋆·t^α|log t|^p`.
pub fn eval_main_terms(e: &Expansion, t: f64) -> Result<C64> {
    check_unit(t)?;
    Ok(C64::new(0.0, t) * e.c1 + e.c2 * t * t + e.c_star * e.main.eval(t))
}

/// Taylor-type expansion of a `φ` with `∫|φ|^α dμ < ∞`; also returns that
/// integral, the constant of the `O(t^α)` error.
pub fn taylor_expansion(phi: &PhiSpec, mu: &MeasureSpec, alpha: f64) -> Result<(Expansion, f64)> {
    let scale = LogPowerScale::new(alpha, 0.0)?;
    let k = abs_moment(phi, mu, alpha, DEFAULT_TOL)?.value.re;
    if !k.is_finite() || k > 1e300 {
        return Err(FalError::MomentDiverges(format!("moment of order {alpha} is {k}")));
    }
    let c1 = if alpha >= 1.0 { moment(phi, mu, 1, DEFAULT_TOL)?.value.re } else { 0.0 };
    let c2 = if alpha >= 2.0 { -0.5 * moment(phi, mu, 2, DEFAULT_TOL)?.value.re } else { 0.0 };
    let e = Expansion::new(C64::new(c1, 0.0), c2, C64::new(0.0, 0.0), scale, scale)?;
    Ok((e, k))
}

/// Polar data `(α − s)^ξ G₀(s) = ϱ + O(|s − α|^ρ)` of a Mellin transform.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MellinPolarData {
    pub alpha: f64,
    pub xi: f64,
    pub rho: f64,
    pub varrho: C64,
}

impl MellinPolarData {
    pub fn new(alpha: f64, xi: f64, rho: f64, varrho: C64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 3.0) || !(rho > 0.0 && rho < 1.0) {
            return Err(FalError::Domain(format!("need alpha in (0, 3), rho in (0, 1); got {alpha}, {rho}")));
        }
        Ok(MellinPolarData { alpha, xi, rho, varrho })
    }
}

/// `c⋆` from the polar behaviour: `−ϱ/Γ(ξ+1)` at `α = 1`, `ϱ/(2Γ(ξ+1))`
/// at `α = 2`, `ϱΓ(−α)/Γ(ξ)` otherwise.
pub fn mellin_cstar(d: &MellinPolarData) -> Result<C64> {
    let g = |z: f64| gamma(C64::new(z, 0.0));
    if d.alpha == 1.0 {
        Ok(-d.varrho / g(d.xi + 1.0)?)
    } else if d.alpha == 2.0 {
        Ok(0.5 * d.varrho / g(d.xi + 1.0)?)
    } else {
        Ok(d.varrho * g(-d.alpha)? / g(d.xi)?)
    }
}

fn violation(msg: String) -> FalError {
    FalError::HypothesisViolation(msg)
}

/// Order two expansions so that the first has the dominant main scale.
fn sorted<'a>(e1: &'a Expansion, e2: &'a Expansion) -> (&'a Expansion, &'a Expansion, bool) {
    if e2.main.dominates(&e1.main) {
        (e2, e1, true)
    } else {
        (e1, e2, false)
    }
}

fn check_standing(e: &Expansion, k: usize) -> Result<()> {
    if e.err.alpha < e.main.alpha || (e.err.alpha == e.main.alpha && e.err.p > e.main.p) {
        return Err(violation(format!(
            "R_{k} = O(L_{k}) fails: error scale ({}, {}) above main ({}, {})",
            e.err.alpha, e.err.p, e.main.alpha, e.main.p
        )));
    }
    Ok(())
}

/// Error scale of `φ₁ + φ₂` for `e1` dominant.
fn sum_error(e1: &Expansion, e2: &Expansion) -> Result<LogPowerScale> {
    let (a1, a2) = (e1.main.alpha, e2.main.alpha);
    if a1 > 2.0 {
        return Err(violation(format!("alpha_1 = {a1} > 2")));
    }
    check_standing(e1, 1)?;
    check_standing(e2, 2)?;
    if a1 == 2.0 && e1.main.p < 0.0 {
        return Err(violation(format!(
            "t^2 = O(t^alpha_1 L_1) fails: alpha_1 = 2 with p_L1 = {} < 0",
            e1.main.p
        )));
    }
    if a1 < a2 {
        return Ok(e1.err);
    }
    let at = |p: f64| LogPowerScale { alpha: a1, p };
    let (pl1, pl2) = (e1.main.p, e2.main.p);
    let mut r = e1.err.larger(at(pl2)).larger(at(0.5 * (pl1 + pl2)));
    if a1 == 2.0 {
        r = r.larger(at(0.5 * pl1));
    }
    Ok(r)
}

/// Expansion of `φ₁ + φ₂`: `c1` adds, `c⋆` and the main scale come from
/// the dominant summand, and the error follows the three-case rule.
pub fn add_expansions(e1: &Expansion, e2: &Expansion) -> Result<Expansion> {
    if e1.is_zero() && e2.is_zero() {
        return Ok(Expansion::zero());
    }
    let (d, s, _) = sorted(e1, e2);
    let err = sum_error(d, s)?;
    Ok(Expansion {
        c1: d.c1 + s.c1,
        c2: 0.0,
        c_star: d.c_star,
        main: d.main,
        err,
        has_t3_error: d.has_t3_error || s.has_t3_error,
    })
}

/// Main terms of `∫ e^{i t₁φ₁ + i t₂φ₂} dμ` with the error scale taken at
/// `t₊ = max(t₁, t₂)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoFrequencyTerms {
    pub value: C64,
    pub t_plus: f64,
    pub err: LogPowerScale,
}

/// `1 + i c1(φ₁)t₁ + i c1(φ₂)t₂ + c⋆(φ₁)·t₁^{α₁}L₁(t₁)`, where `φ₁` is the
/// summand with the dominant main scale.
pub fn two_frequency_main_terms(e1: &Expansion, e2: &Expansion, t1: f64, t2: f64) -> Result<TwoFrequencyTerms> {
    for t in [t1, t2] {
        if !(0.0..1.0).contains(&t) {
            return Err(FalError::Domain(format!("frequencies must lie in [0, 1), got {t}")));
        }
    }
    let t_plus = t1.max(t2);
    if t_plus == 0.0 {
        return Err(FalError::Domain("at least one frequency must be positive".into()));
    }
    let (d, s, swapped) = sorted(e1, e2);
    let (td, ts) = if swapped { (t2, t1) } else { (t1, t2) };
    let err = if d.is_zero() && s.is_zero() { d.err } else { sum_error(d, s)? };
    let i = C64::new(0.0, 1.0);
    let value = 1.0 + i * d.c1 * td + i * s.c1 * ts + d.c_star * d.main.eval(td);
    Ok(TwoFrequencyTerms { value, t_plus, err })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sc(a: f64, p: f64) -> LogPowerScale {
        LogPowerScale::new(a, p).unwrap()
    }

    #[test]
    fn scale_order() {
        assert!(sc(1.0, 0.0).dominates(&sc(2.0, 5.0)));
        assert!(sc(2.0, 3.0).dominates(&sc(2.0, 2.01)));
        assert!(!sc(2.0, 1.0).dominates(&sc(2.0, 1.0)));
        assert!(LogPowerScale::new(0.0, 1.0).is_err());
        assert!(LogPowerScale::new(3.5, 1.0).is_err());
    }

    #[test]
    fn main_terms() {
        let e = Expansion::new(C64::new(1.0, 0.0), 0.0, C64::new(0.0, 0.0), sc(1.0, 0.0), sc(2.0, 0.0)).unwrap();
        assert_eq!(eval_main_terms(&e, 0.01).unwrap(), C64::new(0.0, 0.01));
        assert_eq!(eval_main_terms(&Expansion::zero(), 0.3).unwrap(), C64::new(0.0, 0.0));
        assert!(eval_main_terms(&e, 1.0).is_err());
    }

    #[test]
    fn mellin_cases() {
        let one = C64::new(1.0, 0.0);
        let v = mellin_cstar(&MellinPolarData::new(1.0, 1.0, 0.5, one).unwrap()).unwrap();
        assert!((v + 1.0).norm() < 1e-15);
        let v = mellin_cstar(&MellinPolarData::new(2.0, 1.0, 0.5, C64::new(2.0, 0.0)).unwrap()).unwrap();
        assert!((v - 1.0).norm() < 1e-15);
        let v = mellin_cstar(&MellinPolarData::new(0.5, 1.0, 0.5, one).unwrap()).unwrap();
        assert!((v.re + 3.5449077018110318).abs() < 1e-13);
        assert!(matches!(
            mellin_cstar(&MellinPolarData::new(0.5, -1.0, 0.5, one).unwrap()),
            Err(FalError::Pole(_))
        ));
    }

    #[test]
    fn standing_assumption_is_enforced() {
        let r = Expansion::new(C64::new(0.0, 0.0), 0.0, C64::new(1.0, 0.0), sc(2.0, 1.0), sc(2.0, 1.5));
        assert!(matches!(r, Err(FalError::HypothesisViolation(_))));
    }

    #[test]
    fn json_field_names() {
        let e = Expansion::new(C64::new(0.5, -0.25), -0.1, C64::new(-1.0, 2.0), sc(2.0, 3.0), sc(2.0, 2.01)).unwrap();
        let v: serde_json::Value = serde_json::from_str(&e.to_json()).unwrap();
        for key in ["c1", "c2", "c_star", "alpha", "p_main", "p_err", "has_t3", "alpha_err"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert_eq!(Expansion::from_json(&e.to_json()).unwrap(), e);
    }
}
