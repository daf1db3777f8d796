//! Numerical oracle for `I[φ](t) = ∫ (e^{itφ(x)} − 1) dμ(x)` on `[0, 1]`.
//!
//! Floor-type observables are summed over their level sets with an
//! Abel–Plana tail; singular power-log profiles are split where
//! `t|φ| = 1`, integrated directly on the tame side and by contour
//! rotation on the oscillatory side.

pub mod adaptive;
pub mod closed;
pub mod levels;
pub mod oscillatory;
pub mod phase;
pub mod profile;

use std::f64::consts::LN_2;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{FalError, Result};
use crate::C64;

pub use adaptive::{integrate_adaptive, integrate_breaks, integrate_to_infinity, QuadResult};
pub use oscillatory::oscillatory_tail;

/// Default absolute tolerance of the oracle.
pub const DEFAULT_TOL: f64 = 1e-10;

pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type ComplexFn = Arc<dyn Fn(C64) -> C64 + Send + Sync>;

/// A real function on `(0, 1]`, optionally with its holomorphic extension
/// to a neighbourhood of the segment (needed wherever contours leave the
/// real axis).
#[derive(Clone)]
pub struct AnalyticFn {
    pub real: RealFn,
    pub complex: Option<ComplexFn>,
}

impl AnalyticFn {
    pub fn real_only(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        AnalyticFn { real: Arc::new(f), complex: None }
    }

    pub fn analytic(
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        fc: impl Fn(C64) -> C64 + Send + Sync + 'static,
    ) -> Self {
        AnalyticFn { real: Arc::new(f), complex: Some(Arc::new(fc)) }
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.real)(x)
    }

    pub fn eval_c(&self, z: C64) -> Option<C64> {
        self.complex.as_ref().map(|f| f(z))
    }
}

impl fmt::Debug for AnalyticFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AnalyticFn {{ extension: {} }}", self.complex.is_some())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeasureKind {
    Lebesgue,
    GaussKuzmin,
    Custom,
}

/// A probability density on `[0, 1]` with its value at 0 recorded.
#[derive(Clone, Debug)]
pub struct MeasureSpec {
    pub kind: MeasureKind,
    pub name: String,
    pub f0: f64,
    density: AnalyticFn,
}

impl MeasureSpec {
    pub fn lebesgue() -> Self {
        MeasureSpec {
            kind: MeasureKind::Lebesgue,
            name: "lebesgue".into(),
            f0: 1.0,
            density: AnalyticFn::analytic(|_| 1.0, |_| C64::new(1.0, 0.0)),
        }
    }

    pub fn gauss_kuzmin() -> Self {
        MeasureSpec {
            kind: MeasureKind::GaussKuzmin,
            name: "gauss-kuzmin".into(),
            f0: 1.0 / LN_2,
            density: AnalyticFn::analytic(
                |x| 1.0 / ((1.0 + x) * LN_2),
                |z| 1.0 / ((z + 1.0) * LN_2),
            ),
        }
    }

    /// A user density; rejected unless it is non-negative and integrates
    /// to 1 within 1e−10.
    pub fn custom(name: &str, density: AnalyticFn) -> Result<Self> {
        let f = density.real.clone();
        for i in 0..=256 {
            let x = i as f64 / 256.0;
            let v = f(x);
            if !(v >= 0.0) || !v.is_finite() {
                return Err(FalError::Domain(format!("density of {name} is {v} at {x}")));
            }
        }
        let (mass, _) = adaptive::integrate_real(|x| f(x), 0.0, 1.0, 1e-13)?;
        if (mass - 1.0).abs() > 1e-10 {
            return Err(FalError::Domain(format!("density of {name} integrates to {mass}")));
        }
        Ok(MeasureSpec { kind: MeasureKind::Custom, name: name.into(), f0: f(0.0), density })
    }

    pub fn density(&self, x: f64) -> f64 {
        self.density.eval(x)
    }

    pub fn density_c(&self, z: C64) -> Option<C64> {
        self.density.eval_c(z)
    }

    pub fn is_analytic(&self) -> bool {
        self.density.complex.is_some()
    }

    /// `μ([0, x])`.
    pub fn cdf(&self, x: f64) -> Result<f64> {
        match self.kind {
            MeasureKind::Lebesgue => Ok(x),
            MeasureKind::GaussKuzmin => Ok(x.ln_1p() / LN_2),
            MeasureKind::Custom => {
                if x <= 0.0 {
                    return Ok(0.0);
                }
                let f = self.density.real.clone();
                adaptive::integrate_real(|y| f(y), 0.0, x, 1e-13 * x).map(|r| r.0)
            }
        }
    }

    /// `μ((1/(n+1), 1/n])`.
    pub fn level_mass(&self, n: u64) -> Result<f64> {
        let nf = n as f64;
        match self.kind {
            MeasureKind::Lebesgue => Ok(1.0 / (nf * (nf + 1.0))),
            MeasureKind::GaussKuzmin => Ok((1.0 / (nf * (nf + 2.0))).ln_1p() / LN_2),
            MeasureKind::Custom => {
                let f = self.density.real.clone();
                adaptive::integrate_real(
                    |v| {
                        let w = nf + v;
                        f(1.0 / w) / (w * w)
                    },
                    0.0,
                    1.0,
                    1e-13 / (nf * nf),
                )
                .map(|r| r.0)
            }
        }
    }

    /// Holomorphic continuation of `n ↦ level_mass(n)`, for `Re z ≥ 1`.
    pub fn level_mass_c(&self, z: C64) -> Option<C64> {
        match self.kind {
            MeasureKind::Lebesgue => Some(1.0 / (z * (z + 1.0))),
            MeasureKind::GaussKuzmin => {
                Some(crate::specfun::clog1p(1.0 / (z * (z + 2.0))) / LN_2)
            }
            MeasureKind::Custom => {
                let fc = self.density.complex.clone()?;
                Some(levels::unit_panel(|v| {
                    let w = z + v;
                    fc(1.0 / w) / (w * w)
                }))
            }
        }
    }
}

/// Observable families the oracle and the expansion calculus know about.
#[derive(Clone)]
pub enum PhiFamily {
    /// `a·x^{−β}·|log x|^λ`
    PowerLog { a: f64, beta: f64, lambda: f64 },
    /// `⌊1/x⌋^λ`
    FloorPower { lambda: f64 },
    /// `⌊1/x⌋^λ − x^{−λ}`, bounded for `λ ≤ 1`
    FloorRemainder { lambda: f64 },
    /// `⌊1/x⌋ − ⌊1/T(x)⌋` with `⌊1/0⌋ := 0`
    Dedekind,
    /// `x^{−1/2}(p·log(1/x) + q) + r`
    EstermannComponent { p: f64, q: f64, r: f64 },
    /// Arbitrary callable; `bound` is the integrability metadata (`sup |φ|`).
    Custom { f: RealFn, bound: Option<f64> },
}

impl fmt::Debug for PhiFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PhiFamily::PowerLog { a, beta, lambda } => {
                write!(f, "PowerLog {{ a: {a}, beta: {beta}, lambda: {lambda} }}")
            }
            PhiFamily::FloorPower { lambda } => write!(f, "FloorPower {{ lambda: {lambda} }}"),
            PhiFamily::FloorRemainder { lambda } => {
                write!(f, "FloorRemainder {{ lambda: {lambda} }}")
            }
            PhiFamily::Dedekind => write!(f, "Dedekind"),
            PhiFamily::EstermannComponent { p, q, r } => {
                write!(f, "EstermannComponent {{ p: {p}, q: {q}, r: {r} }}")
            }
            PhiFamily::Custom { bound, .. } => write!(f, "Custom {{ bound: {bound:?} }}"),
        }
    }
}

/// An observable: a family plus an optional bounded remainder.
#[derive(Clone, Debug)]
pub struct PhiSpec {
    pub family: PhiFamily,
    pub remainder: Option<AnalyticFn>,
}

impl PhiSpec {
    fn new(family: PhiFamily) -> Self {
        PhiSpec { family, remainder: None }
    }

    pub fn power_log(a: f64, beta: f64, lambda: f64) -> Result<Self> {
        if a == 0.0 || !a.is_finite() {
            return Err(FalError::Domain(format!("power-log amplitude must be non-zero, got {a}")));
        }
        if !(beta > 0.0) || !(lambda >= 0.0) {
            return Err(FalError::Domain(format!("need beta > 0, lambda >= 0 (got {beta}, {lambda})")));
        }
        Ok(Self::new(PhiFamily::PowerLog { a, beta, lambda }))
    }

    pub fn floor_power(lambda: f64) -> Result<Self> {
        if !(lambda >= 0.0) {
            return Err(FalError::Domain(format!("floor power needs lambda >= 0, got {lambda}")));
        }
        Ok(Self::new(PhiFamily::FloorPower { lambda }))
    }

    pub fn floor_remainder(lambda: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(FalError::Domain(format!("floor remainder needs 0 <= lambda <= 1, got {lambda}")));
        }
        Ok(Self::new(PhiFamily::FloorRemainder { lambda }))
    }

    pub fn dedekind() -> Self {
        Self::new(PhiFamily::Dedekind)
    }

    pub fn estermann_component(p: f64, q: f64, r: f64) -> Self {
        Self::new(PhiFamily::EstermannComponent { p, q, r })
    }

    pub fn custom(f: impl Fn(f64) -> f64 + Send + Sync + 'static, bound: Option<f64>) -> Self {
        Self::new(PhiFamily::Custom { f: Arc::new(f), bound })
    }

    pub fn with_remainder(mut self, remainder: AnalyticFn) -> Self {
        self.remainder = Some(remainder);
        self
    }

    pub fn tag(&self) -> &'static str {
        match self.family {
            PhiFamily::PowerLog { .. } => "power-log",
            PhiFamily::FloorPower { .. } => "floor-power",
            PhiFamily::FloorRemainder { .. } => "floor-remainder",
            PhiFamily::Dedekind => "dedekind",
            PhiFamily::EstermannComponent { .. } => "estermann-component",
            PhiFamily::Custom { .. } => "custom",
        }
    }

    /// `(a, β, λ)` of the singular part at 0, when the family has one.
    pub fn singular_part(&self) -> Option<(f64, f64, f64)> {
        match self.family {
            PhiFamily::PowerLog { a, beta, lambda } => Some((a, beta, lambda)),
            PhiFamily::FloorPower { lambda } => Some((1.0, lambda, 0.0)),
            PhiFamily::EstermannComponent { p, .. } => Some((p, 0.5, 1.0)),
            _ => None,
        }
    }

    /// Pointwise value on `(0, 1]`.
    pub fn eval(&self, x: f64) -> f64 {
        let base = match &self.family {
            PhiFamily::PowerLog { a, beta, lambda } => {
                a * x.powf(-beta) * (-x.ln()).powf(*lambda)
            }
            PhiFamily::FloorPower { lambda } => (1.0 / x).floor().powf(*lambda),
            PhiFamily::FloorRemainder { lambda } => {
                (1.0 / x).floor().powf(*lambda) - x.powf(-lambda)
            }
            PhiFamily::Dedekind => {
                let n = (1.0 / x).floor();
                let tx = 1.0 / x - n;
                let m = if tx > 0.0 { (1.0 / tx).floor() } else { 0.0 };
                n - m
            }
            PhiFamily::EstermannComponent { p, q, r } => {
                x.powf(-0.5) * (p * (-x.ln()) + q) + r
            }
            PhiFamily::Custom { f, .. } => f(x),
        };
        match &self.remainder {
            Some(rem) => base + rem.eval(x),
            None => base,
        }
    }
}

fn check_t(t: f64) -> Result<()> {
    if !(t > 0.0 && t < 1.0) {
        return Err(FalError::Domain(format!("frequency must lie in (0, 1), got {t}")));
    }
    Ok(())
}

/// `I[φ](t)` for `t ∈ (0, 1)`.
pub fn fourier_integral_numeric(phi: &PhiSpec, mu: &MeasureSpec, t: f64, tol: f64) -> Result<QuadResult> {
    check_t(t)?;
    fourier_integral_any(phi, mu, t, tol)
}

/// As [`fourier_integral_numeric`] without the `t < 1` restriction; the
/// level-set route still rejects frequencies it cannot contain.
pub(crate) fn fourier_integral_any(phi: &PhiSpec, mu: &MeasureSpec, t: f64, tol: f64) -> Result<QuadResult> {
    let floor_like_remainder = || {
        Err(FalError::UnsupportedFamily(format!("{} with a remainder term", phi.tag())))
    };
    match &phi.family {
        PhiFamily::PowerLog { a, beta, lambda } => {
            let prof = profile::Profile::new(*a, 0.0, 0.0, *beta, *lambda);
            profile::fourier(&prof, mu, phi.remainder.as_ref(), t, tol)
        }
        PhiFamily::EstermannComponent { p, q, r } => {
            let prof = profile::Profile::new(*p, *q, *r, 0.5, 1.0);
            profile::fourier(&prof, mu, phi.remainder.as_ref(), t, tol)
        }
        PhiFamily::FloorPower { lambda } => {
            if phi.remainder.is_some() {
                return floor_like_remainder();
            }
            levels::floor_fourier(*lambda, mu, t, tol)
        }
        PhiFamily::FloorRemainder { lambda } => {
            if phi.remainder.is_some() {
                return floor_like_remainder();
            }
            levels::floor_remainder_fourier(*lambda, mu, t, tol)
        }
        PhiFamily::Dedekind => {
            if phi.remainder.is_some() {
                return floor_like_remainder();
            }
            if mu.kind != MeasureKind::GaussKuzmin {
                return Err(FalError::UnsupportedFamily(
                    "the dedekind observable is only implemented over the Gauss-Kuzmin measure".into(),
                ));
            }
            closed::dedekind_gk(t)
        }
        PhiFamily::Custom { f, bound } => {
            if bound.is_none() {
                return Err(FalError::UnsupportedFamily(
                    "custom observable without a bound".into(),
                ));
            }
            let rem = phi.remainder.clone();
            let g = |x: f64| {
                let v = f(x) + rem.as_ref().map_or(0.0, |r| r.eval(x));
                crate::specfun::cexpm1(C64::new(0.0, t * v)) * mu.density(x)
            };
            integrate_adaptive(g, 0.0, 1.0, tol)
        }
    }
}

/// `∫ φ^k dμ`.
pub fn moment(phi: &PhiSpec, mu: &MeasureSpec, k: u32, tol: f64) -> Result<QuadResult> {
    match &phi.family {
        PhiFamily::PowerLog { a, beta, lambda } => {
            let prof = profile::Profile::new(*a, 0.0, 0.0, *beta, *lambda);
            profile::moment(&prof, mu, phi.remainder.as_ref(), k, tol)
        }
        PhiFamily::EstermannComponent { p, q, r } => {
            let prof = profile::Profile::new(*p, *q, *r, 0.5, 1.0);
            profile::moment(&prof, mu, phi.remainder.as_ref(), k, tol)
        }
        PhiFamily::FloorPower { lambda } if phi.remainder.is_none() => {
            levels::floor_moment(*lambda, mu, k, tol)
        }
        PhiFamily::FloorRemainder { lambda } if phi.remainder.is_none() => {
            levels::floor_remainder_moment(*lambda, mu, k, tol)
        }
        PhiFamily::Dedekind => Err(FalError::MomentDiverges(
            "the dedekind observable is not absolutely integrable".into(),
        )),
        PhiFamily::Custom { f, bound } => {
            if bound.is_none() {
                return Err(FalError::UnsupportedFamily("custom observable without a bound".into()));
            }
            let rem = phi.remainder.clone();
            let g = |x: f64| {
                let v = f(x) + rem.as_ref().map_or(0.0, |r| r.eval(x));
                C64::new(v.powi(k as i32) * mu.density(x), 0.0)
            };
            integrate_adaptive(g, 0.0, 1.0, tol)
        }
        _ => Err(FalError::UnsupportedFamily(format!("{} with a remainder term", phi.tag()))),
    }
}

/// `∫ |φ|^order dμ` for real `order > 0`.
pub fn abs_moment(phi: &PhiSpec, mu: &MeasureSpec, order: f64, tol: f64) -> Result<QuadResult> {
    if !(order > 0.0) || !order.is_finite() {
        return Err(FalError::Domain(format!("moment order must be positive, got {order}")));
    }
    match &phi.family {
        PhiFamily::PowerLog { a, beta, lambda } => {
            let prof = profile::Profile::new(*a, 0.0, 0.0, *beta, *lambda);
            profile::abs_moment(&prof, mu, phi.remainder.as_ref(), order, tol)
        }
        PhiFamily::EstermannComponent { p, q, r } => {
            let prof = profile::Profile::new(*p, *q, *r, 0.5, 1.0);
            profile::abs_moment(&prof, mu, phi.remainder.as_ref(), order, tol)
        }
        PhiFamily::FloorPower { lambda } if phi.remainder.is_none() => {
            levels::level_power_sum(lambda * order, mu, tol)
        }
        PhiFamily::FloorRemainder { lambda } if phi.remainder.is_none() => {
            levels::floor_remainder_abs_moment(*lambda, mu, order, tol)
        }
        PhiFamily::Dedekind => Err(FalError::MomentDiverges(
            "the dedekind observable is not absolutely integrable".into(),
        )),
        PhiFamily::Custom { bound: None, .. } => {
            Err(FalError::UnsupportedFamily("custom observable without a bound".into()))
        }
        _ => {
            // bounded with jumps at the reciprocals 1/n
            let mut breaks: Vec<f64> = vec![0.0];
            breaks.extend((1..=256u32).rev().map(|n| 1.0 / n as f64));
            let g = |x: f64| C64::new(phi.eval(x).abs().powf(order) * mu.density(x), 0.0);
            integrate_breaks(g, &breaks, tol, adaptive::DEFAULT_BUDGET)
        }
    }
}

/// Both sides of the Gauss-map invariance `∫ g∘T dμ = ∫ g dμ` under the
/// Gauss–Kuzmin measure; the left side is summed over the inverse branches
/// `x = 1/(n + y)`.
pub fn gk_pullback_integrals(g: &dyn Fn(f64) -> f64, tol: f64) -> Result<(f64, f64)> {
    const BRANCHES: u64 = 400;
    let per = tol / (4.0 * BRANCHES as f64);
    let mut lhs = 0.0;
    for n in 1..=BRANCHES {
        let nf = n as f64;
        let (v, _) = adaptive::integrate_real(
            |x| {
                let y = 1.0 / x - nf;
                g(y.clamp(0.0, 1.0)) / ((1.0 + x) * LN_2)
            },
            1.0 / (nf + 1.0),
            1.0 / nf,
            per,
        )?;
        lhs += v;
    }
    // remaining branches: Σ_{n>N} 1/((n+y)(n+y+1)) = 1/(N+1+y)
    let (tail, _) = adaptive::integrate_real(
        |y| g(y) / ((BRANCHES as f64 + 1.0 + y) * LN_2),
        0.0,
        1.0,
        tol / 4.0,
    )?;
    lhs += tail;
    let (rhs, _) = adaptive::integrate_real(|x| g(x) / ((1.0 + x) * LN_2), 0.0, 1.0, tol / 4.0)?;
    Ok((lhs, rhs))
}

/// `|∫ g∘T dμ − ∫ g dμ|` for the Gauss–Kuzmin measure.
pub fn verify_gk_invariance(g: &dyn Fn(f64) -> f64, tol: f64) -> Result<f64> {
    let (lhs, rhs) = gk_pullback_integrals(g, tol)?;
    Ok((lhs - rhs).abs())
}
