//! Oracle for singular profiles `φ(x) = x^{−β}(p·L^λ + q) + r`, `L = log(1/x)`.
//!
//! In the variable `u = L` the modulus of the singular part is `e^{G(u)}` with
//! `G(u) = βu + log(|p|u^λ + sq)`, `s = sign p`, increasing on the branch
//! that reaches `x = 0`. The interval is split at `t·e^{G(u₀)} = 1`; beyond the
//! split the substitution `y = t·e^{G(u)}` turns the integral into a Fourier
//! tail handled by contour rotation.

use crate::error::{FalError, Result};
use crate::quad::adaptive::{integrate_adaptive, integrate_to_infinity, QuadResult};
use crate::quad::oscillatory::oscillatory_tail_full;
use crate::quad::{AnalyticFn, MeasureSpec};
use crate::specfun::cexpm1;
use crate::C64;

/// Distance kept between the split point and the zero of the log argument,
/// so the complex inversion never approaches its branch point.
const BRANCH_MARGIN: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Profile {
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub beta: f64,
    pub lambda: f64,
}

impl Profile {
    pub fn new(p: f64, q: f64, r: f64, beta: f64, lambda: f64) -> Self {
        let (mut p, mut q, mut lambda) = (p, q, lambda);
        if p == 0.0 {
            p = q;
            q = 0.0;
            lambda = 0.0;
        }
        if lambda == 0.0 {
            p += q;
            q = 0.0;
        }
        Profile { p, q, r, beta, lambda }
    }

    fn sign(&self) -> f64 {
        self.p.signum()
    }

    fn sq(&self) -> f64 {
        self.sign() * self.q
    }

    /// `φ(e^{−u})`.
    pub fn value_u(&self, u: f64) -> f64 {
        let pl = if self.lambda == 0.0 { 1.0 } else { u.powf(self.lambda) };
        (self.beta * u).exp() * (self.p * pl + self.q) + self.r
    }

    fn branch_start(&self) -> f64 {
        let sq = self.sq();
        if sq < 0.0 {
            (-sq / self.p.abs()).powf(1.0 / self.lambda)
        } else {
            0.0
        }
    }

    fn g(&self, u: f64) -> f64 {
        let pl = if self.lambda == 0.0 { 1.0 } else { u.powf(self.lambda) };
        self.beta * u + (self.p.abs() * pl + self.sq()).ln()
    }

    fn g_prime(&self, u: f64) -> f64 {
        if self.lambda == 0.0 {
            return self.beta;
        }
        let a = self.p.abs();
        self.beta + self.lambda * a * u.powf(self.lambda - 1.0) / (a * u.powf(self.lambda) + self.sq())
    }

    fn g_c(&self, u: C64) -> C64 {
        if self.lambda == 0.0 {
            return u * self.beta + self.p.abs().ln();
        }
        let pl = (u.ln() * self.lambda).exp();
        u * self.beta + (pl * self.p.abs() + self.sq()).ln()
    }

    fn g_prime_c(&self, u: C64) -> C64 {
        if self.lambda == 0.0 {
            return C64::new(self.beta, 0.0);
        }
        let a = self.p.abs();
        let pl = (u.ln() * self.lambda).exp();
        self.beta + pl / u * (self.lambda * a) / (pl * a + self.sq())
    }

    /// Real `u` on the monotone branch with `G(u) = target`.
    fn solve_real(&self, target: f64) -> Option<f64> {
        if self.lambda == 0.0 {
            let u = (target - self.p.abs().ln()) / self.beta;
            return (u > 0.0).then_some(u);
        }
        let lo0 = self.branch_start();
        let g_lo = if self.sq() > 0.0 { self.g(0.0) } else { f64::NEG_INFINITY };
        if g_lo >= target {
            return None;
        }
        let mut lo = lo0;
        let mut hi = lo0 + 1.0;
        while self.g(hi) < target {
            lo = hi;
            hi = lo0 + 2.0 * (hi - lo0);
            if hi > 1e12 {
                return None;
            }
        }
        let mut u = 0.5 * (lo + hi);
        for _ in 0..200 {
            let gv = self.g(u) - target;
            if gv > 0.0 {
                hi = u;
            } else {
                lo = u;
            }
            let step = gv / self.g_prime(u);
            let mut next = u - step;
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - u).abs() <= 1e-15 * u.abs().max(1.0) {
                return Some(next);
            }
            u = next;
        }
        Some(u)
    }

    /// Complex `u` with `G(u) = log(y/t)`.
    fn solve_complex(&self, y: C64, t: f64) -> Option<C64> {
        let target = (y / t).ln();
        if self.lambda == 0.0 {
            return Some((target - self.p.abs().ln()) / self.beta);
        }
        let ur = self.solve_real(target.re)?;
        let mut u = C64::new(ur, target.im / self.g_prime(ur));
        let mut res = self.g_c(u) - target;
        for _ in 0..100 {
            let step = res / self.g_prime_c(u);
            let mut damp = 1.0;
            let mut next;
            let mut next_res;
            loop {
                next = u - step * damp;
                next_res = self.g_c(next) - target;
                if next_res.norm() < res.norm() || damp < 1e-4 {
                    break;
                }
                damp *= 0.5;
            }
            let moved = (next - u).norm();
            u = next;
            res = next_res;
            if moved <= 1e-14 * u.norm().max(1.0) || res.norm() < 1e-15 {
                return Some(u);
            }
        }
        (res.norm() < 1e-12).then_some(u)
    }
}

/// A complex weight `f(x)·e^{itR(x)}` and its extension.
struct Weight<'a> {
    mu: &'a MeasureSpec,
    rem: Option<&'a AnalyticFn>,
    t: f64,
}

impl Weight<'_> {
    fn real(&self, x: f64) -> C64 {
        let f = C64::new(self.mu.density(x), 0.0);
        match self.rem {
            Some(r) => f * C64::new(0.0, self.t * r.eval(x)).exp(),
            None => f,
        }
    }

    fn complex(&self, z: C64) -> C64 {
        let f = self.mu.density_c(z).unwrap_or(C64::new(f64::NAN, 0.0));
        match self.rem.and_then(|r| r.eval_c(z)) {
            Some(rv) => f * (C64::new(0.0, self.t) * rv).exp(),
            None => f,
        }
    }

    /// `∫_0^{x0}` of the weight.
    fn mass_below(&self, x0: f64, tol: f64) -> Result<QuadResult> {
        if self.rem.is_none() {
            let v = self.mu.cdf(x0)?;
            return Ok(QuadResult { value: C64::new(v, 0.0), error_estimate: 1e-16, evaluations: 0 });
        }
        if x0 <= 0.0 {
            return Ok(QuadResult::zero());
        }
        integrate_adaptive(|x| self.real(x), 0.0, x0, tol)
    }
}

pub(crate) fn fourier(
    prof: &Profile,
    mu: &MeasureSpec,
    rem: Option<&AnalyticFn>,
    t: f64,
    tol: f64,
) -> Result<QuadResult> {
    if !mu.is_analytic() {
        return Err(FalError::UnsupportedFamily(format!(
            "measure {} has no holomorphic extension",
            mu.name
        )));
    }
    if let Some(r) = rem {
        if r.complex.is_none() {
            return Err(FalError::UnsupportedFamily(
                "remainder without a holomorphic extension".into(),
            ));
        }
    }
    let weight = Weight { mu, rem, t };
    // I[φ + R] = ∫(e^{itφ} − 1)e^{itR} dμ + ∫(e^{itR} − 1) dμ
    let mut total = match rem {
        Some(r) => integrate_adaptive(
            |x| cexpm1(C64::new(0.0, t * r.eval(x))) * mu.density(x),
            0.0,
            1.0,
            tol / 4.0,
        )?,
        None => QuadResult::zero(),
    };
    let phase_r = C64::from_polar(1.0, t * prof.r);
    if prof.p == 0.0 {
        let mass = weight.mass_below(1.0, tol / 4.0)?;
        return Ok(total.plus(mass.scale(phase_r - 1.0)));
    }

    let margin = if prof.lambda == 0.0 { 0.0 } else { BRANCH_MARGIN };
    let u_lo = prof.branch_start() + margin;
    let target = (1.0 / t).ln();
    let u0 = match prof.solve_real(target) {
        Some(u) if u > u_lo => u,
        _ => u_lo,
    };
    let x0 = (-u0).exp();

    if u0 > 0.0 {
        let direct = integrate_adaptive(
            |u| {
                let x = (-u).exp();
                cexpm1(C64::new(0.0, t * prof.value_u(u))) * weight.real(x) * x
            },
            0.0,
            u0,
            tol / 4.0,
        )?;
        total = total.plus(direct);
    }

    let y0 = t * prof.g(u0).exp();
    let sign = prof.sign();
    let w = |y: C64| match prof.solve_complex(y, t) {
        Some(u) => {
            let x = (-u).exp();
            weight.complex(x) * x / (y * prof.g_prime_c(u))
        }
        None => C64::new(f64::NAN, 0.0),
    };
    let tail = oscillatory_tail_full(w, y0, sign, tol / 4.0)?;
    let mass = weight.mass_below(x0, tol / 4.0)?;
    Ok(total.plus(tail.scale(phase_r)).plus(mass.scale(C64::new(-1.0, 0.0))))
}

pub(crate) fn moment(
    prof: &Profile,
    mu: &MeasureSpec,
    rem: Option<&AnalyticFn>,
    k: u32,
    tol: f64,
) -> Result<QuadResult> {
    power_integral(prof, mu, rem, k as f64, |v| v.powi(k as i32), tol)
}

/// `∫ |φ|^order dμ`.
pub(crate) fn abs_moment(
    prof: &Profile,
    mu: &MeasureSpec,
    rem: Option<&AnalyticFn>,
    order: f64,
    tol: f64,
) -> Result<QuadResult> {
    power_integral(prof, mu, rem, order, |v| v.abs().powf(order), tol)
}

fn power_integral(
    prof: &Profile,
    mu: &MeasureSpec,
    rem: Option<&AnalyticFn>,
    order: f64,
    pow: impl Fn(f64) -> f64,
    tol: f64,
) -> Result<QuadResult> {
    let singular = prof.p != 0.0;
    let decay = if singular { 1.0 - order * prof.beta } else { 1.0 };
    if decay <= 0.0 {
        return Err(FalError::MomentDiverges(format!(
            "moment of order {order} of a profile with beta = {} diverges",
            prof.beta
        )));
    }
    // size of the singular part, ∫₀^∞ e^{−u·decay} u^{order·λ} du times
    // the coefficient; the tolerance is taken relative to it
    let size = if singular {
        let m = order * prof.lambda;
        prof.p.abs().powf(order) * crate::specfun::gamma_re(m + 1.0)? / decay.powf(m + 1.0)
    } else {
        1.0
    };
    let r = integrate_to_infinity(
        |u| {
            let x = (-u).exp();
            let v = prof.value_u(u) + rem.map_or(0.0, |r| r.eval(x));
            C64::new(pow(v) * mu.density(x) * x, 0.0)
        },
        0.0,
        1.0 / decay,
        tol * size.max(1.0),
    )?;
    if !r.value.re.is_finite() {
        return Err(FalError::MomentDiverges(format!("moment of order {order} is not finite")));
    }
    Ok(r)
}
