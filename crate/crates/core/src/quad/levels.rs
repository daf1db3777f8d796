//! Sums over the level sets `(1/(n+1), 1/n]` of `⌊1/x⌋`.
//!
//! The first terms are added directly; from `n = N` on the sum is replaced by
//! the Abel–Plana formula
//! `Σ_{n≥N} g(n) = g(N)/2 + ∫_N^∞ g + i∫_0^∞ (g(N+iy) − g(N−iy))/(e^{2πy} − 1) dy`,
//! which only needs `g` holomorphic on `Re z ≥ N` and sub-`e^{2π|y|}` growth.
//!
//! For `λ > 1` the phase `tn^λ` eventually advances by more than `2π` per
//! step and the lower contour stops being admissible. The formula is then
//! used on the finite stretch before that point (as a difference of two
//! tails) and the aliased remainder is summed term by term with exactly
//! reduced phases, in doubling blocks, until a block drops below tolerance.

use std::f64::consts::{LN_2, PI};

use crate::error::{FalError, Result};
use crate::quad::adaptive::{gk15, integrate_adaptive, integrate_breaks, integrate_to_infinity, QuadResult, DEFAULT_BUDGET};
use crate::quad::{phase, MeasureKind, MeasureSpec};
use crate::specfun::{cexpm1, hurwitz_zeta};
use crate::C64;

const DEFAULT_START: u64 = 64;
/// Upper end of the `y` integral; the integrand is then below `e^{−πy} < 1e−21`.
const Y_MAX: f64 = 50.0 / PI;

/// 15-point Kronrod rule on `[0, 1]`.
pub(crate) fn unit_panel<F: Fn(f64) -> C64>(f: F) -> C64 {
    gk15(&f, 0.0, 1.0).0
}

fn cpow(z: C64, e: f64) -> C64 {
    if e == 0.0 {
        C64::new(1.0, 0.0)
    } else {
        (z.ln() * e).exp()
    }
}

/// Abel–Plana tail `Σ_{n≥N} g(n)`. The integral `∫_N^∞ g` runs along the
/// ray `N + u·e^{iθ}`, on which `g` must decay.
pub fn abel_plana_tail<G: Fn(C64) -> C64>(g: G, start: f64, theta: f64, tol: f64) -> Result<QuadResult> {
    let n0 = C64::new(start, 0.0);
    let dir = C64::from_polar(1.0, theta);
    let half = g(n0) * 0.5;
    let ray = integrate_to_infinity(|u| g(n0 + dir * u), 0.0, start.max(1.0), tol / 3.0)?;
    let side = integrate_breaks(
        |y| {
            let up = g(C64::new(start, y));
            let down = g(C64::new(start, -y));
            (up - down) / (2.0 * PI * y).exp_m1()
        },
        &[0.0, 0.5, 2.0, 6.0, Y_MAX],
        tol / 3.0,
        DEFAULT_BUDGET,
    )?;
    Ok(QuadResult {
        value: half + ray.value * dir + side.value * C64::new(0.0, 1.0),
        error_estimate: ray.error_estimate + side.error_estimate,
        evaluations: 1 + ray.evaluations + side.evaluations,
    })
}

/// Whether `e^{itz^λ}` grows at most like `e^{π|y|}` on `n ± iy`.
fn contained(n: u64, lambda: f64, t: f64) -> bool {
    (1..=400).all(|i| {
        let y = Y_MAX * i as f64 / 400.0;
        let up = cpow(C64::new(n as f64, y), lambda).im;
        let down = cpow(C64::new(n as f64, -y), lambda).im;
        t * (-up).max(-down).max(0.0) <= PI * y
    })
}

/// Largest start `N ≤ 64` at which `e^{itz^λ}` grows at most like `e^{π|y|}`
/// on the vertical segment used by the tail.
pub fn tail_start(lambda: f64, t: f64) -> Result<u64> {
    (1..=DEFAULT_START).rev().find(|&n| contained(n, lambda, t)).ok_or_else(|| {
        FalError::UnsupportedFamily(format!(
            "level sum for lambda = {lambda} cannot be contained at t = {t}"
        ))
    })
}

fn mass_c(mu: &MeasureSpec) -> Result<impl Fn(C64) -> C64 + '_> {
    if !mu.is_analytic() {
        return Err(FalError::UnsupportedFamily(format!(
            "measure {} has no holomorphic extension",
            mu.name
        )));
    }
    Ok(move |z: C64| mu.level_mass_c(z).unwrap_or(C64::new(f64::NAN, 0.0)))
}

/// `Σ_n (e^{itn^λ} − 1)·μ(level n)`.
pub fn floor_fourier(lambda: f64, mu: &MeasureSpec, t: f64, tol: f64) -> Result<QuadResult> {
    if lambda > 1.0 && resonance_weight(lambda, mu.f0, t) > 0.1 * tol {
        return floor_fourier_aliased(lambda, mu, t, tol);
    }
    let start = tail_start(lambda, t)?;
    let m = mass_c(mu)?;
    let mut direct = C64::new(0.0, 0.0);
    for n in 1..start {
        let ph = t * (n as f64).powf(lambda);
        direct += cexpm1(C64::new(0.0, ph)) * mu.level_mass(n)?;
    }
    let tail = abel_plana_tail(|z| cexpm1(C64::new(0.0, t) * cpow(z, lambda)) * m(z), start as f64, ray_angle(lambda), tol)?;
    Ok(QuadResult {
        value: direct + tail.value,
        error_estimate: tail.error_estimate + 1e-16 * start as f64,
        evaluations: tail.evaluations + start as usize,
    })
}

fn ray_angle(lambda: f64) -> f64 {
    if lambda <= 1.0 {
        PI / 2.0
    } else {
        PI / (2.0 * lambda)
    }
}

/// Bound on the stationary-phase terms `∫ e^{i(tx^λ − 2πkx)} μ(level x) dx`
/// missed by a single tail: the k-th term has size about
/// `f(0)x_k^{−2}·(2π/φ''(x_k))^{1/2}` at `tλx_k^{λ−1} = 2πk`, decaying like
/// `k^{−(λ+2)/(2λ−2)}`.
fn resonance_weight(lambda: f64, f0: f64, t: f64) -> f64 {
    let decay = (lambda + 2.0) / (2.0 * (lambda - 1.0));
    if decay <= 1.0 + 1e-9 {
        return f64::INFINITY;
    }
    let x1 = (2.0 * PI / (lambda * t)).powf(1.0 / (lambda - 1.0));
    let curv = lambda * (lambda - 1.0) * t * x1.powf(lambda - 2.0);
    let a1 = 2.0 * f0.max(1.0) / (x1 * x1) * (2.0 * PI / curv).sqrt();
    let z = crate::specfun::zeta(C64::new(decay, 0.0)).map(|z| z.re).unwrap_or(f64::INFINITY);
    a1 * z
}

/// Cap on the number of terms summed one by one.
fn aliased_budget(mu: &MeasureSpec) -> u64 {
    match mu.kind {
        crate::quad::MeasureKind::Custom => 1 << 14,
        _ => 1 << 26,
    }
}

fn floor_fourier_aliased(lambda: f64, mu: &MeasureSpec, t: f64, tol: f64) -> Result<QuadResult> {
    // end of the stretch where one step advances the phase by less than π
    let reach = (PI / (t * lambda)).powf(1.0 / (lambda - 1.0)).floor().min(1e15) as u64;
    let mut end = reach.max(1);
    while end > 1 && !contained(end, lambda, t) {
        end = end * 9 / 10;
    }
    let start = if end > 1 { tail_start(lambda, t).unwrap_or(1).min(end) } else { 1 };

    let mut total = QuadResult::zero();
    let mut direct = C64::new(0.0, 0.0);
    for n in 1..start {
        let (_, m1, _) = phase::unit_phase(t, n, lambda);
        direct += m1 * mu.level_mass(n)?;
    }
    total.value += direct;
    let mut next = start;
    if end > start {
        let m = mass_c(mu)?;
        let g = |z: C64| cexpm1(C64::new(0.0, t) * cpow(z, lambda)) * m(z);
        let theta = ray_angle(lambda);
        let a = abel_plana_tail(&g, start as f64, theta, tol / 8.0)?;
        let b = abel_plana_tail(&g, end as f64, theta, tol / 8.0)?;
        total = total.plus(a).plus(b.scale(C64::new(-1.0, 0.0)));
        next = end;
    }

    let budget = aliased_budget(mu);
    let mut block = 1024u64;
    let mut summed = 0u64;
    let mut last = f64::INFINITY;
    let mut phase_err = 0.0;
    while summed < budget {
        let hi = next + block;
        let mut part = C64::new(0.0, 0.0);
        let mut wave = C64::new(0.0, 0.0);
        for n in next..hi {
            let m = mu.level_mass(n)?;
            let (e, m1, pe) = phase::unit_phase(t, n, lambda);
            part += m1 * m;
            wave += e * m;
            phase_err += pe * m;
        }
        total.value += part;
        total.evaluations += block as usize;
        summed += block;
        next = hi;
        last = wave.norm();
        if last <= 0.25 * tol {
            break;
        }
        block *= 2;
    }
    // (e^{iφ} − 1) on the levels not summed: the −1 part is exact
    total.value -= mu.cdf(1.0 / next as f64)?;
    total.error_estimate += 2.0 * last + phase_err + 1e-16 * (summed as f64).sqrt();
    Ok(total)
}

/// `Σ_n n^{kλ}·μ(level n)`.
pub fn floor_moment(lambda: f64, mu: &MeasureSpec, k: u32, tol: f64) -> Result<QuadResult> {
    level_power_sum(lambda * k as f64, mu, tol)
}

/// `Σ_n n^e·μ(level n)` for `e < 1`.
pub fn level_power_sum(e: f64, mu: &MeasureSpec, tol: f64) -> Result<QuadResult> {
    if e >= 1.0 {
        return Err(FalError::MomentDiverges(format!(
            "sum of n^{e} over Gauss-type level masses diverges"
        )));
    }
    if let Some(coeff) = mass_series(mu) {
        return level_power_sum_hurwitz(e, mu, coeff);
    }
    let m = mass_c(mu)?;
    let mut direct = C64::new(0.0, 0.0);
    for n in 1..DEFAULT_START {
        direct += (n as f64).powf(e) * mu.level_mass(n)?;
    }
    let tail = abel_plana_tail(|z| cpow(z, e) * m(z), DEFAULT_START as f64, 0.0, tol)?;
    Ok(QuadResult {
        value: direct + tail.value,
        error_estimate: tail.error_estimate,
        evaluations: tail.evaluations + DEFAULT_START as usize,
    })
}

/// Coefficients `b_k` with `μ(level n) = Σ_{k≥2} b_k n^{−k}` for the
/// built-in measures.
fn mass_series(mu: &MeasureSpec) -> Option<fn(u32) -> f64> {
    match mu.kind {
        MeasureKind::Lebesgue => Some(|k| if k % 2 == 0 { 1.0 } else { -1.0 }),
        MeasureKind::GaussKuzmin => Some(|k| {
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            sign * (2.0 - 2f64.powi(k as i32)) / (k as f64 * LN_2)
        }),
        MeasureKind::Custom => None,
    }
}

/// `Σ_n n^e μ(level n)` with the tail from `n = 32` written as
/// `Σ_k b_k ζ(k − e, 32)`.
fn level_power_sum_hurwitz(e: f64, mu: &MeasureSpec, coeff: fn(u32) -> f64) -> Result<QuadResult> {
    const SHIFT: u64 = 32;
    let mut acc = 0.0;
    for n in 1..SHIFT {
        acc += (n as f64).powf(e) * mu.level_mass(n)?;
    }
    let a = SHIFT as f64;
    for k in 2..=80u32 {
        let z = hurwitz_zeta(C64::new(k as f64 - e, 0.0), a)?.re;
        let term = coeff(k) * z;
        acc += term;
        if term.abs() < 1e-18 * acc.abs() {
            return Ok(QuadResult { value: C64::new(acc, 0.0), error_estimate: 1e-15 * acc.abs(), evaluations: k as usize });
        }
    }
    Err(FalError::NoConvergence(format!("level power series for exponent {e}")))
}

/// Sum over levels of `∫_level h(n, x) dμ(x)`, written with `x = 1/(n + v)`.
fn level_integral_sum<H>(mu: &MeasureSpec, h: H, tol: f64) -> Result<QuadResult>
where
    H: Fn(C64, C64) -> C64,
{
    let fc = |w: C64| mu.density_c(1.0 / w).unwrap_or(C64::new(f64::NAN, 0.0)) / (w * w);
    if !mu.is_analytic() {
        return Err(FalError::UnsupportedFamily(format!(
            "measure {} has no holomorphic extension",
            mu.name
        )));
    }
    let per = tol / (4.0 * DEFAULT_START as f64);
    let mut total = QuadResult::zero();
    for n in 1..DEFAULT_START {
        let z = C64::new(n as f64, 0.0);
        let r = integrate_adaptive(|v| h(z, z + v) * fc(z + v), 0.0, 1.0, per)?;
        total = total.plus(r);
    }
    let tail = abel_plana_tail(
        |z| unit_panel(|v| h(z, z + v) * fc(z + v)),
        DEFAULT_START as f64,
        0.0,
        tol / 2.0,
    )?;
    Ok(total.plus(tail))
}

/// `I[⌊1/x⌋^λ − x^{−λ}](t)` for `λ ≤ 1`.
pub fn floor_remainder_fourier(lambda: f64, mu: &MeasureSpec, t: f64, tol: f64) -> Result<QuadResult> {
    let i_t = C64::new(0.0, t);
    level_integral_sum(mu, |z, w| cexpm1(i_t * (cpow(z, lambda) - cpow(w, lambda))), tol)
}

/// `∫ (⌊1/x⌋^λ − x^{−λ})^k dμ` for `λ ≤ 1`.
pub fn floor_remainder_moment(lambda: f64, mu: &MeasureSpec, k: u32, tol: f64) -> Result<QuadResult> {
    level_integral_sum(mu, |z, w| (cpow(z, lambda) - cpow(w, lambda)).powu(k), tol)
}

/// `∫ |⌊1/x⌋^λ − x^{−λ}|^order dμ` for `λ ≤ 1`; on each level the
/// difference is `n^λ − (n+v)^λ ≤ 0`.
pub fn floor_remainder_abs_moment(lambda: f64, mu: &MeasureSpec, order: f64, tol: f64) -> Result<QuadResult> {
    if lambda == 0.0 {
        return Ok(QuadResult::zero());
    }
    level_integral_sum(mu, |z, w| cpow(cpow(w, lambda) - cpow(z, lambda), order), tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn abel_plana_on_inverse_squares() {
        // Σ_{n≥5} 1/n² = π²/6 − (1 + 1/4 + 1/9 + 1/16)
        let r = abel_plana_tail(|z| 1.0 / (z * z), 5.0, 0.0, 1e-13).unwrap();
        let want = PI * PI / 6.0 - (1.0 + 0.25 + 1.0 / 9.0 + 1.0 / 16.0);
        assert!((r.value.re - want).abs() < 1e-13, "{} vs {want}", r.value);
        assert!(r.value.im.abs() < 1e-14);
    }

    #[test]
    fn level_masses_sum_to_one() {
        let mu = MeasureSpec::gauss_kuzmin();
        let r = floor_moment(0.5, &mu, 0, 1e-13).unwrap();
        assert!((r.value.re - 1.0).abs() < 1e-12);
        let leb = MeasureSpec::lebesgue();
        let r = floor_moment(0.3, &leb, 0, 1e-13).unwrap();
        assert!((r.value.re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_observable() {
        // ⌊1/x⌋^0 ≡ 1
        let mu = MeasureSpec::gauss_kuzmin();
        let r = floor_fourier(0.0, &mu, 0.3, 1e-12).unwrap();
        let want = C64::new(0.0, 0.3).exp() - 1.0;
        assert!((r.value - want).norm() < 1e-12);
    }

    #[test]
    fn start_shrinks_for_fast_growth() {
        assert_eq!(tail_start(1.0, 0.5).unwrap(), 64);
        let n = tail_start(3.0, 1e-2).unwrap();
        assert!(n < 64 && n >= 1);
        assert!(tail_start(8.0, 0.9).is_err());
    }
}
