//! Closed-form expansions for power-log singularities and for the floor
//! observables over the Gauss–Kuzmin measure.

use std::f64::consts::{FRAC_PI_2, LN_2, PI};

use super::{Expansion, LogPowerScale, EPSILON};
use crate::error::{FalError, Result};
use crate::quad::{moment, MeasureSpec, PhiSpec, DEFAULT_TOL};
use crate::specfun::{gamma, EULER_GAMMA};
use crate::C64;

fn scale(alpha: f64, p: f64) -> LogPowerScale {
    LogPowerScale { alpha, p }
}

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Expansion of `a·x^{−β}|log x|^λ` against a measure with density value
/// `f0` at the origin.
pub fn power_log_expansion(a: f64, beta: f64, lambda: f64, mu: &MeasureSpec) -> Result<Expansion> {
    if !(beta > 1.0 / 3.0) || !beta.is_finite() {
        return Err(FalError::Domain(format!("power-log expansion needs beta > 1/3, got {beta}")));
    }
    let phi = PhiSpec::power_log(a, beta, lambda)?;
    let inv = 1.0 / beta;
    let exceptional = beta == 0.5 || beta == 1.0;
    let factor = if beta == 1.0 {
        real(-1.0 / (lambda + 1.0))
    } else if beta == 0.5 {
        real(1.0 / (4.0 * lambda + 2.0))
    } else {
        gamma(real(-inv))?
    };
    let rot = C64::from_polar(1.0, -a.signum() * FRAC_PI_2 * inv);
    let c_star = mu.f0 * a.abs().powf(inv) * rot / beta.powf(lambda * inv + 1.0) * factor;
    let p_main = lambda * inv + if exceptional { 1.0 } else { 0.0 };
    let c1 = if beta < 1.0 { moment(&phi, mu, 1, DEFAULT_TOL)?.value.re } else { 0.0 };
    let c2 = if beta < 0.5 { -0.5 * moment(&phi, mu, 2, DEFAULT_TOL)?.value.re } else { 0.0 };
    Expansion::new(real(c1), c2, c_star, scale(inv, p_main), scale(inv, p_main - 1.0 + EPSILON))
}

/// Expansion of `⌊1/x⌋^λ` over the Gauss–Kuzmin measure, `λ ≥ 1/2`.
///
/// At `λ = 1` the main term `−(it/log 2)(log t + γ₀ − πi/2)` is stored as
/// `c⋆ = i/log 2` on `t|log t|` plus the complex `c1 = −(γ₀ − πi/2)/log 2`.
pub fn floor_power_expansion(lambda: f64) -> Result<Expansion> {
    if !(lambda >= 0.5) || !lambda.is_finite() {
        return Err(FalError::Domain(format!("floor expansion needs lambda >= 1/2, got {lambda}")));
    }
    let mu = MeasureSpec::gauss_kuzmin();
    let mean = || -> Result<f64> {
        Ok(moment(&PhiSpec::floor_power(lambda)?, &mu, 1, DEFAULT_TOL)?.value.re)
    };
    if lambda == 0.5 {
        return Expansion::new(real(mean()?), 0.0, real(-1.0 / LN_2), scale(2.0, 1.0), scale(2.0, EPSILON));
    }
    if lambda == 1.0 {
        let c1 = -C64::new(EULER_GAMMA, -FRAC_PI_2) / LN_2;
        return Expansion::new(c1, 0.0, C64::new(0.0, 1.0 / LN_2), scale(1.0, 1.0), scale(2.0 - EPSILON, 0.0));
    }
    let inv = 1.0 / lambda;
    let c_star = -C64::from_polar(1.0, -FRAC_PI_2 * inv) * gamma(real(1.0 - inv))? / LN_2;
    let c1 = if lambda < 1.0 { mean()? } else { 0.0 };
    Expansion::new(real(c1), 0.0, c_star, scale(inv, 0.0), scale(inv, -1.0 + EPSILON))
}

/// Expansion of `⌊1/x⌋ − ⌊1/T(x)⌋`: `I(t) = −(π/log 2)t + O(t²|log t|²)`.
pub fn dedekind_expansion() -> Expansion {
    Expansion::new(C64::new(0.0, PI / LN_2), 0.0, real(0.0), scale(1.0, 0.0), scale(2.0, 2.0))
        .expect("dedekind expansion is well formed")
}
