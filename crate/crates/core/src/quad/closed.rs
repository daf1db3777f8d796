//! Polylogarithm closed forms over the Gauss–Kuzmin measure.
//!
//! With `z = e^{it}` and `c_k = (−1)^{k+1}/k`, summation by parts over the
//! level masses gives
//! `I[⌊1/x⌋](t) = (1 − z̄)·Ψ/log 2`, `Ψ = Σ_n z^n log(1 + 1/n) = z log 2 + Σ_k c_k (Li_k(z) − z)`.
//! The two-level cylinder masses are a mixed second difference of
//! `log(1 + nm)`, which makes the Dedekind observable
//! `2·Re I[⌊1/x⌋](t) + 4 sin²(t/2)/log 2 · (log 2 + Σ_k c_k(|Li_k(z)|² − 1))`.

use std::f64::consts::LN_2;

use crate::error::Result;
use crate::quad::adaptive::QuadResult;
use crate::specfun::polylog_unit;
use crate::C64;

const ORDERS: u32 = 64;

fn polylogs(t: f64) -> Result<Vec<C64>> {
    (1..=ORDERS).map(|k| polylog_unit(k, t)).collect()
}

fn coeff(k: u32) -> f64 {
    let s = if k % 2 == 1 { 1.0 } else { -1.0 };
    s / k as f64
}

fn psi(z: C64, li: &[C64]) -> C64 {
    let mut acc = z * LN_2;
    for (i, l) in li.iter().enumerate() {
        acc += coeff(i as u32 + 1) * (l - z);
    }
    acc
}

/// `I[⌊1/x⌋](t)` over Gauss–Kuzmin.
pub fn floor_linear_gk(t: f64) -> Result<QuadResult> {
    let li = polylogs(t)?;
    let z = C64::from_polar(1.0, t);
    let v = (1.0 - z.conj()) * psi(z, &li) / LN_2;
    Ok(QuadResult { value: v, error_estimate: 1e-15 * v.norm().max(t), evaluations: li.len() })
}

/// `I[⌊1/x⌋ − ⌊1/T(x)⌋](t)` over Gauss–Kuzmin; real-valued.
pub fn dedekind_gk(t: f64) -> Result<QuadResult> {
    let li = polylogs(t)?;
    let z = C64::from_polar(1.0, t);
    let floor = (1.0 - z.conj()) * psi(z, &li) / LN_2;
    let mut bracket = LN_2;
    for (i, l) in li.iter().enumerate() {
        bracket += coeff(i as u32 + 1) * (l.norm_sqr() - 1.0);
    }
    let s = (0.5 * t).sin();
    let delta = 4.0 * s * s / LN_2 * bracket;
    let v = 2.0 * floor.re + delta;
    Ok(QuadResult {
        value: C64::new(v, 0.0),
        error_estimate: 1e-15 * v.abs().max(t),
        evaluations: li.len(),
    })
}
