//! The constant `A = Σ_n (n·log(1 + 1/(n(n+2))) − log(1 + 1/n))` and the
//! Dirichlet series `H(s) = Σ_n n^s (log(1 + 1/(n(n+2))) − 1/n²)`.

use crate::error::{FalError, Result};
use crate::specfun::hurwitz_zeta;
use crate::C64;

fn term(n: u64) -> f64 {
    let nf = n as f64;
    nf * (1.0 / (nf * (nf + 2.0))).ln_1p() - (1.0 / nf).ln_1p()
}

/// `Σ_{n ≤ N}` of the terms of `A`, summed term by term.
pub fn telescoping_partial_sum(n: u64) -> f64 {
    let mut s = 0.0;
    let mut c = 0.0;
    for k in 1..=n {
        let y = term(k) - c;
        let u = s + y;
        c = (u - s) - y;
        s = u;
    }
    s
}

/// `A`, from partial sums at `N, 2N, 4N` with two Richardson steps on the
/// `1/N` expansion of the remainder.
pub fn constant_a() -> f64 {
    let n = 1u64 << 14;
    let s1 = telescoping_partial_sum(n);
    let s2 = telescoping_partial_sum(2 * n);
    let s4 = telescoping_partial_sum(4 * n);
    let r1 = 2.0 * s2 - s1;
    let r2 = 2.0 * s4 - s2;
    (4.0 * r2 - r1) / 3.0
}

/// Number of leading terms summed directly before switching to Hurwitz
/// zeta values.
const SHIFT: u64 = 16;

/// `a_k` in `log(1 + 1/(n(n+2))) − 1/n² = Σ_{k≥3} a_k n^{−k}`.
fn coefficient(k: u32) -> f64 {
    let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
    sign * (2.0 - 2f64.powi(k as i32)) / k as f64
}

/// `H(s)` for `Re s ≤ 2 − 0.01`.
pub fn h_series(s: C64) -> Result<C64> {
    if !(s.re <= 1.99) || !s.im.is_finite() {
        return Err(FalError::Domain(format!("H(s) needs Re s <= 1.99, got {s}")));
    }
    let mut acc = C64::new(0.0, 0.0);
    for n in 1..SHIFT {
        let nf = n as f64;
        let g = (1.0 / (nf * (nf + 2.0))).ln_1p() - 1.0 / (nf * nf);
        acc += C64::new(nf, 0.0).powc(s) * g;
    }
    // |a_k| 16^{−k+Re s} ≤ 8^{−k}·16^2 bounds the neglected terms
    let a = SHIFT as f64;
    for k in 3..=60u32 {
        let c = coefficient(k);
        let bound = c.abs() * a.powf(s.re + 1.0 - k as f64);
        let z = hurwitz_zeta(C64::new(k as f64, 0.0) - s, a)?;
        acc += c * z;
        if bound < 1e-18 * acc.norm().max(1e-300) {
            return Ok(acc);
        }
    }
    Err(FalError::NoConvergence(format!("H({s}) series did not settle")))
}
