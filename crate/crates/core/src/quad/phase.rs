//! `t·n^λ mod 2π` for large integer arguments.
//!
//! For integer `λ` the product `t·n^λ` is an exact dyadic rational; it is
//! reduced against 192 bits of `1/(2π)` in the style of Payne–Hanek, so the
//! phase stays accurate to ~1e−16 rad however large `t·n^λ` gets.

use std::f64::consts::TAU;

use crate::specfun::cexpm1;
use crate::C64;

/// `⌊2^192/(2π)⌋`, little-endian limbs.
const INV_TAU_192: [u64; 3] = [0x36d8a5664f10e410, 0x7f09d5f47d4d3770, 0x28be60db9391054a];

fn shifted_inv_tau(k: u32) -> [u64; 3] {
    let mut out = [0u64; 3];
    if k >= 192 {
        return out;
    }
    let (words, bits) = ((k / 64) as usize, k % 64);
    for i in 0..3 - words {
        let lo = INV_TAU_192[i + words] >> bits;
        let hi = if bits > 0 && i + words + 1 < 3 { INV_TAU_192[i + words + 1] << (64 - bits) } else { 0 };
        out[i] = lo | hi;
    }
    out
}

/// Low 192 bits of `q·d`.
fn mul_low(q: u128, d: [u64; 3]) -> [u64; 3] {
    let q = [q as u64, (q >> 64) as u64];
    let mut out = [0u64; 3];
    for (i, &qi) in q.iter().enumerate() {
        let mut carry: u128 = 0;
        for (j, &dj) in d.iter().enumerate() {
            if i + j >= 3 {
                break;
            }
            let cur = out[i + j] as u128 + (qi as u128) * (dj as u128) + carry;
            out[i + j] = cur as u64;
            carry = cur >> 64;
        }
    }
    out
}

/// Fractional part of `t·n^λ/(2π)`, or `None` when `t·n^λ` does not fit the
/// exact route (non-integer `λ` or overflow).
pub fn exact_turns(t: f64, n: u64, lambda: f64) -> Option<f64> {
    if !(t > 0.0) || !t.is_finite() || lambda.fract() != 0.0 || lambda < 0.0 {
        return None;
    }
    let bits = t.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i32;
    if exp == 0 {
        return None;
    }
    let mant = (bits & ((1u64 << 52) - 1)) | (1u64 << 52);
    let k = 1075 - exp;
    if k <= 0 {
        return None;
    }
    let mut power: u128 = 1;
    for _ in 0..lambda as u32 {
        power = power.checked_mul(n as u128)?;
    }
    let q = power.checked_mul(mant as u128)?;
    let r = mul_low(q, shifted_inv_tau(k as u32));
    let f = (r[2] as f64 + r[1] as f64 / 18446744073709551616.0) / 18446744073709551616.0;
    Some(if f >= 1.0 { 0.0 } else { f })
}

/// `(e^{iφ}, e^{iφ} − 1)` for `φ = t·n^λ`, plus a bound on the phase error.
pub fn unit_phase(t: f64, n: u64, lambda: f64) -> (C64, C64, f64) {
    let raw = t * (n as f64).powf(lambda);
    if raw < 1.0 {
        let m1 = cexpm1(C64::new(0.0, raw));
        return (m1 + 1.0, m1, 4.0 * f64::EPSILON * raw);
    }
    match exact_turns(t, n, lambda) {
        Some(f) => {
            let e = C64::from_polar(1.0, TAU * f);
            (e, e - 1.0, 4.0 * f64::EPSILON)
        }
        None => {
            let e = C64::from_polar(1.0, raw % TAU);
            (e, e - 1.0, 4.0 * f64::EPSILON * raw)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_arguments_match_floating_reduction() {
        for &(t, n, l) in &[(0.3, 17u64, 2.0), (1e-3, 1234, 3.0), (0.7, 5, 1.0)] {
            let raw: f64 = t * (n as f64).powf(l);
            let want = (raw / TAU).fract();
            let got = exact_turns(t, n, l).unwrap();
            assert!((got - want).abs() < 1e-15 + 1e-16 * raw, "{got} vs {want}");
        }
        // the floating reduction is itself off by ~1e−11 turns here
        let got = exact_turns(1e-3, 1234, 3.0).unwrap();
        assert!((got - 0.014341187248835519).abs() < 1e-16);
    }

    #[test]
    fn large_arguments() {
        // t·n² = 2^58; reference fraction from 200-digit arithmetic
        let t = 0.25;
        let n = 1u64 << 30;
        let got = exact_turns(t, n, 2.0).unwrap();
        assert!((got - 0.16400380987211778).abs() < 1e-15, "{got}");
        assert!(exact_turns(0.5, u64::MAX, 3.0).is_none());
        assert!(exact_turns(0.5, 10, 1.5).is_none());
    }
}
