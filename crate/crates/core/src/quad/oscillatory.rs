//! Semi-infinite Fourier tails by rotating the contour into the half-plane
//! where the exponential decays:
//! `∫_{Y0}^∞ e^{±iy} w(y) dy = ±i e^{±iY0} ∫_0^∞ e^{−s} w(Y0 ± is) ds`.

use std::cell::Cell;

use crate::error::{FalError, Result};
use crate::quad::adaptive::{integrate_breaks, QuadResult, DEFAULT_BUDGET};
use crate::C64;

/// Past this length along the rotated ray the weight `e^{−s}` is below 1e−26.
const RAY_LENGTH: f64 = 60.0;
const RAY_BREAKS: [f64; 8] = [0.0, 0.25, 1.0, 3.0, 8.0, 18.0, 35.0, RAY_LENGTH];

/// `∫_{y0}^∞ e^{i·sign·y} w(y) dy` for `w` analytic and decaying in the
/// quarter-plane swept by the rotation.
pub fn oscillatory_tail<W: Fn(C64) -> C64>(w: W, y0: f64, sign: f64, tol: f64) -> Result<C64> {
    oscillatory_tail_full(w, y0, sign, tol).map(|r| r.value)
}

/// As [`oscillatory_tail`], also returning the error estimate.
pub fn oscillatory_tail_full<W: Fn(C64) -> C64>(
    w: W,
    y0: f64,
    sign: f64,
    tol: f64,
) -> Result<QuadResult> {
    if !(y0 >= 0.0) || !y0.is_finite() {
        return Err(FalError::Domain(format!("start of tail must be finite and >= 0, got {y0}")));
    }
    let sg = if sign >= 0.0 { 1.0 } else { -1.0 };
    let bad = Cell::new(false);
    let integrand = |s: f64| {
        let v = w(C64::new(y0, sg * s)) * (-s).exp();
        if v.re.is_finite() && v.im.is_finite() {
            v
        } else {
            bad.set(true);
            C64::new(0.0, 0.0)
        }
    };
    let r = integrate_breaks(integrand, &RAY_BREAKS, tol, DEFAULT_BUDGET)?;
    if bad.get() {
        return Err(FalError::Domain("tail weight is not finite on the rotated ray".into()));
    }
    let pre = C64::new(0.0, sg) * C64::from_polar(1.0, sg * y0);
    Ok(r.scale(pre))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::adaptive::integrate_adaptive;

    #[test]
    fn zero_weight() {
        let v = oscillatory_tail(|_| C64::new(0.0, 0.0), 3.0, 1.0, 1e-12).unwrap();
        assert_eq!(v, C64::new(0.0, 0.0));
    }

    #[test]
    fn exponential_weight() {
        let v = oscillatory_tail(|y| (-y).exp(), 0.0, 1.0, 1e-13).unwrap();
        assert!((v - C64::new(0.5, 0.5)).norm() < 1e-13);
        let v = oscillatory_tail(|y| (-y).exp(), 0.0, -1.0, 1e-13).unwrap();
        assert!((v - C64::new(0.5, -0.5)).norm() < 1e-13);
    }

    #[test]
    fn inverse_square_against_richardson() {
        let rotated = oscillatory_tail(|y| 1.0 / (y * y), 1.0, 1.0, 1e-13).unwrap();
        // real-axis partial integrals over whole periods, extrapolated in 1/Y
        let period = 2.0 * std::f64::consts::PI;
        let partial = |k: usize| {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..k {
                let a = 1.0 + period * j as f64;
                acc += integrate_adaptive(
                    |y| C64::new(0.0, y).exp() / (y * y),
                    a,
                    a + period,
                    1e-12,
                )
                .unwrap()
                .value;
            }
            acc
        };
        // three levels of Richardson on h = 1/Y, error terms h², h³, h⁴
        let ks = [200usize, 400, 800, 1600];
        let hs: Vec<f64> = ks.iter().map(|&k| 1.0 / (1.0 + period * k as f64)).collect();
        let mut table: Vec<C64> = ks.iter().map(|&k| partial(k)).collect();
        for order in 2..5 {
            let n = table.len();
            let mut next = Vec::with_capacity(n - 1);
            for i in 0..n - 1 {
                let r = (hs[i] / hs[i + order as usize - 1]).powi(order);
                next.push((table[i + 1] * r - table[i]) / (r - 1.0));
            }
            table = next;
        }
        let direct = table[0];
        assert!((rotated - direct).norm() < 1e-9, "{rotated} vs {direct}");
    }
}
