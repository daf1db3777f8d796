//! Complex Gamma, Riemann/Hurwitz zeta, polylogarithms on the unit circle,
//! and a few cancellation-free complex helpers.

use std::f64::consts::{LN_2, PI};

use crate::error::{FalError, Result};
use crate::C64;

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Default Euler–Maclaurin truncation for [`zeta`].
pub const ZETA_TERMS: usize = 30;
/// Default number of Bernoulli corrections for [`zeta`].
pub const ZETA_CORRECTIONS: usize = 15;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// B_2, B_4, ..., B_30.
pub const BERNOULLI_EVEN: [f64; 15] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174_611.0 / 330.0,
    854_513.0 / 138.0,
    -236_364_091.0 / 2730.0,
    8_553_103.0 / 6.0,
    -23_749_461_029.0 / 870.0,
    8_615_841_276_005.0 / 14322.0,
];

pub fn euler_gamma() -> f64 {
    EULER_GAMMA
}

/// `(sin πx, cos πx)` with exact reduction, so integers give exact zeros.
pub fn sincos_pi(x: f64) -> (f64, f64) {
    let r = x - 2.0 * (x / 2.0).round();
    // r in [-1, 1]
    let (s, c) = if r > 0.5 {
        let (s, c) = (PI * (1.0 - r)).sin_cos();
        (s, -c)
    } else if r < -0.5 {
        let (s, c) = (PI * (-1.0 - r)).sin_cos();
        (s, -c)
    } else {
        (PI * r).sin_cos()
    };
    (s, c)
}

/// `sin(πz)` for complex `z`.
pub fn sin_pi(z: C64) -> C64 {
    let (s, c) = sincos_pi(z.re);
    let y = PI * z.im;
    C64::new(s * y.cosh(), c * y.sinh())
}

/// `e^z − 1` without cancellation near 0.
pub fn cexpm1(z: C64) -> C64 {
    let (a, b) = (z.re, z.im);
    let hb = (0.5 * b).sin();
    C64::new(a.exp_m1() * b.cos() - 2.0 * hb * hb, a.exp() * b.sin())
}

/// `(e^z − 1)/z`, equal to 1 at the origin.
pub fn cexprel(z: C64) -> C64 {
    if z.norm() < 1e-5 {
        C64::new(1.0, 0.0) + z * (0.5 + z / 6.0)
    } else {
        cexpm1(z) / z
    }
}

/// `log(1 + z)` accurate for small `z`.
pub fn clog1p(z: C64) -> C64 {
    let u = C64::new(1.0, 0.0) + z;
    let d = u - 1.0;
    if d == C64::new(0.0, 0.0) {
        z
    } else {
        u.ln() * (z / d)
    }
}

fn is_nonpositive_integer(z: C64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

fn lanczos_ln(z: C64) -> C64 {
    // valid for Re z >= 1/2
    let z = z - 1.0;
    let mut x = C64::new(LANCZOS[0], 0.0);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        x += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + x.ln()
}

/// Complex Gamma function.
pub fn gamma(z: C64) -> Result<C64> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(FalError::Domain(format!("gamma of non-finite {z}")));
    }
    if is_nonpositive_integer(z) {
        return Err(FalError::Pole(format!("gamma at {}", z.re)));
    }
    if z.re < 0.5 {
        let one_minus = C64::new(1.0, 0.0) - z;
        Ok(PI / (sin_pi(z) * ln_gamma_right(one_minus).exp()))
    } else {
        Ok(ln_gamma_right(z).exp())
    }
}

fn ln_gamma_right(z: C64) -> C64 {
    if z.norm() < 7.0 {
        return lanczos_ln(z);
    }
    // Stirling series
    let zi = 1.0 / z;
    let zi2 = zi * zi;
    let mut corr = C64::new(0.0, 0.0);
    let mut pw = zi;
    for (k, b) in BERNOULLI_EVEN.iter().enumerate().take(12) {
        let n = (2 * k + 2) as f64;
        corr += b / (n * (n - 1.0)) * pw;
        pw *= zi2;
    }
    (z - 0.5) * z.ln() - z + 0.5 * (2.0 * PI).ln() + corr
}

/// Real Gamma convenience wrapper.
pub fn gamma_re(x: f64) -> Result<f64> {
    gamma(C64::new(x, 0.0)).map(|g| g.re)
}

/// Riemann zeta with the default truncation.
pub fn zeta(s: C64) -> Result<C64> {
    zeta_with(s, ZETA_TERMS, ZETA_CORRECTIONS)
}

/// Riemann zeta with `n` summed terms and `m` Bernoulli corrections
/// (`m ≤ 15`). The effective number of terms grows with `|s|`.
pub fn zeta_with(s: C64, n: usize, m: usize) -> Result<C64> {
    if s == C64::new(1.0, 0.0) {
        return Err(FalError::Pole("zeta at s = 1".into()));
    }
    if !s.re.is_finite() || !s.im.is_finite() {
        return Err(FalError::Domain(format!("zeta of non-finite {s}")));
    }
    if s.re < 0.0 {
        // functional equation
        let one_minus = C64::new(1.0, 0.0) - s;
        if is_nonpositive_integer(s) && (s.re as i64) % 2 == 0 {
            return Ok(C64::new(0.0, 0.0));
        }
        let z1 = zeta_with(one_minus, n, m)?;
        let g = gamma(one_minus)?;
        let pre = (s * (2.0 * PI).ln()).exp() / PI;
        return Ok(pre * sin_pi(s / 2.0) * g * z1);
    }
    Ok(hurwitz_em(s, 1.0, n, m, false))
}

/// Hurwitz zeta `Σ_{k≥0} (k+a)^{−s}` for `a > 0`, `Re s > 0`, `s ≠ 1`.
pub fn hurwitz_zeta(s: C64, a: f64) -> Result<C64> {
    if s == C64::new(1.0, 0.0) {
        return Err(FalError::Pole("hurwitz zeta at s = 1".into()));
    }
    if !(a > 0.0) || s.re <= 0.0 {
        return Err(FalError::Domain(format!("hurwitz zeta needs a > 0, Re s > 0 (a={a}, s={s})")));
    }
    Ok(hurwitz_em(s, a, ZETA_TERMS, ZETA_CORRECTIONS, false))
}

/// `ζ(s) − 1/(s − 1)`, entire; its value at 1 is Euler's constant.
pub fn zeta_regularized(s: C64) -> C64 {
    hurwitz_em(s, 1.0, ZETA_TERMS, ZETA_CORRECTIONS, true)
}

fn hurwitz_em(s: C64, a: f64, n: usize, m: usize, regularize: bool) -> C64 {
    let m = m.min(BERNOULLI_EVEN.len());
    let n = n.max(s.norm().ceil() as usize + 1);
    let mut sum = C64::new(0.0, 0.0);
    for k in 0..n {
        sum += (-s * (k as f64 + a).ln()).exp();
    }
    let big = n as f64 + a;
    let lnb = big.ln();
    let nms = (-s * lnb).exp();
    let one = C64::new(1.0, 0.0);
    if regularize {
        // (N^{1−s} − 1)/(s − 1) = −ln N · (e^w − 1)/w with w = (1 − s) ln N
        let w = (one - s) * lnb;
        sum += -lnb * cexprel(w);
        // the remaining 1/(s−1) is removed by construction; a ≠ 1 would leave
        // a log a term, which callers never need
    } else {
        sum += big * nms / (s - 1.0);
    }
    sum += 0.5 * nms;
    let mut poch = s;
    let mut fact = 2.0;
    let mut pw = nms / big;
    for (k, b) in BERNOULLI_EVEN.iter().enumerate().take(m) {
        sum += b / fact * poch * pw;
        let kk = (2 * k + 2) as f64;
        poch *= (s + kk - 1.0) * (s + kk);
        fact *= (kk + 1.0) * (kk + 2.0);
        pw /= big * big;
    }
    sum
}

/// Harmonic number H_n.
fn harmonic(n: u32) -> f64 {
    (1..=n).map(|k| 1.0 / k as f64).sum()
}

/// `ζ(m)` for integer `m ≥ 2`.
fn zeta_int(m: u32) -> f64 {
    if m >= 60 {
        return 1.0 + 2f64.powi(-(m as i32));
    }
    hurwitz_em(C64::new(m as f64, 0.0), 1.0, ZETA_TERMS, ZETA_CORRECTIONS, false).re
}

/// `Li_k(e^{iθ})` for integer `k ≥ 1`; `θ` is reduced mod 2π.
pub fn polylog_unit(k: u32, theta: f64) -> Result<C64> {
    if k == 0 {
        return Err(FalError::Domain("polylog order must be >= 1".into()));
    }
    let mut th = theta % (2.0 * PI);
    if th > PI {
        th -= 2.0 * PI;
    } else if th <= -PI {
        th += 2.0 * PI;
    }
    if th == 0.0 {
        if k == 1 {
            return Err(FalError::Pole("Li_1(1)".into()));
        }
        return Ok(C64::new(zeta_int(k), 0.0));
    }
    let z = C64::from_polar(1.0, th);
    if k == 1 {
        return Ok(-clog1p(-z));
    }
    if k >= 20 {
        let mut acc = C64::new(0.0, 0.0);
        let mut zn = z;
        for n in 1..64u32 {
            let term = zn * (n as f64).powi(-(k as i32));
            acc += term;
            if term.norm() < 1e-18 {
                break;
            }
            zn *= z;
        }
        return Ok(acc);
    }
    let mu = C64::new(0.0, th);
    let mut acc = C64::new(0.0, 0.0);
    // j = 0 .. k−2
    let mut mj = C64::new(1.0, 0.0);
    for j in 0..(k - 1) {
        acc += zeta_int(k - j) * mj;
        mj *= mu / (j + 1) as f64;
    }
    // j = k − 1: mj = μ^{k−1}/(k−1)!
    let log_neg_mu = C64::new(th.abs().ln(), -th.signum() * PI / 2.0);
    acc += mj * (harmonic(k - 1) - log_neg_mu);
    // j = k: ζ(0) = −1/2
    acc += -0.5 * mj * mu / k as f64;
    // j = k + m − 1 for m ≥ 2 even: ζ(1 − m) = 2 (2π)^{−m} cos(πm/2) (m−1)! ζ(m)
    let mu_k1 = mj * (1..k).map(|i| i as f64).product::<f64>();
    let ratio = mu / (2.0 * PI);
    let mut rm = ratio * ratio;
    let mut m = 2u32;
    while m < 400 {
        let sign = if (m / 2) % 2 == 0 { 1.0 } else { -1.0 };
        let denom: f64 = (m..m + k).map(|i| i as f64).product();
        let term = 2.0 * sign * zeta_int(m) * mu_k1 * rm / denom;
        acc += term;
        if term.norm() < 1e-18 * acc.norm().max(1e-300) {
            break;
        }
        rm *= ratio * ratio;
        m += 2;
    }
    Ok(acc)
}

/// `log 2`, re-exported for callers that mirror the measure normalisation.
pub const LOG2: f64 = LN_2;
