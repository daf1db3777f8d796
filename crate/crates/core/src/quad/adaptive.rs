//! Globally adaptive Gauss–Kronrod (7/15) quadrature for complex integrands.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{FalError, Result};
use crate::C64;

/// Default evaluation budget per call.
pub const DEFAULT_BUDGET: usize = 1_000_000;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Outcome of a quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadResult {
    pub value: C64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

impl QuadResult {
    pub fn zero() -> Self {
        QuadResult { value: C64::new(0.0, 0.0), error_estimate: 0.0, evaluations: 0 }
    }

    /// Sum of two independent pieces.
    pub fn plus(self, other: QuadResult) -> QuadResult {
        QuadResult {
            value: self.value + other.value,
            error_estimate: self.error_estimate + other.error_estimate,
            evaluations: self.evaluations + other.evaluations,
        }
    }

    pub fn scale(self, c: C64) -> QuadResult {
        QuadResult {
            value: self.value * c,
            error_estimate: self.error_estimate * c.norm(),
            evaluations: self.evaluations,
        }
    }
}

struct Segment {
    a: f64,
    b: f64,
    value: C64,
    err: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

fn qk_err(k: f64, g: f64, resabs: f64, resasc: f64) -> f64 {
    let mut err = (k - g).abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    err
}

/// One 15-point Kronrod panel; returns (value, error).
pub(crate) fn gk15<F: Fn(f64) -> C64>(f: &F, a: f64, b: f64) -> (C64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    let mut fv = [C64::new(0.0, 0.0); 15];
    fv[14] = fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        fv[2 * j] = f1;
        fv[2 * j + 1] = f2;
        k += (f1 + f2) * WGK[j];
        if j % 2 == 1 {
            g += (f1 + f2) * WG[j / 2];
        }
    }
    let mean = k * 0.5;
    let mut abs_re = fc.re.abs() * WGK[7];
    let mut abs_im = fc.im.abs() * WGK[7];
    let mut asc_re = (fc.re - mean.re).abs() * WGK[7];
    let mut asc_im = (fc.im - mean.im).abs() * WGK[7];
    for j in 0..7 {
        let (f1, f2) = (fv[2 * j], fv[2 * j + 1]);
        abs_re += (f1.re.abs() + f2.re.abs()) * WGK[j];
        abs_im += (f1.im.abs() + f2.im.abs()) * WGK[j];
        asc_re += ((f1.re - mean.re).abs() + (f2.re - mean.re).abs()) * WGK[j];
        asc_im += ((f1.im - mean.im).abs() + (f2.im - mean.im).abs()) * WGK[j];
    }
    let ah = h.abs();
    let er = qk_err(k.re * ah, g.re * ah, abs_re * ah, asc_re * ah);
    let ei = qk_err(k.im * ah, g.im * ah, abs_im * ah, asc_im * ah);
    (k * h, er.hypot(ei))
}

/// Adaptive integration over the union of consecutive breakpoint intervals.
pub fn integrate_breaks<F: Fn(f64) -> C64>(
    f: F,
    breaks: &[f64],
    tol: f64,
    budget: usize,
) -> Result<QuadResult> {
    if breaks.len() < 2 {
        return Err(FalError::Domain("need at least two breakpoints".into()));
    }
    if breaks.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(FalError::Domain(format!("breakpoints not increasing: {breaks:?}")));
    }
    let mut heap = BinaryHeap::new();
    let mut evals = 0usize;
    let mut total_err = 0.0;
    // panels too small to split further keep their error; the result is then
    // roundoff-limited and reported as such through error_estimate
    let mut frozen_err = 0.0;
    let mut frozen_value = C64::new(0.0, 0.0);
    for w in breaks.windows(2) {
        let (v, e) = gk15(&f, w[0], w[1]);
        evals += 15;
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(FalError::Domain(format!("non-finite integrand on [{}, {}]", w[0], w[1])));
        }
        total_err += e;
        heap.push(Segment { a: w[0], b: w[1], value: v, err: e });
    }
    loop {
        if total_err <= tol {
            break;
        }
        if evals + 30 > budget {
            return Err(FalError::NoConvergence(format!(
                "error {total_err:e} above tolerance {tol:e} after {evals} evaluations"
            )));
        }
        let Some(seg) = heap.pop() else { break };
        let m = 0.5 * (seg.a + seg.b);
        if !(seg.a < m && m < seg.b) || (seg.b - seg.a) < 1e-15 * seg.a.abs().max(seg.b.abs()) {
            frozen_err += seg.err;
            frozen_value += seg.value;
            if heap.is_empty() {
                break;
            }
            continue;
        }
        let (v1, e1) = gk15(&f, seg.a, m);
        let (v2, e2) = gk15(&f, m, seg.b);
        evals += 30;
        if !(v1 + v2).re.is_finite() || !(v1 + v2).im.is_finite() {
            return Err(FalError::Domain(format!("non-finite integrand near {m}")));
        }
        total_err += e1 + e2 - seg.err;
        heap.push(Segment { a: seg.a, b: m, value: v1, err: e1 });
        heap.push(Segment { a: m, b: seg.b, value: v2, err: e2 });
        if heap.is_empty() {
            break;
        }
    }
    // recompute sums to shed accumulated cancellation
    let mut value = frozen_value;
    let mut err = frozen_err;
    for s in heap.iter() {
        value += s.value;
        err += s.err;
    }
    Ok(QuadResult { value, error_estimate: err, evaluations: evals })
}

/// `∫_a^b f(x) dx` to absolute tolerance `tol` with the default budget.
pub fn integrate_adaptive<F: Fn(f64) -> C64>(f: F, a: f64, b: f64, tol: f64) -> Result<QuadResult> {
    if !(a < b) {
        return Err(FalError::Domain(format!("need a < b, got [{a}, {b}]")));
    }
    integrate_breaks(f, &[a, b], tol, DEFAULT_BUDGET)
}

/// Real-valued convenience wrapper.
pub fn integrate_real<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<(f64, f64)> {
    let r = integrate_adaptive(|x| C64::new(f(x), 0.0), a, b, tol)?;
    Ok((r.value.re, r.error_estimate))
}

/// `∫_a^∞ f(x) dx` through `x = a + scale·v/(1 − v)`. `scale` should match
/// the length over which `f` changes character.
pub fn integrate_to_infinity<F: Fn(f64) -> C64>(
    f: F,
    a: f64,
    scale: f64,
    tol: f64,
) -> Result<QuadResult> {
    if !(scale > 0.0) {
        return Err(FalError::Domain(format!("scale must be positive, got {scale}")));
    }
    let g = |v: f64| {
        if v >= 1.0 {
            return C64::new(0.0, 0.0);
        }
        let d = 1.0 - v;
        let x = a + scale * v / d;
        let y = f(x) * (scale / (d * d));
        if y.re.is_finite() && y.im.is_finite() {
            y
        } else {
            C64::new(0.0, 0.0)
        }
    };
    integrate_breaks(g, &[0.0, 0.5, 0.9, 0.99, 1.0], tol, DEFAULT_BUDGET)
}
