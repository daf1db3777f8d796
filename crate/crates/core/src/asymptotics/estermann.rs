//! The two-dimensional observable built from the central values of the
//! Estermann function, and the main terms of its characteristic function
//! under `x ↦ φ₁(x) + φ₂(T x)`.
//!
//! Component `j ∈ {1, 2}` is
//! `(½x^{−1/2}(log(1/x) + κ₋) + ζ(1/2)² + Re ℰ(±x), ±½x^{−1/2}(log(1/x) + κ₊) + Im ℰ(±x))`
//! with `+` for `j = 1`. The bounded function `ℰ` is pluggable and defaults
//! to zero.

use std::f64::consts::{FRAC_PI_2, LN_2};
use std::sync::OnceLock;

use crate::error::{FalError, Result};
use crate::quad::{fourier_integral_numeric, integrate_adaptive, AnalyticFn, MeasureSpec, PhiSpec, QuadResult};
use crate::specfun::{zeta, EULER_GAMMA};
use crate::C64;

/// `γ₀ − log 8π − π/2`.
pub const KAPPA_MINUS: f64 = EULER_GAMMA - 3.224171427529236 - FRAC_PI_2;
/// `γ₀ − log 8π + π/2`.
pub const KAPPA_PLUS: f64 = EULER_GAMMA - 3.224171427529236 + FRAC_PI_2;

/// Branches summed explicitly when integrating `φ₂ ∘ T`.
pub const DEFAULT_DEPTH: usize = 64;

const MU_TOL: f64 = 1e-12;

fn zeta_half_sq() -> f64 {
    let z = zeta(C64::new(0.5, 0.0)).expect("zeta(1/2) is regular").re;
    z * z
}

/// Real and imaginary parts of `ℰ` on `[−1, 1]`, each with a holomorphic
/// extension so the contour oracle can use them.
#[derive(Clone)]
pub struct EstermannRemainder {
    pub re: AnalyticFn,
    pub im: AnalyticFn,
}

impl EstermannRemainder {
    fn at(&self, s: f64) -> (f64, f64) {
        (self.re.eval(s), self.im.eval(s))
    }
}

/// The observable pair together with a cached mean vector.
pub struct EstermannModel {
    remainder: Option<EstermannRemainder>,
    mu: OnceLock<Result<[f64; 2]>>,
}

impl Default for EstermannModel {
    fn default() -> Self {
        Self::new(None)
    }
}

fn sign(j: usize) -> f64 {
    if j == 1 {
        1.0
    } else {
        -1.0
    }
}

impl EstermannModel {
    pub fn new(remainder: Option<EstermannRemainder>) -> Self {
        EstermannModel { remainder, mu: OnceLock::new() }
    }

    /// `φ_j(x)` as a pair; `with_constant = false` drops `ζ(1/2)²`.
    pub fn component(&self, j: usize, x: f64, with_constant: bool) -> [f64; 2] {
        let s = sign(j);
        let (er, ei) = self.remainder.as_ref().map_or((0.0, 0.0), |r| r.at(-s * x));
        let w = 0.5 / x.sqrt();
        let l = -x.ln();
        let c = if with_constant { zeta_half_sq() } else { 0.0 };
        [w * (l + KAPPA_MINUS) + c + er, s * w * (l + KAPPA_PLUS) + ei]
    }

    /// `μ = ∫ (φ₁ + φ₂∘T) dμ`, cached after the first call.
    pub fn mu_vector(&self) -> Result<[f64; 2]> {
        self.mu.get_or_init(|| self.mu_vector_at(DEFAULT_DEPTH, true)).clone()
    }

    /// `μ` with `depth` explicit inverse branches of the Gauss map; the
    /// remaining branches are summed in closed form,
    /// `Σ_{n>N} 1/((n+y)(n+y+1)) = 1/(N+1+y)`.
    pub fn mu_vector_at(&self, depth: usize, with_constant: bool) -> Result<[f64; 2]> {
        if depth == 0 {
            return Err(FalError::Domain("branch depth must be positive".into()));
        }
        let pack = |v: [f64; 2]| C64::new(v[0], v[1]);
        let first = integrate_adaptive(
            |x| pack(self.component(1, x, with_constant)) / ((1.0 + x) * LN_2),
            0.0,
            1.0,
            MU_TOL,
        )?;
        let mut total = first.value;
        for n in 1..=depth {
            let nf = n as f64;
            let r = integrate_adaptive(
                |y| pack(self.component(2, y, with_constant)) / ((nf + y) * (nf + y + 1.0) * LN_2),
                0.0,
                1.0,
                MU_TOL / (nf * nf),
            )?;
            total += r.value;
        }
        let tail = integrate_adaptive(
            |y| pack(self.component(2, y, with_constant)) / ((depth as f64 + 1.0 + y) * LN_2),
            0.0,
            1.0,
            MU_TOL,
        )?;
        total += tail.value;
        Ok([total.re, total.im])
    }

    /// `1 + i⟨t, μ⟩ − (1/(3 log 2)) Σ_j ⟨t, u_j⟩² |log|⟨t, u_j⟩||³` with
    /// `u_j = (1, ±1)`.
    pub fn main_terms(&self, t: [f64; 2]) -> Result<C64> {
        check_frequency(t)?;
        let mu = self.mu_vector()?;
        let lin = t[0] * mu[0] + t[1] * mu[1];
        let quad: f64 = [t[0] + t[1], t[0] - t[1]]
            .iter()
            .map(|&s| if s == 0.0 { 0.0 } else { s * s * s.abs().ln().abs().powi(3) })
            .sum();
        Ok(C64::new(1.0 - quad / (3.0 * LN_2), lin))
    }

    /// `⟨t, φ_j⟩` as a single scalar observable scaled by `1/‖t‖`.
    fn projected(&self, j: usize, t: [f64; 2], norm: f64) -> PhiSpec {
        let s = sign(j);
        let p = 0.5 * (t[0] + s * t[1]) / norm;
        let q = 0.5 * (t[0] * KAPPA_MINUS + s * t[1] * KAPPA_PLUS) / norm;
        let r = t[0] * zeta_half_sq() / norm;
        let phi = PhiSpec::estermann_component(p, q, r);
        match &self.remainder {
            None => phi,
            Some(rem) => {
                let (a, b) = (t[0] / norm, t[1] / norm);
                let (re, im) = (rem.re.clone(), rem.im.clone());
                let (rc, ic) = (re.complex.clone(), im.complex.clone());
                let real = move |x: f64| a * re.eval(-s * x) + b * im.eval(-s * x);
                match (rc, ic) {
                    (Some(rc), Some(ic)) => phi.with_remainder(AnalyticFn::analytic(real, move |z: C64| {
                        a * rc(-s * z) + b * ic(-s * z)
                    })),
                    _ => phi.with_remainder(AnalyticFn::real_only(real)),
                }
            }
        }
    }
}

fn check_frequency(t: [f64; 2]) -> Result<f64> {
    let norm = t[0].hypot(t[1]);
    if !(norm > 0.0 && norm < 1.0) {
        return Err(FalError::Domain(format!("need 0 < |t| < 1, got |t| = {norm}")));
    }
    Ok(norm)
}

fn default_model() -> &'static EstermannModel {
    static MODEL: OnceLock<EstermannModel> = OnceLock::new();
    MODEL.get_or_init(EstermannModel::default)
}

/// Mean vector for `ℰ ≡ 0`.
pub fn mu_vector() -> Result<[f64; 2]> {
    default_model().mu_vector()
}

/// Main terms for `ℰ ≡ 0`.
pub fn estermann_main_terms(t: [f64; 2]) -> Result<C64> {
    default_model().main_terms(t)
}

/// Numerical reference for the characteristic function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstermannOracle {
    pub value: C64,
    pub error_estimate: f64,
}

/// `1 + I[⟨t, φ₁⟩](1) + I[⟨t, φ₂⟩](1)`, each piece evaluated by the
/// quadrature oracle at frequency `‖t‖`; `φ₂∘T` is replaced by `φ₂` through
/// Gauss-map invariance. The product term
/// `∫ (e^{i⟨t,φ₁⟩} − 1)(e^{i⟨t,φ₂∘T⟩} − 1) dμ` is `O(‖t‖²)` and is not
/// included.
pub fn estermann_oracle(model: &EstermannModel, t: [f64; 2], tol: f64) -> Result<EstermannOracle> {
    let norm = check_frequency(t)?;
    let mu = MeasureSpec::gauss_kuzmin();
    let mut acc = QuadResult::zero();
    for j in [1, 2] {
        acc = acc.plus(fourier_integral_numeric(&model.projected(j, t, norm), &mu, norm, tol)?);
    }
    Ok(EstermannOracle { value: acc.value + 1.0, error_estimate: acc.error_estimate })
}
