//! End-to-end acceptance run: one line per criterion, non-zero exit if any
//! criterion fails.

use std::f64::consts::{FRAC_PI_2, LN_2, PI};
use std::time::Instant;

use fal_core::asymptotics::*;
use fal_core::cfdynamics::*;
use fal_core::fit::{constant_range, dyadic_grid, fit_inverse_log, fit_slope, geometric_grid};
use fal_core::limitlab::{cauchy_cdf, dedekind_experiment, iid_sum_cf_check, ks_distance};
use fal_core::quad::{fourier_integral_numeric, MeasureSpec, PhiSpec};
use fal_core::specfun::{gamma, EULER_GAMMA};
use fal_core::C64;
use num_integer::Integer;
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ESTERMANN_TOL: f64 = 1e-12;
const SLOPE_TOL: f64 = 0.15;
const FLOOR_LINEAR_SPREAD: f64 = 3.0;
const MOMENTS_T: f64 = 1e-6;
const MOMENTS_LOG_POWER: f64 = -0.8;
const HALF_REL_TOL: f64 = 0.02;
const DEDEKIND_REL_TOL: f64 = 0.005;
const DEDEKIND_SPREAD: f64 = 10.0;
const TELESCOPING_TOL: f64 = 1e-8;
const MELLIN_TOL: f64 = 1e-12;
const IID_TOL: f64 = 5e-3;
const KS_TOL: f64 = 0.05;

type Outcome = Result<String, String>;

fn gk() -> MeasureSpec {
    MeasureSpec::gauss_kuzmin()
}

fn oracle(phi: &PhiSpec, t: f64, tol: f64) -> Result<C64, String> {
    fourier_integral_numeric(phi, &gk(), t, tol).map(|r| r.value).map_err(|e| e.to_string())
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn estermann_constant() -> Outcome {
    let e = power_log_expansion(0.5, 0.5, 1.0, &gk()).map_err(|e| e.to_string())?;
    let want = C64::new(-1.0 / (3.0 * LN_2), 0.0);
    let d = (e.c_star - want).norm();
    check(d <= ESTERMANN_TOL, format!("c* = {:.15}, |diff| = {d:.1e}", e.c_star.re))
}

fn floor_linear_law() -> Outcome {
    let phi = PhiSpec::floor_power(1.0).map_err(|e| e.to_string())?;
    let ts = dyadic_grid(10, 20);
    let mut rs = Vec::new();
    for &t in &ts {
        let law = -C64::new(0.0, t / LN_2) * C64::new(t.ln() + EULER_GAMMA, -FRAC_PI_2);
        rs.push((oracle(&phi, t, 1e-13)? - law).norm());
    }
    let scale = LogPowerScale { alpha: 2.0, p: 1.0 };
    let (lo, hi) = constant_range(&ts, &rs, &scale).map_err(|e| e.to_string())?;
    let c = (lo * hi).sqrt();
    let slope = fit_slope(&ts, &rs, 1.0).map_err(|e| e.to_string())?.slope;
    check(
        hi / c <= FLOOR_LINEAR_SPREAD && c / lo <= FLOOR_LINEAR_SPREAD && (slope - 2.0).abs() <= SLOPE_TOL,
        format!("C = {c:.3} (range {lo:.3}..{hi:.3}), slope {slope:.3}"),
    )
}

fn moments_family() -> Outcome {
    let t = MOMENTS_T;
    let bound = t.ln().abs().powf(MOMENTS_LOG_POWER);
    let mut parts = Vec::new();
    let mut ok = true;
    for lambda in [2.0, 3.0] {
        let phi = PhiSpec::floor_power(lambda).map_err(|e| e.to_string())?;
        let inv = 1.0 / lambda;
        let c_star = -C64::from_polar(1.0, -FRAC_PI_2 * inv) * gamma(C64::new(1.0 - inv, 0.0)).map_err(|e| e.to_string())? / LN_2;
        let coeff = oracle(&phi, t, 1e-10)? / t.powf(inv);
        let rel = (coeff - c_star).norm() / c_star.norm();
        ok &= rel <= bound;
        parts.push(format!("λ={lambda}: rel {rel:.2e}"));
    }
    check(ok, format!("{} (bound {bound:.3})", parts.join(", ")))
}

fn half_power_case() -> Outcome {
    let phi = PhiSpec::floor_power(0.5).map_err(|e| e.to_string())?;
    let e = floor_power_expansion(0.5).map_err(|e| e.to_string())?;
    let ts = geometric_grid(1e-5, 1e-2, 4).map_err(|e| e.to_string())?;
    let mut ys = Vec::new();
    for &t in &ts {
        let v = oracle(&phi, t, 1e-13)? - C64::new(0.0, t) * e.c1;
        ys.push(v.re / (t * t * t.ln().abs()));
    }
    let (a, b) = fit_inverse_log(&ts, &ys).map_err(|e| e.to_string())?;
    let want = -1.0 / LN_2;
    let rel = (a / want - 1.0).abs();
    check(
        rel <= HALF_REL_TOL,
        format!("limit {a:.6} (+{b:.3}/|log t|) vs {want:.6}, rel {rel:.1e}; raw ratio at 1e-5 {:.4}", ys[ys.len() - 1]),
    )
}

fn dedekind_linear_law() -> Outcome {
    let phi = PhiSpec::dedekind();
    let slope = -PI / LN_2;
    let t = 1e-5;
    let v = oracle(&phi, t, 1e-13)?;
    let rel = (v.re / t / slope - 1.0).abs();
    let ts = geometric_grid(1e-5, 1e-3, 4).map_err(|e| e.to_string())?;
    let mut rs = Vec::new();
    for &s in &ts {
        rs.push((oracle(&phi, s, 1e-13)? - slope * s).norm());
    }
    let (lo, hi) = constant_range(&ts, &rs, &LogPowerScale { alpha: 2.0, p: 2.0 }).map_err(|e| e.to_string())?;
    check(
        rel <= DEDEKIND_REL_TOL && hi / lo <= DEDEKIND_SPREAD,
        format!("Re I/t = {:.5}, rel {rel:.1e}; C in {lo:.3}..{hi:.3}", v.re / t),
    )
}

fn telescoping() -> Outcome {
    let a = constant_a();
    check((a + 1.0).abs() <= TELESCOPING_TOL, format!("A = {a:.12}"))
}

fn mellin_cross_check() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    let mut n = 0;
    while n < 20 {
        let a: f64 = rng.random_range(-3.0..3.0);
        let beta: f64 = rng.random_range(0.34..3.0);
        let lambda: f64 = rng.random_range(0.0..3.0);
        if a.abs() < 0.05 || (beta - 0.5).abs() < 0.01 || (beta - 1.0).abs() < 0.01 {
            continue;
        }
        let mu = if n % 2 == 0 { gk() } else { MeasureSpec::lebesgue() };
        let e = power_log_expansion(a, beta, lambda, &mu).map_err(|e| e.to_string())?;
        let xi = lambda / beta + 1.0;
        let g = gamma(C64::new(xi, 0.0)).map_err(|e| e.to_string())?;
        let varrho = a.abs().powf(1.0 / beta) * C64::from_polar(1.0, -a.signum() * PI / (2.0 * beta)) * g / beta.powf(xi);
        let d = MellinPolarData::new(1.0 / beta, xi, 0.5, varrho).map_err(|e| e.to_string())?;
        let want = mu.f0 * mellin_cstar(&d).map_err(|e| e.to_string())?;
        worst = worst.max((e.c_star - want).norm() / want.norm().max(1.0));
        n += 1;
    }
    check(worst <= MELLIN_TOL, format!("20 triples, worst relative difference {worst:.1e}"))
}

fn addition_calculus() -> Outcome {
    let sc = |alpha, p| LogPowerScale { alpha, p };
    let mk = |c1: f64, cs: f64, m: LogPowerScale, r: LogPowerScale| {
        Expansion::new(C64::new(c1, 0.0), 0.0, C64::new(cs, 0.0), m, r).map_err(|e| e.to_string())
    };
    let cases = [
        (mk(0.3, 1.5, sc(1.0, 1.0), sc(1.0, 0.0))?, mk(-0.1, 7.0, sc(2.0, 0.0), sc(2.0, 0.0))?, sc(1.0, 0.0)),
        (mk(1.0, 2.0, sc(1.5, 2.0), sc(1.5, 1.0))?, mk(2.0, 3.0, sc(1.5, 0.5), sc(1.5, 0.0))?, sc(1.5, 1.25)),
        (mk(0.5, -1.0, sc(2.0, 4.0), sc(2.0, 0.0))?, mk(0.25, 1.0, sc(2.0, -3.0), sc(2.0, -3.0))?, sc(2.0, 2.0)),
    ];
    let mut ok = true;
    let mut got = Vec::new();
    for (e1, e2, want) in &cases {
        for s in [add_expansions(e1, e2), add_expansions(e2, e1)] {
            let s = s.map_err(|e| e.to_string())?;
            ok &= s.err == *want && s.c1 == e1.c1 + e2.c1 && s.c_star == e1.c_star && s.main == e1.main;
        }
        got.push(format!("{}", want.p));
    }
    check(ok, format!("three error cases p_R = {} with c1 additive, c* from the dominant term", got.join(", ")))
}

fn iid_identity() -> Outcome {
    let phi = PhiSpec::floor_power(1.0).map_err(|e| e.to_string())?;
    let d = iid_sum_cf_check(&phi, 20, 5e-3, 1_000_000, 7).map_err(|e| e.to_string())?;
    check(d <= IID_TOL, format!("distance {d:.2e}"))
}

fn cauchy_reproduction() -> Outcome {
    let s = dedekind_experiment(5000).map_err(|e| e.to_string())?;
    let d = ks_distance(&s, cauchy_cdf);
    check(d <= KS_TOL, format!("{} samples, KS {d:.4}", s.len()))
}

fn exact_suite() -> Outcome {
    let mut pairs = 0u64;
    for q in 1..=500u64 {
        for p in 1..=q {
            if p.gcd(&q) != 1 {
                continue;
            }
            let x = cf_expand(p as i64, q as i64).map_err(|e| e.to_string())?;
            if reconstruct(&x.coeffs) != Some((p, q)) {
                return Err(format!("round trip fails at {p}/{q}"));
            }
            pairs += 1;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut checked = 0;
    while checked < 100 {
        let q: i64 = rng.random_range(2..=10_000);
        let p: i64 = rng.random_range(1..q);
        if p.gcd(&q) != 1 {
            continue;
        }
        let lhs = dedekind_sum(p, q).map_err(|e| e.to_string())? + dedekind_sum(q, p).map_err(|e| e.to_string())?;
        let (a, b) = (p as i128, q as i128);
        if lhs != Ratio::new(a * a + b * b + 1, 12 * a * b) - Ratio::new(1, 4) {
            return Err(format!("reciprocity fails at ({p}, {q})"));
        }
        checked += 1;
    }
    for (big_q, want) in [(5, 10), (100, 3044), (1000, 304_192)] {
        if farey_count(big_q) != want || farey_enumerate(big_q).count() as u64 != want {
            return Err(format!("Farey count at Q = {big_q}"));
        }
    }
    check(pairs == farey_count(500), format!("{pairs} round trips, 100 reciprocity pairs, Farey counts"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("estermann constant", estermann_constant),
        ("floor linear law", floor_linear_law),
        ("moments family", moments_family),
        ("square-root floor", half_power_case),
        ("dedekind linear law", dedekind_linear_law),
        ("telescoping constant", telescoping),
        ("mellin cross-check", mellin_cross_check),
        ("addition calculus", addition_calculus),
        ("i.i.d. identity", iid_identity),
        ("cauchy reproduction", cauchy_reproduction),
        ("exact arithmetic", exact_suite),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        let (tag, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {:>2} {tag} {name}: {detail} [{secs:.1}s]", i + 1);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
