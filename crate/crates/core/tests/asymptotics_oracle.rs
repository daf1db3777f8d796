//! Residual orders of every implemented expansion against the quadrature
//! oracle on `t = 2^{−k}`.

use fal_core::asymptotics::*;
use fal_core::fit::{dyadic_grid, fit_slope};
use fal_core::limitlab::run_sweep;
use fal_core::quad::{MeasureSpec, PhiSpec};

const SLOPE_TOL: f64 = 0.15;

fn sweep(phi: &PhiSpec, mu: &MeasureSpec, e: &Expansion, grid: &[f64], tol: f64) -> f64 {
    let r = run_sweep(phi, mu, e, grid, tol).unwrap();
    let s = fit_slope(&r.t_grid, &r.residuals, e.err.p).unwrap().slope;
    assert!((s - r.fitted_slope).abs() < 1e-12);
    s
}

fn sharp(phi: PhiSpec, mu: MeasureSpec, e: Expansion) {
    let s = sweep(&phi, &mu, &e, &dyadic_grid(8, 20), 1e-12);
    assert!((s - e.err.alpha).abs() <= SLOPE_TOL, "{}: slope {s} vs {}", phi.tag(), e.err.alpha);
}

/// The residual decays at least as fast as the error class says.
fn bounded(phi: PhiSpec, mu: MeasureSpec, e: Expansion, grid: &[f64], tol: f64) -> f64 {
    let s = sweep(&phi, &mu, &e, grid, tol);
    assert!(s >= e.err.alpha - SLOPE_TOL, "{}: slope {s} below {}", phi.tag(), e.err.alpha);
    s
}

#[test]
fn estermann_half_power_log() {
    let gk = MeasureSpec::gauss_kuzmin();
    sharp(PhiSpec::power_log(0.5, 0.5, 1.0).unwrap(), gk.clone(), power_log_expansion(0.5, 0.5, 1.0, &gk).unwrap());
}

#[test]
fn generic_power_log() {
    let gk = MeasureSpec::gauss_kuzmin();
    sharp(PhiSpec::power_log(-0.7, 0.8, 1.5).unwrap(), gk.clone(), power_log_expansion(-0.7, 0.8, 1.5, &gk).unwrap());
    sharp(PhiSpec::power_log(1.0, 1.0, 0.0).unwrap(), gk.clone(), power_log_expansion(1.0, 1.0, 0.0, &gk).unwrap());
}

#[test]
fn floor_linear_and_square_root() {
    let gk = MeasureSpec::gauss_kuzmin();
    sharp(PhiSpec::floor_power(1.0).unwrap(), gk.clone(), floor_power_expansion(1.0).unwrap());
    sharp(PhiSpec::floor_power(0.5).unwrap(), gk, floor_power_expansion(0.5).unwrap());
}

#[test]
fn dedekind_difference() {
    sharp(PhiSpec::dedekind(), MeasureSpec::gauss_kuzmin(), dedekind_expansion());
}

#[test]
fn inverse_square_over_lebesgue() {
    // the next term after c⋆t^{1/2} is linear in t
    let leb = MeasureSpec::lebesgue();
    let e = power_log_expansion(1.0, 2.0, 0.0, &leb).unwrap();
    let s = bounded(PhiSpec::power_log(1.0, 2.0, 0.0).unwrap(), leb, e, &dyadic_grid(8, 20), 1e-12);
    assert!(s > 0.85, "{s}");
}

#[test]
fn floor_three_quarters() {
    let gk = MeasureSpec::gauss_kuzmin();
    let e = floor_power_expansion(0.75).unwrap();
    bounded(PhiSpec::floor_power(0.75).unwrap(), gk, e, &dyadic_grid(8, 20), 1e-12);
}

#[test]
fn floor_higher_powers() {
    let gk = MeasureSpec::gauss_kuzmin();
    let grid: Vec<f64> = dyadic_grid(8, 20).into_iter().step_by(2).collect();
    for lambda in [2.0, 3.0] {
        let e = floor_power_expansion(lambda).unwrap();
        bounded(PhiSpec::floor_power(lambda).unwrap(), gk.clone(), e, &grid, 1e-10);
    }
}

#[test]
fn estermann_characteristic_function() {
    let model = EstermannModel::default();
    let scale = LogPowerScale { alpha: 2.0, p: 2.0 + EPSILON };
    for dir in [[1.0, 0.0], [0.6, 0.8]] {
        let ts: Vec<f64> = (2..=8).map(|k| 10f64.powi(-k)).collect();
        let rs: Vec<f64> = ts
            .iter()
            .map(|&t| {
                let v = [t * dir[0], t * dir[1]];
                let num = estermann_oracle(&model, v, 1e-13).unwrap().value;
                (num - model.main_terms(v).unwrap()).norm()
            })
            .collect();
        let worst = ts.iter().zip(&rs).map(|(&t, &r)| r / scale.eval(t)).fold(0.0, f64::max);
        assert!(worst < 12.0, "{dir:?}: ratio {worst}");
        let s = fit_slope(&ts, &rs, scale.p).unwrap().slope;
        assert!((s - 2.0).abs() <= SLOPE_TOL, "{dir:?}: slope {s}");
    }
}
