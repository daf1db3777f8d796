use std::f64::consts::{LN_2, PI};
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use fal_core::asymptotics::{
    constant_a, estermann_oracle, h_series, mu_vector, EstermannModel, KAPPA_MINUS, KAPPA_PLUS, EPSILON,
};
use fal_core::fit::{fit_log_power, fit_slope, geometric_grid};
use fal_core::limitlab::{
    cauchy_cdf, dedekind_experiment, dedekind_normalization, iid_sum_cf_report, iid_sums, ks_distance, run_sweep,
    LEVY_LENGTH, SCHEMA,
};
use fal_core::specfun::{zeta, EULER_GAMMA};
use fal_core::{SampleSet, SweepReport, C64};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{Family, Format, RunConfig};
use crate::Failure;

const SLOPE_TOL: f64 = 0.15;

fn io_err(path: &Path) -> impl Fn(io::Error) -> Failure + '_ {
    move |e| Failure::Usage(format!("{}: {e}", path.display()))
}

/// Runs `body` on the named file, or on stdout.
fn with_output(path: Option<&Path>, body: impl FnOnce(&mut dyn Write) -> Result<(), Failure>) -> Result<(), Failure> {
    match path {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p).map_err(io_err(p))?);
            body(&mut w)?;
            w.flush().map_err(io_err(p))
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            body(&mut w)?;
            w.flush().map_err(|e| Failure::Check(format!("stdout: {e}")))
        }
    }
}

fn write_line(w: &mut dyn Write, s: &str) -> Result<(), Failure> {
    writeln!(w, "{s}").map_err(|e| Failure::Check(format!("write: {e}")))
}

fn pair(z: C64) -> Value {
    json!([z.re, z.im])
}

fn family_json(f: &Family) -> Value {
    match *f {
        Family::Floor { lambda } => json!({ "family": "floor", "lambda": lambda }),
        Family::PowerLog { a, beta, lambda } => json!({ "family": "powerlog", "a": a, "beta": beta, "lambda": lambda }),
        Family::Dedekind => json!({ "family": "dedekind" }),
        Family::Estermann => json!({ "family": "estermann", "direction": [1.0, 0.0] }),
    }
}

/// Sweep, expected error order and the expansion record, if scalar.
fn sweep(cfg: &RunConfig, grid: &[f64]) -> Result<(SweepReport, f64, Option<Value>), Failure> {
    if cfg.family == Family::Estermann {
        let model = EstermannModel::default();
        let pairs: Vec<Result<(C64, C64), Failure>> = grid
            .par_iter()
            .map(|&t| {
                let v = [t, 0.0];
                Ok((estermann_oracle(&model, v, cfg.tol)?.value, model.main_terms(v)?))
            })
            .collect();
        let (numeric, predicted): (Vec<C64>, Vec<C64>) = pairs.into_iter().collect::<Result<Vec<_>, _>>()?.into_iter().unzip();
        let report = SweepReport::new(grid.to_vec(), numeric, predicted, 2.0 + EPSILON)?;
        return Ok((report, 2.0, None));
    }
    let (phi, mu, e) = cfg.family.scalar()?;
    let report = run_sweep(&phi, &mu, &e, grid, cfg.tol)?;
    let record: Value = serde_json::from_str(&e.to_json()).map_err(|err| Failure::Check(err.to_string()))?;
    Ok((report, e.err.alpha, Some(record)))
}

pub fn verify(cfg: &RunConfig) -> Result<(), Failure> {
    let grid = geometric_grid(cfg.t_min, cfg.t_max, cfg.points_per_decade).map_err(|e| Failure::Usage(e.to_string()))?;
    let (report, expected, record) = sweep(cfg, &grid)?;
    let pass = (report.fitted_slope - expected).abs() <= SLOPE_TOL;
    with_output(cfg.output.as_deref(), |w| match cfg.format {
        Format::Csv => report.write_csv(w).map_err(Failure::from),
        Format::Json => {
            let rows: Vec<Value> = (0..report.t_grid.len())
                .map(|i| {
                    json!({
                        "t": report.t_grid[i],
                        "numeric": pair(report.numeric[i]),
                        "predicted": pair(report.predicted[i]),
                        "residual": report.residuals[i],
                    })
                })
                .collect();
            let doc = json!({
                "schema": SCHEMA,
                "command": "verify",
                "parameters": family_json(&cfg.family),
                "expansion": record,
                "expected_alpha": expected,
                "slope_tolerance": SLOPE_TOL,
                "fitted_slope": report.fitted_slope,
                "fitted_log_exponent": report.fitted_log_exponent,
                "pass": pass,
                "rows": rows,
            });
            write_line(w, &doc.to_string())
        }
    })?;
    let mut summary = format!(
        "verify {}: slope {:.4} (expected {:.4} ± {SLOPE_TOL}), free log exponent {:.3}",
        cfg.family.tag(),
        report.fitted_slope,
        expected,
        report.fitted_log_exponent
    );
    if cfg.family == Family::Dedekind {
        let i = report.t_grid.len() - 1;
        let t = report.t_grid[i];
        summary += &format!(
            "; Re I(t)/t = {:.6} at t = {t:e} (linear law {:.6})",
            report.numeric[i].re / t,
            -PI / LN_2
        );
    }
    eprintln!("{summary}: {}", if pass { "ok" } else { "FAILED" });
    if pass {
        Ok(())
    } else {
        Err(Failure::Check(format!("slope {:.4} outside {expected:.4} ± {SLOPE_TOL}", report.fitted_slope)))
    }
}

pub fn fit(path: &Path, p: Option<f64>, format: Format) -> Result<(), Failure> {
    let file = File::open(path).map_err(io_err(path))?;
    let (ts, rs) = SweepReport::read_residuals(file).map_err(|e| Failure::Usage(e.to_string()))?;
    let usage = |e: fal_core::FalError| Failure::Usage(format!("{}: {e}", path.display()));
    let free = fit_log_power(&ts, &rs).map_err(usage)?;
    let fixed = match p {
        Some(p) => Some((p, fit_slope(&ts, &rs, p).map_err(usage)?.slope)),
        None => None,
    };
    let line = match format {
        Format::Json => json!({
            "schema": SCHEMA,
            "command": "fit",
            "points": ts.len(),
            "alpha_fit": free.alpha,
            "p_fit": free.p,
            "constant": free.constant,
            "fixed_p": fixed.map(|f| f.0),
            "slope_at_fixed_p": fixed.map(|f| f.1),
        })
        .to_string(),
        Format::Csv => {
            let mut s = format!("alpha_fit,p_fit,constant\n{:.16e},{:.16e},{:.16e}", free.alpha, free.p, free.constant);
            if let Some((p, slope)) = fixed {
                s += &format!("\nfixed_p,slope\n{p:.16e},{slope:.16e}");
            }
            s
        }
    };
    with_output(None, |w| write_line(w, &line))
}

pub struct SimOutput {
    pub path: Option<PathBuf>,
    pub format: Format,
}

impl SimOutput {
    fn samples(&self, s: &SampleSet) -> Result<(), Failure> {
        if let Some(p) = &self.path {
            with_output(Some(p), |w| match self.format {
                Format::Csv => s.write_csv(w).map_err(Failure::from),
                Format::Json => write_line(w, &s.to_json()),
            })?;
        }
        Ok(())
    }

    fn summary(&self, text: String, doc: Value) -> Result<(), Failure> {
        let line = match self.format {
            Format::Csv => text,
            Format::Json => doc.to_string(),
        };
        with_output(None, |w| write_line(w, &line))
    }
}

pub struct IidRun {
    pub family: Family,
    pub r: u32,
    pub n: usize,
    pub seed: u64,
    pub t: f64,
}

pub fn simulate_iid(run: &IidRun, max_distance: f64, out: &SimOutput) -> Result<(), Failure> {
    if run.n == 0 {
        return Err(Failure::Usage("--N must be positive".into()));
    }
    if !(run.t.abs() < 1.0) {
        return Err(Failure::Usage(format!("--t must satisfy |t| < 1, got {}", run.t)));
    }
    let (phi, _, _) = run.family.scalar()?;
    let check = iid_sum_cf_report(&phi, run.r, run.t, run.n, run.seed)?;
    if out.path.is_some() {
        out.samples(&iid_sums(&phi, run.r, run.n, run.seed)?)?;
    }
    let pass = check.distance <= max_distance;
    let text = format!(
        "iid {} r={} N={} seed={} t={}: empirical {:.10} {:+.10}i, predicted {:.10} {:+.10}i, distance {:.3e} (max {max_distance:e}) {}",
        run.family.tag(),
        run.r,
        run.n,
        run.seed,
        run.t,
        check.empirical.re,
        check.empirical.im,
        check.predicted.re,
        check.predicted.im,
        check.distance,
        if pass { "ok" } else { "FAILED" }
    );
    let doc = json!({
        "schema": SCHEMA,
        "command": "simulate",
        "mode": "iid",
        "parameters": family_json(&run.family),
        "r": run.r,
        "n": run.n,
        "seed": run.seed,
        "t": run.t,
        "empirical": pair(check.empirical),
        "predicted": pair(check.predicted),
        "distance": check.distance,
        "max_distance": max_distance,
        "pass": pass,
    });
    out.summary(text, doc)?;
    if pass {
        Ok(())
    } else {
        Err(Failure::Check(format!("distance {:.3e} above {max_distance:e}", check.distance)))
    }
}

pub fn simulate_dedekind(big_q: u64, max_distance: f64, out: &SimOutput) -> Result<(), Failure> {
    if big_q < 10 {
        return Err(Failure::Usage(format!("--Q must be at least 10, got {big_q}")));
    }
    let s = dedekind_experiment(big_q)?;
    out.samples(&s)?;
    let ks = ks_distance(&s, cauchy_cdf);
    let pass = ks <= max_distance;
    let kappa = s.normalization.unwrap_or(f64::NAN);
    let text = format!(
        "dedekind Q={big_q}: {} samples, scale {kappa:.10}, KS distance to Cauchy {ks:.4} (max {max_distance}) {}",
        s.len(),
        if pass { "ok" } else { "FAILED" }
    );
    let doc = json!({
        "schema": SCHEMA,
        "command": "simulate",
        "mode": "dedekind",
        "q": big_q,
        "samples": s.len(),
        "normalization": kappa,
        "ks": ks,
        "max_distance": max_distance,
        "pass": pass,
    });
    out.summary(text, doc)?;
    if pass {
        Ok(())
    } else {
        Err(Failure::Check(format!("KS distance {ks:.4} above {max_distance}")))
    }
}

pub fn constants(format: Format) -> Result<(), Failure> {
    let mu = mu_vector()?;
    let zeta_half = zeta(C64::new(0.5, 0.0))?.re;
    let table: Vec<(&str, f64, &str)> = vec![
        ("euler_gamma", EULER_GAMMA, "closed form"),
        ("pi_over_log2", PI / LN_2, "closed form"),
        ("estermann_c_star", -1.0 / (3.0 * LN_2), "closed form"),
        ("half_floor_c_star", -1.0 / LN_2, "closed form"),
        ("telescoping_a", constant_a(), "numeric: extrapolated partial sums"),
        ("h_series_at_0", h_series(C64::new(0.0, 0.0))?.re, "numeric: hurwitz series"),
        ("kappa_minus", KAPPA_MINUS, "closed form"),
        ("kappa_plus", KAPPA_PLUS, "closed form"),
        ("zeta_half_squared", zeta_half * zeta_half, "numeric: euler-maclaurin"),
        ("estermann_mu_1", mu[0], "numeric: quadrature over gauss-map branches"),
        ("estermann_mu_2", mu[1], "numeric: quadrature over gauss-map branches"),
        ("levy_length", LEVY_LENGTH, "closed form"),
        ("dedekind_scale", dedekind_normalization(), "derived: levy length times linear coefficient"),
    ];
    let body = match format {
        Format::Csv => {
            let mut s = String::from("name,value,provenance");
            for (name, v, prov) in &table {
                s += &format!("\n{name},{v:.16e},{prov}");
            }
            s
        }
        Format::Json => {
            let rows: Vec<Value> = table
                .iter()
                .map(|(name, v, prov)| json!({ "name": name, "value": v, "provenance": prov }))
                .collect();
            json!({ "schema": SCHEMA, "command": "constants", "constants": rows }).to_string()
        }
    };
    with_output(None, |w| write_line(w, &body))
}
