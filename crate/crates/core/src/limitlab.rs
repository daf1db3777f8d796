//! Monte Carlo and enumeration experiments against predicted limit laws.

use std::f64::consts::{LN_2, PI};
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::asymptotics::{dedekind_expansion, eval_main_terms, Expansion};
use crate::cfdynamics::{birkhoff_sum, cf_expand, dedekind_sum_12q, farey_map, gk_sample};
use crate::error::{FalError, Result};
use crate::fit::{fit_log_power, fit_slope};
use crate::quad::{fourier_integral_numeric, MeasureSpec, PhiSpec};
use crate::C64;

/// JSON schema tag shared with the command-line front end.
pub const SCHEMA: &str = "fal-1";

/// Mean continued-fraction length of `p/q` per unit of `log q`,
/// `12 log 2/π²`.
pub const LEVY_LENGTH: f64 = 12.0 * LN_2 / (PI * PI);

/// Samples per random stream.
const BLOCK: usize = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    IidGk,
    RationalBirkhoff,
    Dedekind,
}

impl Provenance {
    pub fn tag(&self) -> &'static str {
        match self {
            Provenance::IidGk => "iid-gk",
            Provenance::RationalBirkhoff => "rational-birkhoff",
            Provenance::Dedekind => "dedekind",
        }
    }
}

/// Real samples with the seed (Monte Carlo) or denominator bound
/// (enumeration) that produced them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSet {
    pub values: Vec<f64>,
    pub provenance: Provenance,
    pub seed_or_q: u64,
    /// Constant `κ` of the normalisation, when one was applied.
    pub normalization: Option<f64>,
}

impl SampleSet {
    pub fn new(values: Vec<f64>, provenance: Provenance, seed_or_q: u64) -> Result<Self> {
        if values.is_empty() {
            return Err(FalError::Domain("a sample set must be non-empty".into()));
        }
        Ok(SampleSet { values, provenance, seed_or_q, normalization: None })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let io = |e: csv::Error| FalError::Domain(format!("csv: {e}"));
        out.write_record(["index", "value"]).map_err(io)?;
        for (i, v) in self.values.iter().enumerate() {
            out.write_record([i.to_string(), format!("{v:.16e}")]).map_err(io)?;
        }
        out.flush().map_err(|e| FalError::Domain(format!("csv: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::json!({
            "schema": SCHEMA,
            "provenance": self.provenance.tag(),
            "seed_or_q": self.seed_or_q,
            "normalization": self.normalization,
            "values": self.values,
        })
        .to_string()
    }
}

/// Neumaier-compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
struct Kahan {
    sum: f64,
    c: f64,
}

impl Kahan {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.c += (self.sum - t) + x;
        } else {
            self.c += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.c
    }
}

/// Sum of `e^{itv}` over `values`, in fixed blocks so the result does not
/// depend on the thread count.
fn cf_sum(values: &[f64], t: f64) -> C64 {
    let parts: Vec<(f64, f64)> = values
        .par_chunks(BLOCK)
        .map(|chunk| {
            let (mut re, mut im) = (Kahan::default(), Kahan::default());
            for &v in chunk {
                let (s, c) = (t * v).sin_cos();
                re.add(c);
                im.add(s);
            }
            (re.value(), im.value())
        })
        .collect();
    let (mut re, mut im) = (Kahan::default(), Kahan::default());
    for (a, b) in parts {
        re.add(a);
        im.add(b);
    }
    C64::new(re.value(), im.value())
}

/// `(1/N) Σ e^{it·v_k}`.
pub fn empirical_cf(s: &SampleSet, t: f64) -> C64 {
    if t == 0.0 {
        return C64::new(1.0, 0.0);
    }
    cf_sum(&s.values, t) / s.len() as f64
}

/// `N` draws of `Σ_{j≤r} φ(X_j)` with `X_j` i.i.d. Gauss–Kuzmin. Block `b`
/// uses ChaCha8 stream `b` of `seed`.
pub fn iid_sums(phi: &PhiSpec, r: u32, n: usize, seed: u64) -> Result<SampleSet> {
    if n == 0 {
        return Err(FalError::Domain("need at least one sample".into()));
    }
    let blocks = n.div_ceil(BLOCK);
    let values: Vec<f64> = (0..blocks)
        .into_par_iter()
        .flat_map_iter(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b as u64);
            let len = BLOCK.min(n - b * BLOCK);
            (0..len)
                .map(|_| {
                    let mut s = 0.0;
                    for _ in 0..r {
                        // 1 − U avoids x = 0
                        let u: f64 = rng.random();
                        s += phi.eval(gk_sample(1.0 - u));
                    }
                    s
                })
                .collect::<Vec<_>>()
        })
        .collect();
    SampleSet::new(values, Provenance::IidGk, seed)
}

/// Outcome of an i.i.d. characteristic-function comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IidCheck {
    pub empirical: C64,
    pub predicted: C64,
    pub distance: f64,
}

/// `|ψ̂_N(t) − (1 + I[φ](t))^r|` for i.i.d. Gauss–Kuzmin sums.
pub fn iid_sum_cf_check(phi: &PhiSpec, r: u32, t: f64, n: usize, seed: u64) -> Result<f64> {
    Ok(iid_sum_cf_report(phi, r, t, n, seed)?.distance)
}

pub fn iid_sum_cf_report(phi: &PhiSpec, r: u32, t: f64, n: usize, seed: u64) -> Result<IidCheck> {
    if !(t.abs() < 1.0) {
        return Err(FalError::Domain(format!("need |t| < 1, got {t}")));
    }
    let one = C64::new(1.0, 0.0);
    let base = if t == 0.0 || r == 0 {
        one
    } else {
        let i = fourier_integral_numeric(phi, &MeasureSpec::gauss_kuzmin(), t.abs(), 1e-12)?.value;
        one + if t < 0.0 { i.conj() } else { i }
    };
    let predicted = base.powu(r);
    let samples = iid_sums(phi, r, n, seed)?;
    let empirical = empirical_cf(&samples, t);
    Ok(IidCheck { empirical, predicted, distance: (empirical - predicted).norm() })
}

/// `exp(r·(i c1 s + c2 s² + c⋆ s^α L(s)) − i t·centering)` with
/// `s = t/scaling`; negative `t` uses `ψ(−t) = conj ψ(t)`.
pub fn predicted_limit_cf(e: &Expansion, r: f64, scaling: f64, centering: f64, t: f64) -> Result<C64> {
    if t < 0.0 {
        return Ok(predicted_limit_cf(e, r, scaling, centering, -t)?.conj());
    }
    if t == 0.0 {
        return Ok(C64::new(1.0, 0.0));
    }
    let s = t / scaling;
    if !(s > 0.0 && s < 1.0) {
        return Err(FalError::Domain(format!("rescaled frequency t/scaling = {s} outside (0, 1)")));
    }
    let m = eval_main_terms(e, s)?;
    Ok((r * m - C64::new(0.0, t * centering)).exp())
}

/// Supremum distance between the empirical distribution of `s` and `cdf`,
/// checked on both sides of every sample point.
pub fn ks_distance(s: &SampleSet, cdf: impl Fn(f64) -> f64) -> f64 {
    let mut v = s.values.clone();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < v.len() {
        let mut j = i;
        while j < v.len() && v[j] == v[i] {
            j += 1;
        }
        let f = cdf(v[i]);
        d = d.max((f - i as f64 / n).abs()).max((f - j as f64 / n).abs());
        i = j;
    }
    d
}

pub fn cauchy_cdf(x: f64) -> f64 {
    0.5 + x.atan() / PI
}

/// Scale `κ` such that `12 s(p, q)/(κ log q)` is asymptotically standard
/// Cauchy: the alternating digit sum `12 s(p,q) ≈ Σ (−1)^{j+1} a_j` is a
/// Birkhoff sum of `⌊1/x⌋ − ⌊1/T x⌋` over about `(LEVY_LENGTH/2)·log q`
/// steps of `T²`, each contributing `i c1 t` with `i c1 = −π/log 2`.
pub fn dedekind_normalization() -> f64 {
    let e = dedekind_expansion();
    let linear = (C64::new(0.0, 1.0) * e.c1).re.abs();
    0.5 * LEVY_LENGTH * linear
}

/// `12 s(p, q)/(κ log q)` over all reduced `p/q ∈ (0, 1]` with `q ≤ Q`
/// (0 at `q = 1`, where the sum vanishes), ordered by `(q, p)`.
pub fn dedekind_experiment(big_q: u64) -> Result<SampleSet> {
    if big_q < 10 {
        return Err(FalError::Domain(format!("need Q >= 10, got {big_q}")));
    }
    let kappa = dedekind_normalization();
    let values = farey_map(big_q, |p, q| {
        if q == 1 {
            return 0.0;
        }
        let n = dedekind_sum_12q(p as i64, q as i64).expect("farey terms are reduced");
        let v = n as f64 / q as f64;
        v / (kappa * (q as f64).ln())
    });
    let mut set = SampleSet::new(values, Provenance::Dedekind, big_q)?;
    set.normalization = Some(kappa);
    Ok(set)
}

/// `Σ_j φ(T^j(p/q))` over all reduced `p/q ∈ (0, 1]` with `q ≤ Q`.
pub fn rational_birkhoff_samples(phi: &PhiSpec, big_q: u64) -> Result<SampleSet> {
    let values = farey_map(big_q, |p, q| {
        birkhoff_sum(phi, &cf_expand(p as i64, q as i64).expect("reduced")).unwrap_or(f64::NAN)
    });
    if values.iter().any(|v| v.is_nan()) {
        return Err(FalError::Domain("birkhoff sum failed on the orbit".into()));
    }
    SampleSet::new(values, Provenance::RationalBirkhoff, big_q)
}

/// Oracle values against expansion main terms over a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub t_grid: Vec<f64>,
    pub numeric: Vec<C64>,
    pub predicted: Vec<C64>,
    pub residuals: Vec<f64>,
    /// Slope of `log(r/|log t|^{p_err})` against `log t`.
    pub fitted_slope: f64,
    /// `p` of the free fit `r ≈ C t^α |log t|^p`.
    pub fitted_log_exponent: f64,
}

impl SweepReport {
    pub fn new(t_grid: Vec<f64>, numeric: Vec<C64>, predicted: Vec<C64>, p_err: f64) -> Result<Self> {
        if t_grid.len() != numeric.len() || t_grid.len() != predicted.len() {
            return Err(FalError::Domain("sweep columns differ in length".into()));
        }
        if t_grid.windows(2).any(|w| !(w[0] > w[1])) {
            return Err(FalError::Domain("t grid must be strictly decreasing".into()));
        }
        let residuals: Vec<f64> = numeric.iter().zip(&predicted).map(|(a, b)| (a - b).norm()).collect();
        let fitted_slope = fit_slope(&t_grid, &residuals, p_err)?.slope;
        let fitted_log_exponent = if t_grid.len() >= 3 { fit_log_power(&t_grid, &residuals)?.p } else { f64::NAN };
        Ok(SweepReport { t_grid, numeric, predicted, residuals, fitted_slope, fitted_log_exponent })
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let io = |e: csv::Error| FalError::Domain(format!("csv: {e}"));
        out.write_record(["t", "re_num", "im_num", "re_pred", "im_pred", "residual"]).map_err(io)?;
        for i in 0..self.t_grid.len() {
            let row = [
                self.t_grid[i],
                self.numeric[i].re,
                self.numeric[i].im,
                self.predicted[i].re,
                self.predicted[i].im,
                self.residuals[i],
            ];
            out.write_record(row.iter().map(|v| format!("{v:.16e}"))).map_err(io)?;
        }
        out.flush().map_err(|e| FalError::Domain(format!("csv: {e}")))
    }

    /// Reads the `t` and `residual` columns of a CSV written by
    /// [`SweepReport::write_csv`].
    pub fn read_residuals<R: std::io::Read>(r: R) -> Result<(Vec<f64>, Vec<f64>)> {
        let mut rd = csv::Reader::from_reader(r);
        let bad = |m: String| FalError::Domain(format!("malformed sweep csv: {m}"));
        let headers = rd.headers().map_err(|e| bad(e.to_string()))?.clone();
        let col = |name: &str| headers.iter().position(|h| h == name).ok_or_else(|| bad(format!("no {name} column")));
        let (it, ir) = (col("t")?, col("residual")?);
        let (mut ts, mut rs) = (Vec::new(), Vec::new());
        for rec in rd.records() {
            let rec = rec.map_err(|e| bad(e.to_string()))?;
            let get = |i: usize| -> Result<f64> {
                rec.get(i).and_then(|s| s.trim().parse().ok()).ok_or_else(|| bad(format!("row {:?}", rec)))
            };
            ts.push(get(it)?);
            rs.push(get(ir)?);
        }
        Ok((ts, rs))
    }
}

/// Evaluates the oracle and the main terms on `grid` (parallel, returned
/// in grid order).
pub fn run_sweep(phi: &PhiSpec, mu: &MeasureSpec, e: &Expansion, grid: &[f64], tol: f64) -> Result<SweepReport> {
    let pairs: Vec<Result<(C64, C64)>> = grid
        .par_iter()
        .map(|&t| {
            let num = fourier_integral_numeric(phi, mu, t, tol)?.value;
            Ok((num, eval_main_terms(e, t)?))
        })
        .collect();
    let pairs = pairs.into_iter().collect::<Result<Vec<_>>>()?;
    let (numeric, predicted) = pairs.into_iter().unzip();
    SweepReport::new(grid.to_vec(), numeric, predicted, e.err.p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cf_basics() {
        let s = SampleSet::new(vec![0.0; 5], Provenance::IidGk, 1).unwrap();
        assert_eq!(empirical_cf(&s, 0.7), C64::new(1.0, 0.0));
        let s = SampleSet::new(vec![PI], Provenance::IidGk, 1).unwrap();
        assert!((empirical_cf(&s, 1.0) + 1.0).norm() < 1e-15);
        assert!(SampleSet::new(vec![], Provenance::Dedekind, 0).is_err());
    }

    #[test]
    fn ks_single_point() {
        let s = SampleSet::new(vec![0.5], Provenance::IidGk, 0).unwrap();
        assert_eq!(ks_distance(&s, |x| x.clamp(0.0, 1.0)), 0.5);
    }

    #[test]
    fn centering_cancels_linear_term() {
        let e = Expansion::new(
            C64::new(0.7, 0.0),
            0.0,
            C64::new(0.0, 0.0),
            crate::LogPowerScale::new(1.0, 0.0).unwrap(),
            crate::LogPowerScale::new(2.0, 0.0).unwrap(),
        )
        .unwrap();
        for t in [0.1, 1.0, 3.0, -2.0] {
            let v = predicted_limit_cf(&e, 10.0, 10.0, 10.0 * 0.7 / 10.0, t).unwrap();
            assert!((v - 1.0).norm() < 1e-14, "{v}");
        }
        assert_eq!(predicted_limit_cf(&e, 0.0, 10.0, 0.0, 0.5).unwrap(), C64::new(1.0, 0.0));
    }

    #[test]
    fn cauchy_from_dedekind_chain() {
        let e = dedekind_expansion();
        let v = predicted_limit_cf(&e, 50.0, 50.0, 0.0, 2.0).unwrap();
        assert!((v - C64::new((-PI / LN_2 * 2.0).exp(), 0.0)).norm() < 1e-15);
    }

    #[test]
    fn small_experiment() {
        let s = dedekind_experiment(10).unwrap();
        assert_eq!(s.len(), 32);
        let mut sorted = s.values.clone();
        sorted.sort_by(f64::total_cmp);
        for (a, b) in sorted.iter().zip(sorted.iter().rev()) {
            assert!((a + b).abs() < 1e-12);
        }
    }
}
