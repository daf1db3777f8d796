//! Grids and least-squares fits for residual orders.

use crate::asymptotics::LogPowerScale;
use crate::error::{FalError, Result};

/// `points_per_decade` log-spaced points from `t_max` down to `t_min`,
/// both included (the last step is shortened if needed).
pub fn geometric_grid(t_min: f64, t_max: f64, points_per_decade: u32) -> Result<Vec<f64>> {
    if !(t_min > 0.0 && t_min < t_max && t_max < 1.0) {
        return Err(FalError::Domain(format!("need 0 < t_min < t_max < 1, got {t_min}, {t_max}")));
    }
    if points_per_decade == 0 {
        return Err(FalError::Domain("points per decade must be at least 1".into()));
    }
    let step = 1.0 / points_per_decade as f64;
    let (hi, lo) = (t_max.log10(), t_min.log10());
    let mut out = Vec::new();
    let mut k = 0u32;
    loop {
        let e = hi - step * k as f64;
        if e <= lo + 1e-12 {
            break;
        }
        out.push(10f64.powf(e));
        k += 1;
    }
    out.push(t_min);
    Ok(out)
}

/// `t = 2^{−k}` for `k = k_min..=k_max`.
pub fn dyadic_grid(k_min: i32, k_max: i32) -> Vec<f64> {
    (k_min..=k_max).map(|k| 2f64.powi(-k)).collect()
}

/// Solves the normal equations of `y ≈ X·β` by Gaussian elimination with
/// partial pivoting.
pub fn least_squares(rows: &[Vec<f64>], y: &[f64]) -> Result<Vec<f64>> {
    let m = rows.first().map_or(0, |r| r.len());
    if rows.len() != y.len() || rows.len() < m || m == 0 {
        return Err(FalError::Domain(format!("{} observations for {m} unknowns", rows.len())));
    }
    let mut a = vec![vec![0.0; m + 1]; m];
    for (row, &yi) in rows.iter().zip(y) {
        for i in 0..m {
            for j in 0..m {
                a[i][j] += row[i] * row[j];
            }
            a[i][m] += row[i] * yi;
        }
    }
    for c in 0..m {
        let piv = (c..m)
            .max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))
            .expect("non-empty pivot range");
        if a[piv][c].abs() < 1e-300 {
            return Err(FalError::Domain("singular least-squares system".into()));
        }
        a.swap(c, piv);
        for r in 0..m {
            if r != c {
                let f = a[r][c] / a[c][c];
                for k in c..=m {
                    a[r][k] -= f * a[c][k];
                }
            }
        }
    }
    Ok((0..m).map(|i| a[i][m] / a[i][i]).collect())
}

/// Slope and intercept of `log(r/|log t|^p)` against `log t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
}

fn check_series(ts: &[f64], rs: &[f64]) -> Result<()> {
    if ts.len() != rs.len() || ts.len() < 2 {
        return Err(FalError::Domain("need at least two (t, r) pairs of equal length".into()));
    }
    if ts.iter().zip(rs).any(|(&t, &r)| !(t > 0.0 && t < 1.0) || !(r > 0.0) || !r.is_finite()) {
        return Err(FalError::Domain("fits need t in (0, 1) and positive finite residuals".into()));
    }
    Ok(())
}

pub fn fit_slope(ts: &[f64], rs: &[f64], p: f64) -> Result<SlopeFit> {
    check_series(ts, rs)?;
    let rows: Vec<Vec<f64>> = ts.iter().map(|t| vec![1.0, t.ln()]).collect();
    let y: Vec<f64> = ts.iter().zip(rs).map(|(t, r)| r.ln() - p * t.ln().abs().ln()).collect();
    let b = least_squares(&rows, &y)?;
    Ok(SlopeFit { slope: b[1], intercept: b[0] })
}

/// `r ≈ C·t^α|log t|^p` with all three free.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogPowerFit {
    pub constant: f64,
    pub alpha: f64,
    pub p: f64,
}

pub fn fit_log_power(ts: &[f64], rs: &[f64]) -> Result<LogPowerFit> {
    check_series(ts, rs)?;
    let rows: Vec<Vec<f64>> = ts.iter().map(|t| vec![1.0, t.ln(), t.ln().abs().ln()]).collect();
    let y: Vec<f64> = rs.iter().map(|r| r.ln()).collect();
    let b = least_squares(&rows, &y)?;
    Ok(LogPowerFit { constant: b[0].exp(), alpha: b[1], p: b[2] })
}

/// Smallest and largest `r/scale(t)` over the grid.
pub fn constant_range(ts: &[f64], rs: &[f64], scale: &LogPowerScale) -> Result<(f64, f64)> {
    check_series(ts, rs)?;
    let ratios = ts.iter().zip(rs).map(|(&t, &r)| r / scale.eval(t));
    Ok(ratios.fold((f64::INFINITY, 0.0), |(lo, hi), c| (lo.min(c), hi.max(c))))
}

/// `y ≈ a + b/|log t|`, returning `(a, b)`.
pub fn fit_inverse_log(ts: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    if ts.len() != ys.len() || ts.len() < 2 {
        return Err(FalError::Domain("need at least two (t, y) pairs of equal length".into()));
    }
    let rows: Vec<Vec<f64>> = ts.iter().map(|t| vec![1.0, 1.0 / t.ln().abs()]).collect();
    let b = least_squares(&rows, ys)?;
    Ok((b[0], b[1]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_shape() {
        let g = geometric_grid(1e-4, 1e-2, 4).unwrap();
        assert_eq!(g.len(), 9);
        assert!(g.windows(2).all(|w| w[0] > w[1]));
        assert_eq!(g[8], 1e-4);
        assert!((g[4] - 1e-3).abs() < 1e-15);
        assert!(geometric_grid(1e-2, 1e-4, 4).is_err());
        assert!(geometric_grid(1e-4, 1e-2, 0).is_err());
    }

    #[test]
    fn exact_power_laws() {
        let ts = dyadic_grid(8, 20);
        let rs: Vec<f64> = ts.iter().map(|t| 3.0 * t * t).collect();
        let f = fit_log_power(&ts, &rs).unwrap();
        assert!((f.alpha - 2.0).abs() < 1e-6 && f.p.abs() < 1e-6 && (f.constant - 3.0).abs() < 1e-6);
        let rs: Vec<f64> = ts.iter().map(|t| 0.5 * t * t * t.ln().abs().powi(3)).collect();
        let f = fit_log_power(&ts, &rs).unwrap();
        assert!((f.alpha - 2.0).abs() < 1e-6 && (f.p - 3.0).abs() < 1e-6, "{f:?}");
        let s = fit_slope(&ts, &rs, 3.0).unwrap();
        assert!((s.slope - 2.0).abs() < 1e-12);
    }

    #[test]
    fn inverse_log_fit() {
        let ts = dyadic_grid(5, 30);
        let ys: Vec<f64> = ts.iter().map(|t| -1.5 + 2.0 / t.ln().abs()).collect();
        let (a, b) = fit_inverse_log(&ts, &ys).unwrap();
        assert!((a + 1.5).abs() < 1e-10 && (b - 2.0).abs() < 1e-9);
    }
}
