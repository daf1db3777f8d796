//! Exact continued-fraction arithmetic on rationals in `(0, 1]`.

use std::f64::consts::LN_2;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use rayon::prelude::*;

use crate::error::{FalError, Result};
use crate::quad::{PhiFamily, PhiSpec};

/// A reduced fraction `p/q ∈ (0, 1]` with its expansion `[0; a₁, …, a_r]`.
///
/// `a_r ≥ 2` except for `1 = [0; 1]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RationalCF {
    pub p: u64,
    pub q: u64,
    pub coeffs: Vec<u64>,
}

impl RationalCF {
    /// Canonical expansion of `p/q` after reduction.
    pub fn new(p: i64, q: i64) -> Result<Self> {
        cf_expand(p, q)
    }

    /// Builds from coefficients, checking positivity and the canonical last
    /// digit.
    pub fn from_coeffs(coeffs: &[u64]) -> Result<Self> {
        if coeffs.is_empty() || coeffs.contains(&0) {
            return Err(FalError::Domain(format!("coefficients must be positive, got {coeffs:?}")));
        }
        if coeffs.len() > 1 && coeffs[coeffs.len() - 1] == 1 {
            return Err(FalError::Domain("non-canonical expansion ends in 1".into()));
        }
        let (p, q) = reconstruct(coeffs).ok_or_else(|| FalError::Domain("expansion overflows u64".into()))?;
        Ok(RationalCF { p, q, coeffs: coeffs.to_vec() })
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn value(&self) -> f64 {
        self.p as f64 / self.q as f64
    }

    pub fn as_ratio(&self) -> Ratio<u64> {
        Ratio::new_raw(self.p, self.q)
    }

    /// Exact orbit `x, T x, …, T^{r−1} x` as `(numerator, denominator)`.
    pub fn orbit(&self) -> Vec<(u64, u64)> {
        let mut out = Vec::with_capacity(self.coeffs.len());
        let (mut p, mut q) = (self.p, self.q);
        while p != 0 {
            out.push((p, q));
            let r = q % p;
            q = p;
            p = r;
        }
        out
    }
}

/// `[0; a₁, …, a_r]` as a reduced pair, or `None` on overflow.
pub fn reconstruct(coeffs: &[u64]) -> Option<(u64, u64)> {
    let (mut p, mut q) = (0u64, 1u64);
    for &a in coeffs.iter().rev() {
        // 1/(a + p/q) = q/(aq + p)
        let d = a.checked_mul(q)?.checked_add(p)?;
        p = q;
        q = d;
    }
    Some((p, q))
}

impl fmt::Display for RationalCF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits: Vec<String> = self.coeffs.iter().map(|a| a.to_string()).collect();
        write!(f, "{}/{}:[{}]", self.p, self.q, digits.join(","))
    }
}

impl FromStr for RationalCF {
    type Err = FalError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || FalError::Domain(format!("expected \"p/q:[a1,...]\", got {s:?}"));
        let (frac, list) = s.split_once(':').ok_or_else(bad)?;
        let (p, q) = frac.split_once('/').ok_or_else(bad)?;
        let p: i64 = p.trim().parse().map_err(|_| bad())?;
        let q: i64 = q.trim().parse().map_err(|_| bad())?;
        let inner = list.trim().strip_prefix('[').and_then(|l| l.strip_suffix(']')).ok_or_else(bad)?;
        let coeffs = inner
            .split(',')
            .map(|a| a.trim().parse::<u64>().map_err(|_| bad()))
            .collect::<Result<Vec<_>>>()?;
        let x = cf_expand(p, q)?;
        if x.coeffs != coeffs || (x.p as i64, x.q as i64) != (p, q) {
            return Err(FalError::Domain(format!("{s:?} is not a canonical reduced expansion")));
        }
        Ok(x)
    }
}

/// `T(x) = {1/x}`.
pub fn gauss_map(x: Ratio<u64>) -> Result<Ratio<u64>> {
    if *x.numer() == 0 || x > Ratio::from_integer(1) {
        return Err(FalError::Domain(format!("gauss map needs x in (0, 1], got {x}")));
    }
    Ok(Ratio::new(x.denom() % x.numer(), *x.numer()))
}

/// Canonical expansion of `p/q` by the Euclidean algorithm.
pub fn cf_expand(p: i64, q: i64) -> Result<RationalCF> {
    if p <= 0 || q <= 0 || p > q {
        return Err(FalError::Domain(format!("need 0 < p <= q, got {p}/{q}")));
    }
    let g = p.gcd(&q);
    let (p, q) = ((p / g) as u64, (q / g) as u64);
    let mut coeffs = Vec::new();
    let (mut a, mut b) = (p, q);
    while a != 0 {
        coeffs.push(b / a);
        let r = b % a;
        b = a;
        a = r;
    }
    Ok(RationalCF { p, q, coeffs })
}

/// `Σ a_j^λ`.
pub fn sigma_lambda(x: &RationalCF, lambda: f64) -> f64 {
    if lambda.fract() == 0.0 && (0.0..=4.0).contains(&lambda) {
        let s: u128 = x.coeffs.iter().map(|&a| (a as u128).pow(lambda as u32)).sum();
        return s as f64;
    }
    x.coeffs.iter().map(|&a| (a as f64).powf(lambda)).sum()
}

fn floor_inv(p: u64, q: u64) -> u64 {
    if p == 0 {
        0
    } else {
        q / p
    }
}

/// `Σ_{j<r} φ(T^j x)` along the exact orbit. Floor-type observables are
/// evaluated in integer arithmetic.
pub fn birkhoff_sum(phi: &PhiSpec, x: &RationalCF) -> Result<f64> {
    let mut s = 0.0;
    for (p, q) in x.orbit() {
        let v = match phi.family {
            PhiFamily::FloorPower { lambda } if phi.remainder.is_none() => {
                (floor_inv(p, q) as f64).powf(lambda)
            }
            PhiFamily::Dedekind if phi.remainder.is_none() => {
                let r = q % p;
                floor_inv(p, q) as f64 - floor_inv(r, p) as f64
            }
            _ => phi.eval(p as f64 / q as f64),
        };
        s += v;
    }
    Ok(s)
}

/// Dedekind sum `s(p, q) = Σ_{k<q} ((k/q))((kp/q))` by reciprocity.
pub fn dedekind_sum(p: i64, q: i64) -> Result<Ratio<i128>> {
    if q < 1 || p.gcd(&q) != 1 {
        return Err(FalError::Domain(format!("dedekind sum needs q >= 1 and gcd(p, q) = 1, got ({p}, {q})")));
    }
    let (mut p, mut q) = (p.rem_euclid(q) as i128, q as i128);
    let mut sign = 1i128;
    let mut acc = Ratio::from_integer(0i128);
    // s(p, q) = −s(q mod p, p) − 1/4 + (p/q + q/p + 1/(pq))/12
    while p != 0 {
        let term = Ratio::new(p * p + q * q + 1, 12 * p * q) - Ratio::new(1, 4);
        acc += Ratio::from_integer(sign) * term;
        sign = -sign;
        let r = q % p;
        q = p;
        p = r;
    }
    Ok(acc)
}

/// `12q·s(p, q)` as an integer, from the alternating digit sum:
/// `12 s(p, q) = Σ (−1)^{j+1} a_j + (p + p̄)/q − (1 if r is even else 3)`
/// with `p p̄ ≡ 1 (mod q)`.
pub fn dedekind_sum_12q(p: i64, q: i64) -> Result<i128> {
    if q < 1 || p.gcd(&q) != 1 {
        return Err(FalError::Domain(format!("dedekind sum needs q >= 1 and gcd(p, q) = 1, got ({p}, {q})")));
    }
    let p = p.rem_euclid(q);
    if q == 1 {
        return Ok(0);
    }
    let (q, p) = (q as i128, p as i128);
    // Euclid on (p, q), tracking the alternating digit sum and the inverse of p
    let (mut a, mut b) = (p, q);
    let (mut x0, mut x1) = (1i128, 0i128);
    let mut alt = 0i128;
    let mut sign = 1i128;
    let mut r = 0u32;
    while a != 0 {
        let d = b / a;
        alt += sign * d;
        sign = -sign;
        r += 1;
        let rem = b - d * a;
        b = a;
        a = rem;
        let x2 = x1 - d * x0;
        x1 = x0;
        x0 = x2;
    }
    let inv = x1.rem_euclid(q);
    let tail = if r % 2 == 0 { 1 } else { 3 };
    Ok(q * alt + p + inv - tail * q)
}

/// Direct `O(q)` evaluation of the Dedekind sum from its definition.
pub fn dedekind_sum_direct(p: i64, q: i64) -> Result<Ratio<i128>> {
    if q < 1 || p.gcd(&q) != 1 {
        return Err(FalError::Domain(format!("dedekind sum needs q >= 1 and gcd(p, q) = 1, got ({p}, {q})")));
    }
    let q = q as i128;
    let saw = |n: i128| -> Ratio<i128> {
        let r = n.rem_euclid(q);
        if r == 0 {
            Ratio::from_integer(0)
        } else {
            Ratio::new(2 * r - q, 2 * q)
        }
    };
    let mut acc = Ratio::from_integer(0i128);
    for k in 1..q {
        acc += saw(k) * saw(k * p as i128);
    }
    Ok(acc)
}

/// Reduced `p/q ∈ (0, 1]` with `q ≤ Q` in increasing order, from the
/// neighbour recurrence of consecutive Farey fractions.
pub fn farey_enumerate(big_q: u64) -> impl Iterator<Item = RationalCF> {
    let big_q = big_q.max(1);
    let mut state = Some((0u64, 1u64, 1u64, big_q));
    std::iter::from_fn(move || {
        let (a, b, c, d) = state?;
        let k = (big_q + b) / d;
        state = if c == 1 && d == 1 { None } else { Some((c, d, k * c - a, k * d - b)) };
        Some(cf_expand(c as i64, d as i64).expect("farey terms are in (0, 1]"))
    })
}

/// `Σ_{q ≤ Q} φ_Euler(q)`.
pub fn farey_count(big_q: u64) -> u64 {
    totients(big_q).iter().skip(1).sum()
}

fn totients(n: u64) -> Vec<u64> {
    let mut phi: Vec<u64> = (0..=n).collect();
    for i in 2..=n as usize {
        if phi[i] == i as u64 {
            for j in (i..=n as usize).step_by(i) {
                phi[j] -= phi[j] / i as u64;
            }
        }
    }
    phi
}

/// Reduced `p/q` with `q ≤ Q` and `q ≡ class (mod modulus)`, ordered by
/// `(q, p)`.
pub fn farey_residue_class(big_q: u64, modulus: u64, class: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    let mut q = if class == 0 { modulus } else { class };
    while q <= big_q {
        for p in 1..=q {
            if p.gcd(&q) == 1 {
                out.push((p, q));
            }
        }
        q += modulus;
    }
    out
}

/// `f(p, q)` over all reduced `p/q ∈ (0, 1]` with `q ≤ Q`, evaluated in
/// parallel by denominator residue class and returned in `(q, p)` order.
pub fn farey_map<T: Send, F: Fn(u64, u64) -> T + Sync>(big_q: u64, f: F) -> Vec<T> {
    let modulus = rayon::current_num_threads().max(1) as u64 * 4;
    let mut blocks: Vec<Vec<((u64, u64), T)>> = (0..modulus)
        .into_par_iter()
        .map(|c| farey_residue_class(big_q, modulus, c).into_iter().map(|(p, q)| ((q, p), f(p, q))).collect())
        .collect();
    let mut all: Vec<((u64, u64), T)> = blocks.iter_mut().flat_map(|b| b.drain(..)).collect();
    all.sort_by_key(|(k, _)| *k);
    all.into_iter().map(|(_, v)| v).collect()
}

/// Inverse distribution function of the Gauss–Kuzmin measure, `2^u − 1`.
pub fn gk_sample(u: f64) -> f64 {
    (u * LN_2).exp_m1()
}

/// `μ((1/(n+1), 1/n]) = log(1 + 1/(n(n+2)))/log 2`.
pub fn gk_mass(n: u64) -> f64 {
    let nf = n as f64;
    (1.0 / (nf * (nf + 2.0))).ln_1p() / LN_2
}
