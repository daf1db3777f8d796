//! Validated run configuration and the observables it names.

use fal_core::asymptotics::{dedekind_expansion, floor_power_expansion, power_log_expansion};
use fal_core::{Expansion, MeasureSpec, PhiSpec};

use crate::Failure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum FamilyTag {
    Floor,
    Powerlog,
    Dedekind,
    Estermann,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Observable with its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    Floor { lambda: f64 },
    PowerLog { a: f64, beta: f64, lambda: f64 },
    Dedekind,
    Estermann,
}

impl Family {
    pub fn from_args(tag: FamilyTag, a: Option<f64>, beta: Option<f64>, lambda: Option<f64>) -> Result<Self, Failure> {
        let need = |v: Option<f64>, name: &str| {
            v.ok_or_else(|| Failure::Usage(format!("--{name} is required for this family")))
        };
        match tag {
            FamilyTag::Floor => Ok(Family::Floor { lambda: need(lambda, "lambda")? }),
            FamilyTag::Powerlog => Ok(Family::PowerLog {
                a: need(a, "a")?,
                beta: need(beta, "beta")?,
                lambda: lambda.unwrap_or(0.0),
            }),
            FamilyTag::Dedekind => Ok(Family::Dedekind),
            FamilyTag::Estermann => Ok(Family::Estermann),
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            Family::Floor { .. } => "floor",
            Family::PowerLog { .. } => "powerlog",
            Family::Dedekind => "dedekind",
            Family::Estermann => "estermann",
        }
    }

    /// Scalar observable, Gauss–Kuzmin measure and closed-form expansion.
    /// The Estermann pair has no scalar form.
    pub fn scalar(&self) -> Result<(PhiSpec, MeasureSpec, Expansion), Failure> {
        let gk = MeasureSpec::gauss_kuzmin();
        let usage = |e: fal_core::FalError| Failure::Usage(e.to_string());
        match *self {
            Family::Floor { lambda } => {
                Ok((PhiSpec::floor_power(lambda).map_err(usage)?, gk, floor_power_expansion(lambda).map_err(usage)?))
            }
            Family::PowerLog { a, beta, lambda } => {
                if a == 0.0 {
                    return Err(Failure::Usage("-a must be non-zero".into()));
                }
                let phi = PhiSpec::power_log(a, beta, lambda).map_err(usage)?;
                let e = power_log_expansion(a, beta, lambda, &gk).map_err(usage)?;
                Ok((phi, gk, e))
            }
            Family::Dedekind => Ok((PhiSpec::dedekind(), gk, dedekind_expansion())),
            Family::Estermann => Err(Failure::Usage("the estermann family is vector valued".into())),
        }
    }
}

/// Everything a sweep needs, checked.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub family: Family,
    pub t_min: f64,
    pub t_max: f64,
    pub points_per_decade: u32,
    pub tol: f64,
    pub output: Option<std::path::PathBuf>,
    pub format: Format,
}

impl RunConfig {
    pub fn validate(self) -> Result<Self, Failure> {
        if !(self.t_min > 0.0 && self.t_min < self.t_max && self.t_max < 1.0) {
            return Err(Failure::Usage(format!(
                "need 0 < t-min < t-max < 1, got {} and {}",
                self.t_min, self.t_max
            )));
        }
        if self.points_per_decade == 0 {
            return Err(Failure::Usage("points per decade must be at least 1".into()));
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(Failure::Usage(format!("tolerance must lie in (0, 1), got {}", self.tol)));
        }
        Ok(self)
    }
}
