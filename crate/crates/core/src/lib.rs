//! Two-term asymptotic expansions of Fourier integrals
//! `I[φ](t) = ∫ (e^{itφ(x)} − 1) dμ(x)` as `t → 0`, together with a
//! quadrature oracle, exact continued-fraction arithmetic and a small
//! limit-law laboratory.
//!
//! ```
//! use fal_core::asymptotics::{eval_main_terms, floor_power_expansion};
//!
//! let e = floor_power_expansion(1.0).unwrap();
//! let v = eval_main_terms(&e, 1e-4).unwrap();
//! assert!((v.re + 2.26618e-4).abs() < 1e-8);
//! ```

pub mod asymptotics;
pub mod cfdynamics;
pub mod error;
pub mod fit;
pub mod limitlab;
pub mod quad;
pub mod specfun;

pub use asymptotics::{Expansion, LogPowerScale, MellinPolarData};
pub use cfdynamics::RationalCF;
pub use error::{FalError, Result};
pub use limitlab::{Provenance, SampleSet, SweepReport};
pub use quad::{MeasureSpec, PhiSpec, QuadResult};

/// Complex scalar used throughout.
pub type ComplexValue = num_complex::Complex64;
pub use num_complex::Complex64 as C64;
