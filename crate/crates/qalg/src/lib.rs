//! Numerical toolkit for a scaling-limit sl2 current algebra with parameters ℏ, η and central charge c.
//!
//! Modules follow the data flow: special functions feed the R-matrix and
//! the free-field contractions, the R-matrix feeds the evaluation modules,
//! and `cli_report` runs everything as residual suites.

pub mod error;
pub mod quad;
pub mod hyp;
pub mod mat;
pub mod specfun;
pub mod rmatrix;
pub mod evalrep;
pub mod strip_riemann;
pub mod freefield;
pub mod cli_report;

pub use error::{QalgError, Result};
pub use num_complex::Complex64 as C64;

/// Imaginary unit.
pub const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Euler-Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_606_512_090_082_402_43;

/// A named scalar residual produced by a check.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct NamedResidual {
    pub name: String,
    pub value: f64,
}

impl NamedResidual {
    pub fn new(name: impl Into<String>, value: f64) -> Self {
        NamedResidual { name: name.into(), value }
    }
}
