//! Computational core: CM points for the lambda function, Mahler measures of
//! x + 1/x + y + 1/y + k, theta-series L-values and regulator verifications
//! for isogenous elliptic curves over real quadratic fields.

pub mod beilinson;
pub mod cmsearch;
pub mod error;
pub mod kexpr;
pub mod lvalues;
pub mod mahler;
pub mod modular;
pub mod numerics;
pub mod paperdata;
pub mod qseries;
pub mod quadforms;

pub use error::{Error, Result};
pub use numerics::{BigComplex, BigReal, IntPolynomial, DEFAULT_PREC};
pub use qseries::{EtaQuotient, PowerSeriesZ, ThetaSpec};
pub use quadforms::{CmPoint, QuadForm};
