//! Regulators of elliptic curves over real quadratic fields attached to
//! pairs of tempered Laurent polynomials.

pub mod curve;
pub mod field;
pub mod paths;
pub mod regulator;

pub use curve::{curve_from_k, isomorphism_between, twist, velu_isogeny, Chart, Curve, Isogeny, Isomorphism, NumCurve, Point};
pub use field::{KPoly, QuadFieldElem, RatFn};
pub use paths::{deninger_path, fundamental_periods, path_integral_omega, PathSpec, PeriodLattice};
pub use regulator::{
    case_path, check_isogeny_identities, newform_coefficients, pushforward_multipliers, regulator_case, regulator_pairing, IsogenyReport,
    RegulatorOptions, RegulatorReport, Side,
};
