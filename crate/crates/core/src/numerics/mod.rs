//! Arbitrary precision real and complex arithmetic on top of MPFR.
//!
//! `BigReal` is `rug::Float`. Every value carries its own precision; binary
//! operations on `BigComplex` produce the larger of the operand precisions.

mod complex;
mod lll;
mod quad;

pub use complex::BigComplex;
pub use lll::{integer_relation, lll_reduce, IntPolynomial};
pub use quad::{adaptive_integrate, Quadrature};

use crate::error::{Error, Result};
use rug::float::Constant;
use rug::Float;

pub type BigReal = Float;

pub const DEFAULT_PREC: u32 = 256;

pub fn real(prec: u32, v: f64) -> Float {
    Float::with_val(prec, v)
}

pub fn pi(prec: u32) -> Float {
    Float::with_val(prec, Constant::Pi)
}

/// 2^e at the given precision.
pub fn pow2(prec: u32, e: i32) -> Float {
    Float::with_val(prec, 1) << e
}

pub fn sqrt_int(prec: u32, n: i64) -> Float {
    Float::with_val(prec, n).sqrt()
}

/// Parses a decimal real; the value is correctly rounded at `prec` bits.
pub fn parse_real(s: &str, prec: u32) -> Result<Float> {
    let p = Float::parse(s.trim()).map_err(|e| Error::Parse(format!("{s}: {e}")))?;
    Ok(Float::with_val(prec, p))
}

/// Decimal digits that faithfully represent `prec` bits.
pub fn digits_for_prec(prec: u32) -> usize {
    (prec as f64 * std::f64::consts::LOG10_2).ceil() as usize + 1
}

/// Decimal rendering with `digits` significant digits.
pub fn format_real(x: &Float, digits: usize) -> String {
    if x.is_zero() {
        return "0".into();
    }
    x.to_string_radix(10, Some(digits.max(1)))
}

/// Renders `x` with `sig` significant digits in plain positional notation.
pub fn format_sig(x: f64, sig: usize) -> String {
    if x == 0.0 {
        return format!("{:.*}", sig.saturating_sub(1), 0.0);
    }
    let mag = x.abs().log10().floor() as i32;
    let decimals = (sig as i32 - 1 - mag).max(0) as usize;
    format!("{:.*}", decimals, x)
}

/// Like `format_sig` but truncating toward zero instead of rounding. The
/// value is first rounded to 15 digits so that -0.99999999999999 still
/// prints as -1.0000.
pub fn format_sig_trunc(x: f64, sig: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format_sig(x, sig);
    }
    let e = format!("{:.14e}", x.abs());
    let (mant, exp) = e.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    let digits: String = mant.chars().filter(|c| c.is_ascii_digit()).take(sig.max(1)).collect();
    let sign = if x < 0.0 { "-" } else { "" };
    let body = if exp >= 0 {
        let int_len = exp as usize + 1;
        if digits.len() <= int_len {
            format!("{digits}{}", "0".repeat(int_len - digits.len()))
        } else {
            format!("{}.{}", &digits[..int_len], &digits[int_len..])
        }
    } else {
        format!("0.{}{digits}", "0".repeat((-exp - 1) as usize))
    };
    format!("{sign}{body}")
}

/// Serde helper writing a Float as a decimal string.
pub fn ser_float<S: serde::Serializer>(x: &Float, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_real(x, digits_for_prec(x.prec()).min(60)))
}

/// Absolute tolerance 10^-digits as a Float.
pub fn ten_pow(prec: u32, e: i32) -> Float {
    Float::with_val(prec, 10).pow(e)
}

use rug::ops::Pow;
