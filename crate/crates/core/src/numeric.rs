//! Arbitrary-precision helpers shared by the geometry, solver and certifier
//! modules.
//!
//! Precision is always carried explicitly as a [`Precision`] (decimal digits);
//! nothing here reads a global default.

use std::f64::consts::LOG2_10;

use rug::float::{Constant, Round};
use rug::{Float, Integer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Working precision in decimal digits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Precision(u32);

impl Precision {
    pub const DEFAULT: Precision = Precision(64);

    pub fn new(digits: u32) -> Self {
        Precision(digits.max(1))
    }

    pub fn digits(self) -> u32 {
        self.0
    }

    /// Mantissa bits; 16 guard bits so that decimals with `digits` significant
    /// figures survive a parse/format round trip.
    pub fn bits(self) -> u32 {
        (f64::from(self.0) * LOG2_10).ceil() as u32 + 16
    }

    /// Largest precision whose mantissa fits in `bits`.
    pub fn from_bits(bits: u32) -> Self {
        let mut d = ((f64::from(bits.saturating_sub(16)) / LOG2_10).floor() as u32).max(1);
        while d > 1 && Precision(d).bits() > bits {
            d -= 1;
        }
        Precision(d)
    }

    pub fn doubled(self) -> Self {
        Precision(self.0 * 2)
    }

    pub fn float(self, value: f64) -> Float {
        Float::with_val(self.bits(), value)
    }

    pub fn zero(self) -> Float {
        Float::new(self.bits())
    }

    /// `10^(-digits/2)`: the tolerance used for degeneracy and matching tests.
    pub fn half_tolerance(self) -> Float {
        pow10(-((self.0 / 2) as i32), self)
    }

    pub fn pi(self) -> Float {
        Float::with_val(self.bits(), Constant::Pi)
    }

    pub fn two_pi(self) -> Float {
        self.pi() * 2u32
    }
}

impl Default for Precision {
    fn default() -> Self {
        Precision::DEFAULT
    }
}

impl std::fmt::Display for Precision {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub fn pow10(exp: i32, precision: Precision) -> Float {
    let magnitude = Float::with_val(precision.bits(), Float::u_pow_u(10, exp.unsigned_abs()));
    if exp >= 0 {
        magnitude
    } else {
        Float::with_val(precision.bits(), 1u32) / magnitude
    }
}

/// Parse a plain or scientific decimal string at the given precision.
pub fn parse_decimal(text: &str, precision: Precision) -> Option<Float> {
    let text = text.trim();
    if text.is_empty() {
        return None;
    }
    let parsed = Float::parse(text).ok()?;
    let value = Float::with_val(precision.bits(), parsed);
    value.is_finite().then_some(value)
}

/// Canonical plain-decimal rendering with at most `digits` significant
/// figures, no exponent, and no trailing zeros.
pub fn format_decimal(value: &Float, digits: u32) -> String {
    if value.is_zero() {
        return "0".to_string();
    }
    let (negative, mantissa, exp) = value.to_sign_string_exp(10, Some(digits as usize));
    let exp = exp.unwrap_or(0);
    let mantissa = mantissa.trim_end_matches('0');
    if mantissa.is_empty() {
        return "0".to_string();
    }
    let body = if exp <= 0 {
        format!("0.{}{}", "0".repeat(exp.unsigned_abs() as usize), mantissa)
    } else {
        let exp = exp as usize;
        if exp >= mantissa.len() {
            format!("{}{}", mantissa, "0".repeat(exp - mantissa.len()))
        } else {
            format!("{}.{}", &mantissa[..exp], &mantissa[exp..])
        }
    };
    if negative {
        format!("-{body}")
    } else {
        body
    }
}

/// `value * 10^scale_exp` truncated toward zero.
///
/// Products that land within working-precision noise of an integer are
/// snapped to it first, so `0.755` scales to exactly `755 * 10^29` even though
/// its binary representation is slightly below.
pub fn scale_truncate(value: &Float, scale_exp: u32) -> Integer {
    let prec = value.prec();
    let scaled = Float::with_val(
        prec,
        value * Float::with_val(prec, Float::u_pow_u(10, scale_exp)),
    );
    let nearest = Float::with_val(prec, scaled.round_ref());
    let gap = Float::with_val(prec, &scaled - &nearest).abs();
    // 64 bits below the leading bit of the scaled value is far beyond the
    // representation error of a decimal input and far above rounding noise.
    let noise = match scaled.get_exp() {
        Some(e) => Float::with_val(prec, Float::i_exp(1, e - (prec as i32) + 64)),
        None => Float::new(prec),
    };
    let chosen = if gap <= noise { nearest } else { scaled };
    chosen
        .to_integer_round(Round::Zero)
        .map(|(i, _)| i)
        .unwrap_or_default()
}

pub fn max_abs(values: impl IntoIterator<Item = Float>) -> Option<Float> {
    values
        .into_iter()
        .map(Float::abs)
        .reduce(|a, b| if b > a { b } else { a })
}

/// Three-vectors of arbitrary-precision floats.
pub mod vec3 {
    use rug::Float;

    pub type Point3 = [Float; 3];

    pub fn sub(a: &Point3, b: &Point3) -> Point3 {
        let p = a[0].prec();
        [
            Float::with_val(p, &a[0] - &b[0]),
            Float::with_val(p, &a[1] - &b[1]),
            Float::with_val(p, &a[2] - &b[2]),
        ]
    }

    pub fn dot(a: &Point3, b: &Point3) -> Float {
        let p = a[0].prec();
        let mut acc = Float::with_val(p, &a[0] * &b[0]);
        acc += Float::with_val(p, &a[1] * &b[1]);
        acc += Float::with_val(p, &a[2] * &b[2]);
        acc
    }

    pub fn cross(a: &Point3, b: &Point3) -> Point3 {
        let p = a[0].prec();
        [
            Float::with_val(p, &a[1] * &b[2]) - Float::with_val(p, &a[2] * &b[1]),
            Float::with_val(p, &a[2] * &b[0]) - Float::with_val(p, &a[0] * &b[2]),
            Float::with_val(p, &a[0] * &b[1]) - Float::with_val(p, &a[1] * &b[0]),
        ]
    }

    pub fn norm_sq(a: &Point3) -> Float {
        dot(a, a)
    }

    pub fn scale(a: &Point3, s: &Float) -> Point3 {
        let p = a[0].prec();
        [
            Float::with_val(p, &a[0] * s),
            Float::with_val(p, &a[1] * s),
            Float::with_val(p, &a[2] * s),
        ]
    }

    pub fn to_f64(a: &Point3) -> [f64; 3] {
        [a[0].to_f64(), a[1].to_f64(), a[2].to_f64()]
    }
}

pub(crate) fn require_precision(have: Precision, need: u32) -> Result<()> {
    if have.digits() < need {
        return Err(Error::InsufficientPrecision {
            have: have.digits(),
            need,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_round_trip_is_verbatim_for_canonical_strings() {
        let p = Precision::new(64);
        for s in [
            "0.755",
            "-0.09",
            "0.98050571585977935561653820085693",
            "12",
            "0",
            "1.5",
        ] {
            let x = parse_decimal(s, p).unwrap();
            assert_eq!(format_decimal(&x, p.digits()), s);
        }
    }

    #[test]
    fn format_small_and_large_magnitudes() {
        let p = Precision::new(40);
        assert_eq!(
            format_decimal(&parse_decimal("1e-5", p).unwrap(), 40),
            "0.00001"
        );
        assert_eq!(
            format_decimal(&parse_decimal("2.5e3", p).unwrap(), 40),
            "2500"
        );
    }

    #[test]
    fn scaling_snaps_decimal_inputs() {
        let p = Precision::new(64);
        let x = parse_decimal("0.755", p).unwrap();
        let expected: Integer = Integer::from(755) * Integer::from(Integer::u_pow_u(10, 29));
        assert_eq!(scale_truncate(&x, 32), expected);
        let neg = parse_decimal("-0.455", p).unwrap();
        assert_eq!(
            scale_truncate(&neg, 32),
            Integer::from(-455) * Integer::from(Integer::u_pow_u(10, 29))
        );
        assert_eq!(scale_truncate(&p.zero(), 32), 0);
    }

    #[test]
    fn scaling_truncates_toward_zero() {
        let p = Precision::new(64);
        let x = parse_decimal("0.123456789012345678901234567890123456", p).unwrap();
        assert_eq!(
            scale_truncate(&x, 32).to_string(),
            "12345678901234567890123456789012"
        );
        let y = parse_decimal("-0.123456789012345678901234567890129", p).unwrap();
        assert_eq!(
            scale_truncate(&y, 32).to_string(),
            "-12345678901234567890123456789012"
        );
    }

    #[test]
    fn half_tolerance_magnitude() {
        let t = Precision::new(64).half_tolerance();
        assert!((t.to_f64() - 1e-32).abs() < 1e-45);
    }
}
