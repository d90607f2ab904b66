//! Deterministic number formatting shared by every textual output.
//!
//! All floats are printed with nine significant digits, `%.9g` style, so
//! golden files compare byte-for-byte across platforms.

use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

pub const SIGNIFICANT_DIGITS: usize = 9;

/// Formats `x` like C's `%.9g`.
pub fn sig9(x: f64) -> String {
    format_g(x, SIGNIFICANT_DIGITS)
}

/// Formats `x` like C's `%.<digits>g`.
pub fn format_g(x: f64, digits: usize) -> String {
    assert!(digits >= 1);
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim_zeros(mantissa), sign, exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// A float that serializes into JSON as its `%.9g` text.
///
/// Non-finite values become `null`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sig9(pub f64);

impl Serialize for Sig9 {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return serializer.serialize_none();
        }
        let raw = RawValue::from_string(sig9(self.0)).map_err(serde::ser::Error::custom)?;
        raw.serialize(serializer)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_printf_g() {
        assert_eq!(sig9(0.9), "0.9");
        assert_eq!(sig9(0.7 + 0.2), "0.9");
        assert_eq!(sig9(1.0), "1");
        assert_eq!(sig9(34.0 / 107.0), "0.317757009");
        assert_eq!(sig9(107e9), "1.07e+11");
        assert_eq!(sig9(123456789.0), "123456789");
        assert_eq!(sig9(1234567890.0), "1.23456789e+09");
        assert_eq!(sig9(0.0001), "0.0001");
        assert_eq!(sig9(0.00001), "1e-05");
        assert_eq!(sig9(-2.5), "-2.5");
        assert_eq!(sig9(0.0), "0");
    }

    #[test]
    fn rounding_carries_into_exponent() {
        assert_eq!(sig9(9.999999999), "10");
        assert_eq!(sig9(999999999.7), "1e+09");
    }

    #[test]
    fn json_uses_the_same_text() {
        let v = vec![Sig9(0.1 + 0.2), Sig9(f64::NAN), Sig9(3e10)];
        assert_eq!(serde_json::to_string(&v).unwrap(), "[0.3,null,3e+10]");
    }
}
