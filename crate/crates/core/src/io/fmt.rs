//! Locale-free real formatting with a fixed 17 significant digits.

use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

/// `%.17g`-style rendering without trimming trailing zeros.
///
/// Non-finite values render as `null` so the output stays valid JSON/CSV.
pub fn fmt_real(x: f64) -> String {
    if !x.is_finite() {
        return "null".to_owned();
    }
    if x == 0.0 {
        return "0.0000000000000000".to_owned();
    }
    let sci = format!("{:.16e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(char::is_ascii_digit).collect();
    let sign = if negative { "-" } else { "" };
    if (-5..17).contains(&exp) {
        if exp >= 0 {
            let split = exp as usize + 1;
            let (int, frac) = digits.split_at(split);
            if frac.is_empty() {
                format!("{sign}{int}")
            } else {
                format!("{sign}{int}.{frac}")
            }
        } else {
            let zeros = "0".repeat((-exp - 1) as usize);
            format!("{sign}0.{zeros}{digits}")
        }
    } else {
        let (lead, rest) = digits.split_at(1);
        let esign = if exp < 0 { '-' } else { '+' };
        format!("{sign}{lead}.{rest}e{esign}{:02}", exp.abs())
    }
}

pub fn ser_real<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    if !x.is_finite() {
        return s.serialize_none();
    }
    let raw = RawValue::from_string(fmt_real(*x)).map_err(serde::ser::Error::custom)?;
    raw.serialize(s)
}

pub fn ser_opt_real<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(v) => ser_real(v, s),
        None => s.serialize_none(),
    }
}

/// Serialize a slice of reals with [`fmt_real`].
pub fn ser_reals<S: Serializer>(xs: &[f64], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(xs.len()))?;
    for x in xs {
        seq.serialize_element(&Real(*x))?;
    }
    seq.end()
}

/// Newtype that serializes through [`ser_real`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Real(pub f64);

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ser_real(&self.0, s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(fmt_real(0.75), "0.75000000000000000");
        assert_eq!(fmt_real(-2.0), "-2.0000000000000000");
        assert_eq!(fmt_real(0.1), "0.10000000000000001");
        assert_eq!(fmt_real(1234.5), "1234.5000000000000");
        assert_eq!(fmt_real(1e-7), "9.9999999999999995e-08");
        assert_eq!(fmt_real(0.5e-9), "5.0000000000000003e-10");
        assert_eq!(fmt_real(6.02e23), "6.0200000000000000e+23");
        assert_eq!(fmt_real(0.0), "0.0000000000000000");
        assert_eq!(fmt_real(f64::NAN), "null");
    }

    #[test]
    fn round_trips_through_parse() {
        for x in [0.709_219_858_156_028_4, 1.0 / 3.0, 123_456.789, 2.5e-5, 9.9e16] {
            let s = fmt_real(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
            let v: serde_json::Value = serde_json::from_str(&s).unwrap();
            assert_eq!(v.as_f64().unwrap(), x);
        }
    }
}
