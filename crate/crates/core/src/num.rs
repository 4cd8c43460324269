//! Exact number handling: decimal parsing, common-denominator scaling and
//! formatting back to decimal strings.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Parses `12`, `-0.35`, `1.5e-3` or `7/20` into an exact rational.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let s = text.trim();
    if s.is_empty() {
        return None;
    }
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(BigRational::new(p, q));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let all: BigInt = format!("{int_part}{frac_part}0").parse().ok()?;
    let mut value = BigRational::new(all, BigInt::from(10));
    let shift = exponent - frac_part.len() as i32;
    let ten = BigRational::from_integer(BigInt::from(10));
    if shift >= 0 {
        value *= num_traits::pow(ten, shift as usize);
    } else {
        value /= num_traits::pow(ten, (-shift) as usize);
    }
    Some(if neg { -value } else { value })
}

/// Reads a JSON integer, JSON number or numeric string exactly.
pub fn rational_from_json(value: &serde_json::Value, context: &str) -> Result<BigRational> {
    let text = match value {
        serde_json::Value::Number(n) => n.to_string(),
        serde_json::Value::String(s) => s.clone(),
        serde_json::Value::Null => return Err(Error::parse(context, "missing value")),
        other => return Err(Error::parse(context, format!("expected a number, found {other}"))),
    };
    parse_rational(&text).ok_or_else(|| Error::parse(context, format!("not a number: {text:?}")))
}

/// Integer numerators over a single common denominator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scaled {
    pub values: Vec<i128>,
    pub scale: i128,
}

/// Scales every value by the least common multiple of their denominators.
pub fn common_scale(values: &[BigRational], context: &str) -> Result<Scaled> {
    let mut lcm = BigInt::one();
    for v in values {
        lcm = lcm.lcm(v.denom());
    }
    let scale = lcm
        .to_i128()
        .ok_or_else(|| Error::SizeLimit(format!("{context}: common denominator too large")))?;
    let mut out = Vec::with_capacity(values.len());
    for v in values {
        let n = (v * BigRational::from_integer(lcm.clone())).to_integer();
        let n = n
            .to_i128()
            .filter(|n| n.abs() < (1i128 << 100))
            .ok_or_else(|| Error::SizeLimit(format!("{context}: value too large")))?;
        out.push(n);
    }
    Ok(Scaled { values: out, scale })
}

pub fn ratio(num: i128, scale: i128) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(scale))
}

/// Exact decimal rendering when the value has one, `p/q` otherwise.
pub fn format_rational(value: &BigRational) -> String {
    if value.is_integer() {
        return value.numer().to_string();
    }
    let mut den = value.denom().clone();
    let (mut twos, mut fives) = (0u32, 0u32);
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    while (&den % &two).is_zero() {
        den /= &two;
        twos += 1;
    }
    while (&den % &five).is_zero() {
        den /= &five;
        fives += 1;
    }
    if !den.is_one() {
        return format!("{}/{}", value.numer(), value.denom());
    }
    let places = twos.max(fives) as usize;
    let shifted = (value * BigRational::from_integer(num_traits::pow(BigInt::from(10), places))).to_integer();
    let neg = shifted.is_negative();
    let digits = shifted.abs().to_string();
    let padded = format!("{digits:0>width$}", width = places + 1);
    let (int_part, frac_part) = padded.split_at(padded.len() - places);
    format!("{}{}.{}", if neg { "-" } else { "" }, int_part, frac_part)
}

pub fn format_scaled(num: i128, scale: i128) -> String {
    format_rational(&ratio(num, scale))
}

/// JSON value for an exact number: integers stay numbers, the rest become strings.
pub fn scaled_to_json(num: i128, scale: i128) -> serde_json::Value {
    let r = ratio(num, scale);
    if r.is_integer() {
        serde_json::Value::Number(serde_json::Number::from_string_unchecked(r.numer().to_string()))
    } else {
        serde_json::Value::String(format_rational(&r))
    }
}

/// Exact rational equal to a finite float.
pub fn rational_from_f64(x: f64) -> BigRational {
    BigRational::from_float(x).unwrap_or_else(BigRational::zero)
}

/// Largest multiple of `2^-bits` not above `x` (for `x >= 0`).
pub fn floor_dyadic(x: f64, bits: i32) -> BigRational {
    if x <= 0.0 {
        return BigRational::zero();
    }
    let scaled = (x * 2f64.powi(bits)).floor();
    BigRational::new(
        BigInt::from(scaled as i128),
        num_traits::pow(BigInt::from(2), bits as usize),
    )
}

pub fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}
