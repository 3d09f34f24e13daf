//! Exact rational helpers: parsing XSD numeric lexical forms and formatting
//! rationals as decimal text.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

pub fn ratio(numer: u64, denom: u64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

/// Parses `[+-]digits[.digits][(e|E)[+-]digits]` exactly. Returns `None` for
/// anything else, including `INF` and `NaN`.
pub fn parse_decimal(text: &str) -> Option<Rational> {
    let text = text.trim();
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(idx) => (&text[..idx], Some(&text[idx + 1..])),
        None => (text, None),
    };
    let (negative, digits) = match mantissa.as_bytes().first()? {
        b'-' => (true, &mantissa[1..]),
        b'+' => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (int_part, frac_part) = match digits.find('.') {
        Some(idx) => (&digits[..idx], &digits[idx + 1..]),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().all(|b| b.is_ascii_digit()) || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut numer: BigInt = if all_digits.is_empty() {
        BigInt::zero()
    } else {
        all_digits.parse().ok()?
    };
    if negative {
        numer = -numer;
    }
    let mut scale = -(frac_part.len() as i64);
    if let Some(exp) = exponent {
        let exp = exp.strip_prefix('+').unwrap_or(exp);
        let (neg, body) = match exp.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, exp),
        };
        if body.is_empty() || !body.bytes().all(|b| b.is_ascii_digit()) || body.len() > 6 {
            return None;
        }
        let e: i64 = body.parse().ok()?;
        scale += if neg { -e } else { e };
    }
    let ten = BigInt::from(10);
    Some(if scale >= 0 {
        Rational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(numer, num_traits::pow(ten, (-scale) as usize))
    })
}

/// True when the rational has a finite decimal expansion.
pub fn is_terminating(value: &Rational) -> bool {
    let mut d = value.denom().clone();
    for p in [2, 5] {
        let p = BigInt::from(p);
        while (&d % &p).is_zero() {
            d /= &p;
        }
    }
    d.is_one()
}

/// Exact decimal text when the expansion terminates, otherwise rounded to
/// `max_digits` fractional digits (half to even). Integers carry no point.
pub fn format_decimal(value: &Rational, max_digits: usize) -> String {
    if is_terminating(value) {
        let mut digits = 0usize;
        let mut v = value.clone();
        let ten = Rational::from_integer(BigInt::from(10));
        while !v.is_integer() {
            v *= &ten;
            digits += 1;
        }
        format_scaled(&v.to_integer(), digits)
    } else {
        format_fixed(value, max_digits)
    }
}

/// Rounded to exactly `digits` fractional digits (half to even), trailing
/// zeros trimmed.
pub fn format_fixed(value: &Rational, digits: usize) -> String {
    let scale = num_traits::pow(BigInt::from(10), digits);
    let scaled = value * Rational::from_integer(scale);
    let rounded = round_half_even(&scaled);
    let mut s = format_scaled(&rounded, digits);
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    if s == "-0" {
        s = "0".into();
    }
    s
}

pub fn round_half_even(value: &Rational) -> BigInt {
    let floor = value.floor().to_integer();
    let frac = value - Rational::from_integer(floor.clone());
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    match frac.cmp(&half) {
        std::cmp::Ordering::Less => floor,
        std::cmp::Ordering::Greater => floor + 1,
        std::cmp::Ordering::Equal => {
            if floor.is_even() {
                floor
            } else {
                floor + 1
            }
        }
    }
}

fn format_scaled(n: &BigInt, digits: usize) -> String {
    let negative = n.is_negative();
    let abs = n.abs().to_string();
    let body = if digits == 0 {
        abs
    } else if abs.len() <= digits {
        format!("0.{}{}", "0".repeat(digits - abs.len()), abs)
    } else {
        let (i, f) = abs.split_at(abs.len() - digits);
        format!("{i}.{f}")
    };
    if negative {
        format!("-{body}")
    } else {
        body
    }
}

pub fn to_f64(value: &Rational) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

/// Exact rational value of a finite float.
pub fn from_f64(value: f64) -> Option<Rational> {
    Rational::from_float(value)
}

/// Shortest round-trip decimal text of `value`, read back exactly, so that
/// `0.9` in a JSON config becomes 9/10.
pub fn from_f64_decimal(value: f64) -> Option<Rational> {
    if !value.is_finite() {
        return None;
    }
    parse_decimal(&format!("{value:e}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_decimal_forms() {
        assert_eq!(parse_decimal("3.5"), Some(ratio(7, 2)));
        assert_eq!(parse_decimal("-0.25"), Some(-ratio(1, 4)));
        assert_eq!(parse_decimal("+12"), Some(int(12)));
        assert_eq!(parse_decimal(".5"), Some(ratio(1, 2)));
        assert_eq!(parse_decimal("5."), Some(int(5)));
        assert_eq!(parse_decimal("1.5e3"), Some(int(1500)));
        assert_eq!(parse_decimal("25E-2"), Some(ratio(1, 4)));
        for bad in ["", ".", "abc", "1.2.3", "INF", "NaN", "1e", "--1", "1e+"] {
            assert_eq!(parse_decimal(bad), None, "{bad}");
        }
    }

    #[test]
    fn formats_decimals() {
        assert_eq!(format_decimal(&int(12_600_000), 6), "12600000");
        assert_eq!(format_decimal(&ratio(27315, 100), 6), "273.15");
        assert_eq!(format_decimal(&ratio(3, 4), 12), "0.75");
        assert_eq!(format_decimal(&ratio(1, 3), 6), "0.333333");
        assert_eq!(format_decimal(&ratio(2, 3), 6), "0.666667");
        assert_eq!(format_decimal(&-ratio(1, 8), 6), "-0.125");
        assert_eq!(format_fixed(&ratio(1, 8), 2), "0.12");
        assert_eq!(format_fixed(&ratio(3, 8), 2), "0.38");
        assert_eq!(format_fixed(&ratio(1, 1_000_000_000), 6), "0");
    }

    #[test]
    fn config_floats_read_as_decimals() {
        assert_eq!(from_f64_decimal(0.9), Some(ratio(9, 10)));
        assert_eq!(from_f64_decimal(1e-4), Some(ratio(1, 10_000)));
        assert_eq!(from_f64_decimal(2.0), Some(int(2)));
    }
}
