//! Lexical-space checks for the XSD datatypes the shapes use.

use chrono::{DateTime, NaiveDate, NaiveDateTime, Utc};

use crate::numeric::{parse_decimal, Rational};
use crate::rdf::Literal;
use crate::vocab::ns::xsd;

fn is_decimal_lexical(s: &str) -> bool {
    let body = s.strip_prefix(['+', '-']).unwrap_or(s);
    let (i, f) = body.split_once('.').unwrap_or((body, ""));
    (!i.is_empty() || !f.is_empty())
        && i.bytes().all(|b| b.is_ascii_digit())
        && f.bytes().all(|b| b.is_ascii_digit())
}

fn is_integer_lexical(s: &str) -> bool {
    let body = s.strip_prefix(['+', '-']).unwrap_or(s);
    !body.is_empty() && body.bytes().all(|b| b.is_ascii_digit())
}

pub fn parse_datetime(s: &str) -> Option<DateTime<Utc>> {
    if let Ok(t) = DateTime::parse_from_rfc3339(s) {
        return Some(t.with_timezone(&Utc));
    }
    // xsd:dateTime without a zone; read as UTC.
    NaiveDateTime::parse_from_str(s, "%Y-%m-%dT%H:%M:%S%.f")
        .ok()
        .map(|n| n.and_utc())
}

/// Whether `lexical` is in the lexical space of `datatype`. Datatypes
/// outside the checked set accept anything.
pub fn lexical_conforms(lexical: &str, datatype: &str) -> bool {
    if xsd::is_integer_type(datatype) {
        return is_integer_lexical(lexical);
    }
    match xsd::local(datatype) {
        Some("decimal") => is_decimal_lexical(lexical),
        Some("double" | "float") => {
            matches!(lexical, "INF" | "-INF" | "+INF" | "NaN") || parse_decimal(lexical).is_some()
        }
        Some("boolean") => matches!(lexical, "true" | "false" | "1" | "0"),
        Some("dateTime") => parse_datetime(lexical).is_some(),
        Some("date") => NaiveDate::parse_from_str(lexical, "%Y-%m-%d").is_ok(),
        _ => true,
    }
}

/// True when a literal typed `actual` is acceptable where `expected` is
/// declared. Integer types satisfy decimal; otherwise the types must match.
pub fn datatype_compatible(actual: &str, expected: &str) -> bool {
    actual == expected
        || (expected == xsd::DECIMAL && xsd::is_integer_type(actual))
        || (xsd::is_integer_type(expected) && actual == xsd::INTEGER)
}

/// Exact value of a numeric literal; `None` for non-numeric types,
/// malformed lexicals, and the special float values.
pub fn numeric_value(literal: &Literal) -> Option<Rational> {
    let dt = literal.datatype().as_str();
    if !xsd::is_numeric(dt) || !lexical_conforms(literal.lexical(), dt) {
        return None;
    }
    parse_decimal(literal.lexical())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_and_integer_lexicals() {
        assert!(lexical_conforms("3.5", xsd::DECIMAL));
        assert!(lexical_conforms("-.5", xsd::DECIMAL));
        assert!(!lexical_conforms("abc", xsd::DECIMAL));
        assert!(!lexical_conforms("1e3", xsd::DECIMAL));
        assert!(lexical_conforms("1e3", xsd::DOUBLE));
        assert!(lexical_conforms("42", xsd::INTEGER));
        assert!(!lexical_conforms("4.2", xsd::INTEGER));
    }

    #[test]
    fn datetimes() {
        assert!(lexical_conforms("2024-05-01T13:00:00Z", xsd::DATE_TIME));
        assert!(lexical_conforms("2024-05-01T13:00:00", xsd::DATE_TIME));
        assert!(!lexical_conforms("yesterday", xsd::DATE_TIME));
    }

    #[test]
    fn numeric_values() {
        use crate::vocab::ns;
        assert_eq!(
            numeric_value(&Literal::typed("2.5", ns::xsd::decimal())),
            parse_decimal("2.5")
        );
        assert_eq!(numeric_value(&Literal::typed("NaN", ns::xsd::double())), None);
        assert_eq!(numeric_value(&Literal::string("2.5")), None);
    }
}
