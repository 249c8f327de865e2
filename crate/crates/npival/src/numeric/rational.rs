use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_traits::Signed;
use std::str::FromStr;

/// Exact arbitrary-precision fraction, always stored reduced with a positive
/// denominator. This is the substrate of every formula in the crate; no
/// floating point is used anywhere outside of clearly marked display
/// approximations.
pub type Rational = num_rational::BigRational;

/// Parses "q/p" or "n" into an exact rational. Total: a zero denominator or
/// malformed token is a parse error, never a panic.
pub fn parse_rational(s: &str) -> Result<Rational> {
    Rational::from_str(s.trim()).map_err(|e| Error::Parse(format!("bad rational {s:?}: {e}")))
}

pub fn rational_from_int(n: impl Into<BigInt>) -> Rational {
    Rational::from_integer(n.into())
}

/// Convenience constructor used pervasively in tests.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn is_positive_integer(x: &Rational) -> bool {
    x.is_integer() && x.numer().is_positive()
}

/// Exact floor as a big integer.
pub fn floor_int(x: &Rational) -> BigInt {
    x.floor().to_integer()
}

/// Exact ceiling as a big integer.
pub fn ceil_int(x: &Rational) -> BigInt {
    x.ceil().to_integer()
}

/// Midpoint-free decimal rendering for human output; the result is marked
/// approximate by callers. Falls back to the exact token if the value does
/// not fit in an f64.
pub fn approx_f64(x: &Rational) -> f64 {
    let n = x.numer();
    let d = x.denom();
    let nf = n.to_string().parse::<f64>().unwrap_or(f64::NAN);
    let df = d.to_string().parse::<f64>().unwrap_or(f64::NAN);
    nf / df
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display_round_trip() {
        for tok in ["5/2", "3", "-3/4", "57/5"] {
            let r = parse_rational(tok).unwrap();
            assert_eq!(r.to_string(), tok);
        }
        // Non-canonical input normalizes.
        assert_eq!(parse_rational("-9/6").unwrap().to_string(), "-3/2");
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(parse_rational("5/0").is_err());
        assert!(parse_rational("").is_err());
        assert!(parse_rational("a/b").is_err());
    }

    #[test]
    fn floor_and_ceil_are_exact() {
        assert_eq!(floor_int(&rat(-3, 4)), BigInt::from(-1));
        assert_eq!(ceil_int(&rat(-3, 4)), BigInt::from(0));
        assert_eq!(floor_int(&rat(5, 2)), BigInt::from(2));
        assert_eq!(ceil_int(&rat(5, 2)), BigInt::from(3));
        assert_eq!(floor_int(&rat(4, 1)), BigInt::from(4));
        assert_eq!(ceil_int(&rat(4, 1)), BigInt::from(4));
    }
}
