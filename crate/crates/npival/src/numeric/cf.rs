//! Finite continued fractions of rationals.
//!
//! Every rational x >= 1 has exactly two simple continued-fraction
//! representations; the canonical one here is the representation whose last
//! digit is >= 2 (unless there is a single digit). Canonicity makes the
//! digit-based vertex counts of dual graphs well defined.

use crate::error::{Error, Result};
use crate::numeric::rational::Rational;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// Canonical digits <a1; a2, ..., ar> of a rational >= 1: nonempty, every
/// digit positive, and ar >= 2 whenever r > 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CFDigits(Vec<BigInt>);

impl CFDigits {
    pub fn new(digits: Vec<BigInt>) -> Result<Self> {
        if digits.is_empty() {
            return Err(Error::Domain("continued fraction needs at least one digit".into()));
        }
        if let Some(bad) = digits.iter().find(|d| !d.is_positive()) {
            return Err(Error::Domain(format!("continued-fraction digit {bad} is not positive")));
        }
        if digits.len() > 1 && digits[digits.len() - 1] < BigInt::from(2) {
            return Err(Error::Domain("multi-digit continued fraction must end with a digit >= 2".into()));
        }
        Ok(CFDigits(digits))
    }

    pub fn digits(&self) -> &[BigInt] {
        &self.0
    }

    /// Sum of the digits; equals the number of vertices the corresponding
    /// dual-graph stage spans.
    pub fn digit_sum(&self) -> BigInt {
        self.0.iter().sum()
    }
}

impl std::fmt::Display for CFDigits {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let toks: Vec<String> = self.0.iter().map(|d| d.to_string()).collect();
        write!(f, "{}", toks.join(","))
    }
}

/// Expands a rational x >= 1 into its canonical continued-fraction digits.
pub fn cf_expand(x: &Rational) -> Result<CFDigits> {
    if *x < Rational::one() {
        return Err(Error::Domain(format!("cf_expand requires x >= 1, got {x}")));
    }
    let mut digits = Vec::new();
    let mut cur = x.clone();
    loop {
        let a = cur.floor();
        digits.push(a.to_integer());
        let frac = &cur - &a;
        if frac.is_zero() {
            break;
        }
        cur = frac.recip();
    }
    // The Euclidean recursion never ends a multi-digit expansion in 1: each
    // tail value is strictly greater than 1, so an integer tail is >= 2.
    CFDigits::new(digits)
}

/// Evaluates digits back to the exact rational they denote.
pub fn cf_eval(d: &CFDigits) -> Rational {
    let digits = d.digits();
    let mut value = Rational::from_integer(digits[digits.len() - 1].clone());
    for a in digits[..digits.len() - 1].iter().rev() {
        value = Rational::from_integer(a.clone()) + value.recip();
    }
    value
}

/// Evaluates an arbitrary positive digit sequence (not necessarily
/// canonical), used for digit prefixes of irrationals.
pub fn eval_digit_prefix(digits: &[BigInt]) -> Result<Rational> {
    if digits.is_empty() {
        return Err(Error::Domain("empty digit prefix".into()));
    }
    if let Some(bad) = digits.iter().find(|d| !d.is_positive()) {
        return Err(Error::Domain(format!("digit {bad} is not positive")));
    }
    let mut value = Rational::from_integer(digits[digits.len() - 1].clone());
    for a in digits[..digits.len() - 1].iter().rev() {
        value = Rational::from_integer(a.clone()) + value.recip();
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rational::rat;

    /// Independent oracle: digits of n/d by plain Euclidean division on the
    /// integer pair, bypassing the Rational-based loop above.
    fn euclid_oracle(mut n: i64, mut d: i64) -> Vec<i64> {
        let mut out = Vec::new();
        while d != 0 {
            out.push(n.div_euclid(d));
            let r = n.rem_euclid(d);
            n = d;
            d = r;
        }
        out
    }

    fn digits(xs: &[i64]) -> Vec<BigInt> {
        xs.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn expand_matches_euclidean_division_oracle() {
        assert_eq!(euclid_oracle(5, 2), vec![2, 2]);
        assert_eq!(cf_expand(&rat(5, 2)).unwrap().digits(), &digits(&[2, 2])[..]);
        assert_eq!(euclid_oracle(7, 5), vec![1, 2, 2]);
        assert_eq!(cf_expand(&rat(7, 5)).unwrap().digits(), &digits(&[1, 2, 2])[..]);
    }

    #[test]
    fn expand_integer() {
        assert_eq!(cf_expand(&rat(3, 1)).unwrap().digits(), &digits(&[3])[..]);
    }

    #[test]
    fn expand_rejects_below_one() {
        assert!(matches!(cf_expand(&rat(2, 5)), Err(Error::Domain(_))));
    }

    #[test]
    fn eval_examples() {
        assert_eq!(cf_eval(&CFDigits::new(digits(&[2, 2])).unwrap()), rat(5, 2));
        assert_eq!(cf_eval(&CFDigits::new(digits(&[1])).unwrap()), rat(1, 1));
        assert_eq!(cf_eval(&CFDigits::new(digits(&[2, 1, 2])).unwrap()), rat(8, 3));
    }

    #[test]
    fn canonical_form_rejects_trailing_one() {
        assert!(CFDigits::new(digits(&[2, 1])).is_err());
        assert!(CFDigits::new(digits(&[1])).is_ok());
        assert!(CFDigits::new(digits(&[])).is_err());
        assert!(CFDigits::new(digits(&[2, 0, 2])).is_err());
    }
}
