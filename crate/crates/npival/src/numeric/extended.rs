//! Values that are either exact rationals or exact affine combinations
//! offset + coeff * c of a single certified irrational constant c.
//!
//! Every formula in this crate is affine in the last Puiseux exponent, so an
//! irrational exponent propagates exactly: arithmetic stays symbolic and only
//! a final comparison consults the enclosure.

use crate::error::{Error, Result};
use crate::numeric::certified::{parse_constant, CertifiedIrrational};
use crate::numeric::rational::{parse_rational, Rational};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use std::cmp::Ordering;

/// Three-valued truth: Unknown carries the enclosure width at which the
/// comparison gave up.
#[derive(Debug, Clone, PartialEq)]
pub enum TriBool {
    True,
    False,
    Unknown(Rational),
}

impl TriBool {
    pub fn is_true(&self) -> bool {
        matches!(self, TriBool::True)
    }

    pub fn is_false(&self) -> bool {
        matches!(self, TriBool::False)
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self, TriBool::Unknown(_))
    }

    pub fn from_bool(b: bool) -> Self {
        if b {
            TriBool::True
        } else {
            TriBool::False
        }
    }

    pub fn negate(&self) -> Self {
        match self {
            TriBool::True => TriBool::False,
            TriBool::False => TriBool::True,
            TriBool::Unknown(w) => TriBool::Unknown(w.clone()),
        }
    }
}

impl std::fmt::Display for TriBool {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TriBool::True => write!(f, "true"),
            TriBool::False => write!(f, "false"),
            TriBool::Unknown(_) => write!(f, "unknown"),
        }
    }
}

/// offset + coeff * constant with coeff != 0; irrational by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct IrrationalExpr {
    offset: Rational,
    coeff: Rational,
    constant: CertifiedIrrational,
}

impl IrrationalExpr {
    pub fn offset(&self) -> &Rational {
        &self.offset
    }

    pub fn coeff(&self) -> &Rational {
        &self.coeff
    }

    pub fn constant(&self) -> &CertifiedIrrational {
        &self.constant
    }

    /// Image of the constant's enclosure under the affine map.
    pub fn enclosure(&self) -> (Rational, Rational) {
        let (clo, chi) = self.constant.enclosure();
        let a = &self.offset + &self.coeff * clo;
        let b = &self.offset + &self.coeff * chi;
        if a <= b {
            (a, b)
        } else {
            (b, a)
        }
    }
}

/// An exponent-like exact value: a rational, or an affine irrational
/// expression. The rational variant is used if and only if the value is
/// rational.
#[derive(Debug, Clone, PartialEq)]
pub enum ExtendedExponent {
    Rational(Rational),
    Irrational(IrrationalExpr),
}

impl ExtendedExponent {
    pub fn from_rational(x: Rational) -> Self {
        ExtendedExponent::Rational(x)
    }

    pub fn from_constant(c: CertifiedIrrational) -> Self {
        ExtendedExponent::Irrational(IrrationalExpr {
            offset: Rational::zero(),
            coeff: Rational::from_integer(BigInt::from(1)),
            constant: c,
        })
    }

    pub fn affine(offset: Rational, coeff: Rational, constant: CertifiedIrrational) -> Self {
        if coeff.is_zero() {
            ExtendedExponent::Rational(offset)
        } else {
            ExtendedExponent::Irrational(IrrationalExpr { offset, coeff, constant })
        }
    }

    pub fn zero() -> Self {
        ExtendedExponent::Rational(Rational::zero())
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, ExtendedExponent::Rational(_))
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            ExtendedExponent::Rational(x) => Some(x),
            ExtendedExponent::Irrational(_) => None,
        }
    }

    pub fn add_rational(&self, r: &Rational) -> Self {
        match self {
            ExtendedExponent::Rational(x) => ExtendedExponent::Rational(x + r),
            ExtendedExponent::Irrational(e) => ExtendedExponent::Irrational(IrrationalExpr {
                offset: &e.offset + r,
                coeff: e.coeff.clone(),
                constant: e.constant.clone(),
            }),
        }
    }

    pub fn mul_rational(&self, r: &Rational) -> Self {
        match self {
            ExtendedExponent::Rational(x) => ExtendedExponent::Rational(x * r),
            ExtendedExponent::Irrational(e) => {
                ExtendedExponent::affine(&e.offset * r, &e.coeff * r, e.constant.clone())
            }
        }
    }

    /// self + other; both irrational only when they share the same constant.
    pub fn add(&self, other: &ExtendedExponent) -> ExtendedExponent {
        match (self, other) {
            (ExtendedExponent::Rational(a), _) => other.add_rational(a),
            (_, ExtendedExponent::Rational(b)) => self.add_rational(b),
            (ExtendedExponent::Irrational(a), ExtendedExponent::Irrational(b)) => {
                assert!(
                    a.constant == b.constant,
                    "cannot combine distinct irrational constants exactly"
                );
                ExtendedExponent::affine(
                    &a.offset + &b.offset,
                    &a.coeff + &b.coeff,
                    a.constant.clone(),
                )
            }
        }
    }

    pub fn neg(&self) -> ExtendedExponent {
        self.mul_rational(&Rational::from_integer(BigInt::from(-1)))
    }

    pub fn sub(&self, other: &ExtendedExponent) -> ExtendedExponent {
        self.add(&other.neg())
    }

    /// Exact sign, certified by refinement for irrational values.
    pub fn sign(&self, budget: u32) -> Result<Ordering> {
        match self {
            ExtendedExponent::Rational(x) => Ok(x.cmp(&Rational::zero())),
            ExtendedExponent::Irrational(e) => {
                // offset + coeff*c vs 0 <=> c vs -offset/coeff, flipped by sign
                let target = -&e.offset / &e.coeff;
                let ord = e.constant.compare_rational(&target, budget);
                let ord = match ord {
                    Ok(o) => o,
                    Err(Error::Undecidable { width }) => {
                        return Err(Error::Undecidable { width: width * e.coeff.abs() })
                    }
                    Err(other) => return Err(other),
                };
                if e.coeff.is_positive() {
                    Ok(ord)
                } else {
                    Ok(ord.reverse())
                }
            }
        }
    }

    /// Decimal approximation for human-facing output only.
    pub fn approx_f64(&self) -> f64 {
        match self {
            ExtendedExponent::Rational(x) => crate::numeric::rational::approx_f64(x),
            ExtendedExponent::Irrational(e) => {
                let (lo, hi) = e.enclosure();
                let mid = (lo + hi) / Rational::from_integer(BigInt::from(2));
                crate::numeric::rational::approx_f64(&mid)
            }
        }
    }

    /// Certified floor. Rational values floor exactly; irrational values are
    /// refined until the enclosure pins a single integer.
    pub fn certified_floor(&self, budget: u32) -> Result<BigInt> {
        match self {
            ExtendedExponent::Rational(x) => Ok(x.floor().to_integer()),
            ExtendedExponent::Irrational(e) => {
                let mut c = e.constant.clone();
                for _ in 0..=budget {
                    let expr = IrrationalExpr {
                        offset: e.offset.clone(),
                        coeff: e.coeff.clone(),
                        constant: c.clone(),
                    };
                    let (lo, hi) = expr.enclosure();
                    let fl = lo.floor().to_integer();
                    // value in (lo, hi); floor is fl if hi <= fl + 1
                    if hi <= Rational::from_integer(&fl + BigInt::from(1)) {
                        return Ok(fl);
                    }
                    let next = c.refine();
                    if next.width() >= c.width() {
                        break;
                    }
                    c = next;
                }
                Err(Error::Undecidable { width: c.width() * e.coeff.abs() })
            }
        }
    }

    pub fn certified_ceil(&self, budget: u32) -> Result<BigInt> {
        match self {
            ExtendedExponent::Rational(x) => Ok(x.ceil().to_integer()),
            ExtendedExponent::Irrational(_) => {
                // irrational: ceil = floor + 1
                Ok(self.certified_floor(budget)? + BigInt::from(1))
            }
        }
    }

    /// First k continued-fraction digits; only irrational values carry an
    /// infinite expansion, so the rational variant is a domain error.
    pub fn cf_prefix(&self, k: usize, budget: u32) -> Result<Vec<BigInt>> {
        match self {
            ExtendedExponent::Rational(x) => Err(Error::Domain(format!(
                "cf_prefix expects a certified irrational, got rational {x}"
            ))),
            ExtendedExponent::Irrational(e) => {
                // offset + coeff*c as an integer Moebius transform of c
                let (on, od) = (e.offset.numer().clone(), e.offset.denom().clone());
                let (cn, cd) = (e.coeff.numer().clone(), e.coeff.denom().clone());
                let matrix = [&cn * &od, &on * &cd, BigInt::zero(), &cd * &od];
                e.constant.cf_prefix_moebius(matrix, k, budget)
            }
        }
    }
}

impl std::fmt::Display for ExtendedExponent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ExtendedExponent::Rational(x) => write!(f, "{x}"),
            ExtendedExponent::Irrational(e) => {
                if e.offset.is_zero() && e.coeff == Rational::from_integer(BigInt::from(1)) {
                    return write!(f, "{}", e.constant);
                }
                if e.coeff.is_negative() {
                    write!(f, "{}-{}*{}", e.offset, -&e.coeff, e.constant)
                } else {
                    write!(f, "{}+{}*{}", e.offset, e.coeff, e.constant)
                }
            }
        }
    }
}

/// Parses exponent tokens: a rational, a constant name, or an affine form
/// "offset+coeff*name" / "offset-coeff*name".
pub fn parse_extended(s: &str) -> Result<ExtendedExponent> {
    let s = s.trim();
    if let Ok(r) = parse_rational(s) {
        return Ok(ExtendedExponent::Rational(r));
    }
    if let Some(star) = s.find('*') {
        // affine form: split at the last +/- before '*', skipping index 0
        let head = &s[..star];
        let mut split_at = None;
        for (i, ch) in head.char_indices().skip(1) {
            if ch == '+' || ch == '-' {
                split_at = Some(i);
            }
        }
        if let Some(i) = split_at {
            let offset = parse_rational(&s[..i])?;
            let sign = if s.as_bytes()[i] == b'-' { -1 } else { 1 };
            let coeff = parse_rational(&s[i + 1..star])? * Rational::from_integer(BigInt::from(sign));
            let constant = parse_constant(&s[star + 1..])?;
            if coeff.is_zero() {
                return Err(Error::Parse(format!("zero coefficient in {s:?}")));
            }
            return Ok(ExtendedExponent::Irrational(IrrationalExpr { offset, coeff, constant }));
        }
        return Err(Error::Parse(format!("bad affine token {s:?}")));
    }
    Ok(ExtendedExponent::from_constant(parse_constant(s)?))
}

/// Outcome of comparing an extended exponent with a rational.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtCompare {
    pub lt: TriBool,
    pub eq: TriBool,
    pub gt: TriBool,
}

/// Compares a (possibly irrational) value with an exact rational. Rational
/// comparisons are always decided exactly. For irrational values, equality is
/// false unconditionally, and the order is decided once refinement separates
/// the enclosure from the target; otherwise all order predicates are Unknown
/// with the final width.
pub fn ext_compare(a: &ExtendedExponent, b: &Rational, budget: u32) -> ExtCompare {
    match a {
        ExtendedExponent::Rational(x) => {
            let ord = x.cmp(b);
            ExtCompare {
                lt: TriBool::from_bool(ord == Ordering::Less),
                eq: TriBool::from_bool(ord == Ordering::Equal),
                gt: TriBool::from_bool(ord == Ordering::Greater),
            }
        }
        ExtendedExponent::Irrational(_) => {
            let diff = a.add_rational(&-b);
            match diff.sign(budget) {
                Ok(Ordering::Less) => ExtCompare {
                    lt: TriBool::True,
                    eq: TriBool::False,
                    gt: TriBool::False,
                },
                Ok(Ordering::Greater) => ExtCompare {
                    lt: TriBool::False,
                    eq: TriBool::False,
                    gt: TriBool::True,
                },
                Ok(Ordering::Equal) => unreachable!("irrational value equal to a rational"),
                Err(Error::Undecidable { width }) => ExtCompare {
                    lt: TriBool::Unknown(width.clone()),
                    eq: TriBool::False,
                    gt: TriBool::Unknown(width),
                },
                Err(_) => unreachable!("sign only fails with Undecidable"),
            }
        }
    }
}
