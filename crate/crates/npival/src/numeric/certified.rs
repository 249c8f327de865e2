//! Certified irrational constants.
//!
//! An irrational value is carried as a named constant together with a pair of
//! exact rationals (lo, hi) that strictly enclose it. The enclosure can be
//! refined deterministically: bisection against the defining polynomial for
//! the golden ratio and square roots, and alternating-series arctangent
//! bounds for pi. Comparisons against rationals are decided by refining
//! until the enclosure separates from the target; equality with a rational
//! is false by irrationality.

use crate::error::{Error, Result};
use crate::numeric::rational::{parse_rational, Rational};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;

#[derive(Debug, Clone, PartialEq, Eq)]
enum ConstantKind {
    GoldenRatio,
    Pi,
    /// Square root of a positive non-square rational.
    Sqrt(Rational),
    /// A user-asserted irrational known only through its interval. The
    /// enclosure cannot be narrowed (refine is the identity), so comparisons
    /// that need more precision surface as Unknown.
    UserInterval,
}

/// A named irrational constant with a strict rational enclosure.
#[derive(Debug, Clone)]
pub struct CertifiedIrrational {
    kind: ConstantKind,
    lo: Rational,
    hi: Rational,
    /// Series terms used so far (pi only).
    terms: u32,
}

/// Identity is the constant itself, not the current enclosure width: two
/// handles on phi are equal even if one has been refined further.
impl PartialEq for CertifiedIrrational {
    fn eq(&self, other: &Self) -> bool {
        match (&self.kind, &other.kind) {
            (ConstantKind::UserInterval, ConstantKind::UserInterval) => {
                self.lo == other.lo && self.hi == other.hi
            }
            (a, b) => a == b,
        }
    }
}

fn bigint_is_square(n: &BigInt) -> bool {
    if n.is_negative() {
        return false;
    }
    let root = n.sqrt();
    &root * &root == *n
}

/// arctan(1/x) bounds from the alternating Taylor series with `terms` terms.
/// The remainder is strictly between 0 and the next term, which gives strict
/// rational bounds on either side.
fn arctan_recip_bounds(x: i64, terms: u32) -> (Rational, Rational) {
    let x = BigInt::from(x);
    let mut sum = Rational::zero();
    let mut power = x.clone(); // x^(2k+1)
    let xx = &x * &x;
    for k in 0..terms {
        let term = Rational::new(BigInt::one(), BigInt::from(2 * k + 1) * &power);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
        power *= &xx;
    }
    // power now holds x^(2*terms+1); the remainder lies strictly between 0
    // and this next term.
    let next = Rational::new(BigInt::one(), BigInt::from(2 * terms + 1) * power);
    if terms % 2 == 0 {
        (sum.clone(), sum + next)
    } else {
        (&sum - &next, sum)
    }
}

/// Machin's formula: pi = 16 arctan(1/5) - 4 arctan(1/239), with both
/// arctangents bracketed by strict series bounds.
fn pi_bounds(terms: u32) -> (Rational, Rational) {
    let sixteen = Rational::from_integer(BigInt::from(16));
    let four = Rational::from_integer(BigInt::from(4));
    let (alo, ahi) = arctan_recip_bounds(5, terms);
    let (blo, bhi) = arctan_recip_bounds(239, terms);
    (&sixteen * alo - &four * bhi, sixteen * ahi - four * blo)
}

impl CertifiedIrrational {
    /// The golden ratio, the positive root of x^2 - x - 1, enclosed in (1, 2).
    pub fn golden_ratio() -> Self {
        CertifiedIrrational {
            kind: ConstantKind::GoldenRatio,
            lo: Rational::one(),
            hi: Rational::from_integer(BigInt::from(2)),
            terms: 0,
        }
    }

    pub fn pi() -> Self {
        let terms = 2;
        let (lo, hi) = pi_bounds(terms);
        CertifiedIrrational {
            kind: ConstantKind::Pi,
            lo,
            hi,
            terms,
        }
    }

    /// Square root of a positive rational that is not a perfect square.
    pub fn sqrt(r: Rational) -> Result<Self> {
        if !r.is_positive() {
            return Err(Error::Domain(format!("sqrt of non-positive rational {r}")));
        }
        if bigint_is_square(r.numer()) && bigint_is_square(r.denom()) {
            return Err(Error::Domain(format!("sqrt({r}) is rational, not a certified irrational")));
        }
        let one = Rational::one();
        let (lo, hi) = if r > one {
            (one, r.clone())
        } else {
            (r.clone(), one)
        };
        Ok(CertifiedIrrational {
            kind: ConstantKind::Sqrt(r),
            lo,
            hi,
            terms: 0,
        })
    }

    /// Wraps a user-asserted irrational lying strictly inside (lo, hi).
    /// Soundness of the irrationality claim rests on the caller.
    pub fn interval(lo: Rational, hi: Rational) -> Result<Self> {
        if lo >= hi {
            return Err(Error::Domain(format!("interval requires lo < hi, got [{lo}, {hi}]")));
        }
        Ok(CertifiedIrrational {
            kind: ConstantKind::UserInterval,
            lo,
            hi,
            terms: 0,
        })
    }

    pub fn enclosure(&self) -> (&Rational, &Rational) {
        (&self.lo, &self.hi)
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    /// Returns a strictly narrower enclosure of the same constant (halved at
    /// least, for the built-in constants). The user-interval kind cannot be
    /// narrowed soundly and is returned unchanged.
    pub fn refine(&self) -> Self {
        match &self.kind {
            ConstantKind::GoldenRatio => {
                let mid = (&self.lo + &self.hi) / Rational::from_integer(BigInt::from(2));
                // sign of mid^2 - mid - 1; never zero at a rational point
                let f = &mid * &mid - &mid - Rational::one();
                let (lo, hi) = if f.is_negative() {
                    (mid, self.hi.clone())
                } else {
                    (self.lo.clone(), mid)
                };
                CertifiedIrrational { kind: self.kind.clone(), lo, hi, terms: 0 }
            }
            ConstantKind::Sqrt(r) => {
                let mid = (&self.lo + &self.hi) / Rational::from_integer(BigInt::from(2));
                let f = &mid * &mid - r;
                let (lo, hi) = if f.is_negative() {
                    (mid, self.hi.clone())
                } else {
                    (self.lo.clone(), mid)
                };
                CertifiedIrrational { kind: self.kind.clone(), lo, hi, terms: 0 }
            }
            ConstantKind::Pi => {
                let terms = self.terms + 1;
                let (lo, hi) = pi_bounds(terms);
                CertifiedIrrational { kind: ConstantKind::Pi, lo, hi, terms }
            }
            ConstantKind::UserInterval => self.clone(),
        }
    }

    /// Decides the order of the constant against an exact rational.
    /// Equality is impossible; Less/Greater is certified once refinement
    /// separates the enclosure from the target.
    pub fn compare_rational(&self, target: &Rational, budget: u32) -> Result<Ordering> {
        let mut cur = self.clone();
        for _ in 0..=budget {
            if cur.hi <= *target {
                return Ok(Ordering::Less);
            }
            if cur.lo >= *target {
                return Ok(Ordering::Greater);
            }
            let next = cur.refine();
            if next.width() >= cur.width() {
                // no progress possible (user interval)
                break;
            }
            cur = next;
        }
        Err(Error::Undecidable { width: cur.width() })
    }

    /// First k continued-fraction digits, each certified by enclosure
    /// separation. The represented value must exceed 1.
    pub fn cf_prefix(&self, k: usize, budget: u32) -> Result<Vec<BigInt>> {
        self.cf_prefix_moebius(
            [BigInt::one(), BigInt::zero(), BigInt::zero(), BigInt::one()],
            k,
            budget,
        )
    }

    /// Digits of (a*x + b)/(c*x + d), where x is this constant. The value of
    /// the transform (not x itself) must exceed 1. The remainder after
    /// stripping digits stays a Moebius transform of x, so digit extraction
    /// is exact integer matrix arithmetic.
    pub(crate) fn cf_prefix_moebius(
        &self,
        matrix: [BigInt; 4],
        k: usize,
        budget: u32,
    ) -> Result<Vec<BigInt>> {
        if k == 0 {
            return Err(Error::Domain("cf_prefix needs k >= 1".into()));
        }
        let [mut ma, mut mb, mut mc, mut md] = matrix;
        let mut base = self.clone();
        let mut spent = 0u32;
        let mut digits = Vec::with_capacity(k);

        for index in 1..=k {
            loop {
                let den_lo = Rational::from_integer(mc.clone()) * &base.lo + Rational::from_integer(md.clone());
                let den_hi = Rational::from_integer(mc.clone()) * &base.hi + Rational::from_integer(md.clone());
                let pole_free = !den_lo.is_zero()
                    && !den_hi.is_zero()
                    && den_lo.is_positive() == den_hi.is_positive();
                if pole_free {
                    let num_lo = Rational::from_integer(ma.clone()) * &base.lo + Rational::from_integer(mb.clone());
                    let num_hi = Rational::from_integer(ma.clone()) * &base.hi + Rational::from_integer(mb.clone());
                    let v1 = num_lo / den_lo;
                    let v2 = num_hi / den_hi;
                    let (ylo, yhi) = if v1 <= v2 { (v1, v2) } else { (v2, v1) };
                    let cand = ylo.floor().to_integer();
                    let cand_plus_one = Rational::from_integer(&cand + BigInt::one());
                    if yhi <= cand_plus_one {
                        if !cand.is_positive() {
                            return Err(Error::Domain(
                                "continued-fraction remainder dropped to 1 or below; value is not > 1".into(),
                            ));
                        }
                        // value = 1 / (value - cand)
                        let (na, nb) = (mc.clone(), md.clone());
                        let nc = &ma - &cand * &mc;
                        let nd = &mb - &cand * &md;
                        ma = na;
                        mb = nb;
                        mc = nc;
                        md = nd;
                        digits.push(cand);
                        break;
                    }
                }
                if spent >= budget {
                    return Err(Error::UndecidableDigit { index });
                }
                let next = base.refine();
                if next.width() >= base.width() {
                    return Err(Error::UndecidableDigit { index });
                }
                base = next;
                spent += 1;
            }
        }
        Ok(digits)
    }
}

impl std::fmt::Display for CertifiedIrrational {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.kind {
            ConstantKind::GoldenRatio => write!(f, "phi"),
            ConstantKind::Pi => write!(f, "pi"),
            ConstantKind::Sqrt(r) => write!(f, "sqrt:{r}"),
            ConstantKind::UserInterval => write!(f, "interval:{}:{}", self.lo, self.hi),
        }
    }
}

/// Parses the constant tokens "phi", "pi", "sqrt:q/p", "interval:lo:hi".
pub fn parse_constant(s: &str) -> Result<CertifiedIrrational> {
    let s = s.trim();
    match s {
        "phi" => return Ok(CertifiedIrrational::golden_ratio()),
        "pi" => return Ok(CertifiedIrrational::pi()),
        _ => {}
    }
    if let Some(rest) = s.strip_prefix("sqrt:") {
        return CertifiedIrrational::sqrt(parse_rational(rest)?);
    }
    if let Some(rest) = s.strip_prefix("interval:") {
        let mut parts = rest.splitn(2, ':');
        let lo = parts
            .next()
            .ok_or_else(|| Error::Parse(format!("bad interval token {s:?}")))?;
        let hi = parts
            .next()
            .ok_or_else(|| Error::Parse(format!("bad interval token {s:?}")))?;
        return CertifiedIrrational::interval(parse_rational(lo)?, parse_rational(hi)?);
    }
    Err(Error::Parse(format!("unknown irrational constant {s:?}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rational::rat;

    #[test]
    fn golden_ratio_initial_enclosure() {
        let phi = CertifiedIrrational::golden_ratio();
        assert_eq!(phi.enclosure(), (&rat(1, 1), &rat(2, 1)));
    }

    #[test]
    fn refinement_is_nested_and_halving() {
        for c in [
            CertifiedIrrational::golden_ratio(),
            CertifiedIrrational::pi(),
            CertifiedIrrational::sqrt(rat(2, 1)).unwrap(),
            CertifiedIrrational::sqrt(rat(1, 2)).unwrap(),
        ] {
            let mut cur = c;
            for _ in 0..40 {
                let next = cur.refine();
                assert!(next.lo >= cur.lo && next.hi <= cur.hi, "nested");
                assert!(next.lo < next.hi, "nonempty");
                assert!(next.width() * rat(2, 1) <= cur.width(), "halves at least");
                cur = next;
            }
        }
    }

    #[test]
    fn phi_brackets_fibonacci_ratios() {
        // 21/13 < phi < 13/8 (consecutive Fibonacci convergents bracket phi)
        let phi = CertifiedIrrational::golden_ratio();
        assert_eq!(phi.compare_rational(&rat(21, 13), 64).unwrap(), Ordering::Greater);
        assert_eq!(phi.compare_rational(&rat(13, 8), 64).unwrap(), Ordering::Less);
    }

    #[test]
    fn pi_bounds_are_tight() {
        let pi = CertifiedIrrational::pi();
        assert_eq!(pi.compare_rational(&rat(3, 1), 64).unwrap(), Ordering::Greater);
        assert_eq!(pi.compare_rational(&rat(22, 7), 64).unwrap(), Ordering::Less);
        assert_eq!(pi.compare_rational(&rat(314159, 100000), 64).unwrap(), Ordering::Greater);
        assert_eq!(pi.compare_rational(&rat(314160, 100000), 64).unwrap(), Ordering::Less);
    }

    #[test]
    fn sqrt_rejects_squares_and_nonpositive() {
        assert!(CertifiedIrrational::sqrt(rat(4, 1)).is_err());
        assert!(CertifiedIrrational::sqrt(rat(9, 4)).is_err());
        assert!(CertifiedIrrational::sqrt(rat(0, 1)).is_err());
        assert!(CertifiedIrrational::sqrt(rat(-2, 1)).is_err());
        assert!(CertifiedIrrational::sqrt(rat(2, 1)).is_ok());
        assert!(CertifiedIrrational::sqrt(rat(5, 4)).is_ok());
    }

    #[test]
    fn cf_prefix_of_phi_is_all_ones() {
        let phi = CertifiedIrrational::golden_ratio();
        let d = phi.cf_prefix(4, 256).unwrap();
        assert_eq!(d, vec![1, 1, 1, 1].into_iter().map(BigInt::from).collect::<Vec<_>>());
    }

    #[test]
    fn cf_prefix_of_sqrt2() {
        let s = CertifiedIrrational::sqrt(rat(2, 1)).unwrap();
        let d = s.cf_prefix(3, 256).unwrap();
        assert_eq!(d, vec![1, 2, 2].into_iter().map(BigInt::from).collect::<Vec<_>>());
    }

    #[test]
    fn cf_prefix_rejects_values_not_above_one() {
        let s = CertifiedIrrational::sqrt(rat(1, 2)).unwrap();
        assert!(matches!(s.cf_prefix(2, 64), Err(Error::Domain(_))));
    }

    #[test]
    fn user_interval_comparisons_go_undecidable() {
        let c = CertifiedIrrational::interval(rat(1, 1), rat(2, 1)).unwrap();
        assert!(matches!(
            c.compare_rational(&rat(3, 2), 16),
            Err(Error::Undecidable { .. })
        ));
        // but separation outside the interval is immediate
        assert_eq!(c.compare_rational(&rat(3, 1), 16).unwrap(), Ordering::Less);
    }

    #[test]
    fn token_round_trip() {
        for tok in ["phi", "pi", "sqrt:2", "sqrt:1/2", "interval:3/2:7/4"] {
            let c = parse_constant(tok).unwrap();
            assert_eq!(c.to_string(), tok);
        }
        assert!(parse_constant("tau").is_err());
    }
}
