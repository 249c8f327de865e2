//! Non-positive-at-infinity membership tests.
//!
//! A discrete class t belongs to the NPI set of a surface context exactly
//! when q(t) >= sum_{j=1..g} w_j^2 (b'_{j+1} - 1), where the left side
//! depends on the context:
//!
//!   projective            b'_1 (b'_1 - 1)
//!   Hirzebruch special    b'_1 (delta b'_1 + 1)      delta >= 0
//!   Hirzebruch nonspecial b'_1 - delta               delta >= 1
//!
//! The same test can be run through the maximal contact values instead
//! (bbar_1^2, 2 bbar_0 bbar_1 + delta bbar_1^2, 2 bbar_0 bbar_1 -
//! delta bbar_0^2 against bbar_{g+1}); both routes are exposed so they can
//! be checked against each other.

use crate::class::{contact_data, DiscreteClass, ValuationKind};
use crate::error::{Error, Result};
use crate::numeric::{rational_from_int, ExtendedExponent, Rational, TriBool};
use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;

/// The three surfaces-with-curve-at-infinity a membership question can refer
/// to. The geometry is abstracted to this tag; delta is the Hirzebruch index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SurfaceContext {
    Projective,
    HirzebruchSpecial { delta: BigUint },
    HirzebruchNonSpecial { delta: BigUint },
}

impl SurfaceContext {
    pub fn special(delta: u64) -> Self {
        SurfaceContext::HirzebruchSpecial { delta: BigUint::from(delta) }
    }

    pub fn non_special(delta: u64) -> Self {
        SurfaceContext::HirzebruchNonSpecial { delta: BigUint::from(delta) }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SurfaceContext::HirzebruchNonSpecial { delta } if delta.is_zero() => Err(
                Error::Domain("non-special context requires delta >= 1".into()),
            ),
            _ => Ok(()),
        }
    }

    /// Tokens: "p2", "special:<delta>", "nonspecial:<delta>".
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "p2" {
            return Ok(SurfaceContext::Projective);
        }
        if let Some(d) = s.strip_prefix("special:") {
            let delta: BigUint = d
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad delta {d:?}")))?;
            return Ok(SurfaceContext::HirzebruchSpecial { delta });
        }
        if let Some(d) = s.strip_prefix("nonspecial:") {
            let delta: BigUint = d
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad delta {d:?}")))?;
            let ctx = SurfaceContext::HirzebruchNonSpecial { delta };
            ctx.validate()?;
            return Ok(ctx);
        }
        Err(Error::Parse(format!("unknown surface context {s:?}")))
    }
}

impl std::fmt::Display for SurfaceContext {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SurfaceContext::Projective => write!(f, "p2"),
            SurfaceContext::HirzebruchSpecial { delta } => write!(f, "special:{delta}"),
            SurfaceContext::HirzebruchNonSpecial { delta } => write!(f, "nonspecial:{delta}"),
        }
    }
}

/// Result of one membership test. `member` is the non-strict inequality of
/// the characterization; `strict` additionally reports lhs > rhs, which the
/// generator's input condition needs.
#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub context: SurfaceContext,
    pub member: TriBool,
    pub strict: TriBool,
    pub lhs: Rational,
    pub rhs: ExtendedExponent,
    pub margin: ExtendedExponent,
}

fn delta_rational(delta: &BigUint) -> Rational {
    Rational::from_integer(BigInt::from(delta.clone()))
}

/// The context-dependent left side q(t). Exact and rational: b'_1 is rational
/// for every supported class (for g = 0 only integer-valued classes are
/// accepted here; an irrational b'_1 would make q irrational and the
/// characterization does not cover that corner).
pub fn q_value(t: &DiscreteClass, ctx: &SurfaceContext) -> Result<Rational> {
    ctx.validate()?;
    let b1 = match t.beta_prime(1) {
        ExtendedExponent::Rational(x) => x,
        ExtendedExponent::Irrational(_) => {
            return Err(Error::Unsupported(
                "classes (0, 1, a) with irrational a have an irrational q and are not covered"
                    .into(),
            ))
        }
    };
    Ok(match ctx {
        SurfaceContext::Projective => &b1 * (&b1 - Rational::one()),
        SurfaceContext::HirzebruchSpecial { delta } => {
            &b1 * (delta_rational(delta) * &b1 + Rational::one())
        }
        SurfaceContext::HirzebruchNonSpecial { delta } => &b1 - delta_rational(delta),
    })
}

/// sum_{j=1..g} w_j^2 (b'_{j+1} - 1); empty sum (exactly 0) when g = 0.
/// Irrational only when the class is irrational-kind.
pub fn rhs_sum(t: &DiscreteClass) -> ExtendedExponent {
    let data = contact_data(t);
    let mut acc = ExtendedExponent::zero();
    for j in 1..=t.g() {
        let wj = &data.w[j];
        let term = t
            .beta_prime(j + 1)
            .add_rational(&-Rational::one())
            .mul_rational(&(wj * wj));
        acc = acc.add(&term);
    }
    acc
}

fn verdict(ctx: &SurfaceContext, lhs: Rational, rhs: ExtendedExponent, budget: u32) -> Verdict {
    let margin = ExtendedExponent::Rational(lhs.clone()).sub(&rhs);
    let (member, strict) = match margin.sign(budget) {
        Ok(Ordering::Greater) => (TriBool::True, TriBool::True),
        Ok(Ordering::Equal) => (TriBool::True, TriBool::False),
        Ok(Ordering::Less) => (TriBool::False, TriBool::False),
        Err(Error::Undecidable { width }) => {
            (TriBool::Unknown(width.clone()), TriBool::Unknown(width))
        }
        Err(_) => unreachable!("sign fails only with Undecidable"),
    };
    Verdict { context: ctx.clone(), member, strict, lhs, rhs, margin }
}

/// Membership through the Puiseux-exponent form of the characterization.
pub fn classify(t: &DiscreteClass, ctx: &SurfaceContext, budget: u32) -> Result<Verdict> {
    let lhs = q_value(t, ctx)?;
    Ok(verdict(ctx, lhs, rhs_sum(t), budget))
}

/// Membership through the maximal-contact-value form. Must agree with
/// `classify` everywhere; kept as an independent route for cross-checking.
pub fn classify_dual_form(t: &DiscreteClass, ctx: &SurfaceContext, budget: u32) -> Result<Verdict> {
    ctx.validate()?;
    if t.g() == 0 && t.kind() == ValuationKind::Irrational {
        return Err(Error::Unsupported(
            "classes (0, 1, a) with irrational a are not covered".into(),
        ));
    }
    let data = contact_data(t);
    let b0 = rational_from_int(data.beta_bar[0].clone());
    // for g = 0 the ladder stops at bbar_0 and bbar_1 is the final value
    let b1 = if t.g() == 0 {
        data.beta_bar_last
            .as_rational()
            .expect("irrational g = 0 rejected above")
            .clone()
    } else {
        rational_from_int(data.beta_bar[1].clone())
    };
    let lhs = match ctx {
        SurfaceContext::Projective => &b1 * &b1,
        SurfaceContext::HirzebruchSpecial { delta } => {
            let two = Rational::from_integer(BigInt::from(2));
            two * &b0 * &b1 + delta_rational(delta) * &b1 * &b1
        }
        SurfaceContext::HirzebruchNonSpecial { delta } => {
            let two = Rational::from_integer(BigInt::from(2));
            two * &b0 * &b1 - delta_rational(delta) * &b0 * &b0
        }
    };
    Ok(verdict(ctx, lhs, data.beta_bar_last, budget))
}

/// Least delta >= 0 whose special context contains the class. The special
/// left side is monotone increasing in delta, so membership holds for every
/// larger delta. Computed by an exact ceiling, then verified via classify.
pub fn special_min_delta(t: &DiscreteClass, budget: u32) -> Result<BigUint> {
    if t.g() == 0 && t.kind() == ValuationKind::Irrational {
        return Err(Error::Unsupported(
            "classes (0, 1, a) with irrational a are not covered".into(),
        ));
    }
    let b1 = match t.beta_prime(1) {
        ExtendedExponent::Rational(x) => x,
        ExtendedExponent::Irrational(_) => unreachable!("rejected above"),
    };
    // b'_1 (delta b'_1 + 1) >= S  <=>  delta >= (S - b'_1) / b'_1^2
    let threshold = rhs_sum(t)
        .add_rational(&-&b1)
        .mul_rational(&(&b1 * &b1).recip());
    let ceil = threshold.certified_ceil(budget)?;
    let delta = if ceil.is_negative() { BigInt::zero() } else { ceil };
    let delta = delta.to_biguint().expect("non-negative");

    let check = classify(t, &SurfaceContext::HirzebruchSpecial { delta: delta.clone() }, budget)?;
    if check.member.is_false() {
        return Err(Error::Domain(format!(
            "internal: special threshold {delta} failed verification for {t}"
        )));
    }
    if delta > BigUint::zero() {
        let below = classify(
            t,
            &SurfaceContext::HirzebruchSpecial { delta: &delta - BigUint::one() },
            budget,
        )?;
        if below.member.is_true() {
            return Err(Error::Domain(format!(
                "internal: special threshold {delta} is not minimal for {t}"
            )));
        }
    }
    Ok(delta)
}

/// Greatest delta >= 1 whose non-special context contains the class, or None
/// when even delta = 1 fails. The non-special left side decreases in delta.
pub fn nonspecial_max_delta(t: &DiscreteClass, budget: u32) -> Result<Option<BigUint>> {
    if t.g() == 0 && t.kind() == ValuationKind::Irrational {
        return Err(Error::Unsupported(
            "classes (0, 1, a) with irrational a are not covered".into(),
        ));
    }
    let b1 = match t.beta_prime(1) {
        ExtendedExponent::Rational(x) => x,
        ExtendedExponent::Irrational(_) => unreachable!("rejected above"),
    };
    // b'_1 - delta >= S  <=>  delta <= b'_1 - S
    let bound = rhs_sum(t).neg().add_rational(&b1);
    let floor = bound.certified_floor(budget)?;
    if floor < BigInt::one() {
        return Ok(None);
    }
    let delta = floor.to_biguint().expect("positive");

    let check = classify(t, &SurfaceContext::HirzebruchNonSpecial { delta: delta.clone() }, budget)?;
    if check.member.is_false() {
        return Err(Error::Domain(format!(
            "internal: non-special threshold {delta} failed verification for {t}"
        )));
    }
    let above = classify(
        t,
        &SurfaceContext::HirzebruchNonSpecial { delta: &delta + BigUint::one() },
        budget,
    )?;
    if above.member.is_true() {
        return Err(Error::Domain(format!(
            "internal: non-special threshold {delta} is not maximal for {t}"
        )));
    }
    Ok(Some(delta))
}

/// One inclusion-law breach found by `check_inclusions`.
#[derive(Debug, Clone)]
pub struct InclusionViolation {
    pub class: DiscreteClass,
    pub detail: String,
}

/// Outcome of machine-checking the inclusion laws over a collection.
#[derive(Debug, Clone, Default)]
pub struct InclusionReport {
    pub classes: usize,
    pub checks: usize,
    pub violations: Vec<InclusionViolation>,
    /// (class, context) pairs whose verdict stayed Unknown at the budget;
    /// counted separately, never as violations.
    pub undecided: usize,
}

/// Verifies, on the given classes and delta range, that
/// (a) projective membership implies special membership for every delta > 0,
/// (b) projective with b'_1 <= 2 implies special at delta = 0, and special at
///     delta = 0 with b'_1 >= 2 implies projective,
/// (c) non-special membership (delta >= 1) implies projective membership.
pub fn check_inclusions(
    ts: &[DiscreteClass],
    delta_lo: u64,
    delta_hi: u64,
    budget: u32,
) -> Result<InclusionReport> {
    let mut report = InclusionReport { classes: ts.len(), ..Default::default() };
    let two = Rational::from_integer(BigInt::from(2));

    for t in ts {
        let p2 = classify(t, &SurfaceContext::Projective, budget)?;
        if p2.member.is_unknown() {
            report.undecided += 1;
        }
        let b1 = match t.beta_prime(1) {
            ExtendedExponent::Rational(x) => x,
            ExtendedExponent::Irrational(_) => {
                return Err(Error::Unsupported(
                    "inclusion scan covers classes with rational b'_1 only".into(),
                ))
            }
        };

        for d in delta_lo..=delta_hi {
            let sp = classify(t, &SurfaceContext::special(d), budget)?;
            if sp.member.is_unknown() {
                report.undecided += 1;
            }

            if d > 0 {
                report.checks += 1;
                if p2.member.is_true() && sp.member.is_false() {
                    report.violations.push(InclusionViolation {
                        class: t.clone(),
                        detail: format!("projective member missing from special delta={d}"),
                    });
                }
            } else {
                // part (b), both directions, at delta = 0
                report.checks += 1;
                if b1 <= two && p2.member.is_true() && sp.member.is_false() {
                    report.violations.push(InclusionViolation {
                        class: t.clone(),
                        detail: "b'_1 <= 2 projective member missing from special delta=0".into(),
                    });
                }
                if b1 >= two && sp.member.is_true() && p2.member.is_false() {
                    report.violations.push(InclusionViolation {
                        class: t.clone(),
                        detail: "b'_1 >= 2 special delta=0 member missing from projective".into(),
                    });
                }
            }

            if d >= 1 {
                let ns = classify(t, &SurfaceContext::non_special(d), budget)?;
                if ns.member.is_unknown() {
                    report.undecided += 1;
                }
                report.checks += 1;
                if ns.member.is_true() && p2.member.is_false() {
                    report.violations.push(InclusionViolation {
                        class: t.clone(),
                        detail: format!("non-special delta={d} member missing from projective"),
                    });
                }
            }
        }
    }
    Ok(report)
}
