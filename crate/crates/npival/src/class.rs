//! Discrete classes of plane valuations and their derived invariants.
//!
//! A discrete class is the tuple (g, b'_0 = 1, b'_1, ..., b'_{g+1}): the
//! interior exponents b'_1..b'_g are non-integer rationals > 1, and the last
//! exponent is either a positive integer (divisorial valuation) or an
//! irrational > 1 (irrational valuation). From a class we derive the gcd
//! ladder e_j, the quotients n_j, the normalized weights w_j and the maximal
//! contact values via the recursion
//!
//!   bbar_0 = e_0,   bbar_{j+1} = e_j (b'_{j+1} - 1) + n_j bbar_j.

use crate::error::{Error, Result, Violation};
use crate::numeric::{
    is_positive_integer, parse_extended, rational_from_int, ExtendedExponent,
    Rational,
};
use num_bigint::BigInt;
use num_traits::One;
use std::cmp::Ordering;

/// Budget used for the one-off certifications performed during validation.
const VALIDATION_BUDGET: u32 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValuationKind {
    Divisorial,
    Irrational,
}

impl std::fmt::Display for ValuationKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ValuationKind::Divisorial => write!(f, "divisorial"),
            ValuationKind::Irrational => write!(f, "irrational"),
        }
    }
}

/// A validated discrete class. `exponents` stores b'_1..b'_{g+1}; b'_0 = 1 is
/// implicit.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteClass {
    g: usize,
    exponents: Vec<ExtendedExponent>,
}

impl DiscreteClass {
    /// Checks the shape invariants and returns either the class or the full
    /// list of violated rules (position + rule).
    pub fn new(g: usize, exponents: Vec<ExtendedExponent>) -> Result<Self> {
        let mut violations = Vec::new();
        if exponents.len() != g + 1 {
            violations.push(Violation {
                position: 0,
                rule: format!("expected g+1 = {} exponents after b'_0, got {}", g + 1, exponents.len()),
            });
            return Err(Error::InvalidClass(violations));
        }
        let one = Rational::one();
        for (idx, e) in exponents.iter().enumerate() {
            let j = idx + 1;
            let last = j == g + 1;
            match e {
                ExtendedExponent::Rational(x) => {
                    if last {
                        if !is_positive_integer(x) {
                            violations.push(Violation {
                                position: j,
                                rule: format!("final exponent must be a positive integer or an irrational > 1, got {x}"),
                            });
                        }
                    } else {
                        if x.is_integer() {
                            violations.push(Violation {
                                position: j,
                                rule: format!("b'_{j} must be a non-integer rational, got {x}"),
                            });
                        }
                        if *x <= one {
                            violations.push(Violation {
                                position: j,
                                rule: format!("b'_{j} must exceed 1, got {x}"),
                            });
                        }
                    }
                }
                ExtendedExponent::Irrational(_) => {
                    if !last {
                        violations.push(Violation {
                            position: j,
                            rule: format!("b'_{j} must be rational for j <= g"),
                        });
                    } else {
                        match e.sub(&ExtendedExponent::Rational(one.clone())).sign(VALIDATION_BUDGET) {
                            Ok(Ordering::Greater) => {}
                            Ok(_) => violations.push(Violation {
                                position: j,
                                rule: "irrational final exponent must exceed 1".into(),
                            }),
                            Err(_) => violations.push(Violation {
                                position: j,
                                rule: "irrational final exponent could not be certified > 1".into(),
                            }),
                        }
                    }
                }
            }
        }
        if violations.is_empty() {
            Ok(DiscreteClass { g, exponents })
        } else {
            Err(Error::InvalidClass(violations))
        }
    }

    pub fn g(&self) -> usize {
        self.g
    }

    pub fn kind(&self) -> ValuationKind {
        match self.exponents.last().unwrap() {
            ExtendedExponent::Rational(_) => ValuationKind::Divisorial,
            ExtendedExponent::Irrational(_) => ValuationKind::Irrational,
        }
    }

    /// b'_j for 0 <= j <= g+1 (b'_0 = 1).
    pub fn beta_prime(&self, j: usize) -> ExtendedExponent {
        assert!(j <= self.g + 1, "exponent index out of range");
        if j == 0 {
            ExtendedExponent::Rational(Rational::one())
        } else {
            self.exponents[j - 1].clone()
        }
    }

    /// b'_j as a rational, for the positions where the class shape guarantees
    /// rationality (0 <= j <= g).
    pub fn beta_prime_rat(&self, j: usize) -> Rational {
        assert!(j <= self.g, "only b'_0..b'_g are guaranteed rational");
        match self.beta_prime(j) {
            ExtendedExponent::Rational(x) => x,
            ExtendedExponent::Irrational(_) => unreachable!("class shape guarantees rationality"),
        }
    }

    pub fn last(&self) -> &ExtendedExponent {
        self.exponents.last().unwrap()
    }

    pub fn exponents(&self) -> &[ExtendedExponent] {
        &self.exponents
    }

    /// Parses the inline syntax "g; b'_1, b'_2, ..., b'_{g+1}".
    pub fn parse(s: &str) -> Result<Self> {
        let mut parts = s.splitn(2, ';');
        let g_tok = parts
            .next()
            .ok_or_else(|| Error::Parse(format!("bad class token {s:?}")))?;
        let rest = parts
            .next()
            .ok_or_else(|| Error::Parse(format!("class {s:?} is missing ';'")))?;
        let g: usize = g_tok
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad genus {g_tok:?}")))?;
        let exponents = rest
            .split(',')
            .map(parse_extended)
            .collect::<Result<Vec<_>>>()?;
        DiscreteClass::new(g, exponents)
    }
}

impl std::fmt::Display for DiscreteClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let toks: Vec<String> = self.exponents.iter().map(|e| e.to_string()).collect();
        write!(f, "{}; {}", self.g, toks.join(", "))
    }
}

/// The derived invariants of a class: gcd ladder e_j, quotients n_j,
/// normalized weights w_j = e_j / e_0, and maximal contact values.
#[derive(Debug, Clone, PartialEq)]
pub struct ContactData {
    /// e_0..e_g; e_g = 1 and e_j = p_{j+1} ... p_g.
    pub e: Vec<BigInt>,
    /// n_0..n_g; n_0 = 1 and n_j = e_{j-1}/e_j.
    pub n: Vec<BigInt>,
    /// w_0..w_g with w_j = e_j/e_0.
    pub w: Vec<Rational>,
    /// bbar_0..bbar_g (always positive integers).
    pub beta_bar: Vec<BigInt>,
    /// bbar_{g+1}; irrational exactly when the class is irrational-kind.
    pub beta_bar_last: ExtendedExponent,
}

/// Runs the contact-value recursion link by link.
pub fn contact_data(t: &DiscreteClass) -> ContactData {
    let g = t.g();
    // e_g = 1, e_j = prod_{k=j+1..g} p_k
    let mut e = vec![BigInt::one(); g + 1];
    for j in (0..g).rev() {
        let p_next = t.beta_prime_rat(j + 1).denom().clone();
        e[j] = &e[j + 1] * p_next;
    }
    let mut n = vec![BigInt::one(); g + 1];
    for j in 1..=g {
        n[j] = &e[j - 1] / &e[j];
    }
    let e0 = rational_from_int(e[0].clone());
    let w: Vec<Rational> = e.iter().map(|ej| rational_from_int(ej.clone()) / &e0).collect();

    // bbar_0 = e_0; bbar_{j+1} = e_j (b'_{j+1} - 1) + n_j bbar_j
    let mut beta_bar = vec![e[0].clone()];
    for j in 0..g {
        let prev = rational_from_int(beta_bar[j].clone());
        let val = rational_from_int(e[j].clone()) * (t.beta_prime_rat(j + 1) - Rational::one())
            + rational_from_int(n[j].clone()) * prev;
        debug_assert!(val.is_integer(), "intermediate contact value must be integral");
        beta_bar.push(val.to_integer());
    }
    let beta_bar_last = t
        .beta_prime(g + 1)
        .add_rational(&-Rational::one())
        .mul_rational(&rational_from_int(e[g].clone()))
        .add_rational(&(rational_from_int(n[g].clone()) * rational_from_int(beta_bar[g].clone())));

    ContactData { e, n, w, beta_bar, beta_bar_last }
}

/// The last maximal contact value by its closed form
/// sum_{j=1..g} e_j^2 (b'_{j+1} - 1) + bbar_0 bbar_1 (empty sum when g = 0),
/// computed without running the full recursion.
pub fn last_contact_closed_form(t: &DiscreteClass) -> ExtendedExponent {
    let g = t.g();
    let mut e = vec![BigInt::one(); g + 1];
    for j in (0..g).rev() {
        let p_next = t.beta_prime_rat(j + 1).denom().clone();
        e[j] = &e[j + 1] * p_next;
    }
    let e0 = rational_from_int(e[0].clone());

    // bbar_0 bbar_1 = e_0 * (e_0 b'_1); for g = 0 the first exponent may be
    // the irrational last one.
    let product = t
        .beta_prime(1)
        .mul_rational(&(&e0 * &e0));

    let mut acc = product;
    for j in 1..=g {
        let ej = rational_from_int(e[j].clone());
        let term = t
            .beta_prime(j + 1)
            .add_rational(&-Rational::one())
            .mul_rational(&(&ej * &ej));
        acc = acc.add(&term);
    }
    acc
}

/// bbar_{g+1} / bbar_0^2, computed in the normalized form
/// sum_{j=1..g} w_j^2 (b'_{j+1} - 1) + b'_1.
pub fn normalized_ratio(t: &DiscreteClass) -> ExtendedExponent {
    let data = contact_data(t);
    let mut acc = t.beta_prime(1);
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
