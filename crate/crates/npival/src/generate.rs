//! Generation of new NPI discrete classes from a given one.
//!
//! The input is a divisorial class ending in exponent 1 that satisfies the
//! strict membership inequality (strictness buys room to append exponents).
//! Three outputs are available, all staying in the same NPI set as the input:
//!
//!   * a rational exponent q/p with p >= 2 slotted before a new trailing 1
//!     (genus grows by one), admissible exactly when 1 < q/p <= B where
//!     B = (q(t) - sum_{j<g} w_j^2 (b'_{j+1}-1)) / w_g^2 + 1;
//!   * an irrational exponent in the same interval (1, B], replacing the
//!     trailing 1 and producing an irrational class of the same genus;
//!   * on a class produced by the first output, an integer tail m >= 2
//!     replacing its trailing 1, admissible when m - 1 <= C with
//!     C = (q(t1) - sum_{j<=G-1} w_j^2 (b'_{j+1}-1)) / w_G^2 = B(t1) - 1.
//!
//! Choices are explicit strategy values; nothing is randomized.

use crate::class::{contact_data, DiscreteClass, ValuationKind};
use crate::error::{Error, Result};
use crate::npi::{classify, q_value, rhs_sum, SurfaceContext};
use crate::numeric::{
    floor_int, parse_constant, parse_rational, rational_from_int, CertifiedIrrational,
    ExtendedExponent, Rational,
};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed};

/// The admissible interval (1, B] for a new exponent, from the input's
/// membership margin.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtensionBudgetLine {
    pub bound: Rational,
}

/// Admissible integer tails for a class produced by `output1`: any m with
/// 2 <= m <= max_tail, where max_tail = floor(C) + 1.
#[derive(Debug, Clone, PartialEq)]
pub struct TailBound {
    pub c_bound: Rational,
    pub max_tail: BigInt,
}

/// How the free choice in each generation step is made.
#[derive(Debug, Clone, PartialEq)]
pub enum ChoiceStrategy {
    /// All admissible fractions ordered by denominator, then numerator;
    /// `max_denominator` bounds the sweep (None = unbounded stream).
    EnumerateByDenominator { max_denominator: Option<u64> },
    /// One specific rational exponent.
    Single(Rational),
    /// One specific irrational constant.
    Irrational(CertifiedIrrational),
    /// The largest admissible integer tail.
    MaxIntegerTail,
}

impl ChoiceStrategy {
    /// Tokens: "single:8/3", "denom", "denom:3", "irrational:pi", "max-tail".
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "max-tail" {
            return Ok(ChoiceStrategy::MaxIntegerTail);
        }
        if s == "denom" {
            return Ok(ChoiceStrategy::EnumerateByDenominator { max_denominator: None });
        }
        if let Some(rest) = s.strip_prefix("denom:") {
            let d: u64 = rest
                .parse()
                .map_err(|_| Error::Parse(format!("bad denominator limit {rest:?}")))?;
            if d < 2 {
                return Err(Error::Parse("denominator limit must be at least 2".into()));
            }
            return Ok(ChoiceStrategy::EnumerateByDenominator { max_denominator: Some(d) });
        }
        if let Some(rest) = s.strip_prefix("single:") {
            return Ok(ChoiceStrategy::Single(parse_rational(rest)?));
        }
        if let Some(rest) = s.strip_prefix("irrational:") {
            return Ok(ChoiceStrategy::Irrational(parse_constant(rest)?));
        }
        Err(Error::Parse(format!("unknown strategy {s:?}")))
    }
}

impl std::fmt::Display for ChoiceStrategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ChoiceStrategy::EnumerateByDenominator { max_denominator: None } => write!(f, "denom"),
            ChoiceStrategy::EnumerateByDenominator { max_denominator: Some(d) } => {
                write!(f, "denom:{d}")
            }
            ChoiceStrategy::Single(x) => write!(f, "single:{x}"),
            ChoiceStrategy::Irrational(c) => write!(f, "irrational:{c}"),
            ChoiceStrategy::MaxIntegerTail => write!(f, "max-tail"),
        }
    }
}

/// Requires a divisorial class whose final exponent is 1 — the shape the
/// algorithm extends. A genus-0 class (0, 1, m) is accepted with any positive
/// integer m; its single exponent plays the final-exponent role.
fn require_input_shape(t: &DiscreteClass) -> Result<()> {
    if t.kind() != ValuationKind::Divisorial {
        return Err(Error::Unsupported("generator inputs must be divisorial".into()));
    }
    if t.g() >= 1 {
        let last = t.last().as_rational().expect("divisorial");
        if *last != Rational::one() {
            return Err(Error::Unsupported(format!(
                "generator inputs must end in exponent 1, got {last}"
            )));
        }
    }
    Ok(())
}

/// Verifies the strict input inequality and returns the budget B of the
/// admissible interval (1, B]. The strict check is exactly
/// classify(t, ctx).strict: the input sum runs over j <= g-1 only, and the
/// j = g term vanishes because the final exponent is 1.
pub fn check_input(t: &DiscreteClass, ctx: &SurfaceContext) -> Result<ExtensionBudgetLine> {
    require_input_shape(t)?;
    let q = q_value(t, ctx)?;
    let rhs = match rhs_sum(t) {
        ExtendedExponent::Rational(x) => x,
        ExtendedExponent::Irrational(_) => unreachable!("divisorial classes have rational sums"),
    };
    if q <= rhs {
        return Err(Error::NotExtensible {
            lhs: q.clone(),
            rhs: rhs.clone(),
            deficit: &rhs - &q,
        });
    }
    let data = contact_data(t);
    let wg = &data.w[t.g()];
    let bound = (&q - &rhs) / (wg * wg) + Rational::one();
    Ok(ExtensionBudgetLine { bound })
}

/// The class (g+1, 1, b'_1, ..., b'_g, x, 1) obtained by slotting a new
/// exponent before a fresh trailing 1. For genus-0 inputs the new exponent
/// replaces the single integer exponent.
fn extended_class(t: &DiscreteClass, x: Rational) -> Result<DiscreteClass> {
    let mut exps: Vec<ExtendedExponent> = t.exponents()[..t.g()].to_vec();
    exps.push(ExtendedExponent::Rational(x));
    exps.push(ExtendedExponent::Rational(Rational::one()));
    DiscreteClass::new(t.g() + 1, exps)
}

fn admit_rational(x: &Rational, budget_line: &ExtensionBudgetLine) -> Result<()> {
    if x.is_integer() {
        return Err(Error::ChoiceRejected(format!(
            "{x} has denominator 1; the new exponent must be a non-integer rational"
        )));
    }
    if *x <= Rational::one() {
        return Err(Error::ChoiceRejected(format!("{x} is not greater than 1")));
    }
    if *x > budget_line.bound {
        return Err(Error::ChoiceRejected(format!(
            "{x} exceeds the admissible bound {}",
            budget_line.bound
        )));
    }
    Ok(())
}

/// Lazy stream of admissible fractions in (denominator, numerator) order.
pub struct RationalChoices {
    bound: Rational,
    max_denominator: Option<BigInt>,
    p: BigInt,
    q: BigInt,
}

impl RationalChoices {
    fn new(bound: Rational, max_denominator: Option<u64>) -> Self {
        let p = BigInt::from(2);
        let q = BigInt::from(3);
        RationalChoices {
            bound,
            max_denominator: max_denominator.map(BigInt::from),
            p,
            q,
        }
    }
}

impl Iterator for RationalChoices {
    type Item = Rational;

    fn next(&mut self) -> Option<Rational> {
        loop {
            if let Some(max_p) = &self.max_denominator {
                if &self.p > max_p {
                    return None;
                }
            }
            let candidate = Rational::new(self.q.clone(), self.p.clone());
            if candidate > self.bound {
                self.p += BigInt::one();
                self.q = &self.p + BigInt::one();
                continue;
            }
            let coprime = self.q.gcd(&self.p).is_one();
            self.q += BigInt::one();
            if coprime {
                return Some(candidate);
            }
        }
    }
}

/// Classes reachable by one rational extension step. `Single` yields exactly
/// one class or a rejection; enumeration yields admissible classes ordered by
/// denominator then numerator. Every emitted class is re-verified NPI in the
/// input context (for genus-0 non-special inputs the interval (1, B] alone
/// does not guarantee membership, so inadmissible candidates are filtered).
pub fn output1(
    t: &DiscreteClass,
    ctx: &SurfaceContext,
    strategy: &ChoiceStrategy,
    budget: u32,
) -> Result<Vec<DiscreteClass>> {
    output1_stream(t, ctx, strategy, budget, usize::MAX)
}

/// As `output1`, but keeps at most `limit` emissions from an enumeration.
pub fn output1_stream(
    t: &DiscreteClass,
    ctx: &SurfaceContext,
    strategy: &ChoiceStrategy,
    budget: u32,
    limit: usize,
) -> Result<Vec<DiscreteClass>> {
    let line = check_input(t, ctx)?;
    match strategy {
        ChoiceStrategy::Single(x) => {
            admit_rational(x, &line)?;
            let class = extended_class(t, x.clone())?;
            let verdict = classify(&class, ctx, budget)?;
            if !verdict.member.is_true() {
                return Err(Error::ChoiceRejected(format!(
                    "{x} satisfies the budget but {class} is not NPI in {ctx}"
                )));
            }
            Ok(vec![class])
        }
        ChoiceStrategy::EnumerateByDenominator { max_denominator } => {
            let mut out = Vec::new();
            for x in RationalChoices::new(line.bound.clone(), *max_denominator) {
                if out.len() >= limit {
                    break;
                }
                let class = extended_class(t, x)?;
                let verdict = classify(&class, ctx, budget)?;
                if verdict.member.is_true() {
                    out.push(class);
                }
            }
            Ok(out)
        }
        other => Err(Error::ChoiceRejected(format!(
            "strategy {other} does not produce rational extensions"
        ))),
    }
}

/// The irrational variant of the extension: the trailing 1 is replaced by a
/// certified irrational in (1, B], keeping the genus.
pub fn output2_irrational(
    t: &DiscreteClass,
    ctx: &SurfaceContext,
    constant: &CertifiedIrrational,
    budget: u32,
) -> Result<DiscreteClass> {
    let line = check_input(t, ctx)?;
    if t.g() == 0 {
        return Err(Error::Unsupported(
            "irrational extensions of (0, 1, m) produce classes the membership test does not cover"
                .into(),
        ));
    }
    let alpha = ExtendedExponent::from_constant(constant.clone());
    // 1 < alpha <= B, both certified (equality with a rational is impossible)
    match alpha.sub(&ExtendedExponent::Rational(Rational::one())).sign(budget) {
        Ok(std::cmp::Ordering::Greater) => {}
        Ok(_) => {
            return Err(Error::ChoiceRejected(format!("{constant} is not greater than 1")));
        }
        Err(e) => return Err(e),
    }
    match alpha.sub(&ExtendedExponent::Rational(line.bound.clone())).sign(budget) {
        Ok(std::cmp::Ordering::Less) => {}
        Ok(_) => {
            return Err(Error::ChoiceRejected(format!(
                "{constant} exceeds the admissible bound {}",
                line.bound
            )));
        }
        Err(e) => return Err(e),
    }

    let mut exps: Vec<ExtendedExponent> = t.exponents()[..t.g()].to_vec();
    exps.push(alpha);
    let class = DiscreteClass::new(t.g(), exps)?;
    let verdict = classify(&class, ctx, budget)?;
    if !verdict.member.is_true() {
        return Err(Error::ChoiceRejected(format!(
            "{constant} satisfies the budget but {class} is not NPI in {ctx}"
        )));
    }
    Ok(class)
}

/// Admissible integer tails for a class produced by `output1`: computes
/// C = (q(t1) - sum_{j=1..G-1} w_j^2 (b'_{j+1} - 1)) / w_G^2 and the maximal
/// tail floor(C) + 1. q is unchanged from the original input because b'_1 is.
pub fn output2_integer_bound(t1: &DiscreteClass, ctx: &SurfaceContext) -> Result<TailBound> {
    require_input_shape(t1)?;
    if t1.g() == 0 {
        return Err(Error::Unsupported(
            "integer tails apply to classes of genus at least 1".into(),
        ));
    }
    let q = q_value(t1, ctx)?;
    let rhs = match rhs_sum(t1) {
        ExtendedExponent::Rational(x) => x,
        ExtendedExponent::Irrational(_) => unreachable!("divisorial"),
    };
    let data = contact_data(t1);
    let wg = &data.w[t1.g()];
    let c_bound = (&q - &rhs) / (wg * wg);
    if c_bound.is_negative() {
        return Err(Error::NotExtensible {
            lhs: q.clone(),
            rhs: rhs.clone(),
            deficit: &rhs - &q,
        });
    }
    let max_tail = floor_int(&c_bound) + BigInt::one();
    Ok(TailBound { c_bound, max_tail })
}

/// Replaces the trailing 1 of an `output1` class by a requested integer tail
/// m with 2 <= m <= floor(C) + 1.
pub fn output2_integer(
    t1: &DiscreteClass,
    ctx: &SurfaceContext,
    requested: &BigInt,
    budget: u32,
) -> Result<DiscreteClass> {
    let bound = output2_integer_bound(t1, ctx)?;
    if bound.max_tail < BigInt::from(2) {
        return Err(Error::ChoiceRejected(format!(
            "only the trivial tail exists (C = {})",
            bound.c_bound
        )));
    }
    if *requested < BigInt::from(2) || *requested > bound.max_tail {
        return Err(Error::ChoiceRejected(format!(
            "tail {requested} is outside [2, {}] (C = {})",
            bound.max_tail, bound.c_bound
        )));
    }
    let mut exps: Vec<ExtendedExponent> = t1.exponents()[..t1.g()].to_vec();
    exps.push(ExtendedExponent::Rational(rational_from_int(requested.clone())));
    let class = DiscreteClass::new(t1.g(), exps)?;
    let verdict = classify(&class, ctx, budget)?;
    if !verdict.member.is_true() {
        return Err(Error::ChoiceRejected(format!(
            "tail {requested} satisfies the bound but {class} is not NPI in {ctx}"
        )));
    }
    Ok(class)
}

/// One executed step of a generation chain.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainStep {
    pub input: DiscreteClass,
    pub context: SurfaceContext,
    /// The exact budget: B for rational/irrational extensions, C for tails.
    pub bound: Rational,
    pub bound_is_tail: bool,
    pub chosen: ExtendedExponent,
    pub result: DiscreteClass,
}

/// A chain run: the executed steps, plus the error that stopped it early (if
/// any). An empty trace with a NotExtensible stop means the seed itself
/// failed the strict input inequality.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainOutcome {
    pub steps: Vec<ChainStep>,
    pub stopped: Option<Error>,
}

impl ChainOutcome {
    pub fn final_class(&self) -> Option<&DiscreteClass> {
        self.steps.last().map(|s| &s.result)
    }
}

/// Folds extension steps over a seed, re-running the input check between
/// steps. Rational strategies continue the chain; an irrational constant or a
/// maximal integer tail ends it (the resulting classes have no trailing 1 to
/// extend), so they are only allowed as the last script entry.
pub fn chain(
    seed: &DiscreteClass,
    ctx: &SurfaceContext,
    script: &[ChoiceStrategy],
    budget: u32,
) -> Result<ChainOutcome> {
    for (i, s) in script.iter().enumerate() {
        let terminal = matches!(s, ChoiceStrategy::Irrational(_) | ChoiceStrategy::MaxIntegerTail);
        if terminal && i + 1 != script.len() {
            return Err(Error::Unsupported(format!(
                "strategy {s} ends a chain and must be its last entry"
            )));
        }
    }

    let mut steps = Vec::new();
    let mut current = seed.clone();
    for strategy in script {
        let line = match check_input(&current, ctx) {
            Ok(line) => line,
            Err(e) => return Ok(ChainOutcome { steps, stopped: Some(e) }),
        };
        let step = match strategy {
            ChoiceStrategy::Single(_) | ChoiceStrategy::EnumerateByDenominator { .. } => {
                let produced = match output1_stream(&current, ctx, strategy, budget, 1) {
                    Ok(list) => list,
                    Err(e) => return Ok(ChainOutcome { steps, stopped: Some(e) }),
                };
                let Some(result) = produced.into_iter().next() else {
                    return Ok(ChainOutcome {
                        steps,
                        stopped: Some(Error::ChoiceRejected(
                            "enumeration produced no admissible exponent".into(),
                        )),
                    });
                };
                ChainStep {
                    input: current.clone(),
                    context: ctx.clone(),
                    bound: line.bound.clone(),
                    bound_is_tail: false,
                    chosen: result.beta_prime(result.g()),
                    result,
                }
            }
            ChoiceStrategy::Irrational(c) => {
                let result = match output2_irrational(&current, ctx, c, budget) {
                    Ok(r) => r,
                    Err(e) => return Ok(ChainOutcome { steps, stopped: Some(e) }),
                };
                ChainStep {
                    input: current.clone(),
                    context: ctx.clone(),
                    bound: line.bound.clone(),
                    bound_is_tail: false,
                    chosen: result.last().clone(),
                    result,
                }
            }
            ChoiceStrategy::MaxIntegerTail => {
                let bound = match output2_integer_bound(&current, ctx) {
                    Ok(b) => b,
                    Err(e) => return Ok(ChainOutcome { steps, stopped: Some(e) }),
                };
                if bound.max_tail < BigInt::from(2) {
                    return Ok(ChainOutcome {
                        steps,
                        stopped: Some(Error::ChoiceRejected(format!(
                            "only the trivial tail exists (C = {})",
                            bound.c_bound
                        ))),
                    });
                }
                let result = match output2_integer(&current, ctx, &bound.max_tail, budget) {
                    Ok(r) => r,
                    Err(e) => return Ok(ChainOutcome { steps, stopped: Some(e) }),
                };
                ChainStep {
                    input: current.clone(),
                    context: ctx.clone(),
                    bound: bound.c_bound.clone(),
                    bound_is_tail: true,
                    chosen: result.last().clone(),
                    result,
                }
            }
        };
        current = step.result.clone();
        steps.push(step);
    }
    Ok(ChainOutcome { steps, stopped: None })
}
