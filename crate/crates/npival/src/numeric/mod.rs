//! Exact numeric substrate: arbitrary-precision rationals, finite continued
//! fractions, and certified irrational enclosures with three-valued
//! comparison.

mod certified;
mod cf;
mod extended;
mod rational;

pub use certified::{parse_constant, CertifiedIrrational};
pub use cf::{cf_eval, cf_expand, eval_digit_prefix, CFDigits};
pub use extended::{ext_compare, parse_extended, ExtCompare, ExtendedExponent, IrrationalExpr, TriBool};
pub use rational::{
    approx_f64, ceil_int, floor_int, is_positive_integer, parse_rational, rat, rational_from_int,
    Rational,
};
