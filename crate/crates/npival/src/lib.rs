//! Exact arithmetic for plane valuations.
//!
//! A divisorial or irrational plane valuation is represented by its discrete
//! class: the tuple (g, 1, b'_1, ..., b'_{g+1}) of Puiseux exponents read off
//! its resolution dual graph. This crate decides non-positive-at-infinity
//! (NPI) membership of a class over the projective plane and over Hirzebruch
//! surfaces (special and non-special), constructs the labelled dual graph,
//! and generates new NPI classes by extending a given one.
//!
//! Everything is computed in exact arithmetic: arbitrary-precision rationals
//! throughout, and certified rational enclosures for the irrational constants
//! that may appear as a final exponent. Decimal output exists only as a
//! clearly marked approximation in human-readable rendering.

pub mod class;
pub mod error;
pub mod generate;
pub mod graph;
pub mod grid;
pub mod npi;
pub mod numeric;

pub use class::{contact_data, last_contact_closed_form, normalized_ratio, ContactData, DiscreteClass, ValuationKind};
pub use error::{Error, Result, Violation};
pub use generate::{chain, check_input, output1, output1_stream, output2_integer, output2_integer_bound, output2_irrational, ChainOutcome, ChainStep, ChoiceStrategy, ExtensionBudgetLine, TailBound};
pub use graph::{build, build_with_stats, BuildStats, DualGraph, RenderFormat};
pub use grid::GridSpec;
pub use npi::{check_inclusions, classify, classify_dual_form, nonspecial_max_delta, q_value, rhs_sum, special_min_delta, InclusionReport, SurfaceContext, Verdict};
pub use numeric::{cf_eval, cf_expand, ext_compare, CFDigits, CertifiedIrrational, ExtendedExponent, Rational, TriBool};

/// Default refinement budget for certified comparisons.
pub const DEFAULT_BUDGET: u32 = 256;
