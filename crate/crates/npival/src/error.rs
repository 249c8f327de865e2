use crate::numeric::Rational;
use thiserror::Error;

/// A single broken rule found while validating a discrete class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    /// Index of the offending exponent (1-based; 0 refers to the tuple shape).
    pub position: usize,
    pub rule: String,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "position {}: {}", self.position, self.rule)
    }
}

fn join_violations(vs: &[Violation]) -> String {
    vs.iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid discrete class: {}", join_violations(.0))]
    InvalidClass(Vec<Violation>),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("parse error: {0}")]
    Parse(String),

    /// A certified comparison ran out of refinement budget.
    #[error("undecidable within budget (final enclosure width {width})")]
    Undecidable { width: Rational },

    /// A continued-fraction digit of an irrational could not be certified.
    #[error("continued-fraction digit {index} could not be certified within budget")]
    UndecidableDigit { index: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    /// The generator input fails the strict extensibility inequality.
    #[error("not extensible: {lhs} is not strictly greater than {rhs} (deficit {deficit})")]
    NotExtensible {
        lhs: Rational,
        rhs: Rational,
        deficit: Rational,
    },

    /// A requested generator choice falls outside the admissible interval.
    #[error("choice rejected: {0}")]
    ChoiceRejected(String),

    /// An internal consistency check failed while building a dual graph.
    /// The builder aborts rather than emit a wrong graph.
    #[error("dual graph invariant breached: {0}")]
    GraphInvariant(String),

    #[error("graph too large: {0} vertices exceeds the construction limit")]
    GraphTooLarge(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
