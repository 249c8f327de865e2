//! Finite class grids for scans and property sweeps.

use crate::class::DiscreteClass;
use crate::error::Result;
use crate::numeric::{rat, CertifiedIrrational, ExtendedExponent};
use num_integer::Integer;

/// A finite family of discrete classes. Enumeration order is stable and
/// documented: genus ascending; interior exponent slots vary
/// lexicographically, each slot ordered by denominator then numerator; the
/// final slot runs through the integers 1..=max_numerator first, then the
/// listed irrational tails in order.
#[derive(Debug, Clone)]
pub struct GridSpec {
    pub max_g: usize,
    pub max_numerator: i64,
    pub max_denominator: i64,
    pub irrational_tails: Vec<CertifiedIrrational>,
}

impl GridSpec {
    /// Interior exponent candidates q/p > 1, non-integer, reduced.
    fn interior_exponents(&self) -> Vec<ExtendedExponent> {
        let mut out = Vec::new();
        for p in 2..=self.max_denominator {
            for q in (p + 1)..=self.max_numerator {
                if q.gcd(&p) == 1 {
                    out.push(ExtendedExponent::Rational(rat(q, p)));
                }
            }
        }
        out
    }

    fn final_exponents(&self) -> Vec<ExtendedExponent> {
        let mut out: Vec<ExtendedExponent> = (1..=self.max_numerator)
            .map(|m| ExtendedExponent::Rational(rat(m, 1)))
            .collect();
        out.extend(
            self.irrational_tails
                .iter()
                .map(|c| ExtendedExponent::from_constant(c.clone())),
        );
        out
    }

    /// Materializes every class on the grid.
    pub fn enumerate(&self) -> Result<Vec<DiscreteClass>> {
        let interiors = self.interior_exponents();
        let finals = self.final_exponents();
        let mut out = Vec::new();
        for g in 0..=self.max_g {
            // odometer over g interior slots
            let mut idx = vec![0usize; g];
            loop {
                for last in &finals {
                    let mut exps: Vec<ExtendedExponent> =
                        idx.iter().map(|&i| interiors[i].clone()).collect();
                    exps.push(last.clone());
                    out.push(DiscreteClass::new(g, exps)?);
                }
                // advance odometer (most significant slot first keeps the
                // leading exponent slowest, matching lexicographic order)
                let mut carry = true;
                for slot in (0..g).rev() {
                    if carry {
                        idx[slot] += 1;
                        if idx[slot] == interiors.len() {
                            idx[slot] = 0;
                        } else {
                            carry = false;
                        }
                    }
                }
                if carry {
                    break;
                }
            }
        }
        Ok(out)
    }
}
