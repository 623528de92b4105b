//! Ordinal notations below epsilon-zero in Cantor normal form.
//!
//! An [`Ordinal`] is a finite sum `w^e0*k0 + w^e1*k1 + ...` with strictly
//! decreasing exponents (themselves notations) and positive coefficients.
//! Notations are validated on construction, so comparison and addition can
//! assume the normal form.

mod index;
mod parse;

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use thiserror::Error;

pub use index::{nat_index, notation_size, unindex, weight_counts};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrdinalError {
    #[error("exponents must be strictly decreasing (term {position})")]
    NotDecreasing { position: usize },
    #[error("coefficient of term {position} is zero")]
    ZeroCoefficient { position: usize },
    #[error("the zero ordinal has no leading term")]
    Zero,
    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },
}

/// One summand `w^exponent * coefficient` of a normal form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Term {
    pub exponent: Ordinal,
    pub coefficient: BigUint,
}

/// A Cantor normal form notation. The empty sum is zero.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Ordinal {
    terms: Vec<Term>,
}

impl Ordinal {
    pub fn zero() -> Self {
        Ordinal { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::nat(1u32)
    }

    pub fn nat(n: impl Into<BigUint>) -> Self {
        let n = n.into();
        if n.is_zero() {
            return Self::zero();
        }
        Ordinal {
            terms: vec![Term {
                exponent: Self::zero(),
                coefficient: n,
            }],
        }
    }

    pub fn omega() -> Self {
        Self::omega_pow(Self::one())
    }

    /// `w^exponent`.
    pub fn omega_pow(exponent: Ordinal) -> Self {
        Self::monomial(exponent, BigUint::one())
    }

    /// `w^exponent * coefficient`; a zero coefficient gives zero.
    pub fn monomial(exponent: Ordinal, coefficient: impl Into<BigUint>) -> Self {
        let coefficient = coefficient.into();
        if coefficient.is_zero() {
            return Self::zero();
        }
        Ordinal {
            terms: vec![Term {
                exponent,
                coefficient,
            }],
        }
    }

    /// Builds a notation from `(exponent, coefficient)` pairs listed from the
    /// largest exponent down.
    pub fn from_terms<I, C>(terms: I) -> Result<Self, OrdinalError>
    where
        I: IntoIterator<Item = (Ordinal, C)>,
        C: Into<BigUint>,
    {
        let terms: Vec<Term> = terms
            .into_iter()
            .map(|(exponent, c)| Term {
                exponent,
                coefficient: c.into(),
            })
            .collect();
        for (position, term) in terms.iter().enumerate() {
            if term.coefficient.is_zero() {
                return Err(OrdinalError::ZeroCoefficient { position });
            }
            if position > 0 && terms[position - 1].exponent <= term.exponent {
                return Err(OrdinalError::NotDecreasing { position });
            }
        }
        Ok(Ordinal { terms })
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// True for zero and for single-term notations with exponent zero.
    pub fn is_finite(&self) -> bool {
        match self.terms.as_slice() {
            [] => true,
            [t] => t.exponent.is_zero(),
            _ => false,
        }
    }

    /// The natural number denoted, if finite.
    pub fn as_nat(&self) -> Option<BigUint> {
        match self.terms.as_slice() {
            [] => Some(BigUint::zero()),
            [t] if t.exponent.is_zero() => Some(t.coefficient.clone()),
            _ => None,
        }
    }

    pub fn leading_term(&self) -> Option<&Term> {
        self.terms.first()
    }

    /// Collapses a nonzero notation to its leading term `w^e0 * k0`: summing
    /// the terms in increasing order absorbs everything but the largest.
    pub fn reverse(&self) -> Result<Ordinal, OrdinalError> {
        let lead = self.terms.first().ok_or(OrdinalError::Zero)?;
        Ok(Ordinal {
            terms: vec![lead.clone()],
        })
    }

    /// Ordinal sum. Terms of `self` below the leading exponent of `rhs` are
    /// absorbed; an equal exponent merges coefficients.
    pub fn add(&self, rhs: &Ordinal) -> Ordinal {
        let Some(lead) = rhs.terms.first() else {
            return self.clone();
        };
        let mut terms: Vec<Term> = self
            .terms
            .iter()
            .take_while(|t| t.exponent > lead.exponent)
            .cloned()
            .collect();
        let mut rest = rhs.terms.iter();
        if let Some(same) = self.terms.iter().find(|t| t.exponent == lead.exponent) {
            terms.push(Term {
                exponent: lead.exponent.clone(),
                coefficient: &same.coefficient + &lead.coefficient,
            });
            rest.next();
        }
        terms.extend(rest.cloned());
        Ordinal { terms }
    }
}

impl Ord for Ordinal {
    fn cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.terms.iter().zip(&other.terms) {
            let ord = a
                .exponent
                .cmp(&b.exponent)
                .then_with(|| a.coefficient.cmp(&b.coefficient));
            if ord != Ordering::Equal {
                return ord;
            }
        }
        self.terms.len().cmp(&other.terms.len())
    }
}

impl PartialOrd for Ordinal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for &Ordinal {
    type Output = Ordinal;

    fn add(self, rhs: &Ordinal) -> Ordinal {
        Ordinal::add(self, rhs)
    }
}

impl From<u64> for Ordinal {
    fn from(n: u64) -> Self {
        Ordinal::nat(n)
    }
}

impl FromStr for Ordinal {
    type Err = OrdinalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse::parse(s)
    }
}

// Exponents that print as a single token need no parentheses.
fn is_atomic(o: &Ordinal) -> bool {
    match o.terms.as_slice() {
        [] => true,
        [t] => t.exponent.is_zero() || (t.coefficient.is_one() && is_atomic(&t.exponent)),
        _ => false,
    }
}

impl fmt::Display for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, term) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if term.exponent.is_zero() {
                write!(f, "{}", term.coefficient)?;
                continue;
            }
            write!(f, "w")?;
            if term.exponent != Ordinal::one() {
                if is_atomic(&term.exponent) {
                    write!(f, "^{}", term.exponent)?;
                } else {
                    write!(f, "^({})", term.exponent)?;
                }
            }
            if !term.coefficient.is_one() {
                write!(f, "*{}", term.coefficient)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ordinal({self})")
    }
}
