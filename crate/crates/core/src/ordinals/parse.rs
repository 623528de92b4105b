//! Text syntax: `0`, `5`, `w`, `w^2*3 + w + 4`, `w^(w+1)`, `w^w^2`.
//! `ω` is accepted for `w`. Exponents bind tighter than `*`, and a chain of
//! `^` associates to the right.

use num_bigint::BigUint;
use num_traits::Zero;

use super::{Ordinal, OrdinalError, Term};

pub(super) fn parse(src: &str) -> Result<Ordinal, OrdinalError> {
    let mut p = Parser { src, pos: 0 };
    let value = p.sum()?;
    p.skip_ws();
    if p.pos < src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(value)
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> OrdinalError {
        OrdinalError::Parse {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        let rest = &self.src[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn eat_omega(&mut self) -> bool {
        self.eat('w') || self.eat('ω')
    }

    fn nat(&mut self) -> Result<BigUint, OrdinalError> {
        self.skip_ws();
        let digits: &str = {
            let rest = &self.src[self.pos..];
            let end = rest
                .find(|c: char| !c.is_ascii_digit())
                .unwrap_or(rest.len());
            &rest[..end]
        };
        if digits.is_empty() {
            return Err(self.error("expected a natural number"));
        }
        self.pos += digits.len();
        Ok(digits.parse().expect("ascii digits"))
    }

    fn sum(&mut self) -> Result<Ordinal, OrdinalError> {
        let start = self.pos;
        let mut terms: Vec<Term> = Vec::new();
        loop {
            self.skip_ws();
            let at = self.pos;
            match self.term()? {
                Some(t) => {
                    if let Some(prev) = terms.last() {
                        if prev.exponent <= t.exponent {
                            self.pos = at;
                            return Err(self.error("exponents must be strictly decreasing"));
                        }
                    }
                    terms.push(t);
                }
                None => {
                    // A bare `0` is only allowed as the whole sum.
                    let lone = terms.is_empty() && !matches!(self.peek(), Some('+'));
                    if !lone {
                        self.pos = at;
                        return Err(self.error("zero term inside a sum"));
                    }
                }
            }
            if !self.eat('+') {
                break;
            }
            if terms.is_empty() {
                self.pos = start;
                return Err(self.error("zero term inside a sum"));
            }
        }
        Ok(Ordinal { terms })
    }

    /// One summand; `None` for a literal zero.
    fn term(&mut self) -> Result<Option<Term>, OrdinalError> {
        if self.eat_omega() {
            let exponent = if self.eat('^') {
                self.exponent()?
            } else {
                Ordinal::one()
            };
            let coefficient = if self.eat('*') {
                let at = self.pos;
                let k = self.nat()?;
                if k.is_zero() {
                    self.pos = at;
                    return Err(self.error("zero coefficient"));
                }
                k
            } else {
                BigUint::from(1u32)
            };
            return Ok(Some(Term {
                exponent,
                coefficient,
            }));
        }
        let k = self.nat()?;
        Ok((!k.is_zero()).then(|| Term {
            exponent: Ordinal::zero(),
            coefficient: k,
        }))
    }

    fn exponent(&mut self) -> Result<Ordinal, OrdinalError> {
        if self.eat('(') {
            let inner = self.sum()?;
            if !self.eat(')') {
                return Err(self.error("expected ')'"));
            }
            return Ok(inner);
        }
        if self.eat_omega() {
            let e = if self.eat('^') {
                self.exponent()?
            } else {
                Ordinal::one()
            };
            return Ok(Ordinal::omega_pow(e));
        }
        Ok(Ordinal::nat(self.nat()?))
    }
}
