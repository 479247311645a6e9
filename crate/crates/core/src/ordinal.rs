//! Ordinals below epsilon-zero in Cantor normal form.
//!
//! An [`Ordinal`] is a finite sum `w^e1*c1 + w^e2*c2 + ...` with strictly
//! decreasing exponents (themselves ordinals) and positive coefficients.
//! Because the representation is canonical, structural equality is ordinal
//! equality and the derived `Hash` is consistent with it.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
struct Term {
    exp: Ordinal,
    coeff: BigUint,
}

/// An ordinal in Cantor normal form.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Ordinal {
    terms: Vec<Term>,
}

/// Zero, successor or limit.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum OrdinalKind {
    Zero,
    Successor(Ordinal),
    Limit,
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum ParseOrdinalError {
    #[error("empty ordinal expression")]
    Empty,
    #[error("unexpected character {found:?} at offset {offset}")]
    Unexpected { offset: usize, found: char },
    #[error("unexpected end of input after offset {0}")]
    UnexpectedEnd(usize),
    #[error("coefficient must be positive at offset {0}")]
    ZeroCoefficient(usize),
}

impl Ordinal {
    pub fn zero() -> Self {
        Ordinal { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::from_u64(1)
    }

    pub fn from_u64(n: u64) -> Self {
        Self::finite(BigUint::from(n))
    }

    pub fn finite(n: BigUint) -> Self {
        if n.is_zero() {
            return Self::zero();
        }
        Ordinal {
            terms: vec![Term {
                exp: Ordinal::zero(),
                coeff: n,
            }],
        }
    }

    pub fn omega() -> Self {
        Self::omega_pow(Ordinal::one())
    }

    /// `w^exp`.
    pub fn omega_pow(exp: Ordinal) -> Self {
        Ordinal {
            terms: vec![Term {
                exp,
                coeff: BigUint::one(),
            }],
        }
    }

    /// `w^k` for a finite exponent.
    pub fn omega_pow_n(k: u64) -> Self {
        Self::omega_pow(Ordinal::from_u64(k))
    }

    /// `w^exp * coeff`; zero when `coeff` is zero.
    pub fn monomial(exp: Ordinal, coeff: BigUint) -> Self {
        if coeff.is_zero() {
            return Self::zero();
        }
        Ordinal {
            terms: vec![Term { exp, coeff }],
        }
    }

    /// Builds an ordinal from `(exponent, coefficient)` pairs, which may be in
    /// any order; the result is the ordinal sum taken left to right.
    pub fn from_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = (Ordinal, BigUint)>,
    {
        terms.into_iter().fold(Ordinal::zero(), |acc, (e, c)| {
            acc.add(&Ordinal::monomial(e, c))
        })
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The value as a natural number, if finite.
    pub fn as_finite(&self) -> Option<&BigUint> {
        match self.terms.as_slice() {
            [] => None,
            [t] if t.exp.is_zero() => Some(&t.coeff),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.is_zero() || self.as_finite().is_some()
    }

    /// The value as a `u64`, if finite and small enough.
    pub fn to_u64(&self) -> Option<u64> {
        if self.is_zero() {
            return Some(0);
        }
        self.as_finite().and_then(|n| n.to_u64())
    }

    /// Exponent of the leading term (`None` for zero).
    pub fn leading_exponent(&self) -> Option<&Ordinal> {
        self.terms.first().map(|t| &t.exp)
    }

    /// Iterates `(exponent, coefficient)` pairs in decreasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (&Ordinal, &BigUint)> {
        self.terms.iter().map(|t| (&t.exp, &t.coeff))
    }

    /// True iff every exponent, recursively, is finite, i.e. the ordinal is
    /// below `w^w`.
    pub fn below_omega_omega(&self) -> bool {
        self.terms.iter().all(|t| t.exp.is_finite())
    }

    pub fn kind(&self) -> OrdinalKind {
        match self.terms.last() {
            None => OrdinalKind::Zero,
            Some(t) if t.exp.is_zero() => {
                let mut pred = self.clone();
                let last = pred.terms.last_mut().expect("nonempty");
                last.coeff -= 1u32;
                if last.coeff.is_zero() {
                    pred.terms.pop();
                }
                OrdinalKind::Successor(pred)
            }
            Some(_) => OrdinalKind::Limit,
        }
    }

    pub fn is_limit(&self) -> bool {
        matches!(self.kind(), OrdinalKind::Limit)
    }

    pub fn succ(&self) -> Ordinal {
        self.add(&Ordinal::one())
    }

    /// Ordinal sum `self + rhs`.
    pub fn add(&self, rhs: &Ordinal) -> Ordinal {
        let Some(head) = rhs.terms.first() else {
            return self.clone();
        };
        let mut terms: Vec<Term> = Vec::with_capacity(self.terms.len() + rhs.terms.len());
        let mut rest = rhs.terms.iter();
        for t in &self.terms {
            match t.exp.cmp(&head.exp) {
                Ordering::Greater => terms.push(t.clone()),
                Ordering::Equal => {
                    terms.push(Term {
                        exp: t.exp.clone(),
                        coeff: &t.coeff + &head.coeff,
                    });
                    rest.next();
                    break;
                }
                Ordering::Less => break,
            }
        }
        terms.extend(rest.cloned());
        Ordinal { terms }
    }

    /// `self + n` for a finite `n`, without allocating a temporary ordinal.
    pub fn add_finite(&self, n: u64) -> Ordinal {
        if n == 0 {
            return self.clone();
        }
        let mut out = self.clone();
        match out.terms.last_mut() {
            Some(t) if t.exp.is_zero() => t.coeff += n,
            _ => out.terms.push(Term {
                exp: Ordinal::zero(),
                coeff: BigUint::from(n),
            }),
        }
        out
    }

    /// Ordinal product `self * rhs`.
    pub fn mul(&self, rhs: &Ordinal) -> Ordinal {
        let Some(lead) = self.terms.first() else {
            return Ordinal::zero();
        };
        let mut acc = Ordinal::zero();
        for t in &rhs.terms {
            let part = if t.exp.is_zero() {
                // (w^a*c + rest) * n = w^a*(c*n) + rest
                let mut terms = self.terms.clone();
                terms[0].coeff = &lead.coeff * &t.coeff;
                Ordinal { terms }
            } else {
                Ordinal::monomial(lead.exp.add(&t.exp), t.coeff.clone())
            };
            acc = acc.add(&part);
        }
        acc
    }

    /// The unique `d` with `lower + d == self`, if `lower <= self`.
    pub fn sub_left(&self, lower: &Ordinal) -> Option<Ordinal> {
        let mut i = 0;
        loop {
            match (lower.terms.get(i), self.terms.get(i)) {
                (None, _) => {
                    return Some(Ordinal {
                        terms: self.terms[i..].to_vec(),
                    })
                }
                (Some(_), None) => return None,
                (Some(a), Some(b)) if a == b => i += 1,
                (Some(a), Some(b)) => {
                    return match a.exp.cmp(&b.exp) {
                        Ordering::Greater => None,
                        Ordering::Less => Some(Ordinal {
                            terms: self.terms[i..].to_vec(),
                        }),
                        Ordering::Equal if a.coeff > b.coeff => None,
                        Ordering::Equal => {
                            let mut terms = vec![Term {
                                exp: b.exp.clone(),
                                coeff: &b.coeff - &a.coeff,
                            }];
                            terms.extend_from_slice(&self.terms[i + 1..]);
                            Some(Ordinal { terms })
                        }
                    };
                }
            }
        }
    }

    fn fmt_exponent(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let simple = self.is_finite() || *self == Ordinal::omega();
        if simple {
            write!(f, "{self}")
        } else {
            write!(f, "({self})")
        }
    }
}

impl Ord for Ordinal {
    fn cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.terms.iter().zip(&other.terms) {
            let ord = a.exp.cmp(&b.exp).then_with(|| a.coeff.cmp(&b.coeff));
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

pub fn compare(a: &Ordinal, b: &Ordinal) -> Ordering {
    a.cmp(b)
}

impl From<u64> for Ordinal {
    fn from(n: u64) -> Self {
        Ordinal::from_u64(n)
    }
}

impl fmt::Debug for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ordinal({self})")
    }
}

impl fmt::Display for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str("+")?;
            }
            if t.exp.is_zero() {
                write!(f, "{}", t.coeff)?;
                continue;
            }
            f.write_str("w")?;
            if t.exp != Ordinal::one() {
                f.write_str("^")?;
                t.exp.fmt_exponent(f)?;
            }
            if !t.coeff.is_one() {
                write!(f, "*{}", t.coeff)?;
            }
        }
        Ok(())
    }
}

// ord  := term ('+' term)*
// term := 'w' ('^' atom)? ('*' nat)? | nat
// atom := nat | 'w' | '(' ord ')'
struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn peek(&mut self) -> Option<u8> {
        while self.src.get(self.pos).is_some_and(u8::is_ascii_whitespace) {
            self.pos += 1;
        }
        self.src.get(self.pos).copied()
    }

    fn unexpected(&mut self) -> ParseOrdinalError {
        match self.peek() {
            Some(c) => ParseOrdinalError::Unexpected {
                offset: self.pos,
                found: c as char,
            },
            None => ParseOrdinalError::UnexpectedEnd(self.pos),
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn nat(&mut self) -> Result<BigUint, ParseOrdinalError> {
        self.peek();
        let start = self.pos;
        while self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.unexpected());
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Ok(digits.parse().expect("validated digits"))
    }

    fn ord(&mut self) -> Result<Ordinal, ParseOrdinalError> {
        let mut acc = self.term()?;
        while self.eat(b'+') {
            acc = acc.add(&self.term()?);
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Ordinal, ParseOrdinalError> {
        match self.peek() {
            Some(b'w') => {
                self.pos += 1;
                let exp = if self.eat(b'^') {
                    self.atom()?
                } else {
                    Ordinal::one()
                };
                let coeff = if self.eat(b'*') {
                    let at = self.pos;
                    let n = self.nat()?;
                    if n.is_zero() {
                        return Err(ParseOrdinalError::ZeroCoefficient(at));
                    }
                    n
                } else {
                    BigUint::one()
                };
                Ok(Ordinal::monomial(exp, coeff))
            }
            Some(c) if c.is_ascii_digit() => Ok(Ordinal::finite(self.nat()?)),
            _ => Err(self.unexpected()),
        }
    }

    fn atom(&mut self) -> Result<Ordinal, ParseOrdinalError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.ord()?;
                if !self.eat(b')') {
                    return Err(self.unexpected());
                }
                Ok(inner)
            }
            Some(b'w') => {
                self.pos += 1;
                Ok(Ordinal::omega())
            }
            Some(c) if c.is_ascii_digit() => Ok(Ordinal::finite(self.nat()?)),
            _ => Err(self.unexpected()),
        }
    }
}

impl FromStr for Ordinal {
    type Err = ParseOrdinalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.trim().is_empty() {
            return Err(ParseOrdinalError::Empty);
        }
        let mut p = Parser {
            src: s.as_bytes(),
            pos: 0,
        };
        let out = p.ord()?;
        if p.peek().is_some() {
            return Err(p.unexpected());
        }
        Ok(out)
    }
}

impl Serialize for Ordinal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Ordinal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
