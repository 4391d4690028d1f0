//! Two-sorted fixed-point expressions over words (sort T) and pairs of
//! words (sort P).
//!
//! ```text
//! T ::= a | eps | x | T + T | T . T | mu x. T | P^w
//! P ::= T >< T | P + P | P . P | P^*
//! ```
//!
//! The well-ordered fragment additionally writes `T^w` directly
//! ([`Expr::OmegaW`]); [`embed_w_to_s`] rewrites it to `(T >< eps)^w`.

mod parse;
mod print;
mod transform;

pub use parse::{parse, parse_strict, parse_w_compat, parse_with, ParseError, ParseErrorKind, ParseOptions};
pub use transform::{alpha_rename, embed_w_to_s, free_vars, is_closed, substitute, to_w, ToWError};

use std::collections::BTreeSet;

use thiserror::Error;

use crate::word::Letter;

pub type Var = String;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Expr {
    // sort T
    Letter(Letter),
    Eps,
    /// The empty language.
    Empty,
    Var(Var),
    Plus(Box<Expr>, Box<Expr>),
    Dot(Box<Expr>, Box<Expr>),
    Mu(Var, Box<Expr>),
    /// ω-power of a pair language.
    OmegaP(Box<Expr>),
    /// ω-power of a word language (well-ordered fragment only).
    OmegaW(Box<Expr>),
    // sort P
    Times(Box<Expr>, Box<Expr>),
    PlusP(Box<Expr>, Box<Expr>),
    DotP(Box<Expr>, Box<Expr>),
    StarP(Box<Expr>),
}

#[derive(Copy, Clone, PartialEq, Eq, Debug, Hash)]
pub enum Sort {
    /// Languages of words.
    T,
    /// Languages of pairs of words.
    P,
}

impl std::fmt::Display for Sort {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Sort::T => "T",
            Sort::P => "P",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("sort mismatch: expected {expected}, found {found} in `{context}`")]
pub struct SortError {
    pub expected: Sort,
    pub found: Sort,
    pub context: String,
}

// Convenience constructors, mostly for tests and generated code.
pub fn letter(a: &str) -> Expr {
    Expr::Letter(Letter::new(a))
}
pub fn var(x: &str) -> Expr {
    Expr::Var(x.to_string())
}
pub fn plus(a: Expr, b: Expr) -> Expr {
    Expr::Plus(Box::new(a), Box::new(b))
}
pub fn dot(a: Expr, b: Expr) -> Expr {
    Expr::Dot(Box::new(a), Box::new(b))
}
pub fn mu(x: &str, body: Expr) -> Expr {
    Expr::Mu(x.to_string(), Box::new(body))
}
pub fn omega_p(p: Expr) -> Expr {
    Expr::OmegaP(Box::new(p))
}
pub fn omega_w(t: Expr) -> Expr {
    Expr::OmegaW(Box::new(t))
}
pub fn times(a: Expr, b: Expr) -> Expr {
    Expr::Times(Box::new(a), Box::new(b))
}
pub fn plus_p(a: Expr, b: Expr) -> Expr {
    Expr::PlusP(Box::new(a), Box::new(b))
}
pub fn dot_p(a: Expr, b: Expr) -> Expr {
    Expr::DotP(Box::new(a), Box::new(b))
}
pub fn star_p(p: Expr) -> Expr {
    Expr::StarP(Box::new(p))
}

impl Expr {
    /// Sort of the expression, checking every subexpression.
    pub fn sort(&self) -> Result<Sort, SortError> {
        let expect = |e: &Expr, s: Sort| -> Result<(), SortError> {
            let found = e.sort()?;
            if found == s {
                Ok(())
            } else {
                Err(SortError {
                    expected: s,
                    found,
                    context: e.to_string(),
                })
            }
        };
        match self {
            Expr::Letter(_) | Expr::Eps | Expr::Empty | Expr::Var(_) => Ok(Sort::T),
            Expr::Plus(a, b) | Expr::Dot(a, b) => {
                expect(a, Sort::T)?;
                expect(b, Sort::T)?;
                Ok(Sort::T)
            }
            Expr::Mu(_, t) | Expr::OmegaW(t) => {
                expect(t, Sort::T)?;
                Ok(Sort::T)
            }
            Expr::OmegaP(p) => {
                expect(p, Sort::P)?;
                Ok(Sort::T)
            }
            Expr::Times(a, b) => {
                expect(a, Sort::T)?;
                expect(b, Sort::T)?;
                Ok(Sort::P)
            }
            Expr::PlusP(a, b) | Expr::DotP(a, b) => {
                expect(a, Sort::P)?;
                expect(b, Sort::P)?;
                Ok(Sort::P)
            }
            Expr::StarP(p) => {
                expect(p, Sort::P)?;
                Ok(Sort::P)
            }
        }
    }

    /// Sort of the head constructor only.
    pub fn head_sort(&self) -> Sort {
        match self {
            Expr::Times(..) | Expr::PlusP(..) | Expr::DotP(..) | Expr::StarP(_) => Sort::P,
            _ => Sort::T,
        }
    }

    pub fn children(&self) -> Vec<&Expr> {
        match self {
            Expr::Letter(_) | Expr::Eps | Expr::Empty | Expr::Var(_) => vec![],
            Expr::Mu(_, a) | Expr::OmegaP(a) | Expr::OmegaW(a) | Expr::StarP(a) => vec![a],
            Expr::Plus(a, b)
            | Expr::Dot(a, b)
            | Expr::Times(a, b)
            | Expr::PlusP(a, b)
            | Expr::DotP(a, b) => vec![a, b],
        }
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        let mut n = 0;
        let mut stack = vec![self];
        while let Some(e) = stack.pop() {
            n += 1;
            stack.extend(e.children());
        }
        n
    }

    /// Letters occurring anywhere in the expression.
    pub fn letters(&self) -> BTreeSet<Letter> {
        let mut out = BTreeSet::new();
        let mut stack = vec![self];
        while let Some(e) = stack.pop() {
            if let Expr::Letter(l) = e {
                out.insert(l.clone());
            }
            stack.extend(e.children());
        }
        out
    }

    /// True if the expression belongs to the well-ordered fragment: no
    /// pairs, no star, ω-powers written as `T^w`.
    pub fn is_w_fragment(&self) -> bool {
        let mut stack = vec![self];
        while let Some(e) = stack.pop() {
            match e {
                Expr::OmegaP(_) | Expr::Times(..) | Expr::PlusP(..) | Expr::DotP(..) | Expr::StarP(_) => {
                    return false
                }
                _ => stack.extend(e.children()),
            }
        }
        true
    }
}

/// Left-nested sum of sort-T expressions; `Empty` for an empty list.
pub fn sum(terms: Vec<Expr>) -> Expr {
    terms.into_iter().reduce(plus).unwrap_or(Expr::Empty)
}

/// Left-nested concatenation of sort-T expressions; `Eps` for an empty list.
pub fn product(terms: Vec<Expr>) -> Expr {
    terms.into_iter().reduce(dot).unwrap_or(Expr::Eps)
}
