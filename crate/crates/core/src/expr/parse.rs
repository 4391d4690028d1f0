use std::collections::BTreeSet;

use thiserror::Error;

use super::transform::alpha_rename;
use super::{embed_w_to_s, Expr, Sort, SortError};
use crate::word::{scan_quoted, Letter};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("at byte {pos}: {kind}")]
pub struct ParseError {
    pub pos: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("{0}")]
    Sort(SortError),
    #[error("unknown letter `{0}` (multi-character letters must be quoted)")]
    UnknownLetter(String),
}

/// Parser configuration.
#[derive(Debug, Clone, Default)]
pub struct ParseOptions {
    /// If set, unbound identifiers must belong to this alphabet.
    pub alphabet: Option<BTreeSet<String>>,
    /// Identifiers treated as free variables rather than letters.
    pub free_vars: BTreeSet<String>,
    /// Reject `T^w` (ω-power applied to a word language).
    pub strict: bool,
}

/// Parses an expression, accepting both `P^w` and the well-ordered
/// shorthand `T^w`. Binders are α-renamed apart.
pub fn parse(text: &str) -> Result<Expr, ParseError> {
    parse_with(text, &ParseOptions::default())
}

/// Parses a strict two-sorted expression (`^w` only on pair languages).
pub fn parse_strict(text: &str) -> Result<Expr, ParseError> {
    parse_with(
        text,
        &ParseOptions {
            strict: true,
            ..Default::default()
        },
    )
}

/// Parses and rewrites every `T^w` to `(T >< eps)^w`.
pub fn parse_w_compat(text: &str) -> Result<Expr, ParseError> {
    parse(text).map(|e| embed_w_to_s(&e))
}

pub fn parse_with(text: &str, opts: &ParseOptions) -> Result<Expr, ParseError> {
    let tokens = lex(text)?;
    let mut p = Parser {
        tokens,
        idx: 0,
        opts,
        scope: Vec::new(),
        end: text.len(),
        times_allowed: true,
    };
    let (e, _) = p.expr()?;
    if p.idx < p.tokens.len() {
        return Err(p.syntax("unexpected token"));
    }
    Ok(alpha_rename(&e))
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Quoted(String),
    Eps,
    Empty,
    Mu,
    Plus,
    Dot,
    Times,
    LParen,
    RParen,
    PowW,
    PowStar,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let mut out = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    let err = |pos: usize, msg: &str| ParseError {
        pos,
        kind: ParseErrorKind::Syntax(msg.to_string()),
    };
    while i < text.len() {
        let c = text[i..].chars().next().unwrap();
        if c.is_whitespace() {
            i += c.len_utf8();
            continue;
        }
        let start = i;
        let tok = match c {
            '+' => {
                i += 1;
                Tok::Plus
            }
            '.' => {
                i += 1;
                Tok::Dot
            }
            '(' => {
                i += 1;
                Tok::LParen
            }
            ')' => {
                i += 1;
                Tok::RParen
            }
            '>' if bytes.get(i + 1) == Some(&b'<') => {
                i += 2;
                Tok::Times
            }
            '^' => match bytes.get(i + 1) {
                Some(b'w') => {
                    i += 2;
                    Tok::PowW
                }
                Some(b'*') => {
                    i += 2;
                    Tok::PowStar
                }
                _ => return Err(err(i, "expected ^w or ^*")),
            },
            '\'' => {
                let (name, len) = scan_quoted(&text[i..]).ok_or_else(|| err(i, "unterminated quoted letter"))?;
                i += len;
                Tok::Quoted(name)
            }
            c if c.is_alphanumeric() || c == '_' => {
                while let Some(c) = text[i..].chars().next() {
                    if c.is_alphanumeric() || c == '_' {
                        i += c.len_utf8();
                    } else {
                        break;
                    }
                }
                match &text[start..i] {
                    "mu" => Tok::Mu,
                    "eps" => Tok::Eps,
                    "empty" => Tok::Empty,
                    id => Tok::Ident(id.to_string()),
                }
            }
            _ => return Err(err(i, &format!("unexpected character `{c}`"))),
        };
        out.push((tok, start));
    }
    Ok(out)
}

struct Parser<'o> {
    tokens: Vec<(Tok, usize)>,
    idx: usize,
    opts: &'o ParseOptions,
    scope: Vec<String>,
    end: usize,
    // false inside a mu body outside parentheses: `mu x.x >< y` is `(mu x.x) >< y`
    times_allowed: bool,
}

type Parsed = (Expr, Sort);

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.idx).map(|(t, _)| t)
    }

    fn pos(&self) -> usize {
        self.tokens.get(self.idx).map_or(self.end, |&(_, p)| p)
    }

    fn syntax(&self, msg: &str) -> ParseError {
        ParseError {
            pos: self.pos(),
            kind: ParseErrorKind::Syntax(msg.to_string()),
        }
    }

    fn sort_err(&self, pos: usize, expected: Sort, found: &Parsed) -> ParseError {
        ParseError {
            pos,
            kind: ParseErrorKind::Sort(SortError {
                expected,
                found: found.1,
                context: found.0.to_string(),
            }),
        }
    }

    fn expr(&mut self) -> Result<Parsed, ParseError> {
        self.sum()
    }

    fn binder(&mut self) -> Result<Parsed, ParseError> {
        self.idx += 1;
        let name = match self.peek() {
            Some(Tok::Ident(x)) => x.clone(),
            _ => return Err(self.syntax("expected a variable after `mu`")),
        };
        self.idx += 1;
        if self.peek() != Some(&Tok::Dot) {
            return Err(self.syntax("expected `.` after the bound variable"));
        }
        self.idx += 1;
        let body_pos = self.pos();
        self.scope.push(name.clone());
        let outer = std::mem::replace(&mut self.times_allowed, false);
        let body = self.expr();
        self.times_allowed = outer;
        self.scope.pop();
        let body = body?;
        if body.1 != Sort::T {
            return Err(self.sort_err(body_pos, Sort::T, &body));
        }
        Ok((Expr::Mu(name, Box::new(body.0)), Sort::T))
    }

    fn sum(&mut self) -> Result<Parsed, ParseError> {
        let mut lhs = self.product()?;
        while self.peek() == Some(&Tok::Plus) {
            let pos = self.pos();
            self.idx += 1;
            let rhs = self.product()?;
            lhs = self.combine(pos, lhs, rhs, Expr::Plus, Expr::PlusP)?;
        }
        Ok(lhs)
    }

    fn combine(
        &self,
        pos: usize,
        lhs: Parsed,
        rhs: Parsed,
        on_t: fn(Box<Expr>, Box<Expr>) -> Expr,
        on_p: fn(Box<Expr>, Box<Expr>) -> Expr,
    ) -> Result<Parsed, ParseError> {
        if lhs.1 != rhs.1 {
            return Err(self.sort_err(pos, lhs.1, &rhs));
        }
        let build = if lhs.1 == Sort::T { on_t } else { on_p };
        Ok((build(Box::new(lhs.0), Box::new(rhs.0)), lhs.1))
    }

    fn product(&mut self) -> Result<Parsed, ParseError> {
        let mut lhs = self.concat()?;
        while self.times_allowed && self.peek() == Some(&Tok::Times) {
            let pos = self.pos();
            self.idx += 1;
            let rhs = self.concat()?;
            if lhs.1 != Sort::T {
                return Err(self.sort_err(pos, Sort::T, &lhs));
            }
            if rhs.1 != Sort::T {
                return Err(self.sort_err(pos, Sort::T, &rhs));
            }
            lhs = (Expr::Times(Box::new(lhs.0), Box::new(rhs.0)), Sort::P);
        }
        Ok(lhs)
    }

    fn starts_atom(&self) -> bool {
        matches!(
            self.peek(),
            Some(Tok::Ident(_) | Tok::Quoted(_) | Tok::Eps | Tok::Empty | Tok::LParen | Tok::Mu)
        )
    }

    fn concat(&mut self) -> Result<Parsed, ParseError> {
        let mut lhs = self.postfix()?;
        loop {
            let pos = self.pos();
            if self.peek() == Some(&Tok::Dot) {
                self.idx += 1;
            } else if !self.starts_atom() {
                break;
            }
            let rhs = self.postfix()?;
            lhs = self.combine(pos, lhs, rhs, Expr::Dot, Expr::DotP)?;
        }
        Ok(lhs)
    }

    fn postfix(&mut self) -> Result<Parsed, ParseError> {
        let mut e = self.atom()?;
        loop {
            let pos = self.pos();
            match self.peek() {
                Some(Tok::PowW) => {
                    self.idx += 1;
                    e = match e.1 {
                        Sort::P => (Expr::OmegaP(Box::new(e.0)), Sort::T),
                        Sort::T if self.opts.strict => return Err(self.sort_err(pos, Sort::P, &e)),
                        Sort::T => (Expr::OmegaW(Box::new(e.0)), Sort::T),
                    };
                }
                Some(Tok::PowStar) => {
                    self.idx += 1;
                    if e.1 != Sort::P {
                        return Err(self.sort_err(pos, Sort::P, &e));
                    }
                    e = (Expr::StarP(Box::new(e.0)), Sort::P);
                }
                _ => return Ok(e),
            }
        }
    }

    fn atom(&mut self) -> Result<Parsed, ParseError> {
        let pos = self.pos();
        let tok = self.peek().cloned();
        match tok {
            Some(Tok::Mu) => self.binder(),
            Some(Tok::LParen) => {
                self.idx += 1;
                let outer = std::mem::replace(&mut self.times_allowed, true);
                let e = self.expr();
                self.times_allowed = outer;
                let e = e?;
                if self.peek() != Some(&Tok::RParen) {
                    return Err(self.syntax("expected `)`"));
                }
                self.idx += 1;
                Ok(e)
            }
            Some(Tok::Eps) => {
                self.idx += 1;
                Ok((Expr::Eps, Sort::T))
            }
            Some(Tok::Empty) => {
                self.idx += 1;
                Ok((Expr::Empty, Sort::T))
            }
            Some(Tok::Quoted(name)) => {
                self.idx += 1;
                self.check_letter(pos, &name)?;
                Ok((Expr::Letter(Letter::new(&name)), Sort::T))
            }
            Some(Tok::Ident(name)) => {
                self.idx += 1;
                if self.scope.contains(&name) || self.opts.free_vars.contains(&name) {
                    return Ok((Expr::Var(name), Sort::T));
                }
                if self.opts.alphabet.is_none() && name.chars().count() > 1 {
                    return Err(ParseError {
                        pos,
                        kind: ParseErrorKind::UnknownLetter(name),
                    });
                }
                self.check_letter(pos, &name)?;
                Ok((Expr::Letter(Letter::new(&name)), Sort::T))
            }
            _ => Err(self.syntax("expected an expression")),
        }
    }

    fn check_letter(&self, pos: usize, name: &str) -> Result<(), ParseError> {
        match &self.opts.alphabet {
            Some(sigma) if !sigma.contains(name) => Err(ParseError {
                pos,
                kind: ParseErrorKind::UnknownLetter(name.to_string()),
            }),
            _ => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::*;

    #[test]
    fn parses_flagship_expressions() {
        let e = parse_w_compat("mu x.(x^w + a + b + eps)").unwrap();
        let expected = mu(
            "x",
            plus(omega_p(times(var("x"), Expr::Eps)), plus(letter("a"), plus(letter("b"), Expr::Eps))),
        );
        // `+` is parsed left-associatively
        let expected_left = mu(
            "x",
            plus(plus(plus(omega_p(times(var("x"), Expr::Eps)), letter("a")), letter("b")), Expr::Eps),
        );
        assert!(e == expected || e == expected_left, "{e:?}");

        let s = parse_strict("mu x.((x >< x)^w + a + b + eps)").unwrap();
        assert!(is_closed(&s));
        assert_eq!(s.sort().unwrap(), Sort::T);
        assert_eq!(parse("eps").unwrap(), Expr::Eps);
    }

    #[test]
    fn precedence() {
        assert_eq!(
            parse("a + b c^w").unwrap(),
            plus(letter("a"), dot(letter("b"), omega_w(letter("c"))))
        );
        assert_eq!(parse("a >< b.c").unwrap(), times(letter("a"), dot(letter("b"), letter("c"))));
        assert_eq!(
            parse("((mu x.x >< mu x.x)^*)^w").unwrap(),
            omega_p(star_p(times(mu("x", var("x")), mu("x_1", var("x_1")))))
        );
        assert_eq!(
            parse("mu x. a x + eps").unwrap(),
            mu("x", plus(dot(letter("a"), var("x")), Expr::Eps))
        );
    }

    #[test]
    fn errors() {
        let e = parse_strict("mu x.(x^w + a)").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Sort(_)), "{e}");
        let e = parse("(a + ").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Syntax(_)));
        assert_eq!(e.pos, 5);
        let e = parse("ab").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UnknownLetter("ab".into()));
        let opts = ParseOptions {
            alphabet: Some(["a".to_string()].into()),
            ..Default::default()
        };
        assert!(matches!(parse_with("a + b", &opts).unwrap_err().kind, ParseErrorKind::UnknownLetter(_)));
        assert!(matches!(parse("a + (a >< b)").unwrap_err().kind, ParseErrorKind::Sort(_)));
        assert!(matches!(parse("a^*").unwrap_err().kind, ParseErrorKind::Sort(_)));
    }

    #[test]
    fn free_variable_declarations() {
        let opts = ParseOptions {
            free_vars: ["X_S".to_string()].into(),
            ..Default::default()
        };
        let e = parse_with("(X_S >< X_S)^w", &opts).unwrap();
        assert_eq!(e, omega_p(times(var("X_S"), var("X_S"))));
    }
}
