//! Symbolic scattered words of finite rank.
//!
//! A [`WordTerm`] is built from letters, the empty word, concatenation, the
//! ω-power (order type ω) and the reverse ω-power (order type −ω). Terms are
//! kept in a canonical form so that structural equality is a sound (but not
//! complete) test for isomorphism of the denoted words.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// A terminal letter. Letters are arbitrary strings; the text syntax quotes
/// anything that is not a single ASCII alphanumeric character.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Letter(Arc<str>);

impl Letter {
    pub fn new(name: &str) -> Self {
        Letter(Arc::from(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// True if the letter renders without quotes.
    pub fn is_plain(&self) -> bool {
        let mut chars = self.0.chars();
        matches!((chars.next(), chars.next()), (Some(c), None) if c.is_ascii_alphanumeric())
    }
}

impl From<&str> for Letter {
    fn from(s: &str) -> Self {
        Letter::new(s)
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_plain() {
            f.write_str(&self.0)
        } else {
            write!(f, "'{}'", self.0.replace('\\', "\\\\").replace('\'', "\\'"))
        }
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum WordTerm {
    Eps,
    Letter(Letter),
    /// At least two parts, none of them `Eps` or `Cat` once canonical.
    Cat(Vec<WordTerm>),
    /// `body·body·body·…` indexed by ω.
    Omega(Box<WordTerm>),
    /// `…·body·body` indexed by −ω.
    RevOmega(Box<WordTerm>),
}

impl WordTerm {
    pub fn letter(name: &str) -> Self {
        WordTerm::Letter(Letter::new(name))
    }

    /// A finite word, one letter per character of `s`.
    pub fn finite(s: &str) -> Self {
        let parts: Vec<_> = s.chars().map(|c| WordTerm::letter(&c.to_string())).collect();
        from_parts(parts)
    }

    pub fn omega(body: WordTerm) -> Self {
        canonicalize(&WordTerm::Omega(Box::new(body)))
    }

    pub fn rev_omega(body: WordTerm) -> Self {
        canonicalize(&WordTerm::RevOmega(Box::new(body)))
    }

    pub fn is_eps(&self) -> bool {
        matches!(self, WordTerm::Eps)
    }

    /// Number of nodes of the term tree.
    pub fn size(&self) -> usize {
        match self {
            WordTerm::Eps | WordTerm::Letter(_) => 1,
            WordTerm::Cat(parts) => 1 + parts.iter().map(WordTerm::size).sum::<usize>(),
            WordTerm::Omega(b) | WordTerm::RevOmega(b) => 1 + b.size(),
        }
    }

    /// True if no ω or −ω power occurs.
    pub fn is_finite(&self) -> bool {
        match self {
            WordTerm::Eps | WordTerm::Letter(_) => true,
            WordTerm::Cat(parts) => parts.iter().all(WordTerm::is_finite),
            WordTerm::Omega(_) | WordTerm::RevOmega(_) => false,
        }
    }

    /// Calls `f` on every letter occurrence, left to right.
    pub fn for_each_letter<'a>(&'a self, f: &mut impl FnMut(&'a Letter)) {
        match self {
            WordTerm::Eps => {}
            WordTerm::Letter(l) => f(l),
            WordTerm::Cat(parts) => parts.iter().for_each(|p| p.for_each_letter(f)),
            WordTerm::Omega(b) | WordTerm::RevOmega(b) => b.for_each_letter(f),
        }
    }

    fn parts(&self) -> &[WordTerm] {
        match self {
            WordTerm::Eps => &[],
            WordTerm::Cat(parts) => parts,
            other => std::slice::from_ref(other),
        }
    }
}

fn from_parts(mut parts: Vec<WordTerm>) -> WordTerm {
    match parts.len() {
        0 => WordTerm::Eps,
        1 => parts.pop().unwrap(),
        _ => WordTerm::Cat(parts),
    }
}

/// Appends a canonical non-`Cat`, non-`Eps` part, applying the absorption
/// rules `u·u^ω → u^ω` and `u^-ω·u → u^-ω`.
fn push_part(out: &mut Vec<WordTerm>, part: WordTerm) {
    if let WordTerm::Omega(body) = &part {
        let body = body.parts();
        while out.len() >= body.len() && out[out.len() - body.len()..] == *body {
            out.truncate(out.len() - body.len());
        }
    }
    out.push(part);
    'absorb: loop {
        for j in (0..out.len().saturating_sub(1)).rev() {
            if let WordTerm::RevOmega(body) = &out[j] {
                if out[j + 1..] == *body.parts() {
                    out.truncate(j + 1);
                    continue 'absorb;
                }
            }
        }
        break;
    }
}

/// Rewrites a term to canonical form. Idempotent.
pub fn canonicalize(w: &WordTerm) -> WordTerm {
    match w {
        WordTerm::Eps | WordTerm::Letter(_) => w.clone(),
        WordTerm::Omega(b) => match canonicalize(b) {
            WordTerm::Eps => WordTerm::Eps,
            b => WordTerm::Omega(Box::new(b)),
        },
        WordTerm::RevOmega(b) => match canonicalize(b) {
            WordTerm::Eps => WordTerm::Eps,
            b => WordTerm::RevOmega(Box::new(b)),
        },
        WordTerm::Cat(parts) => {
            let mut out = Vec::with_capacity(parts.len());
            for p in parts {
                extend_canonical(&mut out, canonicalize(p));
            }
            from_parts(out)
        }
    }
}

fn extend_canonical(out: &mut Vec<WordTerm>, w: WordTerm) {
    match w {
        WordTerm::Eps => {}
        WordTerm::Cat(parts) => {
            for p in parts {
                push_part(out, p);
            }
        }
        other => push_part(out, other),
    }
}

/// Concatenation of canonical terms.
pub fn cat(u: &WordTerm, v: &WordTerm) -> WordTerm {
    if u.is_eps() {
        return v.clone();
    }
    if v.is_eps() {
        return u.clone();
    }
    let mut out = u.parts().to_vec();
    extend_canonical(&mut out, v.clone());
    from_parts(out)
}

pub fn is_well_ordered(w: &WordTerm) -> bool {
    match w {
        WordTerm::Eps | WordTerm::Letter(_) => true,
        WordTerm::Cat(parts) => parts.iter().all(is_well_ordered),
        WordTerm::Omega(b) => is_well_ordered(b),
        // canonical bodies are never empty
        WordTerm::RevOmega(b) => b.is_eps(),
    }
}

/// Upper bound on the Hausdorff rank obtained from the VD construction.
pub fn rank_bound(w: &WordTerm) -> usize {
    match w {
        WordTerm::Eps | WordTerm::Letter(_) => 0,
        WordTerm::Cat(parts) => parts.iter().map(rank_bound).max().unwrap_or(0),
        WordTerm::Omega(b) | WordTerm::RevOmega(b) => {
            if b.is_eps() {
                0
            } else {
                rank_bound(b) + 1
            }
        }
    }
}

/// A pair of words; pairs multiply as `(u,v)·(u',v') = (uu', v'v)`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct PairTerm {
    pub left: WordTerm,
    pub right: WordTerm,
}

impl PairTerm {
    pub fn new(left: WordTerm, right: WordTerm) -> Self {
        PairTerm { left, right }
    }

    pub fn unit() -> Self {
        PairTerm::new(WordTerm::Eps, WordTerm::Eps)
    }

    pub fn size(&self) -> usize {
        self.left.size().max(self.right.size())
    }
}

pub fn pair_product(p: &PairTerm, q: &PairTerm) -> PairTerm {
    PairTerm::new(cat(&p.left, &q.left), cat(&q.right, &p.right))
}

/// The ω-product of the eventually periodic sequence `prefix · period^ω`:
/// `u_1…u_k · u^ω · v^-ω · v_k…v_1`.
pub fn pair_omega(prefix: &[PairTerm], period: &PairTerm) -> WordTerm {
    let head = prefix.iter().fold(PairTerm::unit(), |acc, p| pair_product(&acc, p));
    pair_omega_folded(&head, period)
}

/// Same as [`pair_omega`] with the prefix already multiplied out.
pub fn pair_omega_folded(head: &PairTerm, period: &PairTerm) -> WordTerm {
    let middle = cat(
        &WordTerm::omega(period.left.clone()),
        &WordTerm::rev_omega(period.right.clone()),
    );
    cat(&cat(&head.left, &middle), &head.right)
}

// ---------------------------------------------------------------------------
// Text syntax
// ---------------------------------------------------------------------------

impl fmt::Display for WordTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WordTerm::Eps => f.write_str("eps"),
            WordTerm::Cat(parts) => f.write_str(&render_parts(parts)),
            other => f.write_str(&render_atom(other)),
        }
    }
}

impl fmt::Display for PairTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.left, self.right)
    }
}

fn render_atom(w: &WordTerm) -> String {
    match w {
        WordTerm::Eps => "eps".to_string(),
        WordTerm::Letter(l) => l.to_string(),
        WordTerm::Cat(parts) => format!("({})", render_parts(parts)),
        WordTerm::Omega(b) => format!("{}^w", render_atom(b)),
        WordTerm::RevOmega(b) => format!("{}^-w", render_atom(b)),
    }
}

fn render_parts(parts: &[WordTerm]) -> String {
    let joined = join_parts(parts, false);
    // a run of plain letters spelling the keyword must be split up
    if joined
        .split(|c: char| !c.is_ascii_alphanumeric())
        .any(|run| run == "eps")
    {
        join_parts(parts, true)
    } else {
        joined
    }
}

fn join_parts(parts: &[WordTerm], dotted: bool) -> String {
    let mut s = String::new();
    for (i, p) in parts.iter().enumerate() {
        if i > 0
            && (dotted || matches!(parts[i - 1], WordTerm::Omega(_) | WordTerm::RevOmega(_)))
        {
            s.push('.');
        }
        s.push_str(&render_atom(p));
    }
    s
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("word syntax error at byte {pos}: {msg}")]
pub struct WordParseError {
    pub pos: usize,
    pub msg: String,
}

/// Parses the word syntax: single-character letters (or `'quoted'`
/// letters) by juxtaposition or `.`, `eps`, `^w`, `^-w` and parentheses.
/// The result is canonical.
pub fn parse_word(text: &str) -> Result<WordTerm, WordParseError> {
    let mut p = WordParser { src: text, pos: 0 };
    let w = p.seq()?;
    p.skip_ws();
    if p.pos < text.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(canonicalize(&w))
}

struct WordParser<'a> {
    src: &'a str,
    pos: usize,
}

impl WordParser<'_> {
    fn err(&self, msg: &str) -> WordParseError {
        WordParseError {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn seq(&mut self) -> Result<WordTerm, WordParseError> {
        let mut parts = Vec::new();
        loop {
            self.skip_ws();
            match self.peek() {
                Some('.') if !parts.is_empty() => {
                    self.pos += 1;
                    self.skip_ws();
                    parts.extend(self.postfix()?);
                }
                Some(c) if c == '(' || c == '\'' || c.is_ascii_alphanumeric() => {
                    parts.extend(self.postfix()?);
                }
                _ => break,
            }
        }
        if parts.is_empty() {
            return Err(self.err("expected a word"));
        }
        Ok(from_parts(parts))
    }

    /// One atom with its postfix powers. A bare alphanumeric run yields one
    /// part per character; powers then apply to the last character only.
    fn postfix(&mut self) -> Result<Vec<WordTerm>, WordParseError> {
        let mut atoms = self.atoms()?;
        loop {
            self.skip_ws();
            if !self.src[self.pos..].starts_with('^') {
                break;
            }
            let last = atoms.pop().ok_or_else(|| self.err("power without base"))?;
            if self.src[self.pos..].starts_with("^-w") {
                self.pos += 3;
                atoms.push(WordTerm::RevOmega(Box::new(last)));
            } else if self.src[self.pos..].starts_with("^w") {
                self.pos += 2;
                atoms.push(WordTerm::Omega(Box::new(last)));
            } else {
                return Err(self.err("expected ^w or ^-w"));
            }
        }
        Ok(atoms)
    }

    fn atoms(&mut self) -> Result<Vec<WordTerm>, WordParseError> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let w = self.seq()?;
                self.skip_ws();
                if self.peek() != Some(')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(vec![w])
            }
            Some('\'') => Ok(vec![WordTerm::Letter(self.quoted()?)]),
            Some(c) if c.is_ascii_alphanumeric() => {
                let start = self.pos;
                while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric()) {
                    self.pos += 1;
                }
                let run = &self.src[start..self.pos];
                if run == "eps" {
                    Ok(vec![WordTerm::Eps])
                } else {
                    Ok(run.chars().map(|c| WordTerm::letter(&c.to_string())).collect())
                }
            }
            _ => Err(self.err("expected a letter, eps or '('")),
        }
    }

    fn quoted(&mut self) -> Result<Letter, WordParseError> {
        let (name, len) = scan_quoted(&self.src[self.pos..]).ok_or_else(|| self.err("unterminated quoted letter"))?;
        self.pos += len;
        Ok(Letter::new(&name))
    }
}

/// Scans a `'quoted'` letter at the start of `s`; returns the unescaped
/// name and the consumed byte length.
pub(crate) fn scan_quoted(s: &str) -> Option<(String, usize)> {
    let mut chars = s.char_indices();
    chars.next().filter(|&(_, c)| c == '\'')?;
    let mut name = String::new();
    let mut escaped = false;
    for (i, c) in chars {
        if escaped {
            name.push(c);
            escaped = false;
        } else if c == '\\' {
            escaped = true;
        } else if c == '\'' {
            return Some((name, i + 1));
        } else {
            name.push(c);
        }
    }
    None
}
