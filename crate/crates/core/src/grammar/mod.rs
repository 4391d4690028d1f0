//! Muller context-free grammars, their path automata, and the equation
//! system `E_G` whose least solution is the family of languages `L(G, A)`.
//!
//! Correctness of `E_G` is only guaranteed for grammars in normal form
//! that generate scattered words; grammars are accepted as given.

mod derive;
mod equations;
mod format;
mod paths;

pub use derive::enumerate_finite_derivations;
pub use equations::{bar_word, build_equation_system, build_equation_system_literal, var_name, EquationSystem};
pub use format::parse_grammar;
pub use paths::{bar_translate, gamma_alphabet, r_regex, GammaLetter, PathAutomaton, Regex};

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::word::Letter;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Symbol {
    T(Letter),
    N(String),
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::T(a) => write!(f, "{a}"),
            Symbol::N(n) => f.write_str(n),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Production {
    pub head: String,
    pub rhs: Vec<Symbol>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Mcfg {
    /// Nonterminals in declaration order.
    pub nonterminals: Vec<String>,
    pub terminals: BTreeSet<Letter>,
    /// Productions, grouped by head in nonterminal order.
    pub productions: Vec<Production>,
    pub start: String,
    /// The Muller accepting sets.
    pub accepting: Vec<BTreeSet<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{tag}: {}", self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GrammarError {
    #[error("invalid grammar: {}", join_diags(.0))]
    InvalidGrammar(Vec<Diagnostic>),
    #[error("line {line}: {msg}")]
    Format { line: usize, msg: String },
    #[error("no covering cycle from {nonterminal} through the accepting set")]
    EmptyRoot { nonterminal: String },
    #[error("unknown nonterminal `{0}`")]
    UnknownNonterminal(String),
}

fn join_diags(d: &[Diagnostic]) -> String {
    d.iter().map(|d| d.message.as_str()).collect::<Vec<_>>().join("; ")
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_alphabetic() || c == '_')
        && chars.all(|c| c.is_alphanumeric() || c == '_')
        && !matches!(s, "mu" | "eps" | "empty")
}

impl Mcfg {
    /// Builds a grammar, regrouping productions by head in nonterminal
    /// order (stable within a head).
    pub fn new(
        nonterminals: Vec<String>,
        terminals: BTreeSet<Letter>,
        productions: Vec<Production>,
        start: &str,
        accepting: Vec<BTreeSet<String>>,
    ) -> Self {
        let rank: BTreeMap<&str, usize> = nonterminals.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
        let mut productions = productions;
        productions.sort_by_key(|p| rank.get(p.head.as_str()).copied().unwrap_or(usize::MAX));
        Mcfg {
            nonterminals,
            terminals,
            productions,
            start: start.to_string(),
            accepting,
        }
    }

    pub fn productions_of<'a>(&'a self, a: &'a str) -> impl Iterator<Item = &'a Production> + 'a {
        self.productions.iter().filter(move |p| p.head == a)
    }

    pub fn is_nonterminal(&self, a: &str) -> bool {
        self.nonterminals.iter().any(|n| n == a)
    }

    /// Checks the structural invariants. Returns the soft warnings on
    /// success and every diagnostic on failure.
    pub fn validate(&self) -> Result<Vec<Diagnostic>, GrammarError> {
        let mut diags = Vec::new();
        let mut err = |m: String| {
            diags.push(Diagnostic {
                severity: Severity::Error,
                message: m,
            })
        };
        let v: BTreeSet<&str> = self.nonterminals.iter().map(String::as_str).collect();
        if v.len() != self.nonterminals.len() {
            err("duplicate nonterminal declaration".into());
        }
        for n in &self.nonterminals {
            if !is_identifier(n) {
                err(format!("nonterminal `{n}` is not an identifier"));
            }
        }
        for a in &self.terminals {
            if v.contains(a.as_str()) {
                err(format!("`{}` is both a terminal and a nonterminal", a.as_str()));
            }
        }
        if !v.contains(self.start.as_str()) {
            err(format!("start symbol `{}` is not a nonterminal", self.start));
        }
        for p in &self.productions {
            if !v.contains(p.head.as_str()) {
                err(format!("production head `{}` is not a nonterminal", p.head));
            }
            for s in &p.rhs {
                match s {
                    Symbol::N(n) if !v.contains(n.as_str()) => err(format!("unknown nonterminal `{n}` in a production of {}", p.head)),
                    Symbol::T(a) if !self.terminals.contains(a) => err(format!("unknown terminal `{a}` in a production of {}", p.head)),
                    _ => {}
                }
            }
        }
        for f in &self.accepting {
            if f.is_empty() {
                err("empty accepting set".into());
            }
            for n in f {
                if !v.contains(n.as_str()) {
                    err(format!("accepting set mentions unknown nonterminal `{n}`"));
                }
            }
        }
        if !diags.is_empty() {
            return Err(GrammarError::InvalidGrammar(diags));
        }

        let mut warn = Vec::new();
        let reach = self.reachable_from(&self.start);
        for n in &self.nonterminals {
            if !reach.contains(n.as_str()) {
                warn.push(format!("nonterminal {n} is unreachable from {}", self.start));
            }
            if self.productions_of(n).next().is_none() {
                warn.push(format!("nonterminal {n} has no productions"));
            }
        }
        for f in &self.accepting {
            if !self.strongly_connected(f) {
                let names: Vec<&str> = f.iter().map(String::as_str).collect();
                warn.push(format!("accepting set {{{}}} admits no covering cycle", names.join(" ")));
            }
        }
        Ok(warn
            .into_iter()
            .map(|message| Diagnostic {
                severity: Severity::Warning,
                message,
            })
            .collect())
    }

    fn successors<'a>(&'a self, a: &'a str) -> BTreeSet<&'a str> {
        self.productions_of(a)
            .flat_map(|p| p.rhs.iter())
            .filter_map(|s| match s {
                Symbol::N(n) => Some(n.as_str()),
                Symbol::T(_) => None,
            })
            .collect()
    }

    fn reachable_from(&self, a: &str) -> BTreeSet<&str> {
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::from([a]);
        while let Some(c) = queue.pop_front() {
            if let Some(c) = self.nonterminals.iter().find(|n| *n == c) {
                if seen.insert(c.as_str()) {
                    queue.extend(self.successors(c));
                }
            }
        }
        seen
    }

    /// True if the subgraph induced by `f` has a cycle through all of `f`.
    fn strongly_connected(&self, f: &BTreeSet<String>) -> bool {
        let Some(first) = f.iter().next() else { return false };
        let within = |a: &str, rev: bool| {
            let mut seen = BTreeSet::new();
            let mut stack = vec![a.to_string()];
            while let Some(c) = stack.pop() {
                for d in f {
                    let edge = if rev {
                        self.successors(d).contains(c.as_str())
                    } else {
                        self.successors(&c).contains(d.as_str())
                    };
                    if edge && seen.insert(d.clone()) {
                        stack.push(d.clone());
                    }
                }
            }
            seen
        };
        within(first, false).len() == f.len() && within(first, true).len() == f.len()
    }
}

impl fmt::Display for Mcfg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format::print_grammar(self))
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    pub use super::parse_grammar;
    use super::*;

    pub const EXAMPLE1: &str = "\
nonterminals: S I
terminals: a b
start: S
S -> a | b | eps | I
I -> S I
accept: I
";

    pub const EXAMPLE2: &str = "\
nonterminals: S I
terminals: a b
start: S
S -> a | b | eps | I
I -> S I S
accept: I
";

    pub const EXAMPLE3: &str = "\
nonterminals: S A B I J
terminals: a b
start: S
S -> A S | B S | eps
A -> a | eps | I
I -> A I
B -> b | eps | J
J -> J B
accept: I
accept: J
";

    pub fn example(text: &str) -> Mcfg {
        parse_grammar(text).unwrap()
    }
}
