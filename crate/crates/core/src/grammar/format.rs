//! Line-based grammar files.
//!
//! ```text
//! # comment
//! nonterminals: S I
//! terminals: a b
//! start: S
//! S -> a | b | eps | I
//! I -> S I
//! accept: I
//! ```
//!
//! Right-hand side tokens are separated by whitespace. `eps` is the empty
//! word, `'...'` a quoted terminal. An unquoted token that is not a declared
//! symbol is split into characters when every character is one.
//! When `nonterminals:` is omitted the production heads are used; when
//! `terminals:` is omitted every other symbol is a terminal.

use std::collections::BTreeSet;

use super::{GrammarError, Mcfg, Production, Symbol};
use crate::word::{scan_quoted, Letter};

fn ferr(line: usize, msg: impl Into<String>) -> GrammarError {
    GrammarError::Format { line, msg: msg.into() }
}

/// Splits a line into tokens, keeping quoted terminals intact.
fn tokens(text: &str, line: usize) -> Result<Vec<(String, bool)>, GrammarError> {
    let mut out = Vec::new();
    let mut rest = text.trim_start();
    while !rest.is_empty() {
        if rest.starts_with('\'') {
            let (name, len) = scan_quoted(rest).ok_or_else(|| ferr(line, "unterminated quoted terminal"))?;
            out.push((name, true));
            rest = &rest[len..];
        } else {
            let end = rest.find(char::is_whitespace).unwrap_or(rest.len());
            out.push((rest[..end].to_string(), false));
            rest = &rest[end..];
        }
        rest = rest.trim_start();
    }
    Ok(out)
}

/// Parses and validates a grammar file.
pub fn parse_grammar(text: &str) -> Result<Mcfg, GrammarError> {
    let mut nonterminals: Option<Vec<String>> = None;
    let mut terminals: Option<BTreeSet<Letter>> = None;
    let mut start = None;
    let mut accepting = Vec::new();
    let mut raw_prods = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.trim();
        if content.is_empty() || content.starts_with('#') {
            continue;
        }
        if let Some((head, rhs)) = content.split_once("->") {
            let head = head.trim();
            if head.is_empty() {
                return Err(ferr(line, "missing production head"));
            }
            for alt in rhs.split('|') {
                raw_prods.push((line, head.to_string(), tokens(alt, line)?));
            }
            continue;
        }
        let Some((key, value)) = content.split_once(':') else {
            return Err(ferr(line, "expected `key: value` or `A -> ...`"));
        };
        let toks = tokens(value, line)?;
        let plain = |toks: &[(String, bool)]| -> Result<Vec<String>, GrammarError> {
            toks.iter()
                .map(|(t, q)| if *q { Err(ferr(line, "nonterminals cannot be quoted")) } else { Ok(t.clone()) })
                .collect()
        };
        match key.trim() {
            "nonterminals" => nonterminals = Some(plain(&toks)?),
            "terminals" => terminals = Some(toks.iter().map(|(t, _)| Letter::new(t)).collect()),
            "start" => match plain(&toks)?.as_slice() {
                [s] => start = Some(s.clone()),
                _ => return Err(ferr(line, "expected exactly one start symbol")),
            },
            "accept" => accepting.push(plain(&toks)?.into_iter().collect()),
            other => return Err(ferr(line, format!("unknown key `{other}`"))),
        }
    }

    let nonterminals = nonterminals.unwrap_or_else(|| {
        let mut v: Vec<String> = Vec::new();
        for (_, h, _) in &raw_prods {
            if !v.contains(h) {
                v.push(h.clone());
            }
        }
        v
    });
    let start = match start.or_else(|| nonterminals.first().cloned()) {
        Some(s) => s,
        None => return Err(ferr(0, "empty grammar")),
    };
    let declared_terminals = terminals.is_some();
    let mut terminals = terminals.unwrap_or_default();

    let mut productions = Vec::new();
    for (line, head, toks) in raw_prods {
        let mut rhs = Vec::new();
        for (t, quoted) in toks {
            if quoted {
                if !declared_terminals {
                    terminals.insert(Letter::new(&t));
                }
                rhs.push(Symbol::T(Letter::new(&t)));
            } else if t == "eps" {
                continue;
            } else if nonterminals.contains(&t) {
                rhs.push(Symbol::N(t));
            } else if terminals.contains(&Letter::new(&t)) {
                rhs.push(Symbol::T(Letter::new(&t)));
            } else {
                let splittable = t.chars().all(|c| {
                    let c = c.to_string();
                    nonterminals.contains(&c) || terminals.contains(&Letter::new(&c)) || !declared_terminals
                });
                if !splittable {
                    return Err(ferr(line, format!("unknown symbol `{t}`")));
                }
                for c in t.chars().map(|c| c.to_string()) {
                    if nonterminals.contains(&c) {
                        rhs.push(Symbol::N(c));
                    } else {
                        let a = Letter::new(&c);
                        terminals.insert(a.clone());
                        rhs.push(Symbol::T(a));
                    }
                }
            }
        }
        productions.push(Production { head, rhs });
    }

    let g = Mcfg::new(nonterminals, terminals, productions, &start, accepting);
    g.validate()?;
    Ok(g)
}

pub(crate) fn print_grammar(g: &Mcfg) -> String {
    let mut out = String::new();
    out.push_str(&format!("nonterminals: {}\n", g.nonterminals.join(" ")));
    let ts: Vec<String> = g.terminals.iter().map(|a| a.to_string()).collect();
    out.push_str(&format!("terminals: {}\n", ts.join(" ")).replace(": \n", ":\n"));
    out.push_str(&format!("start: {}\n", g.start));
    for n in &g.nonterminals {
        let alts: Vec<String> = g
            .productions_of(n)
            .map(|p| {
                if p.rhs.is_empty() {
                    "eps".to_string()
                } else {
                    p.rhs.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(" ")
                }
            })
            .collect();
        if !alts.is_empty() {
            out.push_str(&format!("{n} -> {}\n", alts.join(" | ")));
        }
    }
    for f in &g.accepting {
        out.push_str(&format!("accept: {}\n", f.iter().cloned().collect::<Vec<_>>().join(" ")));
    }
    out
}
