//! Expressions to grammars, by the closure constructions: base grammars
//! for letters, union and concatenation by a fresh start symbol, pair
//! languages `L1 # L2` over a fresh separator, substitution for the
//! separator in pair products, and the grammars G1 (pair star),
//! G2 (pair ω-power) and G3 (`mu`).

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::expr::{Expr, Sort, SortError, Var};
use crate::grammar::{Mcfg, Production, Symbol};
use crate::word::Letter;

/// Largest strongly connected component through which G2 enumerates
/// accepting sets.
pub const MAX_OMEGA_COMPONENT: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompileError {
    #[error("expression is not closed: free variable `{0}`")]
    NotClosed(Var),
    #[error("{0}")]
    SortMismatch(SortError),
    #[error("symbol `{0}` is used both as a terminal and as a nonterminal")]
    AlphabetClash(String),
    #[error("`{0}` is not a terminal of the grammar")]
    NotATerminal(String),
    #[error("ω-power over a component of {0} nonterminals; at most {MAX_OMEGA_COMPONENT} are supported")]
    ComponentTooLarge(usize),
}

/// A grammar whose words each contain exactly one separator `sep`,
/// denoting the pair language `{(u, v) : u sep v}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairGrammar {
    pub grammar: Mcfg,
    pub sep: Letter,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Compiled {
    Word(Mcfg),
    Pair(PairGrammar),
}

impl Compiled {
    pub fn grammar(&self) -> &Mcfg {
        match self {
            Compiled::Word(g) => g,
            Compiled::Pair(p) => &p.grammar,
        }
    }
}

/// Grammar under construction; productions and accepting sets refer to
/// globally fresh names, so parts can be merged by union.
#[derive(Clone, Debug, Default)]
struct Part {
    nonterminals: Vec<String>,
    terminals: BTreeSet<Letter>,
    productions: Vec<Production>,
    accepting: Vec<BTreeSet<String>>,
    start: String,
    sep: Option<Letter>,
}

impl Part {
    fn absorb(&mut self, other: Part) -> String {
        self.nonterminals.extend(other.nonterminals);
        self.terminals.extend(other.terminals);
        self.productions.extend(other.productions);
        self.accepting.extend(other.accepting);
        other.start
    }

    /// Turns terminal `t` into the nonterminal `name`.
    fn promote(&mut self, t: &Letter, name: &str) {
        self.terminals.remove(t);
        for p in &mut self.productions {
            for s in &mut p.rhs {
                if matches!(s, Symbol::T(a) if a == t) {
                    *s = Symbol::N(name.to_string());
                }
            }
        }
        self.nonterminals.push(name.to_string());
    }

    fn add(&mut self, head: &str, rhs: Vec<Symbol>) {
        self.productions.push(Production {
            head: head.to_string(),
            rhs,
        });
    }

    fn finish(mut self) -> Mcfg {
        let start = self.start.clone();
        self.nonterminals.retain(|n| *n != start);
        self.nonterminals.insert(0, start.clone());
        Mcfg::new(self.nonterminals, self.terminals, self.productions, &start, self.accepting)
    }
}

struct Builder {
    counter: usize,
    reserved: BTreeSet<String>,
}

impl Builder {
    fn fresh(&mut self, prefix: &str) -> String {
        loop {
            self.counter += 1;
            let name = format!("{prefix}{}", self.counter);
            if !self.reserved.contains(&name) {
                return name;
            }
        }
    }

    fn leaf(&mut self, rhs: Vec<Symbol>) -> Part {
        let s = self.fresh("N");
        let mut part = Part {
            nonterminals: vec![s.clone()],
            start: s.clone(),
            ..Part::default()
        };
        for sym in &rhs {
            if let Symbol::T(a) = sym {
                part.terminals.insert(a.clone());
            }
        }
        part.add(&s, rhs);
        part
    }

    fn sort_err(e: &Expr, expected: Sort) -> CompileError {
        CompileError::SortMismatch(SortError {
            expected,
            found: e.head_sort(),
            context: e.to_string(),
        })
    }

    fn word(&mut self, e: &Expr, env: &mut BTreeMap<Var, Letter>) -> Result<Part, CompileError> {
        match e {
            Expr::Letter(a) => Ok(self.leaf(vec![Symbol::T(a.clone())])),
            Expr::Eps => Ok(self.leaf(vec![])),
            Expr::Empty => {
                let s = self.fresh("N");
                Ok(Part {
                    nonterminals: vec![s.clone()],
                    start: s,
                    ..Part::default()
                })
            }
            Expr::Var(x) => match env.get(x) {
                Some(v) => Ok(self.leaf(vec![Symbol::T(v.clone())])),
                None => Err(CompileError::NotClosed(x.clone())),
            },
            Expr::Plus(l, r) | Expr::Dot(l, r) => {
                let mut part = self.word(l, env)?;
                let s1 = part.start.clone();
                let s2 = part.absorb(self.word(r, env)?);
                let s = self.fresh("N");
                part.nonterminals.push(s.clone());
                if matches!(e, Expr::Plus(..)) {
                    part.add(&s, vec![Symbol::N(s1)]);
                    part.add(&s, vec![Symbol::N(s2)]);
                } else {
                    part.add(&s, vec![Symbol::N(s1), Symbol::N(s2)]);
                }
                part.start = s;
                Ok(part)
            }
            Expr::Mu(x, body) => {
                // G3: compile the body with x as a terminal, then x -> S
                let v = self.fresh("V");
                let letter = Letter::new(&v);
                let saved = env.insert(x.clone(), letter.clone());
                let result = self.word(body, env);
                match saved {
                    Some(old) => env.insert(x.clone(), old),
                    None => env.remove(x),
                };
                let mut part = result?;
                part.promote(&letter, &v);
                let s = std::mem::replace(&mut part.start, v.clone());
                part.add(&v, vec![Symbol::N(s)]);
                Ok(part)
            }
            Expr::OmegaW(t) => {
                let embedded = Expr::OmegaP(Box::new(Expr::Times(t.clone(), Box::new(Expr::Eps))));
                self.word(&embedded, env)
            }
            Expr::OmegaP(p) => {
                // G2: # -> S, plus every accepting set H + {#}
                let mut part = self.pair(p, env)?;
                let sep = part.sep.take().expect("pair grammar");
                let h = self.fresh("H");
                part.promote(&sep, &h);
                let s = std::mem::replace(&mut part.start, h.clone());
                part.add(&h, vec![Symbol::N(s)]);
                let extra = omega_accepting_sets(&part, &h)?;
                part.accepting.extend(extra);
                Ok(part)
            }
            _ => Err(Self::sort_err(e, Sort::T)),
        }
    }

    fn pair(&mut self, e: &Expr, env: &mut BTreeMap<Var, Letter>) -> Result<Part, CompileError> {
        match e {
            Expr::Times(l, r) => {
                let mut part = self.word(l, env)?;
                let s1 = part.start.clone();
                let s2 = part.absorb(self.word(r, env)?);
                let sep = Letter::new(&self.fresh("#"));
                let s = self.fresh("N");
                part.nonterminals.push(s.clone());
                part.terminals.insert(sep.clone());
                part.add(&s, vec![Symbol::N(s1), Symbol::T(sep.clone()), Symbol::N(s2)]);
                part.start = s;
                part.sep = Some(sep);
                Ok(part)
            }
            Expr::PlusP(l, r) => {
                let mut part = self.pair(l, env)?;
                let right = self.pair(r, env)?;
                let (sep1, sep2) = (part.sep.take().unwrap(), right.sep.clone().unwrap());
                let s1 = part.start.clone();
                let s2 = part.absorb(right);
                let sep = Letter::new(&self.fresh("#"));
                part.terminals.insert(sep.clone());
                for old in [sep1, sep2] {
                    let h = self.fresh("H");
                    part.promote(&old, &h);
                    part.add(&h, vec![Symbol::T(sep.clone())]);
                }
                let s = self.fresh("N");
                part.nonterminals.push(s.clone());
                part.add(&s, vec![Symbol::N(s1)]);
                part.add(&s, vec![Symbol::N(s2)]);
                part.start = s;
                part.sep = Some(sep);
                Ok(part)
            }
            Expr::DotP(l, r) => {
                // substitute the second pair language for the first separator
                let mut part = self.pair(l, env)?;
                let right = self.pair(r, env)?;
                let sep1 = part.sep.take().unwrap();
                let sep2 = right.sep.clone().unwrap();
                let s2 = part.absorb(right);
                let h = self.fresh("H");
                part.promote(&sep1, &h);
                part.add(&h, vec![Symbol::N(s2)]);
                part.sep = Some(sep2);
                Ok(part)
            }
            Expr::StarP(p) => {
                // G1: # -> #' | S
                let mut part = self.pair(p, env)?;
                let sep = part.sep.take().unwrap();
                let h = self.fresh("H");
                part.promote(&sep, &h);
                let new_sep = Letter::new(&self.fresh("#"));
                part.terminals.insert(new_sep.clone());
                let s = std::mem::replace(&mut part.start, h.clone());
                part.add(&h, vec![Symbol::T(new_sep.clone())]);
                part.add(&h, vec![Symbol::N(s)]);
                part.sep = Some(new_sep);
                Ok(part)
            }
            _ => Err(Self::sort_err(e, Sort::P)),
        }
    }
}

/// The sets `H + {h}` that are strongly connected, for `H` inside the
/// strongly connected component of `h`. Other sets cannot be the set of
/// nonterminals repeating infinitely often on a path.
fn omega_accepting_sets(part: &Part, h: &str) -> Result<Vec<BTreeSet<String>>, CompileError> {
    let mut succ: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    for p in &part.productions {
        for s in &p.rhs {
            if let Symbol::N(n) = s {
                succ.entry(p.head.as_str()).or_default().insert(n.as_str());
            }
        }
    }
    let reach = |from: &str, within: &BTreeSet<&str>, forward: bool| -> BTreeSet<String> {
        let mut seen = BTreeSet::new();
        let mut stack = vec![from.to_string()];
        while let Some(c) = stack.pop() {
            let next: Vec<&str> = if forward {
                succ.get(c.as_str()).into_iter().flatten().copied().filter(|d| within.contains(d)).collect()
            } else {
                within
                    .iter()
                    .copied()
                    .filter(|d| succ.get(d).is_some_and(|s| s.contains(c.as_str())))
                    .collect()
            };
            for d in next {
                if seen.insert(d.to_string()) {
                    stack.push(d.to_string());
                }
            }
        }
        seen
    };
    let all: BTreeSet<&str> = part.nonterminals.iter().map(String::as_str).collect();
    let fwd = reach(h, &all, true);
    let bwd = reach(h, &all, false);
    let component: Vec<String> = fwd.intersection(&bwd).filter(|n| *n != h).cloned().collect();
    if component.len() > MAX_OMEGA_COMPONENT {
        return Err(CompileError::ComponentTooLarge(component.len()));
    }
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << component.len()) {
        let set: BTreeSet<&str> = component
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, n)| n.as_str())
            .chain([h])
            .collect();
        let f = reach(h, &set, true);
        let b = reach(h, &set, false);
        if f.len() == set.len() && b.len() == set.len() {
            out.push(set.into_iter().map(String::from).collect());
        }
    }
    Ok(out)
}

fn builder_for(e: &Expr) -> Builder {
    Builder {
        counter: 0,
        reserved: e.letters().iter().map(|a| a.as_str().to_string()).collect(),
    }
}

/// Compiles a closed, well-sorted expression.
pub fn compile(e: &Expr) -> Result<Compiled, CompileError> {
    e.sort().map_err(CompileError::SortMismatch)?;
    if let Some(x) = crate::expr::free_vars(e).into_iter().next() {
        return Err(CompileError::NotClosed(x));
    }
    let mut b = builder_for(e);
    let mut env = BTreeMap::new();
    Ok(match e.head_sort() {
        Sort::T => Compiled::Word(b.word(e, &mut env)?.finish()),
        Sort::P => {
            let mut part = b.pair(e, &mut env)?;
            let sep = part.sep.take().unwrap();
            Compiled::Pair(PairGrammar {
                grammar: part.finish(),
                sep,
            })
        }
    })
}

/// Compiles a closed sort-T expression to a grammar.
pub fn compile_word(e: &Expr) -> Result<Mcfg, CompileError> {
    match compile(e)? {
        Compiled::Word(g) => Ok(g),
        Compiled::Pair(_) => Err(CompileError::SortMismatch(SortError {
            expected: Sort::T,
            found: Sort::P,
            context: e.to_string(),
        })),
    }
}

/// Replaces every occurrence of terminal `letter` in `g` independently by
/// a word of `h`. Nonterminals of `h` that clash with those of `g` are
/// renamed.
pub fn substitute_language(g: &Mcfg, letter: &Letter, h: &Mcfg) -> Result<Mcfg, CompileError> {
    if !g.terminals.contains(letter) {
        return Err(CompileError::NotATerminal(letter.as_str().to_string()));
    }
    let mut taken: BTreeSet<String> = g.nonterminals.iter().cloned().collect();
    taken.extend(g.terminals.iter().map(|a| a.as_str().to_string()));
    taken.extend(h.terminals.iter().map(|a| a.as_str().to_string()));
    let mut rename = BTreeMap::new();
    for n in &h.nonterminals {
        let mut name = n.clone();
        let mut k = 0;
        while taken.contains(&name) {
            k += 1;
            name = format!("{n}_{k}");
        }
        taken.insert(name.clone());
        rename.insert(n.clone(), name);
    }
    let bridge = {
        let mut k = 0;
        let mut name = format!("L_{}", letter.as_str().chars().filter(|c| c.is_alphanumeric()).collect::<String>());
        while taken.contains(&name) {
            k += 1;
            name = format!("L{k}");
        }
        name
    };
    for t in h.terminals.iter().filter(|t| *t != letter) {
        if g.nonterminals.iter().any(|n| n == t.as_str()) {
            return Err(CompileError::AlphabetClash(t.as_str().to_string()));
        }
    }

    let mut part = Part {
        nonterminals: g.nonterminals.clone(),
        terminals: g.terminals.clone(),
        productions: g.productions.clone(),
        accepting: g.accepting.clone(),
        start: g.start.clone(),
        sep: None,
    };
    part.promote(letter, &bridge);
    part.terminals.extend(h.terminals.iter().cloned());
    part.nonterminals.extend(h.nonterminals.iter().map(|n| rename[n].clone()));
    for p in &h.productions {
        let rhs = p
            .rhs
            .iter()
            .map(|s| match s {
                Symbol::N(n) => Symbol::N(rename[n].clone()),
                t => t.clone(),
            })
            .collect();
        part.add(&rename[&p.head], rhs);
    }
    part.accepting.extend(h.accepting.iter().map(|f| f.iter().map(|n| rename[n].clone()).collect()));
    part.add(&bridge, vec![Symbol::N(rename[&h.start].clone())]);
    let mut nts = part.nonterminals;
    nts.retain(|n| *n != g.start);
    nts.insert(0, g.start.clone());
    let out = Mcfg::new(nts, part.terminals, part.productions, &g.start, part.accepting);
    out.validate().map_err(|e| CompileError::AlphabetClash(e.to_string()))?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::{eval, eval_system, Bounds};
    use crate::expr::parse;
    use crate::grammar::{build_equation_system, enumerate_finite_derivations, parse_grammar, var_name};

    fn finite_words(g: &Mcfg, n: usize) -> BTreeSet<String> {
        enumerate_finite_derivations(g, &g.start, n)
            .words()
            .unwrap()
            .iter()
            .map(|w| w.to_string())
            .collect()
    }

    fn set(xs: &[&str]) -> BTreeSet<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn single_letter() {
        let g = compile_word(&parse("a").unwrap()).unwrap();
        assert_eq!(g.productions.len(), 1);
        assert!(g.accepting.is_empty());
        assert_eq!(finite_words(&g, 10), set(&["a"]));
    }

    #[test]
    fn outputs_validate() {
        for src in [
            "a + b.c",
            "mu x.(a.x + eps)",
            "(a >< b)^w",
            "((a >< b) + (c >< eps))^* . (eps >< a)",
            "mu x.((x >< x)^w + a + b + eps)",
            "mu x.(x^w + a)",
            "empty",
        ] {
            let c = compile(&parse(src).unwrap()).unwrap();
            assert_eq!(c.grammar().validate().map(|_| ()), Ok(()), "{src}");
        }
    }

    #[test]
    fn finite_languages() {
        let g = compile_word(&parse("(a + b).c + eps").unwrap()).unwrap();
        assert_eq!(finite_words(&g, 20), set(&["eps", "ac", "bc"]));
        let g = compile_word(&parse("mu x.(a.x + b)").unwrap()).unwrap();
        let words = finite_words(&g, 30);
        assert!(words.contains("aab") && words.contains("b"));
        assert!(words.iter().all(|w| w.ends_with('b')));
    }

    #[test]
    fn pair_grammars_have_one_separator() {
        let c = compile(&parse("((a >< b) . (c >< d))^*").unwrap()).unwrap();
        let Compiled::Pair(p) = c else { panic!() };
        let l = enumerate_finite_derivations(&p.grammar, &p.grammar.start, 40);
        let sep = p.sep.to_string();
        let words: BTreeSet<String> = l.words().unwrap().iter().map(|w| w.to_string()).collect();
        assert!(words.contains(&sep));
        assert!(words.contains(&format!("ac{sep}db")));
        assert!(words.contains(&format!("acac{sep}dbdb")));
        for w in &words {
            assert_eq!(w.matches(&sep).count(), 1, "{w}");
        }
    }

    #[test]
    fn omega_matches_evaluation() {
        let e = parse("(a >< b)^w").unwrap();
        let g = compile_word(&e).unwrap();
        let b = Bounds::default();
        let sys = build_equation_system(&g).unwrap();
        let sol = eval_system(&sys, &b).unwrap();
        let direct = eval(&e, &BTreeMap::new(), &b).unwrap();
        assert_eq!(sol[&var_name(&g.start)], direct);
    }

    #[test]
    fn g2_accepting_sets_are_strongly_connected() {
        let g = compile_word(&parse("((a >< b) + (c >< d))^w").unwrap()).unwrap();
        assert!(!g.accepting.is_empty());
        for f in &g.accepting {
            assert!(f.iter().any(|n| n.starts_with('H')));
        }
    }

    #[test]
    fn substitution() {
        let g = parse_grammar("terminals: a b '#'\nS -> a '#' b\n").unwrap();
        let h = parse_grammar("T -> c\n").unwrap();
        let r = substitute_language(&g, &Letter::new("#"), &h).unwrap();
        assert_eq!(finite_words(&r, 10), set(&["acb"]));

        let same = parse_grammar("S -> a\n").unwrap();
        let id = substitute_language(&same, &Letter::new("a"), &parse_grammar("S -> a\n").unwrap()).unwrap();
        assert_eq!(finite_words(&id, 10), set(&["a"]));

        // item 3: uv#v'u'
        let l1 = parse_grammar("terminals: a b '#'\nS -> a '#' b | '#'\n").unwrap();
        let l2 = parse_grammar("terminals: c d '$'\nS -> c '$' d\n").unwrap();
        let r = substitute_language(&l1, &Letter::new("#"), &l2).unwrap();
        assert_eq!(finite_words(&r, 20), set(&["ac'$'db", "c'$'d"]));

        assert!(matches!(
            substitute_language(&g, &Letter::new("z"), &h),
            Err(CompileError::NotATerminal(_))
        ));
    }

    #[test]
    fn rejects_open_expressions() {
        assert_eq!(compile(&crate::expr::var("x")), Err(CompileError::NotClosed("x".into())));
    }
}
