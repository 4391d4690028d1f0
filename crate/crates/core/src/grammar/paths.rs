use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use super::equations::bar_word;
use super::{GrammarError, Mcfg, Symbol};
use crate::expr::Expr;

/// A nonterminal occurrence `(alpha, B, beta)` in a right-hand side
/// `alpha B beta`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct GammaLetter {
    pub alpha: Vec<Symbol>,
    pub b: String,
    pub beta: Vec<Symbol>,
}

impl GammaLetter {
    pub fn recompose(&self) -> Vec<Symbol> {
        let mut w = self.alpha.clone();
        w.push(Symbol::N(self.b.clone()));
        w.extend(self.beta.iter().cloned());
        w
    }
}

fn show_word(w: &[Symbol]) -> String {
    if w.is_empty() {
        "eps".into()
    } else {
        w.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(" ")
    }
}

impl fmt::Display for GammaLetter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", show_word(&self.alpha), self.b, show_word(&self.beta))
    }
}

/// All nonterminal occurrences in right-hand sides.
pub fn gamma_alphabet(g: &Mcfg) -> BTreeSet<GammaLetter> {
    let mut out = BTreeSet::new();
    for p in &g.productions {
        for (i, s) in p.rhs.iter().enumerate() {
            if let Symbol::N(b) = s {
                out.insert(GammaLetter {
                    alpha: p.rhs[..i].to_vec(),
                    b: b.clone(),
                    beta: p.rhs[i + 1..].to_vec(),
                });
            }
        }
    }
    out
}

/// The deterministic partial Muller automaton `(F, Gamma, delta, A, {F})`.
#[derive(Clone, Debug)]
pub struct PathAutomaton {
    pub states: BTreeSet<String>,
    pub initial: String,
    pub delta: BTreeMap<(String, GammaLetter), String>,
}

impl PathAutomaton {
    pub fn new(g: &Mcfg, a: &str, f: &BTreeSet<String>) -> Self {
        let mut delta = BTreeMap::new();
        for p in &g.productions {
            if !f.contains(&p.head) {
                continue;
            }
            for (i, s) in p.rhs.iter().enumerate() {
                match s {
                    Symbol::N(d) if f.contains(d) => {
                        let gamma = GammaLetter {
                            alpha: p.rhs[..i].to_vec(),
                            b: d.clone(),
                            beta: p.rhs[i + 1..].to_vec(),
                        };
                        delta.insert((p.head.clone(), gamma), d.clone());
                    }
                    _ => {}
                }
            }
        }
        PathAutomaton {
            states: f.clone(),
            initial: a.to_string(),
            delta,
        }
    }

    pub fn step(&self, state: &str, letter: &GammaLetter) -> Option<&String> {
        self.delta.get(&(state.to_string(), letter.clone()))
    }

    /// True if `word` labels a run from the initial state back to it that
    /// visits every state.
    pub fn is_covering_cycle(&self, word: &[GammaLetter]) -> bool {
        let mut state = self.initial.clone();
        let mut seen = BTreeSet::from([state.clone()]);
        for l in word {
            match self.step(&state, l) {
                Some(next) => state = next.clone(),
                None => return false,
            }
            seen.insert(state.clone());
        }
        !word.is_empty() && state == self.initial && seen == self.states
    }
}

/// Regular expressions over `Gamma`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Regex {
    Empty,
    Eps,
    Letter(GammaLetter),
    Plus(Box<Regex>, Box<Regex>),
    Cat(Box<Regex>, Box<Regex>),
    Star(Box<Regex>),
}

impl Regex {
    pub fn plus(a: Regex, b: Regex) -> Regex {
        match (a, b) {
            (Regex::Empty, x) | (x, Regex::Empty) => x,
            (a, b) if a == b => a,
            (a, b) => Regex::Plus(Box::new(a), Box::new(b)),
        }
    }

    pub fn cat(a: Regex, b: Regex) -> Regex {
        match (a, b) {
            (Regex::Empty, _) | (_, Regex::Empty) => Regex::Empty,
            (Regex::Eps, x) | (x, Regex::Eps) => x,
            (a, b) => Regex::Cat(Box::new(a), Box::new(b)),
        }
    }

    pub fn star(a: Regex) -> Regex {
        match a {
            Regex::Empty | Regex::Eps => Regex::Eps,
            s @ Regex::Star(_) => s,
            a => Regex::Star(Box::new(a)),
        }
    }

    /// Words of length at most `max_len` in the language.
    pub fn words(&self, max_len: usize) -> BTreeSet<Vec<GammaLetter>> {
        match self {
            Regex::Empty => BTreeSet::new(),
            Regex::Eps => BTreeSet::from([vec![]]),
            Regex::Letter(l) if max_len > 0 => BTreeSet::from([vec![l.clone()]]),
            Regex::Letter(_) => BTreeSet::new(),
            Regex::Plus(a, b) => {
                let mut s = a.words(max_len);
                s.extend(b.words(max_len));
                s
            }
            Regex::Cat(a, b) => {
                let bs = b.words(max_len);
                let mut out = BTreeSet::new();
                for u in a.words(max_len) {
                    for v in &bs {
                        if u.len() + v.len() <= max_len {
                            out.insert([u.clone(), v.clone()].concat());
                        }
                    }
                }
                out
            }
            Regex::Star(a) => {
                let base: Vec<_> = a.words(max_len).into_iter().filter(|w| !w.is_empty()).collect();
                let mut out = BTreeSet::from([vec![]]);
                let mut frontier = vec![vec![]];
                while let Some(u) = frontier.pop() {
                    for v in &base {
                        if u.len() + v.len() <= max_len {
                            let w = [u.clone(), v.clone()].concat();
                            if out.insert(w.clone()) {
                                frontier.push(w);
                            }
                        }
                    }
                }
                out
            }
        }
    }
}

impl fmt::Display for Regex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(r: &Regex, min: u8, out: &mut String) {
            let level = match r {
                Regex::Plus(..) => 0,
                Regex::Cat(..) => 1,
                _ => 2,
            };
            if level < min {
                out.push('(');
            }
            match r {
                Regex::Empty => out.push_str("empty"),
                Regex::Eps => out.push_str("eps"),
                Regex::Letter(l) => out.push_str(&l.to_string()),
                Regex::Plus(a, b) => {
                    go(a, 0, out);
                    out.push_str(" + ");
                    go(b, 1, out);
                }
                Regex::Cat(a, b) => {
                    go(a, 1, out);
                    out.push_str(" . ");
                    go(b, 2, out);
                }
                Regex::Star(a) => {
                    go(a, 2, out);
                    out.push('*');
                }
            }
            if level < min {
                out.push(')');
            }
        }
        let mut s = String::new();
        go(self, 0, &mut s);
        f.write_str(&s)
    }
}

/// A regular expression whose ω-power is the set of infinite paths from
/// `a` that stay in `f` and visit each state of `f` infinitely often.
///
/// It denotes the cycles from `a` back to `a` that cover `f` and end at
/// the first return to `a` after the last new state is visited.
pub fn r_regex(g: &Mcfg, a: &str, f: &BTreeSet<String>) -> Result<Regex, GrammarError> {
    if !f.contains(a) {
        return Err(GrammarError::UnknownNonterminal(a.to_string()));
    }
    let aut = PathAutomaton::new(g, a, f);
    let full: BTreeSet<String> = f.clone();

    // Product states: index 0 is the start copy of (a, {a}), index 1 the
    // final sink (a, f); the rest are discovered breadth-first.
    let mut index: HashMap<(String, BTreeSet<String>), usize> = HashMap::new();
    let mut edges: Vec<Vec<(GammaLetter, usize)>> = vec![Vec::new(), Vec::new()];
    let mut keys: Vec<(String, BTreeSet<String>)> =
        vec![(a.to_string(), BTreeSet::from([a.to_string()])), (a.to_string(), full.clone())];
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let (c, seen) = keys[i].clone();
        for ((from, gamma), d) in aut.delta.range((c.clone(), min_letter())..) {
            if *from != c {
                break;
            }
            let mut next_seen = seen.clone();
            next_seen.insert(d.clone());
            let j = if *d == a && next_seen == full {
                1
            } else {
                let key = (d.clone(), next_seen);
                *index.entry(key.clone()).or_insert_with(|| {
                    keys.push(key);
                    edges.push(Vec::new());
                    queue.push_back(keys.len() - 1);
                    keys.len() - 1
                })
            };
            edges[i].push((gamma.clone(), j));
        }
    }

    // keep states on some path from 0 to 1
    let n = keys.len();
    let mut co = vec![false; n];
    co[1] = true;
    loop {
        let mut changed = false;
        for i in 0..n {
            if !co[i] && edges[i].iter().any(|&(_, j)| co[j]) {
                co[i] = true;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    if !co[0] {
        return Err(GrammarError::EmptyRoot {
            nonterminal: a.to_string(),
        });
    }

    let mut label: BTreeMap<(usize, usize), Regex> = BTreeMap::new();
    for (i, out) in edges.iter().enumerate() {
        if !co[i] {
            continue;
        }
        for (gamma, j) in out {
            if co[*j] {
                let old = label.remove(&(i, *j)).unwrap_or(Regex::Empty);
                label.insert((i, *j), Regex::plus(old, Regex::Letter(gamma.clone())));
            }
        }
    }

    let mut alive: BTreeSet<usize> = (2..n).filter(|&i| co[i]).collect();
    while !alive.is_empty() {
        let degree = |k: usize| {
            let ins = label.keys().filter(|&&(i, j)| j == k && i != k).count();
            let outs = label.keys().filter(|&&(i, j)| i == k && j != k).count();
            ins * outs
        };
        let k = *alive.iter().min_by_key(|&&k| (degree(k), k)).unwrap();
        alive.remove(&k);
        let loop_re = Regex::star(label.remove(&(k, k)).unwrap_or(Regex::Empty));
        let ins: Vec<(usize, Regex)> = label.iter().filter(|((_, j), _)| *j == k).map(|(&(i, _), r)| (i, r.clone())).collect();
        let outs: Vec<(usize, Regex)> = label.iter().filter(|((i, _), _)| *i == k).map(|(&(_, j), r)| (j, r.clone())).collect();
        label.retain(|&(i, j), _| i != k && j != k);
        for (i, rin) in &ins {
            for (j, rout) in &outs {
                let path = Regex::cat(Regex::cat(rin.clone(), loop_re.clone()), rout.clone());
                let old = label.remove(&(*i, *j)).unwrap_or(Regex::Empty);
                label.insert((*i, *j), Regex::plus(old, path));
            }
        }
    }
    match label.remove(&(0, 1)) {
        Some(r) if r != Regex::Empty => Ok(r),
        _ => Err(GrammarError::EmptyRoot {
            nonterminal: a.to_string(),
        }),
    }
}

fn min_letter() -> GammaLetter {
    GammaLetter {
        alpha: Vec::new(),
        b: String::new(),
        beta: Vec::new(),
    }
}

/// The homomorphism `gamma -> alpha-bar >< beta-bar` on regular expressions.
pub fn bar_translate(r: &Regex) -> Expr {
    let b = Box::new;
    match r {
        Regex::Empty => Expr::Times(b(Expr::Empty), b(Expr::Empty)),
        Regex::Eps => Expr::Times(b(Expr::Eps), b(Expr::Eps)),
        Regex::Letter(l) => Expr::Times(b(bar_word(&l.alpha)), b(bar_word(&l.beta))),
        Regex::Plus(x, y) => Expr::PlusP(b(bar_translate(x)), b(bar_translate(y))),
        Regex::Cat(x, y) => Expr::DotP(b(bar_translate(x)), b(bar_translate(y))),
        Regex::Star(x) => Expr::StarP(b(bar_translate(x))),
    }
}
