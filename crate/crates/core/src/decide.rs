//! Deciding whether a closed expression denotes only well-ordered words.
//!
//! The pipeline removes subexpressions denoting the empty set, replaces
//! every maximal subexpression denoting `{eps}` by `eps`, and then checks
//! that every `t1 >< t2` has `t2 = eps`. Emptiness is a Horn-clause
//! propagation, symbol sets use small-to-large merging, so the whole run
//! takes `O(n log^2 n)` time.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::expr::{Expr, Sort, SortError, Var};
use crate::word::Letter;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecideError {
    #[error("expression is not closed: free variable `{0}`")]
    NotClosed(Var),
    #[error("{0}")]
    SortMismatch(SortError),
    #[error("symbol sets are only defined once empty subexpressions are removed")]
    PreconditionViolated,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    WellOrdered,
    /// Some `t1 >< t2` keeps a right argument other than `eps`.
    NotWellOrdered {
        /// Steps from the root to the offending pair expression.
        path: Vec<String>,
        witness: Expr,
    },
    EmptyLanguage,
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::WellOrdered => "WellOrdered",
            Verdict::NotWellOrdered { .. } => "NotWellOrdered",
            Verdict::EmptyLanguage => "EmptyLanguage",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Verdict::WellOrdered => 0,
            Verdict::NotWellOrdered { .. } => 1,
            Verdict::EmptyLanguage => 2,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Symbols of an expression: letters and free variables.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sym {
    Letter(Letter),
    Var(Var),
}

impl fmt::Display for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sym::Letter(a) => write!(f, "{a}"),
            Sym::Var(x) => f.write_str(x),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Letter(u32),
    Eps,
    Empty,
    Var(u32),
    Plus,
    Dot,
    Mu,
    OmegaP,
    OmegaW,
    Times,
    PlusP,
    DotP,
    StarP,
}

const NONE: u32 = u32::MAX;

#[derive(Clone, Copy, Debug)]
struct Node {
    kind: Kind,
    kids: [u32; 2],
    parent: u32,
}

impl Node {
    fn children(&self) -> impl Iterator<Item = u32> {
        self.kids.into_iter().filter(|&k| k != NONE)
    }

    fn sort(&self) -> Sort {
        match self.kind {
            Kind::Times | Kind::PlusP | Kind::DotP | Kind::StarP => Sort::P,
            _ => Sort::T,
        }
    }
}

/// An expression flattened in pre-order (parents before children), with
/// variables resolved to their binders.
struct Arena<'e> {
    nodes: Vec<Node>,
    letters: Vec<&'e Letter>,
    binder_names: HashMap<u32, &'e str>,
    exprs: Vec<&'e Expr>,
}

enum Visit<'e> {
    Enter(&'e Expr, u32, usize),
    Leave(&'e str),
}

impl<'e> Arena<'e> {
    fn build(root: &'e Expr) -> Result<Self, DecideError> {
        let mut nodes = Vec::new();
        let mut exprs = Vec::new();
        let mut letters: Vec<&Letter> = Vec::new();
        let mut letter_ids: HashMap<&Letter, u32> = HashMap::new();
        let mut scope: HashMap<&str, Vec<u32>> = HashMap::new();
        let mut binder_names = HashMap::new();
        let mut stack = vec![Visit::Enter(root, NONE, 0)];
        while let Some(v) = stack.pop() {
            let (e, parent, slot) = match v {
                Visit::Leave(x) => {
                    scope.get_mut(x).unwrap().pop();
                    continue;
                }
                Visit::Enter(e, p, s) => (e, p, s),
            };
            let id = nodes.len() as u32;
            if parent != NONE {
                let pn: &mut Node = &mut nodes[parent as usize];
                pn.kids[slot] = id;
            }
            let kind = match e {
                Expr::Letter(a) => {
                    let next = letters.len() as u32;
                    let k = *letter_ids.entry(a).or_insert_with(|| {
                        letters.push(a);
                        next
                    });
                    Kind::Letter(k)
                }
                Expr::Eps => Kind::Eps,
                Expr::Empty => Kind::Empty,
                Expr::Var(x) => match scope.get(x.as_str()).and_then(|s| s.last()) {
                    Some(&b) => Kind::Var(b),
                    None => return Err(DecideError::NotClosed(x.clone())),
                },
                Expr::Plus(..) => Kind::Plus,
                Expr::Dot(..) => Kind::Dot,
                Expr::Mu(x, _) => {
                    scope.entry(x.as_str()).or_default().push(id);
                    binder_names.insert(id, x.as_str());
                    stack.push(Visit::Leave(x.as_str()));
                    Kind::Mu
                }
                Expr::OmegaP(_) => Kind::OmegaP,
                Expr::OmegaW(_) => Kind::OmegaW,
                Expr::Times(..) => Kind::Times,
                Expr::PlusP(..) => Kind::PlusP,
                Expr::DotP(..) => Kind::DotP,
                Expr::StarP(_) => Kind::StarP,
            };
            nodes.push(Node {
                kind,
                kids: [NONE; 2],
                parent,
            });
            exprs.push(e);
            let kids = e.children();
            for (slot, c) in kids.into_iter().enumerate().rev() {
                stack.push(Visit::Enter(c, id, slot));
            }
        }
        let arena = Arena {
            nodes,
            letters,
            binder_names,
            exprs,
        };
        arena.check_sorts()?;
        Ok(arena)
    }

    fn check_sorts(&self) -> Result<(), DecideError> {
        for (i, n) in self.nodes.iter().enumerate() {
            let want: &[Sort] = match n.kind {
                Kind::Plus | Kind::Dot | Kind::Times => &[Sort::T, Sort::T],
                Kind::Mu | Kind::OmegaW => &[Sort::T],
                Kind::OmegaP | Kind::StarP => &[Sort::P],
                Kind::PlusP | Kind::DotP => &[Sort::P, Sort::P],
                _ => &[],
            };
            for (c, &s) in n.children().zip(want) {
                let child = &self.nodes[c as usize];
                if child.sort() != s {
                    return Err(DecideError::SortMismatch(SortError {
                        expected: s,
                        found: child.sort(),
                        context: self.exprs[i].to_string(),
                    }));
                }
            }
        }
        if self.nodes[0].sort() != Sort::T {
            return Err(DecideError::SortMismatch(SortError {
                expected: Sort::T,
                found: Sort::P,
                context: self.exprs[0].to_string(),
            }));
        }
        Ok(())
    }

    /// Least solution of the Horn clauses "node is nonempty".
    fn nonempty(&self) -> Vec<bool> {
        let n = self.nodes.len();
        let mut need = vec![0u32; n];
        let mut users: Vec<Vec<u32>> = vec![Vec::new(); n];
        let mut queue = VecDeque::new();
        for (i, node) in self.nodes.iter().enumerate() {
            need[i] = match node.kind {
                Kind::Letter(_) | Kind::Eps | Kind::StarP => 0,
                Kind::Empty => u32::MAX,
                Kind::Dot | Kind::Times | Kind::DotP => 2,
                _ => 1,
            };
            if let Kind::Var(b) = node.kind {
                users[b as usize].push(i as u32);
            }
            if need[i] == 0 {
                queue.push_back(i as u32);
            }
        }
        let mut ok = vec![false; n];
        while let Some(i) = queue.pop_front() {
            if ok[i as usize] {
                continue;
            }
            ok[i as usize] = true;
            let node = &self.nodes[i as usize];
            let notify = |j: u32, need: &mut Vec<u32>, queue: &mut VecDeque<u32>| {
                let j = j as usize;
                if need[j] > 0 && need[j] != u32::MAX {
                    need[j] -= 1;
                    if need[j] == 0 {
                        queue.push_back(j as u32);
                    }
                }
            };
            if node.parent != NONE {
                notify(node.parent, &mut need, &mut queue);
            }
            for &u in &users[i as usize] {
                notify(u, &mut need, &mut queue);
            }
        }
        ok
    }

    fn sym_name(&self, s: u32) -> Sym {
        let l = self.letters.len() as u32;
        if s < l {
            Sym::Letter(self.letters[s as usize].clone())
        } else {
            Sym::Var(self.binder_names[&(s - l)].to_string())
        }
    }
}

/// Per-node results of the first two pipeline stages.
struct Analysis<'e> {
    arena: Arena<'e>,
    nonempty: Vec<bool>,
    /// Only meaningful for kept nodes.
    eps_only: Vec<bool>,
    root_symbols: BTreeSet<u32>,
}

fn analyze(e: &Expr) -> Result<Analysis<'_>, DecideError> {
    let arena = Arena::build(e)?;
    let nonempty = arena.nonempty();
    let n = arena.nodes.len();
    let l = arena.letters.len() as u32;
    let mut eps_only = vec![false; n];
    let mut sets: Vec<Option<BTreeSet<u32>>> = vec![None; n];
    // children have larger indices, so a reverse scan is bottom-up
    for i in (0..n).rev() {
        if !nonempty[i] {
            continue;
        }
        let node = arena.nodes[i];
        let mut acc = match node.kind {
            Kind::Letter(a) => BTreeSet::from([a]),
            Kind::Var(b) => BTreeSet::from([l + b]),
            // an empty star body leaves only the unit pair
            _ => BTreeSet::new(),
        };
        for c in node.children() {
            if let Some(mut s) = sets[c as usize].take() {
                if s.len() > acc.len() {
                    std::mem::swap(&mut s, &mut acc);
                }
                acc.extend(s);
            }
        }
        if node.kind == Kind::Mu {
            acc.remove(&(l + i as u32));
        }
        eps_only[i] = node.sort() == Sort::T && acc.is_empty();
        sets[i] = Some(acc);
    }
    let root_symbols = sets[0].take().unwrap_or_default();
    Ok(Analysis {
        arena,
        nonempty,
        eps_only,
        root_symbols,
    })
}

/// Runs the decision procedure on a closed sort-T expression.
pub fn decide(e: &Expr) -> Result<Verdict, DecideError> {
    let a = analyze(e)?;
    if !a.nonempty[0] {
        return Ok(Verdict::EmptyLanguage);
    }
    let nodes = &a.arena.nodes;
    // live: kept and not inside a collapsed subexpression
    let mut live = vec![false; nodes.len()];
    live[0] = true;
    for i in 0..nodes.len() {
        if !live[i] || a.eps_only[i] {
            continue;
        }
        let node = nodes[i];
        if node.kind == Kind::Times {
            let right = node.kids[1] as usize;
            if !a.eps_only[right] {
                return Ok(Verdict::NotWellOrdered {
                    path: path_to(&a.arena, i),
                    witness: a.arena.exprs[i].clone(),
                });
            }
        }
        for c in node.children() {
            live[c as usize] = a.nonempty[c as usize];
        }
    }
    Ok(Verdict::WellOrdered)
}

fn step_name(kind: Kind) -> &'static str {
    match kind {
        Kind::Plus => "plus",
        Kind::Dot => "dot",
        Kind::Mu => "mu",
        Kind::OmegaP | Kind::OmegaW => "omega",
        Kind::Times => "times",
        Kind::PlusP => "plus-p",
        Kind::DotP => "dot-p",
        Kind::StarP => "star",
        _ => "leaf",
    }
}

fn path_to(arena: &Arena<'_>, mut i: usize) -> Vec<String> {
    let mut steps = Vec::new();
    while arena.nodes[i].parent != NONE {
        let p = arena.nodes[i].parent as usize;
        let node = arena.nodes[p];
        let step = if node.kids[1] == NONE {
            step_name(node.kind).to_string()
        } else {
            let slot = if node.kids[0] as usize == i { 0 } else { 1 };
            format!("{}.{slot}", step_name(node.kind))
        };
        steps.push(step);
        i = p;
    }
    steps.reverse();
    steps
}

/// Removes every subexpression denoting the empty set; `None` if the
/// whole expression does.
pub fn eliminate_empty(e: &Expr) -> Result<Option<Expr>, DecideError> {
    let a = analyze(e)?;
    Ok(rebuild(&a, 0, false))
}

/// Symbols of an expression without empty subexpressions.
pub fn symbols(e: &Expr) -> Result<BTreeSet<Sym>, DecideError> {
    let a = analyze(e)?;
    if a.nonempty.iter().any(|b| !b) {
        return Err(DecideError::PreconditionViolated);
    }
    Ok(a.root_symbols.iter().map(|&s| a.arena.sym_name(s)).collect())
}

/// Empty subexpressions removed and maximal `{eps}`-denoting ones replaced
/// by `eps`; `None` for the empty language.
pub fn collapse_epsilon(e: &Expr) -> Result<Option<Expr>, DecideError> {
    let a = analyze(e)?;
    Ok(rebuild(&a, 0, true))
}

fn rebuild(a: &Analysis<'_>, i: usize, collapse: bool) -> Option<Expr> {
    if !a.nonempty[i] {
        return None;
    }
    if collapse && a.eps_only[i] {
        return Some(Expr::Eps);
    }
    let node = a.arena.nodes[i];
    let kid = |k: usize| rebuild(a, node.kids[k] as usize, collapse);
    let b = Box::new;
    let e = a.arena.exprs[i];
    Some(match (node.kind, e) {
        (Kind::Plus | Kind::PlusP, _) => match (kid(0), kid(1)) {
            (Some(l), Some(r)) if node.kind == Kind::Plus => Expr::Plus(b(l), b(r)),
            (Some(l), Some(r)) => Expr::PlusP(b(l), b(r)),
            (Some(x), None) | (None, Some(x)) => x,
            (None, None) => return None,
        },
        (Kind::Dot, _) => Expr::Dot(b(kid(0)?), b(kid(1)?)),
        (Kind::Times, _) => Expr::Times(b(kid(0)?), b(kid(1)?)),
        (Kind::DotP, _) => Expr::DotP(b(kid(0)?), b(kid(1)?)),
        (Kind::Mu, Expr::Mu(x, _)) => Expr::Mu(x.clone(), b(kid(0)?)),
        (Kind::OmegaP, _) => Expr::OmegaP(b(kid(0)?)),
        (Kind::OmegaW, _) => Expr::OmegaW(b(kid(0)?)),
        (Kind::StarP, _) => match kid(0) {
            Some(p) => Expr::StarP(b(p)),
            None => Expr::Times(b(Expr::Eps), b(Expr::Eps)),
        },
        _ => e.clone(),
    })
}
