//! Bounded semantics: finite under-approximations of the languages
//! denoted by expressions and equation systems.
//!
//! ω-powers are witnessed by eventually periodic terms only, so every
//! result is a subset of the true language.

mod gauss;

pub use gauss::gaussian_eliminate;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::expr::{free_vars, Expr, Sort, Var};
use crate::grammar::EquationSystem;
use crate::word::{self, PairTerm, WordTerm};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Bounds {
    /// Kleene iterations per `mu` and per system solve.
    pub mu_iterations: usize,
    /// Maximum number of factors in a pair-star product.
    pub star_unroll: usize,
    /// Maximum number of factors before the period of an ω-power.
    pub omega_prefix_len: usize,
    /// Maximum number of factors in the period of an ω-power.
    pub omega_period_len: usize,
    /// Node-count cap on word terms.
    pub max_term_size: usize,
    /// Abort when an intermediate set grows beyond this many elements.
    pub max_elements: usize,
    /// Abort when one operation examines more than this many candidate products.
    pub max_work: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            mu_iterations: 4,
            star_unroll: 2,
            omega_prefix_len: 1,
            omega_period_len: 1,
            max_term_size: 20,
            max_elements: 100_000,
            max_work: 1_000_000,
        }
    }
}

impl Bounds {
    pub fn with_mu(self, mu_iterations: usize) -> Self {
        Bounds { mu_iterations, ..self }
    }

    pub fn with_cap(self, max_term_size: usize) -> Self {
        Bounds { max_term_size, ..self }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("unbound variable `{0}`")]
    UnboundVariable(Var),
    #[error("expected a {expected} expression, found `{found}`")]
    SortMismatch { expected: Sort, found: String },
    #[error("evaluation exceeded {limit} elements; tighten the bounds")]
    BudgetExceeded { limit: usize },
    #[error("evaluation examined more than {limit} candidates in one operation; tighten the bounds")]
    WorkExceeded { limit: usize },
    #[error("invalid bounds: {0}")]
    InvalidBounds(&'static str),
}

/// A finite set of canonical word or pair terms.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LangApprox {
    T(BTreeSet<WordTerm>),
    P(BTreeSet<PairTerm>),
}

impl LangApprox {
    pub fn sort(&self) -> Sort {
        match self {
            LangApprox::T(_) => Sort::T,
            LangApprox::P(_) => Sort::P,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            LangApprox::T(s) => s.len(),
            LangApprox::P(s) => s.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn words(&self) -> Option<&BTreeSet<WordTerm>> {
        match self {
            LangApprox::T(s) => Some(s),
            LangApprox::P(_) => None,
        }
    }

    pub fn pairs(&self) -> Option<&BTreeSet<PairTerm>> {
        match self {
            LangApprox::P(s) => Some(s),
            LangApprox::T(_) => None,
        }
    }

    pub fn is_subset(&self, other: &LangApprox) -> bool {
        match (self, other) {
            (LangApprox::T(a), LangApprox::T(b)) => a.is_subset(b),
            (LangApprox::P(a), LangApprox::P(b)) => a.is_subset(b),
            _ => self.is_empty(),
        }
    }

    /// The finite words of a word language.
    pub fn finite_part(&self) -> LangApprox {
        match self {
            LangApprox::T(s) => LangApprox::T(s.iter().filter(|w| w.is_finite()).cloned().collect()),
            LangApprox::P(s) => LangApprox::P(s.iter().filter(|p| p.left.is_finite() && p.right.is_finite()).cloned().collect()),
        }
    }

    /// Rendered terms, sorted by length and then lexicographically.
    pub fn lines(&self) -> Vec<String> {
        let mut v: Vec<String> = match self {
            LangApprox::T(s) => s.iter().map(|w| w.to_string()).collect(),
            LangApprox::P(s) => s.iter().map(|p| p.to_string()).collect(),
        };
        let key = |s: &String| if s == "eps" { 0 } else { s.len() };
        v.sort_by(|a, b| key(a).cmp(&key(b)).then_with(|| a.cmp(b)));
        v
    }
}

impl fmt::Display for LangApprox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in self.lines() {
            writeln!(f, "{l}")?;
        }
        Ok(())
    }
}

pub type Env = BTreeMap<Var, BTreeSet<WordTerm>>;

fn check_budget(n: usize, b: &Bounds) -> Result<(), EvalError> {
    if n > b.max_elements {
        Err(EvalError::BudgetExceeded { limit: b.max_elements })
    } else {
        Ok(())
    }
}

fn check_work(rows: usize, row_len: usize, b: &Bounds) -> Result<(), EvalError> {
    if rows.saturating_mul(row_len) > b.max_work {
        Err(EvalError::WorkExceeded { limit: b.max_work })
    } else {
        Ok(())
    }
}

fn fits(w: &WordTerm, b: &Bounds) -> bool {
    w.size() <= b.max_term_size
}

fn fits_pair(p: &PairTerm, b: &Bounds) -> bool {
    fits(&p.left, b) && fits(&p.right, b)
}

/// `{uv : u in l1, v in l2}`, capped.
pub fn concat(l1: &BTreeSet<WordTerm>, l2: &BTreeSet<WordTerm>, b: &Bounds) -> Result<BTreeSet<WordTerm>, EvalError> {
    let mut out = BTreeSet::new();
    for (i, u) in l1.iter().enumerate() {
        check_work(i + 1, l2.len(), b)?;
        for v in l2 {
            let w = word::cat(u, v);
            if fits(&w, b) {
                out.insert(w);
            }
        }
        check_budget(out.len(), b)?;
    }
    Ok(out)
}

/// `{(u, v) : u in l1, v in l2}`.
pub fn times(l1: &BTreeSet<WordTerm>, l2: &BTreeSet<WordTerm>, b: &Bounds) -> Result<BTreeSet<PairTerm>, EvalError> {
    check_budget(l1.len().saturating_mul(l2.len()), b)?;
    let mut out = BTreeSet::new();
    for u in l1.iter().filter(|u| fits(u, b)) {
        for v in l2.iter().filter(|v| fits(v, b)) {
            out.insert(PairTerm::new(u.clone(), v.clone()));
        }
    }
    Ok(out)
}

/// Pair product `{(uu', v'v)}`, capped.
pub fn pair_concat(p1: &BTreeSet<PairTerm>, p2: &BTreeSet<PairTerm>, b: &Bounds) -> Result<BTreeSet<PairTerm>, EvalError> {
    let mut out = BTreeSet::new();
    for (i, p) in p1.iter().enumerate() {
        check_work(i + 1, p2.len(), b)?;
        for q in p2 {
            let r = word::pair_product(p, q);
            if fits_pair(&r, b) {
                out.insert(r);
            }
        }
        check_budget(out.len(), b)?;
    }
    Ok(out)
}

/// Products of between `min` and `max` factors from `l`, where a product
/// of zero factors is `(eps, eps)`.
fn pair_powers(l: &BTreeSet<PairTerm>, min: usize, max: usize, b: &Bounds) -> Result<BTreeSet<PairTerm>, EvalError> {
    let mut out = BTreeSet::new();
    let mut level = BTreeSet::from([PairTerm::unit()]);
    if min == 0 {
        out.insert(PairTerm::unit());
    }
    for k in 1..=max {
        level = pair_concat(&level, l, b)?;
        if k >= min {
            out.extend(level.iter().cloned());
        }
        check_budget(out.len(), b)?;
        if level.is_empty() {
            break;
        }
    }
    Ok(out)
}

/// Pair star: `(eps, eps)` and products of up to `star_unroll` pairs.
pub fn pair_star(l: &BTreeSet<PairTerm>, b: &Bounds) -> Result<BTreeSet<PairTerm>, EvalError> {
    pair_powers(l, 0, b.star_unroll, b)
}

/// Pair ω-power, witnessed by `U u^w v^-w V` where `(U, V)` is a product of
/// at most `omega_prefix_len` pairs and `(u, v)` of 1 to `omega_period_len`.
pub fn pair_omega_lang(l: &BTreeSet<PairTerm>, b: &Bounds) -> Result<BTreeSet<WordTerm>, EvalError> {
    let heads = pair_powers(l, 0, b.omega_prefix_len, b)?;
    let periods = pair_powers(l, 1, b.omega_period_len.max(1), b)?;
    check_budget(heads.len().saturating_mul(periods.len()), b)?;
    let mut out = BTreeSet::new();
    for (i, h) in heads.iter().enumerate() {
        check_work(i + 1, periods.len(), b)?;
        for p in &periods {
            let w = word::pair_omega_folded(h, p);
            if fits(&w, b) {
                out.insert(w);
            }
        }
    }
    Ok(out)
}

/// Word ω-power `{U u^w}`, with the same witnesses as the embedding
/// `(T >< eps)^w`.
pub fn word_omega_lang(l: &BTreeSet<WordTerm>, b: &Bounds) -> Result<BTreeSet<WordTerm>, EvalError> {
    let pairs: BTreeSet<PairTerm> = l.iter().filter(|u| fits(u, b)).map(|u| PairTerm::new(u.clone(), WordTerm::Eps)).collect();
    pair_omega_lang(&pairs, b)
}

/// Evaluates a well-sorted expression whose free variables are bound in
/// `env`.
pub fn eval(e: &Expr, env: &BTreeMap<Var, LangApprox>, b: &Bounds) -> Result<LangApprox, EvalError> {
    if b.max_term_size == 0 {
        return Err(EvalError::InvalidBounds("max_term_size must be at least 1"));
    }
    let mut words = Env::new();
    for (x, l) in env {
        match l {
            LangApprox::T(s) => {
                words.insert(x.clone(), s.clone());
            }
            LangApprox::P(_) => {
                return Err(EvalError::SortMismatch {
                    expected: Sort::T,
                    found: x.clone(),
                })
            }
        }
    }
    match e.head_sort() {
        Sort::T => eval_t(e, &mut words, b).map(LangApprox::T),
        Sort::P => eval_p(e, &mut words, b).map(LangApprox::P),
    }
}

fn mismatch(expected: Sort, e: &Expr) -> EvalError {
    EvalError::SortMismatch {
        expected,
        found: e.to_string(),
    }
}

pub(crate) fn eval_t(e: &Expr, env: &mut Env, b: &Bounds) -> Result<BTreeSet<WordTerm>, EvalError> {
    Ok(match e {
        Expr::Letter(a) => BTreeSet::from([WordTerm::Letter(a.clone())]),
        Expr::Eps => BTreeSet::from([WordTerm::Eps]),
        Expr::Empty => BTreeSet::new(),
        Expr::Var(x) => env.get(x).cloned().ok_or_else(|| EvalError::UnboundVariable(x.clone()))?,
        Expr::Plus(l, r) => {
            let mut s = eval_t(l, env, b)?;
            s.extend(eval_t(r, env, b)?);
            check_budget(s.len(), b)?;
            s
        }
        Expr::Dot(l, r) => {
            let l = eval_t(l, env, b)?;
            let r = eval_t(r, env, b)?;
            concat(&l, &r, b)?
        }
        Expr::Mu(x, body) if !free_vars(body).contains(x) => {
            if b.mu_iterations == 0 {
                BTreeSet::new()
            } else {
                eval_t(body, env, b)?
            }
        }
        Expr::Mu(x, body) => {
            let saved = env.insert(x.clone(), BTreeSet::new());
            let mut cur = BTreeSet::new();
            let mut result = Ok(());
            for _ in 0..b.mu_iterations {
                env.insert(x.clone(), cur.clone());
                match eval_t(body, env, b) {
                    Ok(next) => {
                        if next == cur {
                            break;
                        }
                        cur = next;
                    }
                    Err(err) => {
                        result = Err(err);
                        break;
                    }
                }
            }
            match saved {
                Some(s) => env.insert(x.clone(), s),
                None => env.remove(x),
            };
            result?;
            cur
        }
        Expr::OmegaP(p) => {
            let p = eval_p(p, env, b)?;
            pair_omega_lang(&p, b)?
        }
        Expr::OmegaW(t) => {
            let t = eval_t(t, env, b)?;
            word_omega_lang(&t, b)?
        }
        _ => return Err(mismatch(Sort::T, e)),
    })
}

pub(crate) fn eval_p(e: &Expr, env: &mut Env, b: &Bounds) -> Result<BTreeSet<PairTerm>, EvalError> {
    Ok(match e {
        Expr::Times(l, r) => {
            let l = eval_t(l, env, b)?;
            let r = eval_t(r, env, b)?;
            times(&l, &r, b)?
        }
        Expr::PlusP(l, r) => {
            let mut s = eval_p(l, env, b)?;
            s.extend(eval_p(r, env, b)?);
            check_budget(s.len(), b)?;
            s
        }
        Expr::DotP(l, r) => {
            let l = eval_p(l, env, b)?;
            let r = eval_p(r, env, b)?;
            pair_concat(&l, &r, b)?
        }
        Expr::StarP(p) => {
            let p = eval_p(p, env, b)?;
            pair_star(&p, b)?
        }
        _ => return Err(mismatch(Sort::P, e)),
    })
}

/// Solves a system by simultaneous Kleene iteration from the empty
/// assignment, for at most `mu_iterations` rounds.
pub fn eval_system(sys: &EquationSystem, b: &Bounds) -> Result<BTreeMap<Var, LangApprox>, EvalError> {
    let mut cur: Env = sys.vars().map(|x| (x.clone(), BTreeSet::new())).collect();
    for _ in 0..b.mu_iterations {
        let mut next = Env::new();
        let mut env = cur.clone();
        for (x, rhs) in &sys.equations {
            next.insert(x.clone(), eval_t(rhs, &mut env, b)?);
        }
        if next == cur {
            break;
        }
        cur = next;
    }
    Ok(cur.into_iter().map(|(x, s)| (x, LangApprox::T(s))).collect())
}
