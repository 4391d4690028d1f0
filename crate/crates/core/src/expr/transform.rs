use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use super::{Expr, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ToWError {
    #[error("not in the well-ordered shape: `{0}` has a right component other than eps")]
    NotWellOrderedShape(String),
}

pub fn free_vars(e: &Expr) -> BTreeSet<Var> {
    fn go(e: &Expr, bound: &mut Vec<Var>, out: &mut BTreeSet<Var>) {
        match e {
            Expr::Var(x) => {
                if !bound.contains(x) {
                    out.insert(x.clone());
                }
            }
            Expr::Mu(x, body) => {
                bound.push(x.clone());
                go(body, bound, out);
                bound.pop();
            }
            _ => {
                for c in e.children() {
                    go(c, bound, out);
                }
            }
        }
    }
    let mut out = BTreeSet::new();
    go(e, &mut Vec::new(), &mut out);
    out
}

pub fn is_closed(e: &Expr) -> bool {
    free_vars(e).is_empty()
}

fn all_names(e: &Expr, out: &mut BTreeSet<Var>) {
    let mut stack = vec![e];
    while let Some(e) = stack.pop() {
        if let Expr::Var(x) | Expr::Mu(x, _) = e {
            out.insert(x.clone());
        }
        stack.extend(e.children());
    }
}

/// First of `base`, `base_1`, `base_2`, ... not in `taken`.
pub(crate) fn fresh_name(base: &str, taken: &BTreeSet<Var>) -> Var {
    let stem = match base.rsplit_once('_') {
        Some((s, n)) if !s.is_empty() && !n.is_empty() && n.bytes().all(|b| b.is_ascii_digit()) => s,
        _ => base,
    };
    if !taken.contains(stem) {
        return stem.to_string();
    }
    (1..)
        .map(|k| format!("{stem}_{k}"))
        .find(|n| !taken.contains(n))
        .unwrap()
}

/// Rebuilds a node with new children, in `children()` order.
pub(crate) fn map_children(e: &Expr, mut f: impl FnMut(&Expr) -> Expr) -> Expr {
    let b = |x: Expr| Box::new(x);
    match e {
        Expr::Letter(_) | Expr::Eps | Expr::Empty | Expr::Var(_) => e.clone(),
        Expr::Mu(x, t) => Expr::Mu(x.clone(), b(f(t))),
        Expr::OmegaP(t) => Expr::OmegaP(b(f(t))),
        Expr::OmegaW(t) => Expr::OmegaW(b(f(t))),
        Expr::StarP(t) => Expr::StarP(b(f(t))),
        Expr::Plus(l, r) => Expr::Plus(b(f(l)), b(f(r))),
        Expr::Dot(l, r) => Expr::Dot(b(f(l)), b(f(r))),
        Expr::Times(l, r) => Expr::Times(b(f(l)), b(f(r))),
        Expr::PlusP(l, r) => Expr::PlusP(b(f(l)), b(f(r))),
        Expr::DotP(l, r) => Expr::DotP(b(f(l)), b(f(r))),
    }
}

/// Capture-avoiding substitution `e[s/x]`.
pub fn substitute(e: &Expr, x: &str, s: &Expr) -> Expr {
    let fv_s = free_vars(s);
    let mut taken = fv_s.clone();
    all_names(e, &mut taken);
    taken.insert(x.to_string());
    subst(e, x, s, &fv_s, &mut taken)
}

fn subst(e: &Expr, x: &str, s: &Expr, fv_s: &BTreeSet<Var>, taken: &mut BTreeSet<Var>) -> Expr {
    match e {
        Expr::Var(y) if y == x => s.clone(),
        Expr::Mu(y, _) if y == x => e.clone(),
        Expr::Mu(y, body) if fv_s.contains(y) => {
            let z = fresh_name(y, taken);
            taken.insert(z.clone());
            let renamed = subst(body, y, &Expr::Var(z.clone()), &[z.clone()].into(), taken);
            Expr::Mu(z, Box::new(subst(&renamed, x, s, fv_s, taken)))
        }
        _ => map_children(e, |c| subst(c, x, s, fv_s, taken)),
    }
}

/// Renames binders so that they are pairwise distinct and distinct from
/// the free variables. Already-distinct binders keep their names.
pub fn alpha_rename(e: &Expr) -> Expr {
    fn go(e: &Expr, env: &mut HashMap<Var, Vec<Var>>, taken: &mut BTreeSet<Var>) -> Expr {
        match e {
            Expr::Var(x) => match env.get(x).and_then(|s| s.last()) {
                Some(y) => Expr::Var(y.clone()),
                None => e.clone(),
            },
            Expr::Mu(x, body) => {
                let y = fresh_name(x, taken);
                let y = if taken.contains(x) { y } else { x.clone() };
                taken.insert(y.clone());
                env.entry(x.clone()).or_default().push(y.clone());
                let body = go(body, env, taken);
                env.get_mut(x).unwrap().pop();
                Expr::Mu(y, Box::new(body))
            }
            _ => map_children(e, |c| go(c, env, taken)),
        }
    }
    let mut taken = free_vars(e);
    go(e, &mut HashMap::new(), &mut taken)
}

/// Rewrites every `T^w` to `(T >< eps)^w`.
pub fn embed_w_to_s(e: &Expr) -> Expr {
    match e {
        Expr::OmegaW(t) => Expr::OmegaP(Box::new(Expr::Times(Box::new(embed_w_to_s(t)), Box::new(Expr::Eps)))),
        _ => map_children(e, embed_w_to_s),
    }
}

/// Converts an expression whose pair parts all have the form `t >< eps`
/// back into the well-ordered fragment.
pub fn to_w(e: &Expr) -> Result<Expr, ToWError> {
    let taken = {
        let mut t = BTreeSet::new();
        all_names(e, &mut t);
        t
    };
    let mut taken = taken;
    to_w_go(e, &mut taken)
}

fn to_w_go(e: &Expr, taken: &mut BTreeSet<Var>) -> Result<Expr, ToWError> {
    let b = |x: Expr| Box::new(x);
    Ok(match e {
        Expr::Times(l, r) => {
            if **r != Expr::Eps {
                return Err(ToWError::NotWellOrderedShape(e.to_string()));
            }
            to_w_go(l, taken)?
        }
        Expr::StarP(p) => {
            let x = fresh_name("x", taken);
            taken.insert(x.clone());
            let body = to_w_go(p, taken)?;
            Expr::Mu(x.clone(), b(Expr::Plus(b(Expr::Dot(b(body), b(Expr::Var(x)))), b(Expr::Eps))))
        }
        Expr::PlusP(l, r) => Expr::Plus(b(to_w_go(l, taken)?), b(to_w_go(r, taken)?)),
        Expr::DotP(l, r) => Expr::Dot(b(to_w_go(l, taken)?), b(to_w_go(r, taken)?)),
        Expr::OmegaP(p) => Expr::OmegaW(b(to_w_go(p, taken)?)),
        Expr::Letter(_) | Expr::Eps | Expr::Empty | Expr::Var(_) => e.clone(),
        Expr::Mu(x, t) => Expr::Mu(x.clone(), b(to_w_go(t, taken)?)),
        Expr::OmegaW(t) => Expr::OmegaW(b(to_w_go(t, taken)?)),
        Expr::Plus(l, r) => Expr::Plus(b(to_w_go(l, taken)?), b(to_w_go(r, taken)?)),
        Expr::Dot(l, r) => Expr::Dot(b(to_w_go(l, taken)?), b(to_w_go(r, taken)?)),
    })
}
