use std::fmt;

use super::paths::{bar_translate, r_regex};
use super::{GrammarError, Mcfg, Symbol};
use crate::expr::{self, Expr, Var};

/// The variable `X_A` standing for nonterminal `A`.
pub fn var_name(a: &str) -> Var {
    format!("X_{a}")
}

/// `u-bar`: letters stay, nonterminals become variables, `eps` for `u = eps`.
pub fn bar_word(u: &[Symbol]) -> Expr {
    expr::product(
        u.iter()
            .map(|s| match s {
                Symbol::T(a) => Expr::Letter(a.clone()),
                Symbol::N(n) => Expr::Var(var_name(n)),
            })
            .collect(),
    )
}

/// One equation `X_A = t_A` per nonterminal, in declaration order.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct EquationSystem {
    pub equations: Vec<(Var, Expr)>,
}

impl EquationSystem {
    pub fn get(&self, x: &str) -> Option<&Expr> {
        self.equations.iter().find(|(y, _)| y == x).map(|(_, e)| e)
    }

    pub fn vars(&self) -> impl Iterator<Item = &Var> {
        self.equations.iter().map(|(x, _)| x)
    }
}

impl fmt::Display for EquationSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (x, e) in &self.equations {
            writeln!(f, "{x} = {e}")?;
        }
        Ok(())
    }
}

/// `X_A = sum over A -> u of u-bar + sum over accepting F containing A of
/// (r_{A,F}-bar)^w`, omitting accepting sets without a covering cycle.
///
/// When every right-hand side of `A` mentions `A`, the production summands
/// of `X_A` are dropped: each is contained in the ω-summands at every
/// solution, so the least solution is unchanged.
pub fn build_equation_system(g: &Mcfg) -> Result<EquationSystem, GrammarError> {
    build(g, true)
}

/// The system exactly as displayed, keeping every production summand.
pub fn build_equation_system_literal(g: &Mcfg) -> Result<EquationSystem, GrammarError> {
    build(g, false)
}

fn build(g: &Mcfg, absorb: bool) -> Result<EquationSystem, GrammarError> {
    g.validate()?;
    let mut equations = Vec::new();
    for a in &g.nonterminals {
        let self_recursive = g
            .productions_of(a)
            .all(|p| p.rhs.iter().any(|s| matches!(s, Symbol::N(n) if n == a)));
        let mut terms: Vec<Expr> = if absorb && self_recursive {
            Vec::new()
        } else {
            g.productions_of(a).map(|p| bar_word(&p.rhs)).collect()
        };
        for f in g.accepting.iter().filter(|f| f.contains(a)) {
            match r_regex(g, a, f) {
                Ok(r) => terms.push(Expr::OmegaP(Box::new(bar_translate(&r)))),
                Err(GrammarError::EmptyRoot { .. }) => {}
                Err(e) => return Err(e),
            }
        }
        equations.push((var_name(a), expr::sum(terms)));
    }
    Ok(EquationSystem { equations })
}
