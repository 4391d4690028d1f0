use crate::expr::{alpha_rename, free_vars, substitute, Expr};
use crate::grammar::{EquationSystem, GrammarError};

/// Closed expression for `target` by Bekić elimination. Variables other
/// than the target are eliminated in ascending name order, each replaced
/// by `mu y. rhs_y` (or `rhs_y` when it does not mention `y`).
pub fn gaussian_eliminate(sys: &EquationSystem, target: &str) -> Result<Expr, GrammarError> {
    if sys.get(target).is_none() {
        return Err(GrammarError::UnknownNonterminal(target.to_string()));
    }
    let mut eqs = sys.equations.clone();
    let mut order: Vec<String> = eqs.iter().map(|(x, _)| x.clone()).filter(|x| x != target).collect();
    order.sort();
    order.push(target.to_string());
    for y in order {
        let pos = eqs.iter().position(|(x, _)| *x == y).unwrap();
        let (_, rhs) = eqs.remove(pos);
        let closed = if free_vars(&rhs).contains(&y) { Expr::Mu(y.clone(), Box::new(rhs)) } else { rhs };
        if y == target {
            return Ok(alpha_rename(&closed));
        }
        for (_, e) in eqs.iter_mut() {
            *e = substitute(e, &y, &closed);
        }
    }
    unreachable!("the target is eliminated last")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{is_closed, parse};
    use crate::grammar::{build_equation_system, parse_grammar};

    #[test]
    fn example_two() {
        let g = parse_grammar("S -> a | b | eps | I\nI -> S I S\naccept: I\n").unwrap();
        let e = gaussian_eliminate(&build_equation_system(&g).unwrap(), "X_S").unwrap();
        assert_eq!(e, parse("mu X_S.(a+b+eps+(X_S><X_S)^w)").unwrap());
    }

    #[test]
    fn single_equation() {
        let sys = EquationSystem {
            equations: vec![("X".into(), crate::expr::letter("a"))],
        };
        assert_eq!(gaussian_eliminate(&sys, "X").unwrap(), crate::expr::letter("a"));
        assert!(gaussian_eliminate(&sys, "Y").is_err());
    }

    #[test]
    fn results_are_closed() {
        let g = parse_grammar(
            "S -> A S | B S | eps\nA -> a | eps | I\nI -> A I\nB -> b | eps | J\nJ -> J B\naccept: I\naccept: J\n",
        )
        .unwrap();
        let sys = build_equation_system(&g).unwrap();
        for x in sys.vars() {
            let e = gaussian_eliminate(&sys, x).unwrap();
            assert!(is_closed(&e), "{e}");
            assert!(e.sort().is_ok());
        }
    }
}
