use std::collections::BTreeSet;
use std::fmt;

use super::Expr;

// Binding strength of each printed form, loosest first.
const MU: u8 = 0;
const SUM: u8 = 1;
const TIMES: u8 = 2;
const CAT: u8 = 3;
const POSTFIX: u8 = 4;

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut names = BTreeSet::new();
        let mut stack = vec![self];
        while let Some(e) = stack.pop() {
            match e {
                Expr::Var(x) | Expr::Mu(x, _) => {
                    names.insert(x.as_str());
                }
                _ => {}
            }
            stack.extend(e.children());
        }
        let mut out = String::new();
        render(self, MU, &names, &mut out);
        f.write_str(&out)
    }
}

fn level(e: &Expr) -> u8 {
    match e {
        Expr::Mu(..) => MU,
        Expr::Plus(..) | Expr::PlusP(..) => SUM,
        Expr::Times(..) => TIMES,
        Expr::Dot(..) | Expr::DotP(..) => CAT,
        Expr::OmegaP(_) | Expr::OmegaW(_) | Expr::StarP(_) => POSTFIX,
        _ => POSTFIX + 1,
    }
}

fn render(e: &Expr, min: u8, names: &BTreeSet<&str>, out: &mut String) {
    // mu extends to the right, so it is bracketed under any operator
    let paren = level(e) < min || (matches!(e, Expr::Mu(..)) && min > MU);
    if paren {
        out.push('(');
    }
    match e {
        Expr::Letter(l) => {
            if l.is_plain() && !names.contains(l.as_str()) {
                out.push_str(l.as_str());
            } else {
                out.push('\'');
                out.push_str(&l.as_str().replace('\\', "\\\\").replace('\'', "\\'"));
                out.push('\'');
            }
        }
        Expr::Eps => out.push_str("eps"),
        Expr::Empty => out.push_str("empty"),
        Expr::Var(x) => out.push_str(x),
        Expr::Mu(x, body) => {
            out.push_str("mu ");
            out.push_str(x);
            out.push('.');
            render(body, MU, names, out);
        }
        Expr::Plus(a, b) | Expr::PlusP(a, b) => {
            render(a, SUM, names, out);
            out.push('+');
            render(b, SUM + 1, names, out);
        }
        Expr::Times(a, b) => {
            render(a, CAT, names, out);
            out.push_str("><");
            render(b, CAT, names, out);
        }
        Expr::Dot(a, b) | Expr::DotP(a, b) => {
            render(a, CAT, names, out);
            out.push('.');
            render(b, POSTFIX, names, out);
        }
        Expr::OmegaP(a) | Expr::OmegaW(a) => {
            render(a, POSTFIX, names, out);
            out.push_str("^w");
        }
        Expr::StarP(a) => {
            render(a, POSTFIX, names, out);
            out.push_str("^*");
        }
    }
    if paren {
        out.push(')');
    }
}

#[cfg(test)]
mod tests {
    use crate::expr::*;

    #[test]
    fn compact_rendering() {
        let e = plus(plus(plus(letter("a"), letter("b")), Expr::Eps), var("X_I"));
        assert_eq!(e.to_string(), "a+b+eps+X_I");
        let e = omega_p(times(var("X_S"), var("X_S")));
        assert_eq!(e.to_string(), "(X_S><X_S)^w");
        let e = mu("x", plus(dot(letter("a"), var("x")), Expr::Eps));
        assert_eq!(e.to_string(), "mu x.a.x+eps");
        let e = plus(letter("a"), mu("x", var("x")));
        assert_eq!(e.to_string(), "a+(mu x.x)");
        let e = dot(letter("a"), dot(letter("b"), letter("c")));
        assert_eq!(e.to_string(), "a.(b.c)");
        let e = star_p(times(Expr::Eps, Expr::Empty));
        assert_eq!(e.to_string(), "(eps><empty)^*");
    }

    #[test]
    fn quotes_shadowed_and_long_letters() {
        let e = mu("x", plus(letter("x"), letter("ab")));
        assert_eq!(e.to_string(), "mu x.'x'+'ab'");
        assert_eq!(parse(&e.to_string()).unwrap(), e);
    }

    #[test]
    fn round_trips() {
        for src in [
            "mu x.(x^w + a + b + eps)",
            "mu x.((x >< x)^w + a + b + eps)",
            "(((mu x.x) >< (mu y.y))^*)^w",
            "(a >< b).(c >< d)^* + (eps >< a)",
            "a.(b.c) + (a + b) + mu z.(z.a + eps)",
        ] {
            let e = parse(src).unwrap();
            assert_eq!(parse(&e.to_string()).unwrap(), e, "{src} -> {e}");
        }
    }
}
