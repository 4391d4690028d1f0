#![allow(dead_code)]

use std::path::PathBuf;

use mcfl_core::expr::{self, parse, Expr};
use mcfl_core::grammar::{parse_grammar, Mcfg};
use rand::Rng;

pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn fixture_text(name: &str) -> String {
    std::fs::read_to_string(fixture_dir().join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn grammar_fixture(name: &str) -> Mcfg {
    parse_grammar(&fixture_text(name)).unwrap()
}

/// `(name, source, parsed)` for every line of `expressions.txt`.
pub fn expression_corpus() -> Vec<(String, String, Expr)> {
    fixture_text("expressions.txt")
        .lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|l| {
            let (name, src) = l.split_once('\t').expect("name<TAB>expression");
            let e = parse(src).unwrap_or_else(|err| panic!("{name}: {err}"));
            (name.to_string(), src.to_string(), e)
        })
        .collect()
}

const LETTERS: [&str; 3] = ["a", "b", "c"];

/// A random closed sort-T expression of depth at most `depth`.
pub fn random_closed_t<R: Rng>(rng: &mut R, depth: usize) -> Expr {
    random_t(rng, depth, &[])
}

/// A random sort-T expression whose free variables lie in `free`.
pub fn random_t<R: Rng>(rng: &mut R, depth: usize, free: &[&str]) -> Expr {
    let mut vars: Vec<String> = free.iter().map(|s| s.to_string()).collect();
    let mut next = 0;
    gen_t(rng, depth, &mut vars, &mut next)
}

/// A random closed expression of the well-ordered fragment, using `T^w`.
pub fn random_w<R: Rng>(rng: &mut R, depth: usize) -> Expr {
    let mut next = 0;
    gen_w(rng, depth, &mut Vec::new(), &mut next)
}

fn gen_w<R: Rng>(rng: &mut R, depth: usize, vars: &mut Vec<String>, next: &mut usize) -> Expr {
    if depth <= 1 || rng.gen_bool(0.25) {
        return match rng.gen_range(0..10) {
            0..=4 => expr::letter(LETTERS[rng.gen_range(0..LETTERS.len())]),
            5 | 6 => Expr::Eps,
            _ if !vars.is_empty() => expr::var(&vars[rng.gen_range(0..vars.len())]),
            _ => expr::letter(LETTERS[rng.gen_range(0..LETTERS.len())]),
        };
    }
    match rng.gen_range(0..7) {
        0 | 1 => expr::plus(gen_w(rng, depth - 1, vars, next), gen_w(rng, depth - 1, vars, next)),
        2 | 3 => expr::dot(gen_w(rng, depth - 1, vars, next), gen_w(rng, depth - 1, vars, next)),
        4 | 5 => {
            let x = format!("x{next}");
            *next += 1;
            vars.push(x.clone());
            let body = gen_w(rng, depth - 1, vars, next);
            vars.pop();
            expr::mu(&x, body)
        }
        _ => expr::omega_w(gen_w(rng, depth - 1, vars, next)),
    }
}

fn gen_t<R: Rng>(rng: &mut R, depth: usize, vars: &mut Vec<String>, next: &mut usize) -> Expr {
    if depth <= 1 || rng.gen_bool(0.25) {
        return match rng.gen_range(0..10) {
            0..=3 => expr::letter(LETTERS[rng.gen_range(0..LETTERS.len())]),
            4 | 5 => Expr::Eps,
            _ if !vars.is_empty() => expr::var(&vars[rng.gen_range(0..vars.len())]),
            _ => expr::letter(LETTERS[rng.gen_range(0..LETTERS.len())]),
        };
    }
    match rng.gen_range(0..8) {
        0 | 1 => expr::plus(gen_t(rng, depth - 1, vars, next), gen_t(rng, depth - 1, vars, next)),
        2 | 3 => expr::dot(gen_t(rng, depth - 1, vars, next), gen_t(rng, depth - 1, vars, next)),
        4 | 5 => {
            let x = format!("x{next}");
            *next += 1;
            vars.push(x.clone());
            let body = gen_t(rng, depth - 1, vars, next);
            vars.pop();
            expr::mu(&x, body)
        }
        _ => expr::omega_p(gen_p(rng, depth - 1, vars, next)),
    }
}

fn gen_p<R: Rng>(rng: &mut R, depth: usize, vars: &mut Vec<String>, next: &mut usize) -> Expr {
    if depth <= 2 || rng.gen_bool(0.4) {
        let left = gen_t(rng, depth.saturating_sub(1), vars, next);
        let right = if rng.gen_bool(0.5) { Expr::Eps } else { gen_t(rng, depth.saturating_sub(1), vars, next) };
        return expr::times(left, right);
    }
    match rng.gen_range(0..3) {
        0 => expr::plus_p(gen_p(rng, depth - 1, vars, next), gen_p(rng, depth - 1, vars, next)),
        1 => expr::dot_p(gen_p(rng, depth - 1, vars, next), gen_p(rng, depth - 1, vars, next)),
        _ => expr::star_p(gen_p(rng, depth - 1, vars, next)),
    }
}

/// A balanced closed sort-T expression with roughly `n` nodes, nonempty
/// and with `eps` on the right of every pair.
pub fn synthetic(n: usize) -> Expr {
    let mut counter = 0usize;
    synth(n, &mut Vec::new(), &mut counter)
}

fn synth(n: usize, vars: &mut Vec<String>, counter: &mut usize) -> Expr {
    *counter += 1;
    let k = *counter;
    if n <= 1 {
        return match (k % 5, vars.last()) {
            (0, Some(x)) => expr::var(x),
            (1, _) => Expr::Eps,
            _ => expr::letter(&format!("l{}", k % 97)),
        };
    }
    let rest = n - 1;
    match k % 4 {
        0 if n > 3 => {
            let x = format!("x{k}");
            vars.push(x.clone());
            let body = synth(rest - 2, vars, counter);
            vars.pop();
            expr::mu(&x, expr::plus(Expr::Eps, body))
        }
        1 if n > 3 => expr::omega_p(expr::times(synth(rest - 2, vars, counter), Expr::Eps)),
        2 => expr::dot(synth(rest / 2, vars, counter), synth(rest - rest / 2, vars, counter)),
        _ => expr::plus(synth(rest / 2, vars, counter), synth(rest - rest / 2, vars, counter)),
    }
}
