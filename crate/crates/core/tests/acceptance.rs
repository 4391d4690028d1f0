//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use mcfl_core::cli::run_with;
use mcfl_core::compile::compile_word;
use mcfl_core::decide::{decide, Verdict};
use mcfl_core::eval::{
    concat, eval, eval_system, gaussian_eliminate, pair_concat, pair_omega_lang, pair_star, times, word_omega_lang,
    Bounds, EvalError, LangApprox,
};
use mcfl_core::expr::{parse, parse_w_compat, parse_with, Expr, ParseOptions};
use mcfl_core::grammar::{build_equation_system, enumerate_finite_derivations, parse_grammar, var_name, Mcfg};
use mcfl_core::word::{canonicalize, is_well_ordered, PairTerm, WordTerm};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn grid() -> Vec<Bounds> {
    let mut out = Vec::new();
    for mu in [2, 4, 8] {
        for cap in [20, 60, 200] {
            out.push(Bounds::default().with_mu(mu).with_cap(cap));
        }
    }
    out
}

fn cell(b: &Bounds) -> String {
    format!("mu={} cap={}", b.mu_iterations, b.max_term_size)
}

fn solve_start(g: &Mcfg, b: &Bounds) -> Result<LangApprox, EvalError> {
    let sys = build_equation_system(g).expect("equation system");
    Ok(eval_system(&sys, b)?.remove(&var_name(&g.start)).expect("start variable"))
}

fn summands(e: &Expr) -> BTreeSet<String> {
    match e {
        Expr::Plus(l, r) => summands(l).union(&summands(r)).cloned().collect(),
        other => BTreeSet::from([other.to_string()]),
    }
}

fn criterion_1() -> Outcome {
    let path = common::fixture_dir().join("example2.mcfg");
    let started = Instant::now();
    let mut out = Vec::new();
    let code = run_with(
        ["mcfl", "g2e", path.to_str().unwrap()],
        &mut std::io::empty(),
        &mut out,
        &mut std::io::sink(),
    );
    let elapsed = started.elapsed();
    let text = String::from_utf8(out).unwrap();
    let opts = ParseOptions {
        free_vars: ["X_S", "X_I"].map(String::from).into(),
        ..ParseOptions::default()
    };
    let mut eqs = BTreeMap::new();
    for line in text.lines().filter(|l| !l.starts_with("closed:")) {
        let (lhs, rhs) = line.split_once(" = ").expect("equation line");
        eqs.insert(lhs.to_string(), summands(&parse_with(rhs, &opts).expect("rhs parses")));
    }
    let want: BTreeMap<String, BTreeSet<String>> = [
        ("X_S", vec!["a", "b", "eps", "X_I"]),
        ("X_I", vec!["(X_S><X_S)^w"]),
    ]
    .into_iter()
    .map(|(v, s)| (v.to_string(), s.into_iter().map(String::from).collect()))
    .collect();
    let ok = code == 0 && eqs == want && elapsed < Duration::from_millis(100);
    outcome(ok, format!("exit {code}, {:?}, equations {:?}", elapsed, text.lines().collect::<Vec<_>>()))
}

fn criterion_2() -> Outcome {
    let started = Instant::now();
    let wo = decide(&parse_w_compat("mu x.(x^w + a + b + eps)").unwrap()).unwrap();
    let t1 = started.elapsed();
    let started = Instant::now();
    let nwo = decide(&parse("mu x.((x >< x)^w + a + b + eps)").unwrap()).unwrap();
    let t2 = started.elapsed();
    let ok = wo == Verdict::WellOrdered
        && matches!(nwo, Verdict::NotWellOrdered { .. })
        && t1.max(t2) < Duration::from_millis(100);
    outcome(ok, format!("{wo} in {t1:?}, {nwo} in {t2:?}"))
}

fn criterion_3() -> Outcome {
    let started = Instant::now();
    let star = parse("((mu x.x >< mu x.x)^*)^w").unwrap();
    let zero = parse("(mu x.x) >< (mu x.x)").unwrap();
    let eps = LangApprox::T(BTreeSet::from([WordTerm::Eps]));
    let none = LangApprox::P(BTreeSet::new());
    let mut points = 0;
    let mut bad = Vec::new();
    for mu in 0..=8 {
        for star_unroll in 0..=3 {
            for omega_prefix_len in 0..=2 {
                for omega_period_len in 1..=3 {
                    for max_term_size in [1, 5, 20, 200] {
                        let b = Bounds {
                            mu_iterations: mu,
                            star_unroll,
                            omega_prefix_len,
                            omega_period_len,
                            max_term_size,
                            ..Bounds::default()
                        };
                        points += 1;
                        if eval(&star, &BTreeMap::new(), &b).as_ref() != Ok(&eps)
                            || eval(&zero, &BTreeMap::new(), &b).as_ref() != Ok(&none)
                        {
                            bad.push(b);
                        }
                    }
                }
            }
        }
    }
    let elapsed = started.elapsed();
    outcome(
        bad.is_empty() && elapsed < Duration::from_secs(1),
        format!("{points} grid points, {} mismatches, {elapsed:?}", bad.len()),
    )
}

fn criterion_4() -> Outcome {
    let started = Instant::now();
    let corpus = common::expression_corpus();
    let mut agree = 0;
    let mut total = 0;
    let mut failures = Vec::new();
    for (name, _, e) in &corpus {
        let g = compile_word(e).expect("compiles");
        for b in grid() {
            total += 1;
            let direct = eval(e, &BTreeMap::new(), &b);
            let via = solve_start(&g, &b);
            match (&direct, &via) {
                (Ok(x), Ok(y)) if x == y => agree += 1,
                (Ok(x), Ok(y)) => failures.push(format!("{name} @ {}: {} vs {} terms", cell(&b), x.len(), y.len())),
                _ => failures.push(format!("{name} @ {}: {:?} / {:?}", cell(&b), direct.err(), via.err())),
            }
        }
    }
    let elapsed = started.elapsed();
    let mut detail = format!("{agree}/{total} cells agree over {} expressions, {elapsed:?}", corpus.len());
    for f in failures.iter().take(6) {
        detail.push_str(&format!("\n      {f}"));
    }
    outcome(agree == total && corpus.len() >= 10 && elapsed < Duration::from_secs(60), detail)
}

fn criterion_5() -> Outcome {
    let started = Instant::now();
    let mut agree = 0;
    let mut total = 0;
    let mut failures = Vec::new();
    let mut example3 = None;
    for name in ["example1.mcfg", "example2.mcfg", "example3.mcfg"] {
        let g = common::grammar_fixture(name);
        let sys = build_equation_system(&g).unwrap();
        let closed = gaussian_eliminate(&sys, "X_S").unwrap();
        for b in grid() {
            total += 1;
            let direct = eval(&closed, &BTreeMap::new(), &b);
            let via = eval_system(&sys, &b).map(|mut s| s.remove("X_S").unwrap());
            match (&direct, &via) {
                (Ok(x), Ok(y)) if x == y => agree += 1,
                (Ok(x), Ok(y)) => failures.push(format!("{name} @ {}: {} vs {} terms", cell(&b), x.len(), y.len())),
                _ => failures.push(format!("{name} @ {}: {:?} / {:?}", cell(&b), direct.err(), via.err())),
            }
        }
        if name == "example3.mcfg" {
            example3 = Some(closed);
        }
    }
    let t_s = common::expression_corpus()
        .into_iter()
        .find(|(n, _, _)| n == "t_S")
        .map(|(_, _, e)| e)
        .unwrap();
    let example3 = example3.unwrap();
    for b in grid() {
        total += 1;
        let x = eval(&example3, &BTreeMap::new(), &b);
        let y = eval(&t_s, &BTreeMap::new(), &b);
        match (&x, &y) {
            (Ok(x), Ok(y)) if x == y => agree += 1,
            _ => failures.push(format!("t_S @ {}: differs from eliminated example 3", cell(&b))),
        }
    }
    let elapsed = started.elapsed();
    let mut detail = format!("{agree}/{total} cells agree, {elapsed:?}");
    for f in failures.iter().take(6) {
        detail.push_str(&format!("\n      {f}"));
    }
    outcome(agree == total && elapsed < Duration::from_secs(30), detail)
}

fn criterion_6() -> Outcome {
    let started = Instant::now();
    let mut rng = StdRng::seed_from_u64(6);
    let b = Bounds::default().with_mu(4).with_cap(100);
    let (mut checked, mut well_ordered, mut skipped, mut terms) = (0, 0, 0, 0usize);
    let mut violations = Vec::new();
    while checked < 1000 {
        let e = common::random_closed_t(&mut rng, 8);
        let verdict = decide(&e).expect("generated expressions are closed and well-sorted");
        match eval(&e, &BTreeMap::new(), &b) {
            Err(EvalError::BudgetExceeded { .. } | EvalError::WorkExceeded { .. }) => skipped += 1,
            Err(err) => panic!("{e}: {err}"),
            Ok(lang) => {
                checked += 1;
                if verdict == Verdict::WellOrdered {
                    well_ordered += 1;
                    let words = lang.words().unwrap();
                    terms += words.len();
                    if let Some(w) = words.iter().find(|w| !is_well_ordered(w)) {
                        violations.push(format!("{e} yields {w}"));
                    }
                }
            }
        }
    }
    let elapsed = started.elapsed();
    let mut detail = format!(
        "{checked} expressions enumerated ({well_ordered} WellOrdered, {terms} terms checked, {skipped} over budget and regenerated), {} violations, {elapsed:?}",
        violations.len()
    );
    for v in violations.iter().take(3) {
        detail.push_str(&format!("\n      {v}"));
    }
    outcome(violations.is_empty() && elapsed < Duration::from_secs(120), detail)
}

fn time_decide(e: &Expr) -> f64 {
    let mut runs = 0u32;
    let started = Instant::now();
    let mut best = f64::INFINITY;
    while runs < 3 || started.elapsed() < Duration::from_millis(300) {
        let t = Instant::now();
        let v = decide(e).unwrap();
        best = best.min(t.elapsed().as_secs_f64());
        assert_eq!(v, Verdict::WellOrdered);
        runs += 1;
    }
    best
}

fn criterion_7() -> Outcome {
    let started = Instant::now();
    let sizes = [1_000usize, 3_000, 10_000, 30_000, 100_000, 300_000, 1_000_000];
    let mut points = Vec::new();
    for &n in &sizes {
        let e = common::synthetic(n);
        let size = e.size();
        points.push(((size as f64).ln(), time_decide(&e).ln(), size));
    }
    let k = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / k;
    let my = points.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let elapsed = started.elapsed();
    let timings: Vec<String> = points.iter().map(|p| format!("{}:{:.2}ms", p.2, p.1.exp() * 1e3)).collect();
    outcome(
        slope <= 1.15 && elapsed < Duration::from_secs(300),
        format!("slope {slope:.3}, {} , {elapsed:?}", timings.join(" ")),
    )
}

fn random_word<R: Rng>(rng: &mut R) -> WordTerm {
    let finite = |rng: &mut R| {
        let len = rng.gen_range(0..3);
        let s: String = (0..len).map(|_| if rng.gen_bool(0.5) { 'a' } else { 'b' }).collect();
        WordTerm::finite(&s)
    };
    let w = match rng.gen_range(0..6) {
        0 => WordTerm::omega(WordTerm::finite(if rng.gen_bool(0.5) { "a" } else { "ab" })),
        1 => WordTerm::rev_omega(WordTerm::finite(if rng.gen_bool(0.5) { "b" } else { "ba" })),
        _ => finite(rng),
    };
    canonicalize(&w)
}

fn random_words<R: Rng>(rng: &mut R, max: usize) -> BTreeSet<WordTerm> {
    let n = rng.gen_range(0..=max);
    (0..n).map(|_| random_word(rng)).collect()
}

fn random_pairs<R: Rng>(rng: &mut R, max: usize) -> BTreeSet<PairTerm> {
    let n = rng.gen_range(0..=max);
    (0..n).map(|_| PairTerm::new(random_word(rng), random_word(rng))).collect()
}

fn grow<T: Ord + Clone>(small: &BTreeSet<T>, extra: BTreeSet<T>) -> BTreeSet<T> {
    small.union(&extra).cloned().collect()
}

fn criterion_8() -> Outcome {
    let started = Instant::now();
    let mut rng = StdRng::seed_from_u64(8);
    let b = Bounds::default().with_cap(12);
    let mut counts: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
    for _ in 0..200 {
        let (l1, m1) = (random_words(&mut rng, 4), random_words(&mut rng, 4));
        let (l2, m2) = (grow(&l1, random_words(&mut rng, 3)), grow(&m1, random_words(&mut rng, 3)));
        let (p1, q1) = (random_pairs(&mut rng, 3), random_pairs(&mut rng, 3));
        let (p2, q2) = (grow(&p1, random_pairs(&mut rng, 2)), grow(&q1, random_pairs(&mut rng, 2)));

        let mut record = |op: &'static str, ok: bool| {
            let c = counts.entry(op).or_default();
            c.0 += 1;
            if !ok {
                c.1 += 1;
            }
        };
        record("+", grow(&l1, m1.clone()).is_subset(&grow(&l2, m2.clone())));
        record(".", concat(&l1, &m1, &b).unwrap().is_subset(&concat(&l2, &m2, &b).unwrap()));
        record("><", times(&l1, &m1, &b).unwrap().is_subset(&times(&l2, &m2, &b).unwrap()));
        record(
            "pair .",
            pair_concat(&p1, &q1, &b).unwrap().is_subset(&pair_concat(&p2, &q2, &b).unwrap()),
        );
        record("pair *", pair_star(&p1, &b).unwrap().is_subset(&pair_star(&p2, &b).unwrap()));
        record(
            "pair ^w",
            pair_omega_lang(&p1, &b).unwrap().is_subset(&pair_omega_lang(&p2, &b).unwrap()),
        );
        record(
            "word ^w",
            word_omega_lang(&l1, &b).unwrap().is_subset(&word_omega_lang(&l2, &b).unwrap()),
        );
    }
    let elapsed = started.elapsed();
    let violations: usize = counts.values().map(|c| c.1).sum();
    let per_op: Vec<String> = counts.iter().map(|(op, (n, v))| format!("{op}:{v}/{n}")).collect();
    outcome(
        violations == 0 && elapsed < Duration::from_secs(30),
        format!("violations per operator {}, {elapsed:?}", per_op.join(" ")),
    )
}

const FINITE_GRAMMARS: [&str; 10] = [
    "S -> a | b | eps",
    "S -> A B\nA -> a | eps\nB -> b | b b",
    "S -> A A A\nA -> a | b",
    "S -> a B c | eps\nB -> b | C\nC -> c c",
    "S -> A | B\nA -> a B\nB -> b | eps",
    "S -> X Y X\nX -> a | Y\nY -> b | eps",
    "S -> 'ab' C | C C\nC -> c | d",
    "S -> A B C\nA -> a | eps\nB -> A A | b\nC -> B c",
    "S -> P | Q | R\nP -> a a\nQ -> P b\nR -> Q P | eps",
    "S -> T T\nT -> U U | a\nU -> b | c | eps",
];

fn criterion_9() -> Outcome {
    let started = Instant::now();
    let b = Bounds::default().with_mu(16).with_cap(200);
    let mut agree = 0;
    let mut failures = Vec::new();
    for (i, text) in FINITE_GRAMMARS.iter().enumerate() {
        let g = parse_grammar(text).unwrap();
        let derived = enumerate_finite_derivations(&g, &g.start, 200);
        let solved = solve_start(&g, &b).unwrap().finite_part();
        if derived == solved && !derived.is_empty() {
            agree += 1;
        } else {
            failures.push(format!("grammar {i}: {derived} vs {solved}"));
        }
    }
    let elapsed = started.elapsed();
    let mut detail = format!("{agree}/{} grammars agree, {elapsed:?}", FINITE_GRAMMARS.len());
    for f in &failures {
        detail.push_str(&format!("\n      {f}"));
    }
    outcome(agree == FINITE_GRAMMARS.len() && elapsed < Duration::from_secs(10), detail)
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 9] = [
        ("E_G reproduction", criterion_1),
        ("decision verdicts", criterion_2),
        ("remark identities", criterion_3),
        ("roundtrip oracle equivalence", criterion_4),
        ("gaussian elimination preservation", criterion_5),
        ("decision soundness", criterion_6),
        ("complexity scaling", criterion_7),
        ("monotonicity", criterion_8),
        ("finite-derivation oracle", criterion_9),
    ];
    let worker = std::thread::Builder::new()
        .stack_size(1 << 30)
        .spawn(move || {
            let mut failed = 0;
            for (i, (name, run)) in criteria.iter().enumerate() {
                let result = catch_unwind(AssertUnwindSafe(run))
                    .unwrap_or_else(|p| outcome(false, format!("panicked: {:?}", p.downcast_ref::<String>())));
                let verdict = if result.pass { "PASS" } else { "FAIL" };
                if !result.pass {
                    failed += 1;
                }
                println!("criterion {} [{name}]: {verdict}\n      {}", i + 1, result.detail);
            }
            failed
        })
        .unwrap();
    let failed = worker.join().unwrap();
    println!("acceptance: {} passed, {failed} failed", 9 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
