use std::collections::BTreeMap;

use super::{Mcfg, Symbol};
use crate::eval::LangApprox;
use crate::word::{self, WordTerm};

/// Frontier words of finite complete `a`-trees with at most `size_bound`
/// edges, where a node for `A -> eps` has a single `eps` leaf.
pub fn enumerate_finite_derivations(g: &Mcfg, a: &str, size_bound: usize) -> LangApprox {
    // cheapest known tree for each (nonterminal, word)
    let mut best: BTreeMap<&str, BTreeMap<WordTerm, usize>> =
        g.nonterminals.iter().map(|n| (n.as_str(), BTreeMap::new())).collect();
    loop {
        let mut changed = false;
        for p in &g.productions {
            let cost = p.rhs.len().max(1);
            if cost > size_bound {
                continue;
            }
            let mut partial: BTreeMap<WordTerm, usize> = BTreeMap::from([(WordTerm::Eps, cost)]);
            for s in &p.rhs {
                let mut next = BTreeMap::new();
                for (u, c) in &partial {
                    match s {
                        Symbol::T(t) => relax(&mut next, word::cat(u, &WordTerm::Letter(t.clone())), *c),
                        Symbol::N(n) => {
                            for (v, d) in best.get(n.as_str()).into_iter().flatten() {
                                if c + d <= size_bound {
                                    relax(&mut next, word::cat(u, v), c + d);
                                }
                            }
                        }
                    }
                }
                partial = next;
            }
            let slot = best.get_mut(p.head.as_str()).expect("validated grammar");
            for (w, c) in partial {
                if slot.get(&w).is_none_or(|&old| c < old) {
                    slot.insert(w, c);
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    LangApprox::T(best.remove(a).map(|m| m.into_keys().collect()).unwrap_or_default())
}

fn relax(m: &mut BTreeMap<WordTerm, usize>, w: WordTerm, c: usize) {
    let e = m.entry(w).or_insert(c);
    *e = (*e).min(c);
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::super::fixtures::*;
    use super::*;
    use crate::grammar::parse_grammar;

    fn words(l: &LangApprox) -> BTreeSet<String> {
        l.words().unwrap().iter().map(|w| w.to_string()).collect()
    }

    fn set(xs: &[&str]) -> BTreeSet<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn right_linear() {
        let g = parse_grammar("S -> aS | b\n").unwrap();
        assert_eq!(words(&enumerate_finite_derivations(&g, "S", 5)), set(&["b", "ab", "aab"]));
    }

    #[test]
    fn example_one_has_only_the_base_words() {
        let g = example(EXAMPLE1);
        assert_eq!(words(&enumerate_finite_derivations(&g, "S", 12)), set(&["eps", "a", "b"]));
    }

    #[test]
    fn no_terminal_productions() {
        let g = parse_grammar("S -> S S\n").unwrap();
        assert!(enumerate_finite_derivations(&g, "S", 10).is_empty());
    }

    #[test]
    fn monotone_in_bound() {
        let g = parse_grammar("S -> a S b | S S | eps\n").unwrap();
        for n in 0..8 {
            let small = enumerate_finite_derivations(&g, "S", n);
            assert!(small.is_subset(&enumerate_finite_derivations(&g, "S", n + 1)));
        }
    }
}
