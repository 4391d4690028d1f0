//! Python bindings for `mcfl_core`.

use std::collections::BTreeMap;

use mcfl_core::compile::{compile, Compiled};
use mcfl_core::decide::{decide as decide_expr, symbols, Verdict};
use mcfl_core::eval::{eval as eval_expr, eval_system, gaussian_eliminate, Bounds as CoreBounds};
use mcfl_core::expr::{self, embed_w_to_s, is_closed};
use mcfl_core::grammar::{build_equation_system, enumerate_finite_derivations, parse_grammar, var_name, Mcfg};
use mcfl_core::word;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Enumeration bounds for the bounded semantics.
#[pyclass(module = "mcfl", skip_from_py_object)]
#[derive(Clone)]
struct Bounds {
    #[pyo3(get, set)]
    mu_iterations: usize,
    #[pyo3(get, set)]
    star_unroll: usize,
    #[pyo3(get, set)]
    omega_prefix_len: usize,
    #[pyo3(get, set)]
    omega_period_len: usize,
    #[pyo3(get, set)]
    max_term_size: usize,
    #[pyo3(get, set)]
    max_elements: usize,
    #[pyo3(get, set)]
    max_work: usize,
}

#[pymethods]
impl Bounds {
    #[new]
    #[pyo3(signature = (mu_iterations=None, star_unroll=None, omega_prefix_len=None, omega_period_len=None, max_term_size=None, max_elements=None, max_work=None))]
    fn new(
        mu_iterations: Option<usize>,
        star_unroll: Option<usize>,
        omega_prefix_len: Option<usize>,
        omega_period_len: Option<usize>,
        max_term_size: Option<usize>,
        max_elements: Option<usize>,
        max_work: Option<usize>,
    ) -> Self {
        let d = CoreBounds::default();
        Bounds {
            mu_iterations: mu_iterations.unwrap_or(d.mu_iterations),
            star_unroll: star_unroll.unwrap_or(d.star_unroll),
            omega_prefix_len: omega_prefix_len.unwrap_or(d.omega_prefix_len),
            omega_period_len: omega_period_len.unwrap_or(d.omega_period_len),
            max_term_size: max_term_size.unwrap_or(d.max_term_size),
            max_elements: max_elements.unwrap_or(d.max_elements),
            max_work: max_work.unwrap_or(d.max_work),
        }
    }

    fn __repr__(&self) -> String {
        format!(
            "Bounds(mu_iterations={}, star_unroll={}, omega_prefix_len={}, omega_period_len={}, max_term_size={}, max_elements={}, max_work={})",
            self.mu_iterations,
            self.star_unroll,
            self.omega_prefix_len,
            self.omega_period_len,
            self.max_term_size,
            self.max_elements,
            self.max_work
        )
    }
}

impl Bounds {
    fn core(&self) -> CoreBounds {
        CoreBounds {
            mu_iterations: self.mu_iterations,
            star_unroll: self.star_unroll,
            omega_prefix_len: self.omega_prefix_len,
            omega_period_len: self.omega_period_len,
            max_term_size: self.max_term_size,
            max_elements: self.max_elements,
            max_work: self.max_work,
        }
    }
}

fn core_bounds(b: Option<&Bounds>) -> CoreBounds {
    b.map(Bounds::core).unwrap_or_default()
}

/// A parsed fixed-point expression.
#[pyclass(module = "mcfl", frozen)]
struct Expr {
    inner: expr::Expr,
}

#[pymethods]
impl Expr {
    #[new]
    #[pyo3(signature = (text, from_w=false))]
    fn new(text: &str, from_w: bool) -> PyResult<Self> {
        let e = expr::parse(text).map_err(value_err)?;
        Ok(Expr {
            inner: if from_w { embed_w_to_s(&e) } else { e },
        })
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Expr({:?})", self.inner.to_string())
    }

    fn __eq__(&self, other: &Expr) -> bool {
        self.inner == other.inner
    }

    /// "T" for word languages, "P" for pair languages.
    #[getter]
    fn sort(&self) -> PyResult<String> {
        Ok(self.inner.sort().map_err(value_err)?.to_string())
    }

    #[getter]
    fn size(&self) -> usize {
        self.inner.size()
    }

    fn is_closed(&self) -> bool {
        is_closed(&self.inner)
    }

    /// "WellOrdered", "NotWellOrdered" or "EmptyLanguage".
    fn decide(&self) -> PyResult<String> {
        Ok(decide_expr(&self.inner).map_err(value_err)?.name().to_string())
    }

    /// Path and witness of the first offending pair expression, if any.
    fn witness(&self) -> PyResult<Option<(Vec<String>, String)>> {
        Ok(match decide_expr(&self.inner).map_err(value_err)? {
            Verdict::NotWellOrdered { path, witness } => Some((path, witness.to_string())),
            _ => None,
        })
    }

    fn symbols(&self) -> PyResult<Vec<String>> {
        Ok(symbols(&self.inner).map_err(value_err)?.iter().map(|s| s.to_string()).collect())
    }

    /// Canonical terms of the bounded approximation, length-lexicographic.
    #[pyo3(signature = (bounds=None))]
    fn eval(&self, bounds: Option<&Bounds>) -> PyResult<Vec<String>> {
        let lang = eval_expr(&self.inner, &BTreeMap::new(), &core_bounds(bounds)).map_err(value_err)?;
        Ok(lang.lines())
    }

    /// Compile to a grammar. Pair expressions return the grammar over the separator.
    fn compile(&self) -> PyResult<Grammar> {
        let inner = match compile(&self.inner).map_err(value_err)? {
            Compiled::Word(g) => g,
            Compiled::Pair(p) => p.grammar,
        };
        Ok(Grammar { inner })
    }
}

/// A Muller context-free grammar.
#[pyclass(module = "mcfl", frozen)]
struct Grammar {
    inner: Mcfg,
}

#[pymethods]
impl Grammar {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        Ok(Grammar {
            inner: parse_grammar(text).map_err(value_err)?,
        })
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    #[getter]
    fn start(&self) -> String {
        self.inner.start.clone()
    }

    #[getter]
    fn nonterminals(&self) -> Vec<String> {
        self.inner.nonterminals.clone()
    }

    /// The equation system, one `X = e` per line.
    fn equations(&self) -> PyResult<String> {
        Ok(build_equation_system(&self.inner).map_err(value_err)?.to_string())
    }

    /// A closed expression for the language of `target` (default: start).
    #[pyo3(signature = (target=None))]
    fn to_expr(&self, target: Option<&str>) -> PyResult<Expr> {
        let sys = build_equation_system(&self.inner).map_err(value_err)?;
        let target = var_name(target.unwrap_or(&self.inner.start));
        Ok(Expr {
            inner: gaussian_eliminate(&sys, &target).map_err(value_err)?,
        })
    }

    /// Bounded approximation of the start symbol's language.
    #[pyo3(signature = (bounds=None))]
    fn eval(&self, bounds: Option<&Bounds>) -> PyResult<Vec<String>> {
        let sys = build_equation_system(&self.inner).map_err(value_err)?;
        let mut sol = eval_system(&sys, &core_bounds(bounds)).map_err(value_err)?;
        let lang = sol.remove(&var_name(&self.inner.start)).expect("start variable");
        Ok(lang.lines())
    }

    /// Finite words with a derivation of at most `size_bound` steps.
    fn finite_words(&self, size_bound: usize) -> Vec<String> {
        enumerate_finite_derivations(&self.inner, &self.inner.start, size_bound).lines()
    }
}

#[pyfunction]
#[pyo3(signature = (text, from_w=false))]
fn parse(text: &str, from_w: bool) -> PyResult<Expr> {
    Expr::new(text, from_w)
}

#[pyfunction]
#[pyo3(signature = (text, from_w=false))]
fn decide(text: &str, from_w: bool) -> PyResult<String> {
    Expr::new(text, from_w)?.decide()
}

#[pyfunction]
fn rank_bound(word_text: &str) -> PyResult<usize> {
    Ok(word::rank_bound(&word::parse_word(word_text).map_err(value_err)?))
}

#[pyfunction]
fn is_well_ordered(word_text: &str) -> PyResult<bool> {
    Ok(word::is_well_ordered(&word::parse_word(word_text).map_err(value_err)?))
}

#[pymodule]
fn mcfl(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Bounds>()?;
    m.add_class::<Expr>()?;
    m.add_class::<Grammar>()?;
    m.add_function(wrap_pyfunction!(parse, m)?)?;
    m.add_function(wrap_pyfunction!(decide, m)?)?;
    m.add_function(wrap_pyfunction!(rank_bound, m)?)?;
    m.add_function(wrap_pyfunction!(is_well_ordered, m)?)?;
    Ok(())
}
