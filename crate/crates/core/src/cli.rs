//! The `mcfl` command line.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::{Read, Write};
use std::path::Path;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::compile::{compile, Compiled};
use crate::decide::{collapse_epsilon, decide, symbols, Verdict};
use crate::eval::{eval, eval_system, gaussian_eliminate, Bounds};
use crate::expr::{embed_w_to_s, parse, parse_strict, Expr};
use crate::grammar::{build_equation_system, parse_grammar, var_name};
use crate::word::{is_well_ordered, parse_word, rank_bound};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_DATA: i32 = 65;

#[derive(Parser, Debug)]
#[command(name = "mcfl", version, about = "Muller context-free languages of scattered words")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    /// Human-readable output.
    Text,
    /// One record per line, no decoration.
    Lines,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse an expression and print it back in normal syntax.
    Parse {
        /// Expression text, a file, or `-` for stdin.
        input: String,
        #[command(flatten)]
        mode: ExprMode,
    },
    /// Decide whether an expression denotes only well-ordered words
    /// (exit 0 yes, 1 no, 2 empty language).
    Decide {
        input: String,
        #[command(flatten)]
        mode: ExprMode,
        /// Report the empty language as WellOrdered.
        #[arg(long)]
        strict: bool,
    },
    /// Print the equation system of a grammar and a closed expression for it.
    G2e {
        /// Grammar file, text, or `-` for stdin.
        input: String,
        /// Nonterminal to solve for (default: the start symbol).
        #[arg(long)]
        target: Option<String>,
    },
    /// Compile a closed expression to a grammar.
    E2g {
        input: String,
        #[command(flatten)]
        mode: ExprMode,
    },
    /// Enumerate a bounded under-approximation of the denoted language.
    Eval {
        input: String,
        #[command(flatten)]
        mode: ExprMode,
        /// Treat the input as a grammar and solve its equation system.
        #[arg(long)]
        grammar: bool,
        #[command(flatten)]
        bounds: BoundsArgs,
    },
    /// Print the Hausdorff rank bound of a word term.
    Rank { input: String },
    /// Print the symbols of an expression after removing empty parts.
    Symbols {
        input: String,
        #[command(flatten)]
        mode: ExprMode,
    },
}

#[derive(Args, Debug)]
struct ExprMode {
    /// Reject `T^w`; only pair languages may take ω-powers.
    #[arg(long, conflicts_with = "from_w")]
    strict_sorts: bool,
    /// Rewrite `T^w` to `(T >< eps)^w` after parsing.
    #[arg(long)]
    from_w: bool,
}

#[derive(Args, Debug)]
struct BoundsArgs {
    /// Kleene iterations per fixed point.
    #[arg(long = "mu", default_value_t = Bounds::default().mu_iterations)]
    mu: usize,
    /// Factors in a pair-star product.
    #[arg(long = "star", default_value_t = Bounds::default().star_unroll)]
    star: usize,
    /// Factors before the period of an ω-power.
    #[arg(long = "omega-prefix", default_value_t = Bounds::default().omega_prefix_len)]
    omega_prefix: usize,
    /// Factors in the period of an ω-power.
    #[arg(long = "omega-period", default_value_t = Bounds::default().omega_period_len, value_parser = positive)]
    omega_period: usize,
    /// Node cap on word terms.
    #[arg(long = "max-term", default_value_t = Bounds::default().max_term_size, value_parser = positive)]
    max_term: usize,
    /// Abort once a set exceeds this many elements.
    #[arg(long = "max-elements", default_value_t = Bounds::default().max_elements)]
    max_elements: usize,
    /// Abort once one operation examines this many candidate products.
    #[arg(long = "max-work", default_value_t = Bounds::default().max_work)]
    max_work: usize,
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(e.to_string()),
    }
}

impl BoundsArgs {
    fn bounds(&self) -> Bounds {
        Bounds {
            mu_iterations: self.mu,
            star_unroll: self.star,
            omega_prefix_len: self.omega_prefix,
            omega_period_len: self.omega_period,
            max_term_size: self.max_term,
            max_elements: self.max_elements,
            max_work: self.max_work,
        }
    }
}

struct Io<'a> {
    stdin: &'a mut dyn Read,
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

type Outcome = Result<i32, String>;

/// Runs the command line with process stdio.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdin = std::io::stdin();
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdin.lock(), &mut stdout.lock(), &mut stderr.lock())
}

/// Runs the command line against the given streams; returns the exit code.
pub fn run_with<I, T>(argv: I, stdin: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    let mut io = Io { stdin, out, err };
    match dispatch(&cli, &mut io) {
        Ok(code) => code,
        Err(msg) => {
            let _ = writeln!(io.err, "mcfl: {msg}");
            EXIT_DATA
        }
    }
}

fn read_input(arg: &str, io: &mut Io<'_>) -> Result<String, String> {
    if arg == "-" {
        let mut s = String::new();
        io.stdin.read_to_string(&mut s).map_err(|e| format!("reading stdin: {e}"))?;
        Ok(s)
    } else if Path::new(arg).is_file() {
        std::fs::read_to_string(arg).map_err(|e| format!("reading {arg}: {e}"))
    } else {
        Ok(arg.to_string())
    }
}

fn read_expr(arg: &str, mode: &ExprMode, io: &mut Io<'_>) -> Result<Expr, String> {
    let text = read_input(arg, io)?;
    let e = if mode.strict_sorts { parse_strict(&text) } else { parse(&text) }.map_err(|e| e.to_string())?;
    Ok(if mode.from_w { embed_w_to_s(&e) } else { e })
}

fn emit(io: &mut Io<'_>, text: &str) -> Result<(), String> {
    io.out.write_all(text.as_bytes()).map_err(|e| e.to_string())
}

fn dispatch(cli: &Cli, io: &mut Io<'_>) -> Outcome {
    let lines = cli.format == Format::Lines;
    match &cli.command {
        Command::Parse { input, mode } => {
            let e = read_expr(input, mode, io)?;
            let sort = e.sort().map_err(|e| e.to_string())?;
            if lines {
                emit(io, &format!("{e}\n"))?;
            } else {
                emit(io, &format!("{e}\nsort: {sort}\n"))?;
            }
            Ok(EXIT_OK)
        }
        Command::Decide { input, mode, strict } => {
            let e = read_expr(input, mode, io)?;
            let v = decide(&e).map_err(|e| e.to_string())?;
            let v = match v {
                Verdict::EmptyLanguage if *strict => Verdict::WellOrdered,
                v => v,
            };
            emit(io, &format!("{v}\n"))?;
            if let Verdict::NotWellOrdered { path, witness } = &v {
                let path = if path.is_empty() { "root".to_string() } else { path.join("/") };
                if lines {
                    emit(io, &format!("{path}\n{witness}\n"))?;
                } else {
                    emit(io, &format!("path: {path}\nwitness: {witness}\n"))?;
                }
            }
            Ok(v.exit_code())
        }
        Command::G2e { input, target } => {
            let g = parse_grammar(&read_input(input, io)?).map_err(|e| e.to_string())?;
            if !lines {
                for d in g.validate().map_err(|e| e.to_string())? {
                    let _ = writeln!(io.err, "{d}");
                }
            }
            let sys = build_equation_system(&g).map_err(|e| e.to_string())?;
            let target = var_name(target.as_deref().unwrap_or(&g.start));
            let closed = gaussian_eliminate(&sys, &target).map_err(|e| e.to_string())?;
            emit(io, &sys.to_string())?;
            emit(io, &format!("closed: {closed}\n"))?;
            Ok(EXIT_OK)
        }
        Command::E2g { input, mode } => {
            let e = read_expr(input, mode, io)?;
            match compile(&e).map_err(|e| e.to_string())? {
                Compiled::Word(g) => emit(io, &g.to_string())?,
                Compiled::Pair(p) => emit(io, &format!("# separator: {}\n{}", p.sep, p.grammar))?,
            }
            Ok(EXIT_OK)
        }
        Command::Eval {
            input,
            mode,
            grammar,
            bounds,
        } => {
            let b = bounds.bounds();
            let lang = if *grammar {
                let g = parse_grammar(&read_input(input, io)?).map_err(|e| e.to_string())?;
                let sys = build_equation_system(&g).map_err(|e| e.to_string())?;
                let mut sol = eval_system(&sys, &b).map_err(|e| e.to_string())?;
                sol.remove(&var_name(&g.start)).expect("start variable")
            } else {
                let e = read_expr(input, mode, io)?;
                e.sort().map_err(|e| e.to_string())?;
                eval(&e, &BTreeMap::new(), &b).map_err(|e| e.to_string())?
            };
            emit(io, &lang.to_string())?;
            Ok(EXIT_OK)
        }
        Command::Rank { input } => {
            let w = parse_word(&read_input(input, io)?).map_err(|e| e.to_string())?;
            if lines {
                emit(io, &format!("{}\n", rank_bound(&w)))?;
            } else {
                emit(
                    io,
                    &format!("{w}\nrank_bound: {}\nwell_ordered: {}\n", rank_bound(&w), is_well_ordered(&w)),
                )?;
            }
            Ok(EXIT_OK)
        }
        Command::Symbols { input, mode } => {
            let e = read_expr(input, mode, io)?;
            match collapse_epsilon(&e).map_err(|e| e.to_string())? {
                None => {
                    if !lines {
                        emit(io, "empty language\n")?;
                    }
                }
                Some(reduced) => {
                    for s in symbols(&reduced).map_err(|e| e.to_string())? {
                        emit(io, &format!("{s}\n"))?;
                    }
                }
            }
            Ok(EXIT_OK)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str], stdin: &str) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("mcfl").chain(args.iter().copied());
        let code = run_with(argv, &mut stdin.as_bytes(), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn decide_exit_codes() {
        assert_eq!(run_str(&["decide", "mu x.(x^w + a + b + eps)", "--from-w"], "").0, 0);
        let (code, out, _) = run_str(&["decide", "mu x.((x >< x)^w + a + b + eps)"], "");
        assert_eq!(code, 1);
        assert!(out.starts_with("NotWellOrdered\npath: mu/"), "{out}");
        assert_eq!(run_str(&["decide", "a.(mu x.x)"], "").0, 2);
        assert_eq!(run_str(&["decide", "a.(mu x.x)", "--strict"], "").0, 0);
    }

    #[test]
    fn eval_remark() {
        let (code, out, _) = run_str(&["eval", "((mu x.x >< mu x.x)^*)^w", "--mu", "2"], "");
        assert_eq!((code, out.as_str()), (0, "eps\n"));
    }

    #[test]
    fn stdin_and_errors() {
        let (code, out, _) = run_str(&["parse", "-"], "a + b");
        assert_eq!((code, out.as_str()), (0, "a+b\nsort: T\n"));
        let (code, _, err) = run_str(&["parse", "(a"], "");
        assert_eq!(code, EXIT_DATA);
        assert!(err.contains("at byte 2"), "{err}");
        assert_eq!(run_str(&["frobnicate"], "").0, EXIT_USAGE);
        assert_eq!(run_str(&["eval", "a", "--max-term", "0"], "").0, EXIT_USAGE);
    }

    #[test]
    fn g2e_example_two() {
        let text = "S -> a | b | eps | I\nI -> S I S\naccept: I\n";
        let (code, out, _) = run_str(&["g2e", "-"], text);
        assert_eq!(code, 0);
        assert_eq!(out, "X_S = a+b+eps+X_I\nX_I = (X_S><X_S)^w\nclosed: mu X_S.a+b+eps+(X_S><X_S)^w\n");
    }

    #[test]
    fn rank_and_symbols() {
        let (_, out, _) = run_str(&["rank", "(a^w)^-w"], "");
        assert_eq!(out, "a^w^-w\nrank_bound: 2\nwell_ordered: false\n");
        let (_, out, _) = run_str(&["symbols", "mu x.(a.x + eps) + (eps >< b)^w"], "");
        assert_eq!(out, "a\nb\n");
    }

    #[test]
    fn e2g_pair_expression() {
        let (code, out, _) = run_str(&["e2g", "a >< b"], "");
        assert_eq!(code, 0);
        assert!(out.starts_with("# separator: '#"), "{out}");
        assert!(parse_grammar(&out).is_ok());
    }
}
