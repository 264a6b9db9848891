//! The `mengerkit` command surface.
//!
//! Exit codes: 0 when every check passes, 1 on a mathematical failure, 2 on
//! unreadable or inconsistent input.

pub mod document;
pub mod generate;

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::algebra::{check_all, find_selectors, SelectorSet, DEFAULT_CAP};
use crate::error::{Error, Result};
use crate::nfun::FunctionSet;
use crate::relations::{
    decompose_rep, inclusion_order, order_represent, verify_determining_pair, OrderedAlgebra,
};
use crate::report::{Check, Report};
use crate::represent::{
    completion_of_rep, rep_general, rep_unitary, unitary_extension, verify_faithful,
    Representation,
};

use document::{Document, LoadedAlgebra};
use generate::FunctionSearch;

pub const CAP_VAR: &str = "MENGERKIT_CAP";

#[derive(Debug, Parser)]
#[command(name = "mengerkit", version, about = "Menger algebras of partial functions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the axioms, representability conditions and selectors of an algebra.
    Check { path: PathBuf },
    /// Build a representation by functions.
    Represent {
        path: PathBuf,
        #[arg(long, value_enum)]
        method: Method,
        /// Totalise the images over one extra point.
        #[arg(long)]
        complete: bool,
        /// Adjoin projectors to the (full) images and close.
        #[arg(long)]
        extend: bool,
    },
    /// Split a representation into simplest representations.
    Decompose { algebra: PathBuf, representation: PathBuf },
    /// List every algebra or closed function set of a given size, one per line.
    Enumerate {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum)]
        mode: Mode,
        /// Number of elements (abstract mode).
        #[arg(long)]
        gsize: Option<usize>,
        /// Number of points (functions mode).
        #[arg(long)]
        carrier: Option<usize>,
        #[arg(long)]
        limit: Option<usize>,
        /// Keep one algebra per isomorphism class (abstract mode, gsize <= 4).
        #[arg(long)]
        up_to_iso: bool,
        /// Only sets containing every projector (functions mode).
        #[arg(long)]
        with_projectors: bool,
        /// Allow partial functions (functions mode).
        #[arg(long)]
        partial: bool,
        /// Only closures of at most this many generators (functions mode).
        #[arg(long)]
        max_generators: Option<usize>,
    },
    /// A seed-determined algebra that passes every check.
    Random {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        gsize: usize,
        #[arg(long)]
        n: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Unitary,
    General,
    Ordered,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Abstract,
    Functions,
}

#[derive(Debug, Clone, Serialize)]
pub struct Artifact {
    pub name: String,
    pub document: Document,
}

#[derive(Debug, Clone, Serialize)]
pub struct CommandReport {
    pub command: Vec<String>,
    pub passed: bool,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub selectors: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub artifacts: Vec<Artifact>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Captured result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

/// 2 for input errors, 1 for everything else.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Malformed(_)
        | Error::Dimension(_)
        | Error::IndexOutOfRange { .. }
        | Error::EmptyAlgebra
        | Error::SourceMismatch => 2,
        _ => 1,
    }
}

fn parse_cap(var: Option<&str>) -> Result<usize> {
    match var {
        None => Ok(DEFAULT_CAP),
        Some(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&c| c > 0)
            .ok_or_else(|| Error::Malformed(format!("{CAP_VAR} must be a positive integer, got {v:?}"))),
    }
}

/// Runs with the closure cap taken from the environment.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<String>,
{
    run_with_cap(args, std::env::var(CAP_VAR).ok().as_deref())
}

/// Runs with an explicit cap setting (`None` means the default).
pub fn run_with_cap<I, T>(args: I, cap: Option<&str>) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<String>,
{
    let args: Vec<String> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { stdout: text, stderr: String::new(), code }
            } else {
                Outcome { stdout: String::new(), stderr: text, code }
            };
        }
    };
    let echo: Vec<String> = args.iter().skip(1).cloned().collect();
    let cap = match parse_cap(cap) {
        Ok(c) => c,
        Err(e) => return failure(echo, e),
    };
    match cli.command {
        Command::Enumerate { n, mode, gsize, carrier, limit, up_to_iso, with_projectors, partial, max_generators } => {
            let lines = match mode {
                Mode::Abstract => enumerate_abstract_lines(n, gsize, up_to_iso, limit),
                Mode::Functions => {
                    let Some(carrier) = carrier else {
                        return failure(echo, Error::Malformed("--mode functions needs --carrier".into()));
                    };
                    let opts = FunctionSearch { n, carrier, partial, with_projectors, max_generators, cap };
                    generate::enumerate_function_sets(&opts).map(|sets| {
                        sets.iter().take(limit.unwrap_or(usize::MAX)).map(|fs| Document::from_functions(fs).to_json()).collect()
                    })
                }
            };
            match lines {
                Ok(lines) => Outcome { stdout: lines.iter().map(|l| format!("{l}\n")).collect(), stderr: String::new(), code: 0 },
                Err(e) => failure(echo, e),
            }
        }
        Command::Random { seed, gsize, n } => match generate::random_algebra(seed, gsize, n) {
            Ok(alg) => Outcome {
                stdout: format!("{}\n", Document::from_algebra(&alg, None).to_json()),
                stderr: String::new(),
                code: 0,
            },
            Err(e) => failure(echo, e),
        },
        Command::Check { path } => finish(echo, cmd_check(&path, cap)),
        Command::Represent { path, method, complete, extend } => {
            finish(echo, cmd_represent(&path, method, complete, extend, cap))
        }
        Command::Decompose { algebra, representation } => {
            finish(echo, cmd_decompose(&algebra, &representation, cap))
        }
    }
}

fn enumerate_abstract_lines(n: usize, gsize: Option<usize>, up_to_iso: bool, limit: Option<usize>) -> Result<Vec<String>> {
    let size = gsize.ok_or_else(|| Error::Malformed("--mode abstract needs --gsize".into()))?;
    if up_to_iso && size > 4 {
        return Err(Error::Precondition("isomorphism rejection supports gsize <= 4".into()));
    }
    let algs = generate::enumerate_abstract(n, size, up_to_iso)?;
    Ok(algs
        .iter()
        .take(limit.unwrap_or(usize::MAX))
        .map(|a| Document::from_algebra(a, None).to_json())
        .collect())
}

struct Body {
    report: Report,
    selectors: Option<Vec<usize>>,
    artifacts: Vec<Artifact>,
}

fn finish(command: Vec<String>, body: Result<Body>) -> Outcome {
    match body {
        Ok(b) => {
            let passed = b.report.passed();
            let out = CommandReport {
                command,
                passed,
                checks: b.report.checks,
                selectors: b.selectors,
                artifacts: b.artifacts,
                error: None,
            };
            Outcome {
                stdout: format!("{}\n", serde_json::to_string_pretty(&out).expect("reports serialize")),
                stderr: String::new(),
                code: if passed { 0 } else { 1 },
            }
        }
        Err(e) => failure(command, e),
    }
}

fn failure(command: Vec<String>, e: Error) -> Outcome {
    let out = CommandReport {
        command,
        passed: false,
        checks: Vec::new(),
        selectors: None,
        artifacts: Vec::new(),
        error: Some(e.to_string()),
    };
    Outcome {
        stdout: format!("{}\n", serde_json::to_string_pretty(&out).expect("reports serialize")),
        stderr: format!("error: {e}\n"),
        code: exit_code(&e),
    }
}

fn load_algebra(path: &std::path::Path, cap: usize) -> Result<LoadedAlgebra> {
    Document::load(path)?.algebra(cap)
}

/// Declared selectors are validated; otherwise they are searched for.
fn selectors_of(loaded: &LoadedAlgebra, report: &mut Report) -> Result<Option<SelectorSet>> {
    let alg = &loaded.algebra;
    match &loaded.selectors {
        Some(e) => match SelectorSet::new(alg, e.clone()) {
            Ok(s) => {
                report.push(Check::pass("declared_selectors"));
                Ok(Some(s))
            }
            Err(Error::MissingSelectors) => {
                report.push(Check::fail("declared_selectors", e.clone()));
                Ok(None)
            }
            Err(err) => Err(err),
        },
        None => find_selectors(alg),
    }
}

fn cmd_check(path: &std::path::Path, cap: usize) -> Result<Body> {
    let loaded = load_algebra(path, cap)?;
    let mut report = check_all(&loaded.algebra);
    let selectors = selectors_of(&loaded, &mut report)?;
    if let Some(order) = &loaded.order {
        let oalg = OrderedAlgebra::new(loaded.algebra.clone(), order.clone())?;
        for c in oalg.check().checks {
            if report.get(&c.name).is_none() {
                report.push(c);
            }
        }
    }
    Ok(Body {
        report,
        selectors: selectors.map(|s| s.elements().to_vec()),
        artifacts: Vec::new(),
    })
}

fn homomorphism_checks(report: &mut Report, alg: &crate::algebra::AlgebraTable, rep: &mut Representation, faithful: bool) -> Result<()> {
    report.extend(rep.verify(alg)?);
    if faithful {
        report.push(Check {
            passed: verify_faithful(alg, rep)?,
            ..Check::pass("faithful")
        });
    }
    Ok(())
}

fn cmd_represent(path: &std::path::Path, method: Method, complete: bool, extend: bool, cap: usize) -> Result<Body> {
    let loaded = load_algebra(path, cap)?;
    let alg = &loaded.algebra;
    let mut report = Report::new();
    let mut artifacts = Vec::new();
    let mut selectors = None;
    let mut rep = match method {
        Method::Unitary => {
            let sel = selectors_of(&loaded, &mut report)?.ok_or(Error::MissingSelectors)?;
            selectors = Some(sel.elements().to_vec());
            rep_unitary(alg, &sel)?
        }
        Method::General => rep_general(alg)?.0,
        Method::Ordered => {
            let order = match (&loaded.order, &loaded.functions) {
                (Some(o), _) => o.clone(),
                (None, Some(fns)) => {
                    inclusion_order(&FunctionSet::new(alg.n(), fns[0].carrier(), fns.clone())?)
                }
                (None, None) => {
                    return Err(Error::Malformed("--method ordered needs an order".into()))
                }
            };
            let rep = order_represent(&OrderedAlgebra::new(alg.clone(), order.clone())?)?;
            report.push(Check {
                passed: crate::represent::zeta_of_rep(&rep) == order,
                ..Check::pass("order_round_trip")
            });
            rep
        }
    };
    homomorphism_checks(&mut report, alg, &mut rep, true)?;
    artifacts.push(Artifact { name: "representation".into(), document: Document::from_representation(&rep) });

    if complete {
        let mut done = completion_of_rep(alg, &rep)?;
        let mut sub = Report::new();
        homomorphism_checks(&mut sub, alg, &mut done, true)?;
        for c in sub.checks {
            report.push(Check { name: format!("completed_{}", c.name), ..c });
        }
        artifacts.push(Artifact { name: "completed".into(), document: Document::from_representation(&done) });
        rep = done;
    }

    if extend {
        let input = FunctionSet::dedup(rep.n(), rep.carrier(), rep.images().iter().cloned())?;
        let ext = unitary_extension(&input, cap)?;
        let levels = ext.levels();
        let monotone = levels.windows(2).position(|w| !w[0].functions().iter().all(|f| w[1].contains(f)));
        report.push(Check::from_counterexample("extension_monotone", monotone.map(|k| vec![k])));
        let missing = (0..rep.source_size()).find(|&g| !ext.closure().contains(rep.image(g)));
        report.push(Check::from_counterexample("extension_contains_input", missing.map(|g| vec![g])));
        let sel = ext.selectors()?;
        report.push(Check {
            passed: sel.is_some(),
            ..Check::pass("extension_selectors")
        });
        if complete {
            report.push(Check {
                passed: !ext.input_meets_projectors(),
                ..Check::pass("input_avoids_projectors")
            });
        }
        let closed = ext.algebra()?;
        artifacts.push(Artifact {
            name: "extension".into(),
            document: Document::from_algebra(&closed, sel.as_ref()),
        });
        artifacts.push(Artifact { name: "extension_functions".into(), document: Document::from_functions(ext.closure()) });
    }
    Ok(Body { report, selectors, artifacts })
}

fn cmd_decompose(alg_path: &std::path::Path, rep_path: &std::path::Path, cap: usize) -> Result<Body> {
    let loaded = load_algebra(alg_path, cap)?;
    let rep = Document::load(rep_path)?.representation()?;
    let dec = decompose_rep(&loaded.algebra, &rep, cap)?;
    let mut report = Report::new();
    let mut artifacts = Vec::new();
    for (k, tuple) in dec.tuples().iter().enumerate() {
        let label = tuple.iter().map(ToString::to_string).collect::<Vec<_>>().join(",");
        for c in verify_determining_pair(&dec.pair(k)).checks {
            report.push(Check { name: format!("tuple[{label}].{}", c.name), ..c });
        }
        report.push(Check {
            passed: dec.rep(k).verified() == Some(true),
            ..Check::pass(format!("tuple[{label}].homomorphism"))
        });
        artifacts.push(Artifact { name: format!("tuple[{label}]"), document: Document::from_representation(dec.rep(k)) });
    }
    report.push(Check {
        passed: dec.reproduces(),
        ..Check::pass("union_reproduces")
    });
    artifacts.push(Artifact { name: "union".into(), document: Document::from_representation(dec.union()) });
    Ok(Body { report, selectors: None, artifacts })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cap_parsing() {
        assert_eq!(parse_cap(None).unwrap(), DEFAULT_CAP);
        assert_eq!(parse_cap(Some("17")).unwrap(), 17);
        assert!(parse_cap(Some("0")).is_err());
        assert!(parse_cap(Some("many")).is_err());
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run_with_cap(["mengerkit"], None).code, 2);
        assert_eq!(run_with_cap(["mengerkit", "enumerate", "--n", "2"], None).code, 2);
        let o = run_with_cap(["mengerkit", "enumerate", "--n", "2", "--mode", "abstract"], None);
        assert_eq!(o.code, 2);
        assert_eq!(run_with_cap(["mengerkit", "random", "--seed", "0", "--gsize", "1", "--n", "1"], Some("x")).code, 2);
    }

    #[test]
    fn enumerate_one_element() {
        for n in 1..=3 {
            let o = run_with_cap(["mengerkit".to_string(), "enumerate".into(), "--n".into(), n.to_string(), "--gsize".into(), "1".into(), "--mode".into(), "abstract".into()], None);
            assert_eq!(o.code, 0);
            assert_eq!(o.stdout.lines().count(), 1);
        }
    }
}
