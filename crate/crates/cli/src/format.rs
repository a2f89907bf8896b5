//! Text formats: theory files (`.thy`) and model files (`.mod`).
//!
//! Theory files are line oriented:
//!
//! ```text
//! # comment
//! rel E 2
//! fun f 1
//! const c
//! axiom A x. A y. (E(x,y) -> E(y,x))
//! def R(x) := E y. E z. y!=z & x=c
//! ```
//!
//! A `def` line introduces a relation symbol together with its defining
//! biconditional; the body is read over the declared symbols only.
//!
//! Model files list the universe size and one line per symbol:
//!
//! ```text
//! size 2
//! rel E { (0,1) (1,0) }
//! rel P:1 { }
//! fun f [ 1 0 ]
//! const c 0
//! ```
//!
//! The `:ARITY` suffix is needed only when the arity cannot be read off the
//! table (an empty relation, or a function on a one-element universe).

use std::fmt::Write as _;

use defeq_core::definability::{extend_theory, Definition, DefinitionSet};
use defeq_core::folang::parse_formula;
use defeq_core::{FiniteModel, Formula, Signature, Theory};
use thiserror::Error;

#[derive(Debug, Error)]
#[error("line {line}: {message}")]
pub struct FormatError {
    pub line: usize,
    pub message: String,
}

fn fail<T>(line: usize, message: impl Into<String>) -> Result<T, FormatError> {
    Err(FormatError {
        line,
        message: message.into(),
    })
}

fn core_err(line: usize) -> impl Fn(defeq_core::Error) -> FormatError {
    move |e| FormatError {
        line,
        message: e.to_string(),
    }
}

/// Content of a line with any `#` comment removed.
fn strip(line: &str) -> &str {
    line.split_once('#').map_or(line, |(a, _)| a).trim()
}

/// A parsed theory file: declarations and axioms, plus definitions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TheoryFile {
    pub base: Theory,
    pub defs: DefinitionSet,
}

impl TheoryFile {
    /// The base theory extended by the definitions.
    pub fn theory(&self) -> Result<Theory, defeq_core::Error> {
        extend_theory(&self.base, &self.defs)
    }
}

pub fn parse_theory(text: &str) -> Result<TheoryFile, FormatError> {
    let mut sig = Signature::new();
    let mut axioms: Vec<(usize, &str)> = Vec::new();
    let mut defs: Vec<(usize, &str)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = strip(raw);
        if line.is_empty() {
            continue;
        }
        let (keyword, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim();
        let words: Vec<&str> = rest.split_whitespace().collect();
        let arity = |w: &[&str]| -> Result<usize, FormatError> {
            match w {
                [_, a] => a
                    .parse()
                    .or_else(|_| fail(line_no, format!("bad arity `{a}`"))),
                _ => fail(line_no, format!("expected `{keyword} NAME ARITY`")),
            }
        };
        match keyword {
            "rel" => sig
                .add_relation(words.first().copied().unwrap_or(""), arity(&words)?)
                .map_err(core_err(line_no))?,
            "fun" => sig
                .add_function(words.first().copied().unwrap_or(""), arity(&words)?)
                .map_err(core_err(line_no))?,
            "const" => match words[..] {
                [name] => sig.add_constant(name).map_err(core_err(line_no))?,
                _ => return fail(line_no, "expected `const NAME`"),
            },
            "axiom" => axioms.push((line_no, rest)),
            "def" => defs.push((line_no, rest)),
            other => return fail(line_no, format!("unknown keyword `{other}`")),
        }
    }

    let mut formulas: Vec<Formula> = Vec::new();
    for (line_no, src) in axioms {
        let f = parse_formula(src, &sig).map_err(core_err(line_no))?;
        if let Some(v) = f.free_vars().into_iter().next() {
            return fail(line_no, format!("axiom has free variable `{v}`"));
        }
        formulas.push(f);
    }
    let base = Theory::new(sig.clone(), formulas).map_err(core_err(0))?;

    let mut set = DefinitionSet::new();
    for (line_no, src) in defs {
        let def = parse_definition(src, &sig).map_err(|message| FormatError {
            line: line_no,
            message,
        })?;
        set.insert(def).map_err(core_err(line_no))?;
    }
    set.validate(&sig).map_err(core_err(0))?;
    Ok(TheoryFile { base, defs: set })
}

/// `R(x,y) := FORMULA`.
fn parse_definition(src: &str, sig: &Signature) -> Result<Definition, String> {
    let (head, body) = src
        .split_once(":=")
        .ok_or_else(|| "expected `def NAME(x1,..,xk) := FORMULA`".to_string())?;
    let head = head.trim();
    let (name, params) = head
        .strip_suffix(')')
        .and_then(|h| h.split_once('('))
        .ok_or_else(|| format!("bad definition head `{head}`"))?;
    let params: Vec<String> = params.split(',').map(|p| p.trim().to_string()).collect();
    if params.iter().any(String::is_empty) {
        return Err(format!("empty parameter in `{head}`"));
    }
    let body = parse_formula(body.trim(), sig).map_err(|e| e.to_string())?;
    Definition::new(name.trim(), params, body).map_err(|e| e.to_string())
}

/// Declarations, then axioms, then definitions.
pub fn write_theory(base: &Theory, defs: &DefinitionSet) -> String {
    let mut out = String::new();
    let sig = base.sig();
    for (name, arity) in sig.relations() {
        let _ = writeln!(out, "rel {name} {arity}");
    }
    for (name, arity) in sig.functions() {
        let _ = writeln!(out, "fun {name} {arity}");
    }
    for name in sig.constants() {
        let _ = writeln!(out, "const {name}");
    }
    for a in base.axioms() {
        let _ = writeln!(out, "axiom {a}");
    }
    for d in defs.iter() {
        let _ = writeln!(out, "def {d}");
    }
    out
}

enum Entry {
    Rel(String, Option<usize>, Vec<Vec<usize>>),
    Fun(String, Option<usize>, Vec<usize>),
    Const(String, usize),
}

fn name_and_arity(word: &str, line: usize) -> Result<(String, Option<usize>), FormatError> {
    match word.rsplit_once(':') {
        Some((name, a)) if !name.is_empty() => match a.parse() {
            Ok(a) => Ok((name.to_string(), Some(a))),
            Err(_) => fail(line, format!("bad arity in `{word}`")),
        },
        _ => Ok((word.to_string(), None)),
    }
}

fn number(word: &str, line: usize) -> Result<usize, FormatError> {
    word.trim()
        .parse()
        .or_else(|_| fail(line, format!("expected a number, found `{word}`")))
}

fn delimited(rest: &str, open: char, close: char, line: usize) -> Result<&str, FormatError> {
    rest.trim()
        .strip_prefix(open)
        .and_then(|r| r.strip_suffix(close))
        .map_or_else(|| fail(line, format!("expected `{open} .. {close}`")), Ok)
}

fn tuples(body: &str, line: usize) -> Result<Vec<Vec<usize>>, FormatError> {
    let mut out = Vec::new();
    let mut rest = body.trim();
    while !rest.is_empty() {
        let inner = rest
            .strip_prefix('(')
            .and_then(|r| r.split_once(')'))
            .map_or_else(|| fail(line, format!("bad tuple list `{body}`")), Ok)?;
        out.push(
            inner
                .0
                .split(',')
                .map(|w| number(w, line))
                .collect::<Result<Vec<_>, _>>()?,
        );
        rest = inner.1.trim_start();
    }
    Ok(out)
}

/// Smallest `a >= 1` with `n^a = len`.
fn arity_of_table(n: usize, len: usize) -> Option<usize> {
    (1..=16).find(|&a| n.checked_pow(a as u32) == Some(len))
}

pub fn parse_model(text: &str) -> Result<FiniteModel, FormatError> {
    parse_model_lines(text.lines().enumerate().map(|(i, l)| (i + 1, l)))
}

fn parse_model_lines<'a>(
    lines: impl Iterator<Item = (usize, &'a str)>,
) -> Result<FiniteModel, FormatError> {
    let mut size = None;
    let mut entries = Vec::new();
    let mut last_line = 0;
    for (line_no, raw) in lines {
        last_line = line_no;
        let line = strip(raw);
        if line.is_empty() {
            continue;
        }
        let (keyword, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim();
        match keyword {
            "size" => {
                if size.is_some() {
                    return fail(line_no, "repeated `size`");
                }
                size = Some(number(rest, line_no)?);
            }
            "rel" | "fun" => {
                let (head, table) = rest
                    .split_once(char::is_whitespace)
                    .map_or_else(|| fail(line_no, format!("expected `{keyword} NAME ..`")), Ok)?;
                let (name, arity) = name_and_arity(head, line_no)?;
                if keyword == "rel" {
                    let body = delimited(table, '{', '}', line_no)?;
                    entries.push((line_no, Entry::Rel(name, arity, tuples(body, line_no)?)));
                } else {
                    let body = delimited(table, '[', ']', line_no)?;
                    let values = body
                        .split_whitespace()
                        .map(|w| number(w, line_no))
                        .collect::<Result<Vec<_>, _>>()?;
                    entries.push((line_no, Entry::Fun(name, arity, values)));
                }
            }
            "const" => match rest.split_whitespace().collect::<Vec<_>>()[..] {
                [name, v] => entries.push((line_no, Entry::Const(name.into(), number(v, line_no)?))),
                _ => return fail(line_no, "expected `const NAME VALUE`"),
            },
            other => return fail(line_no, format!("unknown keyword `{other}`")),
        }
    }
    let Some(n) = size else {
        return fail(last_line, "missing `size`");
    };

    let mut sig = Signature::new();
    for (line_no, e) in &entries {
        let line_no = *line_no;
        match e {
            Entry::Rel(name, arity, ts) => {
                let a = match (arity, ts.first()) {
                    (Some(a), _) => *a,
                    (None, Some(t)) => t.len(),
                    (None, None) => {
                        return fail(line_no, format!("empty relation `{name}` needs `{name}:ARITY`"))
                    }
                };
                sig.add_relation(name, a).map_err(core_err(line_no))?;
            }
            Entry::Fun(name, arity, values) => {
                let a = match arity {
                    Some(a) => *a,
                    None if n == 1 => {
                        return fail(line_no, format!("function `{name}` on one element needs `{name}:ARITY`"))
                    }
                    None => arity_of_table(n, values.len()).map_or_else(
                        || fail(line_no, format!("table of `{name}` has {} entries", values.len())),
                        Ok,
                    )?,
                };
                sig.add_function(name, a).map_err(core_err(line_no))?;
            }
            Entry::Const(name, _) => sig.add_constant(name).map_err(core_err(line_no))?,
        }
    }
    let mut m = FiniteModel::new(sig, n).map_err(core_err(last_line))?;
    for (line_no, e) in entries {
        match e {
            Entry::Rel(name, _, ts) => m.set_relation_tuples(&name, &ts),
            Entry::Fun(name, _, values) => m.set_function(&name, &values),
            Entry::Const(name, v) => m.set_constant(&name, v),
        }
        .map_err(core_err(line_no))?;
    }
    Ok(m)
}

/// Models separated by blank lines.
pub fn parse_models(text: &str) -> Result<Vec<FiniteModel>, FormatError> {
    let mut out = Vec::new();
    let mut block: Vec<(usize, &str)> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if strip(line).is_empty() {
            if block.iter().any(|(_, l)| !strip(l).is_empty()) {
                out.push(parse_model_lines(block.drain(..))?);
            }
            block.clear();
        } else {
            block.push((i + 1, line));
        }
    }
    if !block.is_empty() {
        out.push(parse_model_lines(block.into_iter())?);
    }
    Ok(out)
}

pub fn write_model(m: &FiniteModel) -> String {
    let mut out = String::new();
    let n = m.size();
    let _ = writeln!(out, "size {n}");
    for (name, arity) in m.sig().relations() {
        let ts = m.relation_tuples(name).expect("own relation");
        let head = if ts.is_empty() {
            format!("{name}:{arity}")
        } else {
            name.to_string()
        };
        let body: Vec<String> = ts
            .iter()
            .map(|t| {
                let parts: Vec<String> = t.iter().map(usize::to_string).collect();
                format!("({})", parts.join(","))
            })
            .collect();
        if body.is_empty() {
            let _ = writeln!(out, "rel {head} {{ }}");
        } else {
            let _ = writeln!(out, "rel {head} {{ {} }}", body.join(" "));
        }
    }
    for (idx, (name, arity)) in m.sig().functions().enumerate() {
        let head = if n == 1 {
            format!("{name}:{arity}")
        } else {
            name.to_string()
        };
        let values: Vec<String> = m.function_table(idx).iter().map(usize::to_string).collect();
        let _ = writeln!(out, "fun {head} [ {} ]", values.join(" "));
    }
    for (idx, name) in m.sig().constants().enumerate() {
        let _ = writeln!(out, "const {name} {}", m.constant_value(idx));
    }
    out
}
