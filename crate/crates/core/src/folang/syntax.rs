use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use super::signature::{is_infix_relation, Signature, SymbolKind};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(String),
    Const(String),
    App(String, Vec<Term>),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Rel(String, Vec<Term>),
    Eq(Term, Term),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Forall(String, Box<Formula>),
    Exists(String, Box<Formula>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn constant(name: &str) -> Term {
        Term::Const(name.to_string())
    }

    pub fn app(name: &str, args: Vec<Term>) -> Term {
        Term::App(name.to_string(), args)
    }

    /// `f` applied `n` times to `t`.
    pub fn iterate(f: &str, n: usize, t: Term) -> Term {
        (0..n).fold(t, |acc, _| Term::App(f.to_string(), alloc::vec![acc]))
    }

    /// Number of function applications.
    pub fn weight(&self) -> usize {
        match self {
            Term::Var(_) | Term::Const(_) => 0,
            Term::App(_, args) => 1 + args.iter().map(Term::weight).sum::<usize>(),
        }
    }

    /// Nesting depth of function applications.
    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) | Term::Const(_) => 0,
            Term::App(_, args) => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
        }
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Const(_) => {}
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    fn check(&self, sig: &Signature) -> Result<()> {
        match self {
            Term::Var(_) => Ok(()),
            Term::Const(c) => match sig.kind(c) {
                Some(SymbolKind::Constant) => Ok(()),
                _ => Err(Error::UnknownSymbol(c.clone())),
            },
            Term::App(f, args) => {
                match sig.kind(f) {
                    Some(SymbolKind::Function(a)) if a == args.len() => {}
                    Some(SymbolKind::Function(a)) => {
                        return Err(Error::ArityMismatch {
                            symbol: f.clone(),
                            expected: a,
                            found: args.len(),
                        })
                    }
                    _ => return Err(Error::UnknownSymbol(f.clone())),
                }
                args.iter().try_for_each(|a| a.check(sig))
            }
        }
    }

    fn rename_symbols(&self, map: &BTreeMap<String, String>) -> Term {
        let rn = |s: &String| map.get(s).cloned().unwrap_or_else(|| s.clone());
        match self {
            Term::Var(v) => Term::Var(v.clone()),
            Term::Const(c) => Term::Const(rn(c)),
            Term::App(f, args) => {
                Term::App(rn(f), args.iter().map(|a| a.rename_symbols(map)).collect())
            }
        }
    }
}

impl Formula {
    pub fn rel(name: &str, args: Vec<Term>) -> Formula {
        Formula::Rel(name.to_string(), args)
    }

    pub fn eq(a: Term, b: Term) -> Formula {
        Formula::Eq(a, b)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    pub fn forall(v: &str, f: Formula) -> Formula {
        Formula::Forall(v.to_string(), Box::new(f))
    }

    pub fn exists(v: &str, f: Formula) -> Formula {
        Formula::Exists(v.to_string(), Box::new(f))
    }

    /// Universal closure over `vars`, outermost first.
    pub fn forall_many(vars: &[String], f: Formula) -> Formula {
        vars.iter()
            .rev()
            .fold(f, |acc, v| Formula::Forall(v.clone(), Box::new(acc)))
    }

    /// AST node count; an atom counts one plus the function applications in its terms.
    pub fn size(&self) -> usize {
        match self {
            Formula::Rel(_, args) => 1 + args.iter().map(Term::weight).sum::<usize>(),
            Formula::Eq(a, b) => 1 + a.weight() + b.weight(),
            Formula::Not(f) | Formula::Forall(_, f) | Formula::Exists(_, f) => 1 + f.size(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                1 + a.size() + b.size()
            }
        }
    }

    /// Nesting depth; atoms have depth one plus their deepest term.
    pub fn depth(&self) -> usize {
        match self {
            Formula::Rel(_, args) => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
            Formula::Eq(a, b) => 1 + a.depth().max(b.depth()),
            Formula::Not(f) | Formula::Forall(_, f) | Formula::Exists(_, f) => 1 + f.depth(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                1 + a.depth().max(b.depth())
            }
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        let add_term = |t: &Term, out: &mut BTreeSet<String>| {
            let mut vs = BTreeSet::new();
            t.collect_vars(&mut vs);
            for v in vs {
                if !bound.contains(&v) {
                    out.insert(v);
                }
            }
        };
        match self {
            Formula::Rel(_, args) => args.iter().for_each(|t| add_term(t, out)),
            Formula::Eq(a, b) => {
                add_term(a, out);
                add_term(b, out);
            }
            Formula::Not(f) => f.collect_free(bound, out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Forall(v, f) | Formula::Exists(v, f) => {
                bound.push(v.clone());
                f.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// Check that every symbol is declared in `sig` with the arity it is used at.
    pub fn check(&self, sig: &Signature) -> Result<()> {
        match self {
            Formula::Rel(r, args) => {
                match sig.kind(r) {
                    Some(SymbolKind::Relation(a)) if a == args.len() => {}
                    Some(SymbolKind::Relation(a)) => {
                        return Err(Error::ArityMismatch {
                            symbol: r.clone(),
                            expected: a,
                            found: args.len(),
                        })
                    }
                    _ => return Err(Error::UnknownSymbol(r.clone())),
                }
                args.iter().try_for_each(|t| t.check(sig))
            }
            Formula::Eq(a, b) => {
                a.check(sig)?;
                b.check(sig)
            }
            Formula::Not(f) | Formula::Forall(_, f) | Formula::Exists(_, f) => f.check(sig),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.check(sig)?;
                b.check(sig)
            }
        }
    }

    /// Rename relation, function and constant symbols (variables are untouched).
    pub fn rename_symbols(&self, map: &BTreeMap<String, String>) -> Formula {
        let rn = |s: &String| map.get(s).cloned().unwrap_or_else(|| s.clone());
        let bx = |f: &Formula| Box::new(f.rename_symbols(map));
        match self {
            Formula::Rel(r, args) => {
                Formula::Rel(rn(r), args.iter().map(|t| t.rename_symbols(map)).collect())
            }
            Formula::Eq(a, b) => Formula::Eq(a.rename_symbols(map), b.rename_symbols(map)),
            Formula::Not(f) => Formula::Not(bx(f)),
            Formula::And(a, b) => Formula::And(bx(a), bx(b)),
            Formula::Or(a, b) => Formula::Or(bx(a), bx(b)),
            Formula::Implies(a, b) => Formula::Implies(bx(a), bx(b)),
            Formula::Iff(a, b) => Formula::Iff(bx(a), bx(b)),
            Formula::Forall(v, f) => Formula::Forall(v.clone(), bx(f)),
            Formula::Exists(v, f) => Formula::Exists(v.clone(), bx(f)),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Forall(..) | Formula::Exists(..) => 0,
            Formula::Iff(..) => 1,
            Formula::Implies(..) => 2,
            Formula::Or(..) => 3,
            Formula::And(..) => 4,
            Formula::Rel(..) | Formula::Eq(..) | Formula::Not(..) => 5,
        }
    }

    fn write_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let paren = self.precedence() < min;
        if paren {
            f.write_str("(")?;
        }
        match self {
            Formula::Rel(r, args) if is_infix_relation(r) && args.len() == 2 => {
                write!(f, "{}{}{}", args[0], r, args[1])?
            }
            Formula::Rel(r, args) => {
                write!(f, "{r}(")?;
                write_args(f, args)?;
                f.write_str(")")?
            }
            Formula::Eq(a, b) => write!(f, "{a}={b}")?,
            Formula::Not(inner) => match inner.as_ref() {
                Formula::Eq(a, b) => write!(f, "{a}!={b}")?,
                other => {
                    f.write_str("!")?;
                    other.write_prec(f, 5)?
                }
            },
            Formula::And(a, b) => binary(f, a, " & ", b, 4, 5)?,
            Formula::Or(a, b) => binary(f, a, " | ", b, 3, 4)?,
            Formula::Implies(a, b) => binary(f, a, " -> ", b, 3, 2)?,
            Formula::Iff(a, b) => binary(f, a, " <-> ", b, 1, 2)?,
            Formula::Forall(v, body) => {
                write!(f, "A {v}. ")?;
                body.write_prec(f, 0)?
            }
            Formula::Exists(v, body) => {
                write!(f, "E {v}. ")?;
                body.write_prec(f, 0)?
            }
        }
        if paren {
            f.write_str(")")?;
        }
        Ok(())
    }
}

fn binary(
    f: &mut fmt::Formatter<'_>,
    a: &Formula,
    op: &str,
    b: &Formula,
    left: u8,
    right: u8,
) -> fmt::Result {
    a.write_prec(f, left)?;
    f.write_str(op)?;
    b.write_prec(f, right)
}

fn write_args(f: &mut fmt::Formatter<'_>, args: &[Term]) -> fmt::Result {
    for (i, t) in args.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{t}")?;
    }
    Ok(())
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) | Term::Const(v) => f.write_str(v),
            Term::App(g, args) => {
                write!(f, "{g}(")?;
                write_args(f, args)?;
                f.write_str(")")
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_prec(f, 0)
    }
}
