//! Exhaustive enumeration of formulas by size or by depth.
//!
//! Bound variables are named canonically: the quantifier at binding depth
//! `d` always binds the `d`-th fresh name (`y`, `z`, `u`, `v`, `w`, `v1`, ...
//! skipping names already in use). This makes the enumeration finite and
//! free of renamings of the same formula.

use alloc::boxed::Box;
use alloc::format;
use alloc::rc::Rc;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::signature::Signature;
use super::syntax::{Formula, Term};

type FormulaIter = Box<dyn Iterator<Item = Formula>>;

struct Ctx {
    sig: Signature,
    names: Vec<String>,
    free: usize,
}

/// Fresh variable names that avoid `taken` and the symbols of `sig`.
pub fn fresh_names(sig: &Signature, taken: &[&str], count: usize) -> Vec<String> {
    let base = ["y", "z", "u", "v", "w"];
    let mut out: Vec<String> = Vec::with_capacity(count);
    let usable = |n: &str, out: &Vec<String>| {
        !taken.contains(&n) && sig.kind(n).is_none() && !out.iter().any(|o| o == n)
    };
    for b in base {
        if out.len() == count {
            return out;
        }
        if usable(b, &out) {
            out.push(b.to_string());
        }
    }
    let mut i = 1;
    while out.len() < count {
        let n = format!("v{i}");
        if usable(&n, &out) {
            out.push(n);
        }
        i += 1;
    }
    out
}

impl Ctx {
    fn new(sig: &Signature, free: &[&str], bound: usize) -> Ctx {
        let mut names: Vec<String> = free.iter().map(|s| s.to_string()).collect();
        names.extend(fresh_names(sig, free, bound));
        Ctx {
            sig: sig.clone(),
            names,
            free: free.len(),
        }
    }

    fn scope(&self, depth: usize) -> &[String] {
        &self.names[..self.free + depth]
    }

    /// Terms with exactly `w` function applications.
    fn terms_of_weight(&self, depth: usize, w: usize) -> Vec<Term> {
        if w == 0 {
            let mut out: Vec<Term> = self.scope(depth).iter().map(|v| Term::Var(v.clone())).collect();
            out.extend(self.sig.constants().map(Term::constant));
            return out;
        }
        let mut out = Vec::new();
        for (f, arity) in self.sig.functions() {
            for args in self.tuples_of_weight(depth, arity, w - 1) {
                out.push(Term::App(f.to_string(), args));
            }
        }
        out
    }

    fn tuples_of_weight(&self, depth: usize, k: usize, w: usize) -> Vec<Vec<Term>> {
        if k == 0 {
            return if w == 0 { alloc::vec![Vec::new()] } else { Vec::new() };
        }
        let mut out = Vec::new();
        for w0 in 0..=w {
            let heads = self.terms_of_weight(depth, w0);
            if heads.is_empty() {
                continue;
            }
            let tails = self.tuples_of_weight(depth, k - 1, w - w0);
            for h in &heads {
                for t in &tails {
                    let mut v = Vec::with_capacity(k);
                    v.push(h.clone());
                    v.extend(t.iter().cloned());
                    out.push(v);
                }
            }
        }
        out
    }

    fn atoms_of_size(&self, depth: usize, size: usize) -> Vec<Formula> {
        let w = size - 1;
        let mut out = Vec::new();
        for (r, arity) in self.sig.relations() {
            for args in self.tuples_of_weight(depth, arity, w) {
                out.push(Formula::Rel(r.to_string(), args));
            }
        }
        for mut pair in self.tuples_of_weight(depth, 2, w) {
            let b = pair.pop().expect("pair");
            let a = pair.pop().expect("pair");
            out.push(Formula::Eq(a, b));
        }
        out
    }

    fn terms_up_to_depth(&self, depth: usize, td: usize) -> Vec<Term> {
        let mut out: Vec<Term> = self.scope(depth).iter().map(|v| Term::Var(v.clone())).collect();
        out.extend(self.sig.constants().map(Term::constant));
        if td == 0 {
            return out;
        }
        let inner = self.terms_up_to_depth(depth, td - 1);
        for (f, arity) in self.sig.functions() {
            for args in cartesian(&inner, arity) {
                out.push(Term::App(f.to_string(), args));
            }
        }
        out
    }

    fn atoms_up_to_depth(&self, depth: usize, fd: usize) -> Vec<Formula> {
        let terms = self.terms_up_to_depth(depth, fd - 1);
        let mut out = Vec::new();
        for (r, arity) in self.sig.relations() {
            for args in cartesian(&terms, arity) {
                out.push(Formula::Rel(r.to_string(), args));
            }
        }
        for a in &terms {
            for b in &terms {
                out.push(Formula::Eq(a.clone(), b.clone()));
            }
        }
        out
    }
}

fn cartesian(items: &[Term], k: usize) -> Vec<Vec<Term>> {
    let mut out: Vec<Vec<Term>> = alloc::vec![Vec::new()];
    for _ in 0..k {
        let mut next = Vec::with_capacity(out.len() * items.len());
        for prefix in &out {
            for it in items {
                let mut v = prefix.clone();
                v.push(it.clone());
                next.push(v);
            }
        }
        out = next;
    }
    out
}

fn lazy<F>(make: F) -> FormulaIter
where
    F: FnOnce() -> FormulaIter + 'static,
{
    Box::new(Some(make).into_iter().flat_map(|f| f()))
}

fn binary(op: usize, a: Formula, b: Formula) -> Formula {
    match op {
        0 => Formula::and(a, b),
        1 => Formula::or(a, b),
        2 => Formula::implies(a, b),
        _ => Formula::iff(a, b),
    }
}

fn of_size(ctx: Rc<Ctx>, depth: usize, size: usize) -> FormulaIter {
    let c = ctx.clone();
    let mut it: FormulaIter = lazy(move || Box::new(c.atoms_of_size(depth, size).into_iter()));
    if size >= 2 {
        let c = ctx.clone();
        it = Box::new(it.chain(lazy(move || Box::new(of_size(c, depth, size - 1).map(Formula::not)))));
    }
    if size >= 3 {
        for op in 0..4 {
            let c = ctx.clone();
            it = Box::new(it.chain((1..=size - 2).flat_map(move |i| {
                let inner = c.clone();
                of_size(c.clone(), depth, i).flat_map(move |l| {
                    of_size(inner.clone(), depth, size - 1 - i)
                        .map(move |r| binary(op, l.clone(), r))
                })
            })));
        }
    }
    if size >= 2 && ctx.names.len() > ctx.free + depth {
        let v = ctx.names[ctx.free + depth].clone();
        let (c1, c2) = (ctx.clone(), ctx.clone());
        let (v1, v2) = (v.clone(), v);
        it = Box::new(it.chain(lazy(move || {
            Box::new(of_size(c1, depth + 1, size - 1).map(move |b| Formula::forall(&v1, b)))
        })));
        it = Box::new(it.chain(lazy(move || {
            Box::new(of_size(c2, depth + 1, size - 1).map(move |b| Formula::exists(&v2, b)))
        })));
    }
    it
}

/// Every formula over `sig` whose free variables are among `free` and whose
/// [`size`](Formula::size) is at most `size_bound`, each exactly once.
///
/// Formulas come in increasing size; within one size the order is atoms,
/// negations, `&`, `|`, `->`, `<->`, `A`, `E`, recursively. The stream for a
/// smaller bound is a prefix of the stream for a larger one.
pub struct FormulaStream {
    inner: FormulaIter,
}

impl Iterator for FormulaStream {
    type Item = Formula;

    fn next(&mut self) -> Option<Formula> {
        self.inner.next()
    }
}

pub fn enumerate_formulas(sig: &Signature, free: &[&str], size_bound: usize) -> FormulaStream {
    let ctx = Rc::new(Ctx::new(sig, free, size_bound));
    let inner: FormulaIter = Box::new((1..=size_bound).flat_map(move |s| of_size(ctx.clone(), 0, s)));
    FormulaStream { inner }
}

fn up_to_depth(ctx: &Ctx, depth: usize, max_depth: usize) -> Vec<Formula> {
    let mut out = ctx.atoms_up_to_depth(depth, max_depth);
    if max_depth < 2 {
        return out;
    }
    let sub = up_to_depth(ctx, depth, max_depth - 1);
    out.extend(sub.iter().cloned().map(Formula::not));
    for op in 0..4 {
        for a in &sub {
            for b in &sub {
                out.push(binary(op, a.clone(), b.clone()));
            }
        }
    }
    if ctx.names.len() > ctx.free + depth {
        let v = &ctx.names[ctx.free + depth];
        let inner = up_to_depth(ctx, depth + 1, max_depth - 1);
        out.extend(inner.iter().cloned().map(|b| Formula::forall(v, b)));
        out.extend(inner.into_iter().map(|b| Formula::exists(v, b)));
    }
    out
}

/// Every formula with free variables among `free` and
/// [`depth`](Formula::depth) at most `max_depth`, each exactly once.
pub fn enumerate_formulas_by_depth(sig: &Signature, free: &[&str], max_depth: usize) -> Vec<Formula> {
    if max_depth == 0 {
        return Vec::new();
    }
    let ctx = Ctx::new(sig, free, max_depth);
    up_to_depth(&ctx, 0, max_depth)
}

/// Closed formulas of depth at most `max_depth`.
pub fn closed_formulas_by_depth(sig: &Signature, max_depth: usize) -> Vec<Formula> {
    enumerate_formulas_by_depth(sig, &[], max_depth)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::folang::parse_formula;
    use alloc::collections::BTreeSet;

    fn strings(it: impl Iterator<Item = Formula>) -> Vec<String> {
        it.map(|f| f.to_string()).collect()
    }

    #[test]
    fn unary_predicate_bound_two() {
        let sig = Signature::new().with_relation("P", 1).unwrap();
        let all = strings(enumerate_formulas(&sig, &["x"], 2));
        for want in ["P(x)", "x=x", "!P(x)"] {
            assert!(all.iter().any(|s| s == want), "missing {want}");
        }
    }

    #[test]
    fn empty_signature_bound_one() {
        let all = strings(enumerate_formulas(&Signature::new(), &["x"], 1));
        assert_eq!(all, ["x=x"]);
    }

    #[test]
    fn binary_relation_bound_four_has_existential() {
        let sig = Signature::new().with_relation("R", 2).unwrap();
        assert!(enumerate_formulas(&sig, &["x"], 4).any(|f| f.to_string() == "E y. R(x,y)"));
    }

    #[test]
    fn sizes_nondecreasing_and_bounded() {
        let sig = Signature::new().with_relation("P", 1).unwrap().with_constant("c").unwrap();
        let fs: Vec<Formula> = enumerate_formulas(&sig, &["x"], 4).collect();
        assert!(fs.windows(2).all(|w| w[0].size() <= w[1].size()));
        assert!(fs.iter().all(|f| f.size() <= 4));
        assert!(fs.iter().all(|f| f.free_vars().iter().all(|v| v == "x")));
        let unique: BTreeSet<&Formula> = fs.iter().collect();
        assert_eq!(unique.len(), fs.len());
    }

    #[test]
    fn function_terms_are_weighted() {
        let sig = Signature::new().with_function("f", 1).unwrap();
        let all = strings(enumerate_formulas(&sig, &["x"], 2));
        assert!(all.iter().any(|s| s == "f(x)=x"));
        assert!(all.iter().any(|s| s == "x=f(x)"));
        assert!(!all.iter().any(|s| s == "f(f(x))=x"));
    }

    #[test]
    fn emitted_formulas_reparse() {
        let sig = Signature::new()
            .with_relation("R", 2)
            .unwrap()
            .with_constant("c")
            .unwrap();
        for f in enumerate_formulas(&sig, &["x"], 4) {
            assert_eq!(parse_formula(&f.to_string(), &sig).unwrap(), f);
        }
    }

    #[test]
    fn depth_enumeration() {
        let sig = Signature::new().with_relation("P", 1).unwrap();
        let closed = closed_formulas_by_depth(&sig, 2);
        assert!(closed.iter().all(|f| f.is_closed() && f.depth() <= 2));
        assert!(closed.iter().any(|f| f.to_string() == "E y. P(y)"));
        let unique: BTreeSet<&Formula> = closed.iter().collect();
        assert_eq!(unique.len(), closed.len());
        assert!(closed_formulas_by_depth(&sig, 1).is_empty());
    }
}
