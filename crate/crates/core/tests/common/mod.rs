#![allow(dead_code)]

use defeq_core::folang::{Formula, Signature, Term};
use defeq_core::models::{FiniteModel, Theory};
use proptest::prelude::*;

pub const T1_AXIOM: &str = "(A x. A y. !E(x,y)) | (A x. A y. !R(x,y))";
pub const ASYMMETRY: &str = "A x. A y. (R(x,y) -> !R(y,x))";
pub const GLYMOUR_DEF: &str = "E y. E z. !(y=z) & x=c";
pub const CHAIN_DEF: &str = "(E y. A z. z<=y) & (A z. z<=x)";

pub fn e_r_sig() -> Signature {
    Signature::new()
        .with_relation("E", 2)
        .unwrap()
        .with_relation("R", 2)
        .unwrap()
}

pub fn ex1_t1() -> Theory {
    Theory::from_strs(e_r_sig(), &[T1_AXIOM]).unwrap()
}

pub fn ex1_t2() -> Theory {
    Theory::from_strs(e_r_sig(), &[T1_AXIOM, ASYMMETRY]).unwrap()
}

/// Mixed signature used by the random suites.
pub fn mixed_sig() -> Signature {
    Signature::new()
        .with_relation("P", 1)
        .unwrap()
        .with_relation("R", 2)
        .unwrap()
        .with_function("f", 1)
        .unwrap()
        .with_constant("c")
        .unwrap()
}

/// Relational signature (no functions or constants).
pub fn rel_sig() -> Signature {
    Signature::new()
        .with_relation("P", 1)
        .unwrap()
        .with_relation("R", 2)
        .unwrap()
}

/// Random model over `sig` with universe size in `1..=max_size`.
pub fn arb_model_of_size(sig: Signature, n: usize) -> BoxedStrategy<FiniteModel> {
    let rels: Vec<(String, usize)> = sig.relations().map(|(r, a)| (r.to_string(), a)).collect();
    let funs: Vec<(String, usize)> = sig.functions().map(|(f, a)| (f.to_string(), a)).collect();
    let consts: Vec<String> = sig.constants().map(str::to_string).collect();
    let rel_tables: Vec<_> = rels
        .iter()
        .map(|(_, a)| proptest::collection::vec(any::<bool>(), n.pow(*a as u32)))
        .collect();
    let fun_tables: Vec<_> = funs
        .iter()
        .map(|(_, a)| proptest::collection::vec(0..n, n.pow(*a as u32)))
        .collect();
    let const_vals = proptest::collection::vec(0..n, consts.len());
    (rel_tables, fun_tables, const_vals)
        .prop_map(move |(rt, ft, cv)| {
            let mut m = FiniteModel::new(sig.clone(), n).unwrap();
            for ((name, arity), bits) in rels.iter().zip(rt) {
                let tuples: Vec<Vec<usize>> = bits
                    .iter()
                    .enumerate()
                    .filter(|(_, &b)| b)
                    .map(|(code, _)| decode(n, *arity, code))
                    .collect();
                m.set_relation_tuples(name, &tuples).unwrap();
            }
            for ((name, _), table) in funs.iter().zip(ft) {
                m.set_function(name, &table).unwrap();
            }
            for (name, v) in consts.iter().zip(cv) {
                m.set_constant(name, v).unwrap();
            }
            m
        })
        .boxed()
}

pub fn arb_model(sig: Signature, max_size: usize) -> BoxedStrategy<FiniteModel> {
    (1..=max_size)
        .prop_flat_map(move |n| arb_model_of_size(sig.clone(), n))
        .boxed()
}

/// Tuple with code `code` (first coordinate most significant).
pub fn decode(n: usize, arity: usize, mut code: usize) -> Vec<usize> {
    let mut t = vec![0; arity];
    for slot in t.iter_mut().rev() {
        *slot = code % n;
        code /= n;
    }
    t
}

pub const VARS: [&str; 3] = ["x", "y", "z"];

fn arb_term(sig: &Signature) -> BoxedStrategy<Term> {
    let mut leaves: Vec<Term> = VARS.iter().map(|v| Term::var(v)).collect();
    leaves.extend(sig.constants().map(Term::constant));
    let leaf = proptest::sample::select(leaves).boxed();
    let funs: Vec<(String, usize)> = sig.functions().map(|(f, a)| (f.to_string(), a)).collect();
    if funs.is_empty() {
        return leaf;
    }
    leaf.prop_recursive(2, 4, 2, move |inner| {
        let funs = funs.clone();
        (proptest::sample::select(funs), proptest::collection::vec(inner, 1..=2)).prop_map(
            |((f, a), mut args)| {
                args.resize(a, args[0].clone());
                Term::app(&f, args)
            },
        )
    })
    .boxed()
}

fn arb_atom(sig: &Signature) -> BoxedStrategy<Formula> {
    let term = arb_term(sig);
    let eq = (term.clone(), term.clone())
        .prop_map(|(a, b)| Formula::eq(a, b))
        .boxed();
    let rels: Vec<(String, usize)> = sig.relations().map(|(r, a)| (r.to_string(), a)).collect();
    if rels.is_empty() {
        return eq;
    }
    let rel = (proptest::sample::select(rels), proptest::collection::vec(term, 3))
        .prop_map(|((r, a), mut args)| {
            args.truncate(a);
            Formula::rel(&r, args)
        })
        .boxed();
    prop_oneof![1 => eq, 3 => rel].boxed()
}

/// Random formula over `sig` whose variables come from [`VARS`], with at
/// most `depth` connective/quantifier levels above the atoms.
pub fn arb_formula(sig: &Signature, depth: u32) -> BoxedStrategy<Formula> {
    let var = proptest::sample::select(VARS.to_vec());
    arb_atom(sig)
        .prop_recursive(depth, 32, 2, move |inner| {
            prop_oneof![
                inner.clone().prop_map(Formula::not),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::implies(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::iff(a, b)),
                (var.clone(), inner.clone()).prop_map(|(v, f)| Formula::forall(v, f)),
                (var.clone(), inner).prop_map(|(v, f)| Formula::exists(v, f)),
            ]
        })
        .boxed()
}

/// Existential closure of a random formula.
pub fn arb_sentence(sig: &Signature, depth: u32) -> BoxedStrategy<Formula> {
    arb_formula(sig, depth)
        .prop_map(|f| {
            let free: Vec<String> = f.free_vars().into_iter().collect();
            free.iter().rev().fold(f, |acc, v| Formula::exists(v, acc))
        })
        .boxed()
}

/// All bijections of `{0..n-1}`, by brute force.
pub fn all_bijections(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in all_bijections(n - 1) {
        for i in 0..n {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out.sort();
    out
}

/// Isomorphisms found by trying every bijection.
pub fn brute_isomorphisms(m: &FiniteModel, n: &FiniteModel) -> Vec<Vec<usize>> {
    if m.size() != n.size() {
        return Vec::new();
    }
    all_bijections(m.size())
        .into_iter()
        .filter(|h| m.permuted(h) == *n)
        .collect()
}
