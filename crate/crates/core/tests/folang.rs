mod common;

use std::collections::{BTreeMap, BTreeSet};

use common::*;
use defeq_core::folang::{
    enumerate_formulas, eval, eval_closed, parse_formula, Assignment, Formula, Signature,
};
use defeq_core::models::find_isomorphisms;
use defeq_core::Error;
use proptest::prelude::*;

fn full_assignment(n: usize, vals: &[usize]) -> Assignment {
    VARS.iter()
        .zip(vals)
        .map(|(v, &e)| (v.to_string(), e % n))
        .collect()
}

#[test]
fn spec_examples_parse() {
    let r = Signature::new().with_relation("R", 2).unwrap();
    let f = parse_formula("A x. A y. (R(x,y) -> !R(y,x))", &r).unwrap();
    assert!(matches!(f, Formula::Forall(..)));
    assert!(f.is_closed());

    let eq = parse_formula("x=x", &Signature::new()).unwrap();
    assert_eq!(eq.free_vars(), BTreeSet::from(["x".to_string()]));

    let g = Signature::new()
        .with_relation("R", 1)
        .unwrap()
        .with_constant("c")
        .unwrap();
    let f = parse_formula("A x. (R(x) <-> (E y. E z. !(y=z) & x=c))", &g).unwrap();
    assert!(f.is_closed());
    assert_eq!(parse_formula(&f.to_string(), &g).unwrap(), f);
}

#[test]
fn free_variable_examples() {
    let r = Signature::new().with_relation("R", 2).unwrap();
    let fv = |s: &str| parse_formula(s, &r).unwrap().free_vars();
    assert_eq!(fv("A x. R(x,y)"), BTreeSet::from(["y".to_string()]));
    assert_eq!(fv("x=x"), BTreeSet::from(["x".to_string()]));
    assert!(fv("A x. E y. !(x=y)").is_empty());
}

#[test]
fn parse_errors() {
    let r = Signature::new().with_relation("R", 2).unwrap();
    assert!(matches!(
        parse_formula("R(x)", &r),
        Err(Error::ArityMismatch { .. })
    ));
    assert!(matches!(
        parse_formula("A x. (R(x,y)", &r),
        Err(Error::Parse { .. })
    ));
    let sig = Signature::new().with_constant("c").unwrap();
    assert!(parse_formula("c(x) = x", &sig).is_err());
}

#[test]
fn enumeration_is_prefix_stable() {
    let sig = Signature::new()
        .with_relation("P", 1)
        .unwrap()
        .with_constant("c")
        .unwrap();
    let small: Vec<Formula> = enumerate_formulas(&sig, &["x"], 4).collect();
    let large: Vec<Formula> = enumerate_formulas(&sig, &["x"], 5).collect();
    assert_eq!(&large[..small.len()], &small[..]);
    assert!(large[small.len()..].iter().all(|f| f.size() == 5));
    let unique: BTreeSet<&Formula> = large.iter().collect();
    assert_eq!(unique.len(), large.len());
}

#[test]
fn enumeration_covers_every_small_formula() {
    // every formula of size <= 3 over {P:1} with free vars in {x}, with
    // bound variables renamed canonically, shows up
    let sig = Signature::new().with_relation("P", 1).unwrap();
    let all: BTreeSet<String> = enumerate_formulas(&sig, &["x"], 3)
        .map(|f| f.to_string())
        .collect();
    for s in [
        "P(x)",
        "x=x",
        "!!P(x)",
        "P(x) & x=x",
        "x=x -> P(x)",
        "E y. P(y)",
        "A y. x=y",
        "E y. !P(x)",
        "A y. y=y",
    ] {
        assert!(all.contains(s), "missing {s}");
    }
    assert!(!all.contains("P(y)"));
}

proptest! {
    #[test]
    fn print_parse_round_trip(f in arb_formula(&mixed_sig(), 4)) {
        let printed = f.to_string();
        let back = parse_formula(&printed, &mixed_sig()).unwrap();
        prop_assert_eq!(back, f);
    }

    #[test]
    fn connectives_are_homomorphic(
        m in arb_model(mixed_sig(), 3),
        f in arb_formula(&mixed_sig(), 3),
        g in arb_formula(&mixed_sig(), 3),
        vals in proptest::collection::vec(0usize..3, 3),
    ) {
        let a = full_assignment(m.size(), &vals);
        let ef = eval(&m, &f, &a).unwrap();
        let eg = eval(&m, &g, &a).unwrap();
        let check = |h: Formula| eval(&m, &h, &a).unwrap();
        prop_assert_eq!(check(Formula::not(f.clone())), !ef);
        prop_assert_eq!(check(Formula::and(f.clone(), g.clone())), ef && eg);
        prop_assert_eq!(check(Formula::or(f.clone(), g.clone())), ef || eg);
        prop_assert_eq!(check(Formula::implies(f.clone(), g.clone())), !ef || eg);
        prop_assert_eq!(check(Formula::iff(f.clone(), g.clone())), ef == eg);
        let exists = (0..m.size()).any(|e| {
            let mut b = a.clone();
            b.insert("x".into(), e);
            eval(&m, &f, &b).unwrap()
        });
        prop_assert_eq!(check(Formula::exists("x", f.clone())), exists);
        let forall = (0..m.size()).all(|e| {
            let mut b = a.clone();
            b.insert("x".into(), e);
            eval(&m, &f, &b).unwrap()
        });
        prop_assert_eq!(check(Formula::forall("x", f)), forall);
    }

    #[test]
    fn truth_is_isomorphism_invariant(
        m in arb_model(mixed_sig(), 3),
        f in arb_formula(&mixed_sig(), 3),
        vals in proptest::collection::vec(0usize..3, 3),
        seed in 0usize..6,
    ) {
        let perms = all_bijections(m.size());
        let h = &perms[seed % perms.len()];
        let n = m.permuted(h);
        prop_assert!(find_isomorphisms(&m, &n).unwrap().contains(h));
        let a = full_assignment(m.size(), &vals);
        let ha: Assignment = a.iter().map(|(v, &e)| (v.clone(), h[e])).collect();
        prop_assert_eq!(eval(&m, &f, &a).unwrap(), eval(&n, &f, &ha).unwrap());
    }

    #[test]
    fn sentences_need_no_assignment(
        m in arb_model(mixed_sig(), 3),
        f in arb_sentence(&mixed_sig(), 3),
    ) {
        let a: Assignment = BTreeMap::new();
        prop_assert_eq!(eval_closed(&m, &f).unwrap(), eval(&m, &f, &a).unwrap());
    }
}
