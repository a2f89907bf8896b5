use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::syntax::{Formula, Term};
use crate::error::{Error, Result};
use crate::models::FiniteModel;

/// Values for the free variables of a formula.
pub type Assignment = BTreeMap<String, usize>;

/// Tarskian truth of `f` in `m` under `a`.
pub fn eval(m: &FiniteModel, f: &Formula, a: &Assignment) -> Result<bool> {
    f.check(m.sig())
        .map_err(|e| Error::SignatureMismatch(e.to_string()))?;
    let mut env: Vec<(&str, usize)> = Vec::new();
    for v in f.free_vars() {
        match a.get_key_value(&v) {
            Some((k, &e)) if e < m.size() => env.push((k.as_str(), e)),
            Some((_, &e)) => {
                return Err(Error::ElementOutOfRange {
                    element: e,
                    size: m.size(),
                })
            }
            None => return Err(Error::UnassignedVariable(v)),
        }
    }
    Ok(holds(m, f, &mut env))
}

/// Truth of a closed formula.
pub fn eval_closed(m: &FiniteModel, f: &Formula) -> Result<bool> {
    eval(m, f, &Assignment::new())
}

/// Unchecked evaluation: the caller guarantees that `f` is over `m`'s
/// signature and that `env` binds every free variable. Later bindings
/// shadow earlier ones.
pub(crate) fn holds<'f>(m: &FiniteModel, f: &'f Formula, env: &mut Vec<(&'f str, usize)>) -> bool {
    match f {
        Formula::Rel(r, args) => {
            let idx = m
                .sig()
                .relation_index(r)
                .expect("formula checked against the signature");
            let mut tuple: [usize; 8] = [0; 8];
            if args.len() <= tuple.len() {
                for (slot, t) in tuple.iter_mut().zip(args) {
                    *slot = term_value(m, t, env);
                }
                m.relation_holds(idx, &tuple[..args.len()])
            } else {
                let tuple: Vec<usize> = args.iter().map(|t| term_value(m, t, env)).collect();
                m.relation_holds(idx, &tuple)
            }
        }
        Formula::Eq(a, b) => term_value(m, a, env) == term_value(m, b, env),
        Formula::Not(g) => !holds(m, g, env),
        Formula::And(a, b) => holds(m, a, env) && holds(m, b, env),
        Formula::Or(a, b) => holds(m, a, env) || holds(m, b, env),
        Formula::Implies(a, b) => !holds(m, a, env) || holds(m, b, env),
        Formula::Iff(a, b) => holds(m, a, env) == holds(m, b, env),
        Formula::Forall(v, body) => {
            env.push((v.as_str(), 0));
            let top = env.len() - 1;
            let mut result = true;
            for e in 0..m.size() {
                env[top].1 = e;
                if !holds(m, body, env) {
                    result = false;
                    break;
                }
            }
            env.pop();
            result
        }
        Formula::Exists(v, body) => {
            env.push((v.as_str(), 0));
            let top = env.len() - 1;
            let mut result = false;
            for e in 0..m.size() {
                env[top].1 = e;
                if holds(m, body, env) {
                    result = true;
                    break;
                }
            }
            env.pop();
            result
        }
    }
}

pub(crate) fn term_value(m: &FiniteModel, t: &Term, env: &[(&str, usize)]) -> usize {
    match t {
        Term::Var(v) => env
            .iter()
            .rev()
            .find(|(name, _)| name == v)
            .map(|&(_, e)| e)
            .expect("free variable bound by caller"),
        Term::Const(c) => {
            let idx = m.sig().constant_index(c).expect("checked constant");
            m.constant_value(idx)
        }
        Term::App(g, args) => {
            let idx = m.sig().function_index(g).expect("checked function");
            let vals: Vec<usize> = args.iter().map(|a| term_value(m, a, env)).collect();
            m.function_apply(idx, &vals)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::folang::{parse_formula, Signature};

    fn r_model() -> FiniteModel {
        let sig = Signature::new().with_relation("R", 2).unwrap();
        FiniteModel::builder(sig, 2)
            .unwrap()
            .relation("R", &[&[0, 1]])
            .unwrap()
            .build()
    }

    #[test]
    fn existential_pair() {
        let m = r_model();
        let f = parse_formula("E x. E y. R(x,y)", m.sig()).unwrap();
        assert!(eval_closed(&m, &f).unwrap());
    }

    #[test]
    fn asymmetric_table() {
        let m = r_model();
        let f = parse_formula("A x. A y. (R(x,y) -> !R(y,x))", m.sig()).unwrap();
        assert!(eval_closed(&m, &f).unwrap());
    }

    #[test]
    fn one_point_universe_falsifies_two_distinct_elements() {
        let sig = Signature::new()
            .with_relation("R", 1)
            .unwrap()
            .with_constant("c")
            .unwrap();
        let m = FiniteModel::builder(sig, 1)
            .unwrap()
            .constant("c", 0)
            .unwrap()
            .build();
        let f = parse_formula("A x. (R(x) <-> (E y. E z. !(y=z) & x=c))", m.sig()).unwrap();
        assert!(eval_closed(&m, &f).unwrap());
    }

    #[test]
    fn errors_for_missing_variables_and_symbols() {
        let m = r_model();
        let f = parse_formula("R(x,y)", m.sig()).unwrap();
        let mut a = Assignment::new();
        a.insert("x".into(), 0);
        assert_eq!(eval(&m, &f, &a), Err(Error::UnassignedVariable("y".into())));
        a.insert("y".into(), 5);
        assert!(matches!(
            eval(&m, &f, &a),
            Err(Error::ElementOutOfRange { element: 5, size: 2 })
        ));
        a.insert("y".into(), 1);
        assert_eq!(eval(&m, &f, &a), Ok(true));
        let other = Signature::new().with_relation("P", 1).unwrap();
        let g = parse_formula("P(x)", &other).unwrap();
        assert!(matches!(eval(&m, &g, &a), Err(Error::SignatureMismatch(_))));
    }

    #[test]
    fn shadowing_uses_innermost_binding() {
        let m = r_model();
        let f = parse_formula("E x. (R(x,x) | E x. R(x,x))", m.sig()).unwrap();
        assert!(!eval_closed(&m, &f).unwrap());
        let g = parse_formula("A x. E x. x = x", m.sig()).unwrap();
        assert!(eval_closed(&m, &g).unwrap());
    }
}
