//! Definitional extensions, unique expansion, bounded explicit-definition
//! search and substructure closure.
//!
//! Positive answers here mean "no counterexample among models up to the
//! size bound" and nothing more.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::ops::ControlFlow;

use crate::error::{Error, Result};
use crate::folang::{enumerate_formulas, holds, Formula, Signature, Term};
use crate::models::{
    decode_tuple, enumerate_models_up_to, for_each_model, is_model, reduct, substructure,
    is_admissible_subset, tuple_count, Budget, FiniteModel, Theory,
};

/// `symbol(params) :<-> body`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Definition {
    symbol: String,
    params: Vec<String>,
    body: Formula,
}

impl Definition {
    /// The free variables of `body` must be among the pairwise distinct `params`.
    pub fn new(symbol: &str, params: Vec<String>, body: Formula) -> Result<Self> {
        if params.is_empty() {
            return Err(Error::ZeroArity(symbol.to_string()));
        }
        for (i, p) in params.iter().enumerate() {
            if params[..i].contains(p) {
                return Err(Error::InvalidDefinition(format!(
                    "parameter `{p}` of `{symbol}` repeated"
                )));
            }
        }
        if let Some(v) = body.free_vars().into_iter().find(|v| !params.contains(v)) {
            return Err(Error::InvalidDefinition(format!(
                "free variable `{v}` of the definition of `{symbol}` is not a parameter"
            )));
        }
        Ok(Definition {
            symbol: symbol.to_string(),
            params,
            body,
        })
    }

    pub fn symbol(&self) -> &str {
        &self.symbol
    }

    pub fn params(&self) -> &[String] {
        &self.params
    }

    pub fn body(&self) -> &Formula {
        &self.body
    }

    pub fn arity(&self) -> usize {
        self.params.len()
    }

    /// `∀params (symbol(params) <-> body)`.
    pub fn biconditional(&self) -> Formula {
        let atom = Formula::rel(
            &self.symbol,
            self.params.iter().map(|p| Term::var(p)).collect(),
        );
        Formula::forall_many(&self.params, Formula::iff(atom, self.body.clone()))
    }
}

impl fmt::Display for Definition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({}) := {}", self.symbol, self.params.join(","), self.body)
    }
}

/// Definitions of new relation symbols, keyed by symbol.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DefinitionSet {
    defs: BTreeMap<String, Definition>,
}

impl DefinitionSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, def: Definition) -> Result<()> {
        if self.defs.contains_key(def.symbol()) {
            return Err(Error::DuplicateSymbol(def.symbol().to_string()));
        }
        self.defs.insert(def.symbol.clone(), def);
        Ok(())
    }

    pub fn with(mut self, def: Definition) -> Result<Self> {
        self.insert(def)?;
        Ok(self)
    }

    pub fn get(&self, symbol: &str) -> Option<&Definition> {
        self.defs.get(symbol)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Definition> {
        self.defs.values()
    }

    pub fn len(&self) -> usize {
        self.defs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.defs.is_empty()
    }

    /// New symbols must be fresh and every body must be over `base`.
    pub fn validate(&self, base: &Signature) -> Result<()> {
        for d in self.iter() {
            if base.kind(d.symbol()).is_some() {
                return Err(Error::DuplicateSymbol(d.symbol().to_string()));
            }
            d.body.check(base)?;
        }
        Ok(())
    }

    /// `base` plus one relation per definition.
    pub fn extended_signature(&self, base: &Signature) -> Result<Signature> {
        self.validate(base)?;
        let mut sig = base.clone();
        for d in self.iter() {
            sig.add_relation(d.symbol(), d.arity())?;
        }
        Ok(sig)
    }
}

/// `t` plus the defining biconditional of every new symbol.
pub fn extend_theory(t: &Theory, defs: &DefinitionSet) -> Result<Theory> {
    let sig = defs.extended_signature(t.sig())?;
    let mut axioms = t.axioms().to_vec();
    axioms.extend(defs.iter().map(Definition::biconditional));
    Theory::new(sig, axioms)
}

/// `m` with each defined relation interpreted by its definition.
pub fn expand_model(m: &FiniteModel, defs: &DefinitionSet) -> Result<FiniteModel> {
    let sig = defs.extended_signature(m.sig())?;
    let mut out = FiniteModel::new(sig, m.size())?;
    for (name, _) in m.sig().relations() {
        out.set_relation_tuples(name, &m.relation_tuples(name).expect("own relation"))?;
    }
    for (idx, (name, _)) in m.sig().functions().enumerate() {
        out.set_function(name, m.function_table(idx))?;
    }
    for (idx, name) in m.sig().constants().enumerate() {
        out.set_constant(name, m.constant_value(idx))?;
    }
    for d in defs.iter() {
        let table = satisfying_tuples(m, d.params(), d.body());
        out.set_relation_tuples(d.symbol(), &table)?;
    }
    Ok(out)
}

/// All tuples `ā` (lexicographic) with `m ⊨ body[params := ā]`.
fn satisfying_tuples(m: &FiniteModel, params: &[String], body: &Formula) -> Vec<Vec<usize>> {
    let n = m.size();
    let k = params.len();
    let mut out = Vec::new();
    let mut tuple = alloc::vec![0; k];
    let mut env: Vec<(&str, usize)> = params.iter().map(|p| (p.as_str(), 0)).collect();
    for code in 0..tuple_count(n, k) {
        decode_tuple(n, code, &mut tuple);
        for (slot, &e) in env.iter_mut().zip(&tuple) {
            slot.1 = e;
        }
        if holds(m, body, &mut env) {
            out.push(tuple.clone());
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UniqueExpansion {
    Unique,
    /// Two distinct models of the theory with the same reduct.
    Witness {
        reduct: FiniteModel,
        first: FiniteModel,
        second: FiniteModel,
    },
}

fn visible_signature(t: &Theory, hidden: &[&str]) -> Result<Signature> {
    for h in hidden {
        if t.sig().relation_arity(h).is_none() {
            return Err(Error::UnknownSymbol(h.to_string()));
        }
    }
    Ok(t.sig().without_relations(hidden.iter().copied()))
}

/// Whether every structure over `sig(t) \ hidden` of size at most `max_size`
/// has at most one expansion to a model of `t`.
pub fn unique_expansion_check(
    t: &Theory,
    hidden: &[&str],
    max_size: usize,
    budget: &Budget,
) -> Result<UniqueExpansion> {
    let sigma = visible_signature(t, hidden)?;
    for n in 1..=max_size {
        let mut seen: BTreeMap<FiniteModel, FiniteModel> = BTreeMap::new();
        let mut witness = None;
        let mut failure = None;
        for_each_model(t, n, budget, |m| {
            let r = match reduct(m, &sigma) {
                Ok(r) => r,
                Err(e) => {
                    failure = Some(e);
                    return ControlFlow::Break(());
                }
            };
            if let Some(first) = seen.get(&r) {
                witness = Some(UniqueExpansion::Witness {
                    reduct: r,
                    first: first.clone(),
                    second: m.clone(),
                });
                return ControlFlow::Break(());
            }
            seen.insert(r, m.clone());
            ControlFlow::Continue(())
        })?;
        if let Some(e) = failure {
            return Err(e);
        }
        if let Some(w) = witness {
            return Ok(w);
        }
    }
    Ok(UniqueExpansion::Unique)
}

/// Parameter names used by explicit-definition search for arity `k`.
pub fn default_params(k: usize) -> Vec<String> {
    match k {
        1 => alloc::vec!["x".into()],
        2 => alloc::vec!["x".into(), "y".into()],
        3 => alloc::vec!["x".into(), "y".into(), "z".into()],
        _ => (1..=k).map(|i| format!("x{i}")).collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NotFound {
    /// Two models agree off the target but differ on it, so no formula can work.
    NotImplicitlyDefinable {
        first: FiniteModel,
        second: FiniteModel,
    },
    /// No formula within the size bound works.
    Exhausted { candidates: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BethOutcome {
    Found { definition: Definition, candidates: u64 },
    NotFound(NotFound),
}

/// Whether `target(ā) <-> φ(ā)` holds for every tuple of `m`.
fn defines(m: &FiniteModel, target: usize, params: &[String], phi: &Formula) -> bool {
    let n = m.size();
    let k = params.len();
    let mut tuple = alloc::vec![0; k];
    let mut env: Vec<(&str, usize)> = params.iter().map(|p| (p.as_str(), 0)).collect();
    for code in 0..tuple_count(n, k) {
        decode_tuple(n, code, &mut tuple);
        for (slot, &e) in env.iter_mut().zip(&tuple) {
            slot.1 = e;
        }
        if m.relation_table(target)[code] != holds(m, phi, &mut env) {
            return false;
        }
    }
    true
}

/// The first formula over `sig(t) \ {target}`, in enumeration order and of
/// size at most `formula_bound`, that defines `target` on every model of
/// `t` up to `max_size`.
pub fn beth_search(
    t: &Theory,
    target: &str,
    max_size: usize,
    formula_bound: usize,
    budget: &Budget,
) -> Result<BethOutcome> {
    let sigma = visible_signature(t, &[target])?;
    let arity = t.sig().relation_arity(target).expect("checked above");
    let idx = t.sig().relation_index(target).expect("checked above");
    let models = enumerate_models_up_to(t, max_size, budget)?;

    let mut seen: BTreeMap<FiniteModel, &FiniteModel> = BTreeMap::new();
    for m in &models {
        let r = reduct(m, &sigma)?;
        if let Some(first) = seen.get(&r) {
            return Ok(BethOutcome::NotFound(NotFound::NotImplicitlyDefinable {
                first: (*first).clone(),
                second: m.clone(),
            }));
        }
        seen.insert(r, m);
    }

    let params = default_params(arity);
    let free: Vec<&str> = params.iter().map(String::as_str).collect();
    // models that refuted a candidate are tried first next time
    let mut order: Vec<usize> = (0..models.len()).collect();
    let mut candidates = 0u64;
    for phi in enumerate_formulas(&sigma, &free, formula_bound) {
        candidates += 1;
        let failed = order
            .iter()
            .position(|&i| !defines(&models[i], idx, &params, &phi));
        match failed {
            None => {
                let definition = Definition::new(target, params.clone(), phi)?;
                debug_assert!(models
                    .iter()
                    .all(|m| defines(m, idx, &params, definition.body())));
                return Ok(BethOutcome::Found {
                    definition,
                    candidates,
                });
            }
            Some(pos) if pos > 0 => {
                let i = order.remove(pos);
                order.insert(0, i);
            }
            Some(_) => {}
        }
    }
    Ok(BethOutcome::NotFound(NotFound::Exhausted { candidates }))
}

/// Whether `def` defines its symbol on every model of `t` up to `max_size`.
pub fn definition_holds(
    t: &Theory,
    def: &Definition,
    max_size: usize,
    budget: &Budget,
) -> Result<bool> {
    let idx = t
        .sig()
        .relation_index(def.symbol())
        .ok_or_else(|| Error::UnknownSymbol(def.symbol().to_string()))?;
    def.body().check(t.sig())?;
    let models = enumerate_models_up_to(t, max_size, budget)?;
    Ok(models
        .iter()
        .all(|m| defines(m, idx, def.params(), def.body())))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Closure {
    Closed,
    /// `model` is a model of the theory but its substructure on `subset` is not.
    Witness {
        model: FiniteModel,
        subset: Vec<usize>,
        substructure: FiniteModel,
    },
}

/// Searches models in enumeration order and their admissible subsets in
/// increasing bitmask order for a substructure outside the model class.
pub fn substructure_closure_check(t: &Theory, max_size: usize, budget: &Budget) -> Result<Closure> {
    if max_size > 20 {
        return Err(Error::BudgetExceeded(format!(
            "2^{max_size} subsets per model"
        )));
    }
    for n in 1..=max_size {
        let mut out = None;
        let mut failure = None;
        for_each_model(t, n, budget, |m| {
            for mask in 1u32..(1 << n) {
                let subset: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
                if !is_admissible_subset(m, &subset) {
                    continue;
                }
                let result = substructure(m, &subset).and_then(|(s, _)| {
                    let ok = is_model(&s, t)?;
                    Ok((s, ok))
                });
                match result {
                    Ok((_, true)) => {}
                    Ok((s, false)) => {
                        out = Some(Closure::Witness {
                            model: m.clone(),
                            subset,
                            substructure: s,
                        });
                        return ControlFlow::Break(());
                    }
                    Err(e) => {
                        failure = Some(e);
                        return ControlFlow::Break(());
                    }
                }
            }
            ControlFlow::Continue(())
        })?;
        if let Some(e) = failure {
            return Err(e);
        }
        if let Some(w) = out {
            return Ok(w);
        }
    }
    Ok(Closure::Closed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::folang::parse_formula;
    use crate::models::enumerate_models;
    use alloc::vec;

    const GLYMOUR: &str = "E y. E z. !(y=z) & x=c";

    fn c_sig() -> Signature {
        Signature::new().with_constant("c").unwrap()
    }

    fn glymour_defs() -> DefinitionSet {
        let body = parse_formula(GLYMOUR, &c_sig()).unwrap();
        DefinitionSet::new()
            .with(Definition::new("R", vec!["x".into()], body).unwrap())
            .unwrap()
    }

    fn glymour_t2() -> Theory {
        extend_theory(&Theory::empty(c_sig()), &glymour_defs()).unwrap()
    }

    #[test]
    fn extension_adds_biconditional() {
        let t2 = glymour_t2();
        assert_eq!(t2.axioms().len(), 1);
        assert_eq!(
            t2.axioms()[0].to_string(),
            "A x. R(x) <-> (E y. E z. y!=z & x=c)"
        );
        let base = Theory::empty(c_sig());
        assert_eq!(extend_theory(&base, &DefinitionSet::new()).unwrap(), base);
    }

    #[test]
    fn clashing_definitions_are_rejected() {
        let body = parse_formula("x=c", &c_sig()).unwrap();
        let clash = Definition::new("c", vec!["x".into()], body.clone()).unwrap();
        let defs = DefinitionSet::new().with(clash).unwrap();
        assert!(extend_theory(&Theory::empty(c_sig()), &defs).is_err());
        let open = parse_formula("x=y", &c_sig()).unwrap();
        assert!(Definition::new("R", vec!["x".into()], open).is_err());
        let mut defs = glymour_defs();
        let again = Definition::new("R", vec!["x".into()], body).unwrap();
        assert_eq!(defs.insert(again), Err(Error::DuplicateSymbol("R".into())));
    }

    #[test]
    fn expansion_examples() {
        let defs = glymour_defs();
        let two = FiniteModel::new(c_sig(), 2).unwrap();
        let e = expand_model(&two, &defs).unwrap();
        assert_eq!(e.relation_tuples("R").unwrap(), vec![vec![0]]);
        assert_eq!(reduct(&e, &c_sig()).unwrap(), two);
        let one = FiniteModel::new(c_sig(), 1).unwrap();
        let e = expand_model(&one, &defs).unwrap();
        assert!(e.relation_tuples("R").unwrap().is_empty());
        assert_eq!(expand_model(&two, &DefinitionSet::new()).unwrap(), two);
    }

    #[test]
    fn unique_expansion_examples() {
        let b = Budget::default();
        assert_eq!(
            unique_expansion_check(&glymour_t2(), &["R"], 3, &b).unwrap(),
            UniqueExpansion::Unique
        );
        let pr = Signature::new()
            .with_relation("P", 1)
            .unwrap()
            .with_relation("R", 1)
            .unwrap();
        match unique_expansion_check(&Theory::empty(pr.clone()), &["R"], 1, &b).unwrap() {
            UniqueExpansion::Witness { first, second, .. } => {
                assert!(first.relation_tuples("R").unwrap().is_empty());
                assert_eq!(second.relation_tuples("R").unwrap(), vec![vec![0]]);
            }
            other => panic!("{other:?}"),
        }
        let r = Signature::new().with_relation("R", 1).unwrap();
        let total = Theory::from_strs(r, &["A x. R(x)"]).unwrap();
        assert_eq!(
            unique_expansion_check(&total, &["R"], 2, &b).unwrap(),
            UniqueExpansion::Unique
        );
        assert!(unique_expansion_check(&total, &["Q"], 2, &b).is_err());
    }

    #[test]
    fn beth_examples() {
        let b = Budget::default();
        let r = Signature::new().with_relation("R", 1).unwrap();
        let total = Theory::from_strs(r, &["A x. R(x)"]).unwrap();
        match beth_search(&total, "R", 3, 2, &b).unwrap() {
            BethOutcome::Found { definition, .. } => {
                assert_eq!(definition.body().to_string(), "x=x")
            }
            other => panic!("{other:?}"),
        }
        let pr = Signature::new()
            .with_relation("P", 1)
            .unwrap()
            .with_relation("R", 1)
            .unwrap();
        assert!(matches!(
            beth_search(&Theory::empty(pr), "R", 2, 6, &b).unwrap(),
            BethOutcome::NotFound(NotFound::NotImplicitlyDefinable { .. })
        ));
    }

    #[test]
    fn beth_finds_glymour_definition() {
        let t2 = glymour_t2();
        let b = Budget::default();
        let BethOutcome::Found { definition, .. } = beth_search(&t2, "R", 3, 10, &b).unwrap()
        else {
            panic!("no definition found");
        };
        assert!(definition_holds(&t2, &definition, 3, &b).unwrap());
        let reference = glymour_defs().get("R").unwrap().clone();
        for m in enumerate_models(&Theory::empty(c_sig()), 3).unwrap() {
            let found = expand_model(&m, &DefinitionSet::new().with(definition.clone()).unwrap());
            let expected = expand_model(&m, &DefinitionSet::new().with(reference.clone()).unwrap());
            assert_eq!(found.unwrap(), expected.unwrap());
        }
    }

    #[test]
    fn substructure_closure_examples() {
        let b = Budget::default();
        assert_eq!(
            substructure_closure_check(&Theory::empty(c_sig()), 3, &b).unwrap(),
            Closure::Closed
        );
        match substructure_closure_check(&glymour_t2(), 3, &b).unwrap() {
            Closure::Witness { model, subset, .. } => {
                assert_eq!(model.size(), 2);
                assert_eq!(model.constant("c"), Some(0));
                assert_eq!(model.relation_tuples("R").unwrap(), vec![vec![0]]);
                assert_eq!(subset, vec![0]);
            }
            other => panic!("{other:?}"),
        }
        let one = Theory::from_strs(Signature::new(), &["A x. A y. x=y"]).unwrap();
        assert_eq!(substructure_closure_check(&one, 3, &b).unwrap(), Closure::Closed);
    }
}
