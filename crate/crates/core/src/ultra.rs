//! Ultrafilters on finite index sets and ultraproducts of finite models.
//!
//! Every ultrafilter on a finite index set is principal, so a quotient is
//! always isomorphic to one of its factors. The construction below still
//! follows the textbook definition (choice functions modulo agreement on a
//! member set) and leaves the principal reduction to be tested.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::folang::{holds, Formula};
use crate::models::{tuple_count, FiniteModel};

/// Largest supported index set; member sets are bitmasks.
pub const MAX_INDEX: usize = 16;

/// Default limit on the number of choice functions.
pub const DEFAULT_CHOICE_BUDGET: u64 = 1_000_000;

/// An ultrafilter on `{0..k-1}`, stored as its member sets (bit `i` = index `i`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ultrafilter {
    index_size: usize,
    members: BTreeSet<u64>,
    point: usize,
}

impl Ultrafilter {
    /// `{A ⊆ I : i0 ∈ A}`.
    pub fn principal(i0: usize, k: usize) -> Result<Self> {
        if k == 0 || k > MAX_INDEX {
            return Err(Error::InvalidUltrafilter(format!(
                "index set size {k} outside 1..={MAX_INDEX}"
            )));
        }
        if i0 >= k {
            return Err(Error::InvalidUltrafilter(format!(
                "point {i0} outside index set of size {k}"
            )));
        }
        let members = (0..1u64 << k).filter(|a| a >> i0 & 1 == 1).collect();
        Ok(Ultrafilter {
            index_size: k,
            members,
            point: i0,
        })
    }

    /// Build from explicit member sets, checking the ultrafilter axioms.
    pub fn from_members(k: usize, members: BTreeSet<u64>) -> Result<Self> {
        if k == 0 || k > MAX_INDEX {
            return Err(Error::InvalidUltrafilter(format!(
                "index set size {k} outside 1..={MAX_INDEX}"
            )));
        }
        let full = (1u64 << k) - 1;
        if let Some(a) = members.iter().find(|&&a| a & !full != 0) {
            return Err(Error::InvalidUltrafilter(format!(
                "member {a:#b} is not a subset of the index set"
            )));
        }
        if members.contains(&0) {
            return Err(Error::InvalidUltrafilter("contains the empty set".into()));
        }
        for a in 0..=full {
            if members.contains(&a) == members.contains(&(full & !a)) {
                return Err(Error::InvalidUltrafilter(format!(
                    "exactly one of {a:#b} and its complement must be a member"
                )));
            }
        }
        for &a in &members {
            for b in 0..=full {
                if b & a == a && !members.contains(&b) {
                    return Err(Error::InvalidUltrafilter(format!(
                        "not upward closed: {a:#b} ⊆ {b:#b}"
                    )));
                }
            }
            for &b in &members {
                if !members.contains(&(a & b)) {
                    return Err(Error::InvalidUltrafilter(format!(
                        "not closed under intersection: {a:#b} ∩ {b:#b}"
                    )));
                }
            }
        }
        let point = (0..k)
            .find(|&i| members.contains(&(1u64 << i)))
            .ok_or_else(|| Error::InvalidUltrafilter("no principal point".into()))?;
        Ok(Ultrafilter {
            index_size: k,
            members,
            point,
        })
    }

    pub fn index_size(&self) -> usize {
        self.index_size
    }

    /// The index whose singleton is a member.
    pub fn point(&self) -> usize {
        self.point
    }

    pub fn members(&self) -> impl Iterator<Item = u64> + '_ {
        self.members.iter().copied()
    }

    pub fn contains(&self, set: u64) -> bool {
        self.members.contains(&set)
    }

    /// Membership of `{i : pred(i)}`.
    pub fn holds_almost_everywhere(&self, pred: impl Fn(usize) -> bool) -> bool {
        let set = (0..self.index_size)
            .filter(|&i| pred(i))
            .fold(0u64, |acc, i| acc | 1 << i);
        self.contains(set)
    }
}

/// The quotient of the product together with the class of every choice function.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UltraproductResult {
    pub quotient: FiniteModel,
    factor_sizes: Vec<usize>,
    class_map: Vec<usize>,
    representatives: Vec<Vec<usize>>,
}

impl UltraproductResult {
    fn code(&self, f: &[usize]) -> usize {
        f.iter()
            .zip(&self.factor_sizes)
            .fold(0, |acc, (&v, &r)| acc * r + v)
    }

    /// Quotient element of the choice function `f` (`f[i]` in factor `i`).
    pub fn class_of(&self, f: &[usize]) -> Option<usize> {
        if f.len() != self.factor_sizes.len()
            || f.iter().zip(&self.factor_sizes).any(|(&v, &r)| v >= r)
        {
            return None;
        }
        Some(self.class_map[self.code(f)])
    }

    /// Lexicographically least choice function of each class.
    pub fn representatives(&self) -> &[Vec<usize>] {
        &self.representatives
    }

    pub fn choice_function_count(&self) -> usize {
        self.class_map.len()
    }
}

fn decode_choice(sizes: &[usize], mut code: usize, out: &mut [usize]) {
    for (slot, &r) in out.iter_mut().zip(sizes).rev() {
        *slot = code % r;
        code /= r;
    }
}

fn check_factors(models: &[FiniteModel], u: &Ultrafilter) -> Result<()> {
    if models.len() != u.index_size() {
        return Err(Error::FactorMismatch(format!(
            "{} models for an index set of size {}",
            models.len(),
            u.index_size()
        )));
    }
    if let Some(m) = models.iter().find(|m| m.sig() != models[0].sig()) {
        return Err(Error::SignatureMismatch(format!(
            "factors over {} and {}",
            models[0].sig(),
            m.sig()
        )));
    }
    Ok(())
}

pub fn ultraproduct(models: &[FiniteModel], u: &Ultrafilter) -> Result<UltraproductResult> {
    ultraproduct_with(models, u, DEFAULT_CHOICE_BUDGET)
}

/// Quotient of `∏ M_i` by agreement on a member of `u`, classes labelled in
/// the lexicographic order of their least choice function.
pub fn ultraproduct_with(
    models: &[FiniteModel],
    u: &Ultrafilter,
    max_choice_functions: u64,
) -> Result<UltraproductResult> {
    check_factors(models, u)?;
    let sizes: Vec<usize> = models.iter().map(|m| m.size()).collect();
    let total = sizes
        .iter()
        .try_fold(1u64, |acc, &s| acc.checked_mul(s as u64))
        .filter(|&t| t <= max_choice_functions)
        .ok_or_else(|| {
            Error::BudgetExceeded(format!(
                "more than {max_choice_functions} choice functions"
            ))
        })? as usize;
    let k = models.len();
    let mut class_map = Vec::with_capacity(total);
    let mut reps: Vec<Vec<usize>> = Vec::new();
    let mut f = alloc::vec![0; k];
    for code in 0..total {
        decode_choice(&sizes, code, &mut f);
        let found = reps
            .iter()
            .position(|r| u.holds_almost_everywhere(|i| r[i] == f[i]));
        let class = match found {
            Some(c) => c,
            None => {
                reps.push(f.clone());
                reps.len() - 1
            }
        };
        class_map.push(class);
    }

    let sig = models[0].shared_sig().clone();
    let m = reps.len();
    let mut quotient = FiniteModel::with_shared_sig(sig.clone(), m)?;
    let class_of = |g: &[usize]| {
        let code = g.iter().zip(&sizes).fold(0, |acc, (&v, &r)| acc * r + v);
        class_map[code]
    };
    let mut classes = Vec::new();
    let mut args = Vec::new();
    let mut g = alloc::vec![0; k];
    for (idx, (_, arity)) in sig.relations().enumerate() {
        classes.resize(arity, 0);
        args.resize(arity, 0);
        for code in 0..tuple_count(m, arity) {
            crate::models::decode_tuple(m, code, &mut classes);
            let value = u.holds_almost_everywhere(|i| {
                let mut a = [0usize; 8];
                let tuple: Vec<usize>;
                let t: &[usize] = if arity <= a.len() {
                    for (slot, &c) in a.iter_mut().zip(classes.iter()) {
                        *slot = reps[c][i];
                    }
                    &a[..arity]
                } else {
                    tuple = classes.iter().map(|&c| reps[c][i]).collect();
                    &tuple
                };
                models[i].relation_holds(idx, t)
            });
            quotient.relations_mut()[idx][code] = value;
        }
    }
    for (idx, (_, arity)) in sig.functions().enumerate() {
        classes.resize(arity, 0);
        args.resize(arity, 0);
        for code in 0..tuple_count(m, arity) {
            crate::models::decode_tuple(m, code, &mut classes);
            for (i, gi) in g.iter_mut().enumerate() {
                for (a, &c) in args.iter_mut().zip(classes.iter()) {
                    *a = reps[c][i];
                }
                *gi = models[i].function_apply(idx, &args);
            }
            quotient.functions_mut()[idx][code] = class_of(&g);
        }
    }
    for idx in 0..sig.constant_count() {
        for (i, gi) in g.iter_mut().enumerate() {
            *gi = models[i].constant_value(idx);
        }
        quotient.constants_mut()[idx] = class_of(&g);
    }
    Ok(UltraproductResult {
        quotient,
        factor_sizes: sizes,
        class_map,
        representatives: reps,
    })
}

/// `a ↦` class of the constant function `a`, in the ultrapower of `m` by `u`.
pub fn diagonal_embedding(m: &FiniteModel, u: &Ultrafilter) -> Result<Vec<usize>> {
    let factors = alloc::vec![m.clone(); u.index_size()];
    let up = ultraproduct(&factors, u)?;
    Ok((0..m.size())
        .map(|a| {
            up.class_of(&alloc::vec![a; u.index_size()])
                .expect("constant function")
        })
        .collect())
}

/// Both sides of Łoś's theorem for a closed formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LosOutcome {
    /// Truth in the ultraproduct.
    pub lhs: bool,
    /// Whether the set of factors satisfying the formula is a member.
    pub rhs: bool,
    pub ok: bool,
}

pub fn los_check(models: &[FiniteModel], u: &Ultrafilter, f: &Formula) -> Result<LosOutcome> {
    check_factors(models, u)?;
    f.check(models[0].sig())?;
    if let Some(v) = f.free_vars().into_iter().next() {
        return Err(Error::OpenAxiom(v));
    }
    let up = ultraproduct(models, u)?;
    Ok(los_outcome(models, u, &up.quotient, f))
}

/// Łoś check against an already computed quotient.
pub fn los_outcome(
    models: &[FiniteModel],
    u: &Ultrafilter,
    quotient: &FiniteModel,
    f: &Formula,
) -> LosOutcome {
    let mut env = Vec::new();
    let lhs = holds(quotient, f, &mut env);
    let rhs = u.holds_almost_everywhere(|i| holds(&models[i], f, &mut Vec::new()));
    LosOutcome {
        lhs,
        rhs,
        ok: lhs == rhs,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::folang::{parse_formula, Signature};
    use alloc::vec;

    fn p_model(p: &[&[usize]]) -> FiniteModel {
        let sig = Signature::new().with_relation("P", 1).unwrap();
        FiniteModel::builder(sig, 2)
            .unwrap()
            .relation("P", p)
            .unwrap()
            .build()
    }

    #[test]
    fn principal_members() {
        let u = Ultrafilter::principal(1, 3).unwrap();
        let members: Vec<u64> = u.members().collect();
        assert_eq!(members, vec![0b010, 0b011, 0b110, 0b111]);
        let one = Ultrafilter::principal(0, 1).unwrap();
        assert_eq!(one.members().collect::<Vec<_>>(), vec![1]);
        let u = Ultrafilter::principal(2, 4).unwrap();
        let again = Ultrafilter::from_members(4, u.members().collect()).unwrap();
        assert_eq!(again, u);
        assert!(Ultrafilter::principal(3, 3).is_err());
    }

    #[test]
    fn non_ultrafilters_are_rejected() {
        let full_only: BTreeSet<u64> = [0b11].into_iter().collect();
        assert!(Ultrafilter::from_members(2, full_only).is_err());
        let everything: BTreeSet<u64> = (0..4).collect();
        assert!(Ultrafilter::from_members(2, everything).is_err());
    }

    #[test]
    fn principal_quotient_is_the_chosen_factor() {
        let ms = vec![p_model(&[]), p_model(&[&[0]]), p_model(&[&[0]])];
        let u = Ultrafilter::principal(2, 3).unwrap();
        let up = ultraproduct(&ms, &u).unwrap();
        assert_eq!(up.quotient, ms[2]);
        assert_eq!(up.quotient.relation_tuples("P").unwrap(), vec![vec![0]]);
        assert_eq!(up.choice_function_count(), 8);
        assert_eq!(up.representatives(), &[vec![0, 0, 0], vec![0, 0, 1]]);
        assert_eq!(up.class_of(&[1, 1, 1]), Some(1));
        assert_eq!(up.class_of(&[1, 0, 0]), Some(0));
    }

    #[test]
    fn single_factor_and_diagonal() {
        let m = p_model(&[&[1]]);
        let u = Ultrafilter::principal(0, 1).unwrap();
        assert_eq!(ultraproduct(core::slice::from_ref(&m), &u).unwrap().quotient, m);
        let u2 = Ultrafilter::principal(0, 2).unwrap();
        assert_eq!(diagonal_embedding(&m, &u2).unwrap(), vec![0, 1]);
    }

    #[test]
    fn functions_and_constants_are_quotiented() {
        let sig = Signature::new()
            .with_function("f", 1)
            .unwrap()
            .with_constant("c")
            .unwrap();
        let a = FiniteModel::builder(sig.clone(), 2)
            .unwrap()
            .function("f", &[1, 0])
            .unwrap()
            .build();
        let b = FiniteModel::builder(sig, 3)
            .unwrap()
            .function("f", &[1, 2, 0])
            .unwrap()
            .constant("c", 2)
            .unwrap()
            .build();
        let u = Ultrafilter::principal(1, 2).unwrap();
        let up = ultraproduct(&[a.clone(), b.clone()], &u).unwrap();
        assert_eq!(up.quotient, b);
        let u = Ultrafilter::principal(0, 2).unwrap();
        assert_eq!(ultraproduct(&[a.clone(), b], &u).unwrap().quotient, a);
    }

    #[test]
    fn los_examples() {
        let ms = vec![p_model(&[]), p_model(&[&[0]])];
        let u = Ultrafilter::principal(1, 2).unwrap();
        let f = parse_formula("E x. P(x)", ms[0].sig()).unwrap();
        let out = los_check(&ms, &u, &f).unwrap();
        assert!(out.ok && out.lhs && out.rhs);
        let t = parse_formula("A x. x=x", ms[0].sig()).unwrap();
        assert_eq!(
            los_check(&ms, &u, &t).unwrap(),
            LosOutcome {
                lhs: true,
                rhs: true,
                ok: true
            }
        );
        assert!(matches!(
            los_check(&ms[..1], &u, &t),
            Err(Error::FactorMismatch(_))
        ));
    }

    #[test]
    fn choice_budget_is_enforced() {
        let ms = vec![p_model(&[]); 3];
        let u = Ultrafilter::principal(0, 3).unwrap();
        assert!(matches!(
            ultraproduct_with(&ms, &u, 7),
            Err(Error::BudgetExceeded(_))
        ));
    }
}
