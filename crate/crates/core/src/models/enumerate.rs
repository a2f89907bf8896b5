use alloc::format;
use alloc::vec::Vec;
use core::ops::ControlFlow;

use super::{tuple_count, FiniteModel, Theory};
use crate::error::{Error, Result};
use crate::folang::{holds, Formula};

/// Work limits for exhaustive model enumeration.
///
/// `max_nodes` bounds the number of candidate structures visited;
/// `max_function_tables` bounds the number of function/constant skeletons.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub max_nodes: u64,
    pub max_function_tables: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_nodes: 20_000_000,
            max_function_tables: 2_000_000,
        }
    }
}

impl Budget {
    pub fn unlimited() -> Self {
        Budget {
            max_nodes: u64::MAX,
            max_function_tables: u64::MAX,
        }
    }
}

fn mentions_relation(f: &Formula) -> bool {
    match f {
        Formula::Rel(..) => true,
        Formula::Eq(..) => false,
        Formula::Not(g) | Formula::Forall(_, g) | Formula::Exists(_, g) => mentions_relation(g),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
            mentions_relation(a) || mentions_relation(b)
        }
    }
}

/// Advance a little-endian odometer of digits below `radix`; false on wrap.
fn bump(digits: &mut [usize], radix: usize) -> bool {
    for d in digits.iter_mut() {
        *d += 1;
        if *d < radix {
            return true;
        }
        *d = 0;
    }
    false
}

/// Visit every model of `t` on `{0..size-1}` in enumeration order.
///
/// Function and constant tables form the outer loop and relation bitmaps the
/// inner one; within each loop the first cell varies fastest. Axioms that
/// mention no relation symbol prune whole skeletons.
pub fn for_each_model<F>(t: &Theory, size: usize, budget: &Budget, mut visit: F) -> Result<()>
where
    F: FnMut(&FiniteModel) -> ControlFlow<()>,
{
    let mut m = FiniteModel::with_shared_sig(t.shared_sig().clone(), size)?;
    let sig = t.sig();
    let fun_lens: Vec<usize> = sig.functions().map(|(_, a)| tuple_count(size, a)).collect();
    let skeleton_cells = fun_lens.iter().sum::<usize>() + sig.constant_count();
    let skeletons = (size as u64)
        .checked_pow(skeleton_cells as u32)
        .unwrap_or(u64::MAX);
    if skeletons > budget.max_function_tables {
        return Err(Error::BudgetExceeded(format!(
            "{size}^{skeleton_cells} function/constant tables exceed the limit of {}",
            budget.max_function_tables
        )));
    }
    let (skeleton_axioms, relation_axioms): (Vec<&Formula>, Vec<&Formula>) =
        t.axioms().iter().partition(|a| !mentions_relation(a));
    let rel_cells: usize = m.relations.iter().map(|r| r.len()).sum();

    let mut env = Vec::new();
    let mut nodes: u64 = 0;
    let mut skeleton = alloc::vec![0usize; skeleton_cells];
    let mut bits = alloc::vec![false; rel_cells];
    loop {
        load_skeleton(&mut m, &fun_lens, &skeleton);
        nodes += 1;
        if skeleton_axioms.iter().all(|a| holds(&m, a, &mut env)) {
            bits.iter_mut().for_each(|b| *b = false);
            loop {
                nodes += 1;
                if nodes > budget.max_nodes {
                    return Err(Error::BudgetExceeded(format!(
                        "more than {} candidate structures of size {size}",
                        budget.max_nodes
                    )));
                }
                load_bits(&mut m, &bits);
                if relation_axioms.iter().all(|a| holds(&m, a, &mut env))
                    && visit(&m).is_break()
                {
                    return Ok(());
                }
                if !bump_bits(&mut bits) {
                    break;
                }
            }
        } else if nodes > budget.max_nodes {
            return Err(Error::BudgetExceeded(format!(
                "more than {} candidate structures of size {size}",
                budget.max_nodes
            )));
        }
        if !bump(&mut skeleton, size) {
            return Ok(());
        }
    }
}

fn bump_bits(bits: &mut [bool]) -> bool {
    for b in bits.iter_mut() {
        if *b {
            *b = false;
        } else {
            *b = true;
            return true;
        }
    }
    false
}

fn load_bits(m: &mut FiniteModel, bits: &[bool]) {
    let mut off = 0;
    for table in m.relations_mut().iter_mut() {
        let len = table.len();
        table.copy_from_slice(&bits[off..off + len]);
        off += len;
    }
}

fn load_skeleton(m: &mut FiniteModel, fun_lens: &[usize], cells: &[usize]) {
    let mut off = 0;
    for (table, &len) in m.functions_mut().iter_mut().zip(fun_lens) {
        table.copy_from_slice(&cells[off..off + len]);
        off += len;
    }
    let consts = m.constants_mut();
    let k = consts.len();
    consts.copy_from_slice(&cells[off..off + k]);
}

/// All models of `t` of the given size, with the default budget.
pub fn enumerate_models(t: &Theory, size: usize) -> Result<Vec<FiniteModel>> {
    enumerate_models_with(t, size, &Budget::default())
}

pub fn enumerate_models_with(t: &Theory, size: usize, budget: &Budget) -> Result<Vec<FiniteModel>> {
    let mut out = Vec::new();
    for_each_model(t, size, budget, |m| {
        out.push(m.clone());
        ControlFlow::Continue(())
    })?;
    Ok(out)
}

/// Models of every size `1..=max_size`, smallest sizes first.
pub fn enumerate_models_up_to(
    t: &Theory,
    max_size: usize,
    budget: &Budget,
) -> Result<Vec<FiniteModel>> {
    let mut out = Vec::new();
    for n in 1..=max_size {
        out.extend(enumerate_models_with(t, n, budget)?);
    }
    Ok(out)
}
