//! Finite structures over a signature.
//!
//! A model always has universe `{0, .., n-1}`. Tables are stored in the
//! signature's name order: every relation as a bitmap over its tuples (first
//! coordinate most significant), every function as a value table over its
//! argument tuples, and every constant as an element.

mod canon;
mod enumerate;
mod iso;

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::folang::{holds, parse_formula, Formula, Signature};

pub use canon::{canonical_key, CanonicalKey};
pub use enumerate::{
    enumerate_models, enumerate_models_up_to, enumerate_models_with, for_each_model, Budget,
};
pub use iso::{
    are_isomorphic, find_isomorphisms, first_isomorphism, for_each_isomorphism, is_isomorphism,
};

/// Largest supported universe; elements are encoded as single bytes.
pub const MAX_UNIVERSE: usize = 255;

pub(crate) fn tuple_count(n: usize, arity: usize) -> usize {
    n.pow(arity as u32)
}

pub(crate) fn tuple_code(n: usize, tuple: &[usize]) -> usize {
    tuple.iter().fold(0, |acc, &e| acc * n + e)
}

pub(crate) fn decode_tuple(n: usize, mut code: usize, out: &mut [usize]) {
    for slot in out.iter_mut().rev() {
        *slot = code % n;
        code /= n;
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FiniteModel {
    sig: Arc<Signature>,
    size: usize,
    relations: Vec<Vec<bool>>,
    functions: Vec<Vec<usize>>,
    constants: Vec<usize>,
}

impl FiniteModel {
    /// All relations empty, every function constantly 0, every constant 0.
    pub fn new(sig: Signature, size: usize) -> Result<Self> {
        Self::with_shared_sig(Arc::new(sig), size)
    }

    pub fn with_shared_sig(sig: Arc<Signature>, size: usize) -> Result<Self> {
        if size == 0 || size > MAX_UNIVERSE {
            return Err(Error::InvalidSize(size));
        }
        let relations = sig
            .relations()
            .map(|(_, a)| alloc::vec![false; tuple_count(size, a)])
            .collect();
        let functions = sig
            .functions()
            .map(|(_, a)| alloc::vec![0; tuple_count(size, a)])
            .collect();
        let constants = alloc::vec![0; sig.constant_count()];
        Ok(FiniteModel {
            sig,
            size,
            relations,
            functions,
            constants,
        })
    }

    pub fn builder(sig: Signature, size: usize) -> Result<ModelBuilder> {
        Ok(ModelBuilder {
            model: Self::new(sig, size)?,
        })
    }

    pub fn sig(&self) -> &Signature {
        &self.sig
    }

    pub fn shared_sig(&self) -> &Arc<Signature> {
        &self.sig
    }

    pub fn size(&self) -> usize {
        self.size
    }

    fn check_element(&self, e: usize) -> Result<()> {
        if e < self.size {
            Ok(())
        } else {
            Err(Error::ElementOutOfRange {
                element: e,
                size: self.size,
            })
        }
    }

    /// Replace the table of relation `name` by the given tuples.
    pub fn set_relation(&mut self, name: &str, tuples: &[&[usize]]) -> Result<()> {
        let owned: Vec<Vec<usize>> = tuples.iter().map(|t| t.to_vec()).collect();
        self.set_relation_tuples(name, &owned)
    }

    pub fn set_relation_tuples(&mut self, name: &str, tuples: &[Vec<usize>]) -> Result<()> {
        let idx = self
            .sig
            .relation_index(name)
            .ok_or_else(|| Error::UnknownSymbol(name.to_string()))?;
        let arity = self.sig.relation_arity(name).expect("indexed relation");
        let mut table = alloc::vec![false; tuple_count(self.size, arity)];
        for t in tuples {
            if t.len() != arity {
                return Err(Error::ArityMismatch {
                    symbol: name.to_string(),
                    expected: arity,
                    found: t.len(),
                });
            }
            for &e in t {
                self.check_element(e)?;
            }
            table[tuple_code(self.size, t)] = true;
        }
        self.relations[idx] = table;
        Ok(())
    }

    /// Set the value table of function `name`, indexed by argument tuple code.
    pub fn set_function(&mut self, name: &str, table: &[usize]) -> Result<()> {
        let idx = self
            .sig
            .function_index(name)
            .ok_or_else(|| Error::UnknownSymbol(name.to_string()))?;
        let arity = self.sig.function_arity(name).expect("indexed function");
        let expected = tuple_count(self.size, arity);
        if table.len() != expected {
            return Err(Error::InvalidTable {
                symbol: name.to_string(),
                reason: format!("expected {expected} entries, found {}", table.len()),
            });
        }
        for &v in table {
            self.check_element(v)?;
        }
        self.functions[idx] = table.to_vec();
        Ok(())
    }

    pub fn set_constant(&mut self, name: &str, value: usize) -> Result<()> {
        let idx = self
            .sig
            .constant_index(name)
            .ok_or_else(|| Error::UnknownSymbol(name.to_string()))?;
        self.check_element(value)?;
        self.constants[idx] = value;
        Ok(())
    }

    pub fn relation_holds(&self, idx: usize, tuple: &[usize]) -> bool {
        self.relations[idx][tuple_code(self.size, tuple)]
    }

    pub fn function_apply(&self, idx: usize, args: &[usize]) -> usize {
        self.functions[idx][tuple_code(self.size, args)]
    }

    pub fn constant_value(&self, idx: usize) -> usize {
        self.constants[idx]
    }

    pub fn relation_table(&self, idx: usize) -> &[bool] {
        &self.relations[idx]
    }

    pub fn function_table(&self, idx: usize) -> &[usize] {
        &self.functions[idx]
    }

    pub fn constant_values(&self) -> &[usize] {
        &self.constants
    }

    pub fn constant(&self, name: &str) -> Option<usize> {
        self.sig.constant_index(name).map(|i| self.constants[i])
    }

    /// Tuples of relation `name` in increasing lexicographic order.
    pub fn relation_tuples(&self, name: &str) -> Option<Vec<Vec<usize>>> {
        let idx = self.sig.relation_index(name)?;
        let arity = self.sig.relation_arity(name)?;
        let mut out = Vec::new();
        for (code, &b) in self.relations[idx].iter().enumerate() {
            if b {
                let mut t = alloc::vec![0; arity];
                decode_tuple(self.size, code, &mut t);
                out.push(t);
            }
        }
        Some(out)
    }

    pub(crate) fn relations_mut(&mut self) -> &mut Vec<Vec<bool>> {
        &mut self.relations
    }

    pub(crate) fn functions_mut(&mut self) -> &mut Vec<Vec<usize>> {
        &mut self.functions
    }

    pub(crate) fn constants_mut(&mut self) -> &mut Vec<usize> {
        &mut self.constants
    }

    /// The image `h(M)` of this model under the bijection `h` of its universe
    /// (element `a` becomes `h[a]`).
    pub fn permuted(&self, h: &[usize]) -> FiniteModel {
        assert_eq!(h.len(), self.size, "bijection must cover the universe");
        let n = self.size;
        let mut out = self.clone();
        let mut buf = alloc::vec![0usize; 8];
        for (idx, (_, arity)) in self.sig.relations().enumerate() {
            buf.resize(arity, 0);
            let table = &mut out.relations[idx];
            table.iter_mut().for_each(|b| *b = false);
            for (code, &b) in self.relations[idx].iter().enumerate() {
                if b {
                    decode_tuple(n, code, &mut buf);
                    buf.iter_mut().for_each(|e| *e = h[*e]);
                    table[tuple_code(n, &buf)] = true;
                }
            }
        }
        for (idx, (_, arity)) in self.sig.functions().enumerate() {
            buf.resize(arity, 0);
            for (code, &v) in self.functions[idx].iter().enumerate() {
                decode_tuple(n, code, &mut buf);
                buf.iter_mut().for_each(|e| *e = h[*e]);
                out.functions[idx][tuple_code(n, &buf)] = h[v];
            }
        }
        for (i, &c) in self.constants.iter().enumerate() {
            out.constants[i] = h[c];
        }
        out
    }

    /// Byte encoding of the tables: size, relation bits, function values, constants.
    pub fn encoding(&self) -> Vec<u8> {
        let mut out = alloc::vec![self.size as u8];
        for t in &self.relations {
            out.extend(t.iter().map(|&b| b as u8));
        }
        for t in &self.functions {
            out.extend(t.iter().map(|&v| v as u8));
        }
        out.extend(self.constants.iter().map(|&v| v as u8));
        out
    }

    /// Same model over a renamed signature.
    pub fn renamed(&self, map: &BTreeMap<String, String>) -> Result<FiniteModel> {
        let sig = self.sig.renamed(map)?;
        let mut out = FiniteModel::new(sig, self.size)?;
        let rn = |s: &str| map.get(s).cloned().unwrap_or_else(|| s.to_string());
        for (i, (name, _)) in self.sig.relations().enumerate() {
            let j = out.sig.relation_index(&rn(name)).expect("renamed relation");
            out.relations[j] = self.relations[i].clone();
        }
        for (i, (name, _)) in self.sig.functions().enumerate() {
            let j = out.sig.function_index(&rn(name)).expect("renamed function");
            out.functions[j] = self.functions[i].clone();
        }
        for (i, name) in self.sig.constants().enumerate() {
            let j = out.sig.constant_index(&rn(name)).expect("renamed constant");
            out.constants[j] = self.constants[i];
        }
        Ok(out)
    }
}

/// Compact one-line rendering, e.g. `size=2 E={} R={(0,1)} c=0`.
impl fmt::Display for FiniteModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "size={}", self.size)?;
        for (name, _) in self.sig.relations() {
            let tuples = self.relation_tuples(name).unwrap_or_default();
            write!(f, " {name}={{")?;
            for (i, t) in tuples.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                let parts: Vec<String> = t.iter().map(|e| e.to_string()).collect();
                write!(f, "({})", parts.join(","))?;
            }
            f.write_str("}")?;
        }
        for (idx, (name, _)) in self.sig.functions().enumerate() {
            let vals: Vec<String> = self.functions[idx].iter().map(|e| e.to_string()).collect();
            write!(f, " {name}=[{}]", vals.join(" "))?;
        }
        for (idx, name) in self.sig.constants().enumerate() {
            write!(f, " {name}={}", self.constants[idx])?;
        }
        Ok(())
    }
}

pub struct ModelBuilder {
    model: FiniteModel,
}

impl ModelBuilder {
    pub fn relation(mut self, name: &str, tuples: &[&[usize]]) -> Result<Self> {
        self.model.set_relation(name, tuples)?;
        Ok(self)
    }

    pub fn function(mut self, name: &str, table: &[usize]) -> Result<Self> {
        self.model.set_function(name, table)?;
        Ok(self)
    }

    pub fn constant(mut self, name: &str, value: usize) -> Result<Self> {
        self.model.set_constant(name, value)?;
        Ok(self)
    }

    pub fn build(self) -> FiniteModel {
        self.model
    }
}

/// A finite list of sentences over a signature.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Theory {
    sig: Arc<Signature>,
    axioms: Vec<Formula>,
}

impl Theory {
    pub fn new(sig: Signature, axioms: Vec<Formula>) -> Result<Self> {
        for ax in &axioms {
            ax.check(&sig)?;
            if let Some(v) = ax.free_vars().into_iter().next() {
                return Err(Error::OpenAxiom(v));
            }
        }
        Ok(Theory {
            sig: Arc::new(sig),
            axioms,
        })
    }

    pub fn empty(sig: Signature) -> Self {
        Theory {
            sig: Arc::new(sig),
            axioms: Vec::new(),
        }
    }

    /// Parse each axiom against `sig`.
    pub fn from_strs(sig: Signature, axioms: &[&str]) -> Result<Self> {
        let parsed = axioms
            .iter()
            .map(|a| parse_formula(a, &sig))
            .collect::<Result<Vec<_>>>()?;
        Theory::new(sig, parsed)
    }

    pub fn sig(&self) -> &Signature {
        &self.sig
    }

    pub fn shared_sig(&self) -> &Arc<Signature> {
        &self.sig
    }

    pub fn axioms(&self) -> &[Formula] {
        &self.axioms
    }

    pub fn with_axiom(self, axiom: Formula) -> Result<Self> {
        let mut axioms = self.axioms;
        axioms.push(axiom);
        Theory::new((*self.sig).clone(), axioms)
    }

    /// Copy of the theory with symbols renamed.
    pub fn renamed(&self, map: &BTreeMap<String, String>) -> Result<Theory> {
        let sig = self.sig.renamed(map)?;
        let axioms = self.axioms.iter().map(|a| a.rename_symbols(map)).collect();
        Theory::new(sig, axioms)
    }
}

/// Membership in the model class of `t`.
pub fn is_model(m: &FiniteModel, t: &Theory) -> Result<bool> {
    if m.sig() != t.sig() {
        return Err(Error::SignatureMismatch(format!(
            "model over {} but theory over {}",
            m.sig(),
            t.sig()
        )));
    }
    let mut env = Vec::new();
    Ok(t.axioms().iter().all(|ax| holds(m, ax, &mut env)))
}

/// Restriction of `m` to the symbols of `sub`.
pub fn reduct(m: &FiniteModel, sub: &Signature) -> Result<FiniteModel> {
    if !sub.is_subsignature_of(m.sig()) {
        return Err(Error::SignatureMismatch(format!(
            "{sub} is not contained in {}",
            m.sig()
        )));
    }
    let mut out = FiniteModel::new(sub.clone(), m.size())?;
    for (i, (name, _)) in sub.relations().enumerate() {
        let j = m.sig().relation_index(name).expect("subsignature");
        out.relations[i] = m.relations[j].clone();
    }
    for (i, (name, _)) in sub.functions().enumerate() {
        let j = m.sig().function_index(name).expect("subsignature");
        out.functions[i] = m.functions[j].clone();
    }
    for (i, name) in sub.constants().enumerate() {
        let j = m.sig().constant_index(name).expect("subsignature");
        out.constants[i] = m.constants[j];
    }
    Ok(out)
}

/// Whether `subset` is the universe of a substructure: nonempty, containing
/// every constant and closed under every function.
pub fn is_admissible_subset(m: &FiniteModel, subset: &[usize]) -> bool {
    admissibility(m, subset).is_ok()
}

fn admissibility(m: &FiniteModel, subset: &[usize]) -> Result<()> {
    if subset.is_empty() {
        return Err(Error::InvalidSubset("empty subset".into()));
    }
    let n = m.size();
    let mut member = alloc::vec![false; n];
    for &e in subset {
        m.check_element(e)?;
        member[e] = true;
    }
    for (name, c) in m.sig().constants().zip(m.constants.iter()) {
        if !member[*c] {
            return Err(Error::InvalidSubset(format!(
                "missing constant `{name}` = {c}"
            )));
        }
    }
    let mut buf = Vec::new();
    for (idx, (name, arity)) in m.sig().functions().enumerate() {
        buf.resize(arity, 0);
        for (code, &v) in m.functions[idx].iter().enumerate() {
            decode_tuple(n, code, &mut buf);
            if buf.iter().all(|&e| member[e]) && !member[v] {
                return Err(Error::InvalidSubset(format!(
                    "not closed under `{name}`: {name}{buf:?} = {v}"
                )));
            }
        }
    }
    Ok(())
}

/// Induced substructure on `subset`, relabeled order-preservingly to
/// `{0..k-1}`. Also returns the relabeling: new element `i` was `map[i]`.
pub fn substructure(m: &FiniteModel, subset: &[usize]) -> Result<(FiniteModel, Vec<usize>)> {
    let mut elems = subset.to_vec();
    elems.sort_unstable();
    elems.dedup();
    admissibility(m, &elems)?;
    let n = m.size();
    let mut new_index = alloc::vec![usize::MAX; n];
    for (i, &e) in elems.iter().enumerate() {
        new_index[e] = i;
    }
    let k = elems.len();
    let mut out = FiniteModel::with_shared_sig(m.sig.clone(), k)?;
    let mut small = Vec::new();
    let mut big = Vec::new();
    for (idx, (_, arity)) in m.sig().relations().enumerate() {
        small.resize(arity, 0);
        big.resize(arity, 0);
        for code in 0..tuple_count(k, arity) {
            decode_tuple(k, code, &mut small);
            for (b, &s) in big.iter_mut().zip(small.iter()) {
                *b = elems[s];
            }
            out.relations[idx][code] = m.relation_holds(idx, &big);
        }
    }
    for (idx, (_, arity)) in m.sig().functions().enumerate() {
        small.resize(arity, 0);
        big.resize(arity, 0);
        for code in 0..tuple_count(k, arity) {
            decode_tuple(k, code, &mut small);
            for (b, &s) in big.iter_mut().zip(small.iter()) {
                *b = elems[s];
            }
            out.functions[idx][code] = new_index[m.function_apply(idx, &big)];
        }
    }
    for (i, &c) in m.constants.iter().enumerate() {
        out.constants[i] = new_index[c];
    }
    Ok((out, elems))
}
