use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

/// Names accepted for binary relations written infix (`x <= y`).
pub const INFIX_RELATIONS: [&str; 4] = ["<=", "<", ">=", ">"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymbolKind {
    Relation(usize),
    Function(usize),
    Constant,
}

/// Relation, function and constant symbols with their arities.
///
/// All three kinds share one namespace. Iteration is always in name order,
/// which fixes the table layout of every [`FiniteModel`](crate::FiniteModel)
/// over the signature.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Signature {
    relations: BTreeMap<String, usize>,
    functions: BTreeMap<String, usize>,
    constants: BTreeSet<String>,
}

pub(crate) fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

pub(crate) fn is_infix_relation(name: &str) -> bool {
    INFIX_RELATIONS.contains(&name)
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    fn check_fresh(&self, name: &str) -> Result<()> {
        if self.kind(name).is_some() {
            return Err(Error::DuplicateSymbol(name.to_string()));
        }
        Ok(())
    }

    pub fn add_relation(&mut self, name: &str, arity: usize) -> Result<()> {
        let infix_ok = is_infix_relation(name) && arity == 2;
        if !is_identifier(name) && !infix_ok {
            return Err(Error::InvalidSymbolName(name.to_string()));
        }
        if arity == 0 {
            return Err(Error::ZeroArity(name.to_string()));
        }
        self.check_fresh(name)?;
        self.relations.insert(name.to_string(), arity);
        Ok(())
    }

    pub fn add_function(&mut self, name: &str, arity: usize) -> Result<()> {
        if !is_identifier(name) {
            return Err(Error::InvalidSymbolName(name.to_string()));
        }
        if arity == 0 {
            return Err(Error::ZeroArity(name.to_string()));
        }
        self.check_fresh(name)?;
        self.functions.insert(name.to_string(), arity);
        Ok(())
    }

    pub fn add_constant(&mut self, name: &str) -> Result<()> {
        if !is_identifier(name) {
            return Err(Error::InvalidSymbolName(name.to_string()));
        }
        self.check_fresh(name)?;
        self.constants.insert(name.to_string());
        Ok(())
    }

    pub fn with_relation(mut self, name: &str, arity: usize) -> Result<Self> {
        self.add_relation(name, arity)?;
        Ok(self)
    }

    pub fn with_function(mut self, name: &str, arity: usize) -> Result<Self> {
        self.add_function(name, arity)?;
        Ok(self)
    }

    pub fn with_constant(mut self, name: &str) -> Result<Self> {
        self.add_constant(name)?;
        Ok(self)
    }

    pub fn kind(&self, name: &str) -> Option<SymbolKind> {
        if let Some(&a) = self.relations.get(name) {
            Some(SymbolKind::Relation(a))
        } else if let Some(&a) = self.functions.get(name) {
            Some(SymbolKind::Function(a))
        } else if self.constants.contains(name) {
            Some(SymbolKind::Constant)
        } else {
            None
        }
    }

    pub fn relations(&self) -> impl Iterator<Item = (&str, usize)> + '_ {
        self.relations.iter().map(|(k, &v)| (k.as_str(), v))
    }

    pub fn functions(&self) -> impl Iterator<Item = (&str, usize)> + '_ {
        self.functions.iter().map(|(k, &v)| (k.as_str(), v))
    }

    pub fn constants(&self) -> impl Iterator<Item = &str> + '_ {
        self.constants.iter().map(String::as_str)
    }

    pub fn relation_count(&self) -> usize {
        self.relations.len()
    }

    pub fn function_count(&self) -> usize {
        self.functions.len()
    }

    pub fn constant_count(&self) -> usize {
        self.constants.len()
    }

    pub fn relation_arity(&self, name: &str) -> Option<usize> {
        self.relations.get(name).copied()
    }

    pub fn function_arity(&self, name: &str) -> Option<usize> {
        self.functions.get(name).copied()
    }

    pub fn has_constant(&self, name: &str) -> bool {
        self.constants.contains(name)
    }

    /// Position of a relation in name order (the model table index).
    pub fn relation_index(&self, name: &str) -> Option<usize> {
        self.relations.keys().position(|k| k == name)
    }

    pub fn function_index(&self, name: &str) -> Option<usize> {
        self.functions.keys().position(|k| k == name)
    }

    pub fn constant_index(&self, name: &str) -> Option<usize> {
        self.constants.iter().position(|k| k == name)
    }

    pub fn is_empty(&self) -> bool {
        self.relations.is_empty() && self.functions.is_empty() && self.constants.is_empty()
    }

    /// True when every symbol of `self` occurs in `other` with the same kind and arity.
    pub fn is_subsignature_of(&self, other: &Signature) -> bool {
        self.relations
            .iter()
            .all(|(k, &a)| other.relations.get(k) == Some(&a))
            && self
                .functions
                .iter()
                .all(|(k, &a)| other.functions.get(k) == Some(&a))
            && self.constants.iter().all(|k| other.constants.contains(k))
    }

    /// The signature with the named relation symbols removed.
    pub fn without_relations<'a, I>(&self, names: I) -> Signature
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut out = self.clone();
        for n in names {
            out.relations.remove(n);
        }
        out
    }

    /// Union of two signatures; shared names must agree on kind and arity.
    pub fn merge(&self, other: &Signature) -> Result<Signature> {
        let mut out = self.clone();
        for (name, arity) in other.relations() {
            match out.kind(name) {
                None => out.add_relation(name, arity)?,
                Some(SymbolKind::Relation(a)) if a == arity => {}
                Some(_) => return Err(Error::DuplicateSymbol(name.to_string())),
            }
        }
        for (name, arity) in other.functions() {
            match out.kind(name) {
                None => out.add_function(name, arity)?,
                Some(SymbolKind::Function(a)) if a == arity => {}
                Some(_) => return Err(Error::DuplicateSymbol(name.to_string())),
            }
        }
        for name in other.constants() {
            match out.kind(name) {
                None => out.add_constant(name)?,
                Some(SymbolKind::Constant) => {}
                Some(_) => return Err(Error::DuplicateSymbol(name.to_string())),
            }
        }
        Ok(out)
    }

    /// Rename symbols according to `map`; names not in the map are kept.
    pub fn renamed(&self, map: &BTreeMap<String, String>) -> Result<Signature> {
        let rn = |s: &str| map.get(s).cloned().unwrap_or_else(|| s.to_string());
        let mut out = Signature::new();
        for (name, arity) in self.relations() {
            out.add_relation(&rn(name), arity)?;
        }
        for (name, arity) in self.functions() {
            out.add_function(&rn(name), arity)?;
        }
        for name in self.constants() {
            out.add_constant(&rn(name))?;
        }
        Ok(out)
    }

    pub fn symbol_names(&self) -> Vec<&str> {
        let mut v: Vec<&str> = self.relations.keys().map(String::as_str).collect();
        v.extend(self.functions.keys().map(String::as_str));
        v.extend(self.constants.iter().map(String::as_str));
        v
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        for (n, a) in self.relations() {
            parts.push(alloc::format!("{n}:{a}"));
        }
        for (n, a) in self.functions() {
            parts.push(alloc::format!("{n}/{a}"));
        }
        for n in self.constants() {
            parts.push(n.to_string());
        }
        write!(f, "{{{}}}", parts.join(", "))
    }
}
