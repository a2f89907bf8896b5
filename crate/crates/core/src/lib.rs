//! Finite-scale tests for definitional equivalence of first-order theories.
//!
//! The crate is `no_std` (with `alloc`). It provides:
//!
//! * [`folang`]: signatures, terms and formulas, a parser and printer,
//!   Tarskian evaluation and bounded formula enumeration;
//! * [`models`]: finite structures on `{0..n-1}`, exhaustive model
//!   enumeration, isomorphism search and canonical keys;
//! * [`groups`]: concrete permutation groups, automorphism groups and
//!   base isomorphisms (conjugation by a bijection of the base set);
//! * [`spectra`]: the spectrum of concrete automorphism groups of a theory
//!   and the construction of a concrete isomorphism between model classes
//!   with equal spectra, plus a verifier for it;
//! * [`ultra`]: ultrafilters on finite index sets, ultraproducts and a
//!   Łoś harness;
//! * [`definability`]: definitional extensions, unique-expansion checks,
//!   bounded explicit-definition search and substructure closure;
//! * [`irregular`]: the marker sequence built from all binary strings,
//!   its two completions and pattern statistics.
//!
//! Every result that quantifies over "all models" is only checked up to a
//! universe-size bound; nothing here proves a statement about infinite
//! structures.
#![no_std]

extern crate alloc;

pub mod definability;
pub mod error;
pub mod folang;
pub mod groups;
pub mod irregular;
pub mod models;
pub mod spectra;
pub mod ultra;

pub use error::{Error, Result};
pub use folang::{Formula, Signature, Term};
pub use groups::{GroupKey, Permutation, PermutationGroup};
pub use models::{Budget, CanonicalKey, FiniteModel, Theory};
