use alloc::boxed::Box;
use alloc::string::String;

use crate::spectra::SpectrumDiff;

/// Errors produced by the workbench.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("parse error at byte {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("symbol `{0}` is declared more than once")]
    DuplicateSymbol(String),

    #[error("invalid symbol name `{0}`")]
    InvalidSymbolName(String),

    #[error("symbol `{0}` must have positive arity")]
    ZeroArity(String),

    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),

    #[error("arity mismatch for `{symbol}`: expected {expected}, found {found}")]
    ArityMismatch {
        symbol: String,
        expected: usize,
        found: usize,
    },

    #[error("signature mismatch: {0}")]
    SignatureMismatch(String),

    #[error("free variable `{0}` is not assigned")]
    UnassignedVariable(String),

    #[error("element {element} is outside a universe of size {size}")]
    ElementOutOfRange { element: usize, size: usize },

    #[error("axiom has free variable `{0}`")]
    OpenAxiom(String),

    #[error("invalid universe size {0}")]
    InvalidSize(usize),

    #[error("invalid table for `{symbol}`: {reason}")]
    InvalidTable { symbol: String, reason: String },

    #[error("work budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("subset is not admissible: {0}")]
    InvalidSubset(String),

    #[error("not a permutation of {0} points")]
    InvalidPermutation(usize),

    #[error("not a permutation group: {0}")]
    NotAGroup(String),

    #[error("invalid ultrafilter: {0}")]
    InvalidUltrafilter(String),

    #[error("ultraproduct factors disagree: {0}")]
    FactorMismatch(String),

    #[error("spectra differ: {0}")]
    SpectraMismatch(Box<SpectrumDiff>),

    #[error("spectra cover different size ranges: 1..={0} vs 1..={1}")]
    SizeRangeMismatch(usize, usize),

    #[error("representative selection failed: {0}")]
    RepresentativeSelection(String),

    #[error("bijection is not total: no image for a model of size {0}")]
    BijectionNotTotal(usize),

    #[error("bijection is not injective: two models of size {0} share an image")]
    BijectionNotInjective(usize),

    #[error("bijection is not onto the second model class: {0}")]
    BijectionNotOnto(String),

    #[error("invalid definition: {0}")]
    InvalidDefinition(String),

    #[error("sequence variant `{0}` has no 0/1 membership")]
    NotBinary(&'static str),

    #[error("invalid pattern: {0}")]
    InvalidPattern(String),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
