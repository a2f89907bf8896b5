//! First-order signatures, terms and formulas.

mod enumerate;
mod eval;
mod parse;
mod signature;
mod syntax;

pub use enumerate::{
    closed_formulas_by_depth, enumerate_formulas, enumerate_formulas_by_depth, fresh_names,
    FormulaStream,
};
pub use eval::{eval, eval_closed, Assignment};
pub(crate) use eval::holds;
pub use parse::parse_formula;
pub use signature::{Signature, SymbolKind, INFIX_RELATIONS};
pub use syntax::{Formula, Term};
