//! Quotation and evaluation for a polynomial object language, with a
//! symbolic differentiation engine checked against exact semantics.
//!
//! * [`expr`], [`parser`]: the object language and its concrete syntax.
//! * [`syntax`]: syntax values, quotation and evaluation.
//! * [`polydiff`]: rule-based differentiation over expressions and over
//!   syntax values.
//! * [`semantics`]: normal forms and derivative oracles.
//! * [`framework`]: seeded checkers for the quotation and evaluation laws
//!   and for the differentiation operator.
//! * [`global`]: built-in quote/eval in the object language, with a
//!   budgeted interpreter and demonstrations of where it breaks down.

pub mod expr;
pub mod framework;
pub mod gen;
pub mod global;
pub mod parser;
pub mod polydiff;
pub mod rational;
pub mod semantics;
pub mod syntax;

pub use expr::{expr_equal, ConstName, Expr, ExprError, TypeTag, VarName, MAX_EXPONENT};
pub use parser::{parse_expr, parse_synvalue, print_expr, print_synvalue, ParseError, SourceSpan};
pub use polydiff::{derivative, opd_apply, poly_diff, simplify, DiffError, DiffResult, Rule, TraceStep};
pub use rational::Rational;
pub use semantics::{limit_derivative, nf_derivative, nf_equal, nf_eval, to_nf, Assignment, Monomial, NfError, PolyNF};
pub use syntax::{eval_syn, quote_poly, SynValue};
