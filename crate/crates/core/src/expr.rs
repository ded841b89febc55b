//! The object language: polynomial expressions over exact rationals, plus the
//! quote/eval/constant nodes used by the global mode.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::rational::Rational;

/// Largest exponent accepted in a `Pow` node.
pub const MAX_EXPONENT: u32 = 1 << 16;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum ExprError {
    #[error("invalid identifier `{0}`")]
    InvalidIdent(String),
    #[error("expected a polynomial, found `{0}`")]
    NotPolynomial(String),
}

fn is_ident(s: &str) -> bool {
    let mut bytes = s.bytes();
    match bytes.next() {
        Some(b) if b.is_ascii_alphabetic() => {}
        _ => return false,
    }
    bytes.all(|b| b.is_ascii_alphanumeric() || b == b'_')
}

macro_rules! ident_newtype {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
        pub struct $name(String);

        impl $name {
            pub fn new(name: impl Into<String>) -> Result<Self, ExprError> {
                let name = name.into();
                if is_ident(&name) {
                    Ok($name(name))
                } else {
                    Err(ExprError::InvalidIdent(name))
                }
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl std::str::FromStr for $name {
            type Err = ExprError;
            fn from_str(s: &str) -> Result<Self, ExprError> {
                $name::new(s)
            }
        }
    };
}

ident_newtype!(
    /// A real-valued variable name, `[a-zA-Z][a-zA-Z0-9_]*`.
    VarName
);

ident_newtype!(
    /// The name of a defined constant in a global-mode definition table.
    ConstName
);

/// Types of the restricted global language. The derived order is the
/// printing order.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum TypeTag {
    Real,
    Syn,
    Bool,
}

impl TypeTag {
    pub fn keyword(self) -> &'static str {
        match self {
            TypeTag::Real => "real",
            TypeTag::Syn => "syn",
            TypeTag::Bool => "bool",
        }
    }

    pub fn from_keyword(s: &str) -> Option<TypeTag> {
        match s {
            "real" => Some(TypeTag::Real),
            "syn" => Some(TypeTag::Syn),
            "bool" => Some(TypeTag::Bool),
            _ => None,
        }
    }
}

impl fmt::Display for TypeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

/// An expression tree.
///
/// The first six variants form the polynomial language. `Quote`, `Eval` and
/// `NamedConst` are the built-in quotation, evaluation and defined constants
/// of the global mode; `Not`, `SynEq` and `Opd` are the global mode's
/// boolean negation, equality on syntax values and the differentiation
/// operator applied to syntax values.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Expr {
    Var(VarName),
    Const(Rational),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
    Quote(Box<Expr>),
    Eval(Box<Expr>, TypeTag),
    NamedConst(ConstName),
    Not(Box<Expr>),
    SynEq(Box<Expr>, Box<Expr>),
    Opd(Box<Expr>, Box<Expr>),
}

#[allow(clippy::should_implement_trait)]
impl Expr {
    pub fn var(name: &VarName) -> Expr {
        Expr::Var(name.clone())
    }

    pub fn constant(value: impl Into<Rational>) -> Expr {
        Expr::Const(value.into())
    }

    pub fn add(a: Expr, b: Expr) -> Expr {
        Expr::Add(Box::new(a), Box::new(b))
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        Expr::Sub(Box::new(a), Box::new(b))
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        Expr::Mul(Box::new(a), Box::new(b))
    }

    pub fn pow(a: Expr, n: u32) -> Expr {
        Expr::Pow(Box::new(a), n)
    }

    pub fn quote(a: Expr) -> Expr {
        Expr::Quote(Box::new(a))
    }

    pub fn eval(a: Expr, ty: TypeTag) -> Expr {
        Expr::Eval(Box::new(a), ty)
    }

    pub fn not(a: Expr) -> Expr {
        Expr::Not(Box::new(a))
    }

    pub fn syn_eq(a: Expr, b: Expr) -> Expr {
        Expr::SynEq(Box::new(a), Box::new(b))
    }

    pub fn opd(a: Expr, b: Expr) -> Expr {
        Expr::Opd(Box::new(a), Box::new(b))
    }

    /// True iff the tree uses only `Var`, `Const`, `Add`, `Sub`, `Mul` and `Pow`.
    pub fn is_polynomial(&self) -> bool {
        match self {
            Expr::Var(_) | Expr::Const(_) => true,
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => {
                a.is_polynomial() && b.is_polynomial()
            }
            Expr::Pow(a, _) => a.is_polynomial(),
            Expr::Quote(_)
            | Expr::Eval(..)
            | Expr::NamedConst(_)
            | Expr::Not(_)
            | Expr::SynEq(..)
            | Expr::Opd(..) => false,
        }
    }

    /// Errors with [`ExprError::NotPolynomial`] unless `is_polynomial`.
    pub fn require_polynomial(&self) -> Result<(), ExprError> {
        if self.is_polynomial() {
            Ok(())
        } else {
            Err(ExprError::NotPolynomial(crate::parser::print_expr(self)))
        }
    }

    /// Syntactic free variables. Quotations are closed; an `Eval` node
    /// contributes only the free variables of its operand, which under-reports
    /// the variables its value actually depends on.
    pub fn free_vars(&self) -> BTreeSet<VarName> {
        let mut out = BTreeSet::new();
        self.collect_free_vars(&mut out);
        out
    }

    fn collect_free_vars(&self, out: &mut BTreeSet<VarName>) {
        match self {
            Expr::Var(v) => {
                out.insert(v.clone());
            }
            Expr::Const(_) | Expr::Quote(_) | Expr::NamedConst(_) => {}
            Expr::Add(a, b)
            | Expr::Sub(a, b)
            | Expr::Mul(a, b)
            | Expr::SynEq(a, b)
            | Expr::Opd(a, b) => {
                a.collect_free_vars(out);
                b.collect_free_vars(out);
            }
            Expr::Pow(a, _) | Expr::Eval(a, _) | Expr::Not(a) => a.collect_free_vars(out),
        }
    }

    /// Replaces free occurrences of `v` by the polynomial `replacement`.
    /// Quotations are left untouched.
    pub fn substitute(&self, v: &VarName, replacement: &Expr) -> Result<Expr, ExprError> {
        replacement.require_polynomial()?;
        Ok(self.subst(v, replacement))
    }

    fn subst(&self, v: &VarName, r: &Expr) -> Expr {
        let bx = |e: &Expr| Box::new(e.subst(v, r));
        match self {
            Expr::Var(w) if w == v => r.clone(),
            Expr::Var(_) | Expr::Const(_) | Expr::Quote(_) | Expr::NamedConst(_) => self.clone(),
            Expr::Add(a, b) => Expr::Add(bx(a), bx(b)),
            Expr::Sub(a, b) => Expr::Sub(bx(a), bx(b)),
            Expr::Mul(a, b) => Expr::Mul(bx(a), bx(b)),
            Expr::Pow(a, n) => Expr::Pow(bx(a), *n),
            Expr::Eval(a, t) => Expr::Eval(bx(a), *t),
            Expr::Not(a) => Expr::Not(bx(a)),
            Expr::SynEq(a, b) => Expr::SynEq(bx(a), bx(b)),
            Expr::Opd(a, b) => Expr::Opd(bx(a), bx(b)),
        }
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        match self {
            Expr::Var(_) | Expr::Const(_) | Expr::NamedConst(_) => 1,
            Expr::Add(a, b)
            | Expr::Sub(a, b)
            | Expr::Mul(a, b)
            | Expr::SynEq(a, b)
            | Expr::Opd(a, b) => 1 + a.size() + b.size(),
            Expr::Pow(a, _) | Expr::Quote(a) | Expr::Eval(a, _) | Expr::Not(a) => 1 + a.size(),
        }
    }
}

/// Structural equality. Constants compare exactly, and since rationals are
/// stored reduced this is also value equality on constants.
pub fn expr_equal(a: &Expr, b: &Expr) -> bool {
    a == b
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::parser::print_expr(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_expr;

    fn e(s: &str) -> Expr {
        parse_expr(s).unwrap()
    }

    fn v(s: &str) -> VarName {
        VarName::new(s).unwrap()
    }

    fn set(names: &[&str]) -> BTreeSet<VarName> {
        names.iter().map(|n| v(n)).collect()
    }

    #[test]
    fn identifiers() {
        assert!(VarName::new("x").is_ok());
        assert!(VarName::new("x_1b").is_ok());
        assert!(VarName::new("").is_err());
        assert!(VarName::new("1x").is_err());
        assert!(VarName::new("_x").is_err());
        assert!(VarName::new("x-y").is_err());
    }

    #[test]
    fn free_vars_examples() {
        assert_eq!(e("x + 3").free_vars(), set(&["x"]));
        assert_eq!(e("quote(x + 3)").free_vars(), set(&[]));
        assert_eq!(e("eval(quote(x + 3) : real)").free_vars(), set(&[]));
        assert_eq!(e("x * (x^2 + y)").free_vars(), set(&["x", "y"]));
        assert_eq!(e("@c + z").free_vars(), set(&["z"]));
    }

    #[test]
    fn substitute_examples() {
        let x = v("x");
        assert_eq!(
            e("x*(x^2+y)").substitute(&x, &Expr::constant(2)).unwrap(),
            e("2*(2^2+y)")
        );
        assert_eq!(
            e("quote(x+3)").substitute(&x, &Expr::constant(0)).unwrap(),
            e("quote(x+3)")
        );
        assert_eq!(
            e("x+h").substitute(&v("h"), &Expr::constant(0)).unwrap(),
            e("x+0")
        );
        assert!(matches!(
            e("x").substitute(&x, &e("quote(y)")),
            Err(ExprError::NotPolynomial(_))
        ));
    }

    #[test]
    fn equality_examples() {
        assert!(expr_equal(&e("x+3"), &e("x+3")));
        assert!(!expr_equal(&e("x+3"), &e("3+x")));
        assert!(expr_equal(&e("1/2"), &e("2/4")));
    }

    #[test]
    fn polynomial_membership() {
        assert!(e("x*(x^2+y)").is_polynomial());
        assert!(!e("quote(x)").is_polynomial());
        assert!(e("3").is_polynomial());
        assert!(!e("x + eval(quote(x) : real)").is_polynomial());
        assert!(!e("@c").is_polynomial());
    }

    #[test]
    fn type_tags_ordered() {
        assert!(TypeTag::Real < TypeTag::Syn && TypeTag::Syn < TypeTag::Bool);
        for t in [TypeTag::Real, TypeTag::Syn, TypeTag::Bool] {
            assert_eq!(TypeTag::from_keyword(t.keyword()), Some(t));
        }
    }
}
