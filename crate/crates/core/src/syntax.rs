//! Syntax values for the polynomial language and the quotation/evaluation
//! meta-functions between expressions and syntax values.

use std::fmt;

use crate::expr::{Expr, ExprError, VarName};
use crate::rational::Rational;

/// The syntax tree of a polynomial, as a value.
///
/// Every value decodes to exactly one polynomial, so [`eval_syn`] is total.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum SynValue {
    Con(Rational),
    Var(VarName),
    Plus(Box<SynValue>, Box<SynValue>),
    Minus(Box<SynValue>, Box<SynValue>),
    Times(Box<SynValue>, Box<SynValue>),
    Power(Box<SynValue>, u32),
}

impl SynValue {
    pub fn plus(a: SynValue, b: SynValue) -> SynValue {
        SynValue::Plus(Box::new(a), Box::new(b))
    }

    pub fn minus(a: SynValue, b: SynValue) -> SynValue {
        SynValue::Minus(Box::new(a), Box::new(b))
    }

    pub fn times(a: SynValue, b: SynValue) -> SynValue {
        SynValue::Times(Box::new(a), Box::new(b))
    }

    pub fn power(a: SynValue, n: u32) -> SynValue {
        SynValue::Power(Box::new(a), n)
    }

    pub fn is_var_node(&self) -> bool {
        matches!(self, SynValue::Var(_))
    }

    /// Whether this value represents a polynomial. Always true here; the
    /// predicate exists because syntax values in the global mode also
    /// cover constants.
    pub fn is_poly_value(&self) -> bool {
        true
    }

    pub fn size(&self) -> usize {
        match self {
            SynValue::Con(_) | SynValue::Var(_) => 1,
            SynValue::Plus(a, b) | SynValue::Minus(a, b) | SynValue::Times(a, b) => {
                1 + a.size() + b.size()
            }
            SynValue::Power(a, _) => 1 + a.size(),
        }
    }
}

impl fmt::Display for SynValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::parser::print_synvalue(self))
    }
}

/// Quotation: the syntax value of a polynomial.
pub fn quote_poly(u: &Expr) -> Result<SynValue, ExprError> {
    u.require_polynomial()?;
    Ok(quote_unchecked(u))
}

fn quote_unchecked(u: &Expr) -> SynValue {
    let q = |e: &Expr| Box::new(quote_unchecked(e));
    match u {
        Expr::Var(v) => SynValue::Var(v.clone()),
        Expr::Const(c) => SynValue::Con(c.clone()),
        Expr::Add(a, b) => SynValue::Plus(q(a), q(b)),
        Expr::Sub(a, b) => SynValue::Minus(q(a), q(b)),
        Expr::Mul(a, b) => SynValue::Times(q(a), q(b)),
        Expr::Pow(a, n) => SynValue::Power(q(a), *n),
        _ => unreachable!("checked by require_polynomial"),
    }
}

/// Evaluation: the polynomial whose syntax tree is `s`. Left inverse of
/// [`quote_poly`].
pub fn eval_syn(s: &SynValue) -> Expr {
    let e = |v: &SynValue| Box::new(eval_syn(v));
    match s {
        SynValue::Con(c) => Expr::Const(c.clone()),
        SynValue::Var(v) => Expr::Var(v.clone()),
        SynValue::Plus(a, b) => Expr::Add(e(a), e(b)),
        SynValue::Minus(a, b) => Expr::Sub(e(a), e(b)),
        SynValue::Times(a, b) => Expr::Mul(e(a), e(b)),
        SynValue::Power(a, n) => Expr::Pow(e(a), *n),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_expr, parse_synvalue};

    fn e(s: &str) -> Expr {
        parse_expr(s).unwrap()
    }

    fn s(text: &str) -> SynValue {
        parse_synvalue(text).unwrap()
    }

    #[test]
    fn quote_examples() {
        assert_eq!(quote_poly(&e("x + 3")).unwrap(), s("plus(var(s_x),con(s_3))"));
        assert_eq!(quote_poly(&e("7")).unwrap(), s("con(s_7)"));
        assert_eq!(
            quote_poly(&e("x*(x^2+y)")).unwrap(),
            s("times(var(s_x),plus(power(var(s_x),2),var(s_y)))")
        );
        assert!(quote_poly(&e("quote(x)")).is_err());
    }

    #[test]
    fn eval_examples() {
        assert_eq!(eval_syn(&s("plus(var(s_x),con(s_3))")), e("x + 3"));
        assert_eq!(eval_syn(&s("con(s_0)")), e("0"));
        let u = e("x*(x^2+y)");
        assert_eq!(eval_syn(&quote_poly(&u).unwrap()), u);
    }

    #[test]
    fn predicates() {
        assert!(s("var(s_x)").is_var_node());
        assert!(!s("con(s_3)").is_var_node());
        assert!(!s("plus(var(s_x),con(s_3))").is_var_node());
        assert!(s("var(s_x)").is_poly_value());
        assert!(s("power(con(s_2),3)").is_poly_value());
        assert!(s("times(var(s_x),var(s_y))").is_poly_value());
    }

    #[test]
    fn display_is_constructor_form() {
        assert_eq!(quote_poly(&e("x + 3")).unwrap().to_string(), "plus(var(s_x),con(s_3))");
    }
}
