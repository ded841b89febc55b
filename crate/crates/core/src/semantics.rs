//! Exact semantics of polynomials: canonical normal forms, point evaluation
//! and two independent derivative oracles.
//!
//! [`nf_derivative`] differentiates a normal form term by term.
//! [`limit_derivative`] never looks at exponents: it forms the difference
//! quotient `(u[x := x + h] - u) / h`, divides by `h` exactly and lets
//! `h` go to zero. The two must agree on every polynomial.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::expr::{Expr, ExprError, VarName};
use crate::rational::Rational;

/// Upper bound on the number of monomials any intermediate normal form may hold.
pub const MONOMIAL_BUDGET: usize = 1_000_000;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum NfError {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("normal form exceeds the budget of {MONOMIAL_BUDGET} monomials")]
    BudgetExceeded,
    #[error("monomial exponent overflow")]
    ExponentOverflow,
    #[error("no value assigned to variable `{0}`")]
    MissingVariable(VarName),
    #[error("difference quotient invariant violated: {0}")]
    LimitInvariant(String),
}

/// Point assignment of rational values to variables.
pub type Assignment = BTreeMap<VarName, Rational>;

/// A power product `x1^e1 * ... * xk^ek` with every stored exponent positive.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Monomial(BTreeMap<VarName, u32>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(BTreeMap::new())
    }

    pub fn var(v: &VarName) -> Self {
        Monomial(BTreeMap::from([(v.clone(), 1)]))
    }

    /// Builds a monomial, dropping zero exponents.
    pub fn from_exponents(exps: impl IntoIterator<Item = (VarName, u32)>) -> Self {
        let mut m = BTreeMap::new();
        for (v, e) in exps {
            if e > 0 {
                *m.entry(v).or_insert(0) += e;
            }
        }
        Monomial(m)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn exponent(&self, v: &VarName) -> u32 {
        self.0.get(v).copied().unwrap_or(0)
    }

    pub fn degree(&self) -> u64 {
        self.0.values().map(|&e| u64::from(e)).sum()
    }

    /// Variables with their exponents, in alphabetical order.
    pub fn factors(&self) -> impl Iterator<Item = (&VarName, u32)> {
        self.0.iter().map(|(v, &e)| (v, e))
    }

    pub fn mul(&self, other: &Monomial) -> Result<Monomial, NfError> {
        let mut out = self.0.clone();
        for (v, &e) in &other.0 {
            let slot = out.entry(v.clone()).or_insert(0);
            *slot = slot.checked_add(e).ok_or(NfError::ExponentOverflow)?;
        }
        Ok(Monomial(out))
    }

    /// Lowers the exponent of `v` by one; `None` if `v` does not occur.
    fn divide_by(&self, v: &VarName) -> Option<Monomial> {
        let e = self.exponent(v);
        if e == 0 {
            return None;
        }
        let mut out = self.0.clone();
        if e == 1 {
            out.remove(v);
        } else {
            out.insert(v.clone(), e - 1);
        }
        Some(Monomial(out))
    }
}

/// Graded lexicographic order with alphabetically earlier variables ranking
/// higher. `Less` means `a` is printed before `b`.
pub fn grlex_cmp(a: &Monomial, b: &Monomial) -> Ordering {
    b.degree().cmp(&a.degree()).then_with(|| {
        let mut ia = a.0.iter().peekable();
        let mut ib = b.0.iter().peekable();
        loop {
            match (ia.peek(), ib.peek()) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Less,
                (None, Some(_)) => return Ordering::Greater,
                (Some((va, ea)), Some((vb, eb))) => match va.cmp(vb) {
                    // `a` has an earlier variable that `b` lacks
                    Ordering::Less => return Ordering::Less,
                    Ordering::Greater => return Ordering::Greater,
                    Ordering::Equal => match eb.cmp(ea) {
                        Ordering::Equal => {
                            ia.next();
                            ib.next();
                        }
                        other => return other,
                    },
                },
            }
        }
    })
}

/// Canonical sparse polynomial: monomial to nonzero rational coefficient.
/// Two normal forms denote the same function iff they are equal.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct PolyNF(BTreeMap<Monomial, Rational>);

impl PolyNF {
    pub fn zero() -> Self {
        PolyNF(BTreeMap::new())
    }

    pub fn constant(c: Rational) -> Self {
        let mut p = PolyNF::zero();
        p.add_term(Monomial::one(), c);
        p
    }

    pub fn var(v: &VarName) -> Self {
        PolyNF(BTreeMap::from([(Monomial::var(v), Rational::one())]))
    }

    /// Builds a normal form from `(monomial, coefficient)` pairs, merging
    /// repeats and dropping zeros.
    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut p = PolyNF::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.0.entry(m) {
            Entry::Vacant(slot) => {
                slot.insert(c);
            }
            Entry::Occupied(mut slot) => {
                let sum = slot.get() + &c;
                if sum.is_zero() {
                    slot.remove();
                } else {
                    *slot.get_mut() = sum;
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.0.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    /// Terms in storage order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.0.iter()
    }

    /// Terms in graded lexicographic printing order.
    pub fn canonical_terms(&self) -> Vec<(&Monomial, &Rational)> {
        let mut terms: Vec<_> = self.0.iter().collect();
        terms.sort_by(|a, b| grlex_cmp(a.0, b.0));
        terms
    }

    pub fn add(&self, other: &PolyNF) -> PolyNF {
        let mut out = self.clone();
        for (m, c) in &other.0 {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> PolyNF {
        PolyNF(self.0.iter().map(|(m, c)| (m.clone(), -c)).collect())
    }

    pub fn sub(&self, other: &PolyNF) -> PolyNF {
        let mut out = self.clone();
        for (m, c) in &other.0 {
            out.add_term(m.clone(), -c);
        }
        out
    }

    pub fn mul(&self, other: &PolyNF) -> Result<PolyNF, NfError> {
        self.mul_within(other, MONOMIAL_BUDGET)
    }

    fn mul_within(&self, other: &PolyNF, budget: usize) -> Result<PolyNF, NfError> {
        let mut out = PolyNF::zero();
        for (ma, ca) in &self.0 {
            for (mb, cb) in &other.0 {
                out.add_term(ma.mul(mb)?, ca * cb);
                if out.0.len() > budget {
                    return Err(NfError::BudgetExceeded);
                }
            }
        }
        Ok(out)
    }

    pub fn pow(&self, n: u32) -> Result<PolyNF, NfError> {
        self.pow_within(n, MONOMIAL_BUDGET)
    }

    fn pow_within(&self, mut n: u32, budget: usize) -> Result<PolyNF, NfError> {
        let mut acc = PolyNF::constant(Rational::one());
        let mut base = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul_within(&base, budget)?;
            }
            n >>= 1;
            if n > 0 {
                base = base.mul_within(&base, budget)?;
            }
        }
        Ok(acc)
    }

    /// Variables occurring with a positive exponent.
    pub fn variables(&self) -> std::collections::BTreeSet<VarName> {
        self.0
            .keys()
            .flat_map(|m| m.factors().map(|(v, _)| v.clone()))
            .collect()
    }

    /// Renders the normal form back to an expression in canonical order:
    /// graded lexicographic monomials, variables alphabetical within a
    /// monomial, constant term last. Negative coefficients after the first
    /// term become subtractions.
    pub fn to_expr(&self) -> Expr {
        let mut acc: Option<Expr> = None;
        for (m, c) in self.canonical_terms() {
            acc = Some(match acc {
                None => term_expr(m, c),
                Some(prev) if c.is_negative() => Expr::sub(prev, term_expr(m, &c.abs())),
                Some(prev) => Expr::add(prev, term_expr(m, c)),
            });
        }
        acc.unwrap_or_else(|| Expr::constant(0))
    }
}

fn term_expr(m: &Monomial, c: &Rational) -> Expr {
    let mut factors = m.factors().map(|(v, e)| {
        if e == 1 {
            Expr::Var(v.clone())
        } else {
            Expr::pow(Expr::Var(v.clone()), e)
        }
    });
    let first = if c.is_one() && !m.is_one() {
        factors.next().expect("non-unit monomial has a factor")
    } else {
        Expr::Const(c.clone())
    };
    factors.fold(first, Expr::mul)
}

impl fmt::Display for PolyNF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_expr())
    }
}

/// Expands a polynomial into its normal form.
pub fn to_nf(u: &Expr) -> Result<PolyNF, NfError> {
    to_nf_within(u, MONOMIAL_BUDGET)
}

/// [`to_nf`] with a caller-chosen monomial budget.
pub fn to_nf_within(u: &Expr, budget: usize) -> Result<PolyNF, NfError> {
    u.require_polynomial()?;
    nf_unchecked(u, budget)
}

fn nf_unchecked(u: &Expr, budget: usize) -> Result<PolyNF, NfError> {
    let nf = |e: &Expr| nf_unchecked(e, budget);
    let out = match u {
        Expr::Var(v) => PolyNF::var(v),
        Expr::Const(c) => PolyNF::constant(c.clone()),
        Expr::Add(a, b) => nf(a)?.add(&nf(b)?),
        Expr::Sub(a, b) => nf(a)?.sub(&nf(b)?),
        Expr::Mul(a, b) => nf(a)?.mul_within(&nf(b)?, budget)?,
        Expr::Pow(a, n) => nf(a)?.pow_within(*n, budget)?,
        _ => unreachable!("checked by require_polynomial"),
    };
    if out.len() > budget {
        return Err(NfError::BudgetExceeded);
    }
    Ok(out)
}

/// Exact value of `p` at the point `a`.
pub fn nf_eval(p: &PolyNF, a: &Assignment) -> Result<Rational, NfError> {
    let mut total = Rational::zero();
    for (m, c) in p.terms() {
        let mut term = c.clone();
        for (v, e) in m.factors() {
            let value = a.get(v).ok_or_else(|| NfError::MissingVariable(v.clone()))?;
            term = &term * &value.pow(e);
        }
        total = &total + &term;
    }
    Ok(total)
}

/// Evaluates a polynomial expression directly, without normalizing.
pub fn eval_expr(u: &Expr, a: &Assignment) -> Result<Rational, NfError> {
    Ok(match u {
        Expr::Var(v) => a
            .get(v)
            .cloned()
            .ok_or_else(|| NfError::MissingVariable(v.clone()))?,
        Expr::Const(c) => c.clone(),
        Expr::Add(l, r) => &eval_expr(l, a)? + &eval_expr(r, a)?,
        Expr::Sub(l, r) => &eval_expr(l, a)? - &eval_expr(r, a)?,
        Expr::Mul(l, r) => &eval_expr(l, a)? * &eval_expr(r, a)?,
        Expr::Pow(b, n) => eval_expr(b, a)?.pow(*n),
        _ => return Err(ExprError::NotPolynomial(u.to_string()).into()),
    })
}

/// Term-by-term partial derivative: `c * x^n * m` becomes `c*n * x^(n-1) * m`.
pub fn nf_derivative(p: &PolyNF, x: &VarName) -> PolyNF {
    PolyNF::from_terms(p.terms().filter_map(|(m, c)| {
        let n = m.exponent(x);
        let lowered = m.divide_by(x)?;
        Some((lowered, c * &Rational::from(i64::from(n))))
    }))
}

/// First of `h`, `h1`, `h2`, ... that is neither free in `u` nor `x`.
fn fresh_increment_var(u: &Expr, x: &VarName) -> VarName {
    let taken = u.free_vars();
    (0..)
        .map(|i| {
            let name = if i == 0 { "h".to_string() } else { format!("h{i}") };
            VarName::new(name).expect("valid identifier")
        })
        .find(|h| !taken.contains(h) && h != x)
        .expect("unbounded candidate stream")
}

/// The derivative of `u` with respect to `x` from the limit of the
/// difference quotient. For a polynomial the numerator
/// `u[x := x + h] - u` is divisible by `h`, and the limit is the part of
/// the quotient free of `h`.
pub fn limit_derivative(u: &Expr, x: &VarName) -> Result<PolyNF, NfError> {
    u.require_polynomial()?;
    let h = fresh_increment_var(u, x);
    let shifted = u.substitute(x, &Expr::add(Expr::Var(x.clone()), Expr::Var(h.clone())))?;
    let numerator = to_nf(&Expr::sub(shifted, u.clone()))?;
    let mut quotient = Vec::with_capacity(numerator.len());
    for (m, c) in numerator.terms() {
        let lowered = m.divide_by(&h).ok_or_else(|| {
            NfError::LimitInvariant(format!(
                "numerator monomial {} has no factor {h}",
                PolyNF::from_terms([(m.clone(), c.clone())])
            ))
        })?;
        quotient.push((lowered, c.clone()));
    }
    // h -> 0
    Ok(PolyNF::from_terms(
        quotient.into_iter().filter(|(m, _)| m.exponent(&h) == 0),
    ))
}

/// Semantic equality of polynomials.
pub fn nf_equal(p: &PolyNF, q: &PolyNF) -> bool {
    p == q
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

    fn nf(s: &str) -> PolyNF {
        to_nf(&e(s)).unwrap()
    }

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn mono(exps: &[(&str, u32)]) -> Monomial {
        Monomial::from_exponents(exps.iter().map(|(n, k)| (v(n), *k)))
    }

    #[test]
    fn to_nf_examples() {
        assert_eq!(
            nf("x*(x^2+y)"),
            PolyNF::from_terms([(mono(&[("x", 3)]), q("1")), (mono(&[("x", 1), ("y", 1)]), q("1"))])
        );
        assert!(nf("(x+1)^2 - x^2 - 2*x - 1").is_zero());
        assert_eq!(
            nf("3*x^2 + y"),
            PolyNF::from_terms([(mono(&[("x", 2)]), q("3")), (mono(&[("y", 1)]), q("1"))])
        );
        assert!(to_nf(&e("quote(x)")).is_err());
    }

    #[test]
    fn zero_power_is_one() {
        assert_eq!(nf("x^0"), PolyNF::constant(q("1")));
        assert_eq!(nf("0^0"), PolyNF::constant(q("1")));
    }

    #[test]
    fn budget_guard() {
        assert_eq!(to_nf_within(&e("(x+y+z+w+1)^6"), 100).unwrap_err(), NfError::BudgetExceeded);
        assert_eq!(to_nf_within(&e("(x+y+z+w+1)^6"), 210).unwrap().len(), 210);
        assert_eq!(to_nf_within(&e("x+y+z"), 2).unwrap_err(), NfError::BudgetExceeded);
        assert_eq!(to_nf(&e("((x^65536)^65536)^65536")).unwrap_err(), NfError::ExponentOverflow);
    }

    #[test]
    fn nf_eval_examples() {
        let a: Assignment = [(v("x"), q("2")), (v("y"), q("5"))].into_iter().collect();
        assert_eq!(nf_eval(&nf("3*x^2 + y"), &a).unwrap(), q("17"));
        assert_eq!(nf_eval(&PolyNF::zero(), &Assignment::new()).unwrap(), q("0"));
        let b: Assignment = [(v("x"), q("2/5"))].into_iter().collect();
        assert_eq!(nf_eval(&nf("x"), &b).unwrap(), q("2/5"));
        assert_eq!(
            nf_eval(&nf("x + z"), &b).unwrap_err(),
            NfError::MissingVariable(v("z"))
        );
    }

    #[test]
    fn nf_derivative_examples() {
        assert_eq!(nf_derivative(&nf("x^3 + x*y"), &v("x")), nf("3*x^2 + y"));
        assert!(nf_derivative(&nf("y"), &v("x")).is_zero());
        assert_eq!(nf_derivative(&nf("2*x^5"), &v("x")), nf("10*x^4"));
    }

    #[test]
    fn limit_derivative_examples() {
        // ((x+h)^2 - x^2)/h = 2x + h, at h = 0: 2x
        assert_eq!(limit_derivative(&e("x^2"), &v("x")).unwrap(), nf("2*x"));
        assert!(limit_derivative(&e("5"), &v("x")).unwrap().is_zero());
        assert_eq!(limit_derivative(&e("x*(x^2+y)"), &v("x")).unwrap(), nf("3*x^2 + y"));
    }

    #[test]
    fn limit_derivative_avoids_captured_increment() {
        assert_eq!(fresh_increment_var(&e("h + h1*x"), &v("x")), v("h2"));
        assert_eq!(fresh_increment_var(&e("y"), &v("h")), v("h1"));
        assert_eq!(limit_derivative(&e("h*x^2 + h1"), &v("x")).unwrap(), nf("2*h*x"));
        assert_eq!(limit_derivative(&e("h^3"), &v("h")).unwrap(), nf("3*h^2"));
    }

    #[test]
    fn nf_equal_examples() {
        assert!(nf_equal(&nf("x+y"), &nf("y+x")));
        assert!(nf_equal(&nf("x"), &nf("x^1")));
        assert!(!nf_equal(&nf("x"), &nf("y")));
    }

    #[test]
    fn canonical_rendering() {
        assert_eq!(nf("y + x*x*3").to_expr().to_string(), "3*x^2 + y");
        assert_eq!(nf("1 + x - x^2*y + 2*y^3").to_expr().to_string(), "(-1)*x^2*y + 2*y^3 + x + 1");
        assert_eq!(nf("x*y - y*x").to_expr().to_string(), "0");
        assert_eq!(nf("x - 1/2").to_expr().to_string(), "x - 1/2");
        assert_eq!(nf("2/3*x*z^2 + x^2*z").to_expr().to_string(), "x^2*z + 2/3*x*z^2");
    }

    #[test]
    fn grlex_order() {
        let xs = [mono(&[("x", 2)]), mono(&[("x", 1), ("y", 1)]), mono(&[("y", 2)]), mono(&[("x", 1)]), mono(&[("y", 1)]), Monomial::one()];
        for (i, a) in xs.iter().enumerate() {
            for (j, b) in xs.iter().enumerate() {
                assert_eq!(grlex_cmp(a, b), i.cmp(&j), "{i} vs {j}");
            }
        }
    }
}
