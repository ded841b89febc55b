//! Symbolic differentiation of polynomials by the five differentiation rules,
//! followed by local simplification and collection of like terms.
//!
//! Two independent implementations live here:
//!
//! * [`poly_diff`] rewrites expressions containing pending-derivative
//!   markers one step at a time (outermost-leftmost) and records a trace.
//! * [`opd_apply`] works on [`SynValue`] trees directly and never converts
//!   them to expressions.
//!
//! [`derivative`] is the untraced expression path; it produces the same
//! result as [`poly_diff`].

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::expr::{Expr, ExprError, VarName};
use crate::parser::{write_node, Infix, Layout, Printable};
use crate::rational::Rational;
use crate::semantics::{grlex_cmp, to_nf, NfError, PolyNF};
use crate::syntax::SynValue;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum DiffError {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Nf(#[from] NfError),
    #[error("second operand of the differentiation operator must be a variable node, found `{0}`")]
    NotVarNode(String),
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize)]
pub enum Rule {
    ConstantRule,
    VariableRule,
    SumDiffRule,
    ProductRule,
    PowerRuleZero,
    PowerRulePos,
    SimplifyZeroAdd,
    SimplifyOneMul,
    SimplifyZeroMul,
    SimplifyPowOne,
    CollectLikeTerms,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::ConstantRule => "ConstantRule",
            Rule::VariableRule => "VariableRule",
            Rule::SumDiffRule => "SumDiffRule",
            Rule::ProductRule => "ProductRule",
            Rule::PowerRuleZero => "PowerRuleZero",
            Rule::PowerRulePos => "PowerRulePos",
            Rule::SimplifyZeroAdd => "SimplifyZeroAdd",
            Rule::SimplifyOneMul => "SimplifyOneMul",
            Rule::SimplifyZeroMul => "SimplifyZeroMul",
            Rule::SimplifyPowOne => "SimplifyPowOne",
            Rule::CollectLikeTerms => "CollectLikeTerms",
        }
    }

    pub fn is_differentiation(self) -> bool {
        matches!(
            self,
            Rule::ConstantRule
                | Rule::VariableRule
                | Rule::SumDiffRule
                | Rule::ProductRule
                | Rule::PowerRuleZero
                | Rule::PowerRulePos
        )
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A polynomial that may contain pending derivatives `d/dx(e)`.
/// Only appears in traces.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum DiffTerm {
    Var(VarName),
    Const(Rational),
    Add(Box<DiffTerm>, Box<DiffTerm>),
    Sub(Box<DiffTerm>, Box<DiffTerm>),
    Mul(Box<DiffTerm>, Box<DiffTerm>),
    Pow(Box<DiffTerm>, u32),
    Deriv(Box<DiffTerm>, VarName),
}

impl DiffTerm {
    fn from_expr(e: &Expr) -> DiffTerm {
        let b = |e: &Expr| Box::new(DiffTerm::from_expr(e));
        match e {
            Expr::Var(v) => DiffTerm::Var(v.clone()),
            Expr::Const(c) => DiffTerm::Const(c.clone()),
            Expr::Add(l, r) => DiffTerm::Add(b(l), b(r)),
            Expr::Sub(l, r) => DiffTerm::Sub(b(l), b(r)),
            Expr::Mul(l, r) => DiffTerm::Mul(b(l), b(r)),
            Expr::Pow(l, n) => DiffTerm::Pow(b(l), *n),
            _ => unreachable!("callers pass polynomials"),
        }
    }

    /// The expression, if no derivative is pending.
    pub fn to_expr(&self) -> Option<Expr> {
        let b = |t: &DiffTerm| t.to_expr().map(Box::new);
        Some(match self {
            DiffTerm::Var(v) => Expr::Var(v.clone()),
            DiffTerm::Const(c) => Expr::Const(c.clone()),
            DiffTerm::Add(l, r) => Expr::Add(b(l)?, b(r)?),
            DiffTerm::Sub(l, r) => Expr::Sub(b(l)?, b(r)?),
            DiffTerm::Mul(l, r) => Expr::Mul(b(l)?, b(r)?),
            DiffTerm::Pow(l, n) => Expr::Pow(b(l)?, *n),
            DiffTerm::Deriv(..) => return None,
        })
    }

    /// Replaces every pending derivative by its final result.
    pub fn resolve(&self) -> Result<Expr, DiffError> {
        let b = |t: &DiffTerm| t.resolve().map(Box::new);
        Ok(match self {
            DiffTerm::Var(v) => Expr::Var(v.clone()),
            DiffTerm::Const(c) => Expr::Const(c.clone()),
            DiffTerm::Add(l, r) => Expr::Add(b(l)?, b(r)?),
            DiffTerm::Sub(l, r) => Expr::Sub(b(l)?, b(r)?),
            DiffTerm::Mul(l, r) => Expr::Mul(b(l)?, b(r)?),
            DiffTerm::Pow(l, n) => Expr::Pow(b(l)?, *n),
            DiffTerm::Deriv(inner, x) => derivative(&inner.resolve()?, x)?,
        })
    }

    fn children_mut(&mut self) -> Vec<&mut DiffTerm> {
        match self {
            DiffTerm::Var(_) | DiffTerm::Const(_) => vec![],
            DiffTerm::Add(l, r) | DiffTerm::Sub(l, r) | DiffTerm::Mul(l, r) => vec![l, r],
            DiffTerm::Pow(l, _) | DiffTerm::Deriv(l, _) => vec![l],
        }
    }

    /// Child-index paths of every node `matches` accepts, in pre-order,
    /// without descending into accepted nodes.
    fn redex_paths(&self, matches: &impl Fn(&DiffTerm) -> bool) -> Vec<Vec<usize>> {
        fn walk(t: &DiffTerm, matches: &impl Fn(&DiffTerm) -> bool, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if matches(t) {
                out.push(path.clone());
                return;
            }
            let children: Vec<&DiffTerm> = match t {
                DiffTerm::Var(_) | DiffTerm::Const(_) => vec![],
                DiffTerm::Add(l, r) | DiffTerm::Sub(l, r) | DiffTerm::Mul(l, r) => vec![l, r],
                DiffTerm::Pow(l, _) | DiffTerm::Deriv(l, _) => vec![l],
            };
            for (i, c) in children.into_iter().enumerate() {
                path.push(i);
                walk(c, matches, path, out);
                path.pop();
            }
        }
        let mut out = Vec::new();
        walk(self, matches, &mut Vec::new(), &mut out);
        out
    }

    fn at_path_mut(&mut self, path: &[usize]) -> &mut DiffTerm {
        path.iter().fold(self, |node, &i| node.children_mut().swap_remove(i))
    }

    /// Pre-order search for the first node `rewrite` accepts; applies it in
    /// place and returns the rule used.
    fn rewrite_first(&mut self, rewrite: &impl Fn(&DiffTerm) -> Option<(Rule, DiffTerm)>) -> Option<Rule> {
        if let Some((rule, replacement)) = rewrite(self) {
            *self = replacement;
            return Some(rule);
        }
        self.children_mut()
            .into_iter()
            .find_map(|child| child.rewrite_first(rewrite))
    }
}

impl Printable for DiffTerm {
    fn layout(&self) -> Layout<'_, Self> {
        match self {
            DiffTerm::Var(v) => Layout::Var(v.as_str()),
            DiffTerm::Const(c) => Layout::Const(c),
            DiffTerm::Add(a, b) => Layout::Infix(Infix::Add, a, b),
            DiffTerm::Sub(a, b) => Layout::Infix(Infix::Sub, a, b),
            DiffTerm::Mul(a, b) => Layout::Infix(Infix::Mul, a, b),
            DiffTerm::Pow(a, n) => Layout::Pow(a, *n),
            DiffTerm::Deriv(a, x) => Layout::Wrap(format!("d/d{x}("), a, ")".into()),
        }
    }
}

impl fmt::Display for DiffTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        write_node(&mut out, self);
        f.write_str(&out)
    }
}

/// One rewrite step over the whole term.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TraceStep {
    pub rule: Rule,
    pub before: DiffTerm,
    pub after: DiffTerm,
}

impl fmt::Display for TraceStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} ⟶ {}", self.rule, self.before, self.after)
    }
}

#[derive(Serialize)]
struct TraceRecord<'a> {
    rule: &'a str,
    before: String,
    after: String,
}

impl TraceStep {
    /// One-line JSON record with fields `rule`, `before`, `after`.
    pub fn to_record(&self) -> String {
        serde_json::to_string(&TraceRecord {
            rule: self.rule.name(),
            before: self.before.to_string(),
            after: self.after.to_string(),
        })
        .expect("trace records serialize")
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DiffResult {
    pub result: Expr,
    pub trace: Vec<TraceStep>,
}

fn zero() -> Rational {
    Rational::zero()
}

fn boxed(t: DiffTerm) -> Box<DiffTerm> {
    Box::new(t)
}

/// One application of a differentiation rule to a pending derivative.
fn differentiation_step(t: &DiffTerm) -> Option<(Rule, DiffTerm)> {
    let DiffTerm::Deriv(inner, x) = t else {
        return None;
    };
    let d = |e: &DiffTerm| boxed(DiffTerm::Deriv(boxed(e.clone()), x.clone()));
    Some(match inner.as_ref() {
        DiffTerm::Const(_) => (Rule::ConstantRule, DiffTerm::Const(zero())),
        DiffTerm::Var(v) if v != x => (Rule::ConstantRule, DiffTerm::Const(zero())),
        DiffTerm::Var(_) => (Rule::VariableRule, DiffTerm::Const(Rational::one())),
        DiffTerm::Add(a, b) => (Rule::SumDiffRule, DiffTerm::Add(d(a), d(b))),
        DiffTerm::Sub(a, b) => (Rule::SumDiffRule, DiffTerm::Sub(d(a), d(b))),
        DiffTerm::Mul(a, b) => (
            Rule::ProductRule,
            DiffTerm::Add(
                boxed(DiffTerm::Mul(d(a), b.clone())),
                boxed(DiffTerm::Mul(a.clone(), d(b))),
            ),
        ),
        DiffTerm::Pow(_, 0) => (Rule::PowerRuleZero, DiffTerm::Const(zero())),
        DiffTerm::Pow(a, n) => (
            Rule::PowerRulePos,
            DiffTerm::Mul(
                boxed(DiffTerm::Mul(
                    boxed(DiffTerm::Const(Rational::from(i64::from(*n)))),
                    boxed(DiffTerm::Pow(a.clone(), n - 1)),
                )),
                d(a),
            ),
        ),
        DiffTerm::Deriv(..) => unreachable!("pending derivatives never nest"),
    })
}

fn is_const(t: &DiffTerm, one: bool) -> bool {
    matches!(t, DiffTerm::Const(c) if if one { c.is_one() } else { c.is_zero() })
}

/// One application of a local simplification rule:
/// `0 + u = u + 0 = u`, `1*u = u*1 = u`, `0*u = u*0 = 0`, `u^1 = u`.
fn simplification_step(t: &DiffTerm) -> Option<(Rule, DiffTerm)> {
    match t {
        DiffTerm::Add(a, b) if is_const(a, false) => Some((Rule::SimplifyZeroAdd, (**b).clone())),
        DiffTerm::Add(a, b) if is_const(b, false) => Some((Rule::SimplifyZeroAdd, (**a).clone())),
        DiffTerm::Mul(a, b) if is_const(a, true) => Some((Rule::SimplifyOneMul, (**b).clone())),
        DiffTerm::Mul(a, b) if is_const(b, true) => Some((Rule::SimplifyOneMul, (**a).clone())),
        DiffTerm::Mul(a, b) if is_const(a, false) || is_const(b, false) => {
            Some((Rule::SimplifyZeroMul, DiffTerm::Const(zero())))
        }
        DiffTerm::Pow(a, 1) => Some((Rule::SimplifyPowOne, (**a).clone())),
        _ => None,
    }
}

fn run_traced(
    term: &mut DiffTerm,
    trace: &mut Vec<TraceStep>,
    step: impl Fn(&DiffTerm) -> Option<(Rule, DiffTerm)>,
) {
    loop {
        let before = term.clone();
        match term.rewrite_first(&step) {
            Some(rule) => trace.push(TraceStep { rule, before, after: term.clone() }),
            None => return,
        }
    }
}

/// Eliminates pending derivatives in rounds. Each round rewrites, left to
/// right, every derivative present when the round began; derivatives created
/// during a round wait for the next one.
fn run_rounds(term: &mut DiffTerm, trace: &mut Vec<TraceStep>) {
    loop {
        let paths = term.redex_paths(&|t| matches!(t, DiffTerm::Deriv(..)));
        if paths.is_empty() {
            return;
        }
        for path in paths {
            let before = term.clone();
            let node = term.at_path_mut(&path);
            let (rule, replacement) = differentiation_step(node).expect("path points at a derivative");
            *node = replacement;
            trace.push(TraceStep { rule, before, after: term.clone() });
        }
    }
}

/// Differentiates `u` with respect to `x`, recording every rewrite step.
///
/// Derivatives are eliminated in rounds, each rewriting all derivatives
/// pending at its start from left to right; then the simplification
/// rules run to a fixed point, then like terms are collected into the
/// canonical form of [`PolyNF::to_expr`].
pub fn poly_diff(u: &Expr, x: &VarName) -> Result<DiffResult, DiffError> {
    u.require_polynomial()?;
    let mut trace = Vec::new();
    let mut term = DiffTerm::Deriv(boxed(DiffTerm::from_expr(u)), x.clone());
    run_rounds(&mut term, &mut trace);
    run_traced(&mut term, &mut trace, simplification_step);
    let simplified = term.to_expr().expect("all derivatives eliminated");
    let collected = to_nf(&simplified)?.to_expr();
    if collected != simplified {
        trace.push(TraceStep {
            rule: Rule::CollectLikeTerms,
            before: term,
            after: DiffTerm::from_expr(&collected),
        });
    }
    Ok(DiffResult { result: collected, trace })
}

fn diff_rules(u: &Expr, x: &VarName) -> Expr {
    match u {
        Expr::Const(_) => Expr::Const(zero()),
        Expr::Var(v) if v != x => Expr::Const(zero()),
        Expr::Var(_) => Expr::Const(Rational::one()),
        Expr::Add(a, b) => Expr::add(diff_rules(a, x), diff_rules(b, x)),
        Expr::Sub(a, b) => Expr::sub(diff_rules(a, x), diff_rules(b, x)),
        Expr::Mul(a, b) => Expr::add(
            Expr::mul(diff_rules(a, x), (**b).clone()),
            Expr::mul((**a).clone(), diff_rules(b, x)),
        ),
        Expr::Pow(_, 0) => Expr::Const(zero()),
        Expr::Pow(a, n) => Expr::mul(
            Expr::mul(Expr::constant(i64::from(*n)), Expr::pow((**a).clone(), n - 1)),
            diff_rules(a, x),
        ),
        _ => unreachable!("callers pass polynomials"),
    }
}

fn is_rational(e: &Expr, one: bool) -> bool {
    matches!(e, Expr::Const(c) if if one { c.is_one() } else { c.is_zero() })
}

/// Innermost normalization under the local simplification rules. The rules
/// terminate and their critical pairs join, so this reaches the same normal
/// form as the outermost strategy of the traced engine.
fn simplify_rules(u: Expr) -> Expr {
    match u {
        Expr::Add(a, b) => {
            let (a, b) = (simplify_rules(*a), simplify_rules(*b));
            if is_rational(&a, false) {
                b
            } else if is_rational(&b, false) {
                a
            } else {
                Expr::add(a, b)
            }
        }
        Expr::Mul(a, b) => {
            let (a, b) = (simplify_rules(*a), simplify_rules(*b));
            if is_rational(&a, true) {
                b
            } else if is_rational(&b, true) {
                a
            } else if is_rational(&a, false) || is_rational(&b, false) {
                Expr::Const(zero())
            } else {
                Expr::mul(a, b)
            }
        }
        Expr::Sub(a, b) => Expr::sub(simplify_rules(*a), simplify_rules(*b)),
        Expr::Pow(a, 1) => simplify_rules(*a),
        Expr::Pow(a, n) => Expr::pow(simplify_rules(*a), n),
        leaf => leaf,
    }
}

/// Local simplification to a fixed point followed by like-term collection.
/// Idempotent, and preserves the normal form of its input.
pub fn simplify(u: &Expr) -> Result<Expr, DiffError> {
    u.require_polynomial()?;
    Ok(to_nf(&simplify_rules(u.clone()))?.to_expr())
}

/// Untraced [`poly_diff`]: the same result without recording steps.
pub fn derivative(u: &Expr, x: &VarName) -> Result<Expr, DiffError> {
    u.require_polynomial()?;
    Ok(to_nf(&simplify_rules(diff_rules(u, x)))?.to_expr())
}

// ---------------------------------------------------------------------------
// The differentiation operator on syntax values

fn con(c: Rational) -> SynValue {
    SynValue::Con(c)
}

fn syn_diff(s: &SynValue, x: &VarName) -> SynValue {
    match s {
        SynValue::Con(_) => con(zero()),
        SynValue::Var(v) if v == x => con(Rational::one()),
        SynValue::Var(_) => con(zero()),
        SynValue::Plus(a, b) => SynValue::plus(syn_diff(a, x), syn_diff(b, x)),
        SynValue::Minus(a, b) => SynValue::minus(syn_diff(a, x), syn_diff(b, x)),
        SynValue::Times(a, b) => SynValue::plus(
            SynValue::times(syn_diff(a, x), (**b).clone()),
            SynValue::times((**a).clone(), syn_diff(b, x)),
        ),
        SynValue::Power(_, 0) => con(zero()),
        SynValue::Power(a, n) => SynValue::times(
            SynValue::times(con(Rational::from(i64::from(*n))), SynValue::power((**a).clone(), n - 1)),
            syn_diff(a, x),
        ),
    }
}

fn con_is(s: &SynValue, one: bool) -> bool {
    matches!(s, SynValue::Con(c) if if one { c.is_one() } else { c.is_zero() })
}

fn syn_simplify(s: SynValue) -> SynValue {
    match s {
        SynValue::Plus(a, b) => match (syn_simplify(*a), syn_simplify(*b)) {
            (a, b) if con_is(&a, false) => b,
            (a, b) if con_is(&b, false) => a,
            (a, b) => SynValue::plus(a, b),
        },
        SynValue::Times(a, b) => match (syn_simplify(*a), syn_simplify(*b)) {
            (a, b) if con_is(&a, true) => b,
            (a, b) if con_is(&b, true) => a,
            (a, b) if con_is(&a, false) || con_is(&b, false) => con(zero()),
            (a, b) => SynValue::times(a, b),
        },
        SynValue::Minus(a, b) => SynValue::minus(syn_simplify(*a), syn_simplify(*b)),
        SynValue::Power(a, 1) => syn_simplify(*a),
        SynValue::Power(a, n) => SynValue::power(syn_simplify(*a), n),
        leaf => leaf,
    }
}

fn syn_to_nf(s: &SynValue) -> Result<PolyNF, NfError> {
    Ok(match s {
        SynValue::Con(c) => PolyNF::constant(c.clone()),
        SynValue::Var(v) => PolyNF::var(v),
        SynValue::Plus(a, b) => syn_to_nf(a)?.add(&syn_to_nf(b)?),
        SynValue::Minus(a, b) => syn_to_nf(a)?.sub(&syn_to_nf(b)?),
        SynValue::Times(a, b) => syn_to_nf(a)?.mul(&syn_to_nf(b)?)?,
        SynValue::Power(a, n) => syn_to_nf(a)?.pow(*n)?,
    })
}

/// Canonical syntax value of a normal form, in the same term order as
/// [`PolyNF::to_expr`].
fn nf_to_syn(p: &PolyNF) -> SynValue {
    let term = |m: &crate::semantics::Monomial, c: &Rational| -> SynValue {
        let powers = m.factors().map(|(v, e)| match e {
            1 => SynValue::Var(v.clone()),
            _ => SynValue::power(SynValue::Var(v.clone()), e),
        });
        let mut powers = powers.peekable();
        let head = if c.is_one() && powers.peek().is_some() {
            powers.next().expect("peeked")
        } else {
            con(c.clone())
        };
        powers.fold(head, SynValue::times)
    };
    let mut terms = p.terms().collect::<Vec<_>>();
    terms.sort_by(|a, b| grlex_cmp(a.0, b.0));
    let mut iter = terms.into_iter();
    let Some((m, c)) = iter.next() else {
        return con(zero());
    };
    iter.fold(term(m, c), |acc, (m, c)| {
        if c.is_negative() {
            SynValue::minus(acc, term(m, &c.abs()))
        } else {
            SynValue::plus(acc, term(m, c))
        }
    })
}

/// The differentiation operator on syntax values: `opd_apply(a, var(x))` is
/// the syntax value of the derivative of the polynomial `a` denotes.
pub fn opd_apply(a: &SynValue, b: &SynValue) -> Result<SynValue, DiffError> {
    let SynValue::Var(x) = b else {
        return Err(DiffError::NotVarNode(b.to_string()));
    };
    let differentiated = syn_simplify(syn_diff(a, x));
    Ok(nf_to_syn(&syn_to_nf(&differentiated)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_expr, parse_synvalue};
    use crate::semantics::{nf_derivative, to_nf};
    use crate::syntax::{eval_syn, quote_poly};

    fn e(s: &str) -> Expr {
        parse_expr(s).unwrap()
    }

    fn v(s: &str) -> VarName {
        VarName::new(s).unwrap()
    }

    fn rules(trace: &[TraceStep]) -> Vec<Rule> {
        trace.iter().map(|s| s.rule).collect()
    }

    #[test]
    fn worked_example() {
        let out = poly_diff(&e("x*(x^2+y)"), &v("x")).unwrap();
        assert_eq!(out.result.to_string(), "3*x^2 + y");
        let r = rules(&out.trace);
        assert_eq!(
            &r[..6],
            &[
                Rule::ProductRule,
                Rule::VariableRule,
                Rule::SumDiffRule,
                Rule::PowerRulePos,
                Rule::ConstantRule,
                Rule::VariableRule
            ]
        );
        assert!(r[6..].iter().all(|rule| !rule.is_differentiation()));
        assert_eq!(r.last(), Some(&Rule::CollectLikeTerms));
    }

    #[test]
    fn worked_example_intermediate_lines() {
        let out = poly_diff(&e("x*(x^2+y)"), &v("x")).unwrap();
        let lines: Vec<String> = out.trace.iter().map(|s| s.after.to_string()).collect();
        assert_eq!(lines[0], "d/dx(x) * (x^2 + y) + x*d/dx(x^2 + y)");
        assert_eq!(lines[2], "1 * (x^2 + y) + x * (d/dx(x^2) + d/dx(y))");
        assert_eq!(lines[4], "1 * (x^2 + y) + x * (2*x^1*d/dx(x) + 0)");
        assert_eq!(lines[5], "1 * (x^2 + y) + x * (2*x^1*1 + 0)");
        assert_eq!(out.trace[0].before.to_string(), "d/dx(x * (x^2 + y))");
    }

    #[test]
    fn constant_and_foreign_variable() {
        assert_eq!(poly_diff(&e("5"), &v("x")).unwrap().result, e("0"));
        assert_eq!(poly_diff(&e("y"), &v("x")).unwrap().result, e("0"));
        let zero_pow = poly_diff(&e("x^0"), &v("x")).unwrap();
        assert_eq!(zero_pow.result, e("0"));
        assert_eq!(rules(&zero_pow.trace), vec![Rule::PowerRuleZero]);
    }

    #[test]
    fn derived_cubic_example() {
        // oracle: term-by-term derivative of the normal form
        let u = e("x^3 + 2*x");
        let expected = nf_derivative(&to_nf(&u).unwrap(), &v("x"));
        let out = poly_diff(&u, &v("x")).unwrap();
        assert_eq!(to_nf(&out.result).unwrap(), expected);
        assert_eq!(out.result.to_string(), "3*x^2 + 2");
    }

    #[test]
    fn rejects_non_polynomial() {
        assert!(matches!(poly_diff(&e("quote(x)"), &v("x")), Err(DiffError::Expr(_))));
        assert!(simplify(&e("@c")).is_err());
    }

    #[test]
    fn trace_steps_change_the_term() {
        let out = poly_diff(&e("(x - y)*(x + 1)^3 - x^1*0"), &v("x")).unwrap();
        for step in &out.trace {
            assert_ne!(step.before, step.after, "{step}");
        }
    }

    #[test]
    fn simplify_examples() {
        assert_eq!(simplify(&e("1*(x^2+y) + x*(2*x^1*1 + 0)")).unwrap().to_string(), "3*x^2 + y");
        assert_eq!(simplify(&e("0 + x")).unwrap(), e("x"));
        assert_eq!(simplify(&e("x")).unwrap(), e("x"));
    }

    #[test]
    fn untraced_agrees_on_example() {
        let u = e("x*(x^2+y)");
        assert_eq!(derivative(&u, &v("x")).unwrap(), poly_diff(&u, &v("x")).unwrap().result);
    }

    #[test]
    fn opd_examples() {
        let u = e("x*(x^2+y)");
        let xs = parse_synvalue("var(s_x)").unwrap();
        assert_eq!(
            opd_apply(&quote_poly(&u).unwrap(), &xs).unwrap(),
            quote_poly(&e("3*x^2 + y")).unwrap()
        );
        assert_eq!(
            opd_apply(&parse_synvalue("con(s_5)").unwrap(), &xs).unwrap(),
            parse_synvalue("con(s_0)").unwrap()
        );
        let square = parse_synvalue("power(var(s_x),2)").unwrap();
        let oracle = quote_poly(&poly_diff(&e("x^2"), &v("x")).unwrap().result).unwrap();
        assert_eq!(opd_apply(&square, &xs).unwrap(), oracle);
        assert_eq!(eval_syn(&oracle), e("2*x"));
    }

    #[test]
    fn opd_requires_variable() {
        let a = parse_synvalue("var(s_x)").unwrap();
        let err = opd_apply(&a, &parse_synvalue("plus(var(s_x),con(s_3))").unwrap()).unwrap_err();
        assert_eq!(err, DiffError::NotVarNode("plus(var(s_x),con(s_3))".into()));
    }

    #[test]
    fn negative_coefficients_render_identically() {
        let u = e("y - x^2*y + (-3)*x");
        let expr_side = derivative(&u, &v("x")).unwrap();
        let syn_side = opd_apply(&quote_poly(&u).unwrap(), &parse_synvalue("var(s_x)").unwrap()).unwrap();
        assert_eq!(eval_syn(&syn_side), expr_side);
        assert_eq!(expr_side.to_string(), "(-2)*x*y - 3");
    }

    #[test]
    fn trace_records() {
        let out = poly_diff(&e("x"), &v("x")).unwrap();
        assert_eq!(out.trace.len(), 1);
        assert_eq!(out.trace[0].to_string(), "VariableRule: d/dx(x) ⟶ 1");
        assert_eq!(
            out.trace[0].to_record(),
            r#"{"rule":"VariableRule","before":"d/dx(x)","after":"1"}"#
        );
    }
}
