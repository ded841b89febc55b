//! Executable checks of the framework laws over seeded populations.
//!
//! A [`FrameworkInstance`] bundles the object language, the syntax
//! representation and the quotation and evaluation maps. The `check_*`
//! functions sample expressions or syntax values and report every
//! counterexample they find. Reports depend only on `(n, seed)`.

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::expr::{Expr, VarName};
use crate::gen::{gen_expr, gen_synvalue, gen_var, sample_rng, GenConfig};
use crate::global::{demo_liar, interpret, Budget, DefTable, GlobalSyn, GlobalValue};
use crate::polydiff::{opd_apply, poly_diff, DiffError};
use crate::semantics::{limit_derivative, nf_derivative, nf_equal, to_nf, Assignment, NfError, PolyNF};
use crate::syntax::{eval_syn, quote_poly, SynValue};

/// Counterexamples printed in a text report; the record keeps all of them.
const SHOWN_COUNTEREXAMPLES: usize = 5;

/// Budget used when probing the liar witness for the global instance.
const LIAR_PROBE_BUDGET: u64 = 100;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum CheckError {
    #[error("sample count must be at least 1")]
    NoSamples,
}

type ExprPred = dyn Fn(&Expr) -> bool + Send + Sync;
type QuoteFn = dyn Fn(&Expr) -> Option<SynValue> + Send + Sync;
type EvalFn = dyn Fn(&SynValue) -> Option<Expr> + Send + Sync;
type ReprFn = dyn Fn(&Expr) -> SynValue + Send + Sync;
type DecodeFn = dyn Fn(&SynValue) -> Expr + Send + Sync;
type SemFn = dyn Fn(&Expr) -> Result<PolyNF, NfError> + Send + Sync;

/// The object language with its syntax representation, quotation and
/// evaluation.
pub struct FrameworkInstance {
    pub name: String,
    /// Generator for the object language.
    pub gen: GenConfig,
    /// Membership in the object language.
    pub obj_lang: Box<ExprPred>,
    /// The syntax tree of an expression.
    pub syn_repr: Box<ReprFn>,
    /// The expression a syntax tree represents.
    pub syn_decode: Box<DecodeFn>,
    pub quote_fn: Box<QuoteFn>,
    /// Evaluation; `None` where undefined.
    pub eval_fn: Box<EvalFn>,
    pub sem_value: Box<SemFn>,
    /// Facts about the instance reported alongside every check.
    pub caveats: Vec<String>,
}

impl FrameworkInstance {
    /// Syntax values as a separate inductive type, with `Q` and `E` as
    /// meta-level functions.
    pub fn local() -> Self {
        FrameworkInstance {
            name: "local".into(),
            gen: GenConfig::default(),
            obj_lang: Box::new(Expr::is_polynomial),
            syn_repr: Box::new(syntax_tree),
            syn_decode: Box::new(decode_syntax_tree),
            quote_fn: Box::new(|e| quote_poly(e).ok()),
            eval_fn: Box::new(|s| Some(eval_syn(s))),
            sem_value: Box::new(to_nf),
            caveats: Vec::new(),
        }
    }

    /// Quotation and evaluation as operators of the language, run through
    /// the budgeted interpreter.
    pub fn global() -> Self {
        let liar = demo_liar(LIAR_PROBE_BUDGET);
        let mut caveats = vec![
            "disquotation is not universally valid in this instance".to_string(),
            format!(
                "witness @LIAR := not(eval(quote(@LIAR) : bool)) is excluded from sampling; \
                 evaluating it exhausted a budget of {} after {} unfoldings",
                liar.budget,
                liar.exhausted_at.map_or_else(|| "no".into(), |d| d.to_string())
            ),
        ];
        caveats.push("sampled population: polynomials only".into());
        FrameworkInstance {
            name: "global".into(),
            gen: GenConfig::default(),
            obj_lang: Box::new(Expr::is_polynomial),
            syn_repr: Box::new(syntax_tree),
            syn_decode: Box::new(decode_syntax_tree),
            quote_fn: Box::new(|e| {
                let quoted = Expr::quote(e.clone());
                match interpret(&quoted, &Assignment::new(), &DefTable::new(), &mut Budget::default()) {
                    Ok(GlobalValue::Syn(GlobalSyn::Poly(s))) => Some(s),
                    _ => None,
                }
            }),
            eval_fn: Box::new(|s| Some(GlobalSyn::Poly(s.clone()).decode())),
            sem_value: Box::new(to_nf),
            caveats,
        }
    }

    pub fn with_quote_fn(mut self, name: &str, q: impl Fn(&Expr) -> Option<SynValue> + Send + Sync + 'static) -> Self {
        self.name = name.into();
        self.quote_fn = Box::new(q);
        self
    }

    pub fn with_eval_fn(mut self, name: &str, e: impl Fn(&SynValue) -> Option<Expr> + Send + Sync + 'static) -> Self {
        self.name = name.into();
        self.eval_fn = Box::new(e);
        self
    }
}

/// Deliberately broken quotation and evaluation maps, for checking that the
/// checkers notice.
pub mod mutants {
    use super::*;

    /// Quotation that swaps the arguments of every `plus` node.
    pub fn swapped_plus_quote(e: &Expr) -> Option<SynValue> {
        fn swap(s: SynValue) -> SynValue {
            match s {
                SynValue::Plus(a, b) => SynValue::plus(swap(*b), swap(*a)),
                SynValue::Minus(a, b) => SynValue::minus(swap(*a), swap(*b)),
                SynValue::Times(a, b) => SynValue::times(swap(*a), swap(*b)),
                SynValue::Power(a, n) => SynValue::power(swap(*a), n),
                leaf => leaf,
            }
        }
        quote_poly(e).ok().map(swap)
    }

    /// Evaluation that maps every syntax value to the constant 0.
    pub fn zero_eval(_: &SynValue) -> Option<Expr> {
        Some(Expr::constant(0))
    }

    pub fn local_with_swapped_plus() -> FrameworkInstance {
        FrameworkInstance::local().with_quote_fn("local/swapped-plus-quote", swapped_plus_quote)
    }

    pub fn local_with_zero_eval() -> FrameworkInstance {
        FrameworkInstance::local().with_eval_fn("local/zero-eval", zero_eval)
    }
}

/// Reference encoding of an expression as its syntax tree, written
/// independently of [`quote_poly`]. Non-polynomial nodes have no tree and
/// are encoded as the constant 0; callers check membership first.
pub fn syntax_tree(e: &Expr) -> SynValue {
    enum Step<'a> {
        Visit(&'a Expr),
        Build(&'a Expr),
    }
    let mut steps = vec![Step::Visit(e)];
    let mut out: Vec<SynValue> = Vec::new();
    while let Some(step) = steps.pop() {
        match step {
            Step::Visit(node) => {
                steps.push(Step::Build(node));
                match node {
                    Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => {
                        steps.push(Step::Visit(b));
                        steps.push(Step::Visit(a));
                    }
                    Expr::Pow(a, _) => steps.push(Step::Visit(a)),
                    _ => {}
                }
            }
            Step::Build(node) => {
                let built = match node {
                    Expr::Var(v) => SynValue::Var(v.clone()),
                    Expr::Const(c) => SynValue::Con(c.clone()),
                    Expr::Add(..) | Expr::Sub(..) | Expr::Mul(..) => {
                        let b = out.pop().expect("right operand");
                        let a = out.pop().expect("left operand");
                        match node {
                            Expr::Add(..) => SynValue::plus(a, b),
                            Expr::Sub(..) => SynValue::minus(a, b),
                            _ => SynValue::times(a, b),
                        }
                    }
                    Expr::Pow(_, n) => SynValue::power(out.pop().expect("base"), *n),
                    _ => SynValue::Con(0.into()),
                };
                out.push(built);
            }
        }
    }
    out.pop().expect("root")
}

/// Reference decoding of a syntax tree, written independently of
/// [`eval_syn`].
pub fn decode_syntax_tree(s: &SynValue) -> Expr {
    enum Step<'a> {
        Visit(&'a SynValue),
        Build(&'a SynValue),
    }
    let mut steps = vec![Step::Visit(s)];
    let mut out: Vec<Expr> = Vec::new();
    while let Some(step) = steps.pop() {
        match step {
            Step::Visit(node) => {
                steps.push(Step::Build(node));
                match node {
                    SynValue::Plus(a, b) | SynValue::Minus(a, b) | SynValue::Times(a, b) => {
                        steps.push(Step::Visit(b));
                        steps.push(Step::Visit(a));
                    }
                    SynValue::Power(a, _) => steps.push(Step::Visit(a)),
                    _ => {}
                }
            }
            Step::Build(node) => {
                let built = match node {
                    SynValue::Var(v) => Expr::Var(v.clone()),
                    SynValue::Con(c) => Expr::Const(c.clone()),
                    SynValue::Power(_, n) => Expr::pow(out.pop().expect("base"), *n),
                    _ => {
                        let b = out.pop().expect("right operand");
                        let a = out.pop().expect("left operand");
                        match node {
                            SynValue::Plus(..) => Expr::add(a, b),
                            SynValue::Minus(..) => Expr::sub(a, b),
                            _ => Expr::mul(a, b),
                        }
                    }
                };
                out.push(built);
            }
        }
    }
    out.pop().expect("root")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub input: String,
    pub expected: String,
    pub actual: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub instance: String,
    pub samples: usize,
    pub seed: u64,
    pub checked: usize,
    pub skipped: usize,
    pub failures: Vec<Counterexample>,
    pub notes: Vec<String>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn verdict(&self) -> &'static str {
        if self.passed() {
            "pass"
        } else {
            "fail"
        }
    }

    /// Labeled text block.
    pub fn to_text(&self) -> String {
        let mut out = format!("== check {} ==\n", self.check);
        out.push_str(&format!("instance: {}\n", self.instance));
        out.push_str(&format!("samples: {}  seed: {}\n", self.samples, self.seed));
        out.push_str(&format!(
            "checked: {}  skipped: {}  failed: {}\n",
            self.checked,
            self.skipped,
            self.failures.len()
        ));
        out.push_str(&format!("passed: {}/{}\n", self.checked - self.failures.len(), self.checked));
        out.push_str(&format!("verdict: {}\n", self.verdict().to_uppercase()));
        for note in &self.notes {
            out.push_str(&format!("note: {note}\n"));
        }
        for (i, c) in self.failures.iter().take(SHOWN_COUNTEREXAMPLES).enumerate() {
            out.push_str(&format!(
                "counterexample {}:\n  input:    {}\n  expected: {}\n  actual:   {}\n",
                i + 1,
                c.input,
                c.expected,
                c.actual
            ));
        }
        if self.failures.len() > SHOWN_COUNTEREXAMPLES {
            out.push_str(&format!(
                "... {} more counterexamples\n",
                self.failures.len() - SHOWN_COUNTEREXAMPLES
            ));
        }
        out
    }

    /// One-line JSON record with every counterexample.
    pub fn to_record(&self) -> String {
        #[derive(Serialize)]
        struct Record<'a> {
            #[serde(flatten)]
            report: &'a CheckReport,
            failed: usize,
            verdict: &'static str,
        }
        serde_json::to_string(&Record { report: self, failed: self.failures.len(), verdict: self.verdict() })
            .expect("reports serialize")
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

enum Outcome {
    Pass,
    Skip,
    Fail(Counterexample),
}

fn fail(input: impl fmt::Display, expected: impl fmt::Display, actual: impl fmt::Display) -> Outcome {
    Outcome::Fail(Counterexample {
        input: input.to_string(),
        expected: expected.to_string(),
        actual: actual.to_string(),
    })
}

fn run_check(
    check: &str,
    instance: &str,
    n: usize,
    seed: u64,
    notes: Vec<String>,
    sample: impl Fn(u64) -> Outcome + Sync + Send,
) -> Result<CheckReport, CheckError> {
    if n == 0 {
        return Err(CheckError::NoSamples);
    }
    let outcomes: Vec<Outcome> = (0..n as u64).into_par_iter().map(sample).collect();
    let mut report = CheckReport {
        check: check.into(),
        instance: instance.into(),
        samples: n,
        seed,
        checked: 0,
        skipped: 0,
        failures: Vec::new(),
        notes,
    };
    for outcome in outcomes {
        match outcome {
            Outcome::Pass => report.checked += 1,
            Outcome::Skip => report.skipped += 1,
            Outcome::Fail(c) => {
                report.checked += 1;
                report.failures.push(c);
            }
        }
    }
    Ok(report)
}

fn render_nf(r: &Result<PolyNF, NfError>) -> String {
    match r {
        Ok(p) => p.to_string(),
        Err(e) => format!("error: {e}"),
    }
}

/// The semantic value of a quotation is the syntax tree it denotes; checks
/// that it is the syntax tree of the quoted expression.
pub fn check_quotation_axiom(f: &FrameworkInstance, n: usize, seed: u64) -> Result<CheckReport, CheckError> {
    run_check("quotation-axiom", &f.name, n, seed, f.caveats.clone(), |i| {
        let e = gen_expr(&f.gen, &mut sample_rng(seed, i));
        if !(f.obj_lang)(&e) {
            return Outcome::Skip;
        }
        let expected = (f.syn_repr)(&e);
        match (f.quote_fn)(&e) {
            Some(q) if q == expected => Outcome::Pass,
            Some(q) => fail(&e, expected, q),
            None => fail(&e, expected, "quotation undefined"),
        }
    })
}

/// Evaluating a syntax value means the same as the expression it
/// represents. Undefined evaluations are skipped.
pub fn check_evaluation_axiom(f: &FrameworkInstance, n: usize, seed: u64) -> Result<CheckReport, CheckError> {
    run_check("evaluation-axiom", &f.name, n, seed, f.caveats.clone(), |i| {
        let s = gen_synvalue(&f.gen, &mut sample_rng(seed, i));
        let Some(evaluated) = (f.eval_fn)(&s) else {
            return Outcome::Skip;
        };
        let expected = (f.sem_value)(&(f.syn_decode)(&s));
        let actual = (f.sem_value)(&evaluated);
        match (&expected, &actual) {
            (Ok(p), Ok(q)) if nf_equal(p, q) => Outcome::Pass,
            _ => fail(&s, render_nf(&expected), render_nf(&actual)),
        }
    })
}

/// Evaluating the quotation of an expression gives back the expression.
pub fn check_disquotation(f: &FrameworkInstance, n: usize, seed: u64) -> Result<CheckReport, CheckError> {
    run_check("disquotation", &f.name, n, seed, f.caveats.clone(), |i| {
        let u = gen_expr(&f.gen, &mut sample_rng(seed, i));
        if !(f.obj_lang)(&u) {
            return Outcome::Skip;
        }
        let Some(q) = (f.quote_fn)(&u) else {
            return fail(&u, &u, "quotation undefined");
        };
        match (f.eval_fn)(&q) {
            Some(back) if back == u => Outcome::Pass,
            Some(back) => fail(&u, &u, back),
            None => fail(&u, &u, format!("evaluation of {q} undefined")),
        }
    })
}

fn sample_pair(cfg: &GenConfig, seed: u64, i: u64) -> (Expr, VarName) {
    let mut rng = sample_rng(seed, i);
    let u = gen_expr(cfg, &mut rng);
    let x = gen_var(cfg, &mut rng);
    (u, x)
}

fn pair_input(u: &Expr, x: &VarName) -> String {
    format!("d/d{x}({u})")
}

fn opd_expr(
    opd: &(dyn Fn(&SynValue, &SynValue) -> Result<SynValue, DiffError> + Sync),
    u: &Expr,
    x: &VarName,
) -> Result<Expr, DiffError> {
    let qu = quote_poly(u)?;
    let qx = quote_poly(&Expr::Var(x.clone()))?;
    Ok(eval_syn(&opd(&qu, &qx)?))
}

pub const SOUNDNESS_CHAIN: &str = "comp-behavior equates decoded opd results with PolyDiff; \
    math-meaning equates the same results with the limit-definition derivative; \
    together they show PolyDiff outputs denote true derivatives";

/// `E(O_pd(Q u)(Q x))` is structurally the PolyDiff result.
pub fn check_comp_behavior(n: usize, seed: u64) -> Result<CheckReport, CheckError> {
    check_comp_behavior_with(&GenConfig::default(), &opd_apply, n, seed)
}

pub fn check_comp_behavior_with(
    cfg: &GenConfig,
    opd: &(dyn Fn(&SynValue, &SynValue) -> Result<SynValue, DiffError> + Sync),
    n: usize,
    seed: u64,
) -> Result<CheckReport, CheckError> {
    run_check("comp-behavior", "local", n, seed, vec![SOUNDNESS_CHAIN.into()], |i| {
        let (u, x) = sample_pair(cfg, seed, i);
        let lhs = opd_expr(opd, &u, &x);
        let rhs = poly_diff(&u, &x).map(|r| r.result);
        match (lhs, rhs) {
            (Ok(a), Ok(b)) if a == b => Outcome::Pass,
            (a, b) => {
                let show = |r: Result<Expr, DiffError>| r.map_or_else(|e| format!("error: {e}"), |e| e.to_string());
                fail(pair_input(&u, &x), show(b), show(a))
            }
        }
    })
}

/// `E(O_pd(Q u)(Q x))` denotes the derivative of `u` computed from the
/// limit of the difference quotient.
pub fn check_math_meaning(n: usize, seed: u64) -> Result<CheckReport, CheckError> {
    check_math_meaning_with(&GenConfig::default(), &opd_apply, n, seed)
}

pub fn check_math_meaning_with(
    cfg: &GenConfig,
    opd: &(dyn Fn(&SynValue, &SynValue) -> Result<SynValue, DiffError> + Sync),
    n: usize,
    seed: u64,
) -> Result<CheckReport, CheckError> {
    run_check("math-meaning", "local", n, seed, vec![SOUNDNESS_CHAIN.into()], |i| {
        let (u, x) = sample_pair(cfg, seed, i);
        let expected = limit_derivative(&u, &x);
        let actual = opd_expr(opd, &u, &x).map_err(|e| e.to_string()).and_then(|d| to_nf(&d).map_err(|e| e.to_string()));
        match (&expected, &actual) {
            (Ok(p), Ok(q)) if nf_equal(p, q) => Outcome::Pass,
            (_, actual) => fail(
                pair_input(&u, &x),
                render_nf(&expected),
                actual.as_ref().map_or_else(|e| format!("error: {e}"), |q| q.to_string()),
            ),
        }
    })
}

/// The limit-definition derivative agrees with term-by-term
/// differentiation of the normal form.
pub fn check_oracle_agreement(n: usize, seed: u64) -> Result<CheckReport, CheckError> {
    let cfg = GenConfig::default();
    run_check("oracle-agreement", "local", n, seed, Vec::new(), |i| {
        let (u, x) = sample_pair(&cfg, seed, i);
        let expected = to_nf(&u).map(|p| nf_derivative(&p, &x));
        let actual = limit_derivative(&u, &x);
        match (&expected, &actual) {
            (Ok(p), Ok(q)) if nf_equal(p, q) => Outcome::Pass,
            _ => fail(pair_input(&u, &x), render_nf(&expected), render_nf(&actual)),
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_expr;

    #[test]
    fn reference_codec_matches_quote() {
        let cfg = GenConfig::default();
        for i in 0..200 {
            let e = gen_expr(&cfg, &mut sample_rng(3, i));
            let s = syntax_tree(&e);
            assert_eq!(Some(&s), quote_poly(&e).ok().as_ref());
            assert_eq!(decode_syntax_tree(&s), e);
        }
    }

    #[test]
    fn local_instance_passes() {
        let f = FrameworkInstance::local();
        for r in [
            check_quotation_axiom(&f, 200, 0).unwrap(),
            check_evaluation_axiom(&f, 200, 0).unwrap(),
            check_disquotation(&f, 200, 0).unwrap(),
            check_comp_behavior(200, 0).unwrap(),
            check_math_meaning(200, 0).unwrap(),
            check_oracle_agreement(200, 0).unwrap(),
        ] {
            assert!(r.passed(), "{r}");
            assert_eq!(r.checked, 200);
            assert_eq!(r.skipped, 0);
        }
    }

    #[test]
    fn global_instance_passes_on_polynomials_with_caveat() {
        let f = FrameworkInstance::global();
        let r = check_disquotation(&f, 100, 1).unwrap();
        assert!(r.passed(), "{r}");
        assert!(r.to_text().contains("not universally valid"));
        assert!(r.to_text().contains("after 100 unfoldings"));
        assert!(check_quotation_axiom(&f, 100, 1).unwrap().passed());
    }

    #[test]
    fn mutants_are_caught() {
        let r = check_quotation_axiom(&mutants::local_with_swapped_plus(), 1000, 0).unwrap();
        assert!(!r.passed());
        assert!(r.failures.iter().all(|c| c.input.contains('+')));
        let r = check_evaluation_axiom(&mutants::local_with_zero_eval(), 1000, 0).unwrap();
        assert!(!r.passed());
        assert!(r.failures.iter().all(|c| c.actual == "0"));
    }

    #[test]
    fn zero_samples_is_rejected() {
        assert_eq!(check_comp_behavior(0, 0), Err(CheckError::NoSamples));
        assert_eq!(check_quotation_axiom(&FrameworkInstance::local(), 0, 0), Err(CheckError::NoSamples));
    }

    #[test]
    fn reports_are_deterministic() {
        assert_eq!(check_math_meaning(300, 9).unwrap(), check_math_meaning(300, 9).unwrap());
    }

    #[test]
    fn broken_opd_is_caught() {
        let cfg = GenConfig::default();
        let wrong = |a: &SynValue, b: &SynValue| opd_apply(a, b).map(|d| SynValue::plus(d, SynValue::Con(1.into())));
        assert!(!check_comp_behavior_with(&cfg, &wrong, 100, 0).unwrap().passed());
        assert!(!check_math_meaning_with(&cfg, &wrong, 100, 0).unwrap().passed());
    }

    #[test]
    fn worked_example_sides_agree() {
        let u = parse_expr("x*(x^2+y)").unwrap();
        let x = VarName::new("x").unwrap();
        let lhs = opd_expr(&opd_apply, &u, &x).unwrap();
        assert_eq!(lhs.to_string(), "3*x^2 + y");
        assert_eq!(lhs, poly_diff(&u, &x).unwrap().result);
    }

    #[test]
    fn report_formats() {
        let r = check_math_meaning(1, 0).unwrap();
        assert!(r.to_text().contains("passed: 1/1"));
        let v: serde_json::Value = serde_json::from_str(&r.to_record()).unwrap();
        assert_eq!(v["check"], "math-meaning");
        assert_eq!(v["verdict"], "pass");
        assert_eq!(v["checked"], 1);
        assert_eq!(v["failed"], 0);
    }
}
