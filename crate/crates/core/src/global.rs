//! Quote and eval as operators of the object language.
//!
//! Expressions may quote polynomials and defined constants, evaluate syntax
//! values back at a declared type, negate booleans, compare syntax values and
//! apply the differentiation operator to syntax values. Evaluation is
//! budgeted: every unfolding of an `eval` node consumes one unit, so a
//! self-referential definition such as
//!
//! ```text
//! LIAR : bool := not(eval(quote(@LIAR) : bool))
//! ```
//!
//! surfaces as [`GlobalError::BudgetExhausted`] instead of diverging.
//!
//! The interpreter runs on an explicit work stack, so unfolding depth is
//! bounded by the budget and not by the native call stack.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::expr::{ConstName, Expr, TypeTag, VarName};
use crate::polydiff::{opd_apply, DiffError};
use crate::rational::Rational;
use crate::semantics::{eval_expr, Assignment, NfError};
use crate::syntax::{eval_syn, quote_poly, SynValue};

pub const DEFAULT_BUDGET: u64 = 10_000;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum GlobalError {
    #[error("type error in `{subterm}`: {message}")]
    Type { subterm: String, message: String },
    #[error("evaluation budget exhausted after {depth} eval unfoldings")]
    BudgetExhausted { depth: u64 },
    #[error("unbound variable `{0}`")]
    UnboundVariable(VarName),
    #[error("unknown constant `@{0}`")]
    UnknownConstant(ConstName),
    #[error("constant `@{0}` is already defined")]
    DuplicateDefinition(ConstName),
    #[error("definition of `@{name}` refers to `@{target}` outside a quotation before it is defined")]
    IllegalReference { name: ConstName, target: ConstName },
    #[error(transparent)]
    Diff(#[from] DiffError),
}

fn type_error(subterm: &Expr, message: impl Into<String>) -> GlobalError {
    GlobalError::Type { subterm: subterm.to_string(), message: message.into() }
}

/// A syntax value of the global language: the syntax tree of a polynomial
/// or of a defined constant.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum GlobalSyn {
    Poly(SynValue),
    Const(ConstName),
}

impl GlobalSyn {
    /// The expression this value is the syntax of.
    pub fn decode(&self) -> Expr {
        match self {
            GlobalSyn::Poly(s) => eval_syn(s),
            GlobalSyn::Const(c) => Expr::NamedConst(c.clone()),
        }
    }

    pub fn is_poly(&self) -> bool {
        matches!(self, GlobalSyn::Poly(_))
    }

    pub fn is_var(&self) -> bool {
        matches!(self, GlobalSyn::Poly(s) if s.is_var_node())
    }
}

impl fmt::Display for GlobalSyn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GlobalSyn::Poly(s) => write!(f, "{s}"),
            GlobalSyn::Const(c) => write!(f, "const(s_{c})"),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum GlobalValue {
    Real(Rational),
    Syn(GlobalSyn),
    Bool(bool),
}

impl GlobalValue {
    pub fn type_tag(&self) -> TypeTag {
        match self {
            GlobalValue::Real(_) => TypeTag::Real,
            GlobalValue::Syn(_) => TypeTag::Syn,
            GlobalValue::Bool(_) => TypeTag::Bool,
        }
    }
}

impl fmt::Display for GlobalValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GlobalValue::Real(r) => write!(f, "{r}"),
            GlobalValue::Syn(s) => write!(f, "{s}"),
            GlobalValue::Bool(b) => write!(f, "{b}"),
        }
    }
}

/// Remaining eval unfoldings.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Budget {
    remaining: u64,
    used: u64,
}

impl Budget {
    pub fn new(limit: u64) -> Self {
        Budget { remaining: limit, used: 0 }
    }

    pub fn remaining(&self) -> u64 {
        self.remaining
    }

    /// Unfoldings performed so far.
    pub fn used(&self) -> u64 {
        self.used
    }

    fn consume(&mut self) -> Result<(), GlobalError> {
        if self.remaining == 0 {
            return Err(GlobalError::BudgetExhausted { depth: self.used });
        }
        self.remaining -= 1;
        self.used += 1;
        Ok(())
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::new(DEFAULT_BUDGET)
    }
}

#[derive(Clone, Debug)]
struct Definition {
    name: ConstName,
    ty: TypeTag,
    body: Expr,
}

/// Constant definitions in definition order.
///
/// A body may use earlier constants anywhere, and may mention any constant,
/// including the one being defined, inside a quotation. Unfolding constants
/// outside quotations is therefore well founded; every cycle passes through
/// an `eval` and is charged to the budget.
#[derive(Clone, Debug, Default)]
pub struct DefTable {
    defs: Vec<Definition>,
    index: BTreeMap<ConstName, usize>,
}

impl DefTable {
    pub fn new() -> Self {
        DefTable::default()
    }

    pub fn define(&mut self, name: ConstName, ty: TypeTag, body: Expr) -> Result<(), GlobalError> {
        if self.index.contains_key(&name) {
            return Err(GlobalError::DuplicateDefinition(name));
        }
        let actual = Checker { defs: self, defining: Some((&name, ty)) }.check(&body)?;
        if actual != ty {
            return Err(type_error(&body, format!("declared {ty} but body has type {actual}")));
        }
        self.index.insert(name.clone(), self.defs.len());
        self.defs.push(Definition { name, ty, body });
        Ok(())
    }

    pub fn get(&self, name: &ConstName) -> Option<(TypeTag, &Expr)> {
        self.index.get(name).map(|&i| (self.defs[i].ty, &self.defs[i].body))
    }

    pub fn contains(&self, name: &ConstName) -> bool {
        self.index.contains_key(name)
    }

    /// Constant names in definition order.
    pub fn names(&self) -> impl Iterator<Item = &ConstName> {
        self.defs.iter().map(|d| &d.name)
    }

    pub fn len(&self) -> usize {
        self.defs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.defs.is_empty()
    }
}

struct Checker<'a> {
    defs: &'a DefTable,
    defining: Option<(&'a ConstName, TypeTag)>,
}

impl Checker<'_> {
    fn expect(&self, e: &Expr, want: TypeTag) -> Result<(), GlobalError> {
        let got = self.check(e)?;
        if got == want {
            Ok(())
        } else {
            Err(type_error(e, format!("expected {want}, found {got}")))
        }
    }

    fn check(&self, e: &Expr) -> Result<TypeTag, GlobalError> {
        match e {
            Expr::Var(_) | Expr::Const(_) => Ok(TypeTag::Real),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => {
                self.expect(a, TypeTag::Real)?;
                self.expect(b, TypeTag::Real)?;
                Ok(TypeTag::Real)
            }
            Expr::Pow(a, _) => {
                self.expect(a, TypeTag::Real)?;
                Ok(TypeTag::Real)
            }
            Expr::Quote(body) => match body.as_ref() {
                Expr::NamedConst(c) => {
                    let is_self = self.defining.is_some_and(|(name, _)| name == c);
                    if is_self || self.defs.contains(c) {
                        Ok(TypeTag::Syn)
                    } else {
                        Err(GlobalError::UnknownConstant(c.clone()))
                    }
                }
                b if b.is_polynomial() => Ok(TypeTag::Syn),
                _ => Err(type_error(e, "only polynomials and constants can be quoted")),
            },
            Expr::Eval(a, t) => {
                self.expect(a, TypeTag::Syn)?;
                Ok(*t)
            }
            Expr::NamedConst(c) => match self.defs.get(c) {
                Some((ty, _)) => Ok(ty),
                None => match self.defining {
                    Some((name, _)) if name == c => Err(GlobalError::IllegalReference {
                        name: name.clone(),
                        target: c.clone(),
                    }),
                    _ => Err(GlobalError::UnknownConstant(c.clone())),
                },
            },
            Expr::Not(a) => {
                self.expect(a, TypeTag::Bool)?;
                Ok(TypeTag::Bool)
            }
            Expr::SynEq(a, b) => {
                self.expect(a, TypeTag::Syn)?;
                self.expect(b, TypeTag::Syn)?;
                Ok(TypeTag::Bool)
            }
            Expr::Opd(a, b) => {
                self.expect(a, TypeTag::Syn)?;
                self.expect(b, TypeTag::Syn)?;
                Ok(TypeTag::Syn)
            }
        }
    }
}

/// The type of `e` under `defs`.
pub fn typecheck(e: &Expr, defs: &DefTable) -> Result<TypeTag, GlobalError> {
    Checker { defs, defining: None }.check(e)
}

#[derive(Clone, Copy)]
enum Arith {
    Add,
    Sub,
    Mul,
}

enum Task<'a> {
    Visit(&'a Expr),
    Arith(Arith),
    Pow(u32),
    Not,
    SynEq,
    Opd,
    Eval(TypeTag, &'a Expr),
}

struct Machine<'a, 'b> {
    env: &'b Assignment,
    defs: &'a DefTable,
    budget: &'b mut Budget,
    tasks: Vec<Task<'a>>,
    values: Vec<GlobalValue>,
}

impl<'a> Machine<'a, '_> {
    fn pop(&mut self) -> GlobalValue {
        self.values.pop().expect("operand pushed by an earlier task")
    }

    fn pop_real(&mut self) -> Rational {
        match self.pop() {
            GlobalValue::Real(r) => r,
            other => unreachable!("typechecked real operand, found {other}"),
        }
    }

    fn pop_syn(&mut self) -> GlobalSyn {
        match self.pop() {
            GlobalValue::Syn(s) => s,
            other => unreachable!("typechecked syntax operand, found {other}"),
        }
    }

    fn visit(&mut self, e: &'a Expr) -> Result<(), GlobalError> {
        match e {
            Expr::Var(v) => {
                let value = self.env.get(v).ok_or_else(|| GlobalError::UnboundVariable(v.clone()))?;
                self.values.push(GlobalValue::Real(value.clone()));
            }
            Expr::Const(c) => self.values.push(GlobalValue::Real(c.clone())),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => {
                let op = match e {
                    Expr::Add(..) => Arith::Add,
                    Expr::Sub(..) => Arith::Sub,
                    _ => Arith::Mul,
                };
                self.tasks.push(Task::Arith(op));
                self.tasks.push(Task::Visit(b));
                self.tasks.push(Task::Visit(a));
            }
            Expr::Pow(a, n) => {
                self.tasks.push(Task::Pow(*n));
                self.tasks.push(Task::Visit(a));
            }
            Expr::Quote(body) => {
                let syn = match body.as_ref() {
                    Expr::NamedConst(c) => GlobalSyn::Const(c.clone()),
                    b => GlobalSyn::Poly(quote_poly(b).map_err(|_| {
                        type_error(e, "only polynomials and constants can be quoted")
                    })?),
                };
                self.values.push(GlobalValue::Syn(syn));
            }
            Expr::Eval(a, t) => {
                self.tasks.push(Task::Eval(*t, e));
                self.tasks.push(Task::Visit(a));
            }
            Expr::NamedConst(c) => {
                let (_, body) = self.defs.get(c).ok_or_else(|| GlobalError::UnknownConstant(c.clone()))?;
                self.tasks.push(Task::Visit(body));
            }
            Expr::Not(a) => {
                self.tasks.push(Task::Not);
                self.tasks.push(Task::Visit(a));
            }
            Expr::SynEq(a, b) | Expr::Opd(a, b) => {
                self.tasks.push(if matches!(e, Expr::SynEq(..)) { Task::SynEq } else { Task::Opd });
                self.tasks.push(Task::Visit(b));
                self.tasks.push(Task::Visit(a));
            }
        }
        Ok(())
    }

    /// Unfolds `eval` on a syntax value: decode it and interpret the result.
    fn unfold(&mut self, ty: TypeTag, site: &Expr) -> Result<(), GlobalError> {
        let syn = self.pop_syn();
        self.budget.consume()?;
        match syn {
            GlobalSyn::Poly(s) => {
                if ty != TypeTag::Real {
                    return Err(type_error(site, format!("`{s}` denotes a real, not a {ty}")));
                }
                let value = eval_expr(&eval_syn(&s), self.env).map_err(|err| match err {
                    NfError::MissingVariable(v) => GlobalError::UnboundVariable(v),
                    other => unreachable!("decoded syntax values are polynomials: {other}"),
                })?;
                self.values.push(GlobalValue::Real(value));
            }
            GlobalSyn::Const(c) => {
                let (declared, body) =
                    self.defs.get(&c).ok_or_else(|| GlobalError::UnknownConstant(c.clone()))?;
                if declared != ty {
                    return Err(type_error(site, format!("`@{c}` has type {declared}, not {ty}")));
                }
                self.tasks.push(Task::Visit(body));
            }
        }
        Ok(())
    }

    fn run(mut self, root: &'a Expr) -> Result<GlobalValue, GlobalError> {
        self.tasks.push(Task::Visit(root));
        while let Some(task) = self.tasks.pop() {
            match task {
                Task::Visit(e) => self.visit(e)?,
                Task::Arith(op) => {
                    let b = self.pop_real();
                    let a = self.pop_real();
                    self.values.push(GlobalValue::Real(match op {
                        Arith::Add => &a + &b,
                        Arith::Sub => &a - &b,
                        Arith::Mul => &a * &b,
                    }));
                }
                Task::Pow(n) => {
                    let a = self.pop_real();
                    self.values.push(GlobalValue::Real(a.pow(n)));
                }
                Task::Not => match self.pop() {
                    GlobalValue::Bool(b) => self.values.push(GlobalValue::Bool(!b)),
                    other => unreachable!("typechecked boolean operand, found {other}"),
                },
                Task::SynEq => {
                    let b = self.pop_syn();
                    let a = self.pop_syn();
                    self.values.push(GlobalValue::Bool(a == b));
                }
                Task::Opd => {
                    let b = self.pop_syn();
                    let a = self.pop_syn();
                    let (GlobalSyn::Poly(a), GlobalSyn::Poly(b)) = (a, b) else {
                        return Err(GlobalError::Diff(DiffError::NotVarNode(
                            "differentiation operator needs polynomial syntax values".into(),
                        )));
                    };
                    let d = opd_apply(&a, &b)?;
                    self.values.push(GlobalValue::Syn(GlobalSyn::Poly(d)));
                }
                Task::Eval(ty, site) => self.unfold(ty, site)?,
            }
        }
        let value = self.pop();
        debug_assert!(self.values.is_empty());
        Ok(value)
    }
}

/// Typechecks and interprets `e`. The budget is charged one unit per `eval`
/// unfolding and reflects the unfoldings performed even when an error is
/// returned.
pub fn interpret(
    e: &Expr,
    env: &Assignment,
    defs: &DefTable,
    budget: &mut Budget,
) -> Result<GlobalValue, GlobalError> {
    let ty = typecheck(e, defs)?;
    let value = Machine { env, defs, budget, tasks: Vec::new(), values: Vec::new() }.run(e)?;
    debug_assert_eq!(value.type_tag(), ty);
    Ok(value)
}

// ---------------------------------------------------------------------------
// Demonstrations

fn serialize_pairs<S, V>(pairs: &[(String, V)], s: S) -> Result<S::Ok, S::Error>
where
    S: Serializer,
    V: Serialize,
{
    let mut map = s.serialize_map(Some(pairs.len()))?;
    for (k, v) in pairs {
        map.serialize_entry(k, v)?;
    }
    map.end()
}

/// Printable outcome of a demonstration.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DemoReport {
    pub demo: String,
    #[serde(serialize_with = "serialize_pairs")]
    pub verdicts: Vec<(String, bool)>,
    #[serde(serialize_with = "serialize_pairs")]
    pub depths: Vec<(String, u64)>,
    #[serde(serialize_with = "serialize_pairs")]
    pub values: Vec<(String, String)>,
    pub explanation: Vec<String>,
}

impl DemoReport {
    fn new(demo: &str) -> Self {
        DemoReport {
            demo: demo.into(),
            verdicts: Vec::new(),
            depths: Vec::new(),
            values: Vec::new(),
            explanation: Vec::new(),
        }
    }

    /// Labeled text block.
    pub fn to_text(&self) -> String {
        let mut out = format!("== demo {} ==\n", self.demo);
        for (k, v) in &self.values {
            out.push_str(&format!("{k}: {v}\n"));
        }
        for (k, v) in &self.depths {
            out.push_str(&format!("{k}: {v}\n"));
        }
        for (k, v) in &self.verdicts {
            out.push_str(&format!("{k}: {}\n", if *v { "yes" } else { "no" }));
        }
        for line in &self.explanation {
            out.push_str(&format!("| {line}\n"));
        }
        out
    }

    /// One-line JSON record.
    pub fn to_record(&self) -> String {
        serde_json::to_string(self).expect("demo reports serialize")
    }
}

pub fn liar_name() -> ConstName {
    ConstName::new("LIAR").expect("valid identifier")
}

/// `LIAR : bool := not(eval(quote(@LIAR) : bool))`, alone in a table.
pub fn liar_table() -> DefTable {
    let liar = liar_name();
    let body = Expr::not(Expr::eval(Expr::quote(Expr::NamedConst(liar.clone())), TypeTag::Bool));
    let mut defs = DefTable::new();
    defs.define(liar, TypeTag::Bool, body).expect("LIAR is well typed");
    defs
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiarDemo {
    pub budget: u64,
    /// `Some(depth)` when evaluation ran out of budget after `depth` unfoldings.
    pub exhausted_at: Option<u64>,
    /// Value of the control constant `C := eval(quote(x + 3) : real)` at x = 1.
    pub control: GlobalValue,
    pub control_unfoldings: u64,
}

impl LiarDemo {
    pub fn report(&self) -> DemoReport {
        let mut r = DemoReport::new("liar");
        r.values.push(("definition".into(), "@LIAR : bool := not(eval(quote(@LIAR) : bool))".into()));
        r.values.push((
            "outcome".into(),
            match self.exhausted_at {
                Some(depth) => format!("BudgetExhausted at depth {depth}"),
                None => "terminated".into(),
            },
        ));
        r.values.push(("control".into(), "@C : real := eval(quote(x + 3) : real) at x = 1".into()));
        r.values.push(("control value".into(), self.control.to_string()));
        r.depths.push(("budget".into(), self.budget));
        r.depths.push(("unfoldings".into(), self.exhausted_at.unwrap_or(0)));
        r.depths.push(("control unfoldings".into(), self.control_unfoldings));
        r.verdicts.push(("budget exhausted".into(), self.exhausted_at.is_some()));
        r.verdicts.push(("disquotation universal".into(), false));
        r.explanation.push("each unfolding of eval(quote(@LIAR) : bool) yields not(eval(quote(@LIAR) : bool)) again".into());
        r.explanation.push("so eval cannot be total on all expressions and eval(quote(e)) = e fails for e = @LIAR".into());
        r
    }
}

/// Evaluates the liar constant under `budget`, plus a non-self-referential
/// control constant.
pub fn demo_liar(budget: u64) -> LiarDemo {
    let defs = liar_table();
    let mut b = Budget::new(budget);
    let exhausted_at = match interpret(&Expr::NamedConst(liar_name()), &Assignment::new(), &defs, &mut b) {
        Err(GlobalError::BudgetExhausted { depth }) => Some(depth),
        Ok(_) => None,
        Err(other) => unreachable!("LIAR only fails by exhausting the budget: {other}"),
    };

    let mut control_defs = DefTable::new();
    let c = ConstName::new("C").expect("valid identifier");
    let x = VarName::new("x").expect("valid identifier");
    control_defs
        .define(
            c.clone(),
            TypeTag::Real,
            Expr::eval(Expr::quote(Expr::add(Expr::Var(x.clone()), Expr::constant(3))), TypeTag::Real),
        )
        .expect("control constant is well typed");
    let env: Assignment = [(x, Rational::from(1))].into_iter().collect();
    let mut cb = Budget::new(budget.max(1));
    let control = interpret(&Expr::NamedConst(c), &env, &control_defs, &mut cb)
        .expect("control constant evaluates");
    LiarDemo { budget, exhausted_at, control, control_unfoldings: cb.used() }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VariableDemo {
    pub free_vars_of_quote: BTreeSet<VarName>,
    pub free_vars_of_eval: BTreeSet<VarName>,
    /// `eval(quote(x + 3) : real)` at x = 2 and x = 7.
    pub eval_values: [Rational; 2],
    /// `quote(x + 3)` at x = 2 and x = 7.
    pub quote_values: [GlobalValue; 2],
}

impl VariableDemo {
    pub fn environment_sensitive(&self) -> bool {
        self.eval_values[0] != self.eval_values[1]
    }

    pub fn report(&self) -> DemoReport {
        let set = |s: &BTreeSet<VarName>| {
            let names: Vec<_> = s.iter().map(|v| v.to_string()).collect();
            format!("{{{}}}", names.join(", "))
        };
        let mut r = DemoReport::new("variable-problem");
        r.values.push(("free_vars(quote(x + 3))".into(), set(&self.free_vars_of_quote)));
        r.values.push(("free_vars(eval(quote(x + 3) : real))".into(), set(&self.free_vars_of_eval)));
        r.values.push(("eval(quote(x + 3) : real) at x = 2".into(), self.eval_values[0].to_string()));
        r.values.push(("eval(quote(x + 3) : real) at x = 7".into(), self.eval_values[1].to_string()));
        r.values.push(("quote(x + 3) at x = 2".into(), self.quote_values[0].to_string()));
        r.values.push(("quote(x + 3) at x = 7".into(), self.quote_values[1].to_string()));
        r.verdicts.push(("x syntactically free in quote(x + 3)".into(), !self.free_vars_of_quote.is_empty()));
        r.verdicts.push(("eval value depends on x".into(), self.environment_sensitive()));
        r.verdicts.push(("quotation value depends on x".into(), self.quote_values[0] != self.quote_values[1]));
        r.explanation.push("x is not free in quote(x + 3), yet eval(quote(x + 3) : real) = x + 3 depends on x".into());
        r.explanation.push("syntactic and semantic freeness diverge once expressions contain eval".into());
        r
    }
}

pub fn demo_variable_problem() -> VariableDemo {
    let x = VarName::new("x").expect("valid identifier");
    let quoted = Expr::quote(Expr::add(Expr::Var(x.clone()), Expr::constant(3)));
    let evaluated = Expr::eval(quoted.clone(), TypeTag::Real);
    let defs = DefTable::new();
    let run = |e: &Expr, at: i64| {
        let env: Assignment = [(x.clone(), Rational::from(at))].into_iter().collect();
        interpret(e, &env, &defs, &mut Budget::default()).expect("closed demo expressions evaluate")
    };
    let real = |v: GlobalValue| match v {
        GlobalValue::Real(r) => r,
        other => unreachable!("eval at real yields a real, found {other}"),
    };
    VariableDemo {
        free_vars_of_quote: quoted.free_vars(),
        free_vars_of_eval: evaluated.free_vars(),
        eval_values: [real(run(&evaluated, 2)), real(run(&evaluated, 7))],
        quote_values: [run(&quoted, 2), run(&quoted, 7)],
    }
}

/// The syntax values of all constants of `defs`, computed by interpreting
/// `quote(@c)` for each constant `c`.
pub fn constant_quotations(defs: &DefTable) -> BTreeSet<GlobalSyn> {
    defs.names()
        .map(|c| {
            let quoted = Expr::quote(Expr::NamedConst(c.clone()));
            match interpret(&quoted, &Assignment::new(), defs, &mut Budget::new(0)) {
                Ok(GlobalValue::Syn(s)) => s,
                other => unreachable!("quotation of a defined constant: {other:?}"),
            }
        })
        .collect()
}

/// The sentence "the quotations of constants are exactly `enumeration`".
pub fn enumeration_holds(enumeration: &BTreeSet<GlobalSyn>, defs: &DefTable) -> bool {
    constant_quotations(defs) == *enumeration
}

#[derive(Clone, Debug)]
pub struct ExtensionDemo {
    pub enumeration: BTreeSet<GlobalSyn>,
    pub holds_before: bool,
    pub added: ConstName,
    pub holds_after: bool,
}

impl ExtensionDemo {
    pub fn report(&self) -> DemoReport {
        let listed: Vec<String> = self.enumeration.iter().map(|s| s.to_string()).collect();
        let mut r = DemoReport::new("extension-problem");
        r.values.push(("enumeration".into(), format!("{{{}}}", listed.join(", "))));
        r.values.push(("added constant".into(), format!("@{}", self.added)));
        r.values.push((
            "summary".into(),
            format!(
                "{} before extension; {} after",
                if self.holds_before { "holds" } else { "fails" },
                if self.holds_after { "holds" } else { "fails" }
            ),
        ));
        r.verdicts.push(("holds before extension".into(), self.holds_before));
        r.verdicts.push(("holds after extension".into(), self.holds_after));
        r.explanation.push("the sentence lists the quotations of all constants, which is true of the original table".into());
        r.explanation.push("adding one definition makes it false, so the extension is not conservative".into());
        r
    }
}

/// Freezes the constant enumeration of `defs`, then extends `defs` with a
/// fresh constant and re-checks the enumeration sentence.
pub fn demo_extension_problem(defs: &DefTable) -> ExtensionDemo {
    let enumeration = constant_quotations(defs);
    let holds_before = enumeration_holds(&enumeration, defs);
    let added = (1..)
        .map(|i| ConstName::new(format!("c{i}")).expect("valid identifier"))
        .find(|c| !defs.contains(c))
        .expect("unbounded candidate stream");
    let mut extended = defs.clone();
    extended
        .define(added.clone(), TypeTag::Real, Expr::constant(0))
        .expect("fresh constant");
    let holds_after = enumeration_holds(&enumeration, &extended);
    ExtensionDemo { enumeration, holds_before, added, holds_after }
}
