//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::process::{Command, ExitCode, Output};
use std::time::{Duration, Instant};

use synframe::framework::{
    check_comp_behavior, check_disquotation, check_evaluation_axiom, check_math_meaning,
    check_oracle_agreement, check_quotation_axiom, mutants, FrameworkInstance,
};
use synframe::global::{demo_extension_problem, demo_liar, demo_variable_problem, DefTable, GlobalValue};
use synframe::{nf_equal, parse_expr, to_nf, ConstName, Expr, Rational, TypeTag};

const SAMPLES: usize = 1000;
const SEED: u64 = 0;

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_synframe")).args(args).output().expect("binary runs")
}

fn within(limit: Duration, start: Instant) -> Result<(), String> {
    let took = start.elapsed();
    if took <= limit {
        Ok(())
    } else {
        Err(format!("took {took:?}, limit {limit:?}"))
    }
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn worked_example() -> Result<(), String> {
    let start = Instant::now();
    let o = cli(&["diff", "x*(x^2+y)", "--var", "x"]);
    ensure(o.status.success(), "diff exited nonzero")?;
    let printed = String::from_utf8_lossy(&o.stdout).trim().to_string();
    let got = parse_expr(&printed).map_err(|e| e.to_string())?;
    let want = parse_expr("3*x^2 + y").unwrap();
    ensure(
        nf_equal(&to_nf(&got).unwrap(), &to_nf(&want).unwrap()),
        format!("result {printed} is not 3*x^2 + y"),
    )?;

    let o = cli(&["--format", "structured", "diff", "x*(x^2+y)", "--var", "x", "--trace"]);
    ensure(o.status.success(), "traced diff exited nonzero")?;
    let text = String::from_utf8_lossy(&o.stdout).to_string();
    let rules: Vec<String> = text
        .lines()
        .filter_map(|l| serde_json::from_str::<serde_json::Value>(l).ok())
        .filter_map(|v| v["rule"].as_str().map(str::to_string))
        .collect();
    ensure(rules.first().map(String::as_str) == Some("ProductRule"), "first step is not ProductRule")?;
    let diff_rules = ["ProductRule", "VariableRule", "SumDiffRule", "PowerRulePos", "PowerRuleZero", "ConstantRule"];
    let mut seen: Vec<&str> = rules.iter().map(String::as_str).filter(|r| diff_rules.contains(r)).collect();
    seen.sort_unstable();
    let mut expected = vec!["ProductRule", "VariableRule", "VariableRule", "SumDiffRule", "PowerRulePos", "ConstantRule"];
    expected.sort_unstable();
    ensure(seen == expected, format!("differentiation rules {seen:?}"))?;
    ensure(
        rules.iter().all(|r| diff_rules.contains(&r.as_str()) || r.starts_with("Simplify") || r == "CollectLikeTerms"),
        "unexpected rule in trace",
    )?;
    within(Duration::from_secs(1), start)
}

fn disquotation() -> Result<(), String> {
    let start = Instant::now();
    let f = FrameworkInstance::local();
    ensure(f.gen.max_depth <= 8, "generator depth above 8")?;
    let r = check_disquotation(&f, SAMPLES, SEED).unwrap();
    ensure(r.passed() && r.checked == SAMPLES, r.to_text())?;
    within(Duration::from_secs(5), start)
}

fn axioms() -> Result<(), String> {
    let start = Instant::now();
    let f = FrameworkInstance::local();
    let q = check_quotation_axiom(&f, SAMPLES, SEED).unwrap();
    ensure(q.passed() && q.checked == SAMPLES, q.to_text())?;
    let e = check_evaluation_axiom(&f, SAMPLES, SEED).unwrap();
    ensure(e.passed() && e.checked == SAMPLES && e.skipped == 0, e.to_text())?;
    let qm = check_quotation_axiom(&mutants::local_with_swapped_plus(), SAMPLES, SEED).unwrap();
    ensure(!qm.passed(), "swapped-plus quotation mutant survived")?;
    ensure(qm.failures.iter().any(|c| c.input.contains('+')), "mutant counterexample lacks an addition")?;
    let em = check_evaluation_axiom(&mutants::local_with_zero_eval(), SAMPLES, SEED).unwrap();
    ensure(!em.passed(), "zero evaluation mutant survived")?;
    within(Duration::from_secs(10), start)
}

fn comp_behavior() -> Result<(), String> {
    let r = check_comp_behavior(SAMPLES, SEED).unwrap();
    ensure(r.passed() && r.checked == SAMPLES, r.to_text())
}

fn math_meaning() -> Result<(), String> {
    let r = check_math_meaning(SAMPLES, SEED).unwrap();
    ensure(r.passed() && r.checked == SAMPLES, r.to_text())
}

fn oracle_independence() -> Result<(), String> {
    let r = check_oracle_agreement(SAMPLES, SEED).unwrap();
    ensure(r.passed() && r.checked == SAMPLES, r.to_text())
}

fn evaluation_problem() -> Result<(), String> {
    for b in [1, 100, 10_000] {
        let d = demo_liar(b);
        ensure(d.exhausted_at == Some(b), format!("budget {b}: {:?}", d.exhausted_at))?;
        ensure(d.control == GlobalValue::Real(Rational::from(4)), format!("control value {}", d.control))?;
    }
    let o = cli(&["demo", "liar", "--budget", "100"]);
    ensure(
        String::from_utf8_lossy(&o.stdout).contains("BudgetExhausted at depth 100"),
        "CLI report lacks the exhaustion depth",
    )
}

fn variable_problem() -> Result<(), String> {
    let d = demo_variable_problem();
    ensure(d.free_vars_of_quote.is_empty(), "quotation has free variables")?;
    ensure(d.eval_values == [Rational::from(5), Rational::from(10)], format!("{:?}", d.eval_values))
}

fn extension_problem() -> Result<(), String> {
    let mut defs = DefTable::new();
    defs.define(ConstName::new("c1").unwrap(), TypeTag::Real, Expr::constant(1)).unwrap();
    let d = demo_extension_problem(&defs);
    ensure(d.holds_before, "enumeration fails before extension")?;
    ensure(!d.holds_after, "enumeration still holds after extension")?;
    ensure(d.added.as_str() == "c2", format!("added {}", d.added))
}

fn determinism() -> Result<(), String> {
    let args = ["check", "all", "--samples", "1000", "--seed", "0"];
    let a = cli(&args);
    let b = cli(&args);
    ensure(a.status.success(), "check all failed")?;
    ensure(a.stdout == b.stdout && a.stderr == b.stderr, "outputs differ between runs")
}

type Criterion = fn() -> Result<(), String>;

fn main() -> ExitCode {
    let criteria: [(&str, Criterion); 10] = [
        ("1 worked example", worked_example),
        ("2 disquotation law", disquotation),
        ("3 quotation and evaluation axioms", axioms),
        ("4 comp-behavior", comp_behavior),
        ("5 math-meaning", math_meaning),
        ("6 oracle independence", oracle_independence),
        ("7 evaluation problem", evaluation_problem),
        ("8 variable problem", variable_problem),
        ("9 extension problem", extension_problem),
        ("10 determinism", determinism),
    ];
    let mut failed = 0;
    for (name, criterion) in criteria {
        let start = Instant::now();
        match criterion() {
            Ok(()) => println!("PASS criterion {name} ({:.2?})", start.elapsed()),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {name}: {why}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
