//! `synframe`: differentiate polynomials, quote and evaluate syntax values,
//! run the framework checks and the global-mode demonstrations.
//!
//! Exit codes: 0 success, 1 a check failed, 2 usage or parse error.

use std::fs;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use synframe::framework::{
    check_comp_behavior, check_disquotation, check_evaluation_axiom, check_math_meaning,
    check_quotation_axiom, CheckError, CheckReport, FrameworkInstance,
};
use synframe::global::{
    demo_extension_problem, demo_liar, demo_variable_problem, DefTable, DemoReport, DEFAULT_BUDGET,
};
use synframe::parser::parse_corpus;
use synframe::{eval_syn, parse_expr, parse_synvalue, poly_diff, quote_poly, ConstName, Expr, ParseError, TypeTag, VarName};

#[derive(Parser)]
#[command(name = "synframe", version, about = "Quotation, evaluation and symbolic differentiation of polynomials")]
struct Cli {
    /// Output format: labeled text or one JSON record per line.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Structured,
}

#[derive(Subcommand)]
enum Command {
    /// Differentiate a polynomial.
    Diff {
        /// Polynomial to differentiate; omit when using --file.
        expr: Option<String>,
        /// Differentiation variable.
        #[arg(long = "var")]
        var: String,
        /// Print every rewrite step.
        #[arg(long)]
        trace: bool,
        /// Differentiate each expression of a corpus file.
        #[arg(long, conflicts_with = "expr")]
        file: Option<String>,
    },
    /// Print the syntax value of a polynomial.
    Quote { expr: String },
    /// Print the polynomial a syntax value represents.
    EvalSyn { synvalue: String },
    /// Run framework checks over seeded samples.
    Check {
        #[arg(value_enum)]
        which: Which,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run a global-mode demonstration.
    Demo {
        #[arg(value_enum)]
        which: Demo,
        /// Eval unfoldings allowed.
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Which {
    QuotationAxiom,
    EvaluationAxiom,
    Disquotation,
    CompBehavior,
    MathMeaning,
    All,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Demo {
    Liar,
    VariableProblem,
    ExtensionProblem,
}

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;

struct Out {
    format: Format,
}

impl Out {
    fn error(&self, message: &str, detail: serde_json::Value) -> ExitCode {
        eprintln!("error: {message}");
        if self.format == Format::Structured {
            let mut record = json!({ "error": message.lines().next().unwrap_or("") });
            if let (Some(r), Some(d)) = (record.as_object_mut(), detail.as_object()) {
                r.extend(d.clone());
            }
            println!("{record}");
        }
        ExitCode::from(EXIT_USAGE)
    }

    fn parse_error(&self, input: &str, err: &ParseError) -> ExitCode {
        self.error(&err.render(input), json!({ "input": input, "offset": err.span.start }))
    }
}

fn parse_var(out: &Out, name: &str) -> Result<VarName, ExitCode> {
    VarName::new(name).map_err(|e| out.error(&e.to_string(), json!({ "input": name })))
}

fn diff_one(out: &Out, source: &str, x: &VarName, trace: bool) -> Result<(), ExitCode> {
    let u = parse_expr(source).map_err(|e| out.parse_error(source, &e))?;
    let result = poly_diff(&u, x).map_err(|e| out.error(&e.to_string(), json!({ "input": source })))?;
    if trace {
        for (i, step) in result.trace.iter().enumerate() {
            match out.format {
                Format::Text => println!("({}) {step}", i + 1),
                Format::Structured => println!("{}", step.to_record()),
            }
        }
    }
    match out.format {
        Format::Text => println!("{}", result.result),
        Format::Structured => println!(
            "{}",
            json!({ "input": source, "var": x.as_str(), "result": result.result.to_string() })
        ),
    }
    Ok(())
}

fn cmd_diff(out: &Out, expr: Option<String>, var: &str, trace: bool, file: Option<String>) -> ExitCode {
    let x = match parse_var(out, var) {
        Ok(x) => x,
        Err(code) => return code,
    };
    match (expr, file) {
        (Some(source), None) => match diff_one(out, &source, &x, trace) {
            Ok(()) => ExitCode::SUCCESS,
            Err(code) => code,
        },
        (None, Some(path)) => {
            let text = match fs::read_to_string(&path) {
                Ok(t) => t,
                Err(e) => return out.error(&format!("cannot read {path}: {e}"), json!({ "file": path })),
            };
            let mut failed = false;
            for entry in parse_corpus(&text) {
                if out.format == Format::Text && trace {
                    println!("# line {}: {}", entry.line, entry.source);
                }
                failed |= diff_one(out, &entry.source, &x, trace).is_err();
            }
            if failed {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            }
        }
        _ => out.error("diff needs an expression or --file", json!({})),
    }
}

fn cmd_quote(out: &Out, source: &str) -> ExitCode {
    let u = match parse_expr(source) {
        Ok(u) => u,
        Err(e) => return out.parse_error(source, &e),
    };
    match quote_poly(&u) {
        Ok(s) => {
            match out.format {
                Format::Text => println!("{s}"),
                Format::Structured => println!("{}", json!({ "input": source, "synvalue": s.to_string() })),
            }
            ExitCode::SUCCESS
        }
        Err(e) => out.error(&e.to_string(), json!({ "input": source })),
    }
}

fn cmd_eval_syn(out: &Out, source: &str) -> ExitCode {
    match parse_synvalue(source) {
        Ok(s) => {
            let e = eval_syn(&s);
            match out.format {
                Format::Text => println!("{e}"),
                Format::Structured => println!("{}", json!({ "input": source, "expr": e.to_string() })),
            }
            ExitCode::SUCCESS
        }
        Err(e) => out.parse_error(source, &e),
    }
}

fn cmd_check(out: &Out, which: Which, samples: usize, seed: u64) -> ExitCode {
    let local = FrameworkInstance::local();
    let run = |w: Which| -> Result<CheckReport, CheckError> {
        match w {
            Which::QuotationAxiom => check_quotation_axiom(&local, samples, seed),
            Which::EvaluationAxiom => check_evaluation_axiom(&local, samples, seed),
            Which::Disquotation => check_disquotation(&local, samples, seed),
            Which::CompBehavior => check_comp_behavior(samples, seed),
            Which::MathMeaning => check_math_meaning(samples, seed),
            Which::All => unreachable!("expanded below"),
        }
    };
    let selected = match which {
        Which::All => vec![
            Which::QuotationAxiom,
            Which::EvaluationAxiom,
            Which::Disquotation,
            Which::CompBehavior,
            Which::MathMeaning,
        ],
        w => vec![w],
    };
    let mut failed = 0;
    for (i, w) in selected.iter().enumerate() {
        let report = match run(*w) {
            Ok(r) => r,
            Err(e) => return out.error(&e.to_string(), json!({ "samples": samples })),
        };
        if !report.passed() {
            failed += 1;
        }
        match out.format {
            Format::Text => {
                if i > 0 {
                    println!();
                }
                print!("{}", report.to_text());
            }
            Format::Structured => println!("{}", report.to_record()),
        }
    }
    if out.format == Format::Text && selected.len() > 1 {
        println!();
        println!("summary: {} of {} checks passed", selected.len() - failed, selected.len());
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_CHECK_FAILED)
    }
}

fn default_extension_defs() -> DefTable {
    let mut defs = DefTable::new();
    defs.define(ConstName::new("c1").expect("valid identifier"), TypeTag::Real, Expr::constant(1))
        .expect("well typed");
    defs
}

fn cmd_demo(out: &Out, which: Demo, budget: u64) -> ExitCode {
    let report: DemoReport = match which {
        Demo::Liar => demo_liar(budget).report(),
        Demo::VariableProblem => demo_variable_problem().report(),
        Demo::ExtensionProblem => demo_extension_problem(&default_extension_defs()).report(),
    };
    match out.format {
        Format::Text => print!("{}", report.to_text()),
        Format::Structured => println!("{}", report.to_record()),
    }
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = Out { format: cli.format };
    match cli.command {
        Command::Diff { expr, var, trace, file } => cmd_diff(&out, expr, &var, trace, file),
        Command::Quote { expr } => cmd_quote(&out, &expr),
        Command::EvalSyn { synvalue } => cmd_eval_syn(&out, &synvalue),
        Command::Check { which, samples, seed } => cmd_check(&out, which, samples, seed),
        Command::Demo { which, budget } => cmd_demo(&out, which, budget),
    }
}
