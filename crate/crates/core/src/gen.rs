//! Seeded random polynomials and syntax values for the checkers.
//!
//! Sample `i` of a run with seed `s` is drawn from its own ChaCha stream
//! `(s, i)`, so a sample never depends on how many others were drawn before
//! it or on which worker drew it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::expr::{Expr, VarName};
use crate::rational::Rational;
use crate::syntax::SynValue;

#[derive(Clone, Debug)]
pub struct GenConfig {
    pub max_depth: u32,
    pub vars: Vec<VarName>,
    /// Bound on numerator and denominator magnitude of constants.
    pub max_const: i64,
    pub max_exponent: u32,
    /// Bound on the total degree of generated polynomials; keeps normal
    /// forms small when powers nest.
    pub max_degree: u32,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            max_depth: 8,
            vars: ["x", "y", "z", "w"]
                .into_iter()
                .map(|v| VarName::new(v).expect("valid identifier"))
                .collect(),
            max_const: 100,
            max_exponent: 6,
            max_degree: 16,
        }
    }
}

/// The random stream for sample `index` under `seed`.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Node constructors shared by the expression and syntax-value generators.
pub trait TreeBuilder {
    type Node;
    fn var(&self, v: VarName) -> Self::Node;
    fn con(&self, c: Rational) -> Self::Node;
    fn add(&self, a: Self::Node, b: Self::Node) -> Self::Node;
    fn sub(&self, a: Self::Node, b: Self::Node) -> Self::Node;
    fn mul(&self, a: Self::Node, b: Self::Node) -> Self::Node;
    fn pow(&self, a: Self::Node, n: u32) -> Self::Node;
}

pub struct ExprBuilder;

impl TreeBuilder for ExprBuilder {
    type Node = Expr;
    fn var(&self, v: VarName) -> Expr {
        Expr::Var(v)
    }
    fn con(&self, c: Rational) -> Expr {
        Expr::Const(c)
    }
    fn add(&self, a: Expr, b: Expr) -> Expr {
        Expr::add(a, b)
    }
    fn sub(&self, a: Expr, b: Expr) -> Expr {
        Expr::sub(a, b)
    }
    fn mul(&self, a: Expr, b: Expr) -> Expr {
        Expr::mul(a, b)
    }
    fn pow(&self, a: Expr, n: u32) -> Expr {
        Expr::pow(a, n)
    }
}

pub struct SynBuilder;

impl TreeBuilder for SynBuilder {
    type Node = SynValue;
    fn var(&self, v: VarName) -> SynValue {
        SynValue::Var(v)
    }
    fn con(&self, c: Rational) -> SynValue {
        SynValue::Con(c)
    }
    fn add(&self, a: SynValue, b: SynValue) -> SynValue {
        SynValue::plus(a, b)
    }
    fn sub(&self, a: SynValue, b: SynValue) -> SynValue {
        SynValue::minus(a, b)
    }
    fn mul(&self, a: SynValue, b: SynValue) -> SynValue {
        SynValue::times(a, b)
    }
    fn pow(&self, a: SynValue, n: u32) -> SynValue {
        SynValue::power(a, n)
    }
}

fn gen_const<R: Rng>(cfg: &GenConfig, rng: &mut R) -> Rational {
    let bound = cfg.max_const;
    match rng.random_range(0..4) {
        // 0 and 1 are what the simplification rules look for
        0 => Rational::from(rng.random_range(0..=1)),
        1 => Rational::from(rng.random_range(-bound..=bound)),
        _ => Rational::new(rng.random_range(-bound..=bound), rng.random_range(1..=bound))
            .expect("nonzero denominator"),
    }
}

pub fn gen_var<R: Rng>(cfg: &GenConfig, rng: &mut R) -> VarName {
    cfg.vars[rng.random_range(0..cfg.vars.len())].clone()
}

/// A random tree. Below the depth limit each of the six constructors is
/// picked with probability 1/6; at the limit only leaves are produced.
pub fn gen_tree<B: TreeBuilder, R: Rng>(b: &B, cfg: &GenConfig, rng: &mut R) -> B::Node {
    gen_node(b, cfg, rng, 0, cfg.max_degree)
}

fn gen_node<B: TreeBuilder, R: Rng>(
    b: &B,
    cfg: &GenConfig,
    rng: &mut R,
    depth: u32,
    degree: u32,
) -> B::Node {
    let choice = if depth >= cfg.max_depth {
        rng.random_range(0..2)
    } else {
        rng.random_range(0..6)
    };
    match choice {
        0 if degree > 0 && !cfg.vars.is_empty() => b.var(gen_var(cfg, rng)),
        0 | 1 => b.con(gen_const(cfg, rng)),
        2 | 3 => {
            let l = gen_node(b, cfg, rng, depth + 1, degree);
            let r = gen_node(b, cfg, rng, depth + 1, degree);
            if choice == 2 {
                b.add(l, r)
            } else {
                b.sub(l, r)
            }
        }
        4 => {
            let l = gen_node(b, cfg, rng, depth + 1, degree / 2);
            let r = gen_node(b, cfg, rng, depth + 1, degree / 2);
            b.mul(l, r)
        }
        _ => {
            let n = rng.random_range(0..=cfg.max_exponent);
            let inner = gen_node(b, cfg, rng, depth + 1, degree.checked_div(n).unwrap_or(degree));
            b.pow(inner, n)
        }
    }
}

pub fn gen_expr<R: Rng>(cfg: &GenConfig, rng: &mut R) -> Expr {
    gen_tree(&ExprBuilder, cfg, rng)
}

pub fn gen_synvalue<R: Rng>(cfg: &GenConfig, rng: &mut R) -> SynValue {
    gen_tree(&SynBuilder, cfg, rng)
}

/// Sample `index` of the polynomial stream for `seed`.
pub fn sample_expr(cfg: &GenConfig, seed: u64, index: u64) -> Expr {
    gen_expr(cfg, &mut sample_rng(seed, index))
}
