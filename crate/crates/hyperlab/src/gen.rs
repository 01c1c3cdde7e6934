//! Seeded random programs, spaces and triples for the property suites.

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::lang::{AExpr, BExpr, CmpOp, Stmt};
use crate::rel_domain::{Arith, Rel, SemTriple, StateSet, StateSpace};

pub type Rng8 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng8 {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Clone, Debug)]
pub struct GenConfig {
    pub max_depth: usize,
    pub vars: Vec<String>,
    pub lo: i64,
    pub hi: i64,
    pub loops: bool,
    pub breaks: bool,
}

impl GenConfig {
    pub fn for_space(space: &StateSpace, max_depth: usize) -> Self {
        let (lo, hi) = space.bounds(0);
        GenConfig {
            max_depth,
            vars: space.vars().to_vec(),
            lo,
            hi,
            loops: true,
            breaks: true,
        }
    }
}

/// One or two variables, at most five values each, mostly saturating.
pub fn random_space(r: &mut Rng8) -> StateSpace {
    let names: &[&str] = if r.gen_bool(0.5) { &["x"] } else { &["x", "y"] };
    let width = r.gen_range(2..=5);
    let lo = r.gen_range(-2..=0);
    let arith = match r.gen_range(0..10) {
        0 => Arith::Wrap,
        1 => Arith::Prune,
        _ => Arith::Saturate,
    };
    StateSpace::uniform(names, lo, lo + width - 1)
        .expect("small space")
        .with_arith(arith)
}

fn var(r: &mut Rng8, cfg: &GenConfig) -> String {
    cfg.vars.choose(r).expect("variables").clone()
}

fn constant(r: &mut Rng8, cfg: &GenConfig) -> i64 {
    r.gen_range(cfg.lo - 1..=cfg.hi + 1)
}

pub fn random_aexpr(r: &mut Rng8, cfg: &GenConfig) -> AExpr {
    let v = AExpr::Var(var(r, cfg));
    let k = AExpr::Const(r.gen_range(1..=2));
    match r.gen_range(0..8) {
        0 => AExpr::Const(constant(r, cfg)),
        1 => v,
        2 | 3 => AExpr::Add(Box::new(v), Box::new(k)),
        4 | 5 => AExpr::Sub(Box::new(v), Box::new(k)),
        6 => AExpr::Mul(Box::new(v), Box::new(AExpr::Const(r.gen_range(-1..=2)))),
        _ => AExpr::Add(Box::new(v), Box::new(AExpr::Var(var(r, cfg)))),
    }
}

pub fn random_bexpr(r: &mut Rng8, cfg: &GenConfig) -> BExpr {
    let ops = [
        CmpOp::Eq,
        CmpOp::Ne,
        CmpOp::Lt,
        CmpOp::Le,
        CmpOp::Gt,
        CmpOp::Ge,
    ];
    let cmp = |r: &mut Rng8| {
        BExpr::Cmp(
            *ops.choose(r).expect("ops"),
            AExpr::Var(var(r, cfg)),
            AExpr::Const(constant(r, cfg)),
        )
    };
    match r.gen_range(0..10) {
        0 => cmp(r).not(),
        1 => BExpr::And(Box::new(cmp(r)), Box::new(cmp(r))),
        2 => BExpr::Or(Box::new(cmp(r)), Box::new(cmp(r))),
        _ => cmp(r),
    }
}

fn random_leaf(r: &mut Rng8, cfg: &GenConfig, in_loop: bool) -> Stmt {
    match r.gen_range(0..10) {
        0 => Stmt::Skip,
        1 if in_loop && cfg.breaks => Stmt::Break,
        2 => {
            let a = r.gen_range(cfg.lo..=cfg.hi);
            let b = r.gen_range(a..=cfg.hi);
            let lo = if r.gen_bool(0.2) { None } else { Some(a) };
            let hi = if r.gen_bool(0.2) { None } else { Some(b) };
            Stmt::RandAssign(var(r, cfg), lo, hi)
        }
        _ => Stmt::Assign(var(r, cfg), random_aexpr(r, cfg)),
    }
}

fn random_stmt(r: &mut Rng8, cfg: &GenConfig, depth: usize, in_loop: bool) -> Stmt {
    if depth <= 1 || r.gen_bool(0.25) {
        return random_leaf(r, cfg, in_loop);
    }
    let d = depth - 1;
    match r.gen_range(0..10) {
        0..=3 => Stmt::seq(
            random_stmt(r, cfg, d, in_loop),
            random_stmt(r, cfg, d, in_loop),
        ),
        4..=6 => Stmt::if_(
            random_bexpr(r, cfg),
            random_stmt(r, cfg, d, in_loop),
            random_stmt(r, cfg, d, in_loop),
        ),
        _ if cfg.loops => Stmt::while_(random_bexpr(r, cfg), random_stmt(r, cfg, d, true)),
        _ => random_leaf(r, cfg, in_loop),
    }
}

/// A well-formed program of depth at most `cfg.max_depth`.
pub fn random_program(r: &mut Rng8, cfg: &GenConfig) -> Stmt {
    random_stmt(r, cfg, cfg.max_depth, false)
}

/// A `while` loop at the root.
pub fn random_loop(r: &mut Rng8, cfg: &GenConfig) -> (BExpr, Stmt) {
    let depth = cfg.max_depth.saturating_sub(1).max(1);
    (random_bexpr(r, cfg), random_stmt(r, cfg, depth, true))
}

/// `count` programs, each with its own random space.
pub fn program_suite(seed: u64, count: usize, max_depth: usize) -> Vec<(Stmt, StateSpace)> {
    let mut r = rng(seed);
    (0..count)
        .map(|_| {
            let sp = random_space(&mut r);
            let s = random_program(&mut r, &GenConfig::for_space(&sp, max_depth));
            (s, sp)
        })
        .collect()
}

/// `count` root loops, each with its own random space.
pub fn loop_suite(seed: u64, count: usize, max_depth: usize) -> Vec<(Stmt, StateSpace)> {
    let mut r = rng(seed);
    (0..count)
        .map(|_| {
            let sp = random_space(&mut r);
            let (b, body) = random_loop(&mut r, &GenConfig::for_space(&sp, max_depth));
            (Stmt::while_(b, body), sp)
        })
        .collect()
}

pub fn random_rel(r: &mut Rng8, n: usize, density: f64) -> Rel {
    Rel::from_pairs(
        n,
        (0..n * n)
            .filter(|_| r.gen_bool(density))
            .map(|i| (i / n, i % n)),
    )
}

pub fn random_stateset(r: &mut Rng8, n: usize, density: f64) -> StateSet {
    StateSet::from_iter(n, (0..n).filter(|_| r.gen_bool(density)))
}

/// A random triple with sparse components.
pub fn random_triple(r: &mut Rng8, n: usize) -> SemTriple {
    let d = 1.5 / n as f64;
    SemTriple {
        e: random_rel(r, n, d.min(0.5)),
        inf: random_stateset(r, n, 0.2),
        br: random_rel(r, n, (d / 2.0).min(0.3)),
    }
}

/// A random precondition set of `k` triples.
pub fn random_hyperset(r: &mut Rng8, n: usize, k: usize) -> Vec<SemTriple> {
    (0..k).map(|_| random_triple(r, n)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_are_deterministic_and_well_formed() {
        let a = program_suite(7, 50, 4);
        let b = program_suite(7, 50, 4);
        assert_eq!(a, b);
        for (s, sp) in &a {
            assert!(s.validate_breaks().is_ok());
            assert!(s.depth() <= 4);
            assert!(sp.vars().len() <= 2 && sp.bounds(0).1 - sp.bounds(0).0 < 5);
            assert!(sp.check_bound(s).is_ok());
        }
    }
}
