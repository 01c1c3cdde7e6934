//! Finite laboratory for hyper semantics of a small while language: a
//! relational semantics with break and nontermination, a trace semantics,
//! collecting transformers, a hyperlogic checker and a toolbox of
//! abstractions over finite lattices.

pub mod abstractions;
pub mod cli;
pub mod corpus;
pub mod error;
pub mod gen;
pub mod hyperlogic;
pub mod interpreter;
pub mod lang;
pub mod order;
pub mod rel_domain;
pub mod report;
pub mod selftest;
pub mod trace_domain;
pub mod transformers;

pub use error::Error;
pub use lang::{parse, AExpr, BExpr, CmpOp, Stmt};
pub use rel_domain::{Arith, Rel, SemTriple, StateSet, StateSpace};
