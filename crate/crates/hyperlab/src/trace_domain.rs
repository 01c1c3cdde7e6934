//! Bounded finite-trace semantics and its abstraction onto relations.
//!
//! Infinite traces are not materialized: only their start states are kept,
//! taken from the relational semantics.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::interpreter::sem;
use crate::lang::{BExpr, Stmt};
use crate::rel_domain::{Rel, SemTriple, StateSet, StateSpace};

pub type Trace = Vec<usize>;

/// Default bound on the number of traces kept in one set.
pub const DEFAULT_BUDGET: usize = 200_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceSet {
    /// Traces ending normally.
    pub ok: BTreeSet<Trace>,
    /// Traces ending with `break`.
    pub br: BTreeSet<Trace>,
    pub div_starts: StateSet,
    /// Some trace longer than the bound (or beyond the budget) was dropped.
    pub truncated: bool,
}

struct Ctx<'a> {
    space: &'a StateSpace,
    max_len: usize,
    budget: usize,
    truncated: bool,
}

/// Finite part of a semantics: normal and break traces.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
struct Part {
    ok: BTreeSet<Trace>,
    br: BTreeSet<Trace>,
}

impl Ctx<'_> {
    /// `{πσπ' | πσ ∈ a, σπ' ∈ b}` keeping only traces within the bound.
    fn concat(&mut self, a: &BTreeSet<Trace>, b: &BTreeSet<Trace>) -> BTreeSet<Trace> {
        let mut by_first: BTreeMap<usize, Vec<&Trace>> = BTreeMap::new();
        for t in b {
            by_first.entry(t[0]).or_default().push(t);
        }
        let mut out = BTreeSet::new();
        for t in a {
            let Some(nexts) = by_first.get(t.last().expect("non-empty trace")) else {
                continue;
            };
            for u in nexts {
                if t.len() + u.len() - 1 > self.max_len || out.len() >= self.budget {
                    self.truncated = true;
                    continue;
                }
                let mut v = t.clone();
                v.extend_from_slice(&u[1..]);
                out.insert(v);
            }
        }
        out
    }

    fn seq(&mut self, a: &Part, b: &Part) -> Part {
        let ok = self.concat(&a.ok, &b.ok);
        let mut br = a.br.clone();
        br.extend(self.concat(&a.ok, &b.br));
        Part { ok, br }
    }

    fn test(&self, b: &BExpr) -> Part {
        Part {
            ok: self
                .space
                .states()
                .filter(|s| self.space.eval_b(b, *s))
                .map(|s| vec![s])
                .collect(),
            br: BTreeSet::new(),
        }
    }

    fn steps(&mut self, rel: &Rel) -> Part {
        let ok = if self.max_len < 2 {
            self.truncated |= !rel.is_empty();
            BTreeSet::new()
        } else {
            rel.pairs().map(|(a, b)| vec![a, b]).collect()
        };
        Part {
            ok,
            br: BTreeSet::new(),
        }
    }

    fn run(&mut self, s: &Stmt) -> Result<Part> {
        let sp = self.space;
        let n = sp.size();
        Ok(match s {
            Stmt::Skip => self.steps(&Rel::identity(n)),
            Stmt::Break => Part {
                ok: BTreeSet::new(),
                br: sp.states().map(|s| vec![s]).collect(),
            },
            Stmt::Assign(..) | Stmt::RandAssign(..) => {
                let rel = crate::interpreter::sem_rec(s, sp)?.e;
                self.steps(&rel)
            }
            Stmt::Test(b) => self.test(b),
            Stmt::Seq(a, b) => {
                let (a, b) = (self.run(a)?, self.run(b)?);
                self.seq(&a, &b)
            }
            Stmt::If(c, a, b) => {
                let (a, b) = (self.run(a)?, self.run(b)?);
                let (t, f) = (self.test(c), self.test(&c.clone().not()));
                let mut p = self.seq(&t, &a);
                let q = self.seq(&f, &b);
                p.ok.extend(q.ok);
                p.br.extend(q.br);
                p
            }
            Stmt::While(c, body) => {
                let body = self.run(body)?;
                let t = self.test(c);
                let step = self.seq(&t, &body);
                // X = lfp(init ∪ X ; step)
                let mut x: BTreeSet<Trace> = sp.states().map(|s| vec![s]).collect();
                loop {
                    let mut next = x.clone();
                    next.extend(self.concat(&x, &step.ok));
                    if next == x {
                        break;
                    }
                    x = next;
                }
                let mut exits = self.test(&c.clone().not()).ok;
                exits.extend(step.br.iter().cloned());
                Part {
                    ok: self.concat(&x, &exits),
                    br: BTreeSet::new(),
                }
            }
        })
    }
}

/// Trace semantics with traces of length at most `max_len`.
pub fn trace_sem(s: &Stmt, space: &StateSpace, max_len: usize) -> Result<TraceSet> {
    trace_sem_budget(s, space, max_len, DEFAULT_BUDGET)
}

/// As [`trace_sem`], also flagging sets that would exceed `budget` traces.
pub fn trace_sem_budget(
    s: &Stmt,
    space: &StateSpace,
    max_len: usize,
    budget: usize,
) -> Result<TraceSet> {
    if max_len < 1 {
        return Err(Error::Input("trace length bound must be at least 1".into()));
    }
    let rel = sem(s, space)?;
    let mut ctx = Ctx {
        space,
        max_len,
        budget,
        truncated: false,
    };
    let part = ctx.run(s)?;
    Ok(TraceSet {
        ok: part.ok,
        br: part.br,
        div_starts: rel.inf,
        truncated: ctx.truncated,
    })
}

/// First/last state pairs of the finite traces; divergent starts pass through.
pub fn abstract_to_rel(t: &TraceSet) -> SemTriple {
    let n = t.div_starts.n();
    let ends = |set: &BTreeSet<Trace>| {
        Rel::from_pairs(n, set.iter().map(|p| (p[0], *p.last().expect("non-empty"))))
    };
    SemTriple {
        e: ends(&t.ok),
        inf: t.div_starts.clone(),
        br: ends(&t.br),
    }
}

/// Trace-set concatenation without a length bound, for law checks.
pub fn concat(a: &BTreeSet<Trace>, b: &BTreeSet<Trace>) -> BTreeSet<Trace> {
    let mut out = BTreeSet::new();
    for t in a {
        for u in b.iter().filter(|u| Some(&u[0]) == t.last()) {
            let mut v = t.clone();
            v.extend_from_slice(&u[1..]);
            out.insert(v);
        }
    }
    out
}

pub fn fmt_trace(space: &StateSpace, t: &Trace) -> String {
    t.iter()
        .map(|s| space.fmt_state(*s))
        .collect::<Vec<_>>()
        .join(";")
}

/// One trace per line; break traces are prefixed with `break `.
pub fn dump(space: &StateSpace, t: &TraceSet) -> String {
    let mut out = String::new();
    for p in &t.ok {
        out.push_str(&fmt_trace(space, p));
        out.push('\n');
    }
    for p in &t.br {
        out.push_str("break ");
        out.push_str(&fmt_trace(space, p));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse;
    use proptest::prelude::*;

    #[test]
    fn skip_traces() {
        let sp = StateSpace::uniform(&["x"], 0, 2).unwrap();
        let t = trace_sem(&Stmt::Skip, &sp, 4).unwrap();
        let want: BTreeSet<Trace> = (0..3).map(|s| vec![s, s]).collect();
        assert_eq!(t.ok, want);
        assert!(!t.truncated);
        assert_eq!(abstract_to_rel(&t), SemTriple::init(3));
    }

    #[test]
    fn zero_bound_is_rejected() {
        let sp = StateSpace::uniform(&["x"], 0, 2).unwrap();
        assert!(trace_sem(&Stmt::Skip, &sp, 0).is_err());
    }

    #[test]
    fn countdown_from_nonnegative() {
        let sp = StateSpace::uniform(&["y"], 0, 2).unwrap();
        let s = parse("while (y != 0) y = y - 1").unwrap();
        let t = trace_sem(&s, &sp, 10).unwrap();
        assert!(!t.truncated);
        let zero = sp.encode(&[0]).unwrap();
        let e: Vec<_> = abstract_to_rel(&t).e.pairs().collect();
        assert_eq!(e, (0..3).map(|s| (s, zero)).collect::<Vec<_>>());
        assert_eq!(fmt_trace(&sp, t.ok.iter().last().unwrap()), "y:2;y:1;y:0");
    }

    #[test]
    fn empty_set_abstracts_to_empty() {
        let t = TraceSet {
            ok: BTreeSet::new(),
            br: BTreeSet::new(),
            div_starts: StateSet::empty(3),
            truncated: false,
        };
        assert_eq!(abstract_to_rel(&t), SemTriple::bottom(3));
    }

    fn arb_traces() -> impl Strategy<Value = BTreeSet<Trace>> {
        proptest::collection::btree_set(proptest::collection::vec(0usize..3, 1..4), 0..6)
    }

    proptest! {
        #[test]
        fn concat_laws(a in arb_traces(), b in arb_traces(), c in arb_traces()) {
            prop_assert_eq!(concat(&concat(&a, &b), &c), concat(&a, &concat(&b, &c)));
            let unit: BTreeSet<Trace> = (0..3).map(|s| vec![s]).collect();
            prop_assert_eq!(concat(&unit, &a), a.clone());
            prop_assert_eq!(concat(&a, &unit), a);
        }
    }
}
