//! Structural fixpoint semantics, the Kleene fixpoint engine, and an
//! independent small-step oracle over the finite configuration graph.

use std::collections::HashMap;

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use petgraph::visit::{Dfs, Reversed};
use thiserror::Error;

use crate::error::Result;
use crate::lang::{BExpr, Stmt};
use crate::order::PartialOrder;
use crate::rel_domain::{prim, Prim, Rel, SemTriple, StateSet, StateSpace};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixpointReport<T> {
    pub iterations: usize,
    pub stabilized: bool,
    pub result: T,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum FixpointError {
    #[error("iterate {iterate} is not comparable with its predecessor; the function is not monotone")]
    NotMonotone { iterate: usize },
    #[error("no stabilization within {cap} iterations")]
    Cap { cap: usize },
}

/// Least fixpoint by iteration from `bottom`. Each iterate must grow.
pub fn lfp<T: PartialOrder + Eq + Clone>(
    mut f: impl FnMut(&T) -> T,
    bottom: T,
    cap: usize,
) -> std::result::Result<FixpointReport<T>, FixpointError> {
    iterate(&mut f, bottom, cap, |prev, next| prev.leq(next))
}

/// Greatest fixpoint by iteration from `top`. Each iterate must shrink.
pub fn gfp<T: PartialOrder + Eq + Clone>(
    mut f: impl FnMut(&T) -> T,
    top: T,
    cap: usize,
) -> std::result::Result<FixpointReport<T>, FixpointError> {
    iterate(&mut f, top, cap, |prev, next| next.leq(prev))
}

fn iterate<T: Eq + Clone>(
    f: &mut impl FnMut(&T) -> T,
    start: T,
    cap: usize,
    ok: impl Fn(&T, &T) -> bool,
) -> std::result::Result<FixpointReport<T>, FixpointError> {
    let mut x = start;
    for k in 1..=cap {
        let y = f(&x);
        if !ok(&x, &y) {
            return Err(FixpointError::NotMonotone { iterate: k });
        }
        if y == x {
            return Ok(FixpointReport {
                iterations: k,
                stabilized: true,
                result: x,
            });
        }
        x = y;
    }
    Err(FixpointError::Cap { cap })
}

/// Iteration cap for relations on a space of `n` states: the height of
/// the powerset of pairs, plus the final confirming step.
pub fn rel_cap(n: usize) -> usize {
    n * n + 2
}

/// The pieces of the semantics of `while (B) S`.
#[derive(Clone, Debug)]
pub struct WhileParts {
    /// `B; S`
    pub step: SemTriple,
    /// `¬B`
    pub exit: SemTriple,
    /// Pairs (start, loop entry): lfp of `X ↦ 1 ∪ X ∘ step.e`.
    pub entry: FixpointReport<Rel>,
    /// States with an infinite sequence of terminating iterations.
    pub div: FixpointReport<StateSet>,
}

impl WhileParts {
    pub fn new(b: &BExpr, body: &Stmt, space: &StateSpace) -> Result<Self> {
        let n = space.size();
        let step = prim(Prim::Test(b), space)?.compose(&sem_rec(body, space)?);
        let exit = prim(Prim::Test(&b.clone().not()), space)?;
        let entry = entry_forward(&step.e)?;
        let div = divergence(&step.e)?;
        debug_assert_eq!(div.result.n(), n);
        Ok(WhileParts {
            step,
            exit,
            entry,
            div,
        })
    }

    pub fn result(&self) -> SemTriple {
        let x = &self.entry.result;
        SemTriple {
            e: x.compose(&self.exit.e.union(&self.step.br)),
            inf: x.preimage(&self.step.inf).union(&self.div.result),
            br: Rel::empty(x.n()),
        }
    }
}

/// lfp of `X ↦ 1 ∪ X ∘ r` (iterations appended on the right).
pub fn entry_forward(r: &Rel) -> Result<FixpointReport<Rel>> {
    let n = r.n();
    let id = Rel::identity(n);
    Ok(lfp(|x: &Rel| id.union(&x.compose(r)), Rel::empty(n), rel_cap(n))?)
}

/// lfp of `X ↦ 1 ∪ r ∘ X` (iterations prepended on the left).
pub fn entry_backward(r: &Rel) -> Result<FixpointReport<Rel>> {
    let n = r.n();
    let id = Rel::identity(n);
    Ok(lfp(|x: &Rel| id.union(&r.compose(x)), Rel::empty(n), rel_cap(n))?)
}

/// gfp of `Y ↦ pre_r(Y)`: starts of infinite `r`-paths.
pub fn divergence(r: &Rel) -> Result<FixpointReport<StateSet>> {
    let n = r.n();
    Ok(gfp(|y: &StateSet| r.preimage(y), StateSet::full(n), n + 2)?)
}

/// `r^k`
pub fn power(r: &Rel, k: usize) -> Rel {
    (0..k).fold(Rel::identity(r.n()), |acc, _| acc.compose(r))
}

/// The structural semantics of `s`.
pub fn sem(s: &Stmt, space: &StateSpace) -> Result<SemTriple> {
    s.validate_breaks()?;
    space.check_bound(s)?;
    sem_rec(s, space)
}

pub(crate) fn sem_rec(s: &Stmt, space: &StateSpace) -> Result<SemTriple> {
    match s {
        Stmt::Skip => prim(Prim::Skip, space),
        Stmt::Break => prim(Prim::Break, space),
        Stmt::Assign(x, a) => prim(Prim::Assign(x, a), space),
        Stmt::RandAssign(x, lo, hi) => prim(Prim::RandAssign(x, *lo, *hi), space),
        Stmt::Test(b) => prim(Prim::Test(b), space),
        Stmt::Seq(a, b) => Ok(sem_rec(a, space)?.compose(&sem_rec(b, space)?)),
        Stmt::If(c, a, b) => {
            let t = prim(Prim::Test(c), space)?.compose(&sem_rec(a, space)?);
            let f = prim(Prim::Test(&c.clone().not()), space)?.compose(&sem_rec(b, space)?);
            Ok(t.join(&f))
        }
        Stmt::While(c, body) => Ok(WhileParts::new(c, body, space)?.result()),
    }
}

// ---------------------------------------------------------------- oracle

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Frame {
    Run(usize),
    LoopBody(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Config {
    At(Vec<Frame>, usize),
    Done(usize),
    Broke(usize),
}

/// Flattened AST so frames can name statements by index.
struct Arena<'a> {
    nodes: Vec<&'a Stmt>,
    kids: Vec<Vec<usize>>,
}

impl<'a> Arena<'a> {
    fn build(root: &'a Stmt) -> Self {
        let mut a = Arena {
            nodes: Vec::new(),
            kids: Vec::new(),
        };
        a.add(root);
        a
    }

    fn add(&mut self, s: &'a Stmt) -> usize {
        let id = self.nodes.len();
        self.nodes.push(s);
        self.kids.push(Vec::new());
        let kids = s.components().into_iter().map(|c| self.add(c)).collect();
        self.kids[id] = kids;
        id
    }
}

struct Graph {
    g: DiGraph<Config, ()>,
    index: HashMap<Config, NodeIndex>,
}

impl Graph {
    fn node(&mut self, c: Config) -> (NodeIndex, bool) {
        if let Some(&i) = self.index.get(&c) {
            return (i, false);
        }
        let i = self.g.add_node(c.clone());
        self.index.insert(c, i);
        (i, true)
    }
}

fn successors(arena: &Arena, space: &StateSpace, stack: &[Frame], s: usize) -> Vec<Config> {
    let Some((&top, rest)) = stack.split_last() else {
        return vec![Config::Done(s)];
    };
    let with = |extra: &[Frame], s: usize| {
        let mut st = rest.to_vec();
        st.extend_from_slice(extra);
        Config::At(st, s)
    };
    let id = match top {
        Frame::LoopBody(w) => return vec![with(&[Frame::Run(w)], s)],
        Frame::Run(id) => id,
    };
    let kids = &arena.kids[id];
    match arena.nodes[id] {
        Stmt::Skip => vec![with(&[], s)],
        Stmt::Assign(x, a) => {
            let xi = space.var_index(x).expect("bound variable");
            match space.store(xi, space.eval_a(a, s)) {
                Some(v) => vec![with(&[], space.update(s, xi, v))],
                None => vec![],
            }
        }
        Stmt::RandAssign(x, lo, hi) => {
            let xi = space.var_index(x).expect("bound variable");
            let (vlo, vhi) = space.bounds(xi);
            let a = lo.unwrap_or(vlo).max(vlo);
            let b = hi.unwrap_or(vhi).min(vhi);
            (a..=b).map(|v| with(&[], space.update(s, xi, v))).collect()
        }
        Stmt::Test(b) => {
            if space.eval_b(b, s) {
                vec![with(&[], s)]
            } else {
                vec![]
            }
        }
        Stmt::Seq(..) => vec![with(&[Frame::Run(kids[1]), Frame::Run(kids[0])], s)],
        Stmt::If(c, ..) => {
            let k = if space.eval_b(c, s) { kids[0] } else { kids[1] };
            vec![with(&[Frame::Run(k)], s)]
        }
        Stmt::While(c, _) => {
            if space.eval_b(c, s) {
                vec![with(&[Frame::LoopBody(id), Frame::Run(kids[0])], s)]
            } else {
                vec![with(&[], s)]
            }
        }
        Stmt::Break => match rest.iter().rposition(|f| matches!(f, Frame::LoopBody(_))) {
            Some(p) => vec![Config::At(rest[..p].to_vec(), s)],
            None => vec![Config::Broke(s)],
        },
    }
}

fn explore(s: &Stmt, space: &StateSpace) -> (Graph, Vec<NodeIndex>) {
    let arena = Arena::build(s);
    let mut graph = Graph {
        g: DiGraph::new(),
        index: HashMap::new(),
    };
    let mut starts = Vec::new();
    let mut todo = Vec::new();
    for s0 in space.states() {
        let (i, fresh) = graph.node(Config::At(vec![Frame::Run(0)], s0));
        starts.push(i);
        if fresh {
            todo.push(i);
        }
    }
    while let Some(i) = todo.pop() {
        let succ = match &graph.g[i] {
            Config::At(stack, st) => successors(&arena, space, stack, *st),
            _ => continue,
        };
        for c in succ {
            let (j, fresh) = graph.node(c);
            graph.g.add_edge(i, j, ());
            if fresh {
                todo.push(j);
            }
        }
    }
    (graph, starts)
}

/// Semantics read off the finite configuration graph: terminal nodes
/// give `e` and `br`, reachable cycles give divergence.
pub fn oracle_sem(s: &Stmt, space: &StateSpace) -> Result<SemTriple> {
    s.validate_breaks()?;
    space.check_bound(s)?;
    let n = space.size();
    let (graph, starts) = explore(s, space);
    let g = &graph.g;

    let mut cyclic = vec![false; g.node_count()];
    for scc in tarjan_scc(g) {
        if scc.len() > 1 || g.contains_edge(scc[0], scc[0]) {
            for v in scc {
                cyclic[v.index()] = true;
            }
        }
    }
    // nodes that can reach a cycle
    let mut reaches_cycle = vec![false; g.node_count()];
    let rev = Reversed(g);
    for v in g.node_indices().filter(|v| cyclic[v.index()]) {
        if reaches_cycle[v.index()] {
            continue;
        }
        let mut dfs = Dfs::new(rev, v);
        while let Some(u) = dfs.next(rev) {
            reaches_cycle[u.index()] = true;
        }
    }

    let mut out = SemTriple::bottom(n);
    for (s0, &start) in starts.iter().enumerate() {
        if reaches_cycle[start.index()] {
            out.inf.insert(s0);
        }
        let mut dfs = Dfs::new(g, start);
        while let Some(u) = dfs.next(g) {
            match g[u] {
                Config::Done(s1) => out.e.insert(s0, s1),
                Config::Broke(s1) => out.br.insert(s0, s1),
                Config::At(..) => {}
            }
        }
    }
    Ok(out)
}

/// For a `while` statement: pairs (start, state) such that the loop head
/// is reached again in `state`, read off the configuration graph.
pub fn oracle_loop_entry(w: &Stmt, space: &StateSpace) -> Result<Rel> {
    w.validate_breaks()?;
    space.check_bound(w)?;
    let (graph, starts) = explore(w, space);
    let g = &graph.g;
    let mut out = Rel::empty(space.size());
    for (s0, &start) in starts.iter().enumerate() {
        let mut dfs = Dfs::new(g, start);
        while let Some(u) = dfs.next(g) {
            if let Config::At(stack, s1) = &g[u] {
                if stack.as_slice() == [Frame::Run(0)] {
                    out.insert(s0, *s1);
                }
            }
        }
    }
    Ok(out)
}
