//! Finite state spaces, relations over them, and the `<e, inf, br>` triple
//! with its primitive statements.

use std::fmt;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lang::{AExpr, BExpr, Stmt};
use crate::order::PartialOrder;

/// Largest supported number of states.
pub const MAX_STATES: usize = 1 << 13;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Arith {
    /// Out-of-range results are clamped to the bounds.
    #[default]
    Saturate,
    /// Out-of-range results wrap around modulo the range width.
    Wrap,
    /// Out-of-range results block the execution.
    Prune,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Bounds {
    Shared(i64),
    PerVar(Vec<i64>),
}

/// The config object describing a state space.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceConfig {
    pub vars: Vec<String>,
    pub lo: Bounds,
    pub hi: Bounds,
    #[serde(default)]
    pub arith: Arith,
}

/// Σ: total maps from `vars` to bounded integers, indexed in mixed radix
/// with the first variable most significant (lexicographic order).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StateSpace {
    vars: Vec<String>,
    lo: Vec<i64>,
    hi: Vec<i64>,
    arith: Arith,
    strides: Vec<usize>,
    size: usize,
}

impl StateSpace {
    pub fn new(vars: Vec<String>, lo: Vec<i64>, hi: Vec<i64>, arith: Arith) -> Result<Self> {
        if vars.is_empty() {
            return Err(Error::Space("no variables".into()));
        }
        if lo.len() != vars.len() || hi.len() != vars.len() {
            return Err(Error::Space("bounds do not match the variable list".into()));
        }
        for (i, v) in vars.iter().enumerate() {
            if vars[..i].contains(v) {
                return Err(Error::Space(format!("duplicate variable `{v}`")));
            }
            if lo[i] > hi[i] {
                return Err(Error::Space(format!("empty range for `{v}`")));
            }
        }
        let mut strides = vec![0; vars.len()];
        let mut size: usize = 1;
        for i in (0..vars.len()).rev() {
            strides[i] = size;
            let width = usize::try_from(hi[i] - lo[i] + 1)
                .ok()
                .filter(|w| *w <= MAX_STATES)
                .ok_or_else(|| Error::Space("range too wide".into()))?;
            size = size
                .checked_mul(width)
                .filter(|s| *s <= MAX_STATES)
                .ok_or_else(|| Error::Space(format!("more than {MAX_STATES} states")))?;
        }
        Ok(StateSpace {
            vars,
            lo,
            hi,
            arith,
            strides,
            size,
        })
    }

    /// Every variable ranges over `[lo, hi]`, saturating arithmetic.
    pub fn uniform(vars: &[&str], lo: i64, hi: i64) -> Result<Self> {
        let n = vars.len();
        Self::new(
            vars.iter().map(|v| v.to_string()).collect(),
            vec![lo; n],
            vec![hi; n],
            Arith::Saturate,
        )
    }

    pub fn with_arith(mut self, arith: Arith) -> Self {
        self.arith = arith;
        self
    }

    pub fn from_config(cfg: &SpaceConfig) -> Result<Self> {
        let expand = |b: &Bounds| match b {
            Bounds::Shared(v) => vec![*v; cfg.vars.len()],
            Bounds::PerVar(v) => v.clone(),
        };
        Self::new(cfg.vars.clone(), expand(&cfg.lo), expand(&cfg.hi), cfg.arith)
    }

    pub fn config(&self) -> SpaceConfig {
        let shared = |v: &[i64]| {
            if v.iter().all(|x| *x == v[0]) {
                Bounds::Shared(v[0])
            } else {
                Bounds::PerVar(v.to_vec())
            }
        };
        SpaceConfig {
            vars: self.vars.clone(),
            lo: shared(&self.lo),
            hi: shared(&self.hi),
            arith: self.arith,
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn arith(&self) -> Arith {
        self.arith
    }

    pub fn bounds(&self, var: usize) -> (i64, i64) {
        (self.lo[var], self.hi[var])
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn decode(&self, idx: usize) -> Vec<i64> {
        (0..self.vars.len())
            .map(|i| self.value(idx, i))
            .collect()
    }

    pub fn value(&self, idx: usize, var: usize) -> i64 {
        let width = (self.hi[var] - self.lo[var] + 1) as usize;
        self.lo[var] + ((idx / self.strides[var]) % width) as i64
    }

    /// Index of the state with the given values; `None` if out of bounds.
    pub fn encode(&self, values: &[i64]) -> Option<usize> {
        if values.len() != self.vars.len() {
            return None;
        }
        let mut idx = 0;
        for (i, v) in values.iter().enumerate() {
            if *v < self.lo[i] || *v > self.hi[i] {
                return None;
            }
            idx += (*v - self.lo[i]) as usize * self.strides[i];
        }
        Some(idx)
    }

    /// `σ[var ← v]` for an in-range `v`.
    pub fn update(&self, idx: usize, var: usize, v: i64) -> usize {
        let old = self.value(idx, var);
        (idx as i64 + (v - old) * self.strides[var] as i64) as usize
    }

    /// Applies the arithmetic mode to an assignment result.
    pub fn store(&self, var: usize, v: i64) -> Option<i64> {
        let (lo, hi) = (self.lo[var], self.hi[var]);
        match self.arith {
            Arith::Saturate => Some(v.clamp(lo, hi)),
            Arith::Wrap => Some(lo + (v - lo).rem_euclid(hi - lo + 1)),
            Arith::Prune => (lo..=hi).contains(&v).then_some(v),
        }
    }

    pub fn states(&self) -> std::ops::Range<usize> {
        0..self.size
    }

    /// All states satisfying `pred` on their decoded values.
    pub fn filter(&self, pred: impl Fn(&[i64]) -> bool) -> StateSet {
        StateSet::from_iter(self.size, self.states().filter(|s| pred(&self.decode(*s))))
    }

    pub fn check_bound(&self, s: &Stmt) -> Result<()> {
        match s.vars().into_iter().find(|v| self.var_index(v).is_none()) {
            Some(v) => Err(Error::Unbound(v)),
            None => Ok(()),
        }
    }

    pub fn eval_a(&self, a: &AExpr, idx: usize) -> i64 {
        a.eval(&|x: &str| self.value(idx, self.var_index(x).expect("bound variable")))
    }

    pub fn eval_b(&self, b: &BExpr, idx: usize) -> bool {
        b.eval(&|x: &str| self.value(idx, self.var_index(x).expect("bound variable")))
    }

    /// `x:1,y:2`
    pub fn fmt_state(&self, idx: usize) -> String {
        self.vars
            .iter()
            .enumerate()
            .map(|(i, v)| format!("{v}:{}", self.value(idx, i)))
            .collect::<Vec<_>>()
            .join(",")
    }
}

/// A subset of Σ.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateSet(FixedBitSet);

impl StateSet {
    pub fn empty(n: usize) -> Self {
        StateSet(FixedBitSet::with_capacity(n))
    }

    pub fn full(n: usize) -> Self {
        let mut b = FixedBitSet::with_capacity(n);
        b.insert_range(..);
        StateSet(b)
    }

    pub fn from_iter(n: usize, it: impl IntoIterator<Item = usize>) -> Self {
        let mut s = Self::empty(n);
        for i in it {
            s.insert(i);
        }
        s
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn insert(&mut self, i: usize) {
        self.0.insert(i);
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.contains(i)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.ones()
    }

    pub fn len(&self) -> usize {
        self.0.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_clear()
    }

    pub fn union(&self, o: &StateSet) -> StateSet {
        let mut r = self.clone();
        r.0.union_with(&o.0);
        r
    }

    pub fn intersection(&self, o: &StateSet) -> StateSet {
        let mut r = self.clone();
        r.0.intersect_with(&o.0);
        r
    }

    pub fn difference(&self, o: &StateSet) -> StateSet {
        let mut r = self.clone();
        r.0.difference_with(&o.0);
        r
    }

    pub fn complement(&self) -> StateSet {
        let mut r = self.clone();
        r.0.toggle_range(..);
        r
    }

    pub fn is_subset(&self, o: &StateSet) -> bool {
        self.0.is_subset(&o.0)
    }

    pub fn bits(&self) -> &FixedBitSet {
        &self.0
    }
}

impl PartialOrder for StateSet {
    fn leq(&self, other: &Self) -> bool {
        self.is_subset(other)
    }
}

/// A binary relation on Σ, one bit row per source state.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rel {
    rows: Vec<FixedBitSet>,
}

impl fmt::Debug for Rel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.pairs()).finish()
    }
}

impl Rel {
    pub fn empty(n: usize) -> Self {
        Rel {
            rows: vec![FixedBitSet::with_capacity(n); n],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&StateSet::full(n))
    }

    pub fn full(n: usize) -> Self {
        Rel {
            rows: vec![StateSet::full(n).0; n],
        }
    }

    /// `{(σ, σ) | σ ∈ s}`
    pub fn diagonal(s: &StateSet) -> Self {
        let mut r = Self::empty(s.n());
        for i in s.iter() {
            r.insert(i, i);
        }
        r
    }

    pub fn from_pairs(n: usize, it: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut r = Self::empty(n);
        for (a, b) in it {
            r.insert(a, b);
        }
        r
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn insert(&mut self, a: usize, b: usize) {
        self.rows[a].insert(b);
    }

    pub fn contains(&self, a: usize, b: usize) -> bool {
        self.rows[a].contains(b)
    }

    pub fn row(&self, a: usize) -> &FixedBitSet {
        &self.rows[a]
    }

    /// Pairs in canonical (lexicographic) order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(a, r)| r.ones().map(move |b| (a, b)))
    }

    pub fn len(&self) -> usize {
        self.rows.iter().map(|r| r.count_ones(..)).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.iter().all(|r| r.is_clear())
    }

    pub fn union(&self, o: &Rel) -> Rel {
        let mut r = self.clone();
        r.union_with(o);
        r
    }

    pub fn union_with(&mut self, o: &Rel) {
        for (a, b) in self.rows.iter_mut().zip(&o.rows) {
            a.union_with(b);
        }
    }

    pub fn intersection(&self, o: &Rel) -> Rel {
        let mut r = self.clone();
        for (a, b) in r.rows.iter_mut().zip(&o.rows) {
            a.intersect_with(b);
        }
        r
    }

    pub fn is_subset(&self, o: &Rel) -> bool {
        self.rows.iter().zip(&o.rows).all(|(a, b)| a.is_subset(b))
    }

    /// `self ∘ o`: first `self`, then `o`.
    pub fn compose(&self, o: &Rel) -> Rel {
        let n = self.n();
        let mut out = Rel::empty(n);
        for (a, row) in self.rows.iter().enumerate() {
            for m in row.ones() {
                out.rows[a].union_with(&o.rows[m]);
            }
        }
        out
    }

    /// `{σ | ∃σ'. (σ,σ') ∈ self ∧ σ' ∈ s}`
    pub fn preimage(&self, s: &StateSet) -> StateSet {
        StateSet::from_iter(
            self.n(),
            (0..self.n()).filter(|a| !self.rows[*a].is_disjoint(&s.0)),
        )
    }

    /// `{σ' | ∃σ ∈ s. (σ,σ') ∈ self}`
    pub fn image(&self, s: &StateSet) -> StateSet {
        let mut out = StateSet::empty(self.n());
        for a in s.iter() {
            out.0.union_with(&self.rows[a]);
        }
        out
    }

    pub fn domain(&self) -> StateSet {
        StateSet::from_iter(self.n(), (0..self.n()).filter(|a| !self.rows[*a].is_clear()))
    }

    pub fn range(&self) -> StateSet {
        self.image(&StateSet::full(self.n()))
    }
}

impl PartialOrder for Rel {
    fn leq(&self, other: &Self) -> bool {
        self.is_subset(other)
    }
}

/// `<e, inf, br>`: normal termination, divergent start states and
/// termination through `break`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SemTriple {
    pub e: Rel,
    pub inf: StateSet,
    pub br: Rel,
}

impl SemTriple {
    pub fn bottom(n: usize) -> Self {
        SemTriple {
            e: Rel::empty(n),
            inf: StateSet::empty(n),
            br: Rel::empty(n),
        }
    }

    pub fn top(n: usize) -> Self {
        SemTriple {
            e: Rel::full(n),
            inf: StateSet::full(n),
            br: Rel::full(n),
        }
    }

    pub fn init(n: usize) -> Self {
        Self::from_e(Rel::identity(n))
    }

    pub fn from_e(e: Rel) -> Self {
        let n = e.n();
        SemTriple {
            e,
            inf: StateSet::empty(n),
            br: Rel::empty(n),
        }
    }

    pub fn n(&self) -> usize {
        self.e.n()
    }

    pub fn compose(&self, o: &SemTriple) -> SemTriple {
        SemTriple {
            e: self.e.compose(&o.e),
            inf: self.inf.union(&self.e.preimage(&o.inf)),
            br: self.br.union(&self.e.compose(&o.br)),
        }
    }

    pub fn join(&self, o: &SemTriple) -> SemTriple {
        SemTriple {
            e: self.e.union(&o.e),
            inf: self.inf.union(&o.inf),
            br: self.br.union(&o.br),
        }
    }

    pub fn meet(&self, o: &SemTriple) -> SemTriple {
        SemTriple {
            e: self.e.intersection(&o.e),
            inf: self.inf.intersection(&o.inf),
            br: self.br.intersection(&o.br),
        }
    }

    pub fn leq(&self, o: &SemTriple) -> bool {
        self.e.is_subset(&o.e) && self.inf.is_subset(&o.inf) && self.br.is_subset(&o.br)
    }

    /// `<e, ∅, ∅>`
    pub fn e_part(&self) -> SemTriple {
        Self::from_e(self.e.clone())
    }

    pub fn is_infinitary(&self) -> bool {
        self.e.is_empty() && self.br.is_empty()
    }
}

impl PartialOrder for SemTriple {
    fn leq(&self, other: &Self) -> bool {
        SemTriple::leq(self, other)
    }
}

/// The primitive statements.
#[derive(Clone, Copy, Debug)]
pub enum Prim<'a> {
    Init,
    Skip,
    Break,
    Assign(&'a str, &'a AExpr),
    RandAssign(&'a str, Option<i64>, Option<i64>),
    Test(&'a BExpr),
}

fn var_of(space: &StateSpace, x: &str) -> Result<usize> {
    space.var_index(x).ok_or_else(|| Error::Unbound(x.to_string()))
}

fn check_vars(space: &StateSpace, vars: Vec<String>) -> Result<()> {
    match vars.into_iter().find(|v| space.var_index(v).is_none()) {
        Some(v) => Err(Error::Unbound(v)),
        None => Ok(()),
    }
}

/// Semantics of a primitive statement.
pub fn prim(kind: Prim<'_>, space: &StateSpace) -> Result<SemTriple> {
    let n = space.size();
    Ok(match kind {
        Prim::Init | Prim::Skip => SemTriple::init(n),
        Prim::Break => SemTriple {
            e: Rel::empty(n),
            inf: StateSet::empty(n),
            br: Rel::identity(n),
        },
        Prim::Assign(x, a) => {
            let xi = var_of(space, x)?;
            check_vars(space, a.vars())?;
            let mut e = Rel::empty(n);
            for s in space.states() {
                if let Some(v) = space.store(xi, space.eval_a(a, s)) {
                    e.insert(s, space.update(s, xi, v));
                }
            }
            SemTriple::from_e(e)
        }
        Prim::RandAssign(x, lo, hi) => {
            let xi = var_of(space, x)?;
            let (vlo, vhi) = space.bounds(xi);
            let a = lo.map_or(vlo, |l| l.max(vlo));
            let b = hi.map_or(vhi, |h| h.min(vhi));
            let mut e = Rel::empty(n);
            for s in space.states() {
                for v in a..=b {
                    e.insert(s, space.update(s, xi, v));
                }
            }
            SemTriple::from_e(e)
        }
        Prim::Test(b) => {
            check_vars(space, b.vars())?;
            SemTriple::from_e(Rel::diagonal(&space.filter_idx(|s| space.eval_b(b, s))))
        }
    })
}

impl StateSpace {
    pub fn filter_idx(&self, pred: impl Fn(usize) -> bool) -> StateSet {
        StateSet::from_iter(self.size, self.states().filter(|s| pred(*s)))
    }
}
