//! Abstractions of sets of lattice elements over finitely presented posets.
//!
//! A set of elements of a carrier is a bitset over the element ids. Infinite
//! carriers are presented by a finite table plus declared chain families:
//! a family stands for an infinite chain continuing past its listed elements,
//! with an optional limit (glb for decreasing, lub for increasing chains).
//! Chain-limit and frontier operators only look at declared families.

use std::ops::Deref;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::order::FiniteOrder;
use crate::rel_domain::{SemTriple, StateSpace};
use crate::transformers::HyperOracle;

/// A set of carrier elements.
pub type HyperSubset = FixedBitSet;

pub fn subset(n: usize, elems: impl IntoIterator<Item = usize>) -> HyperSubset {
    let mut s = FixedBitSet::with_capacity(n);
    for e in elems {
        s.insert(e);
    }
    s
}

/// Every subset of an `n`-element carrier, in mask order. `n ≤ 24`.
pub fn all_subsets(n: usize) -> impl Iterator<Item = HyperSubset> {
    assert!(n <= 24, "too many subsets");
    (0u32..1 << n).map(move |m| subset(n, (0..n).filter(|i| m >> i & 1 == 1)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    #[default]
    Down,
    Up,
}

/// A declared infinite chain, listed by a finite prefix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Family {
    pub name: String,
    pub elements: Vec<usize>,
    pub limit: Option<usize>,
    pub direction: Direction,
}

/// A finite partial order with optional declared chain families.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poset {
    names: Vec<String>,
    up: Vec<FixedBitSet>,
    down: Vec<FixedBitSet>,
    families: Vec<Family>,
}

/// A poset presented with chain families.
pub type ChainPoset = Poset;

impl Poset {
    /// Reflexive-transitive closure of `pairs` (`(a, b)` means `a ⊑ b`).
    pub fn new(names: Vec<String>, pairs: &[(usize, usize)]) -> Result<Self> {
        let n = names.len();
        let mut up: Vec<FixedBitSet> = (0..n).map(|i| subset(n, [i])).collect();
        for &(a, b) in pairs {
            if a >= n || b >= n {
                return Err(Error::Lattice(format!("order pair ({a}, {b}) out of range")));
            }
            up[a].insert(b);
        }
        // Warshall on rows
        for k in 0..n {
            let row_k = up[k].clone();
            for row in up.iter_mut() {
                if row.contains(k) {
                    row.union_with(&row_k);
                }
            }
        }
        Self::from_up(names, up)
    }

    /// From a decidable order; it must be reflexive, antisymmetric and transitive.
    pub fn from_le(names: Vec<String>, le: impl Fn(usize, usize) -> bool) -> Result<Self> {
        let n = names.len();
        let up: Vec<FixedBitSet> = (0..n)
            .map(|a| subset(n, (0..n).filter(|&b| le(a, b))))
            .collect();
        for a in 0..n {
            if !up[a].contains(a) {
                return Err(Error::Lattice(format!("order is not reflexive at {}", names[a])));
            }
            for b in up[a].ones() {
                if !up[b].is_subset(&up[a]) {
                    return Err(Error::Lattice(format!(
                        "order is not transitive at {}",
                        names[a]
                    )));
                }
            }
        }
        Self::from_up(names, up)
    }

    fn from_up(names: Vec<String>, up: Vec<FixedBitSet>) -> Result<Self> {
        let n = names.len();
        let mut seen = std::collections::BTreeSet::new();
        for x in &names {
            if !seen.insert(x) {
                return Err(Error::Lattice(format!("duplicate element {x}")));
            }
        }
        let mut down: Vec<FixedBitSet> = (0..n).map(|_| FixedBitSet::with_capacity(n)).collect();
        for a in 0..n {
            for b in up[a].ones() {
                if a != b && up[b].contains(a) {
                    return Err(Error::Lattice(format!(
                        "order is not antisymmetric: {} and {}",
                        names[a], names[b]
                    )));
                }
                down[b].insert(a);
            }
        }
        Ok(Poset {
            names,
            up,
            down,
            families: Vec::new(),
        })
    }

    pub fn named(names: &[&str], pairs: &[(&str, &str)]) -> Result<Self> {
        let names: Vec<String> = names.iter().map(|s| s.to_string()).collect();
        let idx = |x: &str| {
            names
                .iter()
                .position(|n| n == x)
                .ok_or_else(|| Error::Lattice(format!("unknown element {x}")))
        };
        let pairs = pairs
            .iter()
            .map(|(a, b)| Ok((idx(a)?, idx(b)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(names, &pairs)
    }

    /// Declares a chain family by element names.
    pub fn with_family(
        mut self,
        name: &str,
        elements: &[&str],
        limit: Option<&str>,
        direction: Direction,
    ) -> Result<Self> {
        let elements = elements
            .iter()
            .map(|e| self.require(e))
            .collect::<Result<Vec<_>>>()?;
        let limit = limit.map(|l| self.require(l)).transpose()?;
        self.add_family(Family {
            name: name.to_string(),
            elements,
            limit,
            direction,
        })?;
        Ok(self)
    }

    /// Checks that the family is a strict chain in its direction and that
    /// the limit is the greatest (least) non-member lower (upper) bound.
    pub fn add_family(&mut self, f: Family) -> Result<()> {
        let bad = |m: String| Err(Error::Lattice(format!("family {}: {m}", f.name)));
        if f.elements.is_empty() {
            return bad("no elements".into());
        }
        let step = |a: usize, b: usize| match f.direction {
            Direction::Down => self.lt(b, a),
            Direction::Up => self.lt(a, b),
        };
        if !f.elements.windows(2).all(|w| step(w[0], w[1])) {
            return bad("elements do not form a strict chain in the declared direction".into());
        }
        if let Some(l) = f.limit {
            let members = subset(self.size(), f.elements.iter().copied());
            let bounds = match f.direction {
                Direction::Down => self.lower_bounds(&members),
                Direction::Up => self.upper_bounds(&members),
            };
            let mut outside = bounds.clone();
            outside.difference_with(&members);
            let best = match f.direction {
                Direction::Down => self.greatest(&outside),
                Direction::Up => self.least(&outside),
            };
            if best != Some(l) {
                return bad(format!("{} is not the limit", self.names[l]));
            }
        }
        self.families.push(f);
        Ok(())
    }

    fn require(&self, name: &str) -> Result<usize> {
        self.index(name)
            .ok_or_else(|| Error::Lattice(format!("unknown element {name}")))
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn families(&self) -> &[Family] {
        &self.families
    }

    /// `{b | a ⊑ b}`
    pub fn up(&self, a: usize) -> &FixedBitSet {
        &self.up[a]
    }

    /// `{b | b ⊑ a}`
    pub fn down(&self, a: usize) -> &FixedBitSet {
        &self.down[a]
    }

    pub fn empty(&self) -> HyperSubset {
        FixedBitSet::with_capacity(self.size())
    }

    pub fn carrier(&self) -> HyperSubset {
        let mut s = self.empty();
        s.insert_range(..);
        s
    }

    pub fn set(&self, names: &[&str]) -> Result<HyperSubset> {
        Ok(subset(
            self.size(),
            names.iter().map(|n| self.require(n)).collect::<Result<Vec<_>>>()?,
        ))
    }

    pub fn set_names(&self, s: &HyperSubset) -> Vec<String> {
        s.ones().map(|i| self.names[i].clone()).collect()
    }

    pub fn upper_bounds(&self, s: &HyperSubset) -> HyperSubset {
        let mut out = self.carrier();
        for a in s.ones() {
            out.intersect_with(&self.up[a]);
        }
        out
    }

    pub fn lower_bounds(&self, s: &HyperSubset) -> HyperSubset {
        let mut out = self.carrier();
        for a in s.ones() {
            out.intersect_with(&self.down[a]);
        }
        out
    }

    /// The element of `s` above all of `s`, if any.
    pub fn greatest(&self, s: &HyperSubset) -> Option<usize> {
        s.ones().find(|&a| s.is_subset(&self.down[a]))
    }

    pub fn least(&self, s: &HyperSubset) -> Option<usize> {
        s.ones().find(|&a| s.is_subset(&self.up[a]))
    }

    pub fn lub(&self, s: &HyperSubset) -> Option<usize> {
        self.least(&self.upper_bounds(s))
    }

    pub fn glb(&self, s: &HyperSubset) -> Option<usize> {
        self.greatest(&self.lower_bounds(s))
    }

    pub fn up_closure(&self, s: &HyperSubset) -> HyperSubset {
        let mut out = self.empty();
        for a in s.ones() {
            out.union_with(&self.up[a]);
        }
        out
    }

    pub fn down_closure(&self, s: &HyperSubset) -> HyperSubset {
        let mut out = self.empty();
        for a in s.ones() {
            out.union_with(&self.down[a]);
        }
        out
    }

    /// Elements in `s` with nothing of `s` strictly below.
    pub fn minimal(&self, s: &HyperSubset) -> HyperSubset {
        subset(
            self.size(),
            s.ones().filter(|&a| self.down[a].intersection(s).all(|b| b == a)),
        )
    }

    pub fn maximal(&self, s: &HyperSubset) -> HyperSubset {
        subset(
            self.size(),
            s.ones().filter(|&a| self.up[a].intersection(s).all(|b| b == a)),
        )
    }

    pub fn is_chain(&self, s: &HyperSubset) -> bool {
        s.ones()
            .all(|a| s.ones().all(|b| self.le(a, b) || self.le(b, a)))
    }

    fn families_in<'a>(&'a self, s: &'a HyperSubset, dir: Direction) -> impl Iterator<Item = &'a Family> + 'a {
        self.families
            .iter()
            .filter(move |f| f.direction == dir && f.elements.iter().all(|&e| s.contains(e)))
    }
}

impl FiniteOrder for Poset {
    fn size(&self) -> usize {
        self.names.len()
    }

    fn le(&self, a: usize, b: usize) -> bool {
        self.up[a].contains(b)
    }
}

/// A finite lattice with explicit join and meet tables.
#[derive(Clone, Debug)]
pub struct ToyLattice {
    poset: Poset,
    join: Vec<usize>,
    meet: Vec<usize>,
    bot: usize,
    top: usize,
}

impl Deref for ToyLattice {
    type Target = Poset;

    fn deref(&self) -> &Poset {
        &self.poset
    }
}

impl ToyLattice {
    /// Computes the tables; fails unless every pair has a lub and a glb.
    pub fn from_poset(poset: Poset) -> Result<Self> {
        let n = poset.size();
        if n == 0 {
            return Err(Error::Lattice("empty carrier".into()));
        }
        let mut join = vec![0; n * n];
        let mut meet = vec![0; n * n];
        for a in 0..n {
            for b in 0..n {
                let pair = subset(n, [a, b]);
                join[a * n + b] = poset.lub(&pair).ok_or_else(|| {
                    Error::Lattice(format!("no join of {} and {}", poset.names[a], poset.names[b]))
                })?;
                meet[a * n + b] = poset.glb(&pair).ok_or_else(|| {
                    Error::Lattice(format!("no meet of {} and {}", poset.names[a], poset.names[b]))
                })?;
            }
        }
        let bot = poset.least(&poset.carrier()).expect("finite lattice has a bottom");
        let top = poset.greatest(&poset.carrier()).expect("finite lattice has a top");
        Ok(ToyLattice {
            poset,
            join,
            meet,
            bot,
            top,
        })
    }

    /// Validates an order table and join/meet tables against each other.
    pub fn from_tables(
        names: Vec<String>,
        leq: &[Vec<bool>],
        join: &[Vec<usize>],
        meet: &[Vec<usize>],
    ) -> Result<Self> {
        let n = names.len();
        let square = |rows: usize, cols: &[usize]| rows == n && cols.iter().all(|&c| c == n);
        if !square(leq.len(), &leq.iter().map(Vec::len).collect::<Vec<_>>())
            || !square(join.len(), &join.iter().map(Vec::len).collect::<Vec<_>>())
            || !square(meet.len(), &meet.iter().map(Vec::len).collect::<Vec<_>>())
        {
            return Err(Error::Lattice("tables must be square over the elements".into()));
        }
        let lat = Self::from_poset(Poset::from_le(names, |a, b| leq[a][b])?)?;
        for a in 0..n {
            for b in 0..n {
                if join[a][b] != lat.join(a, b) || meet[a][b] != lat.meet(a, b) {
                    return Err(Error::Lattice(format!(
                        "join/meet table disagrees with the order at ({}, {})",
                        lat.name(a),
                        lat.name(b)
                    )));
                }
            }
        }
        Ok(lat)
    }

    /// `℘({a, b, ...})` with `k` atoms; element `i` is the set with mask `i`.
    pub fn powerset(k: usize) -> Self {
        assert!(k <= 12, "powerset too large");
        let atoms: Vec<char> = (b'a'..=b'z').map(char::from).take(k).collect();
        let names = (0..1usize << k)
            .map(|m| {
                let s: Vec<String> = (0..k)
                    .filter(|i| m >> i & 1 == 1)
                    .map(|i| atoms[i].to_string())
                    .collect();
                format!("{{{}}}", s.join(","))
            })
            .collect();
        let poset = Poset::from_le(names, |a, b| a & b == a).expect("inclusion is an order");
        let n = poset.size();
        ToyLattice {
            poset,
            join: (0..n * n).map(|i| (i / n) | (i % n)).collect(),
            meet: (0..n * n).map(|i| (i / n) & (i % n)).collect(),
            bot: 0,
            top: n - 1,
        }
    }

    /// `⊥ ⊑ 0, 1 ⊑ ⊤` with `0`, `1` incomparable.
    pub fn diamond() -> Self {
        let p = Poset::named(
            &["⊥", "0", "1", "⊤"],
            &[("⊥", "0"), ("⊥", "1"), ("0", "⊤"), ("1", "⊤")],
        )
        .expect("diamond");
        Self::from_poset(p).expect("diamond is a lattice")
    }

    /// `0 ⊑ 1 ⊑ ... ⊑ k-1`
    pub fn chain(k: usize) -> Self {
        let names = (0..k).map(|i| i.to_string()).collect();
        Self::from_poset(Poset::from_le(names, |a, b| a <= b).expect("chain")).expect("chain")
    }

    pub fn poset(&self) -> &Poset {
        &self.poset
    }

    pub fn join(&self, a: usize, b: usize) -> usize {
        self.join[a * self.size() + b]
    }

    pub fn meet(&self, a: usize, b: usize) -> usize {
        self.meet[a * self.size() + b]
    }

    pub fn bot(&self) -> usize {
        self.bot
    }

    pub fn top(&self) -> usize {
        self.top
    }

    pub fn join_all(&self, s: &HyperSubset) -> usize {
        s.ones().fold(self.bot, |acc, a| self.join(acc, a))
    }

    pub fn meet_all(&self, s: &HyperSubset) -> usize {
        s.ones().fold(self.top, |acc, a| self.meet(acc, a))
    }
}

/// `⊔𝒫`
pub fn alpha_join(l: &ToyLattice, p: &HyperSubset) -> usize {
    l.join_all(p)
}

/// `{P | P ⊑ q}`
pub fn gamma_join(l: &ToyLattice, q: usize) -> HyperSubset {
    l.down(q).clone()
}

/// `{h(P) | P ∈ 𝒫}`
pub fn homomorphic(n: usize, h: impl Fn(usize) -> usize, p: &HyperSubset) -> HyperSubset {
    subset(n, p.ones().map(h))
}

/// `𝒫 ∩ 𝕀`
pub fn eliminate(p: &HyperSubset, keep: &HyperSubset) -> HyperSubset {
    let mut out = p.clone();
    out.intersect_with(keep);
    out
}

/// `{P | P ⊑ ⊔𝒫}`; needs the join of `𝒫` to exist.
pub fn principal_ideal(l: &Poset, p: &HyperSubset) -> Result<HyperSubset> {
    let j = l
        .lub(p)
        .ok_or_else(|| Error::Lattice("the join does not exist".into()))?;
    Ok(l.down(j).clone())
}

/// `{P | ⊓𝒫 ⊑ P}`
pub fn principal_filter(l: &Poset, p: &HyperSubset) -> Result<HyperSubset> {
    let m = l
        .glb(p)
        .ok_or_else(|| Error::Lattice("the meet does not exist".into()))?;
    Ok(l.up(m).clone())
}

/// Down-closure.
pub fn order_ideal(l: &Poset, p: &HyperSubset) -> HyperSubset {
    l.down_closure(p)
}

/// Up-closure.
pub fn order_filter(l: &Poset, p: &HyperSubset) -> HyperSubset {
    l.up_closure(p)
}

/// Minimal elements of `𝒫`. Elements above a declared decreasing family
/// lying in `𝒫` are not minimal: the chain continues below them.
pub fn frontier_min(l: &Poset, p: &HyperSubset) -> HyperSubset {
    let mut out = l.minimal(p);
    for f in l.families_in(p, Direction::Down) {
        for &e in &f.elements {
            out.difference_with(l.up(e));
        }
    }
    out
}

/// Maximal elements of `𝒫`, dually.
pub fn frontier_max(l: &Poset, p: &HyperSubset) -> HyperSubset {
    let mut out = l.maximal(p);
    for f in l.families_in(p, Direction::Up) {
        for &e in &f.elements {
            out.difference_with(l.down(e));
        }
    }
    out
}

/// Up-closure of the lower frontier.
pub fn frontier_order_filter(l: &Poset, p: &HyperSubset) -> HyperSubset {
    l.up_closure(&frontier_min(l, p))
}

/// Down-closure of the upper frontier.
pub fn frontier_order_ideal(l: &Poset, p: &HyperSubset) -> HyperSubset {
    l.down_closure(&frontier_max(l, p))
}

fn chain_limits(l: &Poset, p: &HyperSubset, dir: Direction) -> HyperSubset {
    let mut out = p.clone();
    for f in l.families_in(p, dir) {
        if let Some(lim) = f.limit {
            out.insert(lim);
        }
    }
    out
}

/// `𝒫` plus the glb of every declared decreasing family inside `𝒫`.
/// Finite chains contain their glb already.
pub fn chain_down(l: &Poset, p: &HyperSubset) -> HyperSubset {
    chain_limits(l, p, Direction::Down)
}

pub fn chain_up(l: &Poset, p: &HyperSubset) -> HyperSubset {
    chain_limits(l, p, Direction::Up)
}

fn star(l: &Poset, p: &HyperSubset, dir: Direction) -> Result<HyperSubset> {
    let cap = l.families().len() + l.size() + 1;
    let mut x = p.clone();
    for _ in 0..cap {
        let next = chain_limits(l, &x, dir);
        if next == x {
            return Ok(x);
        }
        x = next;
    }
    Err(Error::Lattice(format!("chain closure did not stabilize within {cap} rounds")))
}

/// Least `X ⊇ 𝒫` closed under declared decreasing-chain limits.
pub fn chain_down_star(l: &Poset, p: &HyperSubset) -> Result<HyperSubset> {
    star(l, p, Direction::Down)
}

pub fn chain_up_star(l: &Poset, p: &HyperSubset) -> Result<HyperSubset> {
    star(l, p, Direction::Up)
}

/// `{P ∈ 𝒫 | ↓P ⊆ 𝒫}`
pub fn rho_subseteq(l: &Poset, p: &HyperSubset) -> HyperSubset {
    subset(l.size(), p.ones().filter(|&a| l.down(a).is_subset(p)))
}

/// `{P ∈ 𝒳 | F ⊑ P ∧ [F, P] ⊆ 𝒳}`
pub fn phi_subseteq(l: &Poset, f: usize, x: &HyperSubset) -> HyperSubset {
    subset(
        l.size(),
        l.up(f).ones().filter(|&a| {
            x.contains(a) && l.up(f).intersection(l.down(a)).all(|b| x.contains(b))
        }),
    )
}

/// `⋃ {φ(F)𝒫 | F minimal in 𝒫}`
pub fn rho_frontier(l: &Poset, p: &HyperSubset) -> HyperSubset {
    let mut out = l.empty();
    for f in frontier_min(l, p).ones() {
        out.union_with(&phi_subseteq(l, f, p));
    }
    out
}

/// Named operators, for composition and for the conjunctive abstraction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Op {
    Identity,
    OrderIdeal,
    OrderFilter,
    PrincipalIdeal,
    PrincipalFilter,
    FrontierMin,
    FrontierMax,
    FrontierOrderIdeal,
    FrontierOrderFilter,
    ChainDown,
    ChainUp,
    ChainDownStar,
    ChainUpStar,
    RhoSubseteq,
    RhoFrontier,
}

/// Which side of the conjunctive abstraction an operator may stand on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OpClass {
    /// Images are down-closed.
    Ideal,
    /// Images are up-closed.
    Filter,
    Other,
}

impl Op {
    pub const ALL: [Op; 15] = [
        Op::Identity,
        Op::OrderIdeal,
        Op::OrderFilter,
        Op::PrincipalIdeal,
        Op::PrincipalFilter,
        Op::FrontierMin,
        Op::FrontierMax,
        Op::FrontierOrderIdeal,
        Op::FrontierOrderFilter,
        Op::ChainDown,
        Op::ChainUp,
        Op::ChainDownStar,
        Op::ChainUpStar,
        Op::RhoSubseteq,
        Op::RhoFrontier,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Op::Identity => "identity",
            Op::OrderIdeal => "order_ideal",
            Op::OrderFilter => "order_filter",
            Op::PrincipalIdeal => "principal_ideal",
            Op::PrincipalFilter => "principal_filter",
            Op::FrontierMin => "frontier_min",
            Op::FrontierMax => "frontier_max",
            Op::FrontierOrderIdeal => "frontier_order_ideal",
            Op::FrontierOrderFilter => "frontier_order_filter",
            Op::ChainDown => "chain_down",
            Op::ChainUp => "chain_up",
            Op::ChainDownStar => "chain_down_star",
            Op::ChainUpStar => "chain_up_star",
            Op::RhoSubseteq => "rho_subseteq",
            Op::RhoFrontier => "rho_frontier",
        }
    }

    pub fn from_name(s: &str) -> Option<Op> {
        Op::ALL.into_iter().find(|o| o.name() == s)
    }

    pub fn class(self) -> OpClass {
        match self {
            Op::OrderIdeal | Op::PrincipalIdeal | Op::FrontierOrderIdeal => OpClass::Ideal,
            Op::OrderFilter | Op::PrincipalFilter | Op::FrontierOrderFilter => OpClass::Filter,
            _ => OpClass::Other,
        }
    }

    pub fn apply(self, l: &Poset, p: &HyperSubset) -> Result<HyperSubset> {
        Ok(match self {
            Op::Identity => p.clone(),
            Op::OrderIdeal => order_ideal(l, p),
            Op::OrderFilter => order_filter(l, p),
            Op::PrincipalIdeal => principal_ideal(l, p)?,
            Op::PrincipalFilter => principal_filter(l, p)?,
            Op::FrontierMin => frontier_min(l, p),
            Op::FrontierMax => frontier_max(l, p),
            Op::FrontierOrderIdeal => frontier_order_ideal(l, p),
            Op::FrontierOrderFilter => frontier_order_filter(l, p),
            Op::ChainDown => chain_down(l, p),
            Op::ChainUp => chain_up(l, p),
            Op::ChainDownStar => chain_down_star(l, p)?,
            Op::ChainUpStar => chain_up_star(l, p)?,
            Op::RhoSubseteq => rho_subseteq(l, p),
            Op::RhoFrontier => rho_frontier(l, p),
        })
    }
}

/// `α₁(𝒫) ∩ α₂(𝒫)` with `α₁` ideal-like and `α₂` filter-like.
pub fn conjunctive(l: &Poset, a1: Op, a2: Op, p: &HyperSubset) -> Result<HyperSubset> {
    if a1.class() != OpClass::Ideal || a2.class() != OpClass::Filter {
        return Err(Error::Input(format!(
            "conjunctive abstraction needs an ideal and a filter operator, got {} and {}",
            a1.name(),
            a2.name()
        )));
    }
    let mut out = a1.apply(l, p)?;
    out.intersect_with(&a2.apply(l, p)?);
    Ok(out)
}

/// Sets of the form `[lo, hi]` of elements between two elements.
pub fn interval(l: &Poset, lo: usize, hi: usize) -> HyperSubset {
    let mut out = l.up(lo).clone();
    out.intersect_with(l.down(hi));
    out
}

/// `P` is convex: `a, b ∈ P` and `a ⊑ c ⊑ b` imply `c ∈ P`.
pub fn is_convex(l: &Poset, p: &HyperSubset) -> bool {
    p.ones()
        .all(|a| p.ones().all(|b| !l.le(a, b) || interval(l, a, b).is_subset(p)))
}

/// The kind of closure an operator should be.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClosureKind {
    /// Increasing, extensive, idempotent.
    Upper,
    /// Increasing, reductive, idempotent.
    Lower,
    /// Reductive and idempotent only.
    Kernel,
}

/// First violation of each law, if any.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LawReport {
    pub checked: usize,
    pub increasing: Option<(HyperSubset, usize)>,
    pub bounded: Option<HyperSubset>,
    pub idempotent: Option<HyperSubset>,
}

impl LawReport {
    pub fn ok(&self) -> bool {
        self.increasing.is_none() && self.bounded.is_none() && self.idempotent.is_none()
    }
}

/// Checks closure laws of `f` on the given sets. Monotonicity is checked on
/// one-element extensions `𝒫 ⊆ 𝒫 ∪ {x}`, which generate inclusion.
pub fn closure_laws(
    n: usize,
    sets: impl IntoIterator<Item = HyperSubset>,
    kind: ClosureKind,
    f: impl Fn(&HyperSubset) -> HyperSubset,
) -> LawReport {
    let mut r = LawReport::default();
    for p in sets {
        r.checked += 1;
        let fp = f(&p);
        let bounded = match kind {
            ClosureKind::Upper => p.is_subset(&fp),
            ClosureKind::Lower | ClosureKind::Kernel => fp.is_subset(&p),
        };
        if !bounded && r.bounded.is_none() {
            r.bounded = Some(p.clone());
        }
        if r.idempotent.is_none() && f(&fp) != fp {
            r.idempotent = Some(p.clone());
        }
        if kind != ClosureKind::Kernel && r.increasing.is_none() {
            if let Some(x) = (0..n).filter(|&x| !p.contains(x)).find(|&x| {
                let mut q = p.clone();
                q.insert(x);
                !fp.is_subset(&f(&q))
            }) {
                r.increasing = Some((p.clone(), x));
            }
        }
    }
    r
}

/// `∀∃`: `{P | ∀π ∈ P. ∃π' ∈ P. (π, π') ∈ A}` over `℘(Π)` with `|Π| = k`.
pub fn aeh(k: usize, a: impl Fn(usize, usize) -> bool) -> HyperSubset {
    members(k, |p| {
        bits(k, p).all(|x| bits(k, p).any(|y| a(x, y)))
    })
}

/// `∀∀`: `{P | ∀π, π' ∈ P. (π, π') ∈ A}`
pub fn aah(k: usize, a: impl Fn(usize, usize) -> bool) -> HyperSubset {
    members(k, |p| {
        bits(k, p).all(|x| bits(k, p).all(|y| a(x, y)))
    })
}

/// `∃∀`: `{P | ∃π ∈ P. ∀π' ∈ P. (π, π') ∈ A}`
pub fn eah(k: usize, a: impl Fn(usize, usize) -> bool) -> HyperSubset {
    members(k, |p| {
        bits(k, p).any(|x| bits(k, p).all(|y| a(x, y)))
    })
}

fn bits(k: usize, m: usize) -> impl Iterator<Item = usize> {
    (0..k).filter(move |i| m >> i & 1 == 1)
}

fn members(k: usize, pred: impl Fn(usize) -> bool) -> HyperSubset {
    subset(1 << k, (0..1usize << k).filter(|&m| pred(m)))
}

fn var(space: &StateSpace, x: &str) -> Result<usize> {
    space
        .var_index(x)
        .ok_or_else(|| Error::Unbound(x.to_string()))
}

/// Noninterference on terminating executions: equal low inputs give equal
/// low outputs.
pub fn ni(space: &StateSpace, low: &str) -> Result<HyperOracle> {
    let l = var(space, low)?;
    let sp = space.clone();
    Ok(HyperOracle::new(format!("ni:{low}"), move |t: &SemTriple| {
        let v = |s: usize| sp.value(s, l);
        let pairs: Vec<_> = t.e.pairs().collect();
        pairs.iter().all(|&(a1, b1)| {
            pairs
                .iter()
                .all(|&(a2, b2)| v(a1) != v(a2) || v(b1) == v(b2))
        })
    }))
}

/// Generalized noninterference: for executions 1 and 2 with equal low
/// inputs some execution 3 has 1's low input, 2's high input and 1's low
/// output.
pub fn gni(space: &StateSpace, low: &str, high: &str) -> Result<HyperOracle> {
    let (l, h) = (var(space, low)?, var(space, high)?);
    let sp = space.clone();
    Ok(HyperOracle::new(format!("gni:{low},{high}"), move |t: &SemTriple| {
        let v = |s: usize, x: usize| sp.value(s, x);
        let pairs: Vec<_> = t.e.pairs().collect();
        pairs.iter().all(|&(a1, b1)| {
            pairs.iter().all(|&(a2, _)| {
                v(a1, l) != v(a2, l)
                    || pairs.iter().any(|&(a3, b3)| {
                        v(a3, l) == v(a1, l) && v(a3, h) == v(a2, h) && v(b3, l) == v(b1, l)
                    })
            })
        })
    }))
}

/// Generalized dependency: executions 1 and 2 with equal low inputs such
/// that no execution with that low input and 2's high input ends with 1's
/// low output.
pub fn gd(space: &StateSpace, low: &str, high: &str) -> Result<HyperOracle> {
    let (l, h) = (var(space, low)?, var(space, high)?);
    let sp = space.clone();
    Ok(HyperOracle::new(format!("gd:{low},{high}"), move |t: &SemTriple| {
        let v = |s: usize, x: usize| sp.value(s, x);
        let pairs: Vec<_> = t.e.pairs().collect();
        pairs.iter().any(|&(a1, b1)| {
            pairs.iter().any(|&(a2, _)| {
                v(a1, l) == v(a2, l)
                    && pairs.iter().all(|&(a3, b3)| {
                        v(a3, l) != v(a1, l) || v(a3, h) != v(a2, h) || v(b3, l) != v(b1, l)
                    })
            })
        })
    }))
}

/// Resolves `true`, `false`, `terminating`, `ni:L`, `gni:L,H`, `gd:L,H`.
pub fn named_oracle(name: &str, space: &StateSpace) -> Result<HyperOracle> {
    let (head, args) = name.split_once(':').unwrap_or((name, ""));
    let args: Vec<&str> = args.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    let unknown = || Error::Input(format!("unknown oracle `{name}`"));
    match (head, args.as_slice()) {
        ("true", []) => Ok(HyperOracle::all()),
        ("false", []) => Ok(HyperOracle::none()),
        ("terminating", []) => Ok(HyperOracle::new("terminating", |t: &SemTriple| {
            t.inf.is_empty()
        })),
        ("ni", [l]) => ni(space, l),
        ("gni", [l, h]) => gni(space, l, h),
        ("gd", [l, h]) => gd(space, l, h),
        _ => Err(unknown()),
    }
}

/// On-disk lattice description.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LatticeFile {
    pub elements: Vec<String>,
    #[serde(default)]
    pub order: Vec<(String, String)>,
    #[serde(default)]
    pub families: Vec<FamilyFile>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FamilyFile {
    pub family: String,
    pub elements: Vec<String>,
    #[serde(default)]
    pub limit: Option<String>,
    #[serde(default)]
    pub direction: Direction,
}

impl LatticeFile {
    pub fn build(&self) -> Result<Poset> {
        let names: Vec<&str> = self.elements.iter().map(String::as_str).collect();
        let pairs: Vec<(&str, &str)> = self
            .order
            .iter()
            .map(|(a, b)| (a.as_str(), b.as_str()))
            .collect();
        let mut p = Poset::named(&names, &pairs)?;
        for f in &self.families {
            let els: Vec<&str> = f.elements.iter().map(String::as_str).collect();
            p = p.with_family(&f.family, &els, f.limit.as_deref(), f.direction)?;
        }
        Ok(p)
    }
}

pub fn parse_lattice(json: &str) -> Result<Poset> {
    let f: LatticeFile =
        serde_json::from_str(json).map_err(|e| Error::Lattice(format!("bad lattice file: {e}")))?;
    f.build()
}

/// Lattice of the non-idempotence example: `Xⁱʲ` decreasing in `j` towards
/// `Yⁱ`, the `Yⁱ` decreasing towards `⊥`, `⊤` above everything.
pub fn two_level_chains() -> ChainPoset {
    let mut names = vec!["⊥".to_string(), "⊤".to_string()];
    let mut pairs: Vec<(String, String)> = Vec::new();
    for i in 1..=3 {
        names.push(format!("Y{i}"));
        if i < 3 {
            pairs.push((format!("Y{}", i + 1), format!("Y{i}")));
        }
        for j in 1..=3 {
            names.push(format!("X{i}{j}"));
            let below = if j < 3 { format!("X{i}{}", j + 1) } else { format!("Y{i}") };
            pairs.push((below, format!("X{i}{j}")));
            pairs.push((format!("X{i}{j}"), "⊤".into()));
        }
    }
    pairs.push(("⊥".into(), "Y3".into()));
    let file = LatticeFile {
        elements: names,
        order: pairs,
        families: (1..=3)
            .map(|i| FamilyFile {
                family: format!("X{i}*"),
                elements: (1..=3).map(|j| format!("X{i}{j}")).collect(),
                limit: Some(format!("Y{i}")),
                direction: Direction::Down,
            })
            .chain([FamilyFile {
                family: "Y*".into(),
                elements: (1..=3).map(|i| format!("Y{i}")).collect(),
                limit: Some("⊥".into()),
                direction: Direction::Down,
            }])
            .collect(),
    };
    file.build().expect("well-formed presentation")
}

/// Two incomparable decreasing chains `a0 ⊒ a1 ⊒ ...` and `b0 ⊒ b1 ⊒ ...`
/// without glb, listed up to index 3.
pub fn two_decreasing_chains() -> ChainPoset {
    let mut names = Vec::new();
    let mut pairs = Vec::new();
    for c in ["a", "b"] {
        for i in 0..4 {
            names.push(format!("{c}{i}"));
            if i > 0 {
                pairs.push((format!("{c}{i}"), format!("{c}{}", i - 1)));
            }
        }
    }
    let file = LatticeFile {
        elements: names,
        order: pairs,
        families: ["a", "b"]
            .iter()
            .map(|c| FamilyFile {
                family: format!("{c}*"),
                elements: (0..4).map(|i| format!("{c}{i}")).collect(),
                limit: None,
                direction: Direction::Down,
            })
            .collect(),
    };
    file.build().expect("well-formed presentation")
}

/// Finite sets `A0 ⊂ A1 ⊂ A2 ⊂ A3 ⊂ ...` of an infinite carrier, with the
/// whole carrier `N` as the limit of the increasing family.
pub fn finite_subsets_fragment() -> ChainPoset {
    let names: Vec<&str> = vec!["A0", "A1", "A2", "A3", "N"];
    let pairs = [("A0", "A1"), ("A1", "A2"), ("A2", "A3"), ("A3", "N")];
    Poset::named(&names, &pairs)
        .and_then(|p| p.with_family("A*", &["A0", "A1", "A2", "A3"], Some("N"), Direction::Up))
        .expect("well-formed presentation")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interpreter::sem;
    use crate::lang::parse;

    fn names(l: &Poset, s: &HyperSubset) -> Vec<String> {
        l.set_names(s)
    }

    #[test]
    fn powerset_tables_match_the_order() {
        let fast = ToyLattice::powerset(3);
        let slow = ToyLattice::from_poset(fast.poset().clone()).unwrap();
        for a in 0..8 {
            for b in 0..8 {
                assert_eq!(fast.join(a, b), slow.join(a, b));
                assert_eq!(fast.meet(a, b), slow.meet(a, b));
            }
        }
        assert_eq!((fast.bot(), fast.top()), (slow.bot(), slow.top()));
    }

    #[test]
    fn poset_rejects_cycles_and_bad_tables() {
        assert!(Poset::named(&["a", "b"], &[("a", "b"), ("b", "a")]).is_err());
        assert!(Poset::named(&["a", "a"], &[]).is_err());
        let two = Poset::named(&["a", "b"], &[]).unwrap();
        assert!(ToyLattice::from_poset(two).is_err());
        let names = vec!["0".to_string(), "1".to_string()];
        let leq = vec![vec![true, true], vec![false, true]];
        let good_join = vec![vec![0, 1], vec![1, 1]];
        let meet = vec![vec![0, 0], vec![0, 1]];
        assert!(ToyLattice::from_tables(names.clone(), &leq, &good_join, &meet).is_ok());
        let bad_join = vec![vec![0, 0], vec![1, 1]];
        assert!(ToyLattice::from_tables(names, &leq, &bad_join, &meet).is_err());
    }

    #[test]
    fn family_limit_is_validated() {
        let p = Poset::named(&["l", "a", "b"], &[("l", "b"), ("b", "a")]).unwrap();
        assert!(p.clone().with_family("f", &["a", "b"], Some("l"), Direction::Down).is_ok());
        assert!(p.clone().with_family("f", &["b", "a"], Some("l"), Direction::Down).is_err());
        assert!(p.with_family("f", &["a"], Some("l"), Direction::Down).is_err());
    }

    #[test]
    fn join_abstraction() {
        let l = ToyLattice::powerset(2);
        assert_eq!(alpha_join(&l, &l.empty()), l.bot());
        assert_eq!(alpha_join(&l, &subset(4, [0, 2])), 2);
        assert_eq!(alpha_join(&l, &subset(4, [1, 2])), 3);
        assert_eq!(gamma_join(&l, 3), l.carrier());
    }

    #[test]
    fn homomorphic_and_elimination() {
        let l = ToyLattice::powerset(2);
        let p = subset(4, [1, 3]);
        assert_eq!(homomorphic(4, |x| x, &p), p);
        assert_eq!(homomorphic(4, |_| l.bot(), &p), subset(4, [0]));
        assert_eq!(eliminate(&p, &l.carrier()), p);
        assert_eq!(eliminate(&p, &l.empty()), l.empty());
        // at most one element
        let small = subset(4, (0..4usize).filter(|m| m.count_ones() <= 1));
        assert_eq!(eliminate(&l.carrier(), &small), subset(4, [0, 1, 2]));
    }

    #[test]
    fn projector_drops_divergence() {
        let sp = StateSpace::uniform(&["y"], -3, 3).unwrap();
        let t = sem(&parse("while (y != 0) y = y - 1").unwrap(), &sp).unwrap();
        let ts = [t.clone()];
        let projected: Vec<SemTriple> = ts
            .iter()
            .map(|t| SemTriple {
                inf: crate::rel_domain::StateSet::empty(7),
                ..t.clone()
            })
            .collect();
        assert!(!t.inf.is_empty());
        assert!(projected[0].inf.is_empty());
        assert_eq!(projected[0].e, t.e);
    }

    #[test]
    fn ideals_and_filters() {
        let l = ToyLattice::powerset(2);
        assert_eq!(principal_ideal(&l, &subset(4, [3])).unwrap(), l.carrier());
        assert_eq!(principal_ideal(&l, &l.empty()).unwrap(), subset(4, [0]));
        assert_eq!(principal_ideal(&l, &subset(4, [1, 2])).unwrap(), l.carrier());
        let d = ToyLattice::diamond();
        let zero = d.set(&["0"]).unwrap();
        assert_eq!(names(&d, &order_ideal(&d, &zero)), ["⊥", "0"]);
        let bot = d.set(&["⊥"]).unwrap();
        assert_eq!(order_ideal(&d, &bot), bot);
    }

    #[test]
    fn frontier_is_not_increasing() {
        let d = ToyLattice::diamond();
        let p1 = d.set(&["⊤"]).unwrap();
        let p2 = d.set(&["0", "1", "⊤"]).unwrap();
        assert!(p1.is_subset(&p2));
        assert_eq!(names(&d, &frontier_min(&d, &p1)), ["⊤"]);
        assert_eq!(names(&d, &frontier_min(&d, &p2)), ["0", "1"]);
        let anti = d.set(&["0", "1"]).unwrap();
        assert_eq!(frontier_min(&d, &anti), anti);
        assert_eq!(frontier_order_filter(&d, &p1), p1);
    }

    #[test]
    fn down_closed_is_union_of_principal_ideals_of_maxima() {
        let l = ToyLattice::powerset(3);
        for p in all_subsets(8).map(|p| order_ideal(&l, &p)) {
            assert_eq!(frontier_order_ideal(&l, &p), p);
            let mut u = l.empty();
            for m in frontier_max(&l, &p).ones() {
                u.union_with(l.down(m));
            }
            assert_eq!(u, p);
        }
    }

    #[test]
    fn chain_limits_are_not_idempotent() {
        let cp = two_level_chains();
        let xs: Vec<String> = (1..=3)
            .flat_map(|i| (1..=3).map(move |j| format!("X{i}{j}")))
            .collect();
        let xs: Vec<&str> = xs.iter().map(String::as_str).collect();
        let p = cp.set(&xs).unwrap();
        let once = chain_down(&cp, &p);
        let mut with_y = xs.clone();
        with_y.extend(["Y1", "Y2", "Y3"]);
        assert_eq!(once, cp.set(&with_y).unwrap());
        let twice = chain_down(&cp, &once);
        with_y.push("⊥");
        assert_eq!(twice, cp.set(&with_y).unwrap());
        assert_ne!(once, twice);
        assert_eq!(chain_down_star(&cp, &p).unwrap(), twice);
        // the star is a fixpoint of one step
        assert_eq!(chain_down(&cp, &twice), twice);
    }

    #[test]
    fn frontier_filter_on_two_decreasing_chains() {
        let cp = two_decreasing_chains();
        let all = cp.carrier();
        assert!(frontier_order_filter(&cp, &all).is_clear());
        let p = cp.set(&["a0", "a1", "a2", "a3", "b0"]).unwrap();
        let fp = frontier_order_filter(&cp, &p);
        assert_eq!(names(&cp, &fp), ["b0"]);
        // neither increasing nor extensive
        assert!(!fp.is_subset(&frontier_order_filter(&cp, &all)));
        assert!(!all.is_subset(&frontier_order_filter(&cp, &all)));
    }

    #[test]
    fn max_frontier_of_finite_sets_is_empty() {
        let cp = finite_subsets_fragment();
        let f = cp.set(&["A0", "A1", "A2", "A3"]).unwrap();
        assert_eq!(order_ideal(&cp, &f), f);
        assert!(frontier_max(&cp, &f).is_clear());
        assert!(frontier_order_ideal(&cp, &f).is_clear());
        assert_eq!(names(&cp, &chain_up(&cp, &f)), ["A0", "A1", "A2", "A3", "N"]);
    }

    #[test]
    fn rho_operators() {
        let l = ToyLattice::powerset(2);
        let down = order_ideal(&l, &subset(4, [1]));
        assert_eq!(rho_subseteq(&l, &down), down);
        let p = subset(4, [1, 3]);
        assert_eq!(rho_subseteq(&l, &p), l.empty());
        assert_eq!(phi_subseteq(&l, 1, &p), p);
        assert_eq!(rho_frontier(&l, &p), p);
        let gap = subset(4, [0, 3]);
        assert_eq!(rho_frontier(&l, &gap), subset(4, [0]));
    }

    #[test]
    fn conjunctive_needs_ideal_and_filter() {
        let l = ToyLattice::diamond();
        let p = l.set(&["0", "⊤"]).unwrap();
        assert_eq!(conjunctive(&l, Op::OrderIdeal, Op::OrderFilter, &p).unwrap(), p);
        assert!(conjunctive(&l, Op::OrderIdeal, Op::OrderFilter, &l.empty())
            .unwrap()
            .is_clear());
        assert!(conjunctive(&l, Op::OrderFilter, Op::OrderIdeal, &p).is_err());
    }

    #[test]
    fn lattice_file_roundtrip() {
        let json = r#"{"elements":["b","t"],"order":[["b","t"]],
            "families":[{"family":"f","elements":["t"],"limit":"b"}]}"#;
        let p = parse_lattice(json).unwrap();
        assert!(p.le(0, 1));
        assert_eq!(p.families()[0].limit, Some(0));
        assert!(parse_lattice(r#"{"elements":["a"],"order":[["a","z"]]}"#).is_err());
    }

    #[test]
    fn hyperproperty_families() {
        assert_eq!(aeh(2, |x, y| x == y), subset(4, 0..4));
        // ∀∀ with A = equality: at most one element
        assert_eq!(aah(2, |x, y| x == y), subset(4, [0, 1, 2]));
        assert_eq!(eah(2, |_, _| true), subset(4, [1, 2, 3]));
    }

    #[test]
    fn information_flow_oracles() {
        let sp = StateSpace::uniform(&["l", "h"], 0, 1).unwrap();
        let konst = sem(&parse("l = 0").unwrap(), &sp).unwrap();
        let leak = sem(&parse("l = h").unwrap(), &sp).unwrap();
        let ni = named_oracle("ni:l", &sp).unwrap();
        assert!(ni.contains(&konst));
        assert!(!ni.contains(&leak));
        let gni = named_oracle("gni:l,h", &sp).unwrap();
        let gd = named_oracle("gd:l,h", &sp).unwrap();
        assert!(gni.contains(&konst) && !gd.contains(&konst));
        assert!(!gni.contains(&leak) && gd.contains(&leak));
        assert!(named_oracle("ni:z", &sp).is_err());
        assert!(named_oracle("bogus", &sp).is_err());
    }
}
