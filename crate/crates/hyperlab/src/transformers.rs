//! Strongest-postcondition transformers on triples and on sets of triples.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::interpreter::{divergence, lfp, rel_cap};
use crate::lang::{BExpr, Stmt};
use crate::rel_domain::{prim, Prim, Rel, SemTriple, StateSet, StateSpace};

/// An explicit finite set of triples, canonically ordered.
pub type HyperSet = BTreeSet<SemTriple>;

/// A membership predicate on triples.
#[derive(Clone)]
pub struct HyperOracle {
    pub name: String,
    pred: Arc<dyn Fn(&SemTriple) -> bool + Send + Sync>,
}

impl fmt::Debug for HyperOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HyperOracle({})", self.name)
    }
}

impl HyperOracle {
    pub fn new(name: impl Into<String>, f: impl Fn(&SemTriple) -> bool + Send + Sync + 'static) -> Self {
        HyperOracle {
            name: name.into(),
            pred: Arc::new(f),
        }
    }

    pub fn from_set(name: impl Into<String>, set: HyperSet) -> Self {
        Self::new(name, move |t| set.contains(t))
    }

    pub fn all() -> Self {
        Self::new("true", |_| true)
    }

    pub fn none() -> Self {
        Self::new("false", |_| false)
    }

    pub fn contains(&self, t: &SemTriple) -> bool {
        (self.pred)(t)
    }

    pub fn and(&self, o: &HyperOracle) -> HyperOracle {
        let (a, b) = (self.clone(), o.clone());
        Self::new(format!("{} & {}", a.name, b.name), move |t| {
            a.contains(t) && b.contains(t)
        })
    }

    pub fn or(&self, o: &HyperOracle) -> HyperOracle {
        let (a, b) = (self.clone(), o.clone());
        Self::new(format!("{} | {}", a.name, b.name), move |t| {
            a.contains(t) || b.contains(t)
        })
    }
}

/// `post(S)P = P ; S`
pub fn post(s_sem: &SemTriple, p: &SemTriple) -> SemTriple {
    p.compose(s_sem)
}

/// Largest `P` with `post(S)P ⊑ Q`, computed pair by pair.
pub fn pre_tilde(s_sem: &SemTriple, q: &SemTriple) -> SemTriple {
    let n = s_sem.n();
    let mut e = Rel::empty(n);
    for s0 in 0..n {
        for s in 0..n {
            let through_e = s_sem.e.row(s).ones().all(|s1| q.e.contains(s0, s1));
            let through_br = s_sem.br.row(s).ones().all(|s1| q.br.contains(s0, s1));
            let through_inf = !s_sem.inf.contains(s) || q.inf.contains(s0);
            if through_e && through_br && through_inf {
                e.insert(s0, s);
            }
        }
    }
    SemTriple {
        e,
        inf: q.inf.clone(),
        br: q.br.clone(),
    }
}

/// Elementwise image.
pub fn post_hyper(s_sem: &SemTriple, ps: &HyperSet) -> HyperSet {
    ps.iter().map(|p| post(s_sem, p)).collect()
}

/// Every triple on a space of `n` states. Only for `n ≤ 2`.
pub fn all_triples(n: usize) -> Result<Vec<SemTriple>> {
    if n > 2 {
        return Err(Error::Input(format!(
            "exhaustive enumeration needs at most 2 states, got {n}"
        )));
    }
    let rels: Vec<Rel> = (0..1u32 << (n * n))
        .map(|m| Rel::from_pairs(n, (0..n * n).filter(|i| m >> i & 1 == 1).map(|i| (i / n, i % n))))
        .collect();
    let sets: Vec<StateSet> = (0..1u32 << n)
        .map(|m| StateSet::from_iter(n, (0..n).filter(|i| m >> i & 1 == 1)))
        .collect();
    let mut out = Vec::with_capacity(rels.len() * rels.len() * sets.len());
    for e in &rels {
        for inf in &sets {
            for br in &rels {
                out.push(SemTriple {
                    e: e.clone(),
                    inf: inf.clone(),
                    br: br.clone(),
                });
            }
        }
    }
    Ok(out)
}

/// `Pre(S)Q = {P | post(S)P ∈ Q}` over the enumerable lattice of triples.
pub fn pre_hyper_toy(s_sem: &SemTriple, q: &HyperOracle) -> Result<HyperSet> {
    Ok(all_triples(s_sem.n())?
        .into_iter()
        .filter(|p| q.contains(&post(s_sem, p)))
        .collect())
}

/// `post(S)P` computed by structural recursion on `S`, without first
/// computing the semantics of compound statements.
pub fn post_struct(s: &Stmt, p: &SemTriple, space: &StateSpace) -> Result<SemTriple> {
    Ok(match s {
        Stmt::Skip => post(&prim(Prim::Skip, space)?, p),
        Stmt::Break => post(&prim(Prim::Break, space)?, p),
        Stmt::Assign(x, a) => post(&prim(Prim::Assign(x, a), space)?, p),
        Stmt::RandAssign(x, lo, hi) => post(&prim(Prim::RandAssign(x, *lo, *hi), space)?, p),
        Stmt::Test(b) => post(&prim(Prim::Test(b), space)?, p),
        Stmt::Seq(a, b) => post_struct(b, &post_struct(a, p, space)?, space)?,
        Stmt::If(c, a, b) => {
            let t = post_struct(a, &post_test(c, p, space)?, space)?;
            let f = post_struct(b, &post_test(&c.clone().not(), p, space)?, space)?;
            t.join(&f)
        }
        Stmt::While(c, body) => post_while_struct(c, body, p, space)?,
    })
}

/// `post(B)P`
pub fn post_test(b: &BExpr, p: &SemTriple, space: &StateSpace) -> Result<SemTriple> {
    Ok(post(&prim(Prim::Test(b), space)?, p))
}

/// `post(B; S)P`
pub fn post_step(b: &BExpr, body: &Stmt, p: &SemTriple, space: &StateSpace) -> Result<SemTriple> {
    post_struct(body, &post_test(b, p, space)?, space)
}

/// The components of `post(while (B) S)P` as used by the loop rules.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WhilePost {
    /// `P_e = lfp X. P.e ∪ post(B;S)<X,∅,∅>.e`
    pub pe: Rel,
    /// `post(¬B)<P_e,∅,∅>`
    pub exit: SemTriple,
    /// `post(B;S)<P_e,∅,∅>`
    pub step: SemTriple,
    /// Starts of infinitely many terminating iterations (a gfp).
    pub div: StateSet,
}

impl WhilePost {
    pub fn result(&self, p: &SemTriple) -> SemTriple {
        SemTriple {
            e: self.exit.e.union(&self.step.br),
            inf: p.inf.union(&self.step.inf).union(&self.pe.preimage(&self.div)),
            br: p.br.clone(),
        }
    }
}

pub fn post_while_parts(b: &BExpr, body: &Stmt, p: &SemTriple, space: &StateSpace) -> Result<WhilePost> {
    let n = space.size();
    let mut err = None;
    let pe = lfp(
        |x: &Rel| match post_step(b, body, &SemTriple::from_e(x.clone()), space) {
            Ok(t) => p.e.union(&t.e),
            Err(e) => {
                err.get_or_insert(e);
                x.clone()
            }
        },
        Rel::empty(n),
        rel_cap(n),
    )?
    .result;
    if let Some(e) = err {
        return Err(e);
    }
    let at_entry = SemTriple::from_e(pe.clone());
    let exit = post_test(&b.clone().not(), &at_entry, space)?;
    let step = post_step(b, body, &at_entry, space)?;
    let step_e = post_step(b, body, &SemTriple::init(n), space)?.e;
    let div = divergence(&step_e)?.result;
    Ok(WhilePost {
        pe,
        exit,
        step,
        div,
    })
}

fn post_while_struct(b: &BExpr, body: &Stmt, p: &SemTriple, space: &StateSpace) -> Result<SemTriple> {
    Ok(post_while_parts(b, body, p, space)?.result(p))
}

/// `{post(S)P | P ∈ 𝒫}` by the structural rules, one image per `P`.
pub fn post_structural(s: &Stmt, ps: &HyperSet, space: &StateSpace) -> Result<HyperSet> {
    s.validate_breaks()?;
    space.check_bound(s)?;
    ps.iter().map(|p| post_struct(s, p, space)).collect()
}

/// The untied variant for conditionals: every image of the first branch
/// joined with every image of the second.
pub fn post_if_cross(
    b: &BExpr,
    s1: &Stmt,
    s2: &Stmt,
    ps: &HyperSet,
    space: &StateSpace,
) -> Result<HyperSet> {
    let mut q1 = HyperSet::new();
    let mut q2 = HyperSet::new();
    for p in ps {
        q1.insert(post_struct(s1, &post_test(b, p, space)?, space)?);
        q2.insert(post_struct(s2, &post_test(&b.clone().not(), p, space)?, space)?);
    }
    Ok(q1.iter().flat_map(|a| q2.iter().map(move |c| a.join(c))).collect())
}

#[derive(Clone, Debug)]
pub struct WeakWhile {
    /// Exit relations, as `<e, ∅, ∅>` triples.
    pub result: HyperSet,
    /// Largest number of iterations needed for any `P` to stabilize.
    pub stabilization: usize,
}

/// Weak hypercollecting semantics of `while (B) S`:
/// `{Yⁿ ∘ (¬B ∪ brS) | P ∈ 𝒫, n ≤ N}` with `Yⁿ = P.e ∘ ⋃_{i≤n} (B;S)ᵢ`.
/// For break-free bodies this is `{post(¬B) Xⁿ(P)}` where
/// `Xⁿ(P) = post(if (B) S else skip)ⁿ P`.
pub fn post_weak_while(b: &BExpr, body: &Stmt, ps: &HyperSet, space: &StateSpace) -> Result<WeakWhile> {
    let n = space.size();
    let step = post_step(b, body, &SemTriple::init(n), space)?;
    let exit = prim(Prim::Test(&b.clone().not()), space)?.e.union(&step.br);
    let mut result = HyperSet::new();
    let mut stabilization = 0;
    for p in ps {
        let mut y = p.e.clone();
        let mut k = 0;
        loop {
            result.insert(SemTriple::from_e(y.compose(&exit)));
            let next = y.union(&y.compose(&step.e));
            if next == y {
                break;
            }
            y = next;
            k += 1;
        }
        stabilization = stabilization.max(k);
    }
    Ok(WeakWhile {
        result,
        stabilization,
    })
}

/// Iterates `Xⁿ(P) = post(if (B) S else skip)ⁿ P` on the `e` component
/// until they repeat; returns the distinct iterates in order.
pub fn if_skip_iterates(b: &BExpr, body: &Stmt, p: &Rel, space: &StateSpace) -> Result<Vec<Rel>> {
    let n = space.size();
    let step = post_step(b, body, &SemTriple::init(n), space)?.e;
    let f = step.union(&prim(Prim::Test(&b.clone().not()), space)?.e);
    let mut out: Vec<Rel> = Vec::new();
    let mut x = p.clone();
    while !out.contains(&x) {
        out.push(x.clone());
        x = x.compose(&f);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interpreter::sem;
    use crate::lang::parse;

    fn s1() -> (Stmt, StateSpace) {
        (
            parse("while (y != 0) y = y - 1").unwrap(),
            StateSpace::uniform(&["y"], -3, 3).unwrap(),
        )
    }

    #[test]
    fn post_of_init_and_infinitary() {
        let (s, sp) = s1();
        let t = sem(&s, &sp).unwrap();
        assert_eq!(post(&t, &SemTriple::init(7)), t);
        let div = SemTriple {
            e: Rel::empty(7),
            inf: StateSet::full(7),
            br: Rel::empty(7),
        };
        assert_eq!(post(&t, &div), div);
    }

    #[test]
    fn post_from_two() {
        let (s, sp) = s1();
        let t = sem(&s, &sp).unwrap();
        let p = prim(Prim::Test(&parse_b("y == 2")), &sp).unwrap();
        let q = post(&t, &p);
        let two = sp.encode(&[2]).unwrap();
        let zero = sp.encode(&[0]).unwrap();
        assert_eq!(q.e.pairs().collect::<Vec<_>>(), vec![(two, zero)]);
        assert!(q.inf.is_empty());
    }

    fn parse_b(s: &str) -> BExpr {
        crate::lang::parse_bexpr(s).unwrap()
    }

    #[test]
    fn pre_tilde_of_top_is_top() {
        let (s, sp) = s1();
        let t = sem(&s, &sp).unwrap();
        assert_eq!(pre_tilde(&t, &SemTriple::top(7)), SemTriple::top(7));
    }

    #[test]
    fn pre_tilde_routes_through_two() {
        let sp = StateSpace::uniform(&["y"], 0, 3).unwrap();
        let t = sem(&parse("while (y != 0) y = y - 1").unwrap(), &sp).unwrap();
        let q = SemTriple::from_e(Rel::from_pairs(4, [(2, 0)]));
        let p = pre_tilde(&t, &q);
        // every state leads to y = 0, so only start 2 survives
        assert_eq!(p.e.pairs().collect::<Vec<_>>(), vec![(2, 0), (2, 1), (2, 2), (2, 3)]);
        assert!(post(&t, &p).leq(&q));
    }

    #[test]
    fn post_hyper_basics() {
        let (s, sp) = s1();
        let t = sem(&s, &sp).unwrap();
        let init: HyperSet = [SemTriple::init(7)].into();
        assert_eq!(post_hyper(&t, &init), [t.clone()].into());
        assert!(post_hyper(&t, &HyperSet::new()).is_empty());
    }

    #[test]
    fn weak_while_is_strictly_larger_on_countdown() {
        let (s, sp) = s1();
        let Stmt::While(b, body) = &s else { unreachable!() };
        let init: HyperSet = [SemTriple::init(7)].into();
        let w = post_weak_while(b, body, &init, &sp).unwrap();
        let exact = post_hyper(&sem(&s, &sp).unwrap(), &init);
        assert_eq!(exact.len(), 1);
        assert_eq!(w.result.len(), 4);
        assert_eq!(w.stabilization, 3);
        assert!(exact.iter().all(|t| w.result.contains(&t.e_part())));
        assert!(post_weak_while(b, body, &HyperSet::new(), &sp).unwrap().result.is_empty());
    }

    #[test]
    fn weak_while_matches_if_skip_iterates_without_break() {
        let (s, sp) = s1();
        let Stmt::While(b, body) = &s else { unreachable!() };
        let exit = prim(Prim::Test(&b.clone().not()), &sp).unwrap().e;
        let xs = if_skip_iterates(b, body, &Rel::identity(7), &sp).unwrap();
        let from_x: HyperSet = xs.iter().map(|x| SemTriple::from_e(x.compose(&exit))).collect();
        let init: HyperSet = [SemTriple::init(7)].into();
        assert_eq!(from_x, post_weak_while(b, body, &init, &sp).unwrap().result);
    }
}
