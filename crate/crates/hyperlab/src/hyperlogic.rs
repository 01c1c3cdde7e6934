//! Upper and lower hyper-triples and certificate checkers for the proof rules.
//!
//! Every checker evaluates its premises exactly. Where the rule is sound and
//! complete it also evaluates the conclusion directly and records it in
//! `direct`, so callers can assert agreement.

use std::fmt;

use serde::Serialize;

use crate::abstractions::{frontier_min, phi_subseteq, rho_frontier, HyperSubset, Poset};
use crate::error::{Error, Result};
use crate::interpreter::sem;
use crate::lang::{AExpr, BExpr, CmpOp, Stmt};
use crate::order::FiniteOrder;
use crate::rel_domain::{prim, Prim, Rel, SemTriple, StateSpace};
use crate::transformers::{
    all_triples, post, post_step, post_struct, post_test, post_while_parts, HyperOracle, HyperSet,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Upper,
    Lower,
}

/// A postcondition: a membership oracle or an explicit set.
#[derive(Clone, Debug)]
pub enum PostCond {
    Oracle(HyperOracle),
    Set(HyperSet),
}

impl PostCond {
    pub fn contains(&self, t: &SemTriple) -> bool {
        match self {
            PostCond::Oracle(o) => o.contains(t),
            PostCond::Set(s) => s.contains(t),
        }
    }

    pub fn name(&self) -> String {
        match self {
            PostCond::Oracle(o) => o.name.clone(),
            PostCond::Set(s) => format!("explicit set of {} triples", s.len()),
        }
    }

    /// Complement, as an oracle.
    pub fn negate(&self) -> PostCond {
        let me = self.clone();
        PostCond::Oracle(HyperOracle::new(format!("not ({})", self.name()), move |t| {
            !me.contains(t)
        }))
    }
}

impl From<HyperOracle> for PostCond {
    fn from(o: HyperOracle) -> Self {
        PostCond::Oracle(o)
    }
}

impl From<HyperSet> for PostCond {
    fn from(s: HyperSet) -> Self {
        PostCond::Set(s)
    }
}

#[derive(Clone, Debug)]
pub struct Triple {
    pub pre: HyperSet,
    pub stmt: Stmt,
    pub post: PostCond,
    pub polarity: Polarity,
}

impl Triple {
    pub fn upper(pre: HyperSet, stmt: Stmt, post: impl Into<PostCond>) -> Self {
        Triple {
            pre,
            stmt,
            post: post.into(),
            polarity: Polarity::Upper,
        }
    }

    pub fn lower(pre: HyperSet, stmt: Stmt, post: HyperSet) -> Self {
        Triple {
            pre,
            stmt,
            post: PostCond::Set(post),
            polarity: Polarity::Lower,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Holds,
    Fails,
}

impl Verdict {
    pub fn of(b: bool) -> Self {
        if b {
            Verdict::Holds
        } else {
            Verdict::Fails
        }
    }

    pub fn holds(self) -> bool {
        self == Verdict::Holds
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.holds() { "holds" } else { "fails" })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Premise {
    pub name: String,
    pub holds: bool,
    pub detail: String,
}

impl Premise {
    fn new(name: impl Into<String>, holds: bool, detail: impl Into<String>) -> Self {
        Premise {
            name: name.into(),
            holds,
            detail: detail.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    /// A precondition element and its image (no precondition for a lower
    /// triple's unreachable postcondition element).
    Triple {
        pre: Option<SemTriple>,
        post: SemTriple,
    },
    /// A non-triple counterexample (lattice element, premise name...).
    Element(String),
}

#[derive(Clone, Debug)]
pub struct RuleReport {
    pub rule: String,
    pub verdict: Verdict,
    pub witnesses: Vec<Witness>,
    pub premises: Vec<Premise>,
    /// The conclusion evaluated directly, for sound and complete rules.
    pub direct: Option<Verdict>,
}

impl RuleReport {
    fn build(
        rule: &str,
        premises: Vec<Premise>,
        mut witnesses: Vec<Witness>,
        direct: Option<Verdict>,
    ) -> Self {
        let verdict = Verdict::of(premises.iter().all(|p| p.holds));
        if !verdict.holds() && witnesses.is_empty() {
            let failed = premises.iter().find(|p| !p.holds).expect("a failing premise");
            witnesses.push(Witness::Element(failed.name.clone()));
        }
        RuleReport {
            rule: rule.to_string(),
            verdict,
            witnesses,
            premises,
            direct,
        }
    }

    /// The rule verdict agrees with the direct check, when there is one.
    pub fn agrees(&self) -> bool {
        self.direct.is_none_or(|d| d == self.verdict)
    }
}

fn upper_failures(
    s_sem: &SemTriple,
    pre: &HyperSet,
    q: &PostCond,
) -> Vec<Witness> {
    pre.iter()
        .filter_map(|p| {
            let img = post(s_sem, p);
            (!q.contains(&img)).then(|| Witness::Triple {
                pre: Some(p.clone()),
                post: img,
            })
        })
        .collect()
}

/// `∀P ∈ 𝒫. post(S)P ∈ 𝒬`
pub fn check_upper(t: &Triple, space: &StateSpace) -> Result<RuleReport> {
    if t.polarity != Polarity::Upper {
        return Err(Error::Input("check_upper needs an upper triple".into()));
    }
    let s_sem = sem(&t.stmt, space)?;
    let w = upper_failures(&s_sem, &t.pre, &t.post);
    let premise = Premise::new(
        "post(S)P ∈ Q for all P",
        w.is_empty(),
        format!("{} of {} images outside {}", w.len(), t.pre.len(), t.post.name()),
    );
    Ok(RuleReport::build("upper", vec![premise], w, None))
}

/// `∀Q ∈ 𝒬. ∃P ∈ 𝒫. post(S)P = Q`
pub fn check_lower(t: &Triple, space: &StateSpace) -> Result<RuleReport> {
    let PostCond::Set(qs) = &t.post else {
        return Err(Error::Input("a lower triple needs an explicit postcondition".into()));
    };
    if t.polarity != Polarity::Lower {
        return Err(Error::Input("check_lower needs a lower triple".into()));
    }
    let s_sem = sem(&t.stmt, space)?;
    let images: HyperSet = t.pre.iter().map(|p| post(&s_sem, p)).collect();
    let w: Vec<Witness> = qs
        .iter()
        .filter(|q| !images.contains(*q))
        .map(|q| Witness::Triple {
            pre: None,
            post: q.clone(),
        })
        .collect();
    let premise = Premise::new(
        "every Q is post(S)P for some P",
        w.is_empty(),
        format!("{} of {} postconditions unreached", w.len(), qs.len()),
    );
    Ok(RuleReport::build("lower", vec![premise], w, None))
}

/// `¬{𝒫}S{𝒬} ⇔ ∃∅ ⊊ 𝒫' ⊆ 𝒫. {𝒫'}S{¬𝒬}`; returns whether the upper triple
/// is refuted, with a singleton `𝒫'`.
pub fn negate_upper(
    pre: &HyperSet,
    stmt: &Stmt,
    q: &PostCond,
    space: &StateSpace,
) -> Result<(bool, Option<HyperSet>)> {
    let s_sem = sem(stmt, space)?;
    Ok(pre
        .iter()
        .find(|p| !q.contains(&post(&s_sem, p)))
        .map_or((false, None), |p| (true, Some(HyperSet::from([p.clone()])))))
}

fn direct_upper(pre: &HyperSet, stmt: &Stmt, q: &PostCond, space: &StateSpace) -> Result<Verdict> {
    Ok(check_upper(&Triple::upper(pre.clone(), stmt.clone(), q.clone()), space)?.verdict)
}

fn direct_lower(pre: &HyperSet, stmt: &Stmt, q: &HyperSet, space: &StateSpace) -> Result<Verdict> {
    Ok(check_lower(&Triple::lower(pre.clone(), stmt.clone(), q.clone()), space)?.verdict)
}

/// `{𝒫}S₁{ℛ}, {ℛ}S₂{𝒬} ⊢ {𝒫}S₁;S₂{𝒬}`, with `ℛ = Post(S₁)𝒫` by default.
pub fn rule_seq(
    pre: &HyperSet,
    s1: &Stmt,
    s2: &Stmt,
    mid: Option<&HyperSet>,
    q: &PostCond,
    space: &StateSpace,
) -> Result<RuleReport> {
    let s1_sem = sem(s1, space)?;
    let mid = match mid {
        Some(m) => m.clone(),
        None => pre.iter().map(|p| post(&s1_sem, p)).collect(),
    };
    let first = check_upper(&Triple::upper(pre.clone(), s1.clone(), mid.clone()), space)?;
    let second = check_upper(&Triple::upper(mid.clone(), s2.clone(), q.clone()), space)?;
    let mut w = first.witnesses.clone();
    w.extend(second.witnesses.clone());
    let premises = vec![
        Premise::new("{P} S1 {R}", first.verdict.holds(), format!("|R| = {}", mid.len())),
        Premise::new("{R} S2 {Q}", second.verdict.holds(), q.name()),
    ];
    let direct = direct_upper(pre, &Stmt::seq(s1.clone(), s2.clone()), q, space)?;
    Ok(RuleReport::build("seq", premises, w, Some(direct)))
}

fn branch_images(
    b: &BExpr,
    s1: &Stmt,
    s2: &Stmt,
    p: &SemTriple,
    space: &StateSpace,
) -> Result<SemTriple> {
    let q1 = post_struct(s1, &post_test(b, p, space)?, space)?;
    let q2 = post_struct(s2, &post_test(&b.clone().not(), p, space)?, space)?;
    Ok(q1.join(&q2))
}

/// `∀P. Q₁ = post(B;S₁)P ∧ Q₂ = post(¬B;S₂)P ⇒ Q₁ ⊔ Q₂ ∈ 𝒬`
pub fn rule_if_upper(
    pre: &HyperSet,
    b: &BExpr,
    s1: &Stmt,
    s2: &Stmt,
    q: &PostCond,
    space: &StateSpace,
) -> Result<RuleReport> {
    let mut w = Vec::new();
    for p in pre {
        let j = branch_images(b, s1, s2, p, space)?;
        if !q.contains(&j) {
            w.push(Witness::Triple {
                pre: Some(p.clone()),
                post: j,
            });
        }
    }
    let premises = vec![Premise::new(
        "Q1 ⊔ Q2 ∈ Q for all P",
        w.is_empty(),
        format!("{} failing P", w.len()),
    )];
    let direct = direct_upper(pre, &Stmt::if_(b.clone(), s1.clone(), s2.clone()), q, space)?;
    Ok(RuleReport::build("if_upper", premises, w, Some(direct)))
}

/// `∀Q ∈ 𝒬. ∃P ∈ 𝒫. Q = post(B;S₁)P ⊔ post(¬B;S₂)P`
pub fn rule_if_lower(
    pre: &HyperSet,
    b: &BExpr,
    s1: &Stmt,
    s2: &Stmt,
    qs: &HyperSet,
    space: &StateSpace,
) -> Result<RuleReport> {
    let images = pre
        .iter()
        .map(|p| branch_images(b, s1, s2, p, space))
        .collect::<Result<HyperSet>>()?;
    let w: Vec<Witness> = qs
        .iter()
        .filter(|q| !images.contains(*q))
        .map(|q| Witness::Triple {
            pre: None,
            post: q.clone(),
        })
        .collect();
    let premises = vec![Premise::new(
        "each Q is Q1 ⊔ Q2 for some P",
        w.is_empty(),
        format!("{} unreached", w.len()),
    )];
    let direct = direct_lower(pre, &Stmt::if_(b.clone(), s1.clone(), s2.clone()), qs, space)?;
    Ok(RuleReport::build("if_lower", premises, w, Some(direct)))
}

/// Loop rule image of `P`, checking that the fixpoint components give the
/// exact postcondition.
fn loop_image(
    b: &BExpr,
    body: &Stmt,
    p: &SemTriple,
    w_sem: &SemTriple,
    space: &StateSpace,
) -> Result<(SemTriple, bool)> {
    let parts = post_while_parts(b, body, p, space)?;
    let r = parts.result(p);
    let exact = r == post(w_sem, p);
    Ok((r, exact))
}

/// `P_e = lfp ..., Q_e = post(¬B)P_e, Q_b, Q_⊥ℓ = post(B;S)P_e, Q_⊥b = gfp ...
/// ⇒ <Q_e ⊔ Q_b.br, Q_⊥ℓ ⊔ Q_⊥b, P.br> ∈ 𝒬`
pub fn rule_while_upper(
    pre: &HyperSet,
    b: &BExpr,
    body: &Stmt,
    q: &PostCond,
    space: &StateSpace,
) -> Result<RuleReport> {
    let w_stmt = Stmt::while_(b.clone(), body.clone());
    let w_sem = sem(&w_stmt, space)?;
    let mut w = Vec::new();
    let mut all_exact = true;
    for p in pre {
        let (r, exact) = loop_image(b, body, p, &w_sem, space)?;
        all_exact &= exact;
        if !q.contains(&r) {
            w.push(Witness::Triple {
                pre: Some(p.clone()),
                post: r,
            });
        }
    }
    let premises = vec![
        Premise::new("fixpoints are exact", all_exact, "P_e lfp and gfp recomputed"),
        Premise::new(
            "loop image ∈ Q for all P",
            w.is_empty(),
            format!("{} failing P", w.len()),
        ),
    ];
    let direct = direct_upper(pre, &w_stmt, q, space)?;
    Ok(RuleReport::build("while_upper", premises, w, Some(direct)))
}

pub fn rule_while_lower(
    pre: &HyperSet,
    b: &BExpr,
    body: &Stmt,
    qs: &HyperSet,
    space: &StateSpace,
) -> Result<RuleReport> {
    let w_stmt = Stmt::while_(b.clone(), body.clone());
    let w_sem = sem(&w_stmt, space)?;
    let mut images = HyperSet::new();
    let mut all_exact = true;
    for p in pre {
        let (r, exact) = loop_image(b, body, p, &w_sem, space)?;
        all_exact &= exact;
        images.insert(r);
    }
    let w: Vec<Witness> = qs
        .iter()
        .filter(|q| !images.contains(*q))
        .map(|q| Witness::Triple {
            pre: None,
            post: q.clone(),
        })
        .collect();
    let premises = vec![
        Premise::new("fixpoints are exact", all_exact, "P_e lfp and gfp recomputed"),
        Premise::new(
            "each Q is a loop image",
            w.is_empty(),
            format!("{} unreached", w.len()),
        ),
    ];
    let direct = direct_lower(pre, &w_stmt, qs, space)?;
    Ok(RuleReport::build("while_lower", premises, w, Some(direct)))
}

/// Upper: `𝒫 ⊆ 𝒫', {𝒫'}S{𝒬'}, 𝒬' ⊆ 𝒬`. Lower: `𝒫' ⊆ 𝒫, {𝒫'}S{𝒬'}, 𝒬 ⊆ 𝒬'`.
/// The inclusion between postconditions is probed on computed images only
/// in the upper case.
#[allow(clippy::too_many_arguments)]
pub fn rule_consequence(
    polarity: Polarity,
    pre: &HyperSet,
    pre2: &HyperSet,
    stmt: &Stmt,
    q2: &PostCond,
    q: &PostCond,
    space: &StateSpace,
) -> Result<RuleReport> {
    let s_sem = sem(stmt, space)?;
    let (name, premises, w, direct) = match polarity {
        Polarity::Upper => {
            let inc = pre.is_subset(pre2);
            let inner = upper_failures(&s_sem, pre2, q2);
            let images: HyperSet = pre2.iter().map(|p| post(&s_sem, p)).collect();
            let outside: Vec<&SemTriple> = images
                .iter()
                .filter(|t| q2.contains(t) && !q.contains(t))
                .collect();
            let premises = vec![
                Premise::new("P ⊆ P'", inc, ""),
                Premise::new("{P'} S {Q'}", inner.is_empty(), q2.name()),
                Premise::new(
                    "Q' ⊆ Q on computed images",
                    outside.is_empty(),
                    format!("{} images in Q' but not Q", outside.len()),
                ),
            ];
            let w = outside
                .into_iter()
                .map(|t| Witness::Triple {
                    pre: None,
                    post: t.clone(),
                })
                .chain(inner)
                .collect();
            ("consequence_upper", premises, w, direct_upper(pre, stmt, q, space)?)
        }
        Polarity::Lower => {
            let (PostCond::Set(q2s), PostCond::Set(qs)) = (q2, q) else {
                return Err(Error::Input("lower consequence needs explicit postconditions".into()));
            };
            let inc = pre2.is_subset(pre);
            let inner = check_lower(&Triple::lower(pre2.clone(), stmt.clone(), q2s.clone()), space)?;
            let premises = vec![
                Premise::new("P' ⊆ P", inc, ""),
                Premise::new("{P'} S {Q'} (lower)", inner.verdict.holds(), ""),
                Premise::new("Q ⊆ Q'", qs.is_subset(q2s), ""),
            ];
            (
                "consequence_lower",
                premises,
                inner.witnesses,
                direct_lower(pre, stmt, qs, space)?,
            )
        }
    };
    // sound; agreement is only expected for the canonical P' = P, Q' = Q
    Ok(RuleReport::build(name, premises, w, Some(direct)))
}

/// `S₁ + S₂` desugared to `c = [0,1]; if (c != 0) S₁ else S₂`; the if rule
/// is checked at `P' = post(c = [0,1])P`.
pub fn rule_choice(
    pre: &HyperSet,
    c: &str,
    s1: &Stmt,
    s2: &Stmt,
    q: &PostCond,
    space: &StateSpace,
) -> Result<RuleReport> {
    let fresh = !s1.vars().iter().chain(s2.vars().iter()).any(|v| v == c);
    if space.var_index(c).is_none() {
        return Err(Error::Unbound(c.to_string()));
    }
    let coin = prim(Prim::RandAssign(c, Some(0), Some(1)), space)?;
    let b = BExpr::cmp(CmpOp::Ne, AExpr::var(c), AExpr::Const(0));
    let mut w = Vec::new();
    for p in pre {
        let p2 = post(&coin, p);
        let j = branch_images(&b, s1, s2, &p2, space)?;
        if !q.contains(&j) {
            w.push(Witness::Triple {
                pre: Some(p.clone()),
                post: j,
            });
        }
    }
    let premises = vec![
        Premise::new(format!("{c} does not occur in S1, S2"), fresh, ""),
        Premise::new(
            "Q1 ⊔ Q2 ∈ Q at P ; rassign(c,0,1)",
            w.is_empty(),
            format!("{} failing P", w.len()),
        ),
    ];
    let direct = direct_upper(pre, &Stmt::choice(c, s1.clone(), s2.clone()), q, space)?;
    Ok(RuleReport::build("choice", premises, w, Some(direct)))
}

/// One step of `if (B) S else skip` on a relation.
fn if_skip_step(b: &BExpr, body: &Stmt, space: &StateSpace) -> Result<Rel> {
    let n = space.size();
    let step = post_step(b, body, &SemTriple::init(n), space)?.e;
    Ok(step.union(&prim(Prim::Test(&b.clone().not()), space)?.e))
}

/// Least invariant containing `𝒫.e` and closed under `if (B) S else skip`.
pub fn canonical_invariant(
    pre: &HyperSet,
    b: &BExpr,
    body: &Stmt,
    space: &StateSpace,
) -> Result<HyperSet> {
    let f = if_skip_step(b, body, space)?;
    let mut inv: HyperSet = pre.iter().map(SemTriple::e_part).collect();
    let mut frontier: Vec<SemTriple> = inv.iter().cloned().collect();
    while let Some(i) = frontier.pop() {
        let next = SemTriple::from_e(i.e.compose(&f));
        if inv.insert(next.clone()) {
            frontier.push(next);
        }
    }
    Ok(inv)
}

/// The `∀∃` loop rule on terminating, break-free executions:
/// `𝒫.e ⊆ ℐ`, `{ℐ} if (B) S else skip {ℐ}`, `{ℐ} ¬B {𝒬}`.
/// `direct` is the exact upper triple on `e` projections; the rule is
/// sound for it but not complete.
pub fn rule_forall_exists(
    pre: &HyperSet,
    b: &BExpr,
    body: &Stmt,
    inv: &HyperSet,
    q: &PostCond,
    space: &StateSpace,
) -> Result<RuleReport> {
    if body.contains_break() {
        return Err(Error::Input("the ∀∃ loop rule needs a break-free body".into()));
    }
    let f = if_skip_step(b, body, space)?;
    let not_b = prim(Prim::Test(&b.clone().not()), space)?.e;
    let mut w = Vec::new();
    let missing: Vec<&SemTriple> = pre.iter().filter(|p| !inv.contains(&p.e_part())).collect();
    let well_formed = inv.iter().all(|i| *i == i.e_part());
    let mut not_closed = 0;
    for i in inv {
        let next = SemTriple::from_e(i.e.compose(&f));
        if !inv.contains(&next) {
            not_closed += 1;
            w.push(Witness::Triple {
                pre: Some(i.clone()),
                post: next,
            });
        }
    }
    let mut exits_out = 0;
    for i in inv {
        let out = SemTriple::from_e(i.e.compose(&not_b));
        if !q.contains(&out) {
            exits_out += 1;
            w.push(Witness::Triple {
                pre: Some(i.clone()),
                post: out,
            });
        }
    }
    for p in &missing {
        w.push(Witness::Triple {
            pre: Some((*p).clone()),
            post: p.e_part(),
        });
    }
    let premises = vec![
        Premise::new("I holds terminating executions only", well_formed, ""),
        Premise::new("P.e ⊆ I", missing.is_empty(), format!("{} missing", missing.len())),
        Premise::new(
            "{I} if (B) S else skip {I}",
            not_closed == 0,
            format!("{not_closed} images leave I"),
        ),
        Premise::new("{I} ¬B {Q}", exits_out == 0, format!("{exits_out} exits outside Q")),
    ];
    let w_sem = sem(&Stmt::while_(b.clone(), body.clone()), space)?;
    let direct = pre
        .iter()
        .all(|p| q.contains(&post(&w_sem, &p.e_part()).e_part()));
    Ok(RuleReport::build(
        "forall_exists",
        premises,
        w,
        Some(Verdict::of(direct)),
    ))
}

/// Counts all `ℐ ⊆ ℘(Σ×Σ)` satisfying the `∀∃` premises; `|Σ| ≤ 2` only.
pub fn exhaustive_invariants(
    pre: &HyperSet,
    b: &BExpr,
    body: &Stmt,
    q: &PostCond,
    space: &StateSpace,
) -> Result<usize> {
    let n = space.size();
    if n > 2 {
        return Err(Error::Input("exhaustive invariant search needs at most 2 states".into()));
    }
    let rels: Vec<SemTriple> = all_triples(n)?
        .into_iter()
        .filter(|t| t.inf.is_empty() && t.br.is_empty())
        .collect();
    let f = if_skip_step(b, body, space)?;
    let not_b = prim(Prim::Test(&b.clone().not()), space)?.e;
    let idx = |t: &SemTriple| rels.iter().position(|r| r == t).expect("enumerated");
    let succ: Vec<usize> = rels
        .iter()
        .map(|r| idx(&SemTriple::from_e(r.e.compose(&f))))
        .collect();
    let exit_ok: Vec<bool> = rels
        .iter()
        .map(|r| q.contains(&SemTriple::from_e(r.e.compose(&not_b))))
        .collect();
    let need: Vec<usize> = pre.iter().map(|p| idx(&p.e_part())).collect();
    let m = rels.len();
    Ok((0u64..1 << m)
        .filter(|mask| {
            let has = |i: usize| mask >> i & 1 == 1;
            need.iter().all(|&i| has(i))
                && (0..m).filter(|&i| has(i)).all(|i| has(succ[i]) && exit_ok[i])
        })
        .count())
}

/// Principal ideal postconditions `𝒬 = {Q | Q ⊑ q}`: `post(S)(⊔𝒫) ⊑ q`.
pub fn rule_principal_ideal(
    pre: &HyperSet,
    stmt: &Stmt,
    bound: &SemTriple,
    space: &StateSpace,
) -> Result<RuleReport> {
    let s_sem = sem(stmt, space)?;
    let n = space.size();
    let join = pre.iter().fold(SemTriple::bottom(n), |acc, p| acc.join(p));
    let img = post(&s_sem, &join);
    let holds = img.leq(bound);
    let w = if holds {
        vec![]
    } else {
        vec![Witness::Triple {
            pre: Some(join),
            post: img,
        }]
    };
    let premises = vec![Premise::new("post(S)(⊔P) ⊑ ⊔Q", holds, "")];
    let direct = pre.iter().all(|p| post(&s_sem, p).leq(bound));
    Ok(RuleReport::build(
        "principal_ideal",
        premises,
        w,
        Some(Verdict::of(direct)),
    ))
}

/// Principal filter postconditions `𝒬 = {Q | q ⊑ Q}`: `∀P. q ⊑ post(S)P`.
pub fn rule_principal_filter(
    pre: &HyperSet,
    stmt: &Stmt,
    bound: &SemTriple,
    space: &StateSpace,
) -> Result<RuleReport> {
    let s_sem = sem(stmt, space)?;
    let mut w = Vec::new();
    for p in pre {
        let img = post(&s_sem, p);
        if !bound.leq(&img) {
            w.push(Witness::Triple {
                pre: Some(p.clone()),
                post: img,
            });
        }
    }
    let premises = vec![Premise::new(
        "⊓Q ⊑ post(S)P for all P",
        w.is_empty(),
        format!("{} failing P", w.len()),
    )];
    let in_filter = HyperOracle::new("principal filter", {
        let bound = bound.clone();
        move |t: &SemTriple| bound.leq(t)
    });
    let direct = direct_upper(pre, stmt, &in_filter.into(), space)?;
    Ok(RuleReport::build("principal_filter", premises, w, Some(direct)))
}

/// Every triple between `lo` and `hi`, when there are at most `2^limit`.
fn triples_between(lo: &SemTriple, hi: &SemTriple, limit: u32) -> Option<Vec<SemTriple>> {
    let mut free: Vec<(u8, usize, usize)> = Vec::new();
    for (a, c) in hi.e.pairs().filter(|&(a, c)| !lo.e.contains(a, c)) {
        free.push((0, a, c));
    }
    for s in hi.inf.iter().filter(|&s| !lo.inf.contains(s)) {
        free.push((1, s, 0));
    }
    for (a, c) in hi.br.pairs().filter(|&(a, c)| !lo.br.contains(a, c)) {
        free.push((2, a, c));
    }
    if free.len() > limit as usize {
        return None;
    }
    Some(
        (0u64..1 << free.len())
            .map(|m| {
                let mut t = lo.clone();
                for (i, &(k, a, c)) in free.iter().enumerate() {
                    if m >> i & 1 == 1 {
                        match k {
                            0 => t.e.insert(a, c),
                            1 => t.inf.insert(a),
                            _ => t.br.insert(a, c),
                        }
                    }
                }
                t
            })
            .collect(),
    )
}

/// Largest interval enumerated by the convexity check, in free bits.
pub const CONVEXITY_BITS: u32 = 16;

/// `{𝒫}S{α⊑(𝒬)}` and `{𝒫}S{α⊒(𝒬)}` give `{𝒫}S{𝒬}` when `𝒬` is convex.
pub fn rule_conjunctive(
    pre: &HyperSet,
    stmt: &Stmt,
    qs: &HyperSet,
    space: &StateSpace,
) -> Result<RuleReport> {
    let s_sem = sem(stmt, space)?;
    let mut convex = true;
    let mut detail = String::from("intervals enumerated");
    'outer: for lo in qs {
        for hi in qs.iter().filter(|hi| lo.leq(hi) && *hi != lo) {
            match triples_between(lo, hi, CONVEXITY_BITS) {
                Some(between) => {
                    if between.iter().any(|t| !qs.contains(t)) {
                        convex = false;
                        detail = "an interval between members leaves Q".into();
                        break 'outer;
                    }
                }
                None => {
                    convex = false;
                    detail = "interval too large to enumerate".into();
                    break 'outer;
                }
            }
        }
    }
    let mut w = Vec::new();
    let (mut below, mut above) = (true, true);
    for p in pre {
        let img = post(&s_sem, p);
        let b = qs.iter().any(|q| img.leq(q));
        let a = qs.iter().any(|q| q.leq(&img));
        if !(a && b) {
            w.push(Witness::Triple {
                pre: Some(p.clone()),
                post: img,
            });
        }
        below &= b;
        above &= a;
    }
    let premises = vec![
        Premise::new("Q is convex", convex, detail),
        Premise::new("{P} S {order ideal of Q}", below, ""),
        Premise::new("{P} S {order filter of Q}", above, ""),
    ];
    let direct = direct_upper(pre, stmt, &PostCond::Set(qs.clone()), space)?;
    Ok(RuleReport::build("conjunctive", premises, w, Some(direct)))
}

/// The frontier-elimination rule on a finite lattice with an element-level
/// `post`: for each `F` in the lower frontier of `𝒬` and `P ∈ 𝒳_F`, some
/// `Q ∈ φ(F)𝒬` has `post(P) ⊑ Q`, and `F ⊑ post(P)`; and `𝒫 ⊆ ⋃𝒳_F`.
pub fn rule_frontier_rho(
    l: &Poset,
    post_el: impl Fn(usize) -> usize,
    pre: &HyperSubset,
    qs: &HyperSubset,
    parts: &[(usize, HyperSubset)],
) -> RuleReport {
    let frontier = frontier_min(l, qs);
    let fixed = rho_frontier(l, qs) == *qs;
    let keys_ok = parts.iter().all(|(f, _)| frontier.contains(*f));
    let mut covered = l.empty();
    let mut w = Vec::new();
    let (mut upper_ok, mut lower_ok) = (true, true);
    for (f, xs) in parts {
        covered.union_with(xs);
        let phi = phi_subseteq(l, *f, qs);
        for p in xs.ones() {
            let img = post_el(p);
            let up = phi.ones().any(|q| l.le(img, q));
            let down = l.le(*f, img);
            if !(up && down) {
                w.push(Witness::Element(format!(
                    "{} under {}: image {}",
                    l.name(p),
                    l.name(*f),
                    l.name(img)
                )));
            }
            upper_ok &= up;
            lower_ok &= down;
        }
    }
    let uncovered: Vec<usize> = pre.ones().filter(|&p| !covered.contains(p)).collect();
    for &p in &uncovered {
        w.push(Witness::Element(format!("{} is not covered", l.name(p))));
    }
    let premises = vec![
        Premise::new("Q is fixed by the frontier closure", fixed, ""),
        Premise::new("keys are frontier elements of Q", keys_ok, ""),
        Premise::new("P ⊆ ⋃ X_F", uncovered.is_empty(), format!("{} uncovered", uncovered.len())),
        Premise::new("∃Q ∈ φ(F)Q. post(P) ⊑ Q", upper_ok, ""),
        Premise::new("F ⊑ post(P)", lower_ok, ""),
    ];
    let direct = pre.ones().all(|p| qs.contains(post_el(p)));
    RuleReport::build("frontier_rho", premises, w, Some(Verdict::of(direct)))
}

/// Elementwise image of a set of lattice elements.
pub fn post_elements(l: &Poset, post_el: impl Fn(usize) -> usize, ps: &HyperSubset) -> HyperSubset {
    let mut out = l.empty();
    for p in ps.ones() {
        out.insert(post_el(p));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abstractions::named_oracle;
    use crate::lang::parse;

    fn one(t: SemTriple) -> HyperSet {
        HyperSet::from([t])
    }

    #[test]
    fn countdown_reaches_zero() {
        let sp = StateSpace::uniform(&["y"], -3, 3).unwrap();
        let s = parse("while (y != 0) y = y - 1").unwrap();
        let zero = sp.encode(&[0]).unwrap();
        let target = Rel::from_pairs(7, (0..7).map(|s| (s, zero)));
        let q = HyperOracle::new("e ⊆ to zero", move |t: &SemTriple| t.e.is_subset(&target));
        let r = check_upper(&Triple::upper(one(SemTriple::init(7)), s.clone(), q), &sp).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        let empty = check_upper(&Triple::upper(HyperSet::new(), s, HyperOracle::none()), &sp).unwrap();
        assert_eq!(empty.verdict, Verdict::Holds);
    }

    #[test]
    fn leak_fails_noninterference() {
        let sp = StateSpace::uniform(&["l", "h"], 0, 1).unwrap();
        let ni = named_oracle("ni:l", &sp).unwrap();
        let pre = one(SemTriple::init(4));
        let s = parse("l = h").unwrap();
        let r = check_upper(&Triple::upper(pre.clone(), s.clone(), ni.clone()), &sp).unwrap();
        assert_eq!(r.verdict, Verdict::Fails);
        assert_eq!(r.witnesses.len(), 1);
        let (refuted, wit) = negate_upper(&pre, &s, &ni.clone().into(), &sp).unwrap();
        assert!(refuted);
        assert_eq!(wit, Some(pre.clone()));
        let ok = parse("l = 0").unwrap();
        assert_eq!(negate_upper(&pre, &ok, &ni.into(), &sp).unwrap(), (false, None));
    }

    #[test]
    fn lower_triples() {
        let sp = StateSpace::uniform(&["x"], 0, 2).unwrap();
        let s = parse("x = x + 1").unwrap();
        let p0 = SemTriple::init(3);
        let s_sem = sem(&s, &sp).unwrap();
        let pre = HyperSet::from([p0.clone(), SemTriple::bottom(3)]);
        let q = one(post(&s_sem, &p0));
        assert_eq!(check_lower(&Triple::lower(pre.clone(), s.clone(), q), &sp).unwrap().verdict, Verdict::Holds);
        let empty = Triple::lower(pre.clone(), s.clone(), HyperSet::new());
        assert_eq!(check_lower(&empty, &sp).unwrap().verdict, Verdict::Holds);
        let r = check_lower(&Triple::lower(pre, s, one(SemTriple::top(3))), &sp).unwrap();
        assert_eq!(r.verdict, Verdict::Fails);
        assert!(matches!(r.witnesses[0], Witness::Triple { pre: None, .. }));
    }

    #[test]
    fn principal_ideal_countdown_to_ten() {
        let sp = StateSpace::uniform(&["x"], 0, 13).unwrap();
        let s = parse("while (x > 10) x = x - 1").unwrap();
        let n = sp.size();
        let pre: HyperSet = (11..=13)
            .map(|v| {
                let at = sp.filter(|x| x[0] == v);
                SemTriple::from_e(Rel::from_pairs(n, (0..n).flat_map(|a| at.iter().map(move |b| (a, b)))))
            })
            .collect();
        let low = sp.filter(|x| x[0] <= 10);
        let bound = SemTriple::from_e(Rel::from_pairs(n, (0..n).flat_map(|a| low.iter().map(move |b| (a, b)))));
        let r = rule_principal_ideal(&pre, &s, &bound, &sp).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        assert!(r.agrees());
        let tight = SemTriple::from_e(Rel::empty(n));
        let r = rule_principal_ideal(&pre, &s, &tight, &sp).unwrap();
        assert_eq!(r.verdict, Verdict::Fails);
        assert!(r.agrees());
    }

    #[test]
    fn forall_exists_is_not_complete() {
        let sp = StateSpace::uniform(&["y"], 0, 1).unwrap();
        let b = parse_b("y != 0");
        let body = parse("y = y - 1").unwrap();
        let w_sem = sem(&Stmt::while_(b.clone(), body.clone()), &sp).unwrap();
        let pre = one(SemTriple::init(2));
        let exact = one(post(&w_sem, &SemTriple::init(2)).e_part());
        let q = PostCond::Set(exact);
        let upper = check_upper(&Triple::upper(pre.clone(), Stmt::while_(b.clone(), body.clone()), q.clone()), &sp).unwrap();
        assert_eq!(upper.verdict, Verdict::Holds);
        assert_eq!(exhaustive_invariants(&pre, &b, &body, &q, &sp).unwrap(), 0);
        let inv = canonical_invariant(&pre, &b, &body, &sp).unwrap();
        let r = rule_forall_exists(&pre, &b, &body, &inv, &q, &sp).unwrap();
        assert_eq!(r.verdict, Verdict::Fails);
        assert_eq!(r.direct, Some(Verdict::Holds));
    }

    fn parse_b(s: &str) -> BExpr {
        crate::lang::parse_bexpr(s).unwrap()
    }

    #[test]
    fn conjunctive_on_a_convex_set() {
        let sp = StateSpace::uniform(&["x"], 0, 1).unwrap();
        let s = parse("x = [0, 1]").unwrap();
        let lo = SemTriple::from_e(Rel::from_pairs(2, [(0, 0), (0, 1)]));
        let hi = SemTriple::from_e(Rel::full(2));
        let mid = SemTriple::from_e(Rel::from_pairs(2, [(0, 0), (0, 1), (1, 0)]));
        let mid2 = SemTriple::from_e(Rel::from_pairs(2, [(0, 0), (0, 1), (1, 1)]));
        let qs = HyperSet::from([lo.clone(), hi.clone(), mid, mid2]);
        let pre = HyperSet::from([SemTriple::init(2), SemTriple::from_e(Rel::from_pairs(2, [(0, 0)]))]);
        let r = rule_conjunctive(&pre, &s, &qs, &sp).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        assert!(r.agrees());
        let gappy = HyperSet::from([lo, hi]);
        let r = rule_conjunctive(&pre, &s, &gappy, &sp).unwrap();
        assert_eq!(r.verdict, Verdict::Fails);
        assert!(!r.premises[0].holds);
    }
}
