//! One pass/fail line per acceptance criterion. Expected values come from
//! closed formulas, literal frozen data, or brute-force reference
//! implementations written here.

use std::collections::BTreeSet;
use std::process::ExitCode;

use hyperlab::abstractions::*;
use hyperlab::gen::{self, GenConfig};
use hyperlab::hyperlogic::*;
use hyperlab::interpreter::{oracle_sem, sem};
use hyperlab::order::FiniteOrder;
use hyperlab::trace_domain::{abstract_to_rel, fmt_trace, trace_sem, trace_sem_budget};
use hyperlab::transformers::*;
use hyperlab::{parse, Rel, SemTriple, StateSpace, Stmt};
use rand::Rng;

type Outcome = Result<(), String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn idx(sp: &StateSpace, v: &[i64]) -> usize {
    sp.encode(v).expect("in window")
}

// 1

fn relational() -> Outcome {
    let y = StateSpace::uniform(&["y"], -3, 3).unwrap();
    let s1 = sem(&parse("while (y != 0) y = y - 1").unwrap(), &y).unwrap();
    let mut want = SemTriple::bottom(7);
    for v in -3..=3 {
        if v >= 0 {
            want.e.insert(idx(&y, &[v]), idx(&y, &[0]));
        } else {
            want.inf.insert(idx(&y, &[v]));
        }
    }
    ensure(s1 == want, || "S1".into())?;

    let s2 = sem(&parse("y = [-oo, oo]; while (y != 0) y = y - 1").unwrap(), &y).unwrap();
    let mut want = SemTriple::bottom(7);
    for v in -3..=3 {
        want.e.insert(idx(&y, &[v]), idx(&y, &[0]));
        want.inf.insert(idx(&y, &[v]));
    }
    ensure(s2 == want, || "S2".into())?;

    let xy = StateSpace::uniform(&["x", "y"], -2, 2).unwrap();
    let inner = "while (x != 0) { y = [-oo, oo]; while (y != 0) y = y - 1; x = x - 1 }";
    let s3 = sem(&parse(inner).unwrap(), &xy).unwrap();
    let mut want = SemTriple::bottom(25);
    for x in -2..=2 {
        for v in -2..=2 {
            let from = idx(&xy, &[x, v]);
            match x {
                0 => want.e.insert(from, from),
                1 | 2 => want.e.insert(from, idx(&xy, &[0, 0])),
                _ => {}
            }
            if x != 0 {
                want.inf.insert(from);
            }
        }
    }
    ensure(s3 == want, || "S3".into())?;

    let s4 = sem(&parse(&format!("x = [-oo, oo]; {inner}")).unwrap(), &xy).unwrap();
    let mut want = SemTriple::bottom(25);
    for x in -2..=2 {
        for v in -2..=2 {
            let from = idx(&xy, &[x, v]);
            want.e.insert(from, idx(&xy, &[0, v]));
            want.e.insert(from, idx(&xy, &[0, 0]));
            want.inf.insert(from);
        }
    }
    ensure(s4 == want, || "S4".into())
}

// 2

fn traces() -> Outcome {
    let sp = StateSpace::uniform(&["x"], -4, 5).unwrap();
    let s = parse("while (x != 2) if (x == 1) break else x = x + 2").unwrap();
    let t = trace_sem(&s, &sp, 10).unwrap();
    let got: BTreeSet<String> = t.ok.iter().map(|p| fmt_trace(&sp, p)).collect();
    let want: BTreeSet<String> = [
        "x:-4;x:-2;x:0;x:2",
        "x:-3;x:-1;x:1",
        "x:-2;x:0;x:2",
        "x:-1;x:1",
        "x:0;x:2",
        "x:1",
        "x:2",
    ]
    .into_iter()
    .map(String::from)
    .collect();
    ensure(got == want, || format!("traces {got:?}"))?;
    ensure(t.br.is_empty(), || "break traces escaped the loop".into())?;
    let div: Vec<Vec<i64>> = t.div_starts.iter().map(|i| sp.decode(i)).collect();
    ensure(div == vec![vec![3], vec![4], vec![5]], || format!("div {div:?}"))
}

// 3

fn oracle() -> Outcome {
    let suite = gen::program_suite(11, 500, 4);
    let bad: Vec<String> = suite
        .iter()
        .filter(|(s, sp)| sem(s, sp).unwrap() != oracle_sem(s, sp).unwrap())
        .map(|(s, _)| s.to_string())
        .collect();
    ensure(bad.is_empty(), || format!("{} discrepancies, first {}", bad.len(), bad[0]))
}

// 4

fn calculus() -> Outcome {
    let mut r = gen::rng(12);
    for (s, sp) in gen::program_suite(12, 500, 4) {
        let ps: HyperSet = gen::random_hyperset(&mut r, sp.size(), 3).into_iter().collect();
        let s_sem = sem(&s, &sp).unwrap();
        let direct: HyperSet = ps.iter().map(|p| p.compose(&s_sem)).collect();
        ensure(post_structural(&s, &ps, &sp).unwrap() == direct, || format!("Post on {s}"))?;
        for p in &ps {
            ensure(post_struct(&s, p, &sp).unwrap() == p.compose(&s_sem), || format!("post on {s}"))?;
        }
    }
    Ok(())
}

// 5

const TWO_STATE: [&str; 9] = [
    "skip",
    "x = 1",
    "x = [0, 1]",
    "x = 1 - x",
    "while (x == 0) skip",
    "while (x == 0) x = [0, 1]",
    "if (x == 0) x = 1 else x = 0",
    "while (true) { if (x == 1) break else x = x + 1 }",
    "while (x == 1) { x = [0, 1]; if (x == 0) break else skip }",
];

fn galois() -> Outcome {
    let sp = StateSpace::uniform(&["x"], 0, 1).unwrap();
    let all = all_triples(2).unwrap();
    ensure(all.len() == 1024, || "triple count".into())?;
    let mut r = gen::rng(13);
    for text in TWO_STATE {
        let s_sem = sem(&parse(text).unwrap(), &sp).unwrap();
        let posts: Vec<SemTriple> = all.iter().map(|p| p.compose(&s_sem)).collect();
        for q in &all {
            // the largest P with post(P) ⊑ Q, by brute force
            let below: Vec<&SemTriple> = all.iter().zip(&posts).filter(|(_, i)| i.leq(q)).map(|(p, _)| p).collect();
            let best = below.iter().fold(SemTriple::bottom(2), |a, p| a.join(p));
            ensure(best.compose(&s_sem).leq(q), || format!("{text}: no greatest pre"))?;
            ensure(pre_tilde(&s_sem, q) == best, || format!("{text}: pre~ differs"))?;
            for (p, img) in all.iter().zip(&posts) {
                ensure(img.leq(q) == p.leq(&best), || format!("{text}: adjunction"))?;
            }
        }
        for _ in 0..20 {
            let qset: HyperSet = (0..60).map(|_| all[r.gen_range(0..1024)].clone()).collect();
            let pre_q: HyperSet = all.iter().zip(&posts).filter(|(_, i)| qset.contains(*i)).map(|(p, _)| p.clone()).collect();
            let lib = pre_hyper_toy(&s_sem, &HyperOracle::from_set("q", qset.clone())).unwrap();
            ensure(lib == pre_q, || format!("{text}: Pre differs"))?;
            for _ in 0..100 {
                let ps: HyperSet = (0..r.gen_range(0..4)).map(|_| all[r.gen_range(0..1024)].clone()).collect();
                let lhs = ps.iter().all(|p| qset.contains(&p.compose(&s_sem)));
                ensure(lhs == ps.is_subset(&pre_q), || format!("{text}: Post/Pre adjunction"))?;
            }
        }
    }
    Ok(())
}

// 6

fn conditional() -> Outcome {
    let sp = StateSpace::uniform(&["x"], 0, 1).unwrap();
    let s = parse("if (x == 0) x = 1 else x = 0").unwrap();
    let Stmt::If(b, s1, s2) = &s else { unreachable!() };
    let e = |pairs: &[(usize, usize)]| SemTriple::from_e(Rel::from_pairs(2, pairs.iter().copied()));
    let ps = HyperSet::from([e(&[(0, 0)]), e(&[(1, 1)])]);
    let tied = post_structural(&s, &ps, &sp).unwrap();
    let cross = post_if_cross(b, s1, s2, &ps, &sp).unwrap();
    ensure(tied == HyperSet::from([e(&[(0, 1)]), e(&[(1, 0)])]), || format!("tied {tied:?}"))?;
    let want = HyperSet::from([e(&[]), e(&[(0, 1)]), e(&[(1, 0)]), e(&[(0, 1), (1, 0)])]);
    ensure(cross == want, || format!("cross {cross:?}"))?;
    ensure(tied.is_subset(&cross) && tied != cross, || "not strict".into())
}

// 7

fn weak_while() -> Outcome {
    let mut r = gen::rng(14);
    for (s, sp) in gen::loop_suite(14, 300, 4) {
        let Stmt::While(b, body) = &s else { unreachable!() };
        let ps: HyperSet = gen::random_hyperset(&mut r, sp.size(), 3).into_iter().collect();
        let s_sem = sem(&s, &sp).unwrap();
        let exact: HyperSet = ps.iter().map(|p| SemTriple::from_e(p.e.compose(&s_sem.e))).collect();
        let weak = post_weak_while(b, body, &ps, &sp).unwrap().result;
        ensure(exact.is_subset(&weak), || format!("not contained on {s}"))?;
    }
    let sp = StateSpace::uniform(&["y"], -3, 3).unwrap();
    let s = parse("while (y != 0) y = y - 1").unwrap();
    let Stmt::While(b, body) = &s else { unreachable!() };
    let ps = HyperSet::from([SemTriple::init(7)]);
    let weak = post_weak_while(b, body, &ps, &sp).unwrap().result;
    let zero = idx(&sp, &[0]);
    let upto = |k: i64| SemTriple::from_e(Rel::from_pairs(7, (0..=k).map(|v| (idx(&sp, &[v]), zero))));
    ensure(weak == (0..=3).map(upto).collect::<HyperSet>(), || format!("weak {}", weak.len()))?;
    let exact = post_structural(&s, &ps, &sp).unwrap();
    let exact: HyperSet = exact.iter().map(|t| SemTriple::from_e(t.e.clone())).collect();
    ensure(exact == HyperSet::from([upto(3)]), || "exact".into())?;
    ensure(exact.is_subset(&weak) && exact != weak, || "not strict".into())
}

// 8

const N: usize = 16;

type Table = (String, Vec<u32>, bool, bool);

fn to_set(m: u32) -> HyperSubset {
    subset(N, (0..N).filter(|i| m >> i & 1 == 1))
}

fn to_mask(s: &HyperSubset) -> u32 {
    s.ones().fold(0, |m, i| m | 1 << i)
}

/// Reference operators on ℘(℘({0..3})): elements are 4-bit masks.
fn reference(op: &str, p: u32) -> u32 {
    let els = || (0..N as u32).filter(move |x| p >> x & 1 == 1);
    let sub = |a: u32, b: u32| a & !b == 0;
    let collect = |f: &dyn Fn(u32) -> bool| (0..N as u32).filter(|x| f(*x)).fold(0, |m, x| m | 1 << x);
    match op {
        "order_ideal" => collect(&|x| els().any(|q| sub(x, q))),
        "order_filter" => collect(&|x| els().any(|q| sub(q, x))),
        "principal_ideal" => {
            let j = els().fold(0, |a, q| a | q);
            collect(&|x| sub(x, j))
        }
        "principal_filter" => {
            let m = els().fold(15, |a, q| a & q);
            collect(&|x| sub(m, x))
        }
        "frontier_min" => collect(&|x| p >> x & 1 == 1 && !els().any(|q| q != x && sub(q, x))),
        "frontier_max" => collect(&|x| p >> x & 1 == 1 && !els().any(|q| q != x && sub(x, q))),
        "rho_subseteq" => collect(&|x| p >> x & 1 == 1 && (0..N as u32).all(|y| !sub(y, x) || p >> y & 1 == 1)),
        _ => unreachable!(),
    }
}

fn laws() -> Outcome {
    let l = ToyLattice::powerset(4);
    let refs = ["order_ideal", "order_filter", "principal_ideal", "principal_filter", "frontier_min", "frontier_max", "rho_subseteq"];
    let upper = [
        Op::OrderIdeal,
        Op::OrderFilter,
        Op::PrincipalIdeal,
        Op::PrincipalFilter,
        Op::ChainDownStar,
        Op::ChainUpStar,
        Op::FrontierOrderIdeal,
        Op::FrontierOrderFilter,
    ];
    let reductive = [Op::FrontierMin, Op::FrontierMax, Op::RhoFrontier, Op::RhoSubseteq];
    let image = |op: Op, m: u32| to_mask(&op.apply(&l, &to_set(m)).unwrap());
    let conj = |m: u32| to_mask(&conjunctive(&l, Op::OrderIdeal, Op::OrderFilter, &to_set(m)).unwrap());
    // name, image table, extensive, increasing
    let mut tables: Vec<Table> = Vec::new();
    for op in upper {
        tables.push((op.name().into(), (0..1 << N).map(|m| image(op, m)).collect(), true, true));
    }
    for op in reductive {
        tables.push((op.name().into(), (0..1 << N).map(|m| image(op, m)).collect(), false, op == Op::RhoSubseteq));
    }
    tables.push(("conjunctive".into(), (0..1 << N).map(conj).collect(), true, true));
    for (name, t, extensive, monotone) in &tables {
        if let Some(r) = refs.iter().find(|r| *r == name) {
            let bad = (0..1u32 << N).find(|&m| t[m as usize] != reference(r, m));
            ensure(bad.is_none(), || format!("{name} differs from reference at {bad:?}"))?;
        }
        for m in 0..1u32 << N {
            let f = t[m as usize];
            let bounded = if *extensive { m & !f == 0 } else { f & !m == 0 };
            ensure(bounded, || format!("{name} not bounded at {m:#x}"))?;
            ensure(t[f as usize] == f, || format!("{name} not idempotent at {m:#x}"))?;
            if *monotone {
                for x in (0..N).filter(|x| m >> x & 1 == 0) {
                    let g = t[(m | 1 << x) as usize];
                    ensure(f & !g == 0, || format!("{name} not increasing at {m:#x}+{x}"))?;
                }
            }
        }
    }

    // retractions
    for m in 0..1u32 << N {
        let p = to_set(m);
        let a = alpha_join(&l, &p);
        for q in 0..N {
            ensure(l.le(a, q) == p.is_subset(&gamma_join(&l, q)), || "join adjunction".into())?;
        }
    }
    ensure((0..N).all(|q| alpha_join(&l, &gamma_join(&l, q)) == q), || "join retraction".into())?;
    let ideal = &tables[0].1;
    let down_sets: Vec<u32> = (0..1u32 << N).filter(|&q| ideal[q as usize] == q).collect();
    ensure(down_sets.len() == 168, || format!("{} down-sets", down_sets.len()))?;
    for m in 0..1u32 << N {
        let a = ideal[m as usize];
        for &q in &down_sets {
            ensure((a & !q == 0) == (m & !q == 0), || "ideal adjunction".into())?;
        }
    }
    let star = &tables[4].1;
    for m in 0..1u32 << N {
        ensure(star[m as usize] == m, || "star is not the identity on a finite lattice".into())?;
    }

    // non-monotone frontier, as printed
    let d = ToyLattice::diamond();
    let f1 = frontier_min(&d, &d.set(&["⊤"]).unwrap());
    let f2 = frontier_min(&d, &d.set(&["0", "1", "⊤"]).unwrap());
    ensure(d.set_names(&f1) == ["⊤"] && d.set_names(&f2) == ["0", "1"], || "frontier witness".into())
}

// 9

fn counterexamples() -> Outcome {
    let cp = two_level_chains();
    let xs: Vec<String> = (1..=3).flat_map(|i| (1..=3).map(move |j| format!("X{i}{j}"))).collect();
    let xs: Vec<&str> = xs.iter().map(String::as_str).collect();
    let p = cp.set(&xs).unwrap();
    let once = chain_down(&cp, &p);
    let twice = chain_down(&cp, &once);
    let added = |a: &HyperSubset, b: &HyperSubset| {
        let mut d = a.clone();
        d.difference_with(b);
        cp.set_names(&d)
    };
    ensure(added(&once, &p) == ["Y1", "Y2", "Y3"], || format!("{:?}", added(&once, &p)))?;
    ensure(added(&twice, &once) == ["⊥"], || format!("{:?}", added(&twice, &once)))?;
    ensure(chain_down_star(&cp, &p).unwrap() == twice, || "star".into())?;

    let fs = finite_subsets_fragment();
    let f = fs.set(&["A0", "A1", "A2", "A3"]).unwrap();
    ensure(frontier_max(&fs, &f).is_clear(), || "max frontier nonempty".into())?;
    ensure(fs.set_names(&order_ideal(&fs, &f)) == ["A0", "A1", "A2", "A3"], || "ideal".into())
}

// 10

fn rules() -> Outcome {
    let mut r = gen::rng(15);
    // ∀∃ rule: sound, and complete for the weak loop semantics
    for _ in 0..200 {
        let sp = gen::random_space(&mut r);
        let mut cfg = GenConfig::for_space(&sp, 3);
        cfg.breaks = false;
        let (b, body) = gen::random_loop(&mut r, &cfg);
        let s = Stmt::while_(b.clone(), body.clone());
        let n = sp.size();
        let pre: HyperSet = (0..2).map(|_| SemTriple::from_e(gen::random_rel(&mut r, n, 0.3))).collect();
        let weak = post_weak_while(&b, &body, &pre, &sp).unwrap().result;
        let mut fewer = weak.clone();
        fewer.pop_last();
        let canon = canonical_invariant(&pre, &b, &body, &sp).unwrap();
        for q in [weak.clone(), fewer] {
            let qc = PostCond::Set(q.clone());
            let rep = rule_forall_exists(&pre, &b, &body, &canon, &qc, &sp).unwrap();
            ensure(rep.verdict.holds() == weak.is_subset(&q), || format!("incomplete on {s}"))?;
            if rep.verdict.holds() {
                let s_sem = sem(&s, &sp).unwrap();
                let ok = pre.iter().all(|p| q.contains(&SemTriple::from_e(p.e.compose(&s_sem.e))));
                ensure(ok, || format!("unsound on {s}"))?;
            }
        }
    }

    // principal ideal: while (x > 10) from x ∈ {11, 12, 13}
    let sp = StateSpace::uniform(&["x"], 0, 13).unwrap();
    let n = sp.size();
    let to = |v: i64| SemTriple::from_e(Rel::from_pairs(n, sp.states().map(|s| (s, idx(&sp, &[v])))));
    let pre: HyperSet = (11..=13).map(to).collect();
    let bound = SemTriple::from_e(Rel::from_pairs(
        n,
        sp.states().flat_map(|s| (0..=10).map(move |v| (s, v as usize))),
    ));
    let rep = rule_principal_ideal(&pre, &parse("while (x > 10) x = x - 1").unwrap(), &bound, &sp).unwrap();
    ensure(rep.verdict == Verdict::Holds && rep.agrees(), || "principal ideal".into())?;

    // singleton coincidence and negation duality
    for (s, sp) in gen::program_suite(16, 300, 4) {
        let n = sp.size();
        let s_sem = sem(&s, &sp).unwrap();
        let p = gen::random_triple(&mut r, n);
        for q in [p.compose(&s_sem), gen::random_triple(&mut r, n)] {
            let expect = p.compose(&s_sem) == q;
            let (pre, qs) = (HyperSet::from([p.clone()]), HyperSet::from([q]));
            let up = check_upper(&Triple::upper(pre.clone(), s.clone(), qs.clone()), &sp).unwrap();
            let lo = check_lower(&Triple::lower(pre, s.clone(), qs), &sp).unwrap();
            ensure(up.verdict.holds() == expect && lo.verdict.holds() == expect, || format!("singleton on {s}"))?;
        }
        let ps: HyperSet = gen::random_hyperset(&mut r, n, 3).into_iter().collect();
        let mut images: HyperSet = ps.iter().map(|p| p.compose(&s_sem)).collect();
        images.pop_first();
        let qc = PostCond::Set(images.clone());
        let holds = ps.iter().all(|p| images.contains(&p.compose(&s_sem)));
        let (refuted, sub) = negate_upper(&ps, &s, &qc, &sp).unwrap();
        ensure(refuted != holds, || format!("negation on {s}"))?;
        if let Some(sub) = sub {
            let ok = !sub.is_empty() && sub.is_subset(&ps) && sub.iter().all(|p| !images.contains(&p.compose(&s_sem)));
            ensure(ok, || format!("negation witness on {s}"))?;
        }
    }
    Ok(())
}

// 11

fn commutation() -> Outcome {
    let mut unflagged = 0;
    for (s, sp) in gen::program_suite(17, 500, 4) {
        let t = if s.contains_loop() {
            trace_sem_budget(&s, &sp, 10, 20_000).unwrap()
        } else {
            let t = trace_sem(&s, &sp, 40).unwrap();
            ensure(!t.truncated, || format!("loop-free program truncated: {s}"))?;
            t
        };
        if t.truncated {
            continue;
        }
        unflagged += usize::from(s.contains_loop());
        ensure(abstract_to_rel(&t) == sem(&s, &sp).unwrap(), || format!("mismatch on {s}"))?;
    }
    ensure(unflagged > 50, || format!("only {unflagged} unflagged loops"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("relational examples", relational),
        ("trace example", traces),
        ("oracle equivalence", oracle),
        ("calculus", calculus),
        ("galois laws", galois),
        ("conditional exactness", conditional),
        ("weak hypercollecting", weak_while),
        ("abstraction algebra", laws),
        ("counterexamples", counterexamples),
        ("rules", rules),
        ("trace commutation", commutation),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(()) => println!("criterion {:>2} {name}: PASS", i + 1),
            Err(e) => {
                failed += 1;
                println!("criterion {:>2} {name}: FAIL ({e})", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
