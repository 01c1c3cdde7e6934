//! The element-level frontier rule on sets of states over x ∈ [-4, 4].

use hyperlab::abstractions::{rho_frontier, subset, HyperSubset, ToyLattice};
use hyperlab::hyperlogic::{rule_frontier_rho, Verdict};
use hyperlab::interpreter::sem;
use hyperlab::{parse, StateSet, StateSpace};

struct Setup {
    sp: StateSpace,
    l: ToyLattice,
    pre: HyperSubset,
    qs: HyperSubset,
    parts: Vec<(usize, HyperSubset)>,
}

fn bits(n: usize, m: usize) -> impl Iterator<Item = usize> + Clone {
    (0..n).filter(move |i| m >> i & 1 == 1)
}

fn setup() -> Setup {
    let sp = StateSpace::uniform(&["x"], -4, 4).unwrap();
    let n = sp.size();
    let val = |i: usize| sp.value(i, 0);
    let qs = subset(1 << n, (0..1 << n).filter(|&m| {
        bits(n, m).any(|s| bits(n, m).all(|t| val(t).abs() <= val(s)))
    }));
    let parts = sp
        .states()
        .filter(|&s| val(s) >= 0)
        .map(|s| {
            let xs = (1..1 << n).filter(|&m| bits(n, m).map(|t| val(t).abs()).max() == Some(val(s)));
            (1 << s, subset(1 << n, xs))
        })
        .collect();
    Setup {
        l: ToyLattice::powerset(n),
        pre: subset(1 << n, 1..1 << n),
        qs,
        parts,
        sp,
    }
}

fn post_el(sp: &StateSpace, prog: &str) -> impl Fn(usize) -> usize {
    let n = sp.size();
    let e = sem(&parse(prog).unwrap(), sp).unwrap().e;
    move |m| e.image(&StateSet::from_iter(n, bits(n, m))).iter().fold(0, |a, i| a | 1 << i)
}

#[test]
fn bounded_output_is_a_fixed_point() {
    let s = setup();
    assert_eq!(rho_frontier(&s.l, &s.qs), s.qs);
    // +m present, the other 2m values in [-m, m] free
    assert_eq!(s.qs.count_ones(..), 1 + 4 + 16 + 64 + 256);
}

#[test]
fn absolute_value_is_proved() {
    let s = setup();
    let rep = rule_frontier_rho(&s.l, post_el(&s.sp, "if (x > 0) x = x else x = -x"), &s.pre, &s.qs, &s.parts);
    assert_eq!(rep.verdict, Verdict::Holds);
    assert!(rep.agrees());
}

#[test]
fn negation_is_refuted() {
    let s = setup();
    let rep = rule_frontier_rho(&s.l, post_el(&s.sp, "x = -x"), &s.pre, &s.qs, &s.parts);
    assert_eq!(rep.verdict, Verdict::Fails);
    assert_eq!(rep.direct, Some(Verdict::Fails));
    let failed: Vec<&str> = rep.premises.iter().filter(|p| !p.holds).map(|p| p.name.as_str()).collect();
    assert_eq!(failed, ["F ⊑ post(P)"]);
}

#[test]
fn uncovered_preconditions_are_reported() {
    let s = setup();
    let rep = rule_frontier_rho(&s.l, post_el(&s.sp, "skip"), &s.pre, &s.qs, &s.parts[..2]);
    assert_eq!(rep.verdict, Verdict::Fails);
    assert!(rep.premises.iter().any(|p| p.name == "P ⊆ ⋃ X_F" && !p.holds));
}
