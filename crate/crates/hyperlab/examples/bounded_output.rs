//! Frontier elimination on sets of states: the absolute value keeps every
//! output set bounded by one of its own elements.

use hyperlab::abstractions::{subset, HyperSubset, ToyLattice};
use hyperlab::hyperlogic::{post_elements, rule_frontier_rho};
use hyperlab::interpreter::sem;
use hyperlab::{parse, StateSet, StateSpace};

fn main() -> Result<(), hyperlab::Error> {
    let sp = StateSpace::uniform(&["x"], -4, 4)?;
    let n = sp.size();
    let l = ToyLattice::powerset(n);
    let val = |i: usize| sp.value(i, 0);
    let bits = |m: usize| (0..n).filter(move |i| m >> i & 1 == 1);
    // bounded: some element dominates the absolute value of every element
    let bounded = |m: usize| bits(m).any(|s| bits(m).all(|t| val(t).abs() <= val(s)));
    let qs = subset(1 << n, (0..1 << n).filter(|&m| bounded(m)));
    let pre = subset(1 << n, 1..1 << n);
    let parts: Vec<(usize, HyperSubset)> = sp
        .states()
        .filter(|&s| val(s) >= 0)
        .map(|s| {
            let top = |m: usize| bits(m).map(|t| val(t).abs()).max() == Some(val(s));
            (1 << s, subset(1 << n, (1..1 << n).filter(|&m| top(m))))
        })
        .collect();

    for prog in ["if (x > 0) x = x else x = -x", "x = -x"] {
        let e = sem(&parse(prog)?, &sp)?.e;
        let post_el = |m: usize| e.image(&StateSet::from_iter(n, bits(m))).iter().fold(0, |a, i| a | 1 << i);
        let rep = rule_frontier_rho(&l, post_el, &pre, &qs, &parts);
        let images = post_elements(&l, post_el, &pre);
        println!("{prog}: {} (direct {:?}), {} distinct output sets", rep.verdict, rep.direct, images.count_ones(..));
        for p in rep.premises.iter().filter(|p| !p.holds) {
            println!("  failed: {}", p.name);
        }
    }
    Ok(())
}
