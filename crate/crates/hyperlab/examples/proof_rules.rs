//! Structural proof rules, the principal-ideal reduction, and the loop
//! invariant rule that cannot prove an exact loop triple.

use hyperlab::hyperlogic::*;
use hyperlab::interpreter::sem;
use hyperlab::transformers::{post_hyper, HyperSet};
use hyperlab::{corpus, parse, Rel, SemTriple, StateSpace, Stmt};

fn show(rep: &RuleReport) {
    println!("{}: {} (direct {:?})", rep.rule, rep.verdict, rep.direct);
    for p in &rep.premises {
        println!("  [{}] {}", if p.holds { "ok" } else { "no" }, p.name);
    }
}

fn main() -> Result<(), hyperlab::Error> {
    // a loop: all images, then all but one
    let sp = StateSpace::uniform(&["x"], -1, 2)?;
    let s = parse("while (x > 0) if (x == 2) x = [0, 1] else x = x - 1")?;
    let Stmt::While(b, body) = &s else { unreachable!() };
    let pre: HyperSet = [SemTriple::init(4), SemTriple::from_e(Rel::from_pairs(4, [(3, 3)]))].into();
    let mut images = post_hyper(&sem(&s, &sp)?, &pre);
    show(&rule_while_upper(&pre, b, body, &PostCond::Set(images.clone()), &sp)?);
    images.pop_first();
    show(&rule_while_lower(&pre, b, body, &images, &sp)?);

    // countdown to ten: every precondition ends below x <= 10
    let ex = corpus::example("countdown_to_ten")?;
    let sp = ex.space()?;
    let n = sp.size();
    let pre: HyperSet = (11..=13)
        .map(|v| {
            let to = sp.encode(&[v]).expect("in window");
            SemTriple::from_e(Rel::from_pairs(n, sp.states().map(|s| (s, to))))
        })
        .collect();
    let bound = SemTriple::from_e(Rel::from_pairs(n, sp.states().flat_map(|s| (0..=10).map(move |t| (s, t)))));
    show(&rule_principal_ideal(&pre, &ex.stmt()?, &bound, &sp)?);

    // the invariant rule needs intermediate iterates in the postcondition
    let sp = StateSpace::uniform(&["y"], 0, 1)?;
    let s = parse("while (y != 0) y = y - 1")?;
    let Stmt::While(b, body) = &s else { unreachable!() };
    let init = HyperSet::from([SemTriple::init(2)]);
    let exact: HyperSet = post_hyper(&sem(&s, &sp)?, &init).iter().map(SemTriple::e_part).collect();
    let q = PostCond::Set(exact);
    let direct = check_upper(&Triple::upper(init.clone(), s.clone(), q.clone()), &sp)?;
    let count = exhaustive_invariants(&init, b, body, &q, &sp)?;
    println!("exact triple {}, invariants found among 2^16 candidates: {count}", direct.verdict);
    Ok(())
}
