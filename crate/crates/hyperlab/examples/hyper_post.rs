//! Images of precondition sets: the tied conditional against its
//! cross-product relaxation, and a loop against its weak variant.

use hyperlab::transformers::{post_if_cross, post_structural, post_weak_while, HyperSet};
use hyperlab::{parse, Rel, SemTriple, StateSpace, Stmt};

fn main() -> Result<(), hyperlab::Error> {
    let sp = StateSpace::uniform(&["x"], 0, 1)?;
    let s = parse("if (x == 0) x = 1 else x = 0")?;
    let Stmt::If(b, s1, s2) = &s else { unreachable!() };
    let ps = HyperSet::from([
        SemTriple::from_e(Rel::from_pairs(2, [(0, 0)])),
        SemTriple::from_e(Rel::from_pairs(2, [(1, 1)])),
    ]);
    let tied = post_structural(&s, &ps, &sp)?;
    let cross = post_if_cross(b, s1, s2, &ps, &sp)?;
    println!("conditional: {} tied images, {} in the cross product", tied.len(), cross.len());

    let sp = StateSpace::uniform(&["y"], -3, 3)?;
    let w = parse("while (y != 0) y = y - 1")?;
    let Stmt::While(b, body) = &w else { unreachable!() };
    let init = HyperSet::from([SemTriple::init(sp.size())]);
    let exact = post_structural(&w, &init, &sp)?;
    let weak = post_weak_while(b, body, &init, &sp)?;
    println!(
        "countdown: {} exact image, {} weak images after {} iterations",
        exact.len(),
        weak.result.len(),
        weak.stabilization
    );
    for t in &weak.result {
        let pairs: Vec<String> = t.e.pairs().map(|(a, _)| sp.fmt_state(a)).collect();
        println!("  reaches y:0 from {}", pairs.join(" "));
    }
    Ok(())
}
