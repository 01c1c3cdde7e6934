//! Abstraction operators on small lattices: ideals, frontiers, closures.

use hyperlab::abstractions::*;

fn show(l: &Poset, label: &str, s: &HyperSubset) {
    println!("  {label:<28} {{{}}}", l.set_names(s).join(", "));
}

fn main() -> Result<(), hyperlab::Error> {
    let d = ToyLattice::diamond();
    println!("diamond");
    let top = d.set(&["⊤"])?;
    let upper = d.set(&["0", "1", "⊤"])?;
    show(&d, "frontier_min {⊤}", &frontier_min(&d, &top));
    show(&d, "frontier_min {0,1,⊤}", &frontier_min(&d, &upper));
    show(&d, "order_ideal {0}", &order_ideal(&d, &d.set(&["0"])?));
    show(&d, "principal_ideal {0,1}", &principal_ideal(&d, &d.set(&["0", "1"])?)?);
    show(&d, "frontier_order_ideal {⊥,0,1}", &frontier_order_ideal(&d, &d.set(&["⊥", "0", "1"])?));

    let l = ToyLattice::powerset(3);
    println!("subsets of {{a,b,c}}");
    let p = l.set(&["{a}", "{b,c}"])?;
    show(&l, "P", &p);
    for op in Op::ALL {
        show(&l, op.name(), &op.apply(&l, &p)?);
    }
    show(&l, "conjunctive", &conjunctive(&l, Op::OrderIdeal, Op::OrderFilter, &p)?);
    let join = alpha_join(&l, &p);
    println!("  join abstraction             {}", l.name(join));

    println!("closure laws over all {} subsets", 1 << 8);
    for (op, kind) in [(Op::OrderIdeal, ClosureKind::Upper), (Op::FrontierMin, ClosureKind::Upper)] {
        let r = closure_laws(8, all_subsets(8), kind, |s| op.apply(&l, s).expect("lattice"));
        println!("  {:<16} {kind:?}: {}", op.name(), if r.ok() { "holds" } else { "fails" });
    }
    Ok(())
}
