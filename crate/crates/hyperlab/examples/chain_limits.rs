//! Limits of declared infinite chains: one step is not idempotent, the star
//! closes; and a family of finite sets has no maximal elements.

use hyperlab::abstractions::*;
use hyperlab::corpus;

fn main() -> Result<(), hyperlab::Error> {
    let cp = corpus::lattice("two_level_chains")?;
    let xs: Vec<String> = (1..=3).flat_map(|i| (1..=3).map(move |j| format!("X{i}{j}"))).collect();
    let xs: Vec<&str> = xs.iter().map(String::as_str).collect();
    let p = cp.set(&xs)?;
    let once = chain_down(&cp, &p);
    let twice = chain_down(&cp, &once);
    println!("one step:  {:?}", cp.set_names(&once));
    println!("two steps: {:?}", cp.set_names(&twice));
    println!("star:      {:?}", cp.set_names(&chain_down_star(&cp, &p)?));

    let fs = corpus::lattice("finite_subsets")?;
    let f = fs.set(&["A0", "A1", "A2", "A3"])?;
    println!("finite sets: ideal {:?}", fs.set_names(&order_ideal(&fs, &f)));
    println!("finite sets: max frontier {:?}", fs.set_names(&frontier_max(&fs, &f)));
    println!("finite sets: up-limits {:?}", fs.set_names(&chain_up(&fs, &f)));

    let two = corpus::lattice("two_decreasing_chains")?;
    let q = two.set(&["a0", "a1", "a2", "a3", "b0"])?;
    println!("two chains: frontier filter {:?}", two.set_names(&frontier_order_filter(&two, &q)));
    println!("two chains: of everything {:?}", two.set_names(&frontier_order_filter(&two, &two.carrier())));
    Ok(())
}
