//! Random programs: fixpoint semantics against the oracle, structural
//! post against direct composition.

use hyperlab::gen;
use hyperlab::interpreter::{oracle_sem, sem};
use hyperlab::transformers::{post_hyper, post_structural, HyperSet};

fn main() -> Result<(), hyperlab::Error> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(7);
    let mut r = gen::rng(seed);
    let (mut agree, mut calc) = (0, 0);
    let suite = gen::program_suite(seed, 200, 4);
    for (s, sp) in &suite {
        let t = sem(s, sp)?;
        agree += usize::from(t == oracle_sem(s, sp)?);
        let ps: HyperSet = gen::random_hyperset(&mut r, sp.size(), 3).into_iter().collect();
        calc += usize::from(post_structural(s, &ps, sp)? == post_hyper(&t, &ps));
    }
    println!("seed {seed}: oracle agrees on {agree}/{}, calculus on {calc}/{}", suite.len(), suite.len());
    println!("e.g. {}", suite[0].0);
    Ok(())
}
