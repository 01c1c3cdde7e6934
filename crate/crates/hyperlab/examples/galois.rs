//! The adjoint of `post` on a two-state space: `post(S)P ⊑ Q` iff
//! `P ⊑ pre~(S)Q`, checked over all 1024 triples.

use hyperlab::interpreter::sem;
use hyperlab::transformers::{all_triples, post, pre_hyper_toy, pre_tilde, HyperOracle};
use hyperlab::{parse, StateSpace};

fn main() -> Result<(), hyperlab::Error> {
    let sp = StateSpace::uniform(&["x"], 0, 1)?;
    let all = all_triples(2)?;
    for text in ["x = 1 - x", "while (x == 0) x = [0, 1]"] {
        let s = sem(&parse(text)?, &sp)?;
        let mut checked = 0usize;
        let mut ok = true;
        for q in &all {
            let back = pre_tilde(&s, q);
            for p in &all {
                ok &= post(&s, p).leq(q) == p.leq(&back);
                checked += 1;
            }
        }
        let terminating = HyperOracle::new("terminating", |t: &hyperlab::SemTriple| t.inf.is_empty());
        let pre = pre_hyper_toy(&s, &terminating)?;
        println!("{text}: adjunction {ok} on {checked} pairs; {} of 1024 triples lead to termination", pre.len());
    }
    Ok(())
}
