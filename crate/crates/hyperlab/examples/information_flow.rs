//! Noninterference and its generalizations as hyper-triples.

use hyperlab::abstractions::named_oracle;
use hyperlab::hyperlogic::{check_upper, Triple, Witness};
use hyperlab::transformers::HyperSet;
use hyperlab::{parse, SemTriple, StateSpace};

fn main() -> Result<(), hyperlab::Error> {
    let sp = StateSpace::uniform(&["l", "h"], 0, 1)?;
    let init = HyperSet::from([SemTriple::init(sp.size())]);
    for prog in ["l = 0", "l = h", "l = [0, 1]", "if (h == 0) l = [0, 1] else l = 1 - l"] {
        for oracle in ["ni:l", "gni:l,h", "gd:l,h"] {
            let q = named_oracle(oracle, &sp)?;
            let rep = check_upper(&Triple::upper(init.clone(), parse(prog)?, q), &sp)?;
            print!("{prog:<40} {oracle:<8} {}", rep.verdict);
            if let Some(Witness::Triple { post, .. }) = rep.witnesses.first() {
                let pairs: Vec<String> =
                    post.e.pairs().map(|(a, b)| format!("{}->{}", sp.fmt_state(a), sp.fmt_state(b))).collect();
                print!("  ({})", pairs.join(" "));
            }
            println!();
        }
    }
    Ok(())
}
