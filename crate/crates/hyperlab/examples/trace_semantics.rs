//! Bounded traces of a loop that leaves with `break`, and their abstraction
//! back to the relational triple.

use hyperlab::corpus;
use hyperlab::interpreter::sem;
use hyperlab::trace_domain::{abstract_to_rel, dump, trace_sem};

fn main() -> Result<(), hyperlab::Error> {
    let ex = corpus::example("break_loop")?;
    let (s, sp) = (ex.stmt()?, ex.space()?);
    let t = trace_sem(&s, &sp, 10)?;
    print!("{}", dump(&sp, &t));
    let div: Vec<String> = t.div_starts.iter().map(|i| sp.fmt_state(i)).collect();
    println!("diverging starts: {}", div.join(" "));
    // divergent prefixes longer than the bound are dropped, so the set is flagged
    println!("truncated: {}", t.truncated);
    println!("abstracts to sem: {}", abstract_to_rel(&t) == sem(&s, &sp)?);
    Ok(())
}
