//! Relational semantics of the bundled countdown programs, checked against
//! the configuration-graph oracle.

use hyperlab::corpus;
use hyperlab::interpreter::{oracle_sem, sem};

fn main() -> Result<(), hyperlab::Error> {
    for name in ["countdown", "countdown_havoc", "nested", "nested_havoc"] {
        let ex = corpus::example(name)?;
        let (s, sp) = (ex.stmt()?, ex.space()?);
        let t = sem(&s, &sp)?;
        println!("{name}: {s}");
        println!("  {} states, |e| = {}, |inf| = {}, |br| = {}", sp.size(), t.e.len(), t.inf.len(), t.br.len());
        let div: Vec<String> = t.inf.iter().map(|i| sp.fmt_state(i)).collect();
        println!("  diverges from: {}", div.join(" "));
        println!("  oracle agrees: {}", oracle_sem(&s, &sp)? == t);
    }
    Ok(())
}
