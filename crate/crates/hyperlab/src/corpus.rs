//! Example programs and lattices shipped with the crate, embedded at build time.

use serde::Deserialize;

use crate::abstractions::{parse_lattice, Poset};
use crate::error::{Error, Result};
use crate::lang::{parse, Stmt};
use crate::rel_domain::{SpaceConfig, StateSpace};

/// A program with its state space and optional extras.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Example {
    pub name: String,
    #[serde(default)]
    pub note: String,
    pub program: String,
    pub space: SpaceConfig,
    #[serde(default)]
    pub max_len: Option<usize>,
    #[serde(default)]
    pub post_oracle: Option<String>,
}

impl Example {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Input(format!("bad example file: {e}")))
    }

    pub fn stmt(&self) -> Result<Stmt> {
        Ok(parse(&self.program)?)
    }

    pub fn space(&self) -> Result<StateSpace> {
        StateSpace::from_config(&self.space)
    }
}

const PROGRAMS: [(&str, &str); 7] = [
    ("countdown", include_str!("../corpus/countdown.json")),
    ("countdown_havoc", include_str!("../corpus/countdown_havoc.json")),
    ("nested", include_str!("../corpus/nested.json")),
    ("nested_havoc", include_str!("../corpus/nested_havoc.json")),
    ("break_loop", include_str!("../corpus/break_loop.json")),
    ("leak", include_str!("../corpus/leak.json")),
    ("countdown_to_ten", include_str!("../corpus/countdown_to_ten.json")),
];

const LATTICES: [(&str, &str); 4] = [
    ("diamond", include_str!("../corpus/diamond.json")),
    ("finite_subsets", include_str!("../corpus/finite_subsets.json")),
    ("two_decreasing_chains", include_str!("../corpus/two_decreasing_chains.json")),
    ("two_level_chains", include_str!("../corpus/two_level_chains.json")),
];

pub fn program_names() -> Vec<&'static str> {
    PROGRAMS.iter().map(|(n, _)| *n).collect()
}

pub fn lattice_names() -> Vec<&'static str> {
    LATTICES.iter().map(|(n, _)| *n).collect()
}

pub fn example(name: &str) -> Result<Example> {
    let (_, text) = PROGRAMS
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| Error::Input(format!("no example named `{name}`")))?;
    Example::from_json(text)
}

pub fn lattice(name: &str) -> Result<Poset> {
    let (_, text) = LATTICES
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| Error::Input(format!("no lattice named `{name}`")))?;
    parse_lattice(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn everything_loads() {
        for n in program_names() {
            let ex = example(n).unwrap();
            assert_eq!(ex.name, n);
            ex.space().unwrap().check_bound(&ex.stmt().unwrap()).unwrap();
        }
        for n in lattice_names() {
            lattice(n).unwrap();
        }
    }

    #[test]
    fn shipped_chains_match_the_builtin() {
        let file = lattice("two_level_chains").unwrap();
        let built = crate::abstractions::two_level_chains();
        assert_eq!(file.names().len(), built.names().len());
        assert_eq!(file.families().len(), built.families().len());
    }
}
