//! JSON forms of triples, hyper-sets, trace sets and rule reports.
//!
//! States are written as arrays of values in declared variable order, and
//! every collection is canonically sorted so output is byte-stable.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::hyperlogic::{RuleReport, Witness};
use crate::rel_domain::{Rel, SemTriple, StateSet, StateSpace};
use crate::trace_domain::TraceSet;
use crate::transformers::HyperSet;

pub type StateJson = Vec<i64>;

/// A triple with states as value arrays.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TripleJson {
    #[serde(default)]
    pub e: Vec<(StateJson, StateJson)>,
    #[serde(default)]
    pub inf: Vec<StateJson>,
    #[serde(default)]
    pub br: Vec<(StateJson, StateJson)>,
}

fn state(space: &StateSpace, v: &[i64]) -> Result<usize> {
    space.encode(v).ok_or_else(|| {
        Error::Input(format!(
            "state {v:?} is not in the space {:?}",
            space.vars()
        ))
    })
}

fn rel_to(space: &StateSpace, r: &Rel) -> Vec<(StateJson, StateJson)> {
    r.pairs()
        .map(|(a, b)| (space.decode(a), space.decode(b)))
        .collect()
}

fn rel_from(space: &StateSpace, pairs: &[(StateJson, StateJson)]) -> Result<Rel> {
    let mut r = Rel::empty(space.size());
    for (a, b) in pairs {
        r.insert(state(space, a)?, state(space, b)?);
    }
    Ok(r)
}

pub fn set_to(space: &StateSpace, s: &StateSet) -> Vec<StateJson> {
    s.iter().map(|i| space.decode(i)).collect()
}

impl TripleJson {
    pub fn from_triple(space: &StateSpace, t: &SemTriple) -> Self {
        TripleJson {
            e: rel_to(space, &t.e),
            inf: set_to(space, &t.inf),
            br: rel_to(space, &t.br),
        }
    }

    pub fn to_triple(&self, space: &StateSpace) -> Result<SemTriple> {
        let mut inf = StateSet::empty(space.size());
        for s in &self.inf {
            inf.insert(state(space, s)?);
        }
        Ok(SemTriple {
            e: rel_from(space, &self.e)?,
            inf,
            br: rel_from(space, &self.br)?,
        })
    }
}

pub fn triple_json(space: &StateSpace, t: &SemTriple) -> Value {
    serde_json::to_value(TripleJson::from_triple(space, t)).expect("serializable")
}

pub fn hyperset_json(space: &StateSpace, hs: &HyperSet) -> Value {
    Value::Array(hs.iter().map(|t| triple_json(space, t)).collect())
}

pub fn parse_hyperset(space: &StateSpace, v: &[TripleJson]) -> Result<HyperSet> {
    v.iter().map(|t| t.to_triple(space)).collect()
}

/// Reads a hyper-set file: a JSON array of triples (or the word `init`).
pub fn read_hyperset(space: &StateSpace, text: &str) -> Result<HyperSet> {
    if text.trim() == "init" {
        return Ok(HyperSet::from([SemTriple::init(space.size())]));
    }
    let v: Vec<TripleJson> =
        serde_json::from_str(text).map_err(|e| Error::Input(format!("bad triple list: {e}")))?;
    parse_hyperset(space, &v)
}

pub fn trace_json(space: &StateSpace, t: &TraceSet) -> Value {
    let traces = |set: &std::collections::BTreeSet<Vec<usize>>| {
        set.iter()
            .map(|p| p.iter().map(|s| space.decode(*s)).collect::<Vec<_>>())
            .collect::<Vec<_>>()
    };
    json!({
        "vars": space.vars(),
        "ok": traces(&t.ok),
        "br": traces(&t.br),
        "div_starts": set_to(space, &t.div_starts),
        "truncated": t.truncated,
    })
}

pub fn report_json(space: Option<&StateSpace>, r: &RuleReport) -> Value {
    let witnesses: Vec<Value> = r
        .witnesses
        .iter()
        .map(|w| match (w, space) {
            (Witness::Triple { pre, post }, Some(sp)) => json!({
                "pre": pre.as_ref().map(|p| triple_json(sp, p)),
                "post": triple_json(sp, post),
            }),
            (Witness::Triple { .. }, None) => json!({ "triple": "unprintable without a space" }),
            (Witness::Element(s), _) => json!({ "element": s }),
        })
        .collect();
    json!({
        "rule": r.rule,
        "verdict": r.verdict,
        "direct": r.direct,
        "premises": r.premises.iter().map(|p| json!({
            "name": p.name,
            "holds": p.holds,
            "detail": p.detail,
        })).collect::<Vec<_>>(),
        "witnesses": witnesses,
    })
}

/// Pretty JSON with a trailing newline.
pub fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triple_roundtrip() {
        let sp = StateSpace::uniform(&["x", "y"], 0, 1).unwrap();
        let t = SemTriple {
            e: Rel::from_pairs(4, [(0, 3), (2, 1)]),
            inf: StateSet::from_iter(4, [1]),
            br: Rel::from_pairs(4, [(3, 3)]),
        };
        let j = TripleJson::from_triple(&sp, &t);
        assert_eq!(j.e[0], (vec![0, 0], vec![1, 1]));
        assert_eq!(j.to_triple(&sp).unwrap(), t);
        let text = serde_json::to_string(&vec![j]).unwrap();
        assert_eq!(read_hyperset(&sp, &text).unwrap(), HyperSet::from([t]));
        assert!(read_hyperset(&sp, r#"[{"inf": [[5, 5]]}]"#).is_err());
    }
}
