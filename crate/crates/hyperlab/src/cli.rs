//! The `hl` command line: argument parsing, input resolution and output.
//!
//! Exit codes: 0 when a check holds (or a command succeeds), 1 when it
//! fails, 2 on bad input.

use std::ffi::OsString;
use std::path::Path;
use std::time::Instant;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::abstractions::{self as abs, HyperSubset, Op, Poset, ToyLattice};
use crate::corpus::{self, Example};
use crate::hyperlogic::{self as hl, Polarity, PostCond, RuleReport, Triple};
use crate::interpreter::{oracle_sem, sem};
use crate::lang::{parse, Stmt};
use crate::rel_domain::{SemTriple, SpaceConfig, StateSpace};
use crate::report::{self, TripleJson};
use crate::selftest;
use crate::trace_domain::{dump, trace_sem_budget, DEFAULT_BUDGET};
use crate::transformers::{post_if_cross, post_structural, post_weak_while, HyperSet};

#[derive(Parser, Debug)]
#[command(name = "hl", version, about = "Semantics, hyper-triples and abstractions for a small while language")]
pub struct Cli {
    #[command(subcommand)]
    pub cmd: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Relational semantics of a program.
    Sem {
        #[command(flatten)]
        input: Input,
        /// Also run the configuration-graph oracle and report agreement.
        #[arg(long)]
        oracle: bool,
    },
    /// Bounded finite traces.
    Trace {
        #[command(flatten)]
        input: Input,
        /// Longest trace kept, in states.
        #[arg(long = "L", default_value_t = 10)]
        max_len: usize,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: usize,
    },
    /// Image of each precondition triple.
    Post {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        pre: Option<String>,
    },
    /// Structural image of a precondition set; optionally the weak loop or
    /// cross-product conditional variants.
    HyperPost {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        pre: Option<String>,
        #[arg(long)]
        weak: bool,
        #[arg(long)]
        cross: bool,
    },
    /// Check a hyper-triple or a proof rule.
    Check(CheckArgs),
    /// Apply an abstraction operator to a subset of a lattice.
    Abstract {
        #[arg(long)]
        lattice: String,
        /// Operator name, or `conjunctive:IDEAL_OP,FILTER_OP`.
        #[arg(long)]
        op: String,
        /// Comma-separated element names.
        #[arg(long, default_value = "")]
        set: String,
        #[arg(long)]
        json: bool,
    },
    /// Closure laws of every operator on a finite lattice.
    LatticeLab {
        #[arg(long)]
        lattice: String,
        #[arg(long)]
        json: bool,
    },
    /// Run the built-in example and property suites.
    Selftest {
        /// Only suites whose name contains this.
        #[arg(long)]
        filter: Option<String>,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args, Debug, Clone)]
pub struct Input {
    /// Program text, a file, or `corpus:NAME`.
    #[arg(long)]
    pub program: String,
    /// Space config (file, inline JSON or `x,y=LO..HI`); defaults to the
    /// one bundled with a corpus example.
    #[arg(long)]
    pub space: Option<String>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    #[command(flatten)]
    pub input: Input,
    /// upper, lower, negate, seq, if_upper, if_lower, while_upper,
    /// while_lower, consequence_upper, consequence_lower, choice,
    /// forall_exists, principal_ideal, principal_filter, conjunctive
    #[arg(long, default_value = "upper")]
    pub rule: String,
    /// Precondition set file (JSON triple list or `init`); default `init`.
    #[arg(long)]
    pub pre: Option<String>,
    /// Oracle name or triple-list file.
    #[arg(long = "post-oracle")]
    pub post_oracle: Option<String>,
    /// Intermediate set for `seq`.
    #[arg(long)]
    pub mid: Option<String>,
    /// Loop invariant for `forall_exists`; default the canonical one.
    #[arg(long)]
    pub invariant: Option<String>,
    /// Bound triple file for principal ideals and filters.
    #[arg(long)]
    pub bound: Option<String>,
    /// Inner precondition for `consequence_*`.
    #[arg(long)]
    pub pre2: Option<String>,
    /// Inner postcondition for `consequence_*`.
    #[arg(long)]
    pub post2: Option<String>,
    /// Choice variable for `choice`.
    #[arg(long, default_value = "c")]
    pub choice_var: String,
}

/// Parses arguments and runs; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.cmd) {
        Ok(Outcome { text, code }) => {
            print!("{text}");
            code
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            2
        }
    }
}

pub struct Outcome {
    pub text: String,
    pub code: i32,
}

fn ok(text: String) -> anyhow::Result<Outcome> {
    Ok(Outcome { text, code: 0 })
}

pub fn dispatch(cmd: Command) -> anyhow::Result<Outcome> {
    match cmd {
        Command::Sem { input, oracle } => cmd_sem(&input, oracle),
        Command::Trace { input, max_len, budget } => cmd_trace(&input, max_len, budget),
        Command::Post { input, pre } => cmd_post(&input, pre.as_deref()),
        Command::HyperPost { input, pre, weak, cross } => cmd_hyper_post(&input, pre.as_deref(), weak, cross),
        Command::Check(a) => cmd_check(&a),
        Command::Abstract { lattice, op, set, json } => cmd_abstract(&lattice, &op, &set, json),
        Command::LatticeLab { lattice, json } => cmd_lattice_lab(&lattice, json),
        Command::Selftest { filter, json } => cmd_selftest(filter.as_deref(), json),
    }
}

// input resolution

pub struct Loaded {
    pub stmt: Stmt,
    pub space: StateSpace,
    pub example: Option<Example>,
}

fn read(path: &str) -> anyhow::Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {path}"))
}

fn parse_space(text: &str) -> anyhow::Result<StateSpace> {
    let t = text.trim();
    if let Some((vars, range)) = t.split_once('=').filter(|_| !t.starts_with('{')) {
        let (lo, hi) = range
            .split_once("..")
            .ok_or_else(|| anyhow!("space shorthand is `x,y=LO..HI`"))?;
        let vars: Vec<&str> = vars.split(',').map(str::trim).collect();
        return Ok(StateSpace::uniform(&vars, lo.trim().parse()?, hi.trim().parse()?)?);
    }
    let v: Value = serde_json::from_str(t).context("space is not JSON")?;
    let cfg = v.get("space").cloned().unwrap_or(v);
    let cfg: SpaceConfig = serde_json::from_value(cfg).context("bad space config")?;
    Ok(StateSpace::from_config(&cfg)?)
}

pub fn load(input: &Input) -> anyhow::Result<Loaded> {
    let p = &input.program;
    let (text, example) = if let Some(name) = p.strip_prefix("corpus:") {
        let ex = corpus::example(name)?;
        (ex.program.clone(), Some(ex))
    } else if Path::new(p).is_file() {
        let body = read(p)?;
        if p.ends_with(".json") {
            let ex = Example::from_json(&body)?;
            (ex.program.clone(), Some(ex))
        } else {
            (body, None)
        }
    } else {
        (p.clone(), None)
    };
    let space = match (&input.space, &example) {
        (Some(s), _) if Path::new(s).is_file() => parse_space(&read(s)?)?,
        (Some(s), _) => parse_space(s)?,
        (None, Some(ex)) => ex.space()?,
        (None, None) => bail!("--space is required unless the program is a corpus example"),
    };
    let stmt = parse(&text)?;
    stmt.validate_breaks()?;
    space.check_bound(&stmt)?;
    Ok(Loaded { stmt, space, example })
}

fn hyperset_arg(space: &StateSpace, arg: Option<&str>) -> anyhow::Result<HyperSet> {
    match arg {
        None | Some("init") => Ok(HyperSet::from([SemTriple::init(space.size())])),
        Some(path) => Ok(report::read_hyperset(space, &read(path)?)?),
    }
}

fn postcond_arg(space: &StateSpace, arg: Option<&str>, example: Option<&Example>) -> anyhow::Result<PostCond> {
    let name = arg
        .map(str::to_string)
        .or_else(|| example.and_then(|e| e.post_oracle.clone()))
        .ok_or_else(|| anyhow!("--post-oracle is required"))?;
    if Path::new(&name).is_file() {
        return Ok(PostCond::Set(report::read_hyperset(space, &read(&name)?)?));
    }
    Ok(PostCond::Oracle(abs::named_oracle(&name, space)?))
}

fn explicit_post(q: PostCond, rule: &str) -> anyhow::Result<HyperSet> {
    match q {
        PostCond::Set(s) => Ok(s),
        PostCond::Oracle(o) => bail!("rule `{rule}` needs an explicit postcondition file, got oracle `{}`", o.name),
    }
}

fn triple_arg(space: &StateSpace, path: &str) -> anyhow::Result<SemTriple> {
    let text = read(path)?;
    if text.trim() == "init" {
        return Ok(SemTriple::init(space.size()));
    }
    let t: TripleJson = serde_json::from_str(&text).context("bad triple")?;
    Ok(t.to_triple(space)?)
}

// commands

fn fmt_triple(sp: &StateSpace, t: &SemTriple) -> String {
    let mut s = String::from("e:\n");
    for (a, b) in t.e.pairs() {
        s.push_str(&format!("  {} -> {}\n", sp.fmt_state(a), sp.fmt_state(b)));
    }
    let inf: Vec<String> = t.inf.iter().map(|i| sp.fmt_state(i)).collect();
    s.push_str(&format!("inf: {}\n", if inf.is_empty() { "-".into() } else { inf.join(" ") }));
    s.push_str("br:\n");
    for (a, b) in t.br.pairs() {
        s.push_str(&format!("  {} -> {}\n", sp.fmt_state(a), sp.fmt_state(b)));
    }
    s
}

fn cmd_sem(input: &Input, with_oracle: bool) -> anyhow::Result<Outcome> {
    let l = load(input)?;
    let t = sem(&l.stmt, &l.space)?;
    let agrees = if with_oracle { Some(oracle_sem(&l.stmt, &l.space)? == t) } else { None };
    let code = i32::from(agrees == Some(false));
    let text = if input.json {
        report::render(&json!({
            "space": l.space.config(),
            "program": l.stmt.to_string(),
            "sem": report::triple_json(&l.space, &t),
            "oracle_agrees": agrees,
        }))
    } else {
        let mut s = fmt_triple(&l.space, &t);
        if let Some(a) = agrees {
            s.push_str(&format!("oracle agrees: {a}\n"));
        }
        s
    };
    Ok(Outcome { text, code })
}

fn cmd_trace(input: &Input, max_len: usize, budget: usize) -> anyhow::Result<Outcome> {
    let l = load(input)?;
    let t = trace_sem_budget(&l.stmt, &l.space, max_len, budget)?;
    if input.json {
        return ok(report::render(&report::trace_json(&l.space, &t)));
    }
    let mut s = dump(&l.space, &t);
    let div: Vec<String> = t.div_starts.iter().map(|i| l.space.fmt_state(i)).collect();
    s.push_str(&format!("diverging from: {}\n", if div.is_empty() { "-".into() } else { div.join(" ") }));
    s.push_str(&format!("truncated: {}\n", t.truncated));
    ok(s)
}

fn cmd_post(input: &Input, pre: Option<&str>) -> anyhow::Result<Outcome> {
    let l = load(input)?;
    let ps = hyperset_arg(&l.space, pre)?;
    let s_sem = sem(&l.stmt, &l.space)?;
    let pairs: Vec<(SemTriple, SemTriple)> =
        ps.iter().map(|p| (p.clone(), crate::transformers::post(&s_sem, p))).collect();
    if input.json {
        let v: Vec<Value> = pairs
            .iter()
            .map(|(p, q)| json!({ "pre": report::triple_json(&l.space, p), "post": report::triple_json(&l.space, q) }))
            .collect();
        return ok(report::render(&Value::Array(v)));
    }
    let mut s = String::new();
    for (i, (_, q)) in pairs.iter().enumerate() {
        s.push_str(&format!("# post of precondition {i}\n{}", fmt_triple(&l.space, q)));
    }
    ok(s)
}

fn cmd_hyper_post(input: &Input, pre: Option<&str>, weak: bool, cross: bool) -> anyhow::Result<Outcome> {
    let l = load(input)?;
    let ps = hyperset_arg(&l.space, pre)?;
    let exact = post_structural(&l.stmt, &ps, &l.space)?;
    let mut out = json!({ "post": report::hyperset_json(&l.space, &exact) });
    if weak {
        let Stmt::While(b, body) = &l.stmt else { bail!("--weak needs a while loop at the root") };
        let w = post_weak_while(b, body, &ps, &l.space)?;
        out["weak"] = report::hyperset_json(&l.space, &w.result);
        out["weak_stabilization"] = json!(w.stabilization);
    }
    if cross {
        let Stmt::If(b, s1, s2) = &l.stmt else { bail!("--cross needs a conditional at the root") };
        out["cross"] = report::hyperset_json(&l.space, &post_if_cross(b, s1, s2, &ps, &l.space)?);
    }
    if input.json {
        return ok(report::render(&out));
    }
    let mut s = format!("{} precondition(s), {} image(s)\n", ps.len(), exact.len());
    for (i, q) in exact.iter().enumerate() {
        s.push_str(&format!("# image {i}\n{}", fmt_triple(&l.space, q)));
    }
    for key in ["weak", "cross"] {
        if let Some(Value::Array(a)) = out.get(key) {
            s.push_str(&format!("{key}: {} element(s)\n", a.len()));
        }
    }
    ok(s)
}

fn run_rule(a: &CheckArgs, l: &Loaded) -> anyhow::Result<RuleReport> {
    let sp = &l.space;
    let pre = hyperset_arg(sp, a.pre.as_deref())?;
    let q = || postcond_arg(sp, a.post_oracle.as_deref(), l.example.as_ref());
    let shape = |what: &str| anyhow!("rule `{}` needs {what} at the root of the program", a.rule);
    let bound = || -> anyhow::Result<SemTriple> {
        triple_arg(sp, a.bound.as_deref().ok_or_else(|| anyhow!("--bound is required"))?)
    };
    Ok(match a.rule.as_str() {
        "upper" => hl::check_upper(&Triple::upper(pre, l.stmt.clone(), q()?), sp)?,
        "lower" => hl::check_lower(&Triple::lower(pre, l.stmt.clone(), explicit_post(q()?, "lower")?), sp)?,
        "negate" => {
            let q = q()?;
            let (refuted, sub) = hl::negate_upper(&pre, &l.stmt, &q, sp)?;
            let mut rep = match &sub {
                Some(sub) => hl::check_upper(&Triple::upper(sub.clone(), l.stmt.clone(), q.negate()), sp)?,
                None => hl::check_upper(&Triple::upper(HyperSet::new(), l.stmt.clone(), q), sp)?,
            };
            rep.rule = "negate".into();
            if !refuted {
                rep.verdict = hl::Verdict::Fails;
                rep.witnesses = vec![hl::Witness::Element("the upper triple holds".into())];
            }
            rep
        }
        "seq" => {
            let Stmt::Seq(s1, s2) = &l.stmt else { return Err(shape("a sequence")) };
            let mid = a.mid.as_deref().map(|m| hyperset_arg(sp, Some(m))).transpose()?;
            hl::rule_seq(&pre, s1, s2, mid.as_ref(), &q()?, sp)?
        }
        "if_upper" | "if_lower" => {
            let Stmt::If(b, s1, s2) = &l.stmt else { return Err(shape("a conditional")) };
            if a.rule == "if_upper" {
                hl::rule_if_upper(&pre, b, s1, s2, &q()?, sp)?
            } else {
                hl::rule_if_lower(&pre, b, s1, s2, &explicit_post(q()?, "if_lower")?, sp)?
            }
        }
        "while_upper" | "while_lower" | "forall_exists" => {
            let Stmt::While(b, body) = &l.stmt else { return Err(shape("a while loop")) };
            match a.rule.as_str() {
                "while_upper" => hl::rule_while_upper(&pre, b, body, &q()?, sp)?,
                "while_lower" => hl::rule_while_lower(&pre, b, body, &explicit_post(q()?, "while_lower")?, sp)?,
                _ => {
                    let inv = match &a.invariant {
                        Some(path) => hyperset_arg(sp, Some(path))?,
                        None => hl::canonical_invariant(&pre, b, body, sp)?,
                    };
                    hl::rule_forall_exists(&pre, b, body, &inv, &q()?, sp)?
                }
            }
        }
        "consequence_upper" | "consequence_lower" => {
            let pre2 = hyperset_arg(sp, a.pre2.as_deref())?;
            let q2 = postcond_arg(sp, a.post2.as_deref(), None)?;
            let pol = if a.rule == "consequence_upper" { Polarity::Upper } else { Polarity::Lower };
            hl::rule_consequence(pol, &pre, &pre2, &l.stmt, &q2, &q()?, sp)?
        }
        "choice" => {
            let Stmt::Seq(first, rest) = &l.stmt else { return Err(shape("`c = [0, 1]; if (c != 0) S1 else S2`")) };
            let (Stmt::RandAssign(c, ..), Stmt::If(_, s1, s2)) = (first.as_ref(), rest.as_ref()) else {
                return Err(shape("`c = [0, 1]; if (c != 0) S1 else S2`"));
            };
            if *c != a.choice_var {
                bail!("choice variable is `{c}`, expected `{}`", a.choice_var);
            }
            hl::rule_choice(&pre, c, s1, s2, &q()?, sp)?
        }
        "principal_ideal" => hl::rule_principal_ideal(&pre, &l.stmt, &bound()?, sp)?,
        "principal_filter" => hl::rule_principal_filter(&pre, &l.stmt, &bound()?, sp)?,
        "conjunctive" => hl::rule_conjunctive(&pre, &l.stmt, &explicit_post(q()?, "conjunctive")?, sp)?,
        other => bail!("unknown rule `{other}`"),
    })
}

fn cmd_check(a: &CheckArgs) -> anyhow::Result<Outcome> {
    let l = load(&a.input)?;
    let rep = run_rule(a, &l)?;
    let code = if rep.verdict.holds() { 0 } else { 1 };
    let text = if a.input.json {
        report::render(&report::report_json(Some(&l.space), &rep))
    } else {
        let mut s = format!("{}: {}\n", rep.rule, rep.verdict);
        for p in &rep.premises {
            s.push_str(&format!("  [{}] {} ({})\n", if p.holds { "ok" } else { "no" }, p.name, p.detail));
        }
        if let Some(d) = rep.direct {
            s.push_str(&format!("  direct check: {d}\n"));
        }
        for w in rep.witnesses.iter().take(3) {
            match w {
                hl::Witness::Triple { pre, post } => {
                    if let Some(p) = pre {
                        s.push_str(&format!("witness precondition:\n{}", fmt_triple(&l.space, p)));
                    }
                    s.push_str(&format!("witness image:\n{}", fmt_triple(&l.space, post)));
                }
                hl::Witness::Element(e) => s.push_str(&format!("witness: {e}\n")),
            }
        }
        s
    };
    Ok(Outcome { text, code })
}

/// Built-in lattices by name, corpus lattices, or a lattice file.
pub fn load_lattice(spec: &str) -> anyhow::Result<Poset> {
    let (head, arg) = spec.split_once(':').unwrap_or((spec, ""));
    let k = || arg.parse::<usize>().with_context(|| format!("`{spec}` needs a size"));
    Ok(match head {
        "powerset" => {
            let k = k()?;
            if k > 6 {
                bail!("powerset lattices are limited to 6 atoms");
            }
            ToyLattice::powerset(k).poset().clone()
        }
        "chain" => ToyLattice::chain(k()?).poset().clone(),
        _ if corpus::lattice_names().contains(&spec) => corpus::lattice(spec)?,
        _ => abs::parse_lattice(&read(spec)?)?,
    })
}

fn cmd_abstract(lattice: &str, op: &str, set: &str, json_out: bool) -> anyhow::Result<Outcome> {
    let l = load_lattice(lattice)?;
    let names: Vec<&str> = set.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    let p = l.set(&names)?;
    let result: HyperSubset = if let Some(args) = op.strip_prefix("conjunctive:") {
        let (a1, a2) = args.split_once(',').ok_or_else(|| anyhow!("use conjunctive:IDEAL_OP,FILTER_OP"))?;
        let get = |n: &str| Op::from_name(n.trim()).ok_or_else(|| anyhow!("unknown operator `{n}`"));
        abs::conjunctive(&l, get(a1)?, get(a2)?, &p)?
    } else {
        Op::from_name(op).ok_or_else(|| anyhow!("unknown operator `{op}`"))?.apply(&l, &p)?
    };
    let out = l.set_names(&result);
    if json_out {
        return ok(report::render(&json!({ "op": op, "input": names, "result": out })));
    }
    ok(format!("{{{}}}\n", out.join(", ")))
}

fn cmd_lattice_lab(lattice: &str, json_out: bool) -> anyhow::Result<Outcome> {
    let l = load_lattice(lattice)?;
    let n = l.names().len();
    if n > 16 {
        bail!("exhaustive law checks need at most 16 elements, got {n}");
    }
    let checks = selftest::lattice_laws(&l)?;
    let code = i32::from(!checks.iter().all(|c| c.pass));
    if json_out {
        let v: Vec<Value> = checks
            .iter()
            .map(|c| json!({ "law": c.name, "pass": c.pass, "detail": c.detail }))
            .collect();
        return Ok(Outcome { text: report::render(&json!({ "elements": n, "laws": v })), code });
    }
    let mut s = format!("{n} elements, {} families, {} subsets\n", l.families().len(), 1usize << n);
    for c in &checks {
        s.push_str(&format!("{} {} ({})\n", if c.pass { "ok  " } else { "FAIL" }, c.name, c.detail));
    }
    Ok(Outcome { text: s, code })
}

fn cmd_selftest(filter: Option<&str>, json_out: bool) -> anyhow::Result<Outcome> {
    let t = Instant::now();
    let results = selftest::run(filter);
    if results.is_empty() {
        bail!("no suite matches `{}`", filter.unwrap_or(""));
    }
    let all = results.iter().all(|r| r.pass());
    let code = i32::from(!all);
    if json_out {
        let v: Vec<Value> = results
            .iter()
            .map(|r| {
                json!({
                    "suite": r.name,
                    "pass": r.pass(),
                    "error": r.error,
                    "checks": r.checks.iter().map(|c| json!({ "name": c.name, "pass": c.pass, "detail": c.detail })).collect::<Vec<_>>(),
                })
            })
            .collect();
        return Ok(Outcome { text: report::render(&json!({ "pass": all, "suites": v })), code });
    }
    let mut s = String::new();
    for r in &results {
        s.push_str(&format!(
            "{} {:<12} {:>4} checks {:>8.2?}\n",
            if r.pass() { "ok  " } else { "FAIL" },
            r.name,
            r.checks.len(),
            r.elapsed
        ));
        if let Some(e) = &r.error {
            s.push_str(&format!("     error: {e}\n"));
        }
        for c in r.checks.iter().filter(|c| !c.pass) {
            s.push_str(&format!("     {}: {}\n", c.name, c.detail));
        }
    }
    s.push_str(&format!("{} in {:.2?}\n", if all { "all suites pass" } else { "FAILURES" }, t.elapsed()));
    Ok(Outcome { text: s, code })
}
