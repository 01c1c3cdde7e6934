//! Syntax of the while language: AST, parser, printer and structural checks.
//!
//! Grammar (whitespace insensitive):
//!
//! ```text
//! prog  ::= stmt (';'* stmt)* ';'*
//! stmt  ::= 'skip' | 'break' | x '=' aexpr | x '=' '[' bnd ',' bnd ']'
//!         | 'if' '(' bexpr ')' stmt ['else' stmt] | 'while' '(' bexpr ')' stmt
//!         | '{' [prog] '}'
//! bnd   ::= ['-'|'+'] 'oo' | ['-'] int
//! aexpr ::= term (('+'|'-') term)*      term ::= factor ('*' factor)*
//! factor::= int | x | '-' factor | '(' aexpr ')'
//! bexpr ::= conj ('||' conj)*           conj ::= unary ('&&' unary)*
//! unary ::= '!' unary | 'true' | 'false' | '(' bexpr ')' | aexpr cmp aexpr
//! ```
//!
//! A missing `else` branch is `skip`. There is no division, so every
//! expression is total.

use std::fmt;

use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AExpr {
    Const(i64),
    Var(String),
    Add(Box<AExpr>, Box<AExpr>),
    Sub(Box<AExpr>, Box<AExpr>),
    Mul(Box<AExpr>, Box<AExpr>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BExpr {
    True,
    False,
    Cmp(CmpOp, AExpr, AExpr),
    Not(Box<BExpr>),
    And(Box<BExpr>, Box<BExpr>),
    Or(Box<BExpr>, Box<BExpr>),
}

/// Statements. `None` bounds of a random assignment stand for -oo / +oo.
/// `Test` is only built internally (guards of the calculus) and has no
/// concrete syntax.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Stmt {
    Assign(String, AExpr),
    RandAssign(String, Option<i64>, Option<i64>),
    Skip,
    Seq(Box<Stmt>, Box<Stmt>),
    If(BExpr, Box<Stmt>, Box<Stmt>),
    While(BExpr, Box<Stmt>),
    Break,
    Test(BExpr),
}

impl AExpr {
    pub fn var(x: &str) -> AExpr {
        AExpr::Var(x.to_string())
    }

    pub fn vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut Vec<String>) {
        match self {
            AExpr::Const(_) => {}
            AExpr::Var(x) => push_unique(out, x),
            AExpr::Add(a, b) | AExpr::Sub(a, b) | AExpr::Mul(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    /// Evaluates with `lookup` giving the value of each variable.
    pub fn eval(&self, lookup: &impl Fn(&str) -> i64) -> i64 {
        match self {
            AExpr::Const(n) => *n,
            AExpr::Var(x) => lookup(x),
            AExpr::Add(a, b) => a.eval(lookup).saturating_add(b.eval(lookup)),
            AExpr::Sub(a, b) => a.eval(lookup).saturating_sub(b.eval(lookup)),
            AExpr::Mul(a, b) => a.eval(lookup).saturating_mul(b.eval(lookup)),
        }
    }
}

impl CmpOp {
    pub fn apply(self, a: i64, b: i64) -> bool {
        match self {
            CmpOp::Eq => a == b,
            CmpOp::Ne => a != b,
            CmpOp::Lt => a < b,
            CmpOp::Le => a <= b,
            CmpOp::Gt => a > b,
            CmpOp::Ge => a >= b,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "==",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }
}

impl BExpr {
    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> BExpr {
        BExpr::Not(Box::new(self))
    }

    pub fn cmp(op: CmpOp, a: AExpr, b: AExpr) -> BExpr {
        BExpr::Cmp(op, a, b)
    }

    pub fn vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut Vec<String>) {
        match self {
            BExpr::True | BExpr::False => {}
            BExpr::Cmp(_, a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            BExpr::Not(b) => b.collect_vars(out),
            BExpr::And(a, b) | BExpr::Or(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    pub fn eval(&self, lookup: &impl Fn(&str) -> i64) -> bool {
        match self {
            BExpr::True => true,
            BExpr::False => false,
            BExpr::Cmp(op, a, b) => op.apply(a.eval(lookup), b.eval(lookup)),
            BExpr::Not(b) => !b.eval(lookup),
            BExpr::And(a, b) => a.eval(lookup) && b.eval(lookup),
            BExpr::Or(a, b) => a.eval(lookup) || b.eval(lookup),
        }
    }
}

fn push_unique(out: &mut Vec<String>, x: &str) {
    if !out.iter().any(|y| y == x) {
        out.push(x.to_string());
    }
}

impl Stmt {
    pub fn seq(a: Stmt, b: Stmt) -> Stmt {
        Stmt::Seq(Box::new(a), Box::new(b))
    }

    pub fn if_(b: BExpr, s1: Stmt, s2: Stmt) -> Stmt {
        Stmt::If(b, Box::new(s1), Box::new(s2))
    }

    pub fn while_(b: BExpr, body: Stmt) -> Stmt {
        Stmt::While(b, Box::new(body))
    }

    /// Right-nested sequence of `stmts`; `skip` when empty.
    pub fn seq_all(stmts: Vec<Stmt>) -> Stmt {
        let mut it = stmts.into_iter().rev();
        match it.next() {
            None => Stmt::Skip,
            Some(last) => it.fold(last, |acc, s| Stmt::seq(s, acc)),
        }
    }

    /// `S1 + S2` as `c = [0,1]; if (c != 0) S1 else S2`.
    pub fn choice(c: &str, s1: Stmt, s2: Stmt) -> Stmt {
        Stmt::seq(
            Stmt::RandAssign(c.to_string(), Some(0), Some(1)),
            Stmt::if_(
                BExpr::cmp(CmpOp::Ne, AExpr::var(c), AExpr::Const(0)),
                s1,
                s2,
            ),
        )
    }

    /// Variables in order of first occurrence.
    pub fn vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut Vec<String>) {
        match self {
            Stmt::Assign(x, a) => {
                push_unique(out, x);
                a.collect_vars(out);
            }
            Stmt::RandAssign(x, _, _) => push_unique(out, x),
            Stmt::Skip | Stmt::Break => {}
            Stmt::Seq(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Stmt::If(c, a, b) => {
                c.collect_vars(out);
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Stmt::While(c, s) => {
                c.collect_vars(out);
                s.collect_vars(out);
            }
            Stmt::Test(c) => c.collect_vars(out),
        }
    }

    /// Immediate strict components.
    pub fn components(&self) -> Vec<&Stmt> {
        match self {
            Stmt::Seq(a, b) | Stmt::If(_, a, b) => vec![a, b],
            Stmt::While(_, s) => vec![s],
            _ => Vec::new(),
        }
    }

    pub fn depth(&self) -> usize {
        1 + self
            .components()
            .into_iter()
            .map(Stmt::depth)
            .max()
            .unwrap_or(0)
    }

    pub fn contains_loop(&self) -> bool {
        matches!(self, Stmt::While(..)) || self.components().iter().any(|s| s.contains_loop())
    }

    pub fn contains_break(&self) -> bool {
        matches!(self, Stmt::Break) || self.components().iter().any(|s| s.contains_break())
    }

    /// Ok iff every `break` sits inside some `while`. The error carries the
    /// child-index path of the first offending `break`.
    pub fn validate_breaks(&self) -> Result<(), BreakError> {
        fn walk(s: &Stmt, in_loop: bool, path: &mut Vec<usize>) -> Result<(), BreakError> {
            match s {
                Stmt::Break if !in_loop => Err(BreakError { path: path.clone() }),
                Stmt::While(_, body) => {
                    path.push(0);
                    walk(body, true, path)?;
                    path.pop();
                    Ok(())
                }
                _ => {
                    for (i, c) in s.components().into_iter().enumerate() {
                        path.push(i);
                        walk(c, in_loop, path)?;
                        path.pop();
                    }
                    Ok(())
                }
            }
        }
        walk(self, false, &mut Vec::new())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("break outside of any loop at path {path:?}")]
pub struct BreakError {
    pub path: Vec<usize>,
}

impl fmt::Display for AExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AExpr::Const(n) => write!(f, "{n}"),
            AExpr::Var(x) => write!(f, "{x}"),
            AExpr::Add(a, b) => write!(f, "({a} + {b})"),
            AExpr::Sub(a, b) => write!(f, "({a} - {b})"),
            AExpr::Mul(a, b) => write!(f, "({a} * {b})"),
        }
    }
}

impl fmt::Display for BExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BExpr::True => write!(f, "true"),
            BExpr::False => write!(f, "false"),
            BExpr::Cmp(op, a, b) => write!(f, "({a} {} {b})", op.symbol()),
            BExpr::Not(b) => write!(f, "!{b}"),
            BExpr::And(a, b) => write!(f, "({a} && {b})"),
            BExpr::Or(a, b) => write!(f, "({a} || {b})"),
        }
    }
}

fn fmt_bound(b: Option<i64>, neg: bool) -> String {
    match b {
        Some(n) => n.to_string(),
        None if neg => "-oo".to_string(),
        None => "oo".to_string(),
    }
}

impl fmt::Display for Stmt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Stmt::Assign(x, a) => write!(f, "{x} = {a}"),
            Stmt::RandAssign(x, lo, hi) => {
                write!(f, "{x} = [{}, {}]", fmt_bound(*lo, true), fmt_bound(*hi, false))
            }
            Stmt::Skip => write!(f, "skip"),
            Stmt::Break => write!(f, "break"),
            Stmt::Seq(a, b) => write!(f, "{{ {a}; {b} }}"),
            Stmt::If(c, a, b) => write!(f, "if ({c}) {a} else {b}"),
            Stmt::While(c, s) => write!(f, "while ({c}) {s}"),
            Stmt::Test(c) => write!(f, "assume {c}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{line}:{col}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(i64),
    Sym(&'static str),
    Eof,
}

const SYMBOLS: [&str; 20] = [
    "==", "!=", "<=", ">=", "&&", "||", "<", ">", "!", "=", "+", "-", "*", "(", ")", "{", "}",
    "[", "]", ";",
];

fn lex(text: &str) -> Result<Vec<(Tok, usize, usize)>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let err = |line, col, msg: String| ParseError { line, col, msg };
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        // line comments
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let start = (line, col);
        if c.is_ascii_digit() {
            let j = (i..chars.len())
                .find(|&k| !chars[k].is_ascii_digit())
                .unwrap_or(chars.len());
            let s: String = chars[i..j].iter().collect();
            let n = s
                .parse::<i64>()
                .map_err(|_| err(line, col, format!("integer literal out of range: {s}")))?;
            out.push((Tok::Int(n), start.0, start.1));
            col += j - i;
            i = j;
        } else if c.is_ascii_alphabetic() || c == '_' {
            let j = (i..chars.len())
                .find(|&k| !(chars[k].is_ascii_alphanumeric() || chars[k] == '_'))
                .unwrap_or(chars.len());
            out.push((Tok::Ident(chars[i..j].iter().collect()), start.0, start.1));
            col += j - i;
            i = j;
        } else if c == ',' {
            out.push((Tok::Sym(","), start.0, start.1));
            i += 1;
            col += 1;
        } else {
            let rest: String = chars[i..(i + 2).min(chars.len())].iter().collect();
            let sym = SYMBOLS
                .iter()
                .find(|s| rest.starts_with(*s))
                .ok_or_else(|| err(line, col, format!("unexpected character {c:?}")))?;
            out.push((Tok::Sym(sym), start.0, start.1));
            i += sym.len();
            col += sym.len();
        }
    }
    out.push((Tok::Eof, line, col));
    Ok(out)
}

const KEYWORDS: [&str; 8] = ["if", "else", "while", "skip", "break", "true", "false", "oo"];

struct Parser {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].0
    }

    fn error<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        let (_, line, col) = self.toks[self.pos];
        Err(ParseError {
            line,
            col,
            msg: msg.into(),
        })
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(t) if *t == s)
    }

    fn is_kw(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Ident(t) if t == s)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, s: &str) -> Result<(), ParseError> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            self.error(format!("expected `{s}`, found {}", describe(self.peek())))
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(x) if !KEYWORDS.contains(&x.as_str()) => {
                self.pos += 1;
                Ok(x)
            }
            t => self.error(format!("expected identifier, found {}", describe(&t))),
        }
    }

    fn program(&mut self) -> Result<Stmt, ParseError> {
        let mut stmts = Vec::new();
        while self.eat_sym(";") {}
        while !(self.is_sym("}") || *self.peek() == Tok::Eof) {
            stmts.push(self.stmt()?);
            while self.eat_sym(";") {}
        }
        Ok(Stmt::seq_all(stmts))
    }

    fn stmt(&mut self) -> Result<Stmt, ParseError> {
        if self.is_kw("skip") {
            self.pos += 1;
            return Ok(Stmt::Skip);
        }
        if self.is_kw("break") {
            self.pos += 1;
            return Ok(Stmt::Break);
        }
        if self.is_kw("if") {
            self.pos += 1;
            self.expect_sym("(")?;
            let c = self.bexpr()?;
            self.expect_sym(")")?;
            let s1 = self.stmt()?;
            if self.is_sym(";") && matches!(self.peek_at(1), Tok::Ident(k) if k == "else") {
                self.pos += 1;
            }
            let s2 = if self.is_kw("else") {
                self.pos += 1;
                self.stmt()?
            } else {
                Stmt::Skip
            };
            return Ok(Stmt::if_(c, s1, s2));
        }
        if self.is_kw("while") {
            self.pos += 1;
            self.expect_sym("(")?;
            let c = self.bexpr()?;
            self.expect_sym(")")?;
            let body = self.stmt()?;
            return Ok(Stmt::while_(c, body));
        }
        if self.eat_sym("{") {
            let s = self.program()?;
            self.expect_sym("}")?;
            return Ok(s);
        }
        let x = self.ident()?;
        self.expect_sym("=")?;
        if self.eat_sym("[") {
            let lo = self.bound(true)?;
            self.expect_sym(",")?;
            let hi = self.bound(false)?;
            self.expect_sym("]")?;
            return Ok(Stmt::RandAssign(x, lo, hi));
        }
        Ok(Stmt::Assign(x, self.aexpr()?))
    }

    fn bound(&mut self, lower: bool) -> Result<Option<i64>, ParseError> {
        let neg = self.eat_sym("-");
        if !neg {
            self.eat_sym("+");
        }
        match self.peek().clone() {
            Tok::Ident(k) if k == "oo" => {
                self.pos += 1;
                if neg != lower {
                    return self.error(if lower {
                        "lower bound may only be -oo"
                    } else {
                        "upper bound may only be +oo"
                    });
                }
                Ok(None)
            }
            Tok::Int(n) => {
                self.pos += 1;
                Ok(Some(if neg { -n } else { n }))
            }
            t => self.error(format!("expected bound, found {}", describe(&t))),
        }
    }

    fn aexpr(&mut self) -> Result<AExpr, ParseError> {
        let mut a = self.term()?;
        loop {
            if self.eat_sym("+") {
                a = AExpr::Add(Box::new(a), Box::new(self.term()?));
            } else if self.eat_sym("-") {
                a = AExpr::Sub(Box::new(a), Box::new(self.term()?));
            } else {
                return Ok(a);
            }
        }
    }

    fn term(&mut self) -> Result<AExpr, ParseError> {
        let mut a = self.factor()?;
        while self.eat_sym("*") {
            a = AExpr::Mul(Box::new(a), Box::new(self.factor()?));
        }
        Ok(a)
    }

    fn factor(&mut self) -> Result<AExpr, ParseError> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.pos += 1;
                Ok(AExpr::Const(n))
            }
            Tok::Sym("-") => {
                self.pos += 1;
                match self.factor()? {
                    AExpr::Const(n) => Ok(AExpr::Const(-n)),
                    a => Ok(AExpr::Sub(Box::new(AExpr::Const(0)), Box::new(a))),
                }
            }
            Tok::Sym("(") => {
                self.pos += 1;
                let a = self.aexpr()?;
                self.expect_sym(")")?;
                Ok(a)
            }
            Tok::Ident(_) => Ok(AExpr::Var(self.ident()?)),
            t => self.error(format!("expected expression, found {}", describe(&t))),
        }
    }

    fn bexpr(&mut self) -> Result<BExpr, ParseError> {
        let mut b = self.conj()?;
        while self.eat_sym("||") {
            b = BExpr::Or(Box::new(b), Box::new(self.conj()?));
        }
        Ok(b)
    }

    fn conj(&mut self) -> Result<BExpr, ParseError> {
        let mut b = self.unary()?;
        while self.eat_sym("&&") {
            b = BExpr::And(Box::new(b), Box::new(self.unary()?));
        }
        Ok(b)
    }

    fn unary(&mut self) -> Result<BExpr, ParseError> {
        if self.eat_sym("!") {
            return Ok(self.unary()?.not());
        }
        if self.is_kw("true") {
            self.pos += 1;
            return Ok(BExpr::True);
        }
        if self.is_kw("false") {
            self.pos += 1;
            return Ok(BExpr::False);
        }
        if self.is_sym("(") {
            // either a parenthesized condition or an arithmetic operand
            let save = self.pos;
            self.pos += 1;
            if let Ok(b) = self.bexpr() {
                if self.eat_sym(")") && !self.at_arith_continuation() {
                    return Ok(b);
                }
            }
            self.pos = save;
        }
        let a = self.aexpr()?;
        let op = match self.peek() {
            Tok::Sym("==") => CmpOp::Eq,
            Tok::Sym("!=") => CmpOp::Ne,
            Tok::Sym("<") => CmpOp::Lt,
            Tok::Sym("<=") => CmpOp::Le,
            Tok::Sym(">") => CmpOp::Gt,
            Tok::Sym(">=") => CmpOp::Ge,
            t => return self.error(format!("expected comparison, found {}", describe(t))),
        };
        self.pos += 1;
        let b = self.aexpr()?;
        Ok(BExpr::Cmp(op, a, b))
    }

    fn at_arith_continuation(&self) -> bool {
        matches!(
            self.peek(),
            Tok::Sym("+" | "-" | "*" | "==" | "!=" | "<" | "<=" | ">" | ">=")
        )
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(x) => format!("`{x}`"),
        Tok::Int(n) => format!("`{n}`"),
        Tok::Sym(s) => format!("`{s}`"),
        Tok::Eof => "end of input".to_string(),
    }
}

/// Parses a program.
pub fn parse(text: &str) -> Result<Stmt, ParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    let s = p.program()?;
    if *p.peek() != Tok::Eof {
        return p.error(format!("unexpected {}", describe(p.peek())));
    }
    Ok(s)
}

/// Parses a standalone condition.
pub fn parse_bexpr(text: &str) -> Result<BExpr, ParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    let b = p.bexpr()?;
    if *p.peek() != Tok::Eof {
        return p.error(format!("unexpected {}", describe(p.peek())));
    }
    Ok(b)
}
