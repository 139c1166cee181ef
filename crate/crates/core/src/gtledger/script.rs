//! A small line-oriented language for abelianization ledgers.
//!
//! ```text
//! group G = braid 4 / w4 | k5       # B_4 mod w4, with k5 killed in the subgroup
//! word A = t1 t3
//! check label: trivial [A, t2 A t2] in B4
//! equation E in G: f[BL](t2, x34^2) z3^{dl} = 1
//! solve E for dl
//! expect E dl = -rho
//! ```
//!
//! Group kinds are `braid n` (`B_n`), `sphere n` (`B_n` mod `w_n, y_n`) and
//! `hsphere n` (`B_n` mod `y_n`). Words after `/` are relators of the group,
//! words after `|` are killed in the subgroup only. The subgroup is always the
//! pure part. Placeholders `f[rules](u, v)` are resolved by the listed rules,
//! outermost first: `swap` uses `f(u,v) = f(v,u)⁻¹`, `expand` uses
//! `f(A,B) = B^{2ρ} f(A²,B) A^{2ρ} (AB)^{-2ρ}` under `[B, ABA] = 1`, `BL`
//! replaces `f(u,v)` by `[u,v]^{-ρ}` once `u` and `v` act on `[u,v]` by
//! `±1` in opposite ways, and `vanish` drops `f(u,v)` when `[u,v]` has class
//! zero. A `note` line runs like a `check` but does not count towards the
//! verdict.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::time::Instant;

use serde::Serialize;

use super::{
    artin_identity_check, conjugation_action, formal_class_zero, is_central, named_word, outer_action_trivial,
    pure_braid_class, render_xij, residue_survey, solve_formal, zero_assignment, strand_permutations, subgroup_abelianization_with,
    ActionKind, FormalExponent, FormalSolution, FormalWord, Presentation, Subgroup, SubgroupAbelianization, Symbol,
};
use crate::grpcore::Word;
use crate::Error;

/// The ledger for the relation coming from the two-step origami.
pub const S2_LEDGER: &str = include_str!("../../data/s2_ledger.txt");

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Int(i64),
    Sym(char),
    Op(&'static str),
}

fn tokenize(s: &str) -> Result<Vec<Tok>, Error> {
    let c: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < c.len() {
        let ch = c[i];
        if ch.is_whitespace() {
            i += 1;
        } else if ch.is_ascii_alphabetic() || ch == '_' {
            let st = i;
            while i < c.len() && (c[i].is_ascii_alphanumeric() || c[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(c[st..i].iter().collect()));
        } else if ch.is_ascii_digit() {
            let st = i;
            while i < c.len() && c[i].is_ascii_digit() {
                i += 1;
            }
            let t: String = c[st..i].iter().collect();
            out.push(Tok::Int(t.parse().map_err(|_| Error::Parse(format!("bad integer {}", t)))?));
        } else if (ch == '=' || ch == '~') && c.get(i + 1) == Some(&'=') {
            out.push(Tok::Op(if ch == '=' { "==" } else { "~=" }));
            i += 2;
        } else if "()[]{},^=:/|+-".contains(ch) {
            out.push(Tok::Sym(ch));
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected character {:?}", ch)));
        }
    }
    Ok(out)
}

#[derive(Clone, Debug)]
enum Expr {
    Name(String),
    Prod(Vec<Expr>),
    Pow(Box<Expr>, i64),
    Comm(Box<Expr>, Box<Expr>),
}

impl std::fmt::Display for Expr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Expr::Name(s) => write!(f, "{}", s),
            Expr::Prod(v) if v.is_empty() => write!(f, "1"),
            Expr::Prod(v) => {
                let parts: Vec<String> = v.iter().map(|e| e.to_string()).collect();
                write!(f, "{}", parts.join(" "))
            }
            Expr::Pow(b, k) => match **b {
                Expr::Name(_) | Expr::Comm(..) => write!(f, "{}^{}", b, k),
                _ => write!(f, "({})^{}", b, k),
            },
            Expr::Comm(a, b) => write!(f, "[{}, {}]", a, b),
        }
    }
}

fn render_tau(n: usize, w: &Word) -> String {
    let names: Vec<String> = (1..n).map(|i| format!("t{}", i)).collect();
    let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    w.render(&refs)
}

/// How a placeholder `f(u, v)` is resolved.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rule {
    BlanchfieldLyndon,
    Vanish,
    Swap(Box<Rule>),
    Expand(Box<Rule>),
}

#[derive(Clone, Debug)]
enum TermAst {
    Power(Expr, FormalExponent),
    F { u: Expr, v: Expr, inverted: bool, rule: Rule },
}

#[derive(Clone, Debug)]
enum GroupKind {
    Braid,
    Sphere,
    HSphere,
}

#[derive(Clone, Debug)]
struct GroupDecl {
    kind: GroupKind,
    n: usize,
    quotient: Vec<Expr>,
    imposed: Vec<Expr>,
}

#[derive(Clone, Debug)]
enum CheckSpec {
    Trivial(usize, Expr),
    Central(usize, Expr),
    Inner(usize, Expr),
    Zero(String, Expr),
    Equal { group: String, a: Expr, b: Expr, mod_torsion: bool },
    Action { group: String, u: Expr, c: Expr, expect: ActionKind },
    Module { group: String, free: usize, torsion: Vec<i128> },
}

#[derive(Clone, Debug)]
enum Stmt {
    Group(String, GroupDecl),
    Word(String, Expr),
    Equation { name: String, group: String, lhs: Vec<TermAst>, rhs: Vec<TermAst> },
    Solve { eq: String, unknowns: Vec<Symbol>, given: Vec<(Symbol, String)>, informational: bool },
    Expect { eq: String, sym: Symbol, value: FormalExponent },
    Check { label: String, spec: CheckSpec, informational: bool },
    Remark(String),
}

/// A parsed ledger script.
#[derive(Clone, Debug)]
pub struct LedgerScript {
    stmts: Vec<(usize, Stmt)>,
}

struct P {
    t: Vec<Tok>,
    i: usize,
}

const RESERVED: [&str; 6] = ["in", "on", "is", "for", "given", "from"];

impl P {
    fn peek(&self) -> Option<&Tok> {
        self.t.get(self.i)
    }
    fn peek2(&self) -> Option<&Tok> {
        self.t.get(self.i + 1)
    }
    fn next(&mut self) -> Option<Tok> {
        let t = self.t.get(self.i).cloned();
        self.i += 1;
        t
    }
    fn err<T>(&self, what: &str) -> Result<T, Error> {
        Err(Error::Parse(format!("expected {} at token {} ({:?})", what, self.i + 1, self.peek())))
    }
    fn sym(&mut self, c: char) -> Result<(), Error> {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.i += 1;
            Ok(())
        } else {
            self.err(&format!("'{}'", c))
        }
    }
    fn is_sym(&self, c: char) -> bool {
        self.peek() == Some(&Tok::Sym(c))
    }
    fn ident(&mut self) -> Result<String, Error> {
        match self.next() {
            Some(Tok::Ident(s)) => Ok(s),
            _ => {
                self.i -= 1;
                self.err("a name")
            }
        }
    }
    fn keyword(&mut self, k: &str) -> Result<(), Error> {
        match self.peek() {
            Some(Tok::Ident(s)) if s == k => {
                self.i += 1;
                Ok(())
            }
            _ => self.err(k),
        }
    }
    fn int(&mut self) -> Result<i64, Error> {
        let neg = if self.is_sym('-') {
            self.i += 1;
            true
        } else {
            false
        };
        match self.next() {
            Some(Tok::Int(k)) => Ok(if neg { -k } else { k }),
            _ => {
                self.i -= 1;
                self.err("an integer")
            }
        }
    }
    fn done(&self) -> Result<(), Error> {
        if self.i < self.t.len() {
            self.err("end of line")
        } else {
            Ok(())
        }
    }

    fn starts_atom(&self) -> bool {
        match self.peek() {
            Some(Tok::Ident(s)) => !RESERVED.contains(&s.as_str()),
            Some(Tok::Sym('(')) | Some(Tok::Sym('[')) => true,
            Some(Tok::Int(1)) => true,
            _ => false,
        }
    }

    fn atom(&mut self) -> Result<Expr, Error> {
        match self.next() {
            Some(Tok::Ident(s)) => Ok(Expr::Name(s)),
            Some(Tok::Int(1)) => Ok(Expr::Prod(Vec::new())),
            Some(Tok::Sym('(')) => {
                let e = self.expr()?;
                self.sym(')')?;
                Ok(e)
            }
            Some(Tok::Sym('[')) => {
                let a = self.expr()?;
                self.sym(',')?;
                let b = self.expr()?;
                self.sym(']')?;
                Ok(Expr::Comm(Box::new(a), Box::new(b)))
            }
            _ => {
                self.i -= 1;
                self.err("a word")
            }
        }
    }

    /// Formal exponent after `^`: an integer or `{...}`.
    fn exponent(&mut self) -> Result<FormalExponent, Error> {
        if self.is_sym('{') {
            self.i += 1;
            let mut s = String::new();
            loop {
                match self.next() {
                    Some(Tok::Sym('}')) => break,
                    Some(Tok::Ident(x)) => s.push_str(&x),
                    Some(Tok::Int(k)) => s.push_str(&k.to_string()),
                    Some(Tok::Sym(c)) if c == '+' || c == '-' => s.push(c),
                    _ => return self.err("a formal exponent"),
                }
            }
            s.parse()
        } else {
            Ok(FormalExponent::constant(self.int()?))
        }
    }

    fn factor(&mut self) -> Result<Expr, Error> {
        let mut e = self.atom()?;
        while self.is_sym('^') {
            self.i += 1;
            let k = self.int()?;
            e = Expr::Pow(Box::new(e), k);
        }
        Ok(e)
    }

    fn expr(&mut self) -> Result<Expr, Error> {
        let mut fs = Vec::new();
        while self.starts_atom() {
            fs.push(self.factor()?);
        }
        if fs.is_empty() {
            return self.err("a word");
        }
        Ok(if fs.len() == 1 { fs.pop().unwrap() } else { Expr::Prod(fs) })
    }

    fn expr_list(&mut self) -> Result<Vec<Expr>, Error> {
        let mut v = vec![self.expr()?];
        while self.is_sym(',') {
            self.i += 1;
            v.push(self.expr()?);
        }
        Ok(v)
    }

    fn rules(&mut self) -> Result<Rule, Error> {
        self.sym('[')?;
        let mut names = vec![self.ident()?];
        while self.is_sym(',') {
            self.i += 1;
            names.push(self.ident()?);
        }
        self.sym(']')?;
        let last = names.pop().unwrap();
        let mut r = match last.as_str() {
            "BL" => Rule::BlanchfieldLyndon,
            "vanish" => Rule::Vanish,
            _ => return Err(Error::Parse(format!("rule list must end in BL or vanish, not {}", last))),
        };
        for n in names.into_iter().rev() {
            r = match n.as_str() {
                "swap" => Rule::Swap(Box::new(r)),
                "expand" => Rule::Expand(Box::new(r)),
                _ => return Err(Error::Parse(format!("unknown rule {}", n))),
            };
        }
        Ok(r)
    }

    fn terms(&mut self) -> Result<Vec<TermAst>, Error> {
        let mut out = Vec::new();
        loop {
            if matches!(self.peek(), Some(Tok::Ident(s)) if s == "f") && self.peek2() == Some(&Tok::Sym('[')) {
                self.i += 1;
                let rule = self.rules()?;
                self.sym('(')?;
                let u = self.expr()?;
                self.sym(',')?;
                let v = self.expr()?;
                self.sym(')')?;
                let mut inverted = false;
                if self.is_sym('^') {
                    self.i += 1;
                    if self.int()? != -1 {
                        return self.err("^-1 on a placeholder");
                    }
                    inverted = true;
                }
                out.push(TermAst::F { u, v, inverted, rule });
            } else if self.starts_atom() {
                let a = self.atom()?;
                let e = if self.is_sym('^') {
                    self.i += 1;
                    self.exponent()?
                } else {
                    FormalExponent::constant(1)
                };
                out.push(TermAst::Power(a, e));
            } else {
                break;
            }
        }
        if out.is_empty() {
            return self.err("terms");
        }
        Ok(out)
    }
}

fn strands(s: &str, prefix: char) -> Option<usize> {
    s.strip_prefix(prefix).and_then(|r| r.parse().ok())
}

fn parse_check(spec: &str) -> Result<CheckSpec, Error> {
    let mut p = P { t: tokenize(spec)?, i: 0 };
    let kind = p.ident()?;
    let in_braid = |p: &mut P, c: char| -> Result<usize, Error> {
        p.keyword("in")?;
        let g = p.ident()?;
        strands(&g, c).ok_or_else(|| Error::Parse(format!("expected {}<n>, got {}", c, g)))
    };
    let r = match kind.as_str() {
        "trivial" | "central" | "inner" => {
            let e = p.expr()?;
            let n = in_braid(&mut p, if kind == "inner" { 'H' } else { 'B' })?;
            match kind.as_str() {
                "trivial" => CheckSpec::Trivial(n, e),
                "central" => CheckSpec::Central(n, e),
                _ => CheckSpec::Inner(n, e),
            }
        }
        "zero" => {
            let e = p.expr()?;
            p.keyword("in")?;
            CheckSpec::Zero(p.ident()?, e)
        }
        "equal" => {
            let a = p.expr()?;
            let mod_torsion = match p.next() {
                Some(Tok::Op("==")) => false,
                Some(Tok::Op("~=")) => true,
                _ => return p.err("== or ~="),
            };
            let b = p.expr()?;
            p.keyword("in")?;
            CheckSpec::Equal { group: p.ident()?, a, b, mod_torsion }
        }
        "action" => {
            let u = p.expr()?;
            p.keyword("on")?;
            let c = p.expr()?;
            p.keyword("in")?;
            let group = p.ident()?;
            p.keyword("is")?;
            let expect = match p.ident()?.as_str() {
                "inverts" => ActionKind::Inverts,
                "fixes" => ActionKind::Fixes,
                other => return Err(Error::Parse(format!("expected inverts or fixes, got {}", other))),
            };
            CheckSpec::Action { group, u, c, expect }
        }
        "module" => {
            let group = p.ident()?;
            p.keyword("free")?;
            let free = p.int()? as usize;
            let mut torsion = Vec::new();
            if p.peek().is_some() {
                p.keyword("torsion")?;
                while p.peek().is_some() {
                    torsion.push(i128::from(p.int()?));
                }
            }
            CheckSpec::Module { group, free, torsion }
        }
        other => return Err(Error::Parse(format!("unknown check {}", other))),
    };
    p.done()?;
    Ok(r)
}

fn parse_stmt(line: &str) -> Result<Option<Stmt>, Error> {
    let line = line.trim();
    if line.is_empty() {
        return Ok(None);
    }
    let (head, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
    let rest = rest.trim();
    match head {
        "remark" => return Ok(Some(Stmt::Remark(rest.to_string()))),
        "check" | "note" if !rest.starts_with("solve ") => {
            let (label, spec) =
                rest.split_once(':').ok_or_else(|| Error::Parse("check needs 'label: spec'".into()))?;
            return Ok(Some(Stmt::Check {
                label: label.trim().to_string(),
                spec: parse_check(spec)?,
                informational: head == "note",
            }));
        }
        _ => {}
    }
    let mut p = P { t: tokenize(line)?, i: 0 };
    let mut informational = false;
    if head == "note" {
        p.i += 1;
        informational = true;
    }
    let kw = p.ident()?;
    let st = match kw.as_str() {
        "group" => {
            let name = p.ident()?;
            p.sym('=')?;
            let kind = match p.ident()?.as_str() {
                "braid" => GroupKind::Braid,
                "sphere" => GroupKind::Sphere,
                "hsphere" => GroupKind::HSphere,
                k => return Err(Error::Parse(format!("unknown group kind {}", k))),
            };
            let n = p.int()?;
            if !(2..=9).contains(&n) {
                return Err(Error::Parse(format!("strand count {} outside 2..9", n)));
            }
            let mut quotient = Vec::new();
            let mut imposed = Vec::new();
            if p.is_sym('/') {
                p.i += 1;
                quotient = p.expr_list()?;
            }
            if p.is_sym('|') {
                p.i += 1;
                imposed = p.expr_list()?;
            }
            Stmt::Group(name, GroupDecl { kind, n: n as usize, quotient, imposed })
        }
        "word" => {
            let name = p.ident()?;
            p.sym('=')?;
            Stmt::Word(name, p.expr()?)
        }
        "equation" => {
            let name = p.ident()?;
            p.keyword("in")?;
            let group = p.ident()?;
            p.sym(':')?;
            let lhs = p.terms()?;
            p.sym('=')?;
            let rhs = p.terms()?;
            Stmt::Equation { name, group, lhs, rhs }
        }
        "solve" => {
            let eq = p.ident()?;
            let mut unknowns = Vec::new();
            let mut given = Vec::new();
            if matches!(p.peek(), Some(Tok::Ident(s)) if s == "for") {
                p.i += 1;
                loop {
                    let s = p.ident()?;
                    unknowns.push(Symbol::from_name(&s).ok_or_else(|| Error::Parse(format!("unknown symbol {}", s)))?);
                    if !p.is_sym(',') {
                        break;
                    }
                    p.i += 1;
                }
            }
            if matches!(p.peek(), Some(Tok::Ident(s)) if s == "given") {
                p.i += 1;
                loop {
                    let s = p.ident()?;
                    let sym = Symbol::from_name(&s).ok_or_else(|| Error::Parse(format!("unknown symbol {}", s)))?;
                    p.keyword("from")?;
                    given.push((sym, p.ident()?));
                    if !p.is_sym(',') {
                        break;
                    }
                    p.i += 1;
                }
            }
            Stmt::Solve { eq, unknowns, given, informational }
        }
        "expect" => {
            let eq = p.ident()?;
            let s = p.ident()?;
            let sym = Symbol::from_name(&s).ok_or_else(|| Error::Parse(format!("unknown symbol {}", s)))?;
            let (_, value) = line.split_once('=').ok_or_else(|| Error::Parse("expect needs '='".into()))?;
            Stmt::Expect { eq, sym, value: value.parse()? }
        }
        k => return Err(Error::Parse(format!("unknown statement {}", k))),
    };
    if !matches!(st, Stmt::Expect { .. }) {
        p.done()?;
    }
    Ok(Some(st))
}

impl LedgerScript {
    /// Parses a script. `#` starts a comment; a trailing `\` continues a line.
    pub fn parse(text: &str) -> Result<Self, Error> {
        let mut stmts = Vec::new();
        let mut buf = String::new();
        let mut start = 0;
        for (ln, raw) in text.lines().enumerate() {
            let l = raw.split('#').next().unwrap_or("");
            if buf.is_empty() {
                start = ln + 1;
            }
            let t = l.trim_end();
            if let Some(cont) = t.strip_suffix('\\') {
                buf.push_str(cont);
                buf.push(' ');
                continue;
            }
            buf.push_str(t);
            let line = std::mem::take(&mut buf);
            if let Some(s) = parse_stmt(&line).map_err(|e| Error::Parse(format!("line {}: {}", start, e)))? {
                stmts.push((start, s));
            }
        }
        if !buf.trim().is_empty() {
            return Err(Error::Parse("script ends inside a continued line".into()));
        }
        Ok(LedgerScript { stmts })
    }
}

/// Kind of a ledger step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StepKind {
    Check,
    Note,
    Term,
    Solve,
    Expect,
    Remark,
}

#[derive(Clone, Debug, Serialize)]
pub struct StepOutcome {
    pub kind: StepKind,
    pub label: String,
    pub passed: bool,
    pub detail: String,
}

/// Everything a ledger run found.
#[derive(Clone, Debug, Serialize)]
pub struct LedgerReport {
    pub steps: Vec<StepOutcome>,
    /// Solved unknowns per equation, as formal exponents.
    pub solutions: BTreeMap<String, BTreeMap<String, String>>,
    /// Wall time; left out of serialized reports so they stay reproducible.
    #[serde(skip)]
    pub seconds: f64,
}

impl LedgerReport {
    /// All steps except notes and remarks passed.
    pub fn passed(&self) -> bool {
        self.steps.iter().all(|s| s.passed || matches!(s.kind, StepKind::Note | StepKind::Remark))
    }

    pub fn solution(&self, eq: &str, sym: &str) -> Option<&str> {
        self.solutions.get(eq)?.get(sym).map(|s| s.as_str())
    }

    pub fn failures(&self) -> Vec<&StepOutcome> {
        self.steps.iter().filter(|s| !s.passed && !matches!(s.kind, StepKind::Note | StepKind::Remark)).collect()
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for s in &self.steps {
            let tag = match (s.kind, s.passed) {
                (StepKind::Remark, _) => "    ",
                (StepKind::Note, true) => "note",
                (StepKind::Note, false) => "NOTE",
                (_, true) => "ok  ",
                (_, false) => "FAIL",
            };
            out.push_str(&format!("[{}] {}: {}\n", tag, s.label, s.detail));
        }
        for (eq, sol) in &self.solutions {
            for (k, v) in sol {
                out.push_str(&format!("solution {}: {} = {}\n", eq, k, v));
            }
        }
        out.push_str(&format!("verdict: {}\n", if self.passed() { "pass" } else { "fail" }));
        out
    }
}

struct Run<'a> {
    words: HashMap<String, Expr>,
    groups: HashMap<String, (GroupDecl, SubgroupAbelianization)>,
    equations: HashMap<String, (String, FormalWord)>,
    solutions: BTreeMap<String, BTreeMap<Symbol, FormalExponent>>,
    steps: &'a mut Vec<StepOutcome>,
}

fn invert(mut v: FormalWord) -> FormalWord {
    v.reverse();
    for (_, e) in v.iter_mut() {
        *e = e.neg();
    }
    v
}

fn rho(k: i64) -> FormalExponent {
    FormalExponent::symbol(Symbol::Rho, k)
}

impl Run<'_> {
    fn push(&mut self, kind: StepKind, label: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.steps.push(StepOutcome { kind, label: label.into(), passed, detail: detail.into() });
    }

    fn word(&self, e: &Expr, n: usize, depth: usize) -> Result<Word, Error> {
        if depth > 64 {
            return Err(Error::Invalid("word definitions nest too deeply".into()));
        }
        Ok(match e {
            Expr::Name(s) => match self.words.get(s) {
                Some(d) => self.word(d, n, depth + 1)?,
                None => named_word(n, s)?,
            },
            Expr::Prod(v) => {
                let mut w = Word::empty();
                for f in v {
                    w = w.mul(&self.word(f, n, depth + 1)?);
                }
                w
            }
            Expr::Pow(b, k) => self.word(b, n, depth + 1)?.pow(*k),
            Expr::Comm(a, b) => Word::commutator(&self.word(a, n, depth + 1)?, &self.word(b, n, depth + 1)?),
        })
    }

    fn group(&self, name: &str) -> Result<&(GroupDecl, SubgroupAbelianization), Error> {
        self.groups.get(name).ok_or_else(|| Error::Invalid(format!("unknown group {}", name)))
    }

    fn show(&self, n: usize, w: &Word) -> String {
        match pure_braid_class(n, w) {
            Ok(v) => render_xij(n, &v),
            Err(_) => render_tau(n, w),
        }
    }

    fn build_group(&mut self, name: &str, g: GroupDecl) -> Result<(), Error> {
        let base = match g.kind {
            GroupKind::Braid => Presentation::braid(g.n),
            GroupKind::Sphere => Presentation::sphere_mapping_class(g.n),
            GroupKind::HSphere => Presentation::sphere_braid(g.n),
        };
        let q: Vec<Word> = g.quotient.iter().map(|e| self.word(e, g.n, 0)).collect::<Result<_, _>>()?;
        let k: Vec<Word> = g.imposed.iter().map(|e| self.word(e, g.n, 0)).collect::<Result<_, _>>()?;
        let pres = base.with_relators(q);
        let sab = subgroup_abelianization_with(&pres, &strand_permutations(g.n), Subgroup::Kernel, &k)?;
        sab.check_relators()?;
        let detail = format!(
            "index {}, module Z^{} + torsion {:?}, relators rewritten to zero",
            sab.index(),
            sab.free_rank(),
            sab.torsion()
        );
        self.push(StepKind::Check, format!("group {}", name), true, detail);
        self.groups.insert(name.to_string(), (g, sab));
        Ok(())
    }

    /// Resolves `f(u, v)` into powers; `Err` carries the failed hypothesis.
    fn resolve_f(
        &self,
        g: &GroupDecl,
        sab: &SubgroupAbelianization,
        u: &Word,
        v: &Word,
        rule: &Rule,
        notes: &mut Vec<String>,
    ) -> Result<FormalWord, String> {
        let n = g.n;
        let fmt_uv = |u: &Word, v: &Word| format!("f({}, {})", render_tau(n, u), render_tau(n, v));
        match rule {
            Rule::BlanchfieldLyndon => {
                let c = Word::commutator(u, v);
                if !sab.contains(&c) {
                    return Err(format!("{}: [u,v] is not in the subgroup", fmt_uv(u, v)));
                }
                let au = conjugation_action(sab, u, &c).map_err(|e| e.to_string())?;
                let av = conjugation_action(sab, v, &c).map_err(|e| e.to_string())?;
                let ok = matches!(
                    (&au, &av),
                    (ActionKind::Inverts, ActionKind::Fixes) | (ActionKind::Fixes, ActionKind::Inverts)
                );
                if !ok {
                    return Err(format!(
                        "{}: Blanchfield-Lyndon hypothesis fails (u: {:?}, v: {:?})",
                        fmt_uv(u, v),
                        au,
                        av
                    ));
                }
                notes.push(format!(
                    "{} -> [u,v]^(-rho), [u,v] = {}, u {}, v {}",
                    fmt_uv(u, v),
                    self.show(n, &c),
                    if au == ActionKind::Inverts { "inverts" } else { "fixes" },
                    if av == ActionKind::Inverts { "inverts" } else { "fixes" }
                ));
                Ok(vec![(c, rho(-1))])
            }
            Rule::Vanish => {
                let c = Word::commutator(u, v);
                let zero = sab.contains(&c) && sab.class_of(&c).map(|k| k.is_zero()).unwrap_or(false);
                if !zero {
                    return Err(format!("{}: [u,v] does not have class zero", fmt_uv(u, v)));
                }
                notes.push(format!("{} vanishes, [u,v] has class zero", fmt_uv(u, v)));
                Ok(Vec::new())
            }
            Rule::Swap(inner) => {
                notes.push(format!("{} = f(v,u)^-1", fmt_uv(u, v)));
                Ok(invert(self.resolve_f(g, sab, v, u, inner, notes)?))
            }
            Rule::Expand(inner) => {
                let (a, b) = (u, v);
                let aba = a.mul(b).mul(a);
                let host = Word::commutator(b, &aba);
                let mut why = None;
                if artin_identity_check(n, &host).map_err(|e| e.to_string())? {
                    why = Some(format!("holds in B{}", n));
                } else {
                    for (k, ke) in sab.subgroup_relators.iter().zip(&g.imposed) {
                        let hits = [host.mul(k), host.mul(&k.inverse())]
                            .iter()
                            .any(|w| artin_identity_check(n, w).unwrap_or(false));
                        if hits {
                            why = Some(format!("is the imposed relator {} up to inversion", ke));
                        }
                    }
                }
                let Some(why) = why else {
                    return Err(format!("{}: [B, ABA] is neither trivial nor imposed", fmt_uv(u, v)));
                };
                notes.push(format!("{} expanded, [B, ABA] {}", fmt_uv(u, v), why));
                let mut out = vec![(b.clone(), rho(2))];
                out.extend(self.resolve_f(g, sab, &a.mul(a), b, inner, notes)?);
                out.push((a.clone(), rho(2)));
                out.push((a.mul(b), rho(-2)));
                Ok(out)
            }
        }
    }

    fn equation(&mut self, name: &str, group: &str, lhs: &[TermAst], rhs: &[TermAst]) -> Result<(), Error> {
        let (g, sab) = self.group(group)?;
        let (g, n) = (g.clone(), g.n);
        let mut sides: Vec<FormalWord> = Vec::new();
        let mut notes = Vec::new();
        let mut failure = None;
        for side in [lhs, rhs] {
            let mut out = FormalWord::new();
            for (i, t) in side.iter().enumerate() {
                match t {
                    TermAst::Power(e, x) => out.push((self.word(e, n, 0)?, x.clone())),
                    TermAst::F { u, v, inverted, rule } => {
                        let (uw, vw) = (self.word(u, n, 0)?, self.word(v, n, 0)?);
                        match self.resolve_f(&g, sab, &uw, &vw, rule, &mut notes) {
                            Ok(r) => out.extend(if *inverted { invert(r) } else { r }),
                            Err(msg) => {
                                failure.get_or_insert(format!("term {}: {}", i + 1, msg));
                            }
                        }
                    }
                }
            }
            sides.push(out);
        }
        for note in notes {
            self.push(StepKind::Term, format!("equation {}", name), true, note);
        }
        if let Some(f) = failure {
            self.push(StepKind::Term, format!("equation {}", name), false, f);
            return Ok(());
        }
        let rhs = sides.pop().unwrap();
        let mut all = sides.pop().unwrap();
        all.extend(invert(rhs));
        self.equations.insert(name.to_string(), (group.to_string(), all));
        Ok(())
    }

    fn solve(&mut self, eq: &str, unknowns: &[Symbol], given: &[(Symbol, String)], kind: StepKind) -> Result<(), Error> {
        let label = format!("solve {}", eq);
        let Some((group, terms)) = self.equations.get(eq).cloned() else {
            self.push(kind, label, false, "equation unavailable");
            return Ok(());
        };
        let mut terms = terms;
        for (s, src) in given {
            let Some(v) = self.solutions.get(src).and_then(|m| m.get(s)).cloned() else {
                self.push(kind, label, false, format!("{} from {} is not solved", s.name(), src));
                return Ok(());
            };
            for (_, e) in terms.iter_mut() {
                *e = e.substitute(*s, &v);
            }
        }
        let sab = &self.group(&group)?.1;
        let res = solve_formal(sab, &terms, unknowns);
        let (passed, detail, sol) = match res {
            Err(e) => (false, e.to_string(), None),
            Ok(FormalSolution::None) => (false, "no solution".to_string(), None),
            Ok(FormalSolution::Multiple) => (false, "multiple solutions".to_string(), None),
            Ok(FormalSolution::NonIntegral(s)) => (false, format!("non-integral solution {}", s), None),
            Ok(FormalSolution::Unique(m)) => {
                let txt = if m.is_empty() {
                    let mut syms: BTreeSet<&str> = terms.iter().flat_map(|(_, e)| e.symbols()).map(|s| s.name()).collect();
                    syms.insert("rho");
                    format!("identity holds for all {}", syms.into_iter().collect::<Vec<_>>().join(", "))
                } else {
                    m.iter().map(|(k, v)| format!("{} = {}", k.name(), v)).collect::<Vec<_>>().join(", ")
                };
                (true, txt, Some(m))
            }
        };
        let extra = match &sol {
            Some(m) => Some((formal_class_zero(sab, &terms, m, &zero_assignment(&terms))?, residue_survey(sab, &terms, m)?, sab.exponent)),
            None => None,
        };
        self.push(kind, label.clone(), passed, detail);
        if let (Some(m), Some((zero, (inside, z), exponent))) = (sol, extra) {
            self.push(kind, format!("{} at rho = 0", label), zero, "reduces to 0 = 0");
            self.push(
                StepKind::Note,
                format!("{} residues", label),
                inside == z,
                format!(
                    "rho mod {}: word in the subgroup for {} nonzero residues, class zero for {}",
                    exponent, inside, z
                ),
            );
            self.solutions.insert(eq.to_string(), m);
        }
        Ok(())
    }

    fn check(&mut self, label: &str, spec: &CheckSpec, informational: bool) -> Result<(), Error> {
        let kind = if informational { StepKind::Note } else { StepKind::Check };
        let (passed, detail) = match spec {
            CheckSpec::Trivial(n, e) => {
                let w = self.word(e, *n, 0)?;
                let ok = artin_identity_check(*n, &w)?;
                (ok, format!("Artin action of the word in B{} is {}the identity", n, if ok { "" } else { "not " }))
            }
            CheckSpec::Central(n, e) => {
                let ok = is_central(*n, &self.word(e, *n, 0)?)?;
                (ok, format!("{}commutes with every generator of B{}", if ok { "" } else { "does not " }, n))
            }
            CheckSpec::Inner(n, e) => {
                let ok = outer_action_trivial(*n, &self.word(e, *n, 0)?)?;
                (ok, format!("acts {}by an inner automorphism of the {}-punctured sphere group", if ok { "" } else { "not " }, n))
            }
            CheckSpec::Zero(g, e) => {
                let (d, sab) = self.group(g)?;
                let w = self.word(e, d.n, 0)?;
                match sab.class_of(&w) {
                    Ok(c) => (c.is_zero(), format!("class of {} is {}zero", self.show(d.n, &w), if c.is_zero() { "" } else { "non" })),
                    Err(err) => (false, err.to_string()),
                }
            }
            CheckSpec::Equal { group, a, b, mod_torsion } => {
                let (d, sab) = self.group(group)?;
                let (wa, wb) = (self.word(a, d.n, 0)?, self.word(b, d.n, 0)?);
                match sab.class_of(&wa.mul(&wb.inverse())) {
                    Ok(c) => {
                        let ok = if *mod_torsion { c.is_torsion() } else { c.is_zero() };
                        let extra = if !c.is_zero() && c.is_torsion() {
                            format!(" (difference has order {})", sab.order(&c).unwrap_or(0))
                        } else {
                            String::new()
                        };
                        (
                            ok,
                            format!(
                                "{} {} {}{}{}",
                                self.show(d.n, &wa),
                                if ok { "matches" } else { "differs from" },
                                self.show(d.n, &wb),
                                if *mod_torsion { " modulo torsion" } else { "" },
                                extra
                            ),
                        )
                    }
                    Err(err) => (false, err.to_string()),
                }
            }
            CheckSpec::Action { group, u, c, expect } => {
                let (d, sab) = self.group(group)?;
                let (wu, wc) = (self.word(u, d.n, 0)?, self.word(c, d.n, 0)?);
                match conjugation_action(sab, &wu, &wc) {
                    Ok(a) => (a == *expect, format!("action is {:?}, expected {:?}", a, expect)),
                    Err(err) => (false, err.to_string()),
                }
            }
            CheckSpec::Module { group, free, torsion } => {
                let sab = &self.group(group)?.1;
                let ok = sab.free_rank() == *free && sab.torsion() == *torsion;
                (ok, format!("module Z^{} + torsion {:?}", sab.free_rank(), sab.torsion()))
            }
        };
        self.push(kind, label, passed, detail);
        Ok(())
    }
}

/// Runs a ledger script. Parse and setup problems are errors; failed checks
/// are failing steps of the report.
pub fn verify_ledger_script(script: &LedgerScript) -> Result<LedgerReport, Error> {
    let start = Instant::now();
    let mut steps = Vec::new();
    let mut run = Run {
        words: HashMap::new(),
        groups: HashMap::new(),
        equations: HashMap::new(),
        solutions: BTreeMap::new(),
        steps: &mut steps,
    };
    for (line, st) in &script.stmts {
        let at = |e: Error| Error::Invalid(format!("line {}: {}", line, e));
        match st {
            Stmt::Group(name, g) => run.build_group(name, g.clone()).map_err(at)?,
            Stmt::Word(name, e) => {
                run.words.insert(name.clone(), e.clone());
            }
            Stmt::Equation { name, group, lhs, rhs } => run.equation(name, group, lhs, rhs).map_err(at)?,
            Stmt::Solve { eq, unknowns, given, informational } => {
                let kind = if *informational { StepKind::Note } else { StepKind::Solve };
                run.solve(eq, unknowns, given, kind).map_err(at)?
            }
            Stmt::Expect { eq, sym, value } => {
                let got = run.solutions.get(eq).and_then(|m| m.get(sym)).cloned();
                let (ok, detail) = match got {
                    Some(v) => (v == *value, format!("{} = {}, expected {}", sym.name(), v, value)),
                    None => (false, format!("{} was not solved", sym.name())),
                };
                run.push(StepKind::Expect, format!("expect {}", eq), ok, detail);
            }
            Stmt::Check { label, spec, informational } => run.check(label, spec, *informational).map_err(at)?,
            Stmt::Remark(t) => run.push(StepKind::Remark, "remark", true, t.clone()),
        }
    }
    let solutions = run
        .solutions
        .iter()
        .map(|(k, m)| (k.clone(), m.iter().map(|(s, v)| (s.name().to_string(), v.to_string())).collect()))
        .collect();
    Ok(LedgerReport { steps, solutions, seconds: start.elapsed().as_secs_f64() })
}

/// Runs the built-in ledger.
pub fn verify_gt_ledger() -> Result<LedgerReport, Error> {
    verify_ledger_script(&LedgerScript::parse(S2_LEDGER)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_errors_are_reported_with_lines() {
        let e = LedgerScript::parse("word A = t1\nbogus line\n").unwrap_err();
        assert!(e.to_string().contains("line 2"), "{}", e);
        assert!(LedgerScript::parse("equation E in G: f[expand](t1, t2) = 1").is_err());
        assert!(LedgerScript::parse("check x: trivial t1 in 4").is_err());
    }

    #[test]
    fn small_script() {
        let s = LedgerScript::parse(
            "group G = braid 3\n\
             check braid: trivial t1 t2 t1 (t2 t1 t2)^-1 in B3\n\
             check not: trivial t1 t2 in B3\n\
             equation E in G: x12^{dl} = x12^{2rho}\n\
             solve E for dl\n\
             expect E dl = 2rho\n",
        )
        .unwrap();
        let r = verify_ledger_script(&s).unwrap();
        assert_eq!(r.solution("E", "dl"), Some("2rho"));
        assert_eq!(r.failures().len(), 1);
        assert_eq!(r.failures()[0].label, "not");
    }

    #[test]
    fn no_solution_and_multiple_solutions() {
        let s = LedgerScript::parse(
            "group G = braid 3\n\
             equation A in G: x12^{dl} x13^{rho} = 1\n\
             solve A for dl\n\
             equation B in G: x12^{dl} x12^{a} = 1\n\
             solve B for dl, a\n",
        )
        .unwrap();
        let r = verify_ledger_script(&s).unwrap();
        let details: Vec<&str> = r.failures().iter().map(|f| f.detail.as_str()).collect();
        assert_eq!(details, vec!["no solution", "multiple solutions"]);
    }

    #[test]
    fn builtin_ledger() {
        let r = verify_gt_ledger().unwrap();
        println!("{}", r.render_text());
        assert_eq!(r.solution("sphere4", "dl"), Some("-rho"));
        assert_eq!(r.solution("braid4", "dl"), Some("-2rho"));
        assert_eq!(r.solution("braid4", "a"), Some("rho"));
        assert_eq!(r.solution("sphere6", "e"), Some("2rho"));
        assert!(r.passed(), "{:?}", r.failures());
    }
}
