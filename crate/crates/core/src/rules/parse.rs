//! Line-based rule programs: `target = fragment fragment ...`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::RuleError;
use crate::po::SpecField;

/// Targets whose text is also reported as a number in core units.
pub const NUMERIC_KEYS: [&str; 2] = ["pipe_outer_diameter", "length"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputKind {
    Number,
    String,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "fragment", rename_all = "snake_case")]
pub enum Fragment {
    Const { text: String },
    Col { column: String },
    Menu { name: String },
    Builtin { name: String },
    Input { kind: InputKind, prompt: String, unit: Option<String> },
    SetVar { name: String, inner: Box<Fragment> },
    Var { name: String },
}

impl Fragment {
    /// Whether realizing this fragment asks the designer something.
    pub fn is_prompt(&self) -> bool {
        matches!(self, Fragment::Menu { .. } | Fragment::Builtin { .. } | Fragment::Input { .. })
    }
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

impl fmt::Display for Fragment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Fragment::Const { text } => write!(f, "const({})", quote(text)),
            Fragment::Col { column } => write!(f, "col({column})"),
            Fragment::Menu { name } => write!(f, "menu({name})"),
            Fragment::Builtin { name } => write!(f, "builtin({name})"),
            Fragment::Input { kind, prompt, unit } => {
                let k = match kind {
                    InputKind::Number => "number",
                    InputKind::String => "string",
                };
                match unit {
                    Some(u) => write!(f, "input({k},{},{})", quote(prompt), quote(u)),
                    None => write!(f, "input({k},{})", quote(prompt)),
                }
            }
            Fragment::SetVar { name, inner } => write!(f, "setvar({name},{inner})"),
            Fragment::Var { name } => write!(f, "var({name})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum Rule {
    Fragments { fragments: Vec<Fragment> },
    Skip,
}

/// The rules of one data table, in file order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleProgram {
    pub targets: Vec<(String, Rule)>,
    /// `* = skip`: spec fields without a rule are left out.
    pub skip_rest: bool,
}

/// What a program refers to outside itself.
#[derive(Debug, Default)]
pub struct References<'a> {
    pub columns: BTreeSet<&'a str>,
    pub menus: BTreeSet<&'a str>,
    pub builtins: BTreeSet<&'a str>,
}

impl RuleProgram {
    pub fn rule(&self, target: &str) -> Option<&Rule> {
        self.targets.iter().find(|(t, _)| t == target).map(|(_, r)| r)
    }

    /// Targets that produce text, in file order.
    pub fn generated(&self) -> impl Iterator<Item = (&str, &[Fragment])> {
        self.targets.iter().filter_map(|(t, r)| match r {
            Rule::Fragments { fragments } => Some((t.as_str(), fragments.as_slice())),
            Rule::Skip => None,
        })
    }

    /// Every fragment, including ones nested in `setvar`, in program order.
    pub fn walk(&self) -> Vec<&Fragment> {
        fn go<'a>(f: &'a Fragment, out: &mut Vec<&'a Fragment>) {
            out.push(f);
            if let Fragment::SetVar { inner, .. } = f {
                go(inner, out);
            }
        }
        let mut out = Vec::new();
        for (_, fs) in self.generated() {
            for f in fs {
                go(f, &mut out);
            }
        }
        out
    }

    pub fn references(&self) -> References<'_> {
        let mut r = References::default();
        for f in self.walk() {
            match f {
                Fragment::Col { column } => {
                    r.columns.insert(column);
                }
                Fragment::Menu { name } => {
                    r.menus.insert(name);
                }
                Fragment::Builtin { name } => {
                    r.builtins.insert(name);
                }
                _ => {}
            }
        }
        r
    }

    /// Checks that variables are set before use and that every spec field
    /// has a rule or a skip.
    pub fn check_self(&self) -> Result<(), RuleError> {
        let mut set = BTreeSet::new();
        for f in self.walk() {
            match f {
                Fragment::SetVar { name, .. } => {
                    set.insert(name.as_str());
                }
                Fragment::Var { name } if !set.contains(name.as_str()) => return Err(RuleError::UnboundVar(name.clone())),
                _ => {}
            }
        }
        if !self.skip_rest {
            if let Some(f) = SpecField::ALL.iter().find(|f| self.rule(f.id()).is_none()) {
                return Err(RuleError::MissingTarget(f.id().to_string()));
            }
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (t, r) in &self.targets {
            match r {
                Rule::Skip => out.push_str(&format!("{t} = skip\n")),
                Rule::Fragments { fragments } => {
                    let fs: Vec<String> = fragments.iter().map(|f| f.to_string()).collect();
                    out.push_str(&format!("{t} = {}\n", fs.join(" ")));
                }
            }
        }
        if self.skip_rest {
            out.push_str("* = skip\n");
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Str(String),
    Open,
    Close,
    Comma,
}

fn is_ident(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '-' || c == '.'
}

fn lex(text: &str, line: usize) -> Result<Vec<Tok>, RuleError> {
    let err = |m: &str| RuleError::Syntax { line, message: m.to_string() };
    let mut out = Vec::new();
    let mut cs = text.chars().peekable();
    while let Some(&c) = cs.peek() {
        match c {
            c if c.is_whitespace() => {
                cs.next();
            }
            '(' | ')' | ',' => {
                cs.next();
                out.push(match c {
                    '(' => Tok::Open,
                    ')' => Tok::Close,
                    _ => Tok::Comma,
                });
            }
            '"' => {
                cs.next();
                let mut s = String::new();
                loop {
                    match cs.next() {
                        None => return Err(err("unterminated string")),
                        Some('"') => break,
                        Some('\\') => match cs.next() {
                            Some(e @ ('"' | '\\')) => s.push(e),
                            Some('n') => s.push('\n'),
                            _ => return Err(err("bad escape in string")),
                        },
                        Some(ch) => s.push(ch),
                    }
                }
                out.push(Tok::Str(s));
            }
            c if is_ident(c) => {
                let mut s = String::new();
                while let Some(&ch) = cs.peek().filter(|ch| is_ident(**ch)) {
                    s.push(ch);
                    cs.next();
                }
                out.push(Tok::Ident(s));
            }
            other => return Err(err(&format!("unexpected character {other:?}"))),
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Tok>,
    at: usize,
    line: usize,
}

impl Parser {
    fn err(&self, m: impl Into<String>) -> RuleError {
        RuleError::Syntax { line: self.line, message: m.into() }
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.at).cloned();
        self.at += 1;
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), RuleError> {
        match self.next() {
            Some(t) if t == want => Ok(()),
            _ => Err(self.err(format!("expected {what}"))),
        }
    }

    fn ident(&mut self) -> Result<String, RuleError> {
        match self.next() {
            Some(Tok::Ident(s)) => Ok(s),
            _ => Err(self.err("expected a name")),
        }
    }

    fn string(&mut self) -> Result<String, RuleError> {
        match self.next() {
            Some(Tok::Str(s)) => Ok(s),
            _ => Err(self.err("expected a quoted string")),
        }
    }

    fn fragment(&mut self) -> Result<Fragment, RuleError> {
        let head = self.ident()?;
        self.expect(Tok::Open, "'('")?;
        let f = match head.as_str() {
            "const" => Fragment::Const { text: self.string()? },
            "col" => Fragment::Col { column: self.ident()? },
            "menu" => Fragment::Menu { name: self.ident()? },
            "builtin" => Fragment::Builtin { name: self.ident()? },
            "var" => Fragment::Var { name: self.ident()? },
            "input" => {
                let kind = match self.ident()?.as_str() {
                    "number" => InputKind::Number,
                    "string" => InputKind::String,
                    other => return Err(self.err(format!("input kind must be number or string, got {other:?}"))),
                };
                self.expect(Tok::Comma, "','")?;
                let prompt = self.string()?;
                let unit = if self.toks.get(self.at) == Some(&Tok::Comma) {
                    self.at += 1;
                    Some(self.string()?)
                } else {
                    None
                };
                Fragment::Input { kind, prompt, unit }
            }
            "setvar" => {
                let name = self.ident()?;
                self.expect(Tok::Comma, "','")?;
                let inner = self.fragment()?;
                if matches!(inner, Fragment::SetVar { .. }) {
                    return Err(self.err("setvar cannot wrap another setvar"));
                }
                Fragment::SetVar { name, inner: Box::new(inner) }
            }
            other => return Err(self.err(format!("unknown fragment {other:?}"))),
        };
        self.expect(Tok::Close, "')'")?;
        Ok(f)
    }
}

fn strip_comment(line: &str) -> &str {
    let mut in_str = false;
    let mut escaped = false;
    for (i, c) in line.char_indices() {
        match c {
            _ if escaped => escaped = false,
            '\\' if in_str => escaped = true,
            '"' => in_str = !in_str,
            '#' if !in_str => return &line[..i],
            _ => {}
        }
    }
    line
}

pub fn parse_rules(text: &str) -> Result<RuleProgram, RuleError> {
    let mut prog = RuleProgram::default();
    let mut seen = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = strip_comment(raw).trim();
        if body.is_empty() {
            continue;
        }
        let Some((target, rhs)) = body.split_once('=') else {
            return Err(RuleError::Syntax { line, message: "expected `target = fragments`".into() });
        };
        let target = target.trim();
        if target.is_empty() || !(target == "*" || target.chars().all(is_ident)) {
            return Err(RuleError::Syntax { line, message: format!("bad target {target:?}") });
        }
        if let Some(prev) = seen.insert(target.to_string(), line) {
            return Err(RuleError::DuplicateTarget { target: target.to_string(), line, first: prev });
        }
        let rhs = rhs.trim();
        if rhs == "skip" {
            if target == "*" {
                prog.skip_rest = true;
            } else {
                prog.targets.push((target.to_string(), Rule::Skip));
            }
            continue;
        }
        if target == "*" {
            return Err(RuleError::Syntax { line, message: "`*` only takes skip".into() });
        }
        let mut p = Parser { toks: lex(rhs, line)?, at: 0, line };
        let mut fragments = Vec::new();
        while p.at < p.toks.len() {
            fragments.push(p.fragment()?);
        }
        if fragments.is_empty() {
            return Err(RuleError::EmptyTarget { target: target.to_string(), line });
        }
        prog.targets.push((target.to_string(), Rule::Fragments { fragments }));
    }
    if prog.targets.is_empty() {
        return Err(RuleError::NoTargets);
    }
    Ok(prog)
}
