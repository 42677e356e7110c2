//! Selection sessions: after a catalog row is chosen, ask the designer what
//! the row and its rules leave open, then generate specification fields.

use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};

use super::menus::{BuiltinSet, MenuSet, Next};
use super::parse::{Fragment, InputKind, RuleProgram, NUMERIC_KEYS};
use super::units::{Quantity, UnitTable};
use super::RuleError;
use crate::catalog::{CatalogSet, CellValue};
use crate::quantity::leading_number;

/// Unit assumed for numeric keys whose fragments carry none.
pub const DEFAULT_LENGTH_UNIT: &str = "мм";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Answer {
    Index(u64),
    Number(f64),
    Text(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MenuSource {
    /// Variants listed in a catalog cell.
    Direct,
    /// A named menu from the menu file.
    External,
    Builtin,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "prompt", rename_all = "snake_case")]
pub enum Prompt {
    Menu { source: MenuSource, title: String, options: Vec<String> },
    Input { kind: InputKind, text: String, unit: Option<String> },
    Done,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    AwaitingAnswer,
    Done,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Pending {
    Direct {
        column: usize,
    },
    Ask {
        fragment: Fragment,
    },
    /// A child menu of a builtin tree; the root fragment gets the leaf value.
    BuiltinNode {
        root: Fragment,
        node: String,
    },
}

/// Text for every rule target; numeric special keys also in core units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratedFields {
    pub fields: BTreeMap<String, String>,
    pub numeric: BTreeMap<String, Quantity>,
}

/// A self-contained selection state machine. Everything it needs from the
/// catalog is copied in at start.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionSession {
    table: String,
    row_index: usize,
    columns: Vec<String>,
    names: Vec<String>,
    units: Vec<String>,
    row: Vec<CellValue>,
    program: RuleProgram,
    menus: MenuSet,
    builtins: BuiltinSet,
    unit_table: UnitTable,
    queue: VecDeque<Pending>,
    direct: BTreeMap<usize, String>,
    resolved: Vec<(Fragment, String)>,
    log: Vec<Answer>,
}

pub fn start_session(set: &CatalogSet, table: &str, row: usize) -> Result<SelectionSession, RuleError> {
    let data = set.table(table).map_err(|_| RuleError::UnknownTable(table.to_string()))?;
    if row >= data.rows.len() {
        return Err(RuleError::BadRow { table: table.to_string(), row, len: data.rows.len() });
    }
    let structure = set.structure_of(table).map_err(|_| RuleError::UnknownTable(table.to_string()))?;
    let program = set.rules(table).map_err(|_| RuleError::UnknownTable(table.to_string()))?.clone();
    let refs = program.references();
    let menus = set.menus().subset(refs.menus.iter().copied());
    let builtins = set.builtins().subset(refs.builtins.iter().copied());
    let cells = data.rows[row].clone();

    let mut queue: VecDeque<Pending> =
        cells.iter().enumerate().filter(|(_, c)| c.is_menu()).map(|(i, _)| Pending::Direct { column: i }).collect();
    let mut asked: Vec<&Fragment> = Vec::new();
    for f in program.walk() {
        if f.is_prompt() && !asked.contains(&f) {
            asked.push(f);
        }
    }
    queue.extend(asked.into_iter().map(|f| Pending::Ask { fragment: f.clone() }));

    Ok(SelectionSession {
        table: table.to_string(),
        row_index: row,
        columns: data.columns.clone(),
        names: structure.columns.iter().map(|c| c.name.clone()).collect(),
        units: structure.columns.iter().map(|c| c.units.clone()).collect(),
        row: cells,
        program,
        menus,
        builtins,
        unit_table: set.units().clone(),
        queue,
        direct: BTreeMap::new(),
        resolved: Vec::new(),
        log: Vec::new(),
    })
}

fn number_text(a: &Answer) -> Option<String> {
    match a {
        Answer::Index(n) => Some(n.to_string()),
        Answer::Number(x) if x.is_finite() => Some(x.to_string()),
        Answer::Text(s) => matches!(leading_number(s), Some((_, rest)) if rest.trim().is_empty()).then(|| s.trim().to_string()),
        Answer::Number(_) => None,
    }
}

fn choose(options: &[String], a: &Answer) -> Result<usize, RuleError> {
    match a {
        Answer::Index(i) if (*i as usize) < options.len() => Ok(*i as usize),
        Answer::Text(s) => options
            .iter()
            .position(|o| o == s)
            .ok_or_else(|| RuleError::InvalidOption { answer: s.clone(), options: options.len() }),
        other => Err(RuleError::InvalidOption { answer: answer_text(other), options: options.len() }),
    }
}

fn answer_text(a: &Answer) -> String {
    match a {
        Answer::Index(n) => n.to_string(),
        Answer::Number(x) => x.to_string(),
        Answer::Text(s) => s.clone(),
    }
}

impl SelectionSession {
    pub fn table(&self) -> &str {
        &self.table
    }

    pub fn row_index(&self) -> usize {
        self.row_index
    }

    pub fn status(&self) -> Status {
        if self.queue.is_empty() {
            Status::Done
        } else {
            Status::AwaitingAnswer
        }
    }

    pub fn is_done(&self) -> bool {
        self.queue.is_empty()
    }

    pub fn answers(&self) -> &[Answer] {
        &self.log
    }

    pub fn next_prompt(&self) -> Prompt {
        match self.queue.front() {
            None => Prompt::Done,
            Some(Pending::Direct { column }) => Prompt::Menu {
                source: MenuSource::Direct,
                title: self.names[*column].clone(),
                options: self.row[*column].texts().into_iter().map(str::to_string).collect(),
            },
            Some(Pending::Ask { fragment }) => match fragment {
                Fragment::Menu { name } => Prompt::Menu {
                    source: MenuSource::External,
                    title: name.clone(),
                    options: self.menus.get(name).expect("checked at load").to_vec(),
                },
                Fragment::Builtin { name } => self.tree_prompt(name),
                Fragment::Input { kind, prompt, unit } => Prompt::Input { kind: *kind, text: prompt.clone(), unit: unit.clone() },
                _ => unreachable!("only prompting fragments are queued"),
            },
            Some(Pending::BuiltinNode { node, .. }) => self.tree_prompt(node),
        }
    }

    fn tree_prompt(&self, node: &str) -> Prompt {
        let n = self.builtins.node(node).expect("checked at load");
        Prompt::Menu {
            source: MenuSource::Builtin,
            title: n.prompt.clone(),
            options: n.options.iter().map(|o| o.label.clone()).collect(),
        }
    }

    pub fn answer(&mut self, a: Answer) -> Result<Status, RuleError> {
        let Some(front) = self.queue.front().cloned() else {
            return Err(RuleError::SessionDone);
        };
        match front {
            Pending::Direct { column } => {
                let opts: Vec<String> = self.row[column].texts().into_iter().map(str::to_string).collect();
                let i = choose(&opts, &a)?;
                self.queue.pop_front();
                self.direct.insert(column, opts[i].clone());
            }
            Pending::Ask { fragment } => match &fragment {
                Fragment::Menu { name } => {
                    let opts = self.menus.get(name).expect("checked at load");
                    let v = opts[choose(opts, &a)?].clone();
                    self.queue.pop_front();
                    self.resolved.push((fragment, v));
                }
                Fragment::Builtin { name } => {
                    let name = name.clone();
                    self.tree_step(fragment, &name, &a)?;
                }
                Fragment::Input { kind, .. } => {
                    let v = match kind {
                        InputKind::Number => number_text(&a).ok_or_else(|| RuleError::NotANumber(answer_text(&a)))?,
                        InputKind::String => answer_text(&a),
                    };
                    self.queue.pop_front();
                    self.resolved.push((fragment, v));
                }
                _ => unreachable!("only prompting fragments are queued"),
            },
            Pending::BuiltinNode { root, node } => self.tree_step(root, &node, &a)?,
        }
        self.log.push(a);
        Ok(self.status())
    }

    fn tree_step(&mut self, root: Fragment, node: &str, a: &Answer) -> Result<(), RuleError> {
        let n = self.builtins.node(node).expect("checked at load");
        let labels: Vec<String> = n.options.iter().map(|o| o.label.clone()).collect();
        let next = n.options[choose(&labels, a)?].next.clone();
        self.queue.pop_front();
        match next {
            Next::Child(c) => self.queue.push_front(Pending::BuiltinNode { root, node: c }),
            Next::Value(v) => self.resolved.push((root, v)),
        }
        Ok(())
    }

    fn resolved(&self, f: &Fragment) -> &str {
        self.resolved.iter().find(|(k, _)| k == f).map(|(_, v)| v.as_str()).expect("session is done")
    }

    fn realize(
        &self,
        f: &Fragment,
        vars: &mut BTreeMap<String, (String, Option<String>)>,
    ) -> Result<(String, Option<String>), RuleError> {
        let unit_of = |u: &str| (!u.is_empty()).then(|| u.to_string());
        Ok(match f {
            Fragment::Const { text } => (text.clone(), None),
            Fragment::Col { column } => {
                let i = self.columns.iter().position(|c| c == column).expect("checked at load");
                let text = match &self.row[i] {
                    CellValue::Scalar(s) => s.clone(),
                    CellValue::Variants(_) => self.direct[&i].clone(),
                };
                (text, unit_of(&self.units[i]))
            }
            Fragment::Menu { .. } | Fragment::Builtin { .. } => (self.resolved(f).to_string(), None),
            Fragment::Input { unit, .. } => (self.resolved(f).to_string(), unit.clone()),
            Fragment::SetVar { name, inner } => {
                let r = self.realize(inner, vars)?;
                vars.insert(name.clone(), r.clone());
                r
            }
            Fragment::Var { name } => vars.get(name).cloned().ok_or_else(|| RuleError::UnboundVar(name.clone()))?,
        })
    }

    pub fn finish(&self) -> Result<GeneratedFields, RuleError> {
        if !self.is_done() {
            return Err(RuleError::NotDone);
        }
        let mut vars = BTreeMap::new();
        let mut fields = BTreeMap::new();
        let mut numeric = BTreeMap::new();
        for (target, fragments) in self.program.generated() {
            let mut text = String::new();
            let mut unit = None;
            for f in fragments {
                let (t, u) = self.realize(f, &mut vars)?;
                text.push_str(&t);
                unit = unit.or(u);
            }
            if NUMERIC_KEYS.contains(&target) {
                let (value, _) =
                    leading_number(&text).ok_or_else(|| RuleError::NumericKey { key: target.to_string(), text: text.clone() })?;
                let unit = unit.unwrap_or_else(|| DEFAULT_LENGTH_UNIT.to_string());
                let q = if self.unit_table.knows(&unit) {
                    self.unit_table.convert(value, &unit)?
                } else {
                    Quantity { value: value.to_f64(), unit }
                };
                numeric.insert(target.to_string(), q);
            }
            fields.insert(target.to_string(), text);
        }
        Ok(GeneratedFields { fields, numeric })
    }

    /// Starts afresh and feeds `answers` in order.
    pub fn replay(set: &CatalogSet, table: &str, row: usize, answers: &[Answer]) -> Result<SelectionSession, RuleError> {
        let mut s = start_session(set, table, row)?;
        for a in answers {
            s.answer(a.clone())?;
        }
        Ok(s)
    }
}

/// Supplies answers to a session: an interactive terminal, an HTTP client
/// or a script.
pub trait PromptProvider {
    fn provide(&mut self, prompt: &Prompt) -> Option<Answer>;
}

/// Answers from a fixed list, in order.
pub struct ScriptedAnswers(pub VecDeque<Answer>);

impl PromptProvider for ScriptedAnswers {
    fn provide(&mut self, _: &Prompt) -> Option<Answer> {
        self.0.pop_front()
    }
}

/// Drives a session until done or the provider runs dry.
pub fn run_session(session: &mut SelectionSession, provider: &mut dyn PromptProvider) -> Result<GeneratedFields, RuleError> {
    while !session.is_done() {
        let p = session.next_prompt();
        let a = provider.provide(&p).ok_or(RuleError::NotDone)?;
        session.answer(a)?;
    }
    session.finish()
}
