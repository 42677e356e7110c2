//! Rule programs that turn a chosen catalog row into specification fields.

mod menus;
mod parse;
mod session;
mod units;

pub use menus::{BuiltinSet, MenuSet, Next, TreeNode, TreeOption};
pub use parse::{parse_rules, Fragment, InputKind, References, Rule, RuleProgram, NUMERIC_KEYS};
pub use session::{
    run_session, start_session, Answer, GeneratedFields, MenuSource, Prompt, PromptProvider, ScriptedAnswers, SelectionSession,
    Status, DEFAULT_LENGTH_UNIT,
};
pub use units::{convert_units, Quantity, UnitTable};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum RuleError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: target {target} has no fragments")]
    EmptyTarget { target: String, line: usize },
    #[error("rule file has no targets")]
    NoTargets,
    #[error("line {line}: target {target} already defined on line {first}")]
    DuplicateTarget { target: String, line: usize, first: usize },
    #[error("variable {0} is used before setvar")]
    UnboundVar(String),
    #[error("no rule for field {0} (add a rule, `{0} = skip` or `* = skip`)")]
    MissingTarget(String),
    #[error("{file}, line {line}: {message}")]
    Menu { file: String, line: usize, message: String },
    #[error("units.csv, line {line}: {message}")]
    Units { line: usize, message: String },
    #[error("unknown unit {0:?}")]
    UnknownUnit(String),
    #[error("unknown table {0:?}")]
    UnknownTable(String),
    #[error("table {table} has {len} rows, no row {row}")]
    BadRow { table: String, row: usize, len: usize },
    #[error("answer {answer:?} is not one of {options} options")]
    InvalidOption { answer: String, options: usize },
    #[error("{0:?} is not a number")]
    NotANumber(String),
    #[error("the session is already done")]
    SessionDone,
    #[error("the session still has open prompts")]
    NotDone,
    #[error("target {key} must start with a number, got {text:?}")]
    NumericKey { key: String, text: String },
}
