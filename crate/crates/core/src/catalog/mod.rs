//! Electronic nomenclature catalogs: data tables, the metatable describing
//! their structures, the registry, per-table rule programs and menus.

mod classify;
mod load;
mod stats;

pub use classify::{
    filter_tables, query_rows, Classification, FilterCriteria, Interval, IntervalKey, Intervals, KipClass, KipQuery, Predicate,
};
pub use load::load_catalog_set;
pub use stats::{catalog_stats, ProfileStats};

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rules::{BuiltinSet, MenuSet, RuleError, RuleProgram, UnitTable};

/// Profile used when the catalog directory has no profiles.csv.
pub const DEFAULT_PROFILE: &str = "default";

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("{0}: not found")]
    Missing(PathBuf),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{file}, line {line}: {message}")]
    Csv { file: String, line: u64, message: String },
    #[error("{file}: header must be {expected:?}, found {found:?}")]
    Header { file: String, expected: String, found: String },
    #[error("catalog directory {0} has no tables")]
    Empty(PathBuf),
    #[error("metatable: column {column} of structure {structure} described twice")]
    DuplicateMeta { structure: String, column: String },
    #[error("metatable: column {column} of structure {structure} has type {value:?}, expected number or text")]
    BadType { structure: String, column: String, value: String },
    #[error("registry: table {0} listed twice")]
    DuplicateTable(String),
    #[error("table {table}: unknown structure {structure:?}")]
    UnknownStructure { table: String, structure: String },
    #[error("table {table}: bad classification: {message}")]
    BadClass { table: String, message: String },
    #[error("table {table}: no data file tables/{table}.csv")]
    MissingTableFile { table: String },
    #[error("tables/{0}.csv is not in the registry")]
    UnregisteredTable(String),
    #[error("table {table}: columns {found:?} differ from structure {structure} {expected:?}")]
    ColumnMismatch { table: String, structure: String, expected: Vec<String>, found: Vec<String> },
    #[error("table {table} has no rows")]
    NoRows { table: String },
    #[error("table {table}, row {row}, column {column}: {value:?} is not a number")]
    NotNumeric { table: String, row: usize, column: String, value: String },
    #[error("table {table}: no rule file rules/{table}.rule")]
    MissingRules { table: String },
    #[error("rules/{table}.rule: {source}")]
    Rules { table: String, source: RuleError },
    #[error("rules/{table}.rule: unknown column {column}")]
    RuleColumn { table: String, column: String },
    #[error("rules/{table}.rule: unknown menu {menu}")]
    RuleMenu { table: String, menu: String },
    #[error("rules/{table}.rule: unknown builtin menu {name}")]
    RuleBuiltin { table: String, name: String },
    #[error("profiles.csv: {0}")]
    Profile(String),
    #[error("{0}")]
    File(RuleError),
    #[error("unknown table {0:?}")]
    UnknownTable(String),
    #[error("table {table}: unknown column {column:?}")]
    UnknownColumn { table: String, column: String },
}

/// A cell: plain text or a direct menu of variants (`a|b` in the file).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CellValue {
    Scalar(String),
    Variants(Vec<String>),
}

impl CellValue {
    pub fn parse(s: &str) -> CellValue {
        if s.contains('|') {
            CellValue::Variants(s.split('|').map(|v| v.trim().to_string()).collect())
        } else {
            CellValue::Scalar(s.trim().to_string())
        }
    }

    pub fn is_menu(&self) -> bool {
        matches!(self, CellValue::Variants(_))
    }

    pub fn texts(&self) -> Vec<&str> {
        match self {
            CellValue::Scalar(s) => vec![s],
            CellValue::Variants(vs) => vs.iter().map(String::as_str).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnType {
    Number,
    Text,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnMeta {
    pub column: String,
    pub name: String,
    pub units: String,
    #[serde(rename = "type")]
    pub kind: ColumnType,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Structure {
    pub name: String,
    pub columns: Vec<ColumnMeta>,
}

impl Structure {
    pub fn column(&self, c: &str) -> Option<&ColumnMeta> {
        self.columns.iter().find(|m| m.column == c)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DataTable {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<CellValue>>,
}

impl DataTable {
    pub fn column_index(&self, c: &str) -> Option<usize> {
        self.columns.iter().position(|x| x == c)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegistryEntry {
    pub table: String,
    pub structure: String,
    pub title: String,
    pub source: String,
    pub profile: String,
    pub classification: Classification,
}

/// A validated catalog directory. Immutable after load.
#[derive(Debug, Clone)]
pub struct CatalogSet {
    pub(crate) structures: BTreeMap<String, Structure>,
    pub(crate) registry: Vec<RegistryEntry>,
    pub(crate) tables: BTreeMap<String, DataTable>,
    pub(crate) rules: BTreeMap<String, RuleProgram>,
    pub(crate) menus: MenuSet,
    pub(crate) builtins: BuiltinSet,
    pub(crate) units: UnitTable,
}

impl CatalogSet {
    pub fn registry(&self) -> &[RegistryEntry] {
        &self.registry
    }

    pub fn entry(&self, table: &str) -> Option<&RegistryEntry> {
        self.registry.iter().find(|e| e.table == table)
    }

    pub fn table(&self, name: &str) -> Result<&DataTable, CatalogError> {
        self.tables.get(name).ok_or_else(|| CatalogError::UnknownTable(name.to_string()))
    }

    /// Structure of a registered table.
    pub fn structure_of(&self, table: &str) -> Result<&Structure, CatalogError> {
        let e = self.entry(table).ok_or_else(|| CatalogError::UnknownTable(table.to_string()))?;
        Ok(&self.structures[&e.structure])
    }

    pub fn structures(&self) -> impl Iterator<Item = &Structure> {
        self.structures.values()
    }

    pub fn rules(&self, table: &str) -> Result<&RuleProgram, CatalogError> {
        self.rules.get(table).ok_or_else(|| CatalogError::UnknownTable(table.to_string()))
    }

    pub fn menus(&self) -> &MenuSet {
        &self.menus
    }

    pub fn builtins(&self) -> &BuiltinSet {
        &self.builtins
    }

    pub fn units(&self) -> &UnitTable {
        &self.units
    }

    /// Profiles in order of first appearance in the registry.
    pub fn profiles(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for e in &self.registry {
            if !out.contains(&e.profile.as_str()) {
                out.push(&e.profile);
            }
        }
        out
    }
}
