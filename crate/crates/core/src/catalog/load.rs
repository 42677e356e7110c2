//! Reading and cross-checking a catalog directory.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use super::{
    CatalogError, CatalogSet, CellValue, Classification, ColumnMeta, ColumnType, DataTable, RegistryEntry, Structure,
    DEFAULT_PROFILE,
};
use crate::quantity::leading_number;
use crate::rules::{parse_rules, BuiltinSet, MenuSet, UnitTable};

const META_HEADER: [&str; 5] = ["structure", "column", "name", "units", "type"];
const REGISTRY_HEADER: [&str; 6] = ["table", "structure", "title", "source", "class_kind", "class_args"];
const PROFILES_HEADER: [&str; 2] = ["table", "profile"];

fn read(path: &Path) -> Result<String, CatalogError> {
    if !path.exists() {
        return Err(CatalogError::Missing(path.to_path_buf()));
    }
    fs::read_to_string(path).map_err(|source| CatalogError::Io { path: path.to_path_buf(), source })
}

fn read_optional(path: &Path) -> Result<Option<String>, CatalogError> {
    if path.exists() {
        read(path).map(Some)
    } else {
        Ok(None)
    }
}

/// Parses CSV text into (line, fields) records after checking the header.
fn csv_records(
    text: &str,
    file: &str,
    expected: Option<&[&str]>,
) -> Result<(Vec<String>, Vec<(u64, Vec<String>)>), CatalogError> {
    let mut rd = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    let csv_err = |e: csv::Error| CatalogError::Csv {
        file: file.to_string(),
        line: e.position().map_or(0, |p| p.line()),
        message: e.to_string(),
    };
    let header: Vec<String> = rd.headers().map_err(csv_err)?.iter().map(|h| h.trim().to_string()).collect();
    if let Some(exp) = expected {
        if header != exp {
            return Err(CatalogError::Header { file: file.to_string(), expected: exp.join(","), found: header.join(",") });
        }
    }
    let mut rows = Vec::new();
    for rec in rd.records() {
        let rec = rec.map_err(csv_err)?;
        let line = rec.position().map_or(0, |p| p.line());
        rows.push((line, rec.iter().map(str::to_string).collect()));
    }
    Ok((header, rows))
}

fn load_meta(text: &str) -> Result<BTreeMap<String, Structure>, CatalogError> {
    let (_, rows) = csv_records(text, "meta.csv", Some(&META_HEADER))?;
    let mut out: BTreeMap<String, Structure> = BTreeMap::new();
    for (_, r) in rows {
        let (structure, column) = (r[0].trim().to_string(), r[1].trim().to_string());
        let kind = match r[4].trim() {
            "number" => ColumnType::Number,
            "text" => ColumnType::Text,
            other => return Err(CatalogError::BadType { structure, column, value: other.to_string() }),
        };
        let s = out.entry(structure.clone()).or_insert_with(|| Structure { name: structure.clone(), columns: Vec::new() });
        if s.column(&column).is_some() {
            return Err(CatalogError::DuplicateMeta { structure, column });
        }
        s.columns.push(ColumnMeta { column, name: r[2].trim().to_string(), units: r[3].trim().to_string(), kind });
    }
    Ok(out)
}

fn load_registry(text: &str, profiles: &BTreeMap<String, String>) -> Result<Vec<RegistryEntry>, CatalogError> {
    let (_, rows) = csv_records(text, "registry.csv", Some(&REGISTRY_HEADER))?;
    let mut out: Vec<RegistryEntry> = Vec::new();
    for (_, r) in rows {
        let table = r[0].trim().to_string();
        if out.iter().any(|e| e.table == table) {
            return Err(CatalogError::DuplicateTable(table));
        }
        let classification =
            Classification::parse(&r[4], &r[5]).map_err(|message| CatalogError::BadClass { table: table.clone(), message })?;
        let profile = if profiles.is_empty() {
            DEFAULT_PROFILE.to_string()
        } else {
            profiles.get(&table).cloned().ok_or_else(|| CatalogError::Profile(format!("table {table} has no profile")))?
        };
        out.push(RegistryEntry {
            table,
            structure: r[1].trim().to_string(),
            title: r[2].trim().to_string(),
            source: r[3].trim().to_string(),
            profile,
            classification,
        });
    }
    Ok(out)
}

fn load_profiles(text: Option<String>) -> Result<BTreeMap<String, String>, CatalogError> {
    let Some(text) = text else { return Ok(BTreeMap::new()) };
    let (_, rows) = csv_records(&text, "profiles.csv", Some(&PROFILES_HEADER))?;
    let mut out = BTreeMap::new();
    for (line, r) in rows {
        if out.insert(r[0].trim().to_string(), r[1].trim().to_string()).is_some() {
            return Err(CatalogError::Profile(format!("line {line}: table {} listed twice", r[0].trim())));
        }
    }
    Ok(out)
}

fn is_number(s: &str) -> bool {
    matches!(leading_number(s), Some((_, rest)) if rest.trim().is_empty())
}

fn load_table(dir: &Path, entry: &RegistryEntry, structure: &Structure) -> Result<DataTable, CatalogError> {
    let table = entry.table.clone();
    let path = dir.join("tables").join(format!("{table}.csv"));
    if !path.exists() {
        return Err(CatalogError::MissingTableFile { table });
    }
    let file = format!("tables/{table}.csv");
    let (columns, records) = csv_records(&read(&path)?, &file, None)?;
    let expected: Vec<String> = structure.columns.iter().map(|c| c.column.clone()).collect();
    if columns != expected {
        return Err(CatalogError::ColumnMismatch { table, structure: structure.name.clone(), expected, found: columns });
    }
    if records.is_empty() {
        return Err(CatalogError::NoRows { table });
    }
    let mut rows = Vec::with_capacity(records.len());
    for (i, (_, rec)) in records.into_iter().enumerate() {
        let cells: Vec<CellValue> = rec.iter().map(|c| CellValue::parse(c)).collect();
        for (m, cell) in structure.columns.iter().zip(&cells) {
            if m.kind == ColumnType::Number {
                if let Some(bad) = cell.texts().into_iter().find(|t| !t.is_empty() && !is_number(t)) {
                    return Err(CatalogError::NotNumeric { table, row: i, column: m.column.clone(), value: bad.to_string() });
                }
            }
        }
        rows.push(cells);
    }
    Ok(DataTable { name: table, columns, rows })
}

/// Loads and validates a catalog directory: meta.csv, registry.csv,
/// tables/*.csv, rules/*.rule and menus.txt, plus the optional
/// profiles.csv, units.csv and builtins.txt.
pub fn load_catalog_set(dir: impl AsRef<Path>) -> Result<CatalogSet, CatalogError> {
    let dir = dir.as_ref();
    if !dir.is_dir() {
        return Err(CatalogError::Missing(dir.to_path_buf()));
    }
    let structures = load_meta(&read(&dir.join("meta.csv"))?)?;
    let profiles = load_profiles(read_optional(&dir.join("profiles.csv"))?)?;
    let registry = load_registry(&read(&dir.join("registry.csv"))?, &profiles)?;
    if registry.is_empty() {
        return Err(CatalogError::Empty(dir.to_path_buf()));
    }
    if let Some(extra) = profiles.keys().find(|t| !registry.iter().any(|e| &e.table == *t)) {
        return Err(CatalogError::Profile(format!("table {extra} is not in the registry")));
    }
    let menus = MenuSet::parse(&read(&dir.join("menus.txt"))?).map_err(CatalogError::File)?;
    let builtins = match read_optional(&dir.join("builtins.txt"))? {
        Some(t) => BuiltinSet::parse(&t).map_err(CatalogError::File)?,
        None => BuiltinSet::default(),
    };
    let units = match read_optional(&dir.join("units.csv"))? {
        Some(t) => UnitTable::parse(&t).map_err(CatalogError::File)?,
        None => UnitTable::default(),
    };

    let tables_dir = dir.join("tables");
    let on_disk: BTreeSet<String> = fs::read_dir(&tables_dir)
        .map_err(|source| CatalogError::Io { path: tables_dir.clone(), source })?
        .filter_map(|e| e.ok())
        .filter_map(|e| {
            let p = e.path();
            if p.extension()? != "csv" {
                return None;
            }
            Some(p.file_stem()?.to_string_lossy().into_owned())
        })
        .collect();
    if let Some(extra) = on_disk.iter().find(|t| !registry.iter().any(|e| &e.table == *t)) {
        return Err(CatalogError::UnregisteredTable(extra.clone()));
    }

    let mut tables = BTreeMap::new();
    let mut rules = BTreeMap::new();
    for e in &registry {
        let structure = structures
            .get(&e.structure)
            .ok_or_else(|| CatalogError::UnknownStructure { table: e.table.clone(), structure: e.structure.clone() })?;
        let table = load_table(dir, e, structure)?;
        let rule_path: PathBuf = dir.join("rules").join(format!("{}.rule", e.table));
        if !rule_path.exists() {
            return Err(CatalogError::MissingRules { table: e.table.clone() });
        }
        let rules_err = |source| CatalogError::Rules { table: e.table.clone(), source };
        let prog = parse_rules(&read(&rule_path)?).map_err(rules_err)?;
        prog.check_self().map_err(rules_err)?;
        let refs = prog.references();
        if let Some(c) = refs.columns.iter().find(|c| table.column_index(c).is_none()) {
            return Err(CatalogError::RuleColumn { table: e.table.clone(), column: c.to_string() });
        }
        if let Some(m) = refs.menus.iter().find(|m| menus.get(m).is_none()) {
            return Err(CatalogError::RuleMenu { table: e.table.clone(), menu: m.to_string() });
        }
        if let Some(b) = refs.builtins.iter().find(|b| !builtins.has(b)) {
            return Err(CatalogError::RuleBuiltin { table: e.table.clone(), name: b.to_string() });
        }
        tables.insert(e.table.clone(), table);
        rules.insert(e.table.clone(), prog);
    }
    log::debug!("catalog {}: {} tables", dir.display(), tables.len());
    Ok(CatalogSet { structures, registry, tables, rules, menus, builtins, units })
}
