use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use specforge::catalog::{
    catalog_stats, filter_tables, load_catalog_set, query_rows, CatalogError, FilterCriteria, IntervalKey, KipQuery, Predicate,
};
use specforge::po::ObjectType;

fn fixture() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/catalog")
}

fn copy_dir(from: &Path, to: &Path) {
    fs::create_dir_all(to).unwrap();
    for e in fs::read_dir(from).unwrap() {
        let e = e.unwrap();
        let dst = to.join(e.file_name());
        if e.path().is_dir() {
            copy_dir(&e.path(), &dst);
        } else {
            fs::copy(e.path(), dst).unwrap();
        }
    }
}

fn broken(edit: impl FnOnce(&Path)) -> CatalogError {
    let tmp = tempfile::tempdir().unwrap();
    copy_dir(&fixture(), tmp.path());
    edit(tmp.path());
    load_catalog_set(tmp.path()).unwrap_err()
}

fn tables(v: Vec<&specforge::catalog::RegistryEntry>) -> Vec<&str> {
    v.into_iter().map(|e| e.table.as_str()).collect()
}

#[test]
fn sample_set_loads() {
    let set = load_catalog_set(fixture()).unwrap();
    assert_eq!(set.registry().len(), 8);
    assert_eq!(set.profiles(), ["МТ", "КИП", "ОВК"]);
    assert_eq!(set.table("manometers").unwrap().rows.len(), 2);
}

#[test]
fn empty_and_missing_directories() {
    let tmp = tempfile::tempdir().unwrap();
    assert!(matches!(load_catalog_set(tmp.path()), Err(CatalogError::Missing(_))));
    assert!(matches!(load_catalog_set(tmp.path().join("nope")), Err(CatalogError::Missing(_))));
}

#[test]
fn referential_breaks_name_the_table() {
    let e = broken(|d| {
        let r = fs::read_to_string(d.join("registry.csv")).unwrap().replace("pumps,PUMP", "pumps,PUMPX");
        fs::write(d.join("registry.csv"), r).unwrap();
    });
    assert!(matches!(&e, CatalogError::UnknownStructure { table, structure } if table == "pumps" && structure == "PUMPX"));
    assert!(e.to_string().contains("pumps"));

    let e = broken(|d| fs::remove_file(d.join("rules/pumps.rule")).unwrap());
    assert!(matches!(e, CatalogError::MissingRules { table } if table == "pumps"));

    let e = broken(|d| fs::write(d.join("rules/pumps.rule"), "naimenovanie = col(X_9)\n* = skip\n").unwrap());
    assert!(matches!(e, CatalogError::RuleColumn { table, column } if table == "pumps" && column == "X_9"));

    let e = broken(|d| fs::write(d.join("rules/pumps.rule"), "naimenovanie = menu(NOPE)\n* = skip\n").unwrap());
    assert!(matches!(e, CatalogError::RuleMenu { .. }));

    let e = broken(|d| fs::write(d.join("rules/pumps.rule"), "naimenovanie = var(L)\n* = skip\n").unwrap());
    assert!(matches!(e, CatalogError::Rules { .. }));

    let e = broken(|d| fs::write(d.join("rules/pumps.rule"), "naimenovanie = const(\"x\")\n").unwrap());
    assert!(matches!(e, CatalogError::Rules { .. }));

    let e = broken(|d| fs::write(d.join("tables/pumps.csv"), "MARKA,X_1,X_2,X_3,X_4\n").unwrap());
    assert!(matches!(e, CatalogError::NoRows { table } if table == "pumps"));

    let e = broken(|d| fs::write(d.join("tables/pumps.csv"), "MARKA,X_1,X_2,X_3\nК,1,2,3\n").unwrap());
    assert!(matches!(e, CatalogError::ColumnMismatch { .. }));

    let e = broken(|d| fs::write(d.join("tables/pumps.csv"), "MARKA,X_1,X_2,X_3,X_4\nК,много,2,3,4\n").unwrap());
    assert!(matches!(e, CatalogError::NotNumeric { column, .. } if column == "X_1"));

    let e = broken(|d| fs::write(d.join("tables/extra.csv"), "MARKA\nA\n").unwrap());
    assert!(matches!(e, CatalogError::UnregisteredTable(t) if t == "extra"));

    let e = broken(|d| fs::write(d.join("registry.csv"), "table,structure\n").unwrap());
    assert!(matches!(e, CatalogError::Header { .. }));
}

#[test]
fn filters() {
    let set = load_catalog_set(fixture()).unwrap();
    let pipes = FilterCriteria { object_type: Some(ObjectType::Pipe), ..Default::default() };
    assert_eq!(tables(filter_tables(&set, &pipes)), ["pipes_10704", "pipes_pe"]);
    let p = FilterCriteria { kip: Some(KipQuery { class: None, letter: Some('P') }), ..Default::default() };
    assert_eq!(tables(filter_tables(&set, &p)), ["manometers", "recorders_disk250"]);
    let dn = FilterCriteria { intervals: vec![(IntervalKey::Dn, 50.0)], ..Default::default() };
    assert_eq!(tables(filter_tables(&set, &dn)), ["valves_15kch"]);
    let dn = FilterCriteria { intervals: vec![(IntervalKey::Dn, 32.0)], ..Default::default() };
    assert_eq!(tables(filter_tables(&set, &dn)), ["valves_15kch", "flanges_12820"]);
    let pump = FilterCriteria { group_keyword: Some("насос".into()), ..Default::default() };
    assert_eq!(tables(filter_tables(&set, &pump)), ["pumps"]);
    assert_eq!(filter_tables(&set, &FilterCriteria::default()).len(), 8);
}

#[test]
fn rows() {
    let set = load_catalog_set(fixture()).unwrap();
    let v = set.table("valves_15kch").unwrap();
    assert_eq!(query_rows(v, &[("X_1".into(), Predicate::Range { min: Some(40.0), max: Some(60.0) })]).unwrap(), [1]);
    let m = set.table("manometers").unwrap();
    assert_eq!(query_rows(m, &[("X_1".into(), Predicate::Contains { value: "осевой".into() })]).unwrap(), [0]);
    assert_eq!(query_rows(m, &[("X_2".into(), Predicate::Range { min: Some(1.5), max: None })]).unwrap(), [0, 1]);
    let r = set.table("recorders_disk250").unwrap();
    assert_eq!(query_rows(r, &[("MARKA".into(), Predicate::Equals { value: "ДИСК-250-1121".into() })]).unwrap(), [0]);
}

/// Row counts by reading the files as plain lines, independent of the csv loader.
fn line_counts(dir: &Path, table: &str) -> usize {
    let text = fs::read_to_string(dir.join("tables").join(format!("{table}.csv"))).unwrap();
    text.lines().filter(|l| !l.trim().is_empty()).count() - 1
}

#[test]
fn stats_match_hand_tally() {
    let set = load_catalog_set(fixture()).unwrap();
    let s = catalog_stats(&set, &["ТС"]);
    let row = |p: &str| s.iter().find(|x| x.profile == p).unwrap().clone();
    let tally = |x: specforge::catalog::ProfileStats| {
        (x.catalogs, x.tables, x.property_names, x.mm_properties, x.unnamed_mm_properties, x.rows_total, x.rows_min, x.rows_max)
    };
    assert_eq!(tally(row("МТ")), (3, 3, 12, 6, 3, 12, 3, 5));
    assert_eq!(tally(row("КИП")), (2, 3, 9, 2, 0, 5, 1, 2));
    assert_eq!(tally(row("ОВК")), (2, 2, 9, 2, 0, 5, 2, 3));
    assert_eq!(tally(row("ТС")), (0, 0, 0, 0, 0, 0, 0, 0));

    let total: usize = s.iter().map(|x| x.rows_total).sum();
    let by_lines: usize = set.registry().iter().map(|e| line_counts(&fixture(), &e.table)).sum();
    assert_eq!(total, by_lines);
    let names: BTreeSet<&str> = set.registry().iter().map(|e| e.profile.as_str()).collect();
    assert_eq!(names.len(), 3);
}
