use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use specforge::drawing::load_document;
use specforge::table::TableInstance;

fn root() -> &'static Path {
    Path::new(env!("CARGO_MANIFEST_DIR"))
}

/// Runs the binary from the crate root with fixture defaults.
fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_specforge"))
        .args(args)
        .current_dir(root())
        .env("SPECFORGE_CATALOG_DIR", "fixtures/catalog")
        .env("SPECFORGE_KINDS_DIR", "fixtures/kinds")
        .env("RUST_LOG", "off")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

/// Compares JSON-mode output with tests/golden/<name>.json. Set
/// UPDATE_GOLDEN=1 to rewrite the files.
fn golden(name: &str, args: &[&str]) {
    let mut full = vec!["--format", "json"];
    full.extend_from_slice(args);
    let o = run(&full);
    assert_eq!(o.status.code(), Some(0), "{name}: {}", stderr(&o));
    let out = stdout(&o);
    serde_json::from_str::<Value>(&out).unwrap_or_else(|e| panic!("{name}: output is not JSON: {e}"));
    let path = root().join("tests/golden").join(format!("{name}.json"));
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, &out).unwrap();
    }
    let want = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing golden file {}", path.display()));
    assert_eq!(out, want, "{name} differs from its golden file");
}

#[test]
fn json_outputs_match_golden_files() {
    golden("catalog_validate", &["catalog", "validate"]);
    golden("catalog_stats", &["catalog", "stats"]);
    golden("catalog_filter_dn32", &["catalog", "filter", "--dn", "32"]);
    golden("catalog_filter_kip", &["catalog", "filter", "--kip-class", "primary", "--kip-letter", "T"]);
    golden("po_sort", &["po", "sort", "fixtures/docs/plan.json"]);
    golden("po_structures", &["po", "structures", "fixtures/docs/plan.json"]);
    golden("po_lint", &["po", "lint", "fixtures/docs/plan.json"]);
    golden("po_dedupe", &["po", "dedupe", "fixtures/docs/sheet1.json", "fixtures/docs/sheet2.json", "fixtures/docs/sheet3.json"]);
    golden(
        "session_run_pipe",
        &["session", "run", "--table", "pipes_10704", "--row", "1", "--answers", "fixtures/sessions/pipes_10704.json"],
    );
    golden("spec_autofill", &["spec", "autofill", "fixtures/docs/plan.json", "--kind", "specification"]);
    golden("spec_autofill_wells", &["spec", "autofill", "fixtures/docs/plan.json", "--kind", "well_table"]);
    golden("table_paginate", &["table", "paginate", "fixtures/tables/specification_from_7.json", "--max-height", "40"]);
    golden("table_render", &["table", "render", "fixtures/tables/explication_7.json"]);
}

#[test]
fn sort_prints_natural_order() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("list.txt");
    std::fs::write(&f, "10\n2\n").unwrap();
    let o = run(&["po", "sort", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "2\n10\n");
}

#[test]
fn broken_registry_exits_1_naming_the_table() {
    let dir = tempfile::tempdir().unwrap();
    let src = root().join("fixtures/catalog");
    copy_dir(&src, dir.path());
    let reg = dir.path().join("registry.csv");
    let text = std::fs::read_to_string(&reg).unwrap().replace("valves_15kch,VALVE", "valves_15kch,VALVES");
    std::fs::write(&reg, text).unwrap();
    let o = run(&["--catalog", dir.path().to_str().unwrap(), "catalog", "validate"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("valves_15kch"), "{}", stderr(&o));
}

fn copy_dir(from: &Path, to: &Path) {
    for e in std::fs::read_dir(from).unwrap() {
        let e = e.unwrap();
        let target = to.join(e.file_name());
        if e.file_type().unwrap().is_dir() {
            std::fs::create_dir_all(&target).unwrap();
            copy_dir(&e.path(), &target);
        } else {
            std::fs::copy(e.path(), target).unwrap();
        }
    }
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["nope"]).status.code(), Some(2));
    assert_eq!(run(&["table", "paginate", "x.json"]).status.code(), Some(2));
    assert_eq!(run(&["po", "dedupe", "fixtures/docs/plan.json", "--scope", "pipes"]).status.code(), Some(2));
    let o = run(&["--catalog", "fixtures/catalog", "--format", "yaml", "catalog", "stats"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn domain_errors_exit_1() {
    assert_eq!(run(&["po", "sort", "no/such/file"]).status.code(), Some(1));
    assert_eq!(run(&["session", "run", "--table", "nope", "--row", "0"]).status.code(), Some(1));
    // the manometer row asks two questions; an empty script cannot answer them
    let o = run(&["session", "run", "--table", "manometers", "--row", "0"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn session_output_is_byte_stable() {
    let args = [
        "--format",
        "json",
        "session",
        "run",
        "--table",
        "pipes_10704",
        "--row",
        "1",
        "--answers",
        "fixtures/sessions/pipes_10704.json",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["numeric"]["length"]["value"], 2000.0);
}

#[test]
fn table_files_through_buffer_and_undo() {
    let dir = tempfile::tempdir().unwrap();
    let p = |n: &str| -> PathBuf { dir.path().join(n) };
    std::fs::copy(root().join("fixtures/tables/explication_7.json"), p("e.json")).unwrap();
    let s = |x: &PathBuf| x.to_str().unwrap().to_string();
    assert!(run(&["table", "new", "--kind", "specification", "-o", &s(&p("s.json"))]).status.success());
    let o = run(&[
        "table",
        "op",
        &s(&p("e.json")),
        "--ops",
        r#"[{"op":"mark_range","from":0,"to":6},{"op":"to_buffer"}]"#,
        "--buffer",
        &s(&p("b.json")),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let o = run(&["table", "op", &s(&p("s.json")), "--ops", r#"{"op":"from_buffer"}"#, "--buffer", &s(&p("b.json"))]);
    assert!(o.status.success(), "{}", stderr(&o));
    let got = TableInstance::from_json(&std::fs::read_to_string(p("s.json")).unwrap()).unwrap();
    let want =
        TableInstance::from_json(&std::fs::read_to_string(root().join("fixtures/tables/specification_from_7.json")).unwrap())
            .unwrap();
    assert_eq!(got, want);

    // a failing op leaves the file alone
    let before = std::fs::read_to_string(p("s.json")).unwrap();
    let o = run(&[
        "table",
        "op",
        &s(&p("s.json")),
        "--ops",
        r#"[{"op":"mark_row","row":0},{"op":"delete"},{"op":"mark_row","row":99}]"#,
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("operation 2"));
    assert_eq!(std::fs::read_to_string(p("s.json")).unwrap(), before);
}

#[test]
fn autofill_attaches_to_the_drawing() {
    let dir = tempfile::tempdir().unwrap();
    let doc = dir.path().join("plan.json");
    std::fs::copy(root().join("fixtures/docs/plan.json"), &doc).unwrap();
    let before = load_document(&doc).unwrap().len();
    let o = run(&["spec", "autofill", doc.to_str().unwrap(), "--kind", "specification", "--attach", "0,200"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let after = load_document(&doc).unwrap();
    assert_eq!(after.len(), before + 1);
    assert!(after.elements().last().unwrap().as_table().is_some());
    // text mode prints the titles and one line per merged row
    assert_eq!(stdout(&o).lines().count(), 1 + 3);
}
