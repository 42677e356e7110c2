use std::ffi::{c_char, c_int, CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use serde_json::Value;
use specforge_ffi::*;

fn core_fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures")
}

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn cpath(p: &Path) -> CString {
    c(p.to_str().unwrap())
}

/// Takes ownership of a returned string.
unsafe fn take(p: *mut c_char) -> String {
    assert!(!p.is_null());
    let s = CStr::from_ptr(p).to_str().unwrap().to_string();
    sf_string_free(p);
    s
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(sf_last_error()).to_str().unwrap().to_string() }
}

#[test]
fn collation_calls() {
    unsafe {
        let mut o: c_int = 0;
        assert_eq!(sf_compare_designations(c("2").as_ptr(), c("10").as_ptr(), &mut o), SfStatus::Ok);
        assert!(o < 0);
        let mut out = ptr::null_mut();
        assert_eq!(sf_sort_designations(c(r#"["10","2","1а","IV","5"]"#).as_ptr(), &mut out), SfStatus::Ok);
        // arabic numbers as a class come before roman ones
        assert_eq!(take(out), r#"["1а","2","5","10","IV"]"#);
        assert_eq!(sf_sort_designations(c("not json").as_ptr(), &mut out), SfStatus::InvalidArgument);
        assert!(!last_error().is_empty());
        assert_eq!(sf_compare_designations(ptr::null(), c("1").as_ptr(), &mut o), SfStatus::NullArgument);
        let bad = [0xffu8, 0];
        assert_eq!(sf_compare_designations(bad.as_ptr() as *const c_char, c("1").as_ptr(), &mut o), SfStatus::InvalidUtf8);
    }
}

#[test]
fn catalog_and_session() {
    unsafe {
        let mut cat = ptr::null_mut();
        assert_eq!(sf_catalog_load(cpath(&core_fixtures().join("catalog")).as_ptr(), &mut cat), SfStatus::Ok);
        let mut out = ptr::null_mut();
        assert_eq!(sf_catalog_stats(cat, &mut out), SfStatus::Ok);
        let stats: Value = serde_json::from_str(&take(out)).unwrap();
        assert_eq!(stats.as_array().unwrap().len(), 3);

        let mut s = ptr::null_mut();
        assert_eq!(sf_session_start(cat, c("nope").as_ptr(), 0, &mut s), SfStatus::NotFound);
        assert_eq!(sf_session_start(cat, c("manometers").as_ptr(), 9, &mut s), SfStatus::InvalidArgument);
        assert_eq!(sf_session_start(cat, c("manometers").as_ptr(), 0, &mut s), SfStatus::Ok);
        // the session outlives the catalog
        sf_catalog_free(cat);
        assert_eq!(sf_session_finish(s, &mut out), SfStatus::WrongState);
        assert_eq!(sf_session_prompt(s, &mut out), SfStatus::Ok);
        let p: Value = serde_json::from_str(&take(out)).unwrap();
        assert_eq!(p["options"].as_array().unwrap().len(), 2);
        assert_eq!(sf_session_answer(s, c("5").as_ptr()), SfStatus::InvalidArgument);
        assert_eq!(sf_session_answer(s, c("0").as_ptr()), SfStatus::Ok);
        assert_eq!(sf_session_answer(s, c(r#""1,0""#).as_ptr()), SfStatus::Ok);
        assert_eq!(sf_session_answer(s, c("0").as_ptr()), SfStatus::WrongState);
        assert_eq!(sf_session_finish(s, &mut out), SfStatus::Ok);
        let f: Value = serde_json::from_str(&take(out)).unwrap();
        assert_eq!(f["fields"]["naim_teh"], "Манометр показывающий, штуцер радиальный, 0...1,0 МПа, кл. 1.5");
        sf_session_free(s);
        assert_eq!(sf_catalog_load(c("/no/such/dir").as_ptr(), &mut cat), SfStatus::NotFound);
    }
}

#[test]
fn documents_and_tables() {
    let dir = tempfile::tempdir().unwrap();
    unsafe {
        let mut d = ptr::null_mut();
        assert_eq!(sf_document_load(cpath(&core_fixtures().join("docs/plan.json")).as_ptr(), &mut d), SfStatus::Ok);
        let mut out = ptr::null_mut();
        assert_eq!(sf_document_duplicates(d, c("po").as_ptr(), &mut out), SfStatus::Ok);
        let dups: Value = serde_json::from_str(&take(out)).unwrap();
        assert_eq!(dups[0]["designation"], "2");
        assert_eq!(sf_document_duplicates(d, c("").as_ptr(), &mut out), SfStatus::Ok);
        assert_eq!(take(out), "[]");
        assert_eq!(sf_document_duplicates(d, c("bogus").as_ptr(), &mut out), SfStatus::InvalidArgument);

        let kind = cpath(&core_fixtures().join("kinds/specification.json"));
        let mut t = ptr::null_mut();
        assert_eq!(sf_document_autofill(d, kind.as_ptr(), c("po").as_ptr(), &mut t), SfStatus::Ok);
        let mut n = 0usize;
        sf_table_len(t, &mut n);
        assert_eq!(n, 3);
        assert_eq!(sf_table_apply(t, c(r#"[{"op":"mark_row","row":0},{"op":"delete"}]"#).as_ptr()), SfStatus::Ok);
        sf_table_len(t, &mut n);
        assert_eq!(n, 2);
        // atomic: the second op fails, the first is rolled back
        assert_eq!(sf_table_apply(t, c(r#"[{"op":"undo"},{"op":"mark_row","row":50}]"#).as_ptr()), SfStatus::Domain);
        assert!(last_error().contains("operation 1"));
        sf_table_len(t, &mut n);
        assert_eq!(n, 2);
        assert_eq!(sf_table_apply(t, c(r#"{"op":"undo"}"#).as_ptr()), SfStatus::Ok);
        sf_table_len(t, &mut n);
        assert_eq!(n, 3);

        // rows through the buffer into a second table
        let mut t2 = ptr::null_mut();
        assert_eq!(sf_table_new(kind.as_ptr(), &mut t2), SfStatus::Ok);
        assert_eq!(
            sf_table_apply(t, c(r#"[{"op":"unmark"},{"op":"mark_range","from":0,"to":2},{"op":"to_buffer"}]"#).as_ptr()),
            SfStatus::Ok
        );
        assert_eq!(sf_table_share_buffer(t, t2), SfStatus::Ok);
        assert_eq!(sf_table_apply(t2, c(r#"{"op":"from_buffer"}"#).as_ptr()), SfStatus::Ok);
        sf_table_len(t2, &mut n);
        assert_eq!(n, 3);
        assert_eq!(sf_table_to_json(t2, &mut out), SfStatus::Ok);
        let json = c(&take(out));
        let mut t3 = ptr::null_mut();
        assert_eq!(sf_table_from_json(json.as_ptr(), &mut t3), SfStatus::Ok);
        sf_table_free(t);
        sf_table_free(t2);
        sf_table_free(t3);

        let saved = dir.path().join("copy.json");
        assert_eq!(sf_document_save(d, cpath(&saved).as_ptr()), SfStatus::Ok);
        assert!(saved.is_file());
        sf_document_free(d);
        assert_eq!(sf_document_load(c("/no/such.json").as_ptr(), &mut d), SfStatus::NotFound);
        assert_eq!(sf_document_new(&mut d), SfStatus::Ok);
        sf_document_free(d);
        sf_document_free(ptr::null_mut());
        assert_eq!(sf_table_len(ptr::null(), &mut n), SfStatus::NullArgument);
    }
}

#[test]
fn header_declares_every_export() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR"));
    let header = std::fs::read_to_string(root.join("include/specforge.h")).unwrap();
    let src = std::fs::read_to_string(root.join("src/lib.rs")).unwrap();
    let exports: Vec<&str> =
        src.lines().filter_map(|l| l.split("extern \"C\" fn ").nth(1)).map(|rest| rest.split('(').next().unwrap()).collect();
    assert!(exports.len() > 20);
    for f in exports {
        assert!(header.contains(&format!("{f}(")), "{f} missing from the header");
    }
    assert!(header.contains("SF_STATUS_WRONG_STATE = 7"));
    assert!(header.contains("typedef struct SfTable SfTable;"));
}

#[test]
fn header_compiles_as_c() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/specforge.h");
    match Command::new("cc").args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c"]).arg(&header).status() {
        Ok(st) => assert!(st.success()),
        Err(_) => eprintln!("no C compiler; header syntax not checked"),
    }
}
