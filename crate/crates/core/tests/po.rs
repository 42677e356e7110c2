mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use common::mixed_document;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use specforge::drawing::{save_document, Document};
use specforge::geom::Point;
use specforge::pipeline::{product_rows, routed_rows};
use specforge::po::{
    check_duplicate, check_duplicates_files, duplicates_in, make_po, DuplicateScope, ObjectType, PoType, SpecProps,
};

fn scope(bits: u8) -> DuplicateScope {
    DuplicateScope {
        include_po_modules: bits & 1 != 0,
        include_axono_modules: bits & 2 != 0,
        include_vk_profile_modules: bits & 4 != 0,
    }
}

/// Designation -> set of (file, element) locations.
fn located(docs: &[(PathBuf, Document)], s: &DuplicateScope) -> BTreeMap<String, BTreeSet<(PathBuf, u64)>> {
    duplicates_in(docs, s)
        .entries
        .into_iter()
        .map(|e| (e.designation, e.locations.into_iter().map(|l| (l.file, l.element.0)).collect()))
        .collect()
}

fn sheet(designations: &[&str]) -> Document {
    let mut d = Document::new();
    for x in designations {
        make_po(&mut d, vec![x.to_string()], PoType::OneProduct, ObjectType::None, vec![SpecProps::new()], Point::ORIGIN)
            .unwrap();
    }
    d
}

#[test]
fn planted_duplicate_across_three_files() {
    let dir = tempfile::tempdir().unwrap();
    let paths: Vec<PathBuf> = (1..=3).map(|i| dir.path().join(format!("sheet{i}.json"))).collect();
    save_document(&sheet(&["1", "2", "3"]), &paths[0]).unwrap();
    save_document(&sheet(&["4", "5", "6"]), &paths[1]).unwrap();
    save_document(&sheet(&["7", "8", "2"]), &paths[2]).unwrap();
    let report = check_duplicates_files(&paths, &DuplicateScope::ALL).unwrap();
    assert_eq!(report.entries.len(), 1);
    assert_eq!(report.entries[0].designation, "2");
    let files: Vec<&PathBuf> = report.entries[0].locations.iter().map(|l| &l.file).collect();
    assert_eq!(files, [&paths[0], &paths[2]]);
    assert!(check_duplicates_files(&paths, &DuplicateScope::NONE).unwrap().is_empty());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn wider_scope_finds_at_least_as_much(seed in any::<u64>(), a in 0u8..8, b in 0u8..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let docs: Vec<(PathBuf, Document)> =
            (0..3).map(|i| (PathBuf::from(format!("f{i}.json")), mixed_document(&mut rng, 6))).collect();
        let (narrow, wide) = (scope(a & b), scope(a | b));
        prop_assert!(wide.contains(&narrow));
        let (small, large) = (located(&docs, &narrow), located(&docs, &wide));
        for (d, locs) in &small {
            prop_assert!(large.get(d).is_some_and(|l| l.is_superset(locs)), "{} lost under the wider scope", d);
        }
        for (_, doc) in &docs {
            for c in 1..8 {
                let c = c.to_string();
                if check_duplicate(doc, &narrow, &c).is_duplicate() {
                    prop_assert!(check_duplicate(doc, &wide, &c).is_duplicate());
                }
            }
        }
        prop_assert!(located(&docs, &DuplicateScope::NONE).is_empty());
    }

    #[test]
    fn routing_partitions_product_rows(seed in any::<u64>(), n in 0usize..25) {
        let doc = mixed_document(&mut ChaCha8Rng::seed_from_u64(seed), n);
        let key = |r: &specforge::pipeline::ProductRow| serde_json::to_string(r).unwrap();
        let mut routed: Vec<String> = routed_rows(&doc, &common::kind("specification"), &DuplicateScope::ALL)
            .iter()
            .chain(&routed_rows(&doc, &common::kind("well_table"), &DuplicateScope::ALL))
            .map(key)
            .collect();
        let mut all: Vec<String> = product_rows(&doc, &DuplicateScope::ALL).iter().map(key).collect();
        routed.sort();
        all.sort();
        prop_assert_eq!(routed, all);
    }
}
