//! Random tables and table-engine oracles.

use std::collections::BTreeMap;

use rand::seq::IndexedRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use specforge::geom::{Mm, Point};
use specforge::table::{cell_at, layout, CellPath, GoodsBuffer, RecordRef, TableInstance, TableOp};

use super::{filled, kind, spec_row};

pub fn spec_table(rng: &mut ChaCha8Rng, max_rows: usize) -> TableInstance {
    let n = rng.random_range(0..=max_rows);
    let rows = (0..n).map(|_| spec_row(rng)).collect();
    let sections: Vec<usize> = (0..rng.random_range(0..3)).map(|_| rng.random_range(0..=n)).collect();
    filled(kind("specification"), rows, &sections)
}

/// An assembly sheet with templated rows and extra parts in random blocks.
pub fn assembly_table(rng: &mut ChaCha8Rng, max_rows: usize) -> TableInstance {
    let mut t = TableInstance::new(kind("assembly_sheet"));
    for _ in 0..rng.random_range(0..=max_rows) {
        t.insert_template("flange_joint", None).unwrap();
    }
    for _ in 0..rng.random_range(0..4) {
        let _ = t.insert_part_at(random_point(rng, &t));
    }
    let cells = layout(&t).cells;
    for _ in 0..rng.random_range(0..4) {
        if let Some(c) = cells.choose(rng) {
            if matches!(c.path.record, RecordRef::Data(_)) {
                let lines = (0..rng.random_range(1..3)).map(|i| format!("стр {i}")).collect();
                t.set_cell_text(&c.path, lines).unwrap();
            }
        }
    }
    t
}

pub fn random_point(rng: &mut ChaCha8Rng, t: &TableInstance) -> Point {
    let g = layout(t);
    let x = rng.random_range(0..g.width.thousandths().max(1));
    let y = rng.random_range(0..g.height.thousandths().max(1));
    Point::new(Mm::from_thousandths(x), Mm::from_thousandths(y))
}

pub fn random_marks(rng: &mut ChaCha8Rng, t: &mut TableInstance) {
    for r in 0..t.len() {
        if rng.random_bool(0.4) {
            t.apply(TableOp::MarkRow { row: r }, &mut GoodsBuffer::default()).unwrap();
        }
    }
}

/// A mutating operation with arguments that are sometimes out of range.
pub fn random_op(rng: &mut ChaCha8Rng, t: &TableInstance) -> TableOp {
    let to = rng.random_range(0..=t.len() + 1);
    let field = *t.kind().fields().choose(rng).unwrap();
    match rng.random_range(0..13) {
        0 => TableOp::Copy { to },
        1 => TableOp::Move { to },
        2 => TableOp::Delete,
        3 => TableOp::Clear,
        4 => TableOp::FromBuffer,
        5 => TableOp::InsertPartAt { point: random_point(rng, t) },
        6 => TableOp::InsertTemplate { name: "flange_joint".into(), at: Some(to) },
        7 => TableOp::AddSection { title: "Раздел".into(), at: to },
        8 => TableOp::MergeIdentical { field: ["kolichestvo", field].choose(rng).unwrap().to_string() },
        9 => TableOp::OrderRows { fields: vec![field.to_string()] },
        10 => TableOp::ExtractCommonNames { field: field.to_string(), min_group: Some(2) },
        11 => {
            let cells = layout(t).cells;
            let path =
                cells.choose(rng).map(|c| c.path.clone()).unwrap_or(CellPath { record: RecordRef::Data(0), parts: vec![0] });
            TableOp::SetCell { path, lines: vec!["новое".into()] }
        }
        _ => TableOp::Stretch { factor: [0.5, 1.5, 0.0, 2.0].choose(rng).copied().unwrap() },
    }
}

/// Data rows of `t` as (section, field map) pairs; rows before the first
/// section belong to section `None`.
pub fn grouped(t: &TableInstance) -> Vec<(Option<usize>, BTreeMap<String, String>)> {
    t.rows().iter().enumerate().map(|(r, row)| (t.sections().iter().rposition(|s| s.start <= r), t.field_map(row))).collect()
}

/// Expected rows after merging on `kolichestvo`, computed from field maps.
pub fn merge_oracle(rows: Vec<(Option<usize>, BTreeMap<String, String>)>) -> Vec<(Option<usize>, BTreeMap<String, String>)> {
    let qty = |m: &BTreeMap<String, String>| m.get("kolichestvo").and_then(|q| q.parse::<u64>().ok());
    let rest = |m: &BTreeMap<String, String>| {
        let mut m = m.clone();
        m.remove("kolichestvo");
        m
    };
    let mut out: Vec<(Option<usize>, BTreeMap<String, String>)> = Vec::new();
    for (s, m) in rows {
        if let Some((ls, last)) = out.last_mut() {
            if let (Some(a), Some(b)) = (qty(last), qty(&m)) {
                if *ls == s && rest(last) == rest(&m) {
                    last.insert("kolichestvo".into(), (a + b).to_string());
                    continue;
                }
            }
        }
        out.push((s, m));
    }
    out
}

pub fn qty_total(t: &TableInstance) -> u64 {
    t.rows().iter().filter_map(|r| t.field_text(r, "kolichestvo")?.parse::<u64>().ok()).sum()
}

/// Every point on a fine grid lies in exactly one layout cell, and cell_at
/// names that cell; points in gaps are refused by both.
pub fn check_cell_at(t: &TableInstance) {
    let g = layout(t);
    let step = Mm::from_thousandths(2_500);
    let mut y = Mm::ZERO;
    while y < g.height {
        let mut x = Mm::ZERO;
        while x < g.width {
            let p = Point::new(x, y);
            let hits: Vec<&CellPath> = g.cells.iter().filter(|c| c.rect.contains(p)).map(|c| &c.path).collect();
            assert!(hits.len() <= 1, "{p:?} in {hits:?}");
            match cell_at(t, p) {
                Ok(path) => assert_eq!(hits, [&path], "{p:?}"),
                Err(_) => assert!(hits.is_empty(), "{p:?}"),
            }
            x += step;
        }
        y += step;
    }
    for c in &g.cells {
        assert_eq!(cell_at(t, Point::new(c.rect.x0, c.rect.y0)).unwrap(), c.path);
    }
}
