mod common;

use common::tables::{assembly_table, check_cell_at, grouped, merge_oracle, qty_total, random_marks, random_op, spec_table};
use common::{kind, load_table, spec_row};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use specforge::geom::Mm;
use specforge::table::{bands, layout, paginate, BandKind, Direction, GoodsBuffer, HeadMode, RecordRef, TableInstance, TableOp};

#[test]
fn flange_joint_template() {
    let mut t = TableInstance::new(kind("assembly_sheet"));
    let row = t.insert_template("flange_joint", None).unwrap();
    let counts = t.arbitrary_counts(row);
    assert_eq!(counts.values().sum::<usize>(), 5);
    assert_eq!(counts["flanges"], 1);
    assert_eq!(counts["gaskets"], 1);
    assert_eq!(counts["fasteners"], 3);
    let g = layout(&t);
    let band = g.bands.iter().find(|b| b.kind == BandKind::Data(row)).unwrap();
    let lh = t.kind().options.line_height;
    assert_eq!(band.y1 - band.y0, lh * 3);
    let fasteners: Vec<_> = g.cells.iter().filter(|c| c.path.record == RecordRef::Data(row) && c.path.parts[0] == 3).collect();
    // three sub-rows, each with a name and a count cell
    assert_eq!(fasteners.len(), 6);
    let mut tops: Vec<Mm> = fasteners.iter().map(|c| c.rect.y0).collect();
    tops.dedup();
    assert_eq!(tops, [band.y0, band.y0 + lh, band.y0 + lh * 2]);
    for c in g.cells.iter().filter(|c| c.path.record == RecordRef::Data(row) && c.path.parts[0] != 3) {
        assert_eq!((c.rect.y0, c.rect.y1), (band.y0, band.y1), "{:?}", c.path);
    }
}

#[test]
fn buffer_transfer_matches_golden_file() {
    let mut from = load_table("tables/explication_7.json");
    let mut buf = GoodsBuffer::default();
    from.apply(TableOp::MarkRange { from: 0, to: 6 }, &mut buf).unwrap();
    from.apply(TableOp::ToBuffer, &mut buf).unwrap();
    let mut to = TableInstance::new(kind("specification"));
    to.apply(TableOp::FromBuffer, &mut buf).unwrap();
    assert_eq!(to, load_table("tables/specification_from_7.json"));
    for (a, b) in from.rows().iter().zip(to.rows()) {
        let (src, dst) = (from.field_map(a), to.field_map(b));
        for (f, v) in &src {
            let target = if f == "pozicija" { "marka_poz" } else { f.as_str() };
            if let Some(got) = dst.get(target) {
                assert_eq!(got, v, "{f}");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn undo_inverts_every_mutation(seed in any::<u64>(), assembly in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut t = if assembly { assembly_table(&mut rng, 4) } else { spec_table(&mut rng, 8) };
        random_marks(&mut rng, &mut t);
        let mut buf = GoodsBuffer { rows: (0..rng.random_range(0..3)).map(|_| spec_row(&mut rng)).collect() };
        for _ in 0..4 {
            let op = random_op(&mut rng, &t);
            prop_assert!(op.is_mutating());
            let before = t.clone();
            match t.apply(op.clone(), &mut buf) {
                Ok(()) => {
                    let after = t.clone();
                    t.undo().unwrap();
                    prop_assert_eq!(&t, &before, "{:?}", op);
                    t = after;
                }
                Err(_) => prop_assert_eq!(&t, &before, "failed {:?} changed the table", op),
            }
        }
    }

    #[test]
    fn merge_is_idempotent_and_sums(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut t = spec_table(&mut rng, 10);
        let total = qty_total(&t);
        let want = merge_oracle(grouped(&t));
        t.merge_identical("kolichestvo").unwrap();
        prop_assert_eq!(grouped(&t), want);
        prop_assert_eq!(qty_total(&t), total);
        let once = t.clone();
        t.merge_identical("kolichestvo").unwrap();
        prop_assert_eq!(t, once);
    }

    #[test]
    fn pages_keep_record_order(seed in any::<u64>(), lines in 2i64..20, right in any::<bool>(), mode in 0usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = spec_table(&mut rng, 15);
        let lh = t.kind().options.line_height;
        let direction = if right { Direction::Right } else { Direction::Left };
        let mode = [HeadMode::RepeatHeader, HeadMode::GraphNumbers, HeadMode::None][mode];
        let all = bands(&t);
        let body: Vec<BandKind> =
            all.iter().map(|b| b.kind).filter(|k| matches!(k, BandKind::Section(_) | BandKind::Data(_))).collect();
        let heights: Vec<Mm> = all.iter().filter(|b| body.contains(&b.kind)).map(|b| b.y1 - b.y0).collect();
        let header = all[0].y1 - all[0].y0;
        let numbers = if t.kind().options.graph_number_row || mode == HeadMode::GraphNumbers { lh } else { Mm::ZERO };
        let (first_head, next_head) = match mode {
            HeadMode::RepeatHeader => (header + numbers, header + numbers),
            HeadMode::GraphNumbers => (header + numbers, numbers),
            HeadMode::None => (header + numbers, Mm::ZERO),
        };
        let max = lh * lines;
        // every band fits on a fresh piece, and the first one under the full head
        let fits = heights.iter().all(|&h| h + next_head <= max) && first_head + heights.first().copied().unwrap_or(Mm::ZERO) <= max;
        match paginate(&t, max, direction, mode) {
            Ok(chunks) => {
                let joined: Vec<BandKind> = chunks.iter().flat_map(|c| c.body.clone()).collect();
                prop_assert_eq!(joined, body);
                prop_assert!(chunks.iter().all(|c| c.height <= max));
                prop_assert!(chunks.iter().skip(1).all(|c| !c.body.is_empty()));
            }
            Err(_) => prop_assert!(!fits, "refused although every band fits"),
        }
    }
}

#[test]
fn cell_at_agrees_with_layout_on_small_tables() {
    for seed in 0..150u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = if seed % 2 == 0 { assembly_table(&mut rng, 5) } else { spec_table(&mut rng, 5) };
        assert!(t.len() <= 5);
        check_cell_at(&t);
    }
}
