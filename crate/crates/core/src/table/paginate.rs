//! Splitting a long table into pieces of limited height placed side by side.

use serde::{Deserialize, Serialize};

use super::instance::TableInstance;
use super::layout::{bands, BandKind};
use super::TableError;
use crate::geom::Mm;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Left,
    Right,
}

/// What continuation pieces carry on top.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HeadMode {
    RepeatHeader,
    GraphNumbers,
    None,
}

/// Gap between neighbouring pieces.
pub const CHUNK_GAP: Mm = Mm::from_thousandths(10_000);

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Chunk {
    /// Head rows of this piece, top to bottom.
    pub head: Vec<BandKind>,
    /// Section and data bands of this piece, in table order.
    pub body: Vec<BandKind>,
    pub height: Mm,
    /// Horizontal offset of the piece relative to the first one.
    pub x_offset: Mm,
}

/// Partitions the table into pieces no taller than `max_height`. The first
/// piece always starts with the header (and the graph-number row when the
/// kind has one); later pieces carry the head chosen by `mode`. In
/// graph-numbers mode every piece has the number row.
pub fn paginate(t: &TableInstance, max_height: Mm, direction: Direction, mode: HeadMode) -> Result<Vec<Chunk>, TableError> {
    let all = bands(t);
    let height_of = |k: BandKind| all.iter().find(|b| b.kind == k).map(|b| b.y1 - b.y0).unwrap_or(Mm::ZERO);
    let header_h = height_of(BandKind::Header);
    let numbers_h = t.kind().options.line_height;
    let with_numbers = t.kind().options.graph_number_row || mode == HeadMode::GraphNumbers;

    let mut first_head = vec![BandKind::Header];
    if with_numbers {
        first_head.push(BandKind::GraphNumbers);
    }
    let next_head = match mode {
        HeadMode::RepeatHeader => first_head.clone(),
        HeadMode::GraphNumbers => vec![BandKind::GraphNumbers],
        HeadMode::None => Vec::new(),
    };
    let head_height =
        |h: &[BandKind]| -> Mm { h.iter().map(|k| if *k == BandKind::Header { header_h } else { numbers_h }).sum() };

    let body: Vec<(BandKind, Mm)> = all
        .iter()
        .filter(|b| matches!(b.kind, BandKind::Section(_) | BandKind::Data(_)))
        .map(|b| (b.kind, b.y1 - b.y0))
        .collect();

    let step = t.kind().width() + CHUNK_GAP;
    let offset = |k: usize| match direction {
        Direction::Right => step * k as i64,
        Direction::Left => -(step * k as i64),
    };
    let mut chunks = Vec::new();
    let mut head = first_head;
    let mut height = head_height(&head);
    let mut items = Vec::new();
    for (kind, h) in body {
        if height + h > max_height {
            if items.is_empty() {
                return Err(TableError::TooSmall { needed: height + h, max: max_height });
            }
            let k = chunks.len();
            chunks.push(Chunk { head, body: std::mem::take(&mut items), height, x_offset: offset(k) });
            head = next_head.clone();
            height = head_height(&head);
            if height + h > max_height {
                return Err(TableError::TooSmall { needed: height + h, max: max_height });
            }
        }
        items.push(kind);
        height += h;
    }
    if height > max_height {
        return Err(TableError::TooSmall { needed: height, max: max_height });
    }
    let k = chunks.len();
    chunks.push(Chunk { head, body: items, height, x_offset: offset(k) });
    Ok(chunks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::table::TableKind;

    fn table(n: usize) -> TableInstance {
        let k = TableKind::from_json(
            r#"{"schema":"specforge-kind/1","name":"t","class":"specification","options":{"line_height":8},"block":{"split":"horizontal","parts":[{"field":"a","width":10},{"field":"b","width":20}]}}"#,
        )
        .unwrap();
        let mut t = TableInstance::new(k);
        for _ in 0..n {
            t.rows.push(t.kind.block.empty_node());
        }
        t
    }

    #[test]
    fn twelve_rows_by_five() {
        let t = table(12);
        let c = paginate(&t, Mm::whole(48), Direction::Right, HeadMode::RepeatHeader).unwrap();
        let sizes: Vec<usize> = c.iter().map(|c| c.body.len()).collect();
        assert_eq!(sizes, [5, 5, 2]);
        assert_eq!(c[1].x_offset, Mm::whole(40));
        let left = paginate(&t, Mm::whole(48), Direction::Left, HeadMode::RepeatHeader).unwrap();
        assert_eq!(left[2].x_offset, Mm::whole(-80));
    }

    #[test]
    fn everything_fits() {
        let t = table(3);
        assert_eq!(paginate(&t, Mm::whole(100), Direction::Right, HeadMode::None).unwrap().len(), 1);
    }

    #[test]
    fn graph_numbers_head() {
        let t = table(6);
        let c = paginate(&t, Mm::whole(40), Direction::Right, HeadMode::GraphNumbers).unwrap();
        assert_eq!(c[0].head, [BandKind::Header, BandKind::GraphNumbers]);
        assert!(c[1..].iter().all(|c| c.head == [BandKind::GraphNumbers]));
    }

    #[test]
    fn too_small() {
        let t = table(2);
        assert!(matches!(
            paginate(&t, Mm::whole(12), Direction::Right, HeadMode::RepeatHeader),
            Err(TableError::TooSmall { .. })
        ));
    }
}
