//! Geometry of a table: bands, cell rectangles and boundary segments.
//!
//! Table-local coordinates start at the top-left corner with y growing
//! downward.

use std::collections::BTreeMap;

use serde::Serialize;

use super::instance::{CellPath, Node, RecordRef, TableInstance};
use super::kind::{Axis, Block, Parts, Visibility};
use super::TableError;
use crate::drawing::LineType;
use crate::geom::{Mm, Point, Rect};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BandKind {
    Header,
    GraphNumbers,
    Section(usize),
    Data(usize),
}

impl BandKind {
    pub fn record_ref(self) -> RecordRef {
        match self {
            BandKind::Header => RecordRef::Header,
            BandKind::GraphNumbers => RecordRef::GraphNumbers,
            BandKind::Section(i) => RecordRef::Section(i),
            BandKind::Data(i) => RecordRef::Data(i),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Band {
    pub kind: BandKind,
    pub y0: Mm,
    pub y1: Mm,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CellRect {
    pub path: CellPath,
    pub rect: Rect,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Segment {
    pub from: Point,
    pub to: Point,
    pub line_type: LineType,
}

impl Segment {
    pub fn is_horizontal(&self) -> bool {
        self.from.y == self.to.y
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Grid {
    pub width: Mm,
    pub height: Mm,
    /// Distinct x boundaries of the leaf columns, from 0 to the width.
    pub columns: Vec<Mm>,
    pub bands: Vec<Band>,
    pub cells: Vec<CellRect>,
    pub segments: Vec<Segment>,
}

/// Natural height of a content node: leaves take one line height per text
/// line (at least one), side-by-side parts the tallest, stacked parts the sum.
pub(crate) fn node_height(block: &Block, node: &Node, lh: Mm) -> Mm {
    match (block, node) {
        (Block::Leaf(_), Node::Cell(c)) => lh * c.lines.len().max(1) as i64,
        (Block::Split(s), Node::Parts(ps)) => {
            let hs = ps.iter().enumerate().map(|(i, p)| node_height(part_block(&s.parts, i), p, lh));
            match s.axis {
                Axis::Horizontal => hs.fold(Mm::ZERO, Mm::max),
                Axis::Vertical => hs.sum(),
            }
        }
        _ => lh,
    }
}

pub(crate) fn part_block(parts: &Parts, i: usize) -> &Block {
    match parts {
        Parts::Fixed(bs) => &bs[i],
        Parts::Arbitrary(b) => b,
    }
}

/// Rectangles of the parts of a split placed in `rect`. Stacked parts take
/// their natural heights and the last one absorbs any extra height.
pub(crate) fn part_rects(block: &Block, node: &Node, rect: Rect, lh: Mm) -> Vec<Rect> {
    let (Block::Split(s), Node::Parts(ps)) = (block, node) else { return Vec::new() };
    let mut out = Vec::with_capacity(ps.len());
    match s.axis {
        Axis::Horizontal => {
            let mut x = rect.x0;
            for i in 0..ps.len() {
                let w = part_block(&s.parts, i).width();
                out.push(Rect::new(x, rect.y0, x + w, rect.y1));
                x += w;
            }
        }
        Axis::Vertical => {
            let mut y = rect.y0;
            for (i, p) in ps.iter().enumerate() {
                let h = if i + 1 == ps.len() { rect.y1 - y } else { node_height(part_block(&s.parts, i), p, lh) };
                out.push(Rect::new(rect.x0, y, rect.x1, y + h));
                y += h;
            }
        }
    }
    out
}

#[derive(Clone, Copy)]
struct RawSeg {
    horizontal: bool,
    at: Mm,
    a: Mm,
    b: Mm,
    line_type: LineType,
    priority: u8,
}

struct Builder<'a> {
    lh: Mm,
    cells: Vec<CellRect>,
    segs: Vec<RawSeg>,
    visible: &'a dyn Fn(&Visibility) -> bool,
}

impl Builder<'_> {
    fn edge(&mut self, horizontal: bool, at: Mm, a: Mm, b: Mm, line_type: LineType, priority: u8) {
        if a < b {
            self.segs.push(RawSeg { horizontal, at, a, b, line_type, priority });
        }
    }

    fn outline(&mut self, r: Rect, line_type: LineType, priority: u8) {
        self.edge(true, r.y0, r.x0, r.x1, line_type, priority);
        self.edge(true, r.y1, r.x0, r.x1, line_type, priority);
        self.edge(false, r.x0, r.y0, r.y1, line_type, priority);
        self.edge(false, r.x1, r.y0, r.y1, line_type, priority);
    }

    fn place(&mut self, block: &Block, node: &Node, rect: Rect, path: &mut CellPath) {
        match (block, node) {
            (Block::Leaf(_), Node::Cell(c)) => {
                if let Some(lt) = c.style.line_type {
                    self.outline(rect, lt, 1);
                }
                self.cells.push(CellRect { path: path.clone(), rect });
            }
            (Block::Split(s), Node::Parts(ps)) => {
                let rects = part_rects(block, node, rect, self.lh);
                let show = (self.visible)(&s.visibility);
                for (i, (p, r)) in ps.iter().zip(&rects).enumerate() {
                    if show && i > 0 {
                        match s.axis {
                            Axis::Horizontal => self.edge(false, r.x0, r.y0, r.y1, LineType::Solid, 0),
                            Axis::Vertical => self.edge(true, r.y0, r.x0, r.x1, LineType::Solid, 0),
                        }
                    }
                    path.parts.push(i);
                    self.place(part_block(&s.parts, i), p, *r, path);
                    path.parts.pop();
                }
            }
            _ => {}
        }
    }
}

/// Leaf x boundaries of a kind, independent of any record content.
pub fn column_bounds(block: &Block) -> Vec<Mm> {
    fn walk(b: &Block, x: Mm, out: &mut Vec<Mm>) {
        match b {
            Block::Leaf(l) => {
                out.push(x);
                out.push(x + l.width);
            }
            Block::Split(s) => {
                let mut x = x;
                match &s.parts {
                    Parts::Arbitrary(p) => walk(p, x, out),
                    Parts::Fixed(ps) => {
                        for p in ps {
                            walk(p, x, out);
                            if s.axis == Axis::Horizontal {
                                x += p.width();
                            }
                        }
                    }
                }
            }
        }
    }
    let mut out = Vec::new();
    walk(block, Mm::ZERO, &mut out);
    out.sort();
    out.dedup();
    out
}

/// Bands in display order: header, graph-number row (if enabled), then
/// sections and data records interleaved.
pub fn bands(t: &TableInstance) -> Vec<Band> {
    let lh = t.kind().options.line_height;
    let block = &t.kind().block;
    let mut out = Vec::with_capacity(t.len() + t.sections().len() + 2);
    let mut y = Mm::ZERO;
    let mut push = |kind: BandKind, h: Mm, out: &mut Vec<Band>| {
        out.push(Band { kind, y0: y, y1: y + h });
        y += h;
    };
    push(BandKind::Header, node_height(block, t.header(), lh), &mut out);
    if t.kind().options.graph_number_row {
        push(BandKind::GraphNumbers, lh, &mut out);
    }
    let mut s = 0;
    for (r, row) in t.rows().iter().enumerate() {
        while s < t.sections().len() && t.sections()[s].start == r {
            push(BandKind::Section(s), lh, &mut out);
            s += 1;
        }
        push(BandKind::Data(r), node_height(block, row, lh), &mut out);
    }
    while s < t.sections().len() {
        push(BandKind::Section(s), lh, &mut out);
        s += 1;
    }
    out
}

pub fn layout(t: &TableInstance) -> Grid {
    let block = &t.kind().block;
    let width = block.width();
    let columns = column_bounds(block);
    let bands = bands(t);
    let header_vis = |v: &Visibility| v.in_header;
    let data_vis = |v: &Visibility| v.in_data;
    let mut b = Builder { lh: t.kind().options.line_height, cells: Vec::new(), segs: Vec::new(), visible: &header_vis };
    for band in &bands {
        let rect = Rect::new(Mm::ZERO, band.y0, width, band.y1);
        b.outline(rect, LineType::Solid, 0);
        let mut path = CellPath { record: band.kind.record_ref(), parts: Vec::new() };
        match band.kind {
            BandKind::Header => {
                b.visible = &header_vis;
                b.place(block, t.header(), rect, &mut path);
            }
            BandKind::Data(r) => {
                b.visible = &data_vis;
                b.place(block, &t.rows()[r], rect, &mut path);
            }
            BandKind::Section(_) => b.cells.push(CellRect { path, rect }),
            BandKind::GraphNumbers => {
                for (k, w) in columns.windows(2).enumerate() {
                    if k > 0 {
                        b.edge(false, w[0], band.y0, band.y1, LineType::Solid, 0);
                    }
                    let path = CellPath { record: RecordRef::GraphNumbers, parts: vec![k] };
                    b.cells.push(CellRect { path, rect: Rect::new(w[0], band.y0, w[1], band.y1) });
                }
            }
        }
    }
    let height = bands.last().map(|b| b.y1).unwrap_or(Mm::ZERO);
    let segments = merge_segments(&b.segs);
    Grid { width, height, columns, bands, cells: b.cells, segments }
}

/// Merges collinear pieces. Where pieces overlap, the highest priority wins
/// (cell border styles over grid lines), later pieces over earlier ones.
fn merge_segments(raw: &[RawSeg]) -> Vec<Segment> {
    let mut groups: BTreeMap<(bool, Mm), Vec<usize>> = BTreeMap::new();
    for (i, s) in raw.iter().enumerate() {
        groups.entry((!s.horizontal, s.at)).or_default().push(i);
    }
    let mut out = Vec::new();
    for ((vertical, at), idx) in groups {
        let mut events: Vec<(Mm, bool, usize)> = Vec::with_capacity(idx.len() * 2);
        for &i in &idx {
            events.push((raw[i].a, true, i));
            events.push((raw[i].b, false, i));
        }
        events.sort_by_key(|e| e.0);
        let mut active: BTreeMap<(u8, usize), LineType> = BTreeMap::new();
        let mut pieces: Vec<(Mm, Mm, LineType)> = Vec::new();
        let mut k = 0;
        while k < events.len() {
            let pos = events[k].0;
            while k < events.len() && events[k].0 == pos {
                let (_, start, i) = events[k];
                if start {
                    active.insert((raw[i].priority, i), raw[i].line_type);
                } else {
                    active.remove(&(raw[i].priority, i));
                }
                k += 1;
            }
            let Some((_, &lt)) = active.last_key_value() else { continue };
            let Some(next) = events.get(k).map(|e| e.0) else { continue };
            match pieces.last_mut() {
                Some(last) if last.1 == pos && last.2 == lt => last.1 = next,
                _ => pieces.push((pos, next, lt)),
            }
        }
        for (a, b, line_type) in pieces {
            let (from, to) =
                if vertical { (Point::new(at, a), Point::new(at, b)) } else { (Point::new(a, at), Point::new(b, at)) };
            out.push(Segment { from, to, line_type });
        }
    }
    out
}

/// The cell containing `p`, found by descending the block tree with the
/// same height rules as [`layout`].
pub fn cell_at(t: &TableInstance, p: Point) -> Result<CellPath, TableError> {
    let width = t.kind().width();
    if p.x < Mm::ZERO || p.x >= width || p.y < Mm::ZERO {
        return Err(TableError::OutsideTable(p));
    }
    let band = bands(t).into_iter().find(|b| p.y >= b.y0 && p.y < b.y1).ok_or(TableError::OutsideTable(p))?;
    let rect = Rect::new(Mm::ZERO, band.y0, width, band.y1);
    let record = band.kind.record_ref();
    let node = match band.kind {
        BandKind::Section(_) => return Ok(CellPath { record, parts: Vec::new() }),
        BandKind::GraphNumbers => {
            let cols = column_bounds(&t.kind().block);
            let k = cols.windows(2).position(|w| p.x >= w[0] && p.x < w[1]).ok_or(TableError::OutsideTable(p))?;
            return Ok(CellPath { record, parts: vec![k] });
        }
        BandKind::Header => t.header(),
        BandKind::Data(r) => &t.rows()[r],
    };
    let lh = t.kind().options.line_height;
    let mut parts = Vec::new();
    let (mut block, mut node, mut rect) = (&t.kind().block, node, rect);
    while let (Block::Split(s), Node::Parts(ps)) = (block, node) {
        let rects = part_rects(block, node, rect, lh);
        let i = rects.iter().position(|r| r.contains(p)).ok_or(TableError::OutsideTable(p))?;
        parts.push(i);
        block = part_block(&s.parts, i);
        node = &ps[i];
        rect = rects[i];
    }
    Ok(CellPath { record, parts })
}
