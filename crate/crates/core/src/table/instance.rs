//! Table instances: a header record plus data records whose content trees
//! mirror the kind's block tree.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fs;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::kind::{Block, Parts, RawKind, TableKind};
use super::TableError;
use crate::drawing::LineType;
use crate::geom::Mm;

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellStyle {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub font_height: Option<Mm>,
    /// Border line type of this cell, drawn over the grid lines.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub line_type: Option<LineType>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub color: Option<u8>,
}

impl CellStyle {
    fn is_default(&self) -> bool {
        *self == CellStyle::default()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Cell {
    #[serde(default)]
    pub lines: Vec<String>,
    #[serde(default, skip_serializing_if = "CellStyle::is_default")]
    pub style: CellStyle,
}

impl Cell {
    pub fn text(&self) -> String {
        self.lines.join("\n")
    }

    pub fn set_text(&mut self, text: &str) {
        self.lines = if text.is_empty() { Vec::new() } else { text.split('\n').map(str::to_string).collect() };
    }

    pub fn is_empty(&self) -> bool {
        self.lines.iter().all(|l| l.is_empty())
    }
}

/// Content tree of one record. A JSON array stands for split parts.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Node {
    Cell(Cell),
    Parts(Vec<Node>),
}

pub type Record = Node;

impl Node {
    pub(crate) fn visit_cells<'a>(&'a self, block: &'a Block, f: &mut impl FnMut(&'a str, &'a Cell)) {
        match (block, self) {
            (Block::Leaf(l), Node::Cell(c)) => f(&l.field, c),
            (Block::Split(s), Node::Parts(ps)) => {
                for (i, p) in ps.iter().enumerate() {
                    let b = match &s.parts {
                        Parts::Fixed(bs) => &bs[i],
                        Parts::Arbitrary(b) => b,
                    };
                    p.visit_cells(b, f);
                }
            }
            _ => {}
        }
    }

    pub(crate) fn visit_cells_mut(&mut self, block: &Block, f: &mut impl FnMut(&str, &mut Cell)) {
        match (block, self) {
            (Block::Leaf(l), Node::Cell(c)) => f(&l.field, c),
            (Block::Split(s), Node::Parts(ps)) => {
                for (i, p) in ps.iter_mut().enumerate() {
                    let b = match &s.parts {
                        Parts::Fixed(bs) => &bs[i],
                        Parts::Arbitrary(b) => b,
                    };
                    p.visit_cells_mut(b, f);
                }
            }
            _ => {}
        }
    }
}

impl Block {
    /// A record with empty cells and one part per arbitrary block.
    pub fn empty_node(&self) -> Node {
        match self {
            Block::Leaf(_) => Node::Cell(Cell::default()),
            Block::Split(s) => match &s.parts {
                Parts::Fixed(ps) => Node::Parts(ps.iter().map(Block::empty_node).collect()),
                Parts::Arbitrary(p) => Node::Parts(vec![p.empty_node()]),
            },
        }
    }

    fn header_node(&self, kind: &TableKind) -> Node {
        match self {
            Block::Leaf(l) => Node::Cell(Cell {
                lines: kind.title_of(l).split('\n').map(str::to_string).collect(),
                style: CellStyle::default(),
            }),
            Block::Split(s) => match &s.parts {
                Parts::Fixed(ps) => Node::Parts(ps.iter().map(|p| p.header_node(kind)).collect()),
                Parts::Arbitrary(p) => Node::Parts(vec![p.header_node(kind)]),
            },
        }
    }

    pub(crate) fn check_node(&self, node: &Node) -> Result<(), String> {
        match (self, node) {
            (Block::Leaf(_), Node::Cell(_)) => Ok(()),
            (Block::Leaf(l), Node::Parts(_)) => Err(format!("expected a cell for field {:?}", l.field)),
            (Block::Split(_), Node::Cell(_)) => Err(format!("expected parts for block {}", self.label())),
            (Block::Split(s), Node::Parts(ps)) => match &s.parts {
                Parts::Fixed(bs) => {
                    if bs.len() != ps.len() {
                        return Err(format!("block {} has {} parts, record has {}", self.label(), bs.len(), ps.len()));
                    }
                    bs.iter().zip(ps).try_for_each(|(b, p)| b.check_node(p))
                }
                Parts::Arbitrary(b) => {
                    if ps.is_empty() {
                        return Err(format!("arbitrary block {} needs at least one part", self.label()));
                    }
                    ps.iter().try_for_each(|p| b.check_node(p))
                }
            },
        }
    }

    /// Builds a record following a template: named arbitrary blocks get the
    /// given number of parts.
    pub(crate) fn template_node(&self, counts: &BTreeMap<String, usize>) -> Node {
        match self {
            Block::Leaf(_) => Node::Cell(Cell::default()),
            Block::Split(s) => match &s.parts {
                Parts::Fixed(ps) => Node::Parts(ps.iter().map(|p| p.template_node(counts)).collect()),
                Parts::Arbitrary(p) => {
                    let n = s.name.as_ref().and_then(|n| counts.get(n)).copied().unwrap_or(1).max(1);
                    Node::Parts((0..n).map(|_| p.template_node(counts)).collect())
                }
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Section {
    /// Index of the first data record of the section.
    pub start: usize,
    pub title: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecordRef {
    Header,
    GraphNumbers,
    Section(usize),
    Data(usize),
}

/// Address of a cell: the record, then one part index per split on the way
/// down the block tree.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CellPath {
    pub record: RecordRef,
    #[serde(default)]
    pub parts: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Snapshot {
    kind: Arc<TableKind>,
    header: Record,
    rows: Vec<Record>,
    sections: Vec<Section>,
    marks: BTreeSet<usize>,
}

#[derive(Debug, Clone)]
pub struct TableInstance {
    pub(crate) kind: Arc<TableKind>,
    pub(crate) header: Record,
    pub(crate) rows: Vec<Record>,
    pub(crate) sections: Vec<Section>,
    pub(crate) marks: BTreeSet<usize>,
    journal: VecDeque<Snapshot>,
}

/// Structural equality; the undo journal is not compared.
impl PartialEq for TableInstance {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
            && self.header == other.header
            && self.rows == other.rows
            && self.sections == other.sections
            && self.marks == other.marks
    }
}

impl TableInstance {
    /// A header-only table of `kind`.
    pub fn new(kind: TableKind) -> Self {
        let kind = Arc::new(kind);
        let header = kind.block.header_node(&kind);
        TableInstance { kind, header, rows: Vec::new(), sections: Vec::new(), marks: BTreeSet::new(), journal: VecDeque::new() }
    }

    pub fn kind(&self) -> &TableKind {
        &self.kind
    }

    pub fn header(&self) -> &Record {
        &self.header
    }

    pub fn rows(&self) -> &[Record] {
        &self.rows
    }

    pub fn sections(&self) -> &[Section] {
        &self.sections
    }

    pub fn marks(&self) -> &BTreeSet<usize> {
        &self.marks
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn journal_len(&self) -> usize {
        self.journal.len()
    }

    pub(crate) fn snapshot(&self) -> Snapshot {
        Snapshot {
            kind: self.kind.clone(),
            header: self.header.clone(),
            rows: self.rows.clone(),
            sections: self.sections.clone(),
            marks: self.marks.clone(),
        }
    }

    /// Records the current state before a mutating action.
    pub(crate) fn checkpoint(&mut self) {
        let depth = self.kind.options.journal_depth.max(1);
        let snap = self.snapshot();
        self.journal.push_back(snap);
        while self.journal.len() > depth {
            self.journal.pop_front();
        }
    }

    pub fn undo(&mut self) -> Result<(), TableError> {
        let s = self.journal.pop_back().ok_or(TableError::NothingToUndo)?;
        self.kind = s.kind;
        self.header = s.header;
        self.rows = s.rows;
        self.sections = s.sections;
        self.marks = s.marks;
        Ok(())
    }

    pub(crate) fn clear_journal(&mut self) {
        self.journal.clear();
    }

    pub fn record(&self, r: RecordRef) -> Option<&Record> {
        match r {
            RecordRef::Header => Some(&self.header),
            RecordRef::Data(i) => self.rows.get(i),
            RecordRef::Section(_) | RecordRef::GraphNumbers => None,
        }
    }

    fn record_mut(&mut self, r: RecordRef) -> Option<&mut Record> {
        match r {
            RecordRef::Header => Some(&mut self.header),
            RecordRef::Data(i) => self.rows.get_mut(i),
            RecordRef::Section(_) | RecordRef::GraphNumbers => None,
        }
    }

    /// The cell at `path`, if the path addresses a leaf of a record.
    pub fn cell(&self, path: &CellPath) -> Option<&Cell> {
        let mut node = self.record(path.record)?;
        for &i in &path.parts {
            match node {
                Node::Parts(ps) => node = ps.get(i)?,
                Node::Cell(_) => return None,
            }
        }
        match node {
            Node::Cell(c) => Some(c),
            Node::Parts(_) => None,
        }
    }

    pub(crate) fn cell_mut(&mut self, path: &CellPath) -> Option<&mut Cell> {
        let mut node = self.record_mut(path.record)?;
        for &i in &path.parts {
            match node {
                Node::Parts(ps) => node = ps.get_mut(i)?,
                Node::Cell(_) => return None,
            }
        }
        match node {
            Node::Cell(c) => Some(c),
            Node::Parts(_) => None,
        }
    }

    /// Field id of the leaf addressed by `path`.
    pub fn field_at(&self, path: &CellPath) -> Option<&str> {
        let mut block = &self.kind.block;
        for &i in &path.parts {
            match block {
                Block::Split(s) => {
                    block = match &s.parts {
                        Parts::Fixed(ps) => ps.get(i)?,
                        Parts::Arbitrary(p) => p,
                    }
                }
                Block::Leaf(_) => return None,
            }
        }
        match block {
            Block::Leaf(l) => Some(&l.field),
            Block::Split(_) => None,
        }
    }

    pub fn set_cell_text(&mut self, path: &CellPath, lines: Vec<String>) -> Result<(), TableError> {
        if self.cell(path).is_none() {
            return Err(TableError::UnknownCell(path.clone()));
        }
        self.checkpoint();
        self.cell_mut(path).expect("checked above").lines = lines;
        Ok(())
    }

    pub fn set_cell_style(&mut self, path: &CellPath, style: CellStyle) -> Result<(), TableError> {
        if self.cell(path).is_none() {
            return Err(TableError::UnknownCell(path.clone()));
        }
        self.checkpoint();
        self.cell_mut(path).expect("checked above").style = style;
        Ok(())
    }

    /// Text of the first occurrence of `field` in a record.
    pub fn field_text(&self, row: &Record, field: &str) -> Option<String> {
        let mut out = None;
        row.visit_cells(&self.kind.block, &mut |f, c| {
            if out.is_none() && f == field {
                out = Some(c.text());
            }
        });
        out
    }

    /// Field id → text for every leaf of a record; repeated fields are joined by newlines.
    pub fn field_map(&self, row: &Record) -> BTreeMap<String, String> {
        let mut out: BTreeMap<String, Vec<String>> = BTreeMap::new();
        row.visit_cells(&self.kind.block, &mut |f, c| out.entry(f.to_string()).or_default().push(c.text()));
        out.into_iter().map(|(k, v)| (k, v.join("\n"))).collect()
    }

    /// Number of parts of every named arbitrary block in a data record.
    pub fn arbitrary_counts(&self, row: usize) -> BTreeMap<String, usize> {
        fn walk(block: &Block, node: &Node, out: &mut BTreeMap<String, usize>) {
            if let (Block::Split(s), Node::Parts(ps)) = (block, node) {
                match &s.parts {
                    Parts::Fixed(bs) => bs.iter().zip(ps).for_each(|(b, p)| walk(b, p, out)),
                    Parts::Arbitrary(b) => {
                        if let Some(n) = &s.name {
                            *out.entry(n.clone()).or_default() += ps.len();
                        }
                        ps.iter().for_each(|p| walk(b, p, out));
                    }
                }
            }
        }
        let mut out = BTreeMap::new();
        if let Some(r) = self.rows.get(row) {
            walk(&self.kind.block, r, &mut out);
        }
        out
    }

    /// Scales all column widths by `factor`.
    pub fn stretch(&mut self, factor: f64) -> Result<(), TableError> {
        if !factor.is_finite() || factor <= 0.0 {
            return Err(TableError::BadFactor(factor));
        }
        let width = Mm::from_f64(self.kind.width().as_f64() * factor);
        let block = self.kind.block.rescaled(width);
        if block.leaves().iter().any(|l| l.width <= Mm::ZERO) {
            return Err(TableError::BadFactor(factor));
        }
        self.checkpoint();
        Arc::make_mut(&mut self.kind).block = block;
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("tables serialize");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, TableError> {
        serde_json::from_str(text).map_err(|e| TableError::Parse { path: String::new(), message: e.to_string() })
    }
}

#[derive(Serialize, Deserialize)]
struct RawInstance {
    #[serde(flatten)]
    kind: RawKind,
    records: Vec<Record>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    sections: Vec<Section>,
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    marks: BTreeSet<usize>,
}

impl Serialize for TableInstance {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut records = Vec::with_capacity(self.rows.len() + 1);
        records.push(self.header.clone());
        records.extend(self.rows.iter().cloned());
        RawInstance {
            kind: RawKind::from((*self.kind).clone()),
            records,
            sections: self.sections.clone(),
            marks: self.marks.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for TableInstance {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let raw = RawInstance::deserialize(d)?;
        let kind = TableKind::try_from(raw.kind).map_err(D::Error::custom)?;
        let mut records = raw.records.into_iter();
        let header = records.next().ok_or_else(|| D::Error::custom("records must start with the header record"))?;
        let rows: Vec<Record> = records.collect();
        kind.block.check_node(&header).map_err(|m| D::Error::custom(format!("record 0: {m}")))?;
        for (i, r) in rows.iter().enumerate() {
            kind.block.check_node(r).map_err(|m| D::Error::custom(format!("record {}: {m}", i + 1)))?;
        }
        if raw.sections.iter().any(|s| s.start > rows.len()) || raw.sections.windows(2).any(|w| w[0].start > w[1].start) {
            return Err(D::Error::custom("sections must be ordered and within the records"));
        }
        if raw.marks.iter().any(|&m| m >= rows.len()) {
            return Err(D::Error::custom("mark beyond the records"));
        }
        Ok(TableInstance {
            kind: Arc::new(kind),
            header,
            rows,
            sections: raw.sections,
            marks: raw.marks,
            journal: VecDeque::new(),
        })
    }
}

/// Writes the full parameter set (kind plus records) for later reuse.
pub fn save_prototype(table: &TableInstance, path: &Path) -> Result<(), TableError> {
    fs::write(path, table.to_json()).map_err(|source| TableError::Io { path: path.display().to_string(), source })
}

pub fn load_prototype(path: &Path) -> Result<TableInstance, TableError> {
    let shown = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|source| TableError::Io { path: shown.clone(), source })?;
    TableInstance::from_json(&text).map_err(|e| e.with_path(&shown))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kind() -> TableKind {
        TableKind::from_json(
            r#"{"schema":"specforge-kind/1","name":"t","class":"specification","block":
            {"split":"horizontal","parts":[{"field":"pozicija","width":15,"title":"Поз."},
            {"split":"vertical","name":"items","arbitrary":{"field":"naimenovanie","width":60}}]}}"#,
        )
        .unwrap()
    }

    #[test]
    fn header_holds_titles() {
        let t = TableInstance::new(kind());
        let p = CellPath { record: RecordRef::Header, parts: vec![0] };
        assert_eq!(t.cell(&p).unwrap().lines, ["Поз."]);
        assert_eq!(t.field_at(&CellPath { record: RecordRef::Header, parts: vec![1, 0] }), Some("naimenovanie"));
    }

    #[test]
    fn json_round_trip_and_validation() {
        let mut t = TableInstance::new(kind());
        t.rows.push(t.kind.block.empty_node());
        t.set_cell_text(&CellPath { record: RecordRef::Data(0), parts: vec![0] }, vec!["1".into()]).unwrap();
        let back = TableInstance::from_json(&t.to_json()).unwrap();
        assert_eq!(back, t);
        let bad = t.to_json().replace(r#""records": ["#, r#""records": [{"lines":[]},"#);
        assert!(TableInstance::from_json(&bad).is_err());
    }

    #[test]
    fn prototype_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("proto.json");
        let t = TableInstance::new(kind());
        save_prototype(&t, &p).unwrap();
        let mut a = load_prototype(&p).unwrap();
        let b = load_prototype(&p).unwrap();
        assert_eq!(a, t);
        a.rows.push(a.kind.block.empty_node());
        assert_ne!(a, b);
        fs::write(&p, "{ nope").unwrap();
        assert!(matches!(load_prototype(&p), Err(TableError::Parse { .. })));
    }

    #[test]
    fn stretch_and_undo() {
        let mut t = TableInstance::new(kind());
        let before = t.clone();
        t.stretch(2.0).unwrap();
        assert_eq!(t.kind().width(), Mm::whole(150));
        t.undo().unwrap();
        assert_eq!(t, before);
        assert!(t.stretch(0.0).is_err());
    }
}
