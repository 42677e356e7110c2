//! Editing operations on table instances. Every mutating operation records
//! an undo checkpoint first.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::instance::{CellPath, Node, Record, RecordRef, Section, TableInstance};
use super::kind::{Block, Parts};
use super::layout::{cell_at, part_block};
use super::TableError;
use crate::collation;
use crate::geom::Point;
use crate::po::SpecField;
use crate::quantity::leading_number;

/// Rows carried between tables, keyed by field id. Only non-empty fields are kept.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GoodsBuffer {
    pub rows: Vec<BTreeMap<String, String>>,
}

impl GoodsBuffer {
    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// Field ids treated as the same column when transferring rows.
const TRANSFER_ALIASES: [(&str, &str); 1] = [("pozicija", "marka_poz")];

fn alias_of(field: &str) -> Option<&'static str> {
    TRANSFER_ALIASES.iter().find_map(|&(a, b)| {
        if a == field {
            Some(b)
        } else if b == field {
            Some(a)
        } else {
            None
        }
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum TableOp {
    MarkRow {
        row: usize,
    },
    /// Marks rows `from..=to`.
    MarkRange {
        from: usize,
        to: usize,
    },
    Unmark,
    /// Inserts copies of the marked rows before row `to` (or at the end).
    Copy {
        to: usize,
    },
    /// Moves the marked rows before row `to` (or to the end).
    Move {
        to: usize,
    },
    Delete,
    Clear,
    ToBuffer,
    FromBuffer,
    Undo,
    InsertPartAt {
        point: Point,
    },
    InsertTemplate {
        name: String,
        at: Option<usize>,
    },
    AddSection {
        title: String,
        at: usize,
    },
    MergeIdentical {
        field: String,
    },
    OrderRows {
        fields: Vec<String>,
    },
    ExtractCommonNames {
        field: String,
        min_group: Option<usize>,
    },
    SetCell {
        path: CellPath,
        lines: Vec<String>,
    },
    Stretch {
        factor: f64,
    },
}

impl TableOp {
    pub fn is_mutating(&self) -> bool {
        !matches!(self, TableOp::MarkRow { .. } | TableOp::MarkRange { .. } | TableOp::Unmark | TableOp::ToBuffer)
    }
}

#[derive(Clone)]
enum Item {
    Section(String),
    Row(Record, bool),
}

impl TableInstance {
    fn items(&self) -> Vec<Item> {
        let mut out = Vec::with_capacity(self.rows.len() + self.sections.len());
        let mut s = 0;
        for (r, row) in self.rows.iter().enumerate() {
            while s < self.sections.len() && self.sections[s].start == r {
                out.push(Item::Section(self.sections[s].title.clone()));
                s += 1;
            }
            out.push(Item::Row(row.clone(), self.marks.contains(&r)));
        }
        for sec in &self.sections[s..] {
            out.push(Item::Section(sec.title.clone()));
        }
        out
    }

    fn set_items(&mut self, items: Vec<Item>) {
        self.rows.clear();
        self.sections.clear();
        self.marks.clear();
        for it in items {
            match it {
                Item::Section(title) => self.sections.push(Section { start: self.rows.len(), title }),
                Item::Row(r, marked) => {
                    if marked {
                        self.marks.insert(self.rows.len());
                    }
                    self.rows.push(r);
                }
            }
        }
    }

    /// Item index where rows inserted "before row `to`" go.
    fn insertion_point(items: &[Item], to: usize) -> usize {
        let mut r = 0;
        for (i, it) in items.iter().enumerate() {
            if let Item::Row(..) = it {
                if r == to {
                    return i;
                }
                r += 1;
            }
        }
        items.len()
    }

    fn check_row(&self, row: usize) -> Result<(), TableError> {
        if row < self.rows.len() {
            Ok(())
        } else {
            Err(TableError::RowOutOfRange { index: row, len: self.rows.len() })
        }
    }

    fn check_insert(&self, at: usize) -> Result<(), TableError> {
        if at <= self.rows.len() {
            Ok(())
        } else {
            Err(TableError::RowOutOfRange { index: at, len: self.rows.len() })
        }
    }

    fn require_marks(&self) -> Result<(), TableError> {
        if self.marks.is_empty() {
            Err(TableError::EmptySelection)
        } else {
            Ok(())
        }
    }

    fn require_field(&self, field: &str) -> Result<(), TableError> {
        if self.kind.has_field(field) {
            Ok(())
        } else {
            Err(TableError::UnknownField(field.to_string()))
        }
    }

    /// Applies an operation. `buffer` is read by `FromBuffer` and replaced by `ToBuffer`.
    pub fn apply(&mut self, op: TableOp, buffer: &mut GoodsBuffer) -> Result<(), TableError> {
        match op {
            TableOp::MarkRow { row } => {
                self.check_row(row)?;
                self.marks.insert(row);
            }
            TableOp::MarkRange { from, to } => {
                let (a, b) = (from.min(to), from.max(to));
                self.check_row(b)?;
                self.marks.extend(a..=b);
            }
            TableOp::Unmark => self.marks.clear(),
            TableOp::Copy { to } => self.copy_marked(to)?,
            TableOp::Move { to } => self.move_marked(to)?,
            TableOp::Delete => self.delete_marked()?,
            TableOp::Clear => self.clear_marked()?,
            TableOp::ToBuffer => *buffer = self.to_buffer()?,
            TableOp::FromBuffer => self.from_buffer(buffer)?,
            TableOp::Undo => self.undo()?,
            TableOp::InsertPartAt { point } => {
                self.insert_part_at(point)?;
            }
            TableOp::InsertTemplate { name, at } => {
                self.insert_template(&name, at)?;
            }
            TableOp::AddSection { title, at } => self.add_section(&title, at)?,
            TableOp::MergeIdentical { field } => self.merge_identical(&field)?,
            TableOp::OrderRows { fields } => self.order_rows(&fields)?,
            TableOp::ExtractCommonNames { field, min_group } => self.extract_common_names(&field, min_group.unwrap_or(2))?,
            TableOp::SetCell { path, lines } => self.set_cell_text(&path, lines)?,
            TableOp::Stretch { factor } => self.stretch(factor)?,
        }
        Ok(())
    }

    pub fn copy_marked(&mut self, to: usize) -> Result<(), TableError> {
        self.require_marks()?;
        self.check_insert(to)?;
        self.checkpoint();
        let mut items = self.items();
        let copies: Vec<Item> = self.marked_rows().into_iter().map(|r| Item::Row(r, false)).collect();
        let at = Self::insertion_point(&items, to);
        items.splice(at..at, copies);
        self.set_items(items);
        Ok(())
    }

    pub fn move_marked(&mut self, to: usize) -> Result<(), TableError> {
        self.require_marks()?;
        self.check_insert(to)?;
        self.checkpoint();
        let items = self.items();
        // the first unmarked row at or after `to` is the anchor
        let anchor = (to..self.rows.len()).find(|r| !self.marks.contains(r));
        let mut moved = Vec::new();
        let mut rest = Vec::new();
        let mut anchor_item = None;
        let mut r = 0;
        for it in items {
            if let Item::Row(_, marked) = &it {
                let this = r;
                r += 1;
                if *marked {
                    moved.push(it);
                    continue;
                }
                if Some(this) == anchor {
                    anchor_item = Some(rest.len());
                }
            }
            rest.push(it);
        }
        let at = anchor_item.unwrap_or(rest.len());
        rest.splice(at..at, moved);
        self.set_items(rest);
        Ok(())
    }

    pub fn delete_marked(&mut self) -> Result<(), TableError> {
        self.require_marks()?;
        self.checkpoint();
        let items = self.items().into_iter().filter(|it| !matches!(it, Item::Row(_, true))).collect();
        self.set_items(items);
        Ok(())
    }

    pub fn clear_marked(&mut self) -> Result<(), TableError> {
        self.require_marks()?;
        self.checkpoint();
        let marks: Vec<usize> = self.marks.iter().copied().collect();
        let kind = self.kind.clone();
        for m in marks {
            self.rows[m].visit_cells_mut(&kind.block, &mut |_, c| c.lines.clear());
        }
        Ok(())
    }

    fn marked_rows(&self) -> Vec<Record> {
        self.marks.iter().map(|&m| self.rows[m].clone()).collect()
    }

    /// Marked rows as field maps, in row order.
    pub fn to_buffer(&self) -> Result<GoodsBuffer, TableError> {
        self.require_marks()?;
        let rows = self
            .marks
            .iter()
            .map(|&m| self.field_map(&self.rows[m]).into_iter().filter(|(_, v)| !v.is_empty()).collect())
            .collect();
        Ok(GoodsBuffer { rows })
    }

    /// Appends one record per buffer row, filling the fields this kind has.
    pub fn from_buffer(&mut self, buffer: &GoodsBuffer) -> Result<(), TableError> {
        if buffer.is_empty() {
            return Err(TableError::EmptyBuffer);
        }
        self.checkpoint();
        let kind = self.kind.clone();
        for row in &buffer.rows {
            let mut rec = kind.block.empty_node();
            rec.visit_cells_mut(&kind.block, &mut |field, cell| {
                let v = row.get(field).or_else(|| alias_of(field).and_then(|a| row.get(a)));
                if let Some(v) = v {
                    cell.set_text(v);
                }
            });
            self.rows.push(rec);
        }
        Ok(())
    }

    /// Inserts one empty part into the nearest arbitrary block enclosing the
    /// cell at `point`, right after the pointed part. Returns the data row.
    pub fn insert_part_at(&mut self, point: Point) -> Result<usize, TableError> {
        let path = cell_at(self, point)?;
        let RecordRef::Data(row) = path.record else {
            return Err(TableError::NotADataCell);
        };
        let mut block = &self.kind.block;
        let mut nearest = None;
        for (depth, &i) in path.parts.iter().enumerate() {
            let Block::Split(s) = block else { break };
            if s.is_arbitrary() {
                nearest = Some(depth);
            }
            block = part_block(&s.parts, i);
        }
        let depth = nearest.ok_or(TableError::NoArbitraryAncestor)?;
        self.checkpoint();
        let kind = self.kind.clone();
        let mut block = &kind.block;
        let mut node = &mut self.rows[row];
        for &i in &path.parts[..depth] {
            let (Block::Split(s), Node::Parts(ps)) = (block, node) else { unreachable!("path follows the tree") };
            block = part_block(&s.parts, i);
            node = &mut ps[i];
        }
        let (Block::Split(s), Node::Parts(ps)) = (block, node) else { unreachable!("arbitrary split") };
        let Parts::Arbitrary(proto) = &s.parts else { unreachable!("arbitrary split") };
        ps.insert(path.parts[depth] + 1, proto.empty_node());
        Ok(row)
    }

    /// Inserts a record built from a named composite template before row
    /// `at` (default: at the end). Returns the new row index.
    pub fn insert_template(&mut self, name: &str, at: Option<usize>) -> Result<usize, TableError> {
        let counts = self.kind.templates.get(name).ok_or_else(|| TableError::UnknownTemplate(name.to_string()))?;
        let rec = self.kind.block.template_node(counts);
        let at = at.unwrap_or(self.rows.len());
        self.check_insert(at)?;
        self.checkpoint();
        let mut items = self.items();
        let i = Self::insertion_point(&items, at);
        items.insert(i, Item::Row(rec, false));
        self.set_items(items);
        Ok(at)
    }

    /// Inserts a section title before row `at`.
    pub fn add_section(&mut self, title: &str, at: usize) -> Result<(), TableError> {
        self.check_insert(at)?;
        self.checkpoint();
        let pos = self.sections.iter().position(|s| s.start > at).unwrap_or(self.sections.len());
        self.sections.insert(pos, Section { start: at, title: title.to_string() });
        Ok(())
    }

    /// Applies `f` to the rows of each section separately.
    fn per_section(&mut self, mut f: impl FnMut(&TableInstance, Vec<(Record, bool)>) -> Vec<Item>) {
        let items = self.items();
        let mut out = Vec::with_capacity(items.len());
        let mut run = Vec::new();
        for it in items {
            match it {
                Item::Row(r, m) => run.push((r, m)),
                Item::Section(t) => {
                    out.extend(f(self, std::mem::take(&mut run)));
                    out.push(Item::Section(t));
                }
            }
        }
        out.extend(f(self, run));
        self.set_items(out);
    }

    /// Collapses runs of consecutive rows that differ only in `qty_field`
    /// into one row carrying the exact sum. Rows whose quantity is not
    /// numeric never merge.
    pub fn merge_identical(&mut self, qty_field: &str) -> Result<(), TableError> {
        self.require_field(qty_field)?;
        self.checkpoint();
        self.per_section(|t, rows| {
            let mut out: Vec<Item> = Vec::with_capacity(rows.len());
            let mut last: Option<(Record, bool)> = None;
            for (r, m) in rows {
                if let Some((prev, pm)) = last.take() {
                    match t.merged(&prev, &r, qty_field) {
                        Some(sum) => {
                            last = Some((sum, pm || m));
                            continue;
                        }
                        None => out.push(Item::Row(prev, pm)),
                    }
                }
                last = Some((r, m));
            }
            if let Some((r, m)) = last {
                out.push(Item::Row(r, m));
            }
            out
        });
        Ok(())
    }

    fn merged(&self, a: &Record, b: &Record, qty: &str) -> Option<Record> {
        let block = &self.kind.block;
        let count = |r: &Record| {
            let mut n = 0;
            r.visit_cells(block, &mut |f, _| n += usize::from(f == qty));
            n
        };
        if count(a) != 1 || count(b) != 1 || masked(a, block, qty) != masked(b, block, qty) {
            return None;
        }
        let qa = self.field_text(a, qty)?;
        let qb = self.field_text(b, qty)?;
        let (na, rest) = leading_number(&qa)?;
        let (nb, _) = leading_number(&qb)?;
        let sum = na.checked_add(nb)?;
        let mut out = a.clone();
        let text = format!("{sum}{rest}");
        out.visit_cells_mut(block, &mut |f, c| {
            if f == qty {
                c.set_text(&text);
            }
        });
        Some(out)
    }

    /// Stable sort of each section's rows by the given fields.
    pub fn order_rows(&mut self, fields: &[String]) -> Result<(), TableError> {
        for f in fields {
            self.require_field(f)?;
        }
        self.checkpoint();
        self.per_section(|t, rows| {
            let mut keyed: Vec<(Vec<String>, (Record, bool))> = rows
                .into_iter()
                .map(|(r, m)| (fields.iter().map(|f| t.field_text(&r, f).unwrap_or_default()).collect(), (r, m)))
                .collect();
            keyed.sort_by(|(ka, _), (kb, _)| {
                fields
                    .iter()
                    .zip(ka.iter().zip(kb))
                    .map(|(f, (a, b))| compare_field(f, a, b))
                    .find(|o| *o != Ordering::Equal)
                    .unwrap_or(Ordering::Equal)
            });
            keyed.into_iter().map(|(_, (r, m))| Item::Row(r, m)).collect()
        });
        Ok(())
    }

    /// Moves the longest whole-word prefix shared by runs of at least
    /// `min_group` consecutive rows into a group row inserted before them.
    pub fn extract_common_names(&mut self, field: &str, min_group: usize) -> Result<(), TableError> {
        self.require_field(field)?;
        let min_group = min_group.max(2);
        self.checkpoint();
        self.per_section(|t, rows| {
            let words: Vec<Vec<String>> = rows
                .iter()
                .map(|(r, _)| t.field_text(r, field).unwrap_or_default().split_whitespace().map(str::to_string).collect())
                .collect();
            let mut out = Vec::with_capacity(rows.len());
            let mut rows = rows.into_iter();
            let mut i = 0;
            while i < words.len() {
                let (end, common) = common_run(&words, i);
                if end - i >= min_group && common > 0 {
                    let mut head = t.kind.block.empty_node();
                    let title = words[i][..common].join(" ");
                    set_first(&mut head, &t.kind.block, field, &title);
                    out.push(Item::Row(head, false));
                    for w in &words[i..end] {
                        let (mut r, m) = rows.next().expect("one row per word list");
                        set_first(&mut r, &t.kind.block, field, &w[common..].join(" "));
                        out.push(Item::Row(r, m));
                    }
                    i = end;
                } else {
                    let (r, m) = rows.next().expect("one row per word list");
                    out.push(Item::Row(r, m));
                    i += 1;
                }
            }
            out
        });
        Ok(())
    }
}

/// The run starting at `i` that shares at least one leading word, and the
/// shared word count, capped so every member keeps one word of its own.
fn common_run(words: &[Vec<String>], i: usize) -> (usize, usize) {
    let cap = |w: &Vec<String>| w.len().saturating_sub(1);
    let mut common = cap(&words[i]);
    let mut end = i + 1;
    while end < words.len() {
        let lcp = words[i].iter().zip(&words[end]).take_while(|(a, b)| a == b).count();
        let next = common.min(lcp).min(cap(&words[end]));
        if next == 0 {
            break;
        }
        common = next;
        end += 1;
    }
    if end - i < 2 {
        (end, 0)
    } else {
        (end, common)
    }
}

fn set_first(rec: &mut Record, block: &Block, field: &str, text: &str) {
    let mut done = false;
    rec.visit_cells_mut(block, &mut |f, c| {
        if !done && f == field {
            c.set_text(text);
            done = true;
        }
    });
}

/// Record with every cell of `field` emptied, for equality ignoring it.
fn masked(r: &Record, block: &Block, field: &str) -> Record {
    let mut r = r.clone();
    r.visit_cells_mut(block, &mut |f, c| {
        if f == field {
            c.lines.clear();
        }
    });
    r
}

fn is_designation_field(field: &str) -> bool {
    field.parse::<SpecField>().map(SpecField::is_designation).unwrap_or(false)
}

fn compare_field(field: &str, a: &str, b: &str) -> Ordering {
    if is_designation_field(field) {
        collation::compare(a.trim(), b.trim())
    } else {
        a.to_lowercase().cmp(&b.to_lowercase())
    }
}
