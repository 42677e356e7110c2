//! Flat rectangular regions cut out of a hierarchical table for the catalog
//! editor, and writing them back.

use serde::{Deserialize, Serialize};

use super::instance::{Node, RecordRef, TableInstance};
use super::kind::{Axis, Block, Parts};
use super::layout::cell_at;
use super::TableError;
use crate::geom::Point;

/// A grid of data rows × leaf fields. Every listed field occurs exactly once
/// in every listed row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EditableRegion {
    pub fields: Vec<String>,
    pub rows: Vec<usize>,
    pub cells: Vec<Vec<String>>,
}

impl EditableRegion {
    /// JSON 2-D array: field ids first, then one array per row.
    pub fn to_flat_json(&self) -> serde_json::Value {
        let mut out = vec![serde_json::json!(self.fields)];
        out.extend(self.cells.iter().map(|r| serde_json::json!(r)));
        serde_json::Value::Array(out)
    }

    /// Writes edited cells back into `t`. Cells whose text did not change are
    /// left alone, so an unmodified region leaves the table unchanged.
    pub fn write_back(&self, t: &mut TableInstance) -> Result<(), TableError> {
        if self.cells.len() != self.rows.len() || self.cells.iter().any(|r| r.len() != self.fields.len()) {
            return Err(TableError::RegionMismatch("grid shape differs from its header".into()));
        }
        for &r in &self.rows {
            if r >= t.len() {
                return Err(TableError::RowOutOfRange { index: r, len: t.len() });
            }
            for f in &self.fields {
                if count_occurrences(t, r, f) != 1 {
                    return Err(TableError::RegionMismatch(format!("field {f:?} is no longer single in row {r}")));
                }
            }
        }
        let changed: Vec<(usize, &str, &str)> = self
            .rows
            .iter()
            .zip(&self.cells)
            .flat_map(|(&r, row)| self.fields.iter().zip(row).map(move |(f, v)| (r, f.as_str(), v.as_str())))
            .filter(|(r, f, v)| t.field_text(&t.rows()[*r], f).as_deref() != Some(*v))
            .collect();
        if changed.is_empty() {
            return Ok(());
        }
        t.checkpoint();
        let kind = t.kind.clone();
        for (r, field, v) in changed {
            t.rows[r].visit_cells_mut(&kind.block, &mut |f, c| {
                if f == field {
                    c.set_text(v);
                }
            });
        }
        Ok(())
    }
}

fn count_occurrences(t: &TableInstance, row: usize, field: &str) -> usize {
    let mut n = 0;
    t.rows()[row].visit_cells(&t.kind().block, &mut |f, _| n += usize::from(f == field));
    n
}

/// Whether `field` spans a whole layout row of `node`: it occurs once and is
/// not stacked under a fixed vertical split.
fn single_row(block: &Block, node: &Node, field: &str) -> Option<bool> {
    match (block, node) {
        (Block::Leaf(l), Node::Cell(_)) => (l.field == field).then_some(true),
        (Block::Split(s), Node::Parts(ps)) => {
            let mut found = None;
            for (i, p) in ps.iter().enumerate() {
                let b = match &s.parts {
                    Parts::Fixed(bs) => &bs[i],
                    Parts::Arbitrary(b) => b,
                };
                if let Some(ok) = single_row(b, p, field) {
                    if found.is_some() {
                        return Some(false);
                    }
                    let stacked = s.axis == Axis::Vertical && ps.len() > 1;
                    found = Some(ok && !stacked);
                }
            }
            found
        }
        _ => None,
    }
}

/// The widest run of adjacent leaf columns around the pointed cell in which
/// every data record has exactly one row.
pub fn extract_editable_region(t: &TableInstance, point: Point) -> Result<EditableRegion, TableError> {
    let path = cell_at(t, point)?;
    let RecordRef::Data(_) = path.record else {
        return Err(TableError::NotADataCell);
    };
    let pointed = t.field_at(&path).ok_or(TableError::NotADataCell)?.to_string();
    let leaves: Vec<String> = t.kind().block.leaves().iter().map(|l| l.field.clone()).collect();
    let flat: Vec<bool> =
        leaves.iter().map(|f| t.rows().iter().all(|r| single_row(&t.kind().block, r, f) == Some(true))).collect();
    let at = leaves.iter().position(|f| *f == pointed).expect("pointed leaf belongs to the kind");
    if !flat[at] {
        return Err(TableError::NotEditable(pointed));
    }
    let mut lo = at;
    while lo > 0 && flat[lo - 1] {
        lo -= 1;
    }
    let mut hi = at + 1;
    while hi < leaves.len() && flat[hi] {
        hi += 1;
    }
    let fields = leaves[lo..hi].to_vec();
    let rows: Vec<usize> = (0..t.len()).collect();
    let cells =
        rows.iter().map(|&r| fields.iter().map(|f| t.field_text(&t.rows()[r], f).unwrap_or_default()).collect()).collect();
    Ok(EditableRegion { fields, rows, cells })
}
