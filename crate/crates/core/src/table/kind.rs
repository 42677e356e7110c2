//! Table kinds: the recursive block-subdivision schema of a tabular document.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::TableError;
use crate::geom::Mm;

pub const KIND_SCHEMA: &str = "specforge-kind/1";

/// Direction of a split. Horizontal parts sit side by side and their widths
/// add up; vertical parts are stacked and share the parent width.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    Horizontal,
    Vertical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Visibility {
    #[serde(default = "yes")]
    pub in_header: bool,
    #[serde(default = "yes")]
    pub in_data: bool,
}

fn yes() -> bool {
    true
}

impl Default for Visibility {
    fn default() -> Self {
        Visibility { in_header: true, in_data: true }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Leaf {
    pub field: String,
    pub width: Mm,
    pub title: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Parts {
    Fixed(Vec<Block>),
    /// Any number (at least one) of copies of the prototype.
    Arbitrary(Box<Block>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Split {
    pub name: Option<String>,
    pub axis: Axis,
    pub visibility: Visibility,
    pub parts: Parts,
    width: Mm,
}

impl Split {
    pub fn width(&self) -> Mm {
        self.width
    }

    pub fn is_arbitrary(&self) -> bool {
        matches!(self.parts, Parts::Arbitrary(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawBlock", into = "RawBlock")]
pub enum Block {
    Leaf(Leaf),
    Split(Split),
}

impl Block {
    pub fn width(&self) -> Mm {
        match self {
            Block::Leaf(l) => l.width,
            Block::Split(s) => s.width,
        }
    }

    pub(crate) fn label(&self) -> String {
        match self {
            Block::Leaf(l) => l.field.clone(),
            Block::Split(s) => s.name.clone().unwrap_or_else(|| "(unnamed split)".into()),
        }
    }

    /// Leaves in left-to-right, top-to-bottom order (prototype leaves once).
    pub fn leaves(&self) -> Vec<&Leaf> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a Leaf>) {
        match self {
            Block::Leaf(l) => out.push(l),
            Block::Split(s) => match &s.parts {
                Parts::Fixed(ps) => ps.iter().for_each(|p| p.collect_leaves(out)),
                Parts::Arbitrary(p) => p.collect_leaves(out),
            },
        }
    }

    fn splits<'a>(&'a self, out: &mut Vec<&'a Split>) {
        if let Block::Split(s) = self {
            out.push(s);
            match &s.parts {
                Parts::Fixed(ps) => ps.iter().for_each(|p| p.splits(out)),
                Parts::Arbitrary(p) => p.splits(out),
            }
        }
    }

    /// Rescales to `width`, giving each rounding remainder to the last part.
    pub(crate) fn rescaled(&self, width: Mm) -> Block {
        match self {
            Block::Leaf(l) => Block::Leaf(Leaf { width, ..l.clone() }),
            Block::Split(s) => {
                let parts = match (&s.parts, s.axis) {
                    (Parts::Arbitrary(p), _) => Parts::Arbitrary(Box::new(p.rescaled(width))),
                    (Parts::Fixed(ps), Axis::Vertical) => Parts::Fixed(ps.iter().map(|p| p.rescaled(width)).collect()),
                    (Parts::Fixed(ps), Axis::Horizontal) => {
                        let old = s.width.thousandths() as i128;
                        let new = width.thousandths() as i128;
                        let mut used = 0i64;
                        let n = ps.len();
                        Parts::Fixed(
                            ps.iter()
                                .enumerate()
                                .map(|(i, p)| {
                                    let w = if i + 1 == n {
                                        width.thousandths() - used
                                    } else {
                                        (p.width().thousandths() as i128 * new / old) as i64
                                    };
                                    used += w;
                                    p.rescaled(Mm::from_thousandths(w))
                                })
                                .collect(),
                        )
                    }
                };
                Block::Split(Split { parts, width, ..s.clone() })
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct RawBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    field: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    title: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    split: Option<Axis>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    width: Option<Mm>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    visibility: Option<Visibility>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    parts: Option<Vec<RawBlock>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    arbitrary: Option<Box<RawBlock>>,
}

impl TryFrom<RawBlock> for Block {
    type Error = TableError;

    fn try_from(r: RawBlock) -> Result<Self, TableError> {
        let label = r.field.clone().or_else(|| r.name.clone()).unwrap_or_else(|| "(unnamed split)".into());
        let bad = |m: &str| TableError::BadKind(format!("block {label}: {m}"));
        match (r.field, r.split) {
            (Some(_), Some(_)) => Err(bad("a block is either a leaf (field) or a split, not both")),
            (None, None) => Err(bad("block needs \"field\" or \"split\"")),
            (Some(field), None) => {
                if r.parts.is_some() || r.arbitrary.is_some() || r.visibility.is_some() {
                    return Err(bad("a leaf cannot have parts or visibility"));
                }
                let width = r.width.ok_or_else(|| bad("leaf needs a width"))?;
                if width <= Mm::ZERO {
                    return Err(bad("width must be positive"));
                }
                Ok(Block::Leaf(Leaf { title: r.title.unwrap_or_else(|| field.clone()), field, width }))
            }
            (None, Some(axis)) => {
                if r.title.is_some() {
                    return Err(bad("a split has no title"));
                }
                let parts = match (r.parts, r.arbitrary) {
                    (Some(_), Some(_)) => return Err(bad("\"parts\" and \"arbitrary\" are exclusive")),
                    (None, None) => return Err(bad("split needs \"parts\" or \"arbitrary\"")),
                    (Some(ps), None) => {
                        if ps.is_empty() {
                            return Err(bad("split has no parts"));
                        }
                        Parts::Fixed(ps.into_iter().map(Block::try_from).collect::<Result<_, _>>()?)
                    }
                    (None, Some(p)) => {
                        if axis == Axis::Horizontal {
                            return Err(TableError::ArbitraryHorizontal(label));
                        }
                        Parts::Arbitrary(Box::new(Block::try_from(*p)?))
                    }
                };
                let natural = match (&parts, axis) {
                    (Parts::Arbitrary(p), _) => p.width(),
                    (Parts::Fixed(ps), Axis::Horizontal) => ps.iter().map(Block::width).sum(),
                    (Parts::Fixed(ps), Axis::Vertical) => {
                        let w = ps[0].width();
                        if let Some(p) = ps.iter().find(|p| p.width() != w) {
                            return Err(TableError::WidthMismatch { block: label, declared: w, actual: p.width() });
                        }
                        w
                    }
                };
                if let Some(declared) = r.width {
                    if declared != natural {
                        return Err(TableError::WidthMismatch { block: label, declared, actual: natural });
                    }
                }
                Ok(Block::Split(Split {
                    name: r.name,
                    axis,
                    visibility: r.visibility.unwrap_or_default(),
                    parts,
                    width: natural,
                }))
            }
        }
    }
}

impl From<Block> for RawBlock {
    fn from(b: Block) -> Self {
        match b {
            Block::Leaf(l) => RawBlock {
                title: (l.title != l.field).then_some(l.title),
                field: Some(l.field),
                split: None,
                name: None,
                width: Some(l.width),
                visibility: None,
                parts: None,
                arbitrary: None,
            },
            Block::Split(s) => {
                let (parts, arbitrary) = match s.parts {
                    Parts::Fixed(ps) => (Some(ps.into_iter().map(RawBlock::from).collect()), None),
                    Parts::Arbitrary(p) => (None, Some(Box::new(RawBlock::from(*p)))),
                };
                RawBlock {
                    field: None,
                    title: None,
                    split: Some(s.axis),
                    name: s.name,
                    width: Some(s.width),
                    visibility: (s.visibility != Visibility::default()).then_some(s.visibility),
                    parts,
                    arbitrary,
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KindClass {
    Specification,
    OrderSpecification,
    Explication,
    WellTable,
    AssemblySheet,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KindOptions {
    #[serde(default = "default_line_height")]
    pub line_height: Mm,
    #[serde(default = "default_font_height")]
    pub font_height: Mm,
    #[serde(default)]
    pub graph_number_row: bool,
    #[serde(default = "one")]
    pub graph_number_start: u32,
    #[serde(default = "yes")]
    pub header_repeat: bool,
    #[serde(default = "default_journal_depth")]
    pub journal_depth: usize,
}

fn default_line_height() -> Mm {
    Mm::whole(8)
}

fn default_font_height() -> Mm {
    Mm::from_thousandths(3500)
}

fn one() -> u32 {
    1
}

fn default_journal_depth() -> usize {
    32
}

impl Default for KindOptions {
    fn default() -> Self {
        KindOptions {
            line_height: default_line_height(),
            font_height: default_font_height(),
            graph_number_row: false,
            graph_number_start: 1,
            header_repeat: true,
            journal_depth: default_journal_depth(),
        }
    }
}

/// Composite record template: part count per named arbitrary block.
pub type Template = BTreeMap<String, usize>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawKind", into = "RawKind")]
pub struct TableKind {
    pub name: String,
    pub class: KindClass,
    pub options: KindOptions,
    /// Canonical field id → column title override.
    pub field_aliases: BTreeMap<String, String>,
    pub block: Block,
    pub templates: BTreeMap<String, Template>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub(crate) struct RawKind {
    pub schema: String,
    pub name: String,
    pub class: KindClass,
    #[serde(default)]
    pub options: KindOptions,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub field_aliases: BTreeMap<String, String>,
    pub block: RawBlock,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub templates: BTreeMap<String, Template>,
}

impl TryFrom<RawKind> for TableKind {
    type Error = TableError;

    fn try_from(r: RawKind) -> Result<Self, TableError> {
        if r.schema != KIND_SCHEMA {
            return Err(TableError::Schema { found: r.schema, expected: KIND_SCHEMA });
        }
        let block = Block::try_from(r.block)?;
        if r.options.line_height <= Mm::ZERO {
            return Err(TableError::BadKind("line_height must be positive".into()));
        }
        let mut fields = BTreeSet::new();
        for l in block.leaves() {
            if !fields.insert(l.field.as_str()) {
                return Err(TableError::DuplicateField(l.field.clone()));
            }
        }
        let mut splits = Vec::new();
        block.splits(&mut splits);
        let mut names = BTreeSet::new();
        for s in &splits {
            if let Some(n) = &s.name {
                if !names.insert(n.as_str()) {
                    return Err(TableError::BadKind(format!("duplicate block name {n:?}")));
                }
            }
        }
        for (t, counts) in &r.templates {
            for (block, &n) in counts {
                let ok = splits.iter().any(|s| s.name.as_deref() == Some(block) && s.is_arbitrary());
                if !ok {
                    return Err(TableError::UnknownTemplateBlock { template: t.clone(), block: block.clone() });
                }
                if n == 0 {
                    return Err(TableError::BadKind(format!("template {t:?}: block {block:?} needs at least one part")));
                }
            }
        }
        Ok(TableKind {
            name: r.name,
            class: r.class,
            options: r.options,
            field_aliases: r.field_aliases,
            block,
            templates: r.templates,
        })
    }
}

impl From<TableKind> for RawKind {
    fn from(k: TableKind) -> Self {
        RawKind {
            schema: KIND_SCHEMA.into(),
            name: k.name,
            class: k.class,
            options: k.options,
            field_aliases: k.field_aliases,
            block: RawBlock::from(k.block),
            templates: k.templates,
        }
    }
}

impl TableKind {
    pub fn from_json(text: &str) -> Result<Self, TableError> {
        let raw: RawKind =
            serde_json::from_str(text).map_err(|e| TableError::Parse { path: String::new(), message: e.to_string() })?;
        TableKind::try_from(raw)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("kinds serialize");
        s.push('\n');
        s
    }

    pub fn width(&self) -> Mm {
        self.block.width()
    }

    pub fn fields(&self) -> Vec<&str> {
        self.block.leaves().into_iter().map(|l| l.field.as_str()).collect()
    }

    pub fn has_field(&self, field: &str) -> bool {
        self.block.leaves().iter().any(|l| l.field == field)
    }

    pub fn title_of<'a>(&'a self, leaf: &'a Leaf) -> &'a str {
        self.field_aliases.get(&leaf.field).map(String::as_str).unwrap_or(&leaf.title)
    }

    pub fn is_well_kind(&self) -> bool {
        self.class == KindClass::WellTable
    }
}

/// Reads and validates a kind file.
pub fn load_table_kind(path: &Path) -> Result<TableKind, TableError> {
    let shown = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|source| TableError::Io { path: shown.clone(), source })?;
    TableKind::from_json(&text).map_err(|e| e.with_path(&shown))
}
