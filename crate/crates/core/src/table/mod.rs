//! The table module: tabular documents built from a recursive block
//! structure declared in an external kind file.

mod instance;
mod kind;
mod layout;
mod ops;
mod paginate;
mod region;

pub use instance::{load_prototype, save_prototype, Cell, CellPath, CellStyle, Node, Record, RecordRef, Section, TableInstance};
pub use kind::{
    load_table_kind, Axis, Block, KindClass, KindOptions, Leaf, Parts, Split, TableKind, Template, Visibility, KIND_SCHEMA,
};
pub use layout::{bands, cell_at, column_bounds, layout, Band, BandKind, CellRect, Grid, Segment};
pub use ops::{GoodsBuffer, TableOp};
pub use paginate::{paginate, Chunk, Direction, HeadMode, CHUNK_GAP};
pub use region::{extract_editable_region, EditableRegion};

use thiserror::Error;

use crate::geom::{Mm, Point};

#[derive(Debug, Error)]
pub enum TableError {
    #[error("{path}: {message}")]
    Parse { path: String, message: String },
    #[error("unsupported schema {found:?}, expected {expected:?}")]
    Schema { found: String, expected: &'static str },
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}")]
    BadKind(String),
    #[error("block {block}: width {declared} declared, parts give {actual}")]
    WidthMismatch { block: String, declared: Mm, actual: Mm },
    #[error("block {0}: an arbitrary number of parts is only allowed on a vertical split")]
    ArbitraryHorizontal(String),
    #[error("field {0:?} appears more than once in the kind")]
    DuplicateField(String),
    #[error("template {template:?} names {block:?}, which is not an arbitrary block of the kind")]
    UnknownTemplateBlock { template: String, block: String },
    #[error("unknown field {0:?}")]
    UnknownField(String),
    #[error("unknown template {0:?}")]
    UnknownTemplate(String),
    #[error("no cell at {cell:?}", cell = .0)]
    UnknownCell(CellPath),
    #[error("point ({}, {}) is outside the table", .0.x, .0.y)]
    OutsideTable(Point),
    #[error("the pointed cell is not in a data record")]
    NotADataCell,
    #[error("the pointed cell has no block with an arbitrary number of parts above it")]
    NoArbitraryAncestor,
    #[error("column {0:?} has records with several rows and cannot be edited flat")]
    NotEditable(String),
    #[error("region does not match the table: {0}")]
    RegionMismatch(String),
    #[error("no rows are marked")]
    EmptySelection,
    #[error("the goods buffer is empty")]
    EmptyBuffer,
    #[error("nothing to undo")]
    NothingToUndo,
    #[error("row {index} out of range (table has {len})")]
    RowOutOfRange { index: usize, len: usize },
    #[error("height {max} is too small, a piece needs {needed}")]
    TooSmall { needed: Mm, max: Mm },
    #[error("bad stretch factor {0}")]
    BadFactor(f64),
}

impl TableError {
    pub(crate) fn with_path(self, path: &str) -> TableError {
        match self {
            TableError::Parse { message, .. } => TableError::Parse { path: path.to_string(), message },
            TableError::Schema { found, expected } => TableError::Parse {
                path: path.to_string(),
                message: format!("unsupported schema {found:?}, expected {expected:?}"),
            },
            other => other,
        }
    }
}
