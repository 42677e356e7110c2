//! Documents, elements and "modules in the drawing".
//!
//! A module pairs an invisible parametric representation (a PO module, a
//! table) with visible geometry that is always regenerated from it. Plain
//! lines and texts have no parameters.

mod display;
mod io;
mod library;

pub use display::{regenerate, DisplayList, LineType, Primitive, Style, PO_FONT_HEIGHT, PO_LINE_PITCH};
pub use io::{document_from_str, document_to_string, load_document, load_document_with_warnings, save_document, DOC_SCHEMA};
pub use library::{DirLibrary, MemoryLibrary, Prototype, PrototypeStore};

use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{Mm, Point};
use crate::po::{self, DuplicateScope, DuplicateVerdict, ObjectType, PoError, PoModule, PoType, SpecProps};
use crate::table::{TableError, TableInstance};

#[derive(Debug, Error)]
pub enum DrawingError {
    #[error("{path}: {message}")]
    Parse { path: String, message: String },
    #[error("{path}: unsupported schema {found:?}, expected {expected:?}")]
    Schema { path: String, found: String, expected: &'static str },
    #[error("duplicate element id {0}")]
    DuplicateId(ElementId),
    #[error("no element with id {0}")]
    UnknownId(ElementId),
    #[error("element {0} is not a text")]
    NotAText(ElementId),
    #[error("element {0} is not a table module")]
    NotATable(ElementId),
    #[error("element {0} is not a PO module")]
    NotAPo(ElementId),
    #[error("no prototype named {0:?}")]
    UnknownPrototype(String),
    #[error("invalid prototype name {0:?}")]
    BadPrototypeName(String),
    #[error("adding {0:?} cancelled: designation already in use")]
    DuplicateRejected(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Po(#[from] PoError),
    #[error(transparent)]
    Table(#[from] TableError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ElementId(pub u64);

impl fmt::Display for ElementId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ElementKind {
    Line,
    Text,
    PoModule,
    TableModule,
    AxonoSchemeStub,
    VkProfileStub,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LineData {
    /// End point relative to the element position.
    pub vector: Point,
    #[serde(default)]
    pub line_type: LineType,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TextData {
    pub lines: Vec<String>,
    #[serde(default = "default_text_height")]
    pub height: Mm,
}

fn default_text_height() -> Mm {
    PO_FONT_HEIGHT
}

/// Modules of other disciplines, kept only for the designations they carry.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StubData {
    pub designations: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ElementBody {
    Line(LineData),
    Text(TextData),
    PoModule(PoModule),
    TableModule(Box<TableInstance>),
    AxonoSchemeStub(StubData),
    VkProfileStub(StubData),
}

impl ElementBody {
    pub fn kind(&self) -> ElementKind {
        match self {
            ElementBody::Line(_) => ElementKind::Line,
            ElementBody::Text(_) => ElementKind::Text,
            ElementBody::PoModule(_) => ElementKind::PoModule,
            ElementBody::TableModule(_) => ElementKind::TableModule,
            ElementBody::AxonoSchemeStub(_) => ElementKind::AxonoSchemeStub,
            ElementBody::VkProfileStub(_) => ElementKind::VkProfileStub,
        }
    }

    pub fn is_module(&self) -> bool {
        !matches!(self, ElementBody::Line(_) | ElementBody::Text(_))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Element {
    pub id: ElementId,
    pub layer: String,
    pub position: Point,
    pub body: ElementBody,
}

impl Element {
    pub fn kind(&self) -> ElementKind {
        self.body.kind()
    }

    pub fn as_po(&self) -> Option<&PoModule> {
        match &self.body {
            ElementBody::PoModule(p) => Some(p),
            _ => None,
        }
    }

    pub fn as_table(&self) -> Option<&TableInstance> {
        match &self.body {
            ElementBody::TableModule(t) => Some(t),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Document {
    elements: Vec<Element>,
    next_id: u64,
    pub source_path: Option<PathBuf>,
}

/// Structural equality: the element lists match.
impl PartialEq for Document {
    fn eq(&self, other: &Self) -> bool {
        self.elements == other.elements
    }
}

impl Document {
    pub fn new() -> Self {
        Document { elements: Vec::new(), next_id: 1, source_path: None }
    }

    pub(crate) fn from_elements(elements: Vec<Element>) -> Result<Self, DrawingError> {
        let mut seen = std::collections::HashSet::new();
        for e in &elements {
            if !seen.insert(e.id) {
                return Err(DrawingError::DuplicateId(e.id));
            }
        }
        let next_id = elements.iter().map(|e| e.id.0).max().unwrap_or(0) + 1;
        Ok(Document { elements, next_id, source_path: None })
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn add(&mut self, layer: impl Into<String>, position: Point, body: ElementBody) -> ElementId {
        let id = ElementId(self.next_id);
        self.next_id += 1;
        self.elements.push(Element { id, layer: layer.into(), position, body });
        id
    }

    pub fn get(&self, id: ElementId) -> Result<&Element, DrawingError> {
        self.elements.iter().find(|e| e.id == id).ok_or(DrawingError::UnknownId(id))
    }

    pub fn get_mut(&mut self, id: ElementId) -> Result<&mut Element, DrawingError> {
        self.elements.iter_mut().find(|e| e.id == id).ok_or(DrawingError::UnknownId(id))
    }

    pub fn remove(&mut self, id: ElementId) -> Result<Element, DrawingError> {
        let idx = self.elements.iter().position(|e| e.id == id).ok_or(DrawingError::UnknownId(id))?;
        Ok(self.elements.remove(idx))
    }

    pub fn table_mut(&mut self, id: ElementId) -> Result<&mut TableInstance, DrawingError> {
        match &mut self.get_mut(id)?.body {
            ElementBody::TableModule(t) => Ok(t),
            _ => Err(DrawingError::NotATable(id)),
        }
    }

    /// Adds a PO module after duplicate control. `confirm` is asked for
    /// every designation already present in `scope`; declining aborts.
    pub fn add_po(
        &mut self,
        layer: impl Into<String>,
        position: Point,
        module: PoModule,
        scope: &DuplicateScope,
        mut confirm: impl FnMut(&str, &DuplicateVerdict) -> bool,
    ) -> Result<ElementId, DrawingError> {
        for d in module.designations() {
            let verdict = po::check_duplicate(self, scope, &d);
            if verdict.is_duplicate() && !confirm(&d, &verdict) {
                return Err(DrawingError::DuplicateRejected(d));
            }
        }
        Ok(self.add(layer, position, ElementBody::PoModule(module)))
    }
}

/// Element-level editing actions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "action", rename_all = "snake_case")]
pub enum ElementAction {
    Delete {
        id: ElementId,
    },
    Translate {
        id: ElementId,
        dx: Mm,
        dy: Mm,
    },
    /// Scales column widths of a table module.
    Stretch {
        id: ElementId,
        factor: f64,
    },
    ToLibrary {
        id: ElementId,
        name: String,
    },
    FromLibrary {
        name: String,
        position: Point,
    },
}

/// Applies an element action. Returns the id of a newly created element.
pub fn element_ops(
    doc: &mut Document,
    action: ElementAction,
    library: &mut dyn PrototypeStore,
) -> Result<Option<ElementId>, DrawingError> {
    match action {
        ElementAction::Delete { id } => {
            doc.remove(id)?;
            Ok(None)
        }
        ElementAction::Translate { id, dx, dy } => {
            let e = doc.get_mut(id)?;
            e.position = e.position.offset(dx, dy);
            Ok(None)
        }
        ElementAction::Stretch { id, factor } => {
            doc.table_mut(id)?.stretch(factor)?;
            Ok(None)
        }
        ElementAction::ToLibrary { id, name } => {
            let e = doc.get(id)?;
            library.put(&name, Prototype::from_element(e))?;
            Ok(None)
        }
        ElementAction::FromLibrary { name, position } => {
            let proto = library.get(&name)?;
            Ok(Some(doc.add(proto.layer, position, proto.body)))
        }
    }
}

/// Result of converting a text into a PO module.
#[derive(Debug, Clone, PartialEq)]
pub struct Conversion {
    pub id: ElementId,
    pub duplicates: Vec<(String, DuplicateVerdict)>,
}

/// Replaces a plain text by a PO module with the same visible lines and the
/// given invisible properties. Duplicate designations are reported, not
/// refused; the caller decides whether to keep the result.
pub fn text_to_po(
    doc: &mut Document,
    id: ElementId,
    props: Vec<SpecProps>,
    potype: PoType,
    objecttype: ObjectType,
    scope: &DuplicateScope,
) -> Result<Conversion, DrawingError> {
    let e = doc.get(id)?;
    let ElementBody::Text(text) = &e.body else {
        return Err(DrawingError::NotAText(id));
    };
    let props = if props.is_empty() && potype != PoType::ProductPerLine {
        vec![SpecProps::new()]
    } else if props.is_empty() {
        vec![SpecProps::new(); text.lines.len()]
    } else {
        props
    };
    let module = PoModule::new(text.lines.clone(), potype, objecttype, props)?;
    let duplicates: Vec<(String, DuplicateVerdict)> = module
        .designations()
        .into_iter()
        .map(|d| {
            let v = po::check_duplicate_excluding(doc, scope, &d, Some(id));
            (d, v)
        })
        .filter(|(_, v)| v.is_duplicate())
        .collect();
    doc.get_mut(id)?.body = ElementBody::PoModule(module);
    Ok(Conversion { id, duplicates })
}
