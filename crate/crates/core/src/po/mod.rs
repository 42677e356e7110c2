//! Position designations (PO): modules, bulk property edits and duplicate
//! control within a document and across a group of files.

mod props;

pub use props::{DuplicateScope, ObjectType, PoModule, PoType, SpecField, SpecProps};

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::collation;
use crate::drawing::{load_document, Document, DrawingError, Element, ElementBody, ElementId, ElementKind};
use crate::geom::Point;

#[derive(Debug, Error)]
pub enum PoError {
    #[error("unknown field id {0:?}")]
    UnknownField(String),
    #[error("negative quantity {0:?}")]
    NegativeQuantity(String),
    #[error("a PO module needs non-empty text")]
    NoText,
    #[error("{potype:?} with {lines} line(s) cannot carry {props} product row(s)")]
    Arity { potype: PoType, lines: usize, props: usize },
    #[error("unknown duplicate scope item {0:?}")]
    BadScope(String),
}

pub const PO_LAYER: &str = "ПО";

/// Creates a PO module element on the PO layer.
pub fn make_po(
    doc: &mut Document,
    lines: Vec<String>,
    potype: PoType,
    objecttype: ObjectType,
    props: Vec<SpecProps>,
    position: Point,
) -> Result<ElementId, PoError> {
    let m = PoModule::new(lines, potype, objecttype, props)?;
    Ok(doc.add(PO_LAYER, position, ElementBody::PoModule(m)))
}

/// Overwrites `edits` on every product row of each listed PO module.
/// Nothing is changed unless every id is a PO module and every value is valid.
pub fn edit_props_bulk(doc: &mut Document, ids: &[ElementId], edits: &[(SpecField, String)]) -> Result<(), DrawingError> {
    for &id in ids {
        if doc.get(id)?.as_po().is_none() {
            return Err(DrawingError::NotAPo(id));
        }
    }
    let mut probe = SpecProps::new();
    for (f, v) in edits {
        probe.set(*f, v.clone())?;
    }
    for &id in ids {
        if let ElementBody::PoModule(m) = &mut doc.get_mut(id)?.body {
            for row in m.props_mut() {
                for (f, v) in edits {
                    row.set(*f, v.clone())?;
                }
            }
        }
    }
    Ok(())
}

fn admitted(kind: ElementKind, scope: &DuplicateScope) -> bool {
    match kind {
        ElementKind::PoModule => scope.include_po_modules,
        ElementKind::AxonoSchemeStub => scope.include_axono_modules,
        ElementKind::VkProfileStub => scope.include_vk_profile_modules,
        _ => false,
    }
}

/// Designations carried by an element, trimmed. Non-bearing elements yield none.
pub fn element_designations(e: &Element) -> Vec<String> {
    match &e.body {
        ElementBody::PoModule(m) => m.designations(),
        ElementBody::AxonoSchemeStub(s) | ElementBody::VkProfileStub(s) => {
            s.designations.iter().map(|d| d.trim().to_string()).collect()
        }
        _ => Vec::new(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DesignationEntry {
    pub designation: String,
    pub element: ElementId,
    pub kind: ElementKind,
    pub position: Point,
}

/// All designations of PO modules and stubs, in collation order.
pub fn list_designations(doc: &Document) -> Vec<DesignationEntry> {
    let mut out: Vec<DesignationEntry> = doc
        .elements()
        .iter()
        .flat_map(|e| {
            element_designations(e).into_iter().filter(|d| !d.is_empty()).map(move |d| DesignationEntry {
                designation: d,
                element: e.id,
                kind: e.kind(),
                position: e.position,
            })
        })
        .collect();
    out.sort_by(|a, b| collation::compare(&a.designation, &b.designation));
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Location {
    pub element: ElementId,
    pub kind: ElementKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", content = "locations")]
pub enum DuplicateVerdict {
    Unique,
    Duplicate(Vec<Location>),
}

impl DuplicateVerdict {
    pub fn is_duplicate(&self) -> bool {
        matches!(self, DuplicateVerdict::Duplicate(_))
    }
}

pub fn check_duplicate(doc: &Document, scope: &DuplicateScope, candidate: &str) -> DuplicateVerdict {
    check_duplicate_excluding(doc, scope, candidate, None)
}

/// Like [`check_duplicate`], ignoring one element (the one being edited).
pub fn check_duplicate_excluding(
    doc: &Document,
    scope: &DuplicateScope,
    candidate: &str,
    skip: Option<ElementId>,
) -> DuplicateVerdict {
    let candidate = candidate.trim();
    let locations: Vec<Location> = doc
        .elements()
        .iter()
        .filter(|e| Some(e.id) != skip && admitted(e.kind(), scope))
        .flat_map(|e| {
            element_designations(e)
                .into_iter()
                .filter(|d| d == candidate)
                .map(move |_| Location { element: e.id, kind: e.kind() })
        })
        .collect();
    if locations.is_empty() {
        DuplicateVerdict::Unique
    } else {
        DuplicateVerdict::Duplicate(locations)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct FileLocation {
    pub file: PathBuf,
    pub element: ElementId,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DuplicateEntry {
    pub designation: String,
    pub locations: Vec<FileLocation>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct DuplicateReport {
    pub entries: Vec<DuplicateEntry>,
}

impl DuplicateReport {
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// One line per location: designation, file, element id, tab separated.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for e in &self.entries {
            for l in &e.locations {
                s.push_str(&format!("{}\t{}\t{}\n", e.designation, l.file.display(), l.element));
            }
        }
        s
    }
}

/// Designations repeated within or across a group of drawing files.
pub fn check_duplicates_files<P: AsRef<Path> + Sync>(
    paths: &[P],
    scope: &DuplicateScope,
) -> Result<DuplicateReport, DrawingError> {
    let docs: Vec<(PathBuf, Document)> =
        paths.par_iter().map(|p| load_document(p.as_ref()).map(|d| (p.as_ref().to_path_buf(), d))).collect::<Result<_, _>>()?;
    Ok(duplicates_in(&docs, scope))
}

pub fn duplicates_in(docs: &[(PathBuf, Document)], scope: &DuplicateScope) -> DuplicateReport {
    let mut seen: BTreeMap<String, Vec<FileLocation>> = BTreeMap::new();
    for (file, doc) in docs {
        for e in doc.elements().iter().filter(|e| admitted(e.kind(), scope)) {
            for d in element_designations(e).into_iter().filter(|d| !d.is_empty()) {
                seen.entry(d).or_default().push(FileLocation { file: file.clone(), element: e.id });
            }
        }
    }
    let mut entries: Vec<DuplicateEntry> = seen
        .into_iter()
        .filter(|(_, l)| l.len() >= 2)
        .map(|(designation, locations)| DuplicateEntry { designation, locations })
        .collect();
    entries.sort_by(|a, b| collation::compare(&a.designation, &b.designation));
    DuplicateReport { entries }
}
