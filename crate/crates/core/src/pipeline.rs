//! Filling table documents from the PO modules of a drawing.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::drawing::{Document, DrawingError, ElementBody, ElementId};
use crate::geom::Point;
use crate::po::{DuplicateScope, ObjectType, PoError, SpecField, SpecProps};
use crate::rules::GeneratedFields;
use crate::table::{GoodsBuffer, TableError, TableInstance, TableKind};

/// Layer for table modules placed on a drawing.
pub const TABLE_LAYER: &str = "ТАБЛ";

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("kind {0} has no field a product can be written to")]
    NoMappableFields(String),
    #[error("{ids} modules cannot take {generated} generated products")]
    Arity { ids: usize, generated: usize },
    #[error("nothing to specify")]
    Empty,
    #[error(transparent)]
    Drawing(#[from] DrawingError),
    #[error(transparent)]
    Po(#[from] PoError),
    #[error(transparent)]
    Table(#[from] TableError),
}

/// One product row as collected from a PO module.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ProductRow {
    pub element: ElementId,
    pub designation: String,
    pub objecttype: ObjectType,
    pub props: SpecProps,
}

/// Well objects go to well tables only; everything else goes everywhere but
/// well tables.
pub fn routes_to(kind: &TableKind, t: ObjectType) -> bool {
    kind.is_well_kind() == (t == ObjectType::Well)
}

/// Product rows of every PO module in scope, in document order.
/// Axonometric and profile stubs carry designations only and add nothing.
pub fn product_rows(doc: &Document, scope: &DuplicateScope) -> Vec<ProductRow> {
    if !scope.include_po_modules {
        return Vec::new();
    }
    doc.elements()
        .iter()
        .filter_map(|e| e.as_po().map(|po| (e.id, po)))
        .flat_map(|(id, po)| {
            po.products().into_iter().map(move |(designation, props)| ProductRow {
                element: id,
                designation,
                objecttype: po.objecttype(),
                props: props.clone(),
            })
        })
        .collect()
}

/// The rows a kind takes, before mapping.
pub fn routed_rows(doc: &Document, kind: &TableKind, scope: &DuplicateScope) -> Vec<ProductRow> {
    product_rows(doc, scope).into_iter().filter(|r| routes_to(kind, r.objecttype)).collect()
}

/// The designation column of a kind: `marka_poz` or `pozicija`.
fn designation_field(kind: &TableKind) -> Option<SpecField> {
    [SpecField::MarkaPoz, SpecField::Pozicija].into_iter().find(|f| kind.has_field(f.id()))
}

/// Builds a table of `kind` from the document: routes by object type,
/// writes product fields to same-named columns, orders by designation and
/// merges rows that differ only in quantity.
pub fn autofill(doc: &Document, kind: &TableKind, scope: &DuplicateScope) -> Result<TableInstance, PipelineError> {
    if !SpecField::ALL.iter().any(|f| kind.has_field(f.id())) {
        return Err(PipelineError::NoMappableFields(kind.name.clone()));
    }
    let desig = designation_field(kind);
    let rows: Vec<BTreeMap<String, String>> = routed_rows(doc, kind, scope)
        .into_iter()
        .map(|r| {
            let mut m: BTreeMap<String, String> =
                r.props.iter().filter(|(_, v)| !v.is_empty()).map(|(f, v)| (f.id().to_string(), v.to_string())).collect();
            if let Some(d) = desig {
                m.remove(SpecField::MarkaPoz.id());
                m.remove(SpecField::Pozicija.id());
                m.insert(d.id().to_string(), r.designation);
            }
            m
        })
        .collect();
    let mut t = TableInstance::new(kind.clone());
    if !rows.is_empty() {
        t.from_buffer(&GoodsBuffer { rows })?;
        let mut order: Vec<String> = desig.map(|d| d.id().to_string()).into_iter().collect();
        order.extend(kind.fields().into_iter().filter(|f| Some(*f) != desig.map(|d| d.id())).map(str::to_string));
        t.order_rows(&order)?;
        if kind.has_field(SpecField::Kolichestvo.id()) {
            t.merge_identical(SpecField::Kolichestvo.id())?;
        }
    }
    t.clear_journal();
    Ok(t)
}

fn to_props(g: &GeneratedFields) -> Result<SpecProps, PoError> {
    let mut p = SpecProps::new();
    for (k, v) in &g.fields {
        if let Ok(f) = k.parse::<SpecField>() {
            if !v.is_empty() {
                p.set(f, v.clone())?;
            }
        }
    }
    Ok(p)
}

/// Writes generated products into PO modules. With one module every
/// generated entry becomes one of its products (a kit such as a flange
/// joint); otherwise entries pair up with modules one to one.
pub fn group_specify(doc: &mut Document, ids: &[ElementId], generated: &[GeneratedFields]) -> Result<(), PipelineError> {
    if ids.is_empty() || generated.is_empty() {
        return Err(PipelineError::Empty);
    }
    let props = generated.iter().map(to_props).collect::<Result<Vec<_>, _>>()?;
    let plan: Vec<(ElementId, Vec<SpecProps>)> = if ids.len() == 1 {
        vec![(ids[0], props)]
    } else if ids.len() == generated.len() {
        ids.iter().copied().zip(props.into_iter().map(|p| vec![p])).collect()
    } else {
        return Err(PipelineError::Arity { ids: ids.len(), generated: generated.len() });
    };
    for (id, _) in &plan {
        if doc.get(*id)?.as_po().is_none() {
            return Err(DrawingError::NotAPo(*id).into());
        }
    }
    // check every module before touching any
    let mut staged = Vec::with_capacity(plan.len());
    for (id, ps) in plan {
        let mut m = doc.get(id)?.as_po().expect("checked above").clone();
        m.replace_props(ps)?;
        staged.push((id, m));
    }
    for (id, m) in staged {
        doc.get_mut(id)?.body = ElementBody::PoModule(m);
    }
    Ok(())
}

/// Places a table on the drawing as a table module.
pub fn attach_table_module(doc: &mut Document, table: TableInstance, position: Point) -> ElementId {
    doc.add(TABLE_LAYER, position, ElementBody::TableModule(Box::new(table)))
}
