use std::fs;
use std::path::Path;

use log::warn;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::display::{regenerate, DisplayList};
use super::{Document, DrawingError, Element, ElementBody, ElementId, ElementKind};
use crate::geom::Point;
use crate::table::TableInstance;

pub const DOC_SCHEMA: &str = "specforge-doc/1";

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawElement {
    id: ElementId,
    layer: String,
    kind: ElementKind,
    position: Point,
    payload: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    display: Option<DisplayList>,
}

#[derive(Serialize)]
struct RawDocument<'a> {
    schema: &'a str,
    elements: Vec<RawElement>,
}

pub(crate) fn body_to_json(body: &ElementBody) -> Value {
    let v = match body {
        ElementBody::Line(l) => serde_json::to_value(l),
        ElementBody::Text(t) => serde_json::to_value(t),
        ElementBody::PoModule(p) => serde_json::to_value(p),
        ElementBody::TableModule(t) => serde_json::to_value(t.as_ref()),
        ElementBody::AxonoSchemeStub(s) | ElementBody::VkProfileStub(s) => serde_json::to_value(s),
    };
    v.expect("element payloads serialize to JSON")
}

pub(crate) fn body_from_json(kind: ElementKind, payload: Value) -> Result<ElementBody, serde_json::Error> {
    Ok(match kind {
        ElementKind::Line => ElementBody::Line(serde_json::from_value(payload)?),
        ElementKind::Text => ElementBody::Text(serde_json::from_value(payload)?),
        ElementKind::PoModule => ElementBody::PoModule(serde_json::from_value(payload)?),
        ElementKind::TableModule => ElementBody::TableModule(Box::new(serde_json::from_value::<TableInstance>(payload)?)),
        ElementKind::AxonoSchemeStub => ElementBody::AxonoSchemeStub(serde_json::from_value(payload)?),
        ElementKind::VkProfileStub => ElementBody::VkProfileStub(serde_json::from_value(payload)?),
    })
}

/// Serializes a document. The output is deterministic for equal documents.
pub fn document_to_string(doc: &Document) -> String {
    let elements = doc
        .elements()
        .iter()
        .map(|e| RawElement {
            id: e.id,
            layer: e.layer.clone(),
            kind: e.kind(),
            position: e.position,
            payload: body_to_json(&e.body),
            display: regenerate(e),
        })
        .collect();
    let raw = RawDocument { schema: DOC_SCHEMA, elements };
    let mut s = serde_json::to_string_pretty(&raw).expect("documents serialize to JSON");
    s.push('\n');
    s
}

pub fn document_from_str(text: &str, path: &str) -> Result<(Document, Vec<String>), DrawingError> {
    let parse_err = |message: String| DrawingError::Parse { path: path.to_string(), message };
    let root: Value = serde_json::from_str(text).map_err(|e| parse_err(e.to_string()))?;
    let Value::Object(mut top) = root else {
        return Err(parse_err("top level is not an object".into()));
    };
    match top.get("schema") {
        Some(Value::String(s)) if s == DOC_SCHEMA => {}
        Some(Value::String(s)) => {
            return Err(DrawingError::Schema { path: path.to_string(), found: s.clone(), expected: DOC_SCHEMA })
        }
        _ => return Err(parse_err("missing \"schema\"".into())),
    }
    let elements = match top.remove("elements") {
        Some(Value::Array(a)) => a,
        None => Vec::new(),
        Some(_) => return Err(parse_err("\"elements\" is not an array".into())),
    };
    let mut out = Vec::with_capacity(elements.len());
    let mut warnings = Vec::new();
    for (i, v) in elements.into_iter().enumerate() {
        let ctx = |msg: String| parse_err(format!("element #{i}: {msg}"));
        let raw: RawElement = serde_json::from_value(v).map_err(|e| ctx(e.to_string()))?;
        let body = body_from_json(raw.kind, raw.payload).map_err(|e| ctx(format!("id {}: {e}", raw.id)))?;
        let element = Element { id: raw.id, layer: raw.layer, position: raw.position, body };
        if let Some(stored) = raw.display {
            if regenerate(&element).as_ref() != Some(&stored) {
                let msg = format!("{path}: element {} stored display list differs from regenerated one", element.id);
                warn!("{msg}");
                warnings.push(msg);
            }
        }
        out.push(element);
    }
    Ok((Document::from_elements(out)?, warnings))
}

/// Loads a document and returns the display-list mismatch warnings.
pub fn load_document_with_warnings(path: &Path) -> Result<(Document, Vec<String>), DrawingError> {
    let shown = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|source| DrawingError::Io { path: shown.clone(), source })?;
    let (mut doc, warnings) = document_from_str(&text, &shown)?;
    doc.source_path = Some(path.to_path_buf());
    Ok((doc, warnings))
}

pub fn load_document(path: &Path) -> Result<Document, DrawingError> {
    load_document_with_warnings(path).map(|(d, _)| d)
}

pub fn save_document(doc: &Document, path: &Path) -> Result<(), DrawingError> {
    fs::write(path, document_to_string(doc)).map_err(|source| DrawingError::Io { path: path.display().to_string(), source })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::drawing::{StubData, TextData, PO_FONT_HEIGHT};
    use crate::po::{ObjectType, PoModule, PoType, SpecField, SpecProps};

    fn sample() -> Document {
        let mut doc = Document::new();
        let props = SpecProps::new().with(SpecField::Naimenovanie, "Задвижка чугунная").unwrap();
        let po = PoModule::new(vec!["К1".into()], PoType::OneProduct, ObjectType::Pipe, vec![props]).unwrap();
        doc.add("ПО", Point::mm(12.5, -3.25), ElementBody::PoModule(po));
        doc.add("0", Point::ORIGIN, ElementBody::Text(TextData { lines: vec!["Примечание".into()], height: PO_FONT_HEIGHT }));
        doc.add("0", Point::ORIGIN, ElementBody::AxonoSchemeStub(StubData { designations: vec!["A1".into()] }));
        doc
    }

    #[test]
    fn round_trip_in_memory() {
        let doc = sample();
        let s = document_to_string(&doc);
        let (back, warnings) = document_from_str(&s, "mem").unwrap();
        assert!(warnings.is_empty());
        assert_eq!(back, doc);
        assert_eq!(document_to_string(&back), s);
        assert!(s.contains("Задвижка чугунная"));
    }

    #[test]
    fn empty_document() {
        let (d, _) = document_from_str(r#"{"schema":"specforge-doc/1","elements":[]}"#, "e").unwrap();
        assert!(d.is_empty());
    }

    #[test]
    fn rejects_duplicate_ids() {
        let text = r#"{"schema":"specforge-doc/1","elements":[
            {"id":1,"layer":"0","kind":"Text","position":[0,0],"payload":{"lines":["a"]}},
            {"id":1,"layer":"0","kind":"Text","position":[0,0],"payload":{"lines":["b"]}}]}"#;
        assert!(matches!(document_from_str(text, "d"), Err(DrawingError::DuplicateId(ElementId(1)))));
    }

    #[test]
    fn rejects_other_schema() {
        let r = document_from_str(r#"{"schema":"specforge-doc/9","elements":[]}"#, "d");
        assert!(matches!(r, Err(DrawingError::Schema { .. })));
    }

    #[test]
    fn syntax_error_has_line() {
        let err = document_from_str("{\n\"schema\": \"specforge-doc/1\",\n\"elements\": [\n}", "bad.json").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("bad.json") && msg.contains("line 4"), "{msg}");
    }

    #[test]
    fn element_error_names_element() {
        let text = r#"{"schema":"specforge-doc/1","elements":[
            {"id":7,"layer":"0","kind":"PoModule","position":[0,0],"payload":{"lines":["1","2"],"props":[{},{}]}}]}"#;
        let msg = document_from_str(text, "d").unwrap_err().to_string();
        assert!(msg.contains("element #0") && msg.contains("id 7"), "{msg}");
    }

    #[test]
    fn stale_display_warns() {
        let text = r#"{"schema":"specforge-doc/1","elements":[
            {"id":1,"layer":"0","kind":"PoModule","position":[0,0],"payload":{"lines":["K1"],"props":[{}]},"display":[]}]}"#;
        let (_, warnings) = document_from_str(text, "d").unwrap();
        assert_eq!(warnings.len(), 1);
    }
}
