use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::Arc;

use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::Json;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{ApiError, ApiResult, Shared};
use crate::collation::{anomaly_hints, structure_frequencies, AnomalyThresholds};
use crate::drawing::{
    document_from_str, document_to_string, load_document_with_warnings, save_document, Document, DrawingError, ElementId,
};
use crate::geom::{Mm, Point};
use crate::pipeline::{attach_table_module, autofill, group_specify};
use crate::po::{duplicates_in, list_designations, DuplicateScope};
use crate::rules::GeneratedFields;
use crate::table::{
    extract_editable_region, layout, load_table_kind, paginate, Direction, EditableRegion, GoodsBuffer, HeadMode, TableInstance,
    TableKind, TableOp,
};

pub(crate) struct DocEntry {
    doc: Document,
    /// State at load or last save; the diff endpoint compares against it.
    baseline: Document,
    path: Option<PathBuf>,
    /// Goods buffer shared by the document's tables.
    buffer: GoodsBuffer,
}

type Entry = Arc<tokio::sync::Mutex<DocEntry>>;

fn entry(s: &Shared, d: &str) -> ApiResult<Entry> {
    s.documents.lock().expect("document lock").get(d).cloned().ok_or_else(|| ApiError::not_found(format!("no document {d}")))
}

fn doc_json(doc: &Document) -> Value {
    serde_json::from_str(&document_to_string(doc)).expect("documents serialize to JSON")
}

fn parse_doc(v: &Value) -> ApiResult<(Document, Vec<String>)> {
    Ok(document_from_str(&v.to_string(), "request body")?)
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub(crate) struct CreateBody {
    path: Option<PathBuf>,
    document: Option<Value>,
}

pub(crate) async fn create(State(s): State<Shared>, body: Option<Json<CreateBody>>) -> ApiResult<(StatusCode, Json<Value>)> {
    let b = body.map(|Json(b)| b).unwrap_or_default();
    let (doc, warnings, path) = match (b.path, b.document) {
        (Some(_), Some(_)) => return Err(ApiError::bad_request("give either path or document, not both")),
        (Some(p), None) => {
            let (doc, w) = load_document_with_warnings(&p)?;
            (doc, w, Some(p))
        }
        (None, Some(v)) => {
            let (doc, w) = parse_doc(&v)?;
            (doc, w, None)
        }
        (None, None) => (Document::new(), Vec::new(), None),
    };
    let id = s.new_id();
    let e = DocEntry { baseline: doc.clone(), doc, path, buffer: GoodsBuffer::default() };
    s.documents.lock().expect("document lock").insert(id.clone(), Arc::new(tokio::sync::Mutex::new(e)));
    Ok((StatusCode::CREATED, Json(json!({ "id": id, "warnings": warnings }))))
}

pub(crate) async fn list(State(s): State<Shared>) -> Json<Value> {
    let entries: Vec<(String, Entry)> =
        s.documents.lock().expect("document lock").iter().map(|(k, v)| (k.clone(), v.clone())).collect();
    let mut out = Vec::with_capacity(entries.len());
    for (id, e) in entries {
        let e = e.lock().await;
        out.push(json!({ "id": id, "path": e.path, "elements": e.doc.len() }));
    }
    Json(Value::Array(out))
}

pub(crate) async fn show(State(s): State<Shared>, Path(d): Path<String>) -> ApiResult<Json<Value>> {
    let e = entry(&s, &d)?;
    let e = e.lock().await;
    Ok(Json(doc_json(&e.doc)))
}

pub(crate) async fn replace(State(s): State<Shared>, Path(d): Path<String>, Json(v): Json<Value>) -> ApiResult<Json<Value>> {
    let (doc, warnings) = parse_doc(&v)?;
    let e = entry(&s, &d)?;
    e.lock().await.doc = doc;
    Ok(Json(json!({ "warnings": warnings })))
}

pub(crate) async fn remove(State(s): State<Shared>, Path(d): Path<String>) -> ApiResult<StatusCode> {
    s.documents.lock().expect("document lock").remove(&d).ok_or_else(|| ApiError::not_found(format!("no document {d}")))?;
    Ok(StatusCode::NO_CONTENT)
}

#[derive(Debug, Default, Deserialize)]
#[serde(default)]
pub(crate) struct SaveBody {
    path: Option<PathBuf>,
}

pub(crate) async fn save(State(s): State<Shared>, Path(d): Path<String>, body: Option<Json<SaveBody>>) -> ApiResult<Json<Value>> {
    let e = entry(&s, &d)?;
    let mut e = e.lock().await;
    let path = body
        .and_then(|Json(b)| b.path)
        .or_else(|| e.path.clone())
        .ok_or_else(|| ApiError::bad_request("the document has no file yet; give a path"))?;
    save_document(&e.doc, &path)?;
    e.baseline = e.doc.clone();
    e.path = Some(path.clone());
    Ok(Json(json!({ "path": path })))
}

/// Element-level differences between two documents.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct DocumentDiff {
    pub equal: bool,
    pub added: Vec<ElementId>,
    pub removed: Vec<ElementId>,
    pub changed: Vec<ElementId>,
}

impl DocumentDiff {
    pub fn between(old: &Document, new: &Document) -> Self {
        let a: BTreeMap<ElementId, _> = old.elements().iter().map(|e| (e.id, e)).collect();
        let b: BTreeMap<ElementId, _> = new.elements().iter().map(|e| (e.id, e)).collect();
        let added: Vec<_> = b.keys().filter(|k| !a.contains_key(k)).copied().collect();
        let removed: Vec<_> = a.keys().filter(|k| !b.contains_key(k)).copied().collect();
        let changed: Vec<_> = a.iter().filter(|(k, e)| b.get(k).is_some_and(|f| f != *e)).map(|(k, _)| *k).collect();
        DocumentDiff { equal: old == new, added, removed, changed }
    }
}

pub(crate) async fn diff(State(s): State<Shared>, Path(d): Path<String>) -> ApiResult<Json<DocumentDiff>> {
    let e = entry(&s, &d)?;
    let e = e.lock().await;
    Ok(Json(DocumentDiff::between(&e.baseline, &e.doc)))
}

#[derive(Debug, Deserialize)]
pub(crate) struct ScopeQuery {
    scope: Option<String>,
}

fn scope_of(q: &ScopeQuery) -> ApiResult<DuplicateScope> {
    match &q.scope {
        None => Ok(DuplicateScope::ALL),
        Some(s) => Ok(DuplicateScope::parse_list(s)?),
    }
}

pub(crate) async fn duplicates(
    State(s): State<Shared>,
    Path(d): Path<String>,
    Query(q): Query<ScopeQuery>,
) -> ApiResult<Json<Value>> {
    let scope = scope_of(&q)?;
    let e = entry(&s, &d)?;
    let e = e.lock().await;
    let file = e.path.clone().unwrap_or_else(|| PathBuf::from(&d));
    Ok(Json(json!(duplicates_in(&[(file, e.doc.clone())], &scope))))
}

pub(crate) async fn po_structures(State(s): State<Shared>, Path(d): Path<String>) -> ApiResult<Json<Value>> {
    let e = entry(&s, &d)?;
    let e = e.lock().await;
    let names: Vec<String> = list_designations(&e.doc).into_iter().map(|x| x.designation).collect();
    let freq: Vec<Value> =
        structure_frequencies(&names).into_iter().map(|(sig, n)| json!({ "signature": sig, "count": n })).collect();
    Ok(Json(json!({
        "frequencies": freq,
        "hints": anomaly_hints(&names, AnomalyThresholds::default()),
    })))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct SpecifyBody {
    ids: Vec<ElementId>,
    #[serde(default)]
    generated: Vec<GeneratedFields>,
    /// Finished selection sessions whose results are used, in order, after `generated`.
    #[serde(default)]
    sessions: Vec<String>,
}

pub(crate) async fn specify(
    State(s): State<Shared>,
    Path(d): Path<String>,
    Json(b): Json<SpecifyBody>,
) -> ApiResult<Json<Value>> {
    let mut generated = b.generated;
    {
        let sessions = s.sessions.lock().expect("session lock");
        for id in &b.sessions {
            let slot = sessions.get(id).ok_or_else(|| ApiError::not_found(format!("no session {id}")))?;
            generated.push(slot.session.finish()?);
        }
    }
    let e = entry(&s, &d)?;
    let mut e = e.lock().await;
    group_specify(&mut e.doc, &b.ids, &generated)?;
    Ok(Json(json!({ "specified": b.ids })))
}

fn load_kind(s: &Shared, name: &str) -> ApiResult<TableKind> {
    let dir = s.config.kinds_dir.as_ref().ok_or_else(|| ApiError::not_found("no kinds directory is configured"))?;
    if name.is_empty() || !name.chars().all(|c| c.is_alphanumeric() || c == '_' || c == '-') {
        return Err(ApiError::bad_request(format!("bad kind name {name:?}")));
    }
    let path = dir.join(format!("{name}.json"));
    if !path.is_file() {
        return Err(ApiError::not_found(format!("no kind {name}")));
    }
    Ok(load_table_kind(&path)?)
}

pub(crate) async fn kinds(State(s): State<Shared>) -> ApiResult<Json<Value>> {
    let dir = s.config.kinds_dir.as_ref().ok_or_else(|| ApiError::not_found("no kinds directory is configured"))?;
    let rd = std::fs::read_dir(dir).map_err(|e| ApiError::not_found(format!("{}: {e}", dir.display())))?;
    let mut names: Vec<String> = rd
        .filter_map(|e| e.ok())
        .filter_map(|e| e.file_name().to_str().and_then(|n| n.strip_suffix(".json")).map(str::to_string))
        .collect();
    names.sort();
    let mut out = Vec::new();
    for n in names {
        let k = load_kind(&s, &n)?;
        out.push(json!({ "file": n, "name": k.name, "class": k.class, "fields": k.fields() }));
    }
    Ok(Json(Value::Array(out)))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct AddTableBody {
    kind: String,
    #[serde(default)]
    position: Option<Point>,
    #[serde(default)]
    autofill: bool,
    /// Modules autofill collects from; all of them by default.
    #[serde(default)]
    scope: Option<DuplicateScope>,
}

pub(crate) async fn add_table(
    State(s): State<Shared>,
    Path(d): Path<String>,
    Json(b): Json<AddTableBody>,
) -> ApiResult<(StatusCode, Json<Value>)> {
    let kind = load_kind(&s, &b.kind)?;
    let e = entry(&s, &d)?;
    let mut e = e.lock().await;
    let table =
        if b.autofill { autofill(&e.doc, &kind, &b.scope.unwrap_or(DuplicateScope::ALL))? } else { TableInstance::new(kind) };
    let body = json!(table);
    let id = attach_table_module(&mut e.doc, table, b.position.unwrap_or(Point::ORIGIN));
    Ok((StatusCode::CREATED, Json(json!({ "id": id, "table": body }))))
}

fn table_of(doc: &Document, t: u64) -> ApiResult<&TableInstance> {
    let id = ElementId(t);
    Ok(doc.get(id)?.as_table().ok_or(DrawingError::NotATable(id))?)
}

pub(crate) async fn show_table(State(s): State<Shared>, Path((d, t)): Path<(String, u64)>) -> ApiResult<Json<Value>> {
    let e = entry(&s, &d)?;
    let e = e.lock().await;
    Ok(Json(json!(table_of(&e.doc, t)?)))
}

pub(crate) async fn table_layout(State(s): State<Shared>, Path((d, t)): Path<(String, u64)>) -> ApiResult<Json<Value>> {
    let e = entry(&s, &d)?;
    let e = e.lock().await;
    Ok(Json(json!(layout(table_of(&e.doc, t)?))))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PaginateOp {
    #[allow(dead_code)]
    op: String,
    max_height: Mm,
    #[serde(default = "default_direction")]
    direction: Direction,
    #[serde(default = "default_mode")]
    mode: HeadMode,
}

fn default_direction() -> Direction {
    Direction::Right
}

fn default_mode() -> HeadMode {
    HeadMode::RepeatHeader
}

enum Step {
    Table(TableOp),
    Paginate(PaginateOp),
}

fn parse_step(i: usize, v: Value) -> ApiResult<Step> {
    let bad = |e: serde_json::Error| ApiError::bad_request(format!("op {i}: {e}"));
    if v.get("op").and_then(Value::as_str) == Some("paginate") {
        serde_json::from_value(v).map(Step::Paginate).map_err(bad)
    } else {
        serde_json::from_value(v).map(Step::Table).map_err(bad)
    }
}

/// Applies one operation or a list of them. Either all succeed or the
/// table and the buffer stay as they were.
pub(crate) async fn table_ops(
    State(s): State<Shared>,
    Path((d, t)): Path<(String, u64)>,
    Json(body): Json<Value>,
) -> ApiResult<Json<Value>> {
    let items = match body {
        Value::Array(v) => v,
        other => vec![other],
    };
    let steps = items.into_iter().enumerate().map(|(i, v)| parse_step(i, v)).collect::<ApiResult<Vec<_>>>()?;
    let e = entry(&s, &d)?;
    let mut e = e.lock().await;
    let mut table = table_of(&e.doc, t)?.clone();
    let mut buffer = e.buffer.clone();
    let mut results = Vec::with_capacity(steps.len());
    for (i, step) in steps.into_iter().enumerate() {
        let fail = |err: crate::table::TableError| ApiError::bad_request(format!("op {i}: {err}"));
        match step {
            Step::Table(op) => {
                let to_buffer = op == TableOp::ToBuffer;
                table.apply(op, &mut buffer).map_err(fail)?;
                results.push(if to_buffer { json!({ "buffer": buffer }) } else { Value::Null });
            }
            Step::Paginate(p) => {
                let chunks = paginate(&table, p.max_height, p.direction, p.mode).map_err(fail)?;
                results.push(json!({ "chunks": chunks }));
            }
        }
    }
    *e.doc.table_mut(ElementId(t))? = table;
    e.buffer = buffer;
    let table = json!(table_of(&e.doc, t)?);
    Ok(Json(json!({ "results": results, "table": table })))
}

#[derive(Debug, Deserialize)]
pub(crate) struct PointQuery {
    x: f64,
    y: f64,
}

pub(crate) async fn get_region(
    State(s): State<Shared>,
    Path((d, t)): Path<(String, u64)>,
    Query(q): Query<PointQuery>,
) -> ApiResult<Json<Value>> {
    let e = entry(&s, &d)?;
    let e = e.lock().await;
    let r = extract_editable_region(table_of(&e.doc, t)?, Point::mm(q.x, q.y))?;
    Ok(Json(json!({ "region": r, "grid": r.to_flat_json() })))
}

pub(crate) async fn put_region(
    State(s): State<Shared>,
    Path((d, t)): Path<(String, u64)>,
    Json(r): Json<EditableRegion>,
) -> ApiResult<Json<Value>> {
    let e = entry(&s, &d)?;
    let mut e = e.lock().await;
    let mut table = table_of(&e.doc, t)?.clone();
    r.write_back(&mut table)?;
    let body = json!(table);
    *e.doc.table_mut(ElementId(t))? = table;
    Ok(Json(body))
}
