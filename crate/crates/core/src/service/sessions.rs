use std::time::Instant;

use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::Json;
use serde::Deserialize;
use serde_json::{json, Value};

use super::{ApiError, ApiResult, SessionSlot, Shared};
use crate::rules::{start_session, Answer, SelectionSession};

#[derive(Debug, Deserialize)]
pub(crate) struct CreateBody {
    table: String,
    row: usize,
}

#[derive(Debug, Deserialize)]
pub(crate) struct AnswerBody {
    answer: Answer,
}

fn view(id: &str, s: &SelectionSession) -> Value {
    json!({
        "id": id,
        "table": s.table(),
        "row": s.row_index(),
        "status": s.status(),
        "prompt": s.next_prompt(),
        "answers": s.answers(),
    })
}

/// Runs `f` on a live session, refreshing its idle timer. Idle sessions
/// are expired on access.
fn with_session<T>(s: &Shared, id: &str, f: impl FnOnce(&mut SelectionSession) -> ApiResult<T>) -> ApiResult<T> {
    let mut sessions = s.sessions.lock().expect("session lock");
    let now = Instant::now();
    let ttl = s.config.session_ttl;
    let stale: Vec<String> =
        sessions.iter().filter(|(_, v)| now.duration_since(v.touched) >= ttl).map(|(k, _)| k.clone()).collect();
    if !stale.is_empty() {
        let mut expired = s.expired.lock().expect("session lock");
        for k in stale {
            sessions.remove(&k);
            expired.insert(k);
        }
    }
    match sessions.get_mut(id) {
        Some(slot) => {
            slot.touched = now;
            f(&mut slot.session)
        }
        None if s.expired.lock().expect("session lock").contains(id) => {
            Err(ApiError { status: StatusCode::GONE, message: format!("session {id} expired") })
        }
        None => Err(ApiError::not_found(format!("no session {id}"))),
    }
}

pub(crate) async fn create(State(s): State<Shared>, Json(b): Json<CreateBody>) -> ApiResult<(StatusCode, Json<Value>)> {
    let session = start_session(s.catalog()?, &b.table, b.row)?;
    let id = s.new_id();
    let body = view(&id, &session);
    s.sessions.lock().expect("session lock").insert(id, SessionSlot { session, touched: Instant::now() });
    Ok((StatusCode::CREATED, Json(body)))
}

pub(crate) async fn show(State(s): State<Shared>, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    with_session(&s, &id, |sess| Ok(Json(view(&id, sess))))
}

pub(crate) async fn prompt(State(s): State<Shared>, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    with_session(&s, &id, |sess| Ok(Json(json!({ "status": sess.status(), "prompt": sess.next_prompt() }))))
}

pub(crate) async fn answer(State(s): State<Shared>, Path(id): Path<String>, Json(b): Json<AnswerBody>) -> ApiResult<Json<Value>> {
    with_session(&s, &id, |sess| {
        sess.answer(b.answer)?;
        Ok(Json(json!({ "status": sess.status(), "prompt": sess.next_prompt() })))
    })
}

pub(crate) async fn finish(State(s): State<Shared>, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    with_session(&s, &id, |sess| Ok(Json(json!(sess.finish()?))))
}

pub(crate) async fn remove(State(s): State<Shared>, Path(id): Path<String>) -> ApiResult<StatusCode> {
    with_session(&s, &id, |_| Ok(()))?;
    s.sessions.lock().expect("session lock").remove(&id);
    Ok(StatusCode::NO_CONTENT)
}
