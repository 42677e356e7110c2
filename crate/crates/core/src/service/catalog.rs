use axum::extract::{Path, Query, State};
use axum::Json;
use serde::Deserialize;
use serde_json::{json, Value};

use super::{ApiError, ApiResult, Shared};
use crate::catalog::{catalog_stats, filter_tables, query_rows, FilterCriteria, IntervalKey, KipClass, KipQuery, Predicate};
use crate::po::ObjectType;

#[derive(Debug, Default, Deserialize)]
#[serde(default)]
pub(crate) struct ListQuery {
    profile: Option<String>,
    object_type: Option<ObjectType>,
    group: Option<String>,
    kip_class: Option<KipClass>,
    kip_letter: Option<char>,
    dn: Option<f64>,
    p: Option<f64>,
    t: Option<f64>,
    d: Option<f64>,
    thread: Option<f64>,
}

impl ListQuery {
    fn criteria(self) -> FilterCriteria {
        let kip = (self.kip_class.is_some() || self.kip_letter.is_some())
            .then_some(KipQuery { class: self.kip_class, letter: self.kip_letter });
        let intervals = [
            (IntervalKey::Dn, self.dn),
            (IntervalKey::P, self.p),
            (IntervalKey::T, self.t),
            (IntervalKey::D, self.d),
            (IntervalKey::Thread, self.thread),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.map(|v| (k, v)))
        .collect();
        FilterCriteria { profile: self.profile, object_type: self.object_type, group_keyword: self.group, kip, intervals }
    }
}

pub(crate) async fn list(State(s): State<Shared>, Query(q): Query<ListQuery>) -> ApiResult<Json<Value>> {
    let set = s.catalog()?;
    Ok(Json(json!(filter_tables(set, &q.criteria()))))
}

pub(crate) async fn stats(State(s): State<Shared>) -> ApiResult<Json<Value>> {
    Ok(Json(json!(catalog_stats(s.catalog()?, &[]))))
}

/// `eq:v`, `contains:v` or `range:a..b` with either end optional.
fn parse_predicate(col: &str, text: &str) -> Result<Predicate, ApiError> {
    let bad = || ApiError::bad_request(format!("filter {col}={text:?}: expected eq:, contains: or range:"));
    let (op, arg) = text.split_once(':').ok_or_else(bad)?;
    match op {
        "eq" => Ok(Predicate::Equals { value: arg.to_string() }),
        "contains" => Ok(Predicate::Contains { value: arg.to_string() }),
        "range" => {
            let (a, b) = arg.split_once("..").ok_or_else(bad)?;
            let num = |s: &str| -> Result<Option<f64>, ApiError> {
                let s = s.trim();
                if s.is_empty() {
                    Ok(None)
                } else {
                    s.replace(',', ".").parse().map(Some).map_err(|_| bad())
                }
            };
            Ok(Predicate::Range { min: num(a)?, max: num(b)? })
        }
        _ => Err(bad()),
    }
}

pub(crate) async fn rows(
    State(s): State<Shared>,
    Path(table): Path<String>,
    Query(filters): Query<Vec<(String, String)>>,
) -> ApiResult<Json<Value>> {
    let set = s.catalog()?;
    let data = set.table(&table)?;
    let preds = filters.iter().map(|(c, v)| Ok((c.clone(), parse_predicate(c, v)?))).collect::<Result<Vec<_>, ApiError>>()?;
    let hits = query_rows(data, &preds)?;
    let rows: Vec<Value> = hits.iter().map(|&i| json!({ "index": i, "cells": data.rows[i] })).collect();
    Ok(Json(json!({
        "table": table,
        "columns": set.structure_of(&table)?.columns,
        "rows": rows,
    })))
}
