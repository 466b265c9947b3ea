use std::collections::HashMap;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{any, get, post, put};
use axum::{Json, Router};
use qualibd_core::dsl::{format, FormatError};
use qualibd_core::export::{render_svg, to_dot, to_json};
use qualibd_core::metamodel::{style_for, EdgeKind, NodeKind, ENDPOINT_RULES};
use qualibd_core::{validate, EditCommand};
use serde_json::{json, Value};

use crate::store::{valid_id, Store, StoreError};

type Shared = Arc<Store>;

pub(crate) fn error(status: StatusCode, code: &str, message: impl Into<String>) -> Response {
    (
        status,
        Json(json!({ "error": code, "message": message.into() })),
    )
        .into_response()
}

impl IntoResponse for StoreError {
    fn into_response(self) -> Response {
        match self {
            StoreError::NotFound(_) => error(StatusCode::NOT_FOUND, "not-found", self.to_string()),
            StoreError::Stale { current } => (
                StatusCode::CONFLICT,
                Json(json!({
                    "error": "stale-revision",
                    "message": self.to_string(),
                    "current_revision": current,
                })),
            )
                .into_response(),
            StoreError::Parse(errors) => (
                StatusCode::UNPROCESSABLE_ENTITY,
                Json(json!({ "error": "parse", "errors": errors })),
            )
                .into_response(),
            StoreError::Io(e) => {
                log::error!("store write failed: {e}");
                error(StatusCode::INTERNAL_SERVER_ERROR, "io", e.to_string())
            }
        }
    }
}

fn document(text: String) -> Response {
    ([(header::CONTENT_TYPE, "application/json")], text).into_response()
}

fn unknown_id(id: &str) -> Option<Response> {
    (!valid_id(id)).then(|| StoreError::NotFound(id.to_owned()).into_response())
}

fn json_body(body: &[u8]) -> Result<serde_json::Map<String, Value>, String> {
    match serde_json::from_slice::<Value>(body) {
        Ok(Value::Object(map)) => Ok(map),
        Ok(_) => Err("expected a JSON object".to_owned()),
        Err(e) => Err(e.to_string()),
    }
}

async fn list_models(State(store): State<Shared>) -> Response {
    Json(store.list().await).into_response()
}

async fn create_model(State(store): State<Shared>, body: Bytes) -> Response {
    let map = match json_body(&body) {
        Ok(map) => map,
        Err(message) => return error(StatusCode::BAD_REQUEST, "malformed", message),
    };
    let Some(name) = map.get("name").and_then(Value::as_str) else {
        return error(
            StatusCode::BAD_REQUEST,
            "malformed",
            "`name` must be a string",
        );
    };
    match store.create(name).await {
        Ok(model) => (
            StatusCode::CREATED,
            [(header::LOCATION, format!("/api/models/{}", model.id().0))],
            Json(json!({ "id": model.id().0, "name": model.name(), "revision": model.revision() })),
        )
            .into_response(),
        Err(e) => e.into_response(),
    }
}

async fn get_model(State(store): State<Shared>, Path(id): Path<String>) -> Response {
    if let Some(r) = unknown_id(&id) {
        return r;
    }
    match store.get(&id).await {
        Ok(model) => document(to_json(&model)),
        Err(e) => e.into_response(),
    }
}

async fn delete_model(State(store): State<Shared>, Path(id): Path<String>) -> Response {
    if let Some(r) = unknown_id(&id) {
        return r;
    }
    match store.delete(&id).await {
        Ok(()) => StatusCode::NO_CONTENT.into_response(),
        Err(e) => e.into_response(),
    }
}

async fn apply_command(
    State(store): State<Shared>,
    Path(id): Path<String>,
    body: Bytes,
) -> Response {
    if let Some(r) = unknown_id(&id) {
        return r;
    }
    let mut map = match json_body(&body) {
        Ok(map) => map,
        Err(message) => return error(StatusCode::BAD_REQUEST, "malformed", message),
    };
    let Some(base_revision) = map.remove("base_revision").and_then(|v| v.as_u64()) else {
        return error(
            StatusCode::BAD_REQUEST,
            "malformed",
            "`base_revision` must be a non-negative integer",
        );
    };
    let command: EditCommand = match serde_json::from_value(Value::Object(map)) {
        Ok(command) => command,
        Err(e) => return error(StatusCode::BAD_REQUEST, "malformed", e.to_string()),
    };
    match store.apply(&id, base_revision, command).await {
        Ok((outcome, revision)) => {
            let mut body = serde_json::to_value(&outcome).expect("outcomes serialize");
            body["revision"] = revision.into();
            Json(body).into_response()
        }
        Err(e) => e.into_response(),
    }
}

async fn diagnostics(State(store): State<Shared>, Path(id): Path<String>) -> Response {
    if let Some(r) = unknown_id(&id) {
        return r;
    }
    match store.get(&id).await {
        Ok(model) => Json(validate(&model)).into_response(),
        Err(e) => e.into_response(),
    }
}

async fn export(
    State(store): State<Shared>,
    Path(id): Path<String>,
    Query(query): Query<HashMap<String, String>>,
) -> Response {
    if let Some(r) = unknown_id(&id) {
        return r;
    }
    let model = match store.get(&id).await {
        Ok(model) => model,
        Err(e) => return e.into_response(),
    };
    let (content_type, text) = match query.get("format").map(String::as_str) {
        Some("dot") => ("text/vnd.graphviz; charset=utf-8", to_dot(&model)),
        Some("svg") => ("image/svg+xml", render_svg(&model)),
        Some("json") => ("application/json", to_json(&model)),
        Some("qbd") => match format(&model) {
            Ok(text) => ("text/plain; charset=utf-8", text),
            Err(FormatError::Structural(found)) => {
                return (
                    StatusCode::UNPROCESSABLE_ENTITY,
                    Json(json!({ "error": "structural", "diagnostics": found })),
                )
                    .into_response()
            }
        },
        other => {
            return error(
                StatusCode::BAD_REQUEST,
                "unknown-format",
                format!("format must be dot, svg, qbd or json, got {other:?}"),
            )
        }
    };
    ([(header::CONTENT_TYPE, content_type)], text).into_response()
}

async fn replace_dsl(
    State(store): State<Shared>,
    Path(id): Path<String>,
    Query(query): Query<HashMap<String, String>>,
    body: Bytes,
) -> Response {
    if let Some(r) = unknown_id(&id) {
        return r;
    }
    let base_revision = match query.get("base_revision").map(|v| v.parse::<u64>()) {
        None => None,
        Some(Ok(v)) => Some(v),
        Some(Err(_)) => {
            return error(
                StatusCode::BAD_REQUEST,
                "malformed",
                "`base_revision` must be an integer",
            )
        }
    };
    let Ok(text) = std::str::from_utf8(&body) else {
        return error(StatusCode::BAD_REQUEST, "malformed", "body is not UTF-8");
    };
    match store.replace_from_dsl(&id, text, base_revision).await {
        Ok(model) => document(to_json(&model)),
        Err(e) => e.into_response(),
    }
}

async fn metamodel() -> Response {
    let nodes: Vec<Value> = NodeKind::ALL
        .iter()
        .map(|&k| json!({ "kind": k, "tier": k.tier(), "style": style_for(k) }))
        .collect();
    let edges: Vec<Value> = EdgeKind::ALL
        .iter()
        .map(|&k| json!({ "kind": k, "label": k.supports_label(), "style": style_for(k) }))
        .collect();
    Json(json!({ "nodes": nodes, "edges": edges, "rules": ENDPOINT_RULES })).into_response()
}

async fn unknown_endpoint() -> Response {
    error(StatusCode::NOT_FOUND, "not-found", "no such endpoint")
}

pub fn routes(store: Shared) -> Router {
    Router::new()
        .route("/api/models", get(list_models).post(create_model))
        .route("/api/models/{id}", get(get_model).delete(delete_model))
        .route("/api/models/{id}/commands", post(apply_command))
        .route("/api/models/{id}/diagnostics", get(diagnostics))
        .route("/api/models/{id}/export", get(export))
        .route("/api/models/{id}/dsl", put(replace_dsl))
        .route("/api/metamodel", get(metamodel))
        .route("/api/{*rest}", any(unknown_endpoint))
        .with_state(store)
}
