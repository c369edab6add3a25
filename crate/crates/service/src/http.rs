use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::header::{CONTENT_TYPE, ETAG, IF_MATCH};
use axum::http::{HeaderMap, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post, put};
use axum::Router;
use serde_json::Value;

use ivalue_core::format::{serialize, Document, Node};
use ivalue_core::{ElicitationSession, Error as CoreError};

use crate::compute::{self, Request};
use crate::error::{Result, ServiceError};
use crate::store::SessionStore;

pub fn router(store: Arc<SessionStore>) -> Router {
    Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/cards/{slot}", put(set_cards))
        .route("/sessions/{id}/diagnosis", get(diagnosis))
        .route("/sessions/{id}/respond", post(respond))
        .route("/sessions/{id}/finalize", post(finalize))
        .route("/compute/check", post(compute_check))
        .route("/compute/repair", post(compute_repair))
        .route("/compute/scale", post(compute_scale))
        .route("/compute/convert", post(compute_convert))
        .with_state(store)
}

type Store = State<Arc<SessionStore>>;

fn document(status: StatusCode, doc: &Document, revision: Option<u64>) -> Response {
    let mut response = (status, [(CONTENT_TYPE, "application/json")], serialize(doc)).into_response();
    if let Some(rev) = revision {
        let tag = HeaderValue::from_str(&format!("\"{rev}\"")).expect("digits are a valid header");
        response.headers_mut().insert(ETAG, tag);
    }
    response
}

fn session_response(status: StatusCode, s: ElicitationSession) -> Response {
    let rev = s.revision();
    document(status, &Document::Session(s), Some(rev))
}

fn json_body(body: &Bytes) -> Result<Value> {
    serde_json::from_slice(body).map_err(|e| CoreError::Malformed(e.to_string()).into())
}

/// The revision a mutation is based on, from `If-Match: "<revision>"`.
fn revision(headers: &HeaderMap) -> Result<u64> {
    let raw = headers.get(IF_MATCH).ok_or(ServiceError::MissingRevision)?;
    let text = raw.to_str().unwrap_or_default().trim();
    let text = text.strip_prefix("W/").unwrap_or(text).trim_matches('"');
    text.parse().map_err(|_| {
        CoreError::Malformed(format!("If-Match must carry a revision number, got {text:?}")).into()
    })
}

async fn create_session(State(store): Store, body: Bytes) -> Result<Response> {
    let value = json_body(&body)?;
    let root = Node::root(&value);
    let objects = root
        .field("objects")?
        .array()?
        .iter()
        .map(|o| o.str().map(str::to_owned))
        .collect::<ivalue_core::Result<Vec<_>>>()?;
    let s = store.create(objects)?;
    log::info!("created session {}", s.session_id());
    Ok(session_response(StatusCode::CREATED, s))
}

async fn get_session(State(store): Store, Path(id): Path<String>) -> Result<Response> {
    Ok(session_response(StatusCode::OK, store.get(&id)?))
}

async fn set_cards(
    State(store): Store,
    Path((id, slot)): Path<(String, String)>,
    headers: HeaderMap,
    body: Bytes,
) -> Result<Response> {
    // Resolve the session first so an unknown id wins over other errors.
    store.get(&id)?;
    let slot: usize = slot.parse().map_err(|_| ServiceError::BadSlotSyntax(slot))?;
    let expected = revision(&headers)?;
    let value = json_body(&body)?;
    let cards = Node::root(&value).interval()?;
    let (_, s) = store.update(&id, Some(expected), |s, t| s.set_blank_cards(slot, &cards, t))?;
    Ok(session_response(StatusCode::OK, s))
}

/// Diagnosing twice yields the same document, so no revision is required.
async fn diagnosis(State(store): Store, Path(id): Path<String>) -> Result<Response> {
    let (d, s) = store.update(&id, None, |s, t| s.diagnose(t))?;
    Ok(document(StatusCode::OK, &Document::Diagnosis(d), Some(s.revision())))
}

async fn respond(
    State(store): Store,
    Path(id): Path<String>,
    headers: HeaderMap,
    body: Bytes,
) -> Result<Response> {
    store.get(&id)?;
    let expected = revision(&headers)?;
    // Either a JSON string or the bare word.
    let word = match serde_json::from_slice::<Value>(&body) {
        Ok(Value::String(s)) => s,
        _ => String::from_utf8_lossy(&body).trim().to_owned(),
    };
    let accept = match word.as_str() {
        "accept" => true,
        "reject" => false,
        other => {
            return Err(CoreError::SchemaViolation {
                path: "$".into(),
                detail: format!("expected \"accept\" or \"reject\", got {other:?}"),
            }
            .into())
        }
    };
    let (_, s) = store.update(&id, Some(expected), |s, t| s.respond_to_proposal(accept, t))?;
    Ok(session_response(StatusCode::OK, s))
}

async fn finalize(State(store): Store, Path(id): Path<String>, headers: HeaderMap) -> Result<Response> {
    store.get(&id)?;
    let expected = revision(&headers)?;
    let (r, s) = store.update(&id, Some(expected), |s, t| s.finalize(t))?;
    Ok(document(StatusCode::OK, &Document::SessionResult(r), Some(s.revision())))
}

fn request(body: &Bytes) -> Result<Request> {
    let text = std::str::from_utf8(body).map_err(|e| CoreError::Malformed(e.to_string()))?;
    Ok(Request::parse(text)?)
}

async fn compute_check(body: Bytes) -> Result<Response> {
    let req = request(&body)?;
    let z = compute::expect_matrix(&req.document)?;
    let report = compute::check(z, &req.check_params()?)?;
    Ok(document(StatusCode::OK, &Document::ConsistencyReport(report), None))
}

async fn compute_repair(body: Bytes) -> Result<Response> {
    let req = request(&body)?;
    let z = compute::expect_matrix(&req.document)?;
    let solution = compute::repair(z, &req.repair_params()?)?;
    Ok(document(StatusCode::OK, &Document::RepairSolution(solution), None))
}

async fn compute_scale(body: Bytes) -> Result<Response> {
    let req = request(&body)?;
    let scale = compute::scale(&req.document, &req.scale_params()?)?;
    Ok(document(StatusCode::OK, &Document::ValueScale(scale), None))
}

async fn compute_convert(body: Bytes) -> Result<Response> {
    let req = request(&body)?;
    let (from, to) = req.convert_params()?;
    let out = compute::convert(&req.document, from, to)?;
    Ok(document(StatusCode::OK, &out, None))
}
