use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use serde_json::{json, Map, Value};

use ivalue_core::format::to_canonical_string;
use ivalue_core::Error as CoreError;

pub type Result<T, E = ServiceError> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum ServiceError {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("no session with id {0:?}")]
    UnknownSession(String),
    #[error("slot {0:?} is not a slot index")]
    BadSlotSyntax(String),
    #[error("revision {expected} is stale; the session is at revision {actual}")]
    Conflict { expected: u64, actual: u64 },
    #[error("mutations must carry the current revision in an If-Match header")]
    MissingRevision,
    #[error("event log: {0}")]
    Storage(String),
}

impl From<std::io::Error> for ServiceError {
    fn from(e: std::io::Error) -> Self {
        ServiceError::Storage(e.to_string())
    }
}

impl ServiceError {
    pub fn name(&self) -> &'static str {
        match self {
            ServiceError::Core(e) => e.name(),
            ServiceError::UnknownSession(_) => "UnknownSession",
            ServiceError::BadSlotSyntax(_) => "BadSlot",
            ServiceError::Conflict { .. } => "Conflict",
            ServiceError::MissingRevision => "MissingRevision",
            ServiceError::Storage(_) => "StorageError",
        }
    }

    pub fn status(&self) -> StatusCode {
        match self {
            ServiceError::Core(e) => match e {
                CoreError::BadSlot { .. } => StatusCode::NOT_FOUND,
                CoreError::IncompleteCards(_)
                | CoreError::NoPendingProposal
                | CoreError::NotAccepted
                | CoreError::InvalidPhase(_) => StatusCode::CONFLICT,
                _ => StatusCode::BAD_REQUEST,
            },
            ServiceError::UnknownSession(_) | ServiceError::BadSlotSyntax(_) => StatusCode::NOT_FOUND,
            ServiceError::Conflict { .. } => StatusCode::CONFLICT,
            ServiceError::MissingRevision => StatusCode::PRECONDITION_REQUIRED,
            ServiceError::Storage(_) => StatusCode::INTERNAL_SERVER_ERROR,
        }
    }

    /// `{error_name, path?, detail}`.
    pub fn body(&self) -> Value {
        let mut m = Map::new();
        m.insert("detail".into(), json!(self.to_string()));
        m.insert("error_name".into(), json!(self.name()));
        if let ServiceError::Core(e) = self {
            if let Some(path) = e.path() {
                m.insert("path".into(), json!(path));
            }
        }
        Value::Object(m)
    }
}

impl IntoResponse for ServiceError {
    fn into_response(self) -> Response {
        if self.status().is_server_error() {
            log::error!("{self}");
        }
        (
            self.status(),
            [(axum::http::header::CONTENT_TYPE, "application/json")],
            to_canonical_string(&self.body()),
        )
            .into_response()
    }
}
