use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use compareviz_core::{Error, ErrorClass};
use serde_json::{json, Value};

/// Uniform error body: `{code, message, details}`.
#[derive(Debug)]
pub struct ApiError {
    pub status: StatusCode,
    pub code: String,
    pub message: String,
    pub details: Value,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &str, message: impl Into<String>) -> Self {
        Self {
            status,
            code: code.to_string(),
            message: message.into(),
            details: json!({}),
        }
    }

    pub fn unknown_session(id: &str) -> Self {
        Self {
            details: json!({ "session_id": id }),
            ..Self::new(StatusCode::NOT_FOUND, "unknown_session", format!("no session '{id}'"))
        }
    }

    pub fn unknown_query(id: &str) -> Self {
        Self {
            details: json!({ "query_id": id }),
            ..Self::new(StatusCode::NOT_FOUND, "unknown_query", format!("no query '{id}' in this session"))
        }
    }
}

fn details(e: &Error) -> Value {
    match e {
        Error::MalformedRow { row, .. } => json!({ "row": row }),
        Error::DuplicateColumn { name, existing } => json!({ "column": name, "existing": existing }),
        Error::UnknownAttribute(a) => json!({ "attribute": a }),
        Error::NotAComparison { diagnostics } => json!({ "diagnostics": diagnostics }),
        Error::CrossAttribute { first, second } => json!({ "attributes": [first, second] }),
        Error::Ambiguous { phrase, candidates } => json!({ "phrase": phrase, "candidates": candidates }),
        Error::Unresolvable { phrase, reason } => json!({ "phrase": phrase, "reason": reason }),
        Error::Plan { phrases, first } => json!({
            "phrases": phrases,
            "first": { "code": first.code(), "message": first.to_string(), "details": details(first) },
        }),
        Error::EmptyResult { reference, predicate } => json!({ "reference": reference, "predicate": predicate }),
        Error::InterpretationIndex { reference, index, available } => {
            json!({ "reference": reference, "index": index, "available": available })
        }
        Error::UnknownReference(r) => json!({ "reference": r }),
        _ => json!({}),
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let status = match e.class() {
            ErrorClass::Input | ErrorClass::Resolution => StatusCode::UNPROCESSABLE_ENTITY,
            ErrorClass::Internal => StatusCode::INTERNAL_SERVER_ERROR,
        };
        Self {
            status,
            code: e.code().to_string(),
            message: e.to_string(),
            details: details(&e),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = json!({ "code": self.code, "message": self.message, "details": self.details });
        (self.status, Json(body)).into_response()
    }
}
