use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde::Serialize;

/// JSON error body: `{"error": <name>, "message": <text>}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorBody {
    pub error: String,
    pub message: String,
}

#[derive(Debug, Clone)]
pub struct ApiError {
    pub status: StatusCode,
    pub body: ErrorBody,
}

impl ApiError {
    pub fn new(status: StatusCode, name: &str, message: impl Into<String>) -> Self {
        ApiError {
            status,
            body: ErrorBody {
                error: name.to_string(),
                message: message.into(),
            },
        }
    }

    pub fn stage_conflict(message: impl Into<String>) -> Self {
        Self::new(StatusCode::CONFLICT, "StageConflict", message)
    }

    pub fn busy() -> Self {
        Self::new(
            StatusCode::CONFLICT,
            "Busy",
            "a solve is already running for this session",
        )
    }

    pub fn not_found(id: &str) -> Self {
        Self::new(StatusCode::NOT_FOUND, "SessionNotFound", format!("no session {id}"))
    }

    pub fn parse(message: impl Into<String>) -> Self {
        Self::new(StatusCode::UNPROCESSABLE_ENTITY, "ParseError", message)
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, "Internal", message)
    }
}

/// Library errors become 422 responses named after the module error.
impl<E: Into<roomfem_core::Error>> From<E> for ApiError {
    fn from(e: E) -> Self {
        let e = e.into();
        Self::new(StatusCode::UNPROCESSABLE_ENTITY, e.name(), e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}
