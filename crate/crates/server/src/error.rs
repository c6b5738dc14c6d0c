use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde::{Deserialize, Serialize};
use warpgate_core::Error;

/// Body of every non-2xx response.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApiError {
    pub code: String,
    pub message: String,
    #[serde(skip)]
    pub status: u16,
}

impl ApiError {
    fn new(status: StatusCode, code: &str, message: impl Into<String>) -> Self {
        Self {
            code: code.to_string(),
            message: message.into(),
            status: status.as_u16(),
        }
    }

    pub fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "bad_request", message)
    }

    pub fn not_found(message: impl Into<String>) -> Self {
        Self::new(StatusCode::NOT_FOUND, "bad_request", message)
    }

    pub fn build_in_progress() -> Self {
        Self::new(
            StatusCode::CONFLICT,
            "build_in_progress",
            "an index build is running; retry when it finishes",
        )
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", message)
    }

    pub fn status(&self) -> StatusCode {
        StatusCode::from_u16(self.status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR)
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::UnknownTable(_) => Self::new(StatusCode::NOT_FOUND, "unknown_table", msg),
            Error::UnknownColumn(_) => Self::new(StatusCode::NOT_FOUND, "unknown_column", msg),
            Error::IndexNotBuilt => Self::new(StatusCode::CONFLICT, "index_not_built", msg),
            Error::FileNotFound(_)
            | Error::MalformedRow { .. }
            | Error::EmptyTable(_)
            | Error::DimensionMismatch { .. }
            | Error::ConfigMismatch(_)
            | Error::InvalidConfig(_)
            | Error::InvalidSpec(_)
            | Error::NothingIndexed(_) => Self::bad_request(msg),
            _ => Self::internal(msg),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status(), Json(self)).into_response()
    }
}
