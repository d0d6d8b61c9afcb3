use std::process::ExitCode;

use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GatewayError {
    #[error("{0}")]
    NotFound(String),
    #[error("{0}")]
    Conflict(String),
    #[error("{0}")]
    Invalid(String),
    /// No solution exists, or the foil asked for is infeasible.
    #[error("{0}")]
    Unsolvable(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl GatewayError {
    pub fn kind(&self) -> &'static str {
        match self {
            GatewayError::NotFound(_) => "not_found",
            GatewayError::Conflict(_) => "conflict",
            GatewayError::Invalid(_) => "invalid_argument",
            GatewayError::Unsolvable(_) => "unsolvable",
            GatewayError::Io(_) => "internal",
        }
    }

    pub fn status(&self) -> StatusCode {
        match self {
            GatewayError::NotFound(_) => StatusCode::NOT_FOUND,
            GatewayError::Conflict(_) => StatusCode::CONFLICT,
            GatewayError::Invalid(_) => StatusCode::BAD_REQUEST,
            GatewayError::Unsolvable(_) => StatusCode::UNPROCESSABLE_ENTITY,
            GatewayError::Io(_) => StatusCode::INTERNAL_SERVER_ERROR,
        }
    }

    pub fn exit_code(&self) -> ExitCode {
        match self {
            GatewayError::NotFound(_) | GatewayError::Conflict(_) | GatewayError::Invalid(_) => ExitCode::from(2),
            GatewayError::Unsolvable(_) => ExitCode::from(3),
            GatewayError::Io(_) => ExitCode::FAILURE,
        }
    }
}

impl From<robofoil_core::Error> for GatewayError {
    fn from(e: robofoil_core::Error) -> Self {
        use robofoil_core::Error as E;
        match e {
            E::InvalidArgument(_) | E::Parse(_) => GatewayError::Invalid(e.to_string()),
            E::NoPath { .. } | E::Unsolvable { .. } => GatewayError::Unsolvable(e.to_string()),
        }
    }
}

impl From<serde_json::Error> for GatewayError {
    fn from(e: serde_json::Error) -> Self {
        GatewayError::Invalid(format!("malformed document: {e}"))
    }
}

impl IntoResponse for GatewayError {
    fn into_response(self) -> Response {
        let body = serde_json::json!({ "error": self.kind(), "message": self.to_string() });
        (self.status(), Json(body)).into_response()
    }
}

pub type Result<T, E = GatewayError> = std::result::Result<T, E>;
