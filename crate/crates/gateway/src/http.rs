//! HTTP surface for the operator console.
//!
//! Bodies are parsed here rather than through axum's extractors so every malformed payload
//! gets the same `{error, message}` reply.

use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, patch, post};
use axum::{Json, Router};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use robofoil_core::scenario::{catalog_scenario, ErrorTuple, CATALOG};
use robofoil_core::wire::{EditWire, FoilChangeWire};

use crate::error::{GatewayError, Result};
use crate::session::{FinalVerdict, Judgment};
use crate::store::Store;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioSummary {
    pub name: String,
    pub error_tuple: ErrorTuple,
    pub seed: u64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreateRequest {
    pub scenario: String,
    #[serde(default)]
    pub initial_verdict: Option<Judgment>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FinalizeRequest {
    pub verdict: FinalVerdict,
}

pub fn scenario_summaries() -> Vec<ScenarioSummary> {
    CATALOG
        .iter()
        .map(|e| ScenarioSummary { name: e.name.to_string(), error_tuple: e.tuple, seed: e.seed })
        .collect()
}

fn parse<T: DeserializeOwned>(body: &Bytes) -> Result<T> {
    Ok(serde_json::from_slice(body)?)
}

/// Runs store work off the async executor; solving is CPU-bound.
async fn blocking<T: Send + 'static>(f: impl FnOnce() -> Result<T> + Send + 'static) -> Result<T> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| GatewayError::Io(std::io::Error::other(e.to_string())))?
}

async fn list_scenarios() -> Json<Vec<ScenarioSummary>> {
    Json(scenario_summaries())
}

async fn create_session(State(store): State<Arc<Store>>, body: Bytes) -> Result<Response> {
    let req: CreateRequest = parse(&body)?;
    let scenario = catalog_scenario(&req.scenario)
        .ok_or_else(|| GatewayError::NotFound(format!("no scenario {:?}", req.scenario)))?;
    let session = blocking(move || store.create(&scenario, req.initial_verdict)).await?;
    Ok((StatusCode::CREATED, Json(session)).into_response())
}

async fn get_session(State(store): State<Arc<Store>>, Path(id): Path<String>) -> Result<Response> {
    let session = blocking(move || store.load(&id)).await?;
    Ok(Json(session).into_response())
}

async fn post_foil(State(store): State<Arc<Store>>, Path(id): Path<String>, body: Bytes) -> Result<Response> {
    let foil: Vec<FoilChangeWire> = parse(&body)?;
    let record = blocking(move || store.update(&id, |s| s.post_foil(foil).cloned())).await?;
    Ok((StatusCode::CREATED, Json(record)).into_response())
}

async fn patch_domain(State(store): State<Arc<Store>>, Path(id): Path<String>, body: Bytes) -> Result<Response> {
    let edit: EditWire = parse(&body)?;
    let session = blocking(move || {
        store.update(&id, |s| {
            s.patch_domain(edit)?;
            Ok(s.clone())
        })
    })
    .await?;
    Ok(Json(session).into_response())
}

async fn finalize(State(store): State<Arc<Store>>, Path(id): Path<String>, body: Bytes) -> Result<Response> {
    let req: FinalizeRequest = parse(&body)?;
    let metrics = blocking(move || store.update(&id, |s| s.finalize(req.verdict))).await?;
    Ok(Json(metrics).into_response())
}

async fn get_metrics(State(store): State<Arc<Store>>, Path(id): Path<String>) -> Result<Response> {
    let metrics = blocking(move || store.load(&id)?.current_metrics()).await?;
    Ok(Json(metrics).into_response())
}

pub fn router(store: Arc<Store>) -> Router {
    Router::new()
        .route("/scenarios", get(list_scenarios))
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/foils", post(post_foil))
        .route("/sessions/{id}/domain", patch(patch_domain))
        .route("/sessions/{id}/finalize", post(finalize))
        .route("/sessions/{id}/metrics", get(get_metrics))
        .with_state(store)
}
