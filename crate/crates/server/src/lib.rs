//! Read-only HTTP/JSON API over an immutable model bundle.
//!
//! | Method | Path | Body / query |
//! |--------|------|--------------|
//! | POST | `/api/predict` | `{"Attr": number, ...}` |
//! | POST | `/api/impact` | `{"a": .., "b": .., "value": number?}` |
//! | GET | `/api/attributes` | |
//! | GET | `/api/rules` | `?filter=term,ante:term,cons:term` |
//! | GET | `/api/map/{year}.geojson` | |
//! | GET | `/api/model/summary` | |
//!
//! Errors are `{"code": .., "message": ..}` with status 400, or 404 for an
//! unknown map year.

use std::collections::BTreeMap;
use std::net::SocketAddr;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sprawl_core::dtree::{render_ensemble, render_tree};
use sprawl_core::mapviz::export_geojson;
use sprawl_core::geo_ingest::LabeledRegionSet;
use sprawl_core::rulemine::{filter_rules, RuleFilter};
use sprawl_core::sdss::{predict_sprawl, query_impact, ModelBundle, SdssError};

pub const BIND_ENV: &str = "SPRAWL_BIND";
pub const DEFAULT_BIND: &str = "127.0.0.1:8080";
pub const GEOJSON_MEDIA_TYPE: &str = "application/geo+json";

/// Shared, immutable service state.
#[derive(Clone)]
pub struct AppState {
    bundle: Arc<ModelBundle>,
    maps: Arc<BTreeMap<i32, String>>,
}

impl AppState {
    pub fn new(bundle: ModelBundle) -> Self {
        AppState {
            bundle: Arc::new(bundle),
            maps: Arc::new(BTreeMap::new()),
        }
    }

    /// Renders each year's choropleth once up front.
    pub fn with_maps(bundle: ModelBundle, regions: &[LabeledRegionSet]) -> Result<Self, sprawl_core::mapviz::MapError> {
        let maps = regions
            .iter()
            .map(|r| Ok((r.year(), export_geojson(r)?.to_geojson_string())))
            .collect::<Result<_, sprawl_core::mapviz::MapError>>()?;
        Ok(AppState {
            bundle: Arc::new(bundle),
            maps: Arc::new(maps),
        })
    }

    pub fn bundle(&self) -> &ModelBundle {
        &self.bundle
    }
}

#[derive(Debug, Serialize)]
pub struct ApiError {
    #[serde(skip)]
    status: StatusCode,
    pub code: String,
    pub message: String,
}

impl ApiError {
    fn bad(code: &str, message: impl Into<String>) -> Self {
        ApiError {
            status: StatusCode::BAD_REQUEST,
            code: code.into(),
            message: message.into(),
        }
    }
}

impl From<SdssError> for ApiError {
    fn from(e: SdssError) -> Self {
        ApiError::bad(e.code(), e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self)).into_response()
    }
}

fn json_object(body: &Bytes) -> Result<serde_json::Map<String, Value>, ApiError> {
    match serde_json::from_slice::<Value>(body) {
        Ok(Value::Object(m)) => Ok(m),
        Ok(_) => Err(ApiError::bad("MalformedQuery", "body must be a JSON object")),
        Err(e) => Err(ApiError::bad("MalformedQuery", format!("invalid JSON: {e}"))),
    }
}

async fn predict(State(s): State<AppState>, body: Bytes) -> Result<Response, ApiError> {
    let mut assignment = BTreeMap::new();
    for (k, v) in json_object(&body)? {
        let x = v
            .as_f64()
            .ok_or_else(|| ApiError::bad("MalformedQuery", format!("value for `{k}` must be a number")))?;
        assignment.insert(k, x);
    }
    Ok(Json(predict_sprawl(&s.bundle, &assignment)?).into_response())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ImpactRequest {
    a: String,
    b: String,
    value: Option<f64>,
}

async fn impact(State(s): State<AppState>, body: Bytes) -> Result<Response, ApiError> {
    let req: ImpactRequest = serde_json::from_value(Value::Object(json_object(&body)?))
        .map_err(|e| ApiError::bad("MalformedQuery", e.to_string()))?;
    Ok(Json(query_impact(&s.bundle, &req.a, &req.b, req.value)?).into_response())
}

async fn attributes(State(s): State<AppState>) -> Json<Value> {
    let list: Vec<Value> = s
        .bundle
        .attribute_metadata
        .iter()
        .map(|a| {
            let bins: Vec<Value> = s
                .bundle
                .binning
                .get(&a.name)
                .map(|b| {
                    b.labels
                        .iter()
                        .enumerate()
                        .map(|(i, l)| {
                            let r = b.range(i);
                            json!({ "label": l, "lower": r.lower, "upper": r.upper })
                        })
                        .collect()
                })
                .unwrap_or_default();
            json!({ "name": a.name, "units": a.units, "min": a.min, "max": a.max, "bins": bins })
        })
        .collect();
    Json(json!({ "target": s.bundle.target, "attributes": list }))
}

#[derive(Deserialize)]
struct RulesQuery {
    #[serde(default)]
    filter: String,
}

async fn rules(State(s): State<AppState>, Query(q): Query<RulesQuery>) -> Result<Json<Value>, ApiError> {
    let filter: RuleFilter = q
        .filter
        .parse()
        .map_err(|e: sprawl_core::rulemine::FilterParseError| ApiError::bad("MalformedQuery", e.to_string()))?;
    let matched = filter_rules(&s.bundle.rules, &filter);
    let list: Vec<Value> = matched
        .iter()
        .map(|r| {
            json!({
                "text": r.to_string(),
                "antecedent": r.antecedent,
                "consequent": r.consequent,
                "support": r.support,
                "confidence": r.confidence,
            })
        })
        .collect();
    Ok(Json(json!({ "count": list.len(), "rules": list })))
}

async fn map(State(s): State<AppState>, Path(file): Path<String>) -> Result<Response, ApiError> {
    let not_found = || ApiError {
        status: StatusCode::NOT_FOUND,
        code: "UnknownYear".into(),
        message: format!("no map for `{file}`"),
    };
    let year: i32 = file
        .strip_suffix(".geojson")
        .and_then(|y| y.parse().ok())
        .ok_or_else(not_found)?;
    let doc = s.maps.get(&year).ok_or_else(not_found)?;
    Ok(([(header::CONTENT_TYPE, GEOJSON_MEDIA_TYPE)], doc.clone()).into_response())
}

async fn summary(State(s): State<AppState>) -> Json<Value> {
    let b = &s.bundle;
    Json(json!({
        "format_version": b.format_version,
        "target": b.target,
        "method": b.ensemble.as_ref().map(|e| e.kind.to_string()),
        "members": b.ensemble.as_ref().map_or(0, |e| e.members.len()),
        "tree_text": b.single_tree.as_ref().map(render_tree),
        "ensemble_text": b.ensemble.as_ref().map(render_ensemble),
        "rule_count": b.rules.len(),
        "rule_params": b.rule_params,
        "training_params": b.training_params,
        "prior": b.prior,
        "dataset_fingerprint": b.dataset_fingerprint,
        "map_years": s.maps.keys().collect::<Vec<_>>(),
    }))
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/api/predict", post(predict))
        .route("/api/impact", post(impact))
        .route("/api/attributes", get(attributes))
        .route("/api/rules", get(rules))
        .route("/api/map/{file}", get(map))
        .route("/api/model/summary", get(summary))
        .with_state(state)
}

/// Serves until the process receives Ctrl-C.
pub async fn serve(state: AppState, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    log::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

/// Binds an ephemeral port and serves in the background; returns the
/// bound address.
pub async fn spawn(state: AppState, addr: SocketAddr) -> std::io::Result<SocketAddr> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    let local = listener.local_addr()?;
    tokio::spawn(async move {
        if let Err(e) = axum::serve(listener, router(state)).await {
            log::error!("server stopped: {e}");
        }
    });
    Ok(local)
}
