//! Read-only HTTP/JSON facade over one loaded snapshot. Bodies are the same
//! records the command line prints as JSON lines, collected into arrays for
//! list endpoints.

use std::net::{IpAddr, SocketAddr};
use std::path::Path;
use std::sync::Arc;

use aclens_core::traversal::TraverseOptions;
use aclens_core::view::ErrorView;
use axum::extract::rejection::QueryRejection;
use axum::extract::{Query, State};
use axum::http::{HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use tower_http::cors::{AllowOrigin, CorsLayer};

use crate::cli::{EXIT_OK, EXIT_RUNTIME};
use crate::queries::{self, parse_sid, Direction, Loaded, QueryError, QueryResult};

type Shared = Arc<Loaded>;

struct ApiError(QueryError);

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = match &self.0 {
            QueryError::Path(_) | QueryError::Principal(_) => StatusCode::NOT_FOUND,
            QueryError::BadRequest(_) => StatusCode::BAD_REQUEST,
            QueryError::Unreadable(_) | QueryError::Snapshot(_) | QueryError::Internal(_) => {
                StatusCode::INTERNAL_SERVER_ERROR
            }
        };
        (status, Json(self.0.view())).into_response()
    }
}

impl From<QueryError> for ApiError {
    fn from(e: QueryError) -> Self {
        ApiError(e)
    }
}

impl From<QueryRejection> for ApiError {
    fn from(e: QueryRejection) -> Self {
        ApiError(QueryError::BadRequest(e.body_text()))
    }
}

type ApiResult = Result<Response, ApiError>;

/// Run a query on the blocking pool and serialize its result.
async fn respond<T, F>(state: Shared, query: F) -> ApiResult
where
    T: Serialize + Send + 'static,
    F: FnOnce(&Loaded) -> QueryResult<T> + Send + 'static,
{
    let result = tokio::task::spawn_blocking(move || query(&state))
        .await
        .map_err(|e| QueryError::Internal(format!("query aborted: {e}")))?;
    Ok(Json(result?).into_response())
}

fn required(value: Option<String>, name: &str) -> QueryResult<String> {
    value.ok_or_else(|| QueryError::BadRequest(format!("missing query parameter `{name}`")))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct NoParams {}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TreeParams {
    path: Option<String>,
    depth: Option<u32>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PathParams {
    path: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TraverseParams {
    root: Option<String>,
    filter: Option<String>,
    include_unchanged: Option<bool>,
    include_files: Option<bool>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct EffectiveParams {
    path: Option<String>,
    principal: Option<String>,
    recursive: Option<bool>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MembershipParams {
    sid: Option<String>,
    direction: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RootParams {
    root: Option<String>,
}

async fn meta(State(s): State<Shared>, q: Result<Query<NoParams>, QueryRejection>) -> ApiResult {
    q?;
    respond(s, |l| Ok(queries::meta(Some(l)))).await
}

async fn tree(State(s): State<Shared>, q: Result<Query<TreeParams>, QueryRejection>) -> ApiResult {
    let Query(p) = q?;
    let path = p.path.unwrap_or_else(|| "/".into());
    let depth = p.depth.unwrap_or(1);
    respond(s, move |l| queries::tree(l, &path, depth)).await
}

async fn acl(State(s): State<Shared>, q: Result<Query<PathParams>, QueryRejection>) -> ApiResult {
    let Query(p) = q?;
    let path = required(p.path, "path")?;
    respond(s, move |l| queries::acl(l, &path)).await
}

async fn traverse(State(s): State<Shared>, q: Result<Query<TraverseParams>, QueryRejection>) -> ApiResult {
    let Query(p) = q?;
    let root = p.root.unwrap_or_else(|| "/".into());
    let filter = p
        .filter
        .as_deref()
        .unwrap_or("")
        .split(',')
        .filter(|t| !t.trim().is_empty())
        .map(parse_sid)
        .collect::<QueryResult<Vec<_>>>()
        .map_err(|e| QueryError::BadRequest(e.to_string()))?;
    let options = TraverseOptions {
        include_unchanged: p.include_unchanged.unwrap_or(false),
        include_files: p.include_files.unwrap_or(false),
    };
    respond(s, move |l| queries::traverse(l, &root, &filter, options)).await
}

async fn effective(State(s): State<Shared>, q: Result<Query<EffectiveParams>, QueryRejection>) -> ApiResult {
    let Query(p) = q?;
    let path = p.path.unwrap_or_else(|| "/".into());
    let principal = parse_sid(&required(p.principal, "principal")?)
        .map_err(|e| QueryError::BadRequest(e.to_string()))?;
    if p.recursive.unwrap_or(false) {
        respond(s, move |l| queries::effective_recursive(l, &path, &principal)).await
    } else {
        respond(s, move |l| queries::effective(l, &path, &principal)).await
    }
}

async fn membership(State(s): State<Shared>, q: Result<Query<MembershipParams>, QueryRejection>) -> ApiResult {
    let Query(p) = q?;
    let sid = parse_sid(&required(p.sid, "sid")?).map_err(|e| QueryError::BadRequest(e.to_string()))?;
    let direction = Direction::parse(p.direction.as_deref().unwrap_or("member-of"))?;
    respond(s, move |l| queries::membership(l, &sid, direction)).await
}

async fn audit(State(s): State<Shared>, q: Result<Query<RootParams>, QueryRejection>) -> ApiResult {
    let Query(p) = q?;
    let root = p.root.unwrap_or_else(|| "/".into());
    respond(s, move |l| queries::audit(l, &root)).await
}

async fn unknown_endpoint() -> Response {
    let body = ErrorView {
        code: "unknown_endpoint".into(),
        message: "unknown endpoint".into(),
        detail_path: None,
    };
    (StatusCode::NOT_FOUND, Json(body)).into_response()
}

/// Router over a loaded snapshot. `cors_origins` empty means any origin.
pub fn router(loaded: Loaded, cors_origins: &[String]) -> Result<Router, String> {
    let cors = if cors_origins.is_empty() {
        CorsLayer::permissive()
    } else {
        let origins = cors_origins
            .iter()
            .map(|o| HeaderValue::from_str(o).map_err(|e| format!("bad origin {o:?}: {e}")))
            .collect::<Result<Vec<_>, _>>()?;
        CorsLayer::new().allow_origin(AllowOrigin::list(origins))
    };
    Ok(Router::new()
        .route("/meta", get(meta))
        .route("/tree", get(tree))
        .route("/acl", get(acl))
        .route("/traverse", get(traverse))
        .route("/effective", get(effective))
        .route("/membership", get(membership))
        .route("/audit", get(audit))
        .fallback(unknown_endpoint)
        .layer(cors)
        .with_state(Arc::new(loaded)))
}

/// Load the snapshot and serve until interrupted. Returns the exit code.
pub fn serve_file(snapshot: &Path, bind: IpAddr, port: u16, cors_origins: Vec<String>) -> u8 {
    let loaded = match Loaded::from_file(snapshot) {
        Ok(l) => l,
        Err(e) => {
            eprintln!("aclens: {e}");
            return e.exit_code();
        }
    };
    let app = match router(loaded, &cors_origins) {
        Ok(app) => app,
        Err(e) => {
            eprintln!("aclens: {e}");
            return crate::cli::EXIT_USAGE;
        }
    };
    let runtime = match tokio::runtime::Runtime::new() {
        Ok(rt) => rt,
        Err(e) => {
            eprintln!("aclens: cannot start runtime: {e}");
            return EXIT_RUNTIME;
        }
    };
    runtime.block_on(async move {
        let addr = SocketAddr::new(bind, port);
        let listener = match tokio::net::TcpListener::bind(addr).await {
            Ok(l) => l,
            Err(e) => {
                eprintln!("aclens: cannot bind {addr}: {e}");
                return EXIT_RUNTIME;
            }
        };
        eprintln!("aclens: serving {} on http://{addr}", snapshot.display());
        let shutdown = async {
            let _ = tokio::signal::ctrl_c().await;
        };
        match axum::serve(listener, app).with_graceful_shutdown(shutdown).await {
            Ok(()) => EXIT_OK,
            Err(e) => {
                eprintln!("aclens: server error: {e}");
                EXIT_RUNTIME
            }
        }
    })
}
