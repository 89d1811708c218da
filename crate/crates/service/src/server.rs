//! HTTP front end over [`MapStore`]. See [`crate::protocol`] for the wire
//! format.

use std::net::SocketAddr;
use std::sync::Arc;

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{delete, get, post, put};
use axum::{Json, Router};
use floorwalk::gridmap::{to_bundle_string, Poi};
use floorwalk::{CellCoord, FloorId, Portal};
use tokio::sync::Semaphore;

use crate::protocol::{
    check_schema, AddPoi, AddPortal, EditAck, ErrorCode, MapList, NarrateChoice, RouteRequest,
    RouteResponse, ServiceError, SetCell,
};
use crate::route::{plan_route, NarratorSettings};
use crate::store::MapStore;

pub struct AppState {
    pub store: MapStore,
    pub narrator: NarratorSettings,
    /// Bounds concurrent language-model calls.
    pub lm_permits: Semaphore,
}

impl AppState {
    pub fn new(store: MapStore, narrator: NarratorSettings, lm_in_flight: usize) -> Self {
        Self {
            store,
            narrator,
            lm_permits: Semaphore::new(lm_in_flight.max(1)),
        }
    }
}

impl IntoResponse for ServiceError {
    fn into_response(self) -> Response {
        let status = StatusCode::from_u16(self.code.http_status())
            .unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
        (status, Json(self.body())).into_response()
    }
}

type Shared = Arc<AppState>;
type Reply<T> = Result<Json<T>, ServiceError>;

fn body<T>(payload: Result<Json<T>, JsonRejection>) -> Result<T, ServiceError> {
    payload
        .map(|Json(v)| v)
        .map_err(|e| ServiceError::new(ErrorCode::BadRequest, e.body_text()))
}

async fn blocking<T: Send + 'static>(
    f: impl FnOnce() -> Result<T, ServiceError> + Send + 'static,
) -> Result<T, ServiceError> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ServiceError::new(ErrorCode::Internal, format!("worker failed: {e}")))?
}

async fn list_maps(State(st): State<Shared>) -> Json<MapList> {
    Json(MapList::new(st.store.summaries()))
}

async fn get_map(
    State(st): State<Shared>,
    Path(id): Path<String>,
) -> Result<Response, ServiceError> {
    let map = st.store.snapshot(&id)?;
    let text = to_bundle_string(&map);
    Ok((
        [(axum::http::header::CONTENT_TYPE, "application/json")],
        text,
    )
        .into_response())
}

async fn set_cell(
    State(st): State<Shared>,
    Path(id): Path<String>,
    payload: Result<Json<SetCell>, JsonRejection>,
) -> Reply<EditAck> {
    let req = body(payload)?;
    check_schema(req.schema.as_deref())?;
    let ack_id = id.clone();
    let rev = blocking(move || {
        st.store.edit(&id, |m| {
            m.set_cell(FloorId(req.floor), CellCoord::new(req.i, req.j), req.free)
        })
    })
    .await?;
    Ok(Json(EditAck::new(ack_id, rev)))
}

async fn add_poi(
    State(st): State<Shared>,
    Path(id): Path<String>,
    payload: Result<Json<AddPoi>, JsonRejection>,
) -> Reply<EditAck> {
    let req = body(payload)?;
    check_schema(req.schema.as_deref())?;
    let ack_id = id.clone();
    let rev = blocking(move || {
        st.store
            .edit(&id, |m| m.add_poi(Poi::new(req.name, req.at.into())))
    })
    .await?;
    Ok(Json(EditAck::new(ack_id, rev)))
}

async fn remove_poi(
    State(st): State<Shared>,
    Path((id, name)): Path<(String, String)>,
) -> Reply<EditAck> {
    let ack_id = id.clone();
    let rev = blocking(move || st.store.edit(&id, |m| m.remove_poi(&name))).await?;
    Ok(Json(EditAck::new(ack_id, rev)))
}

async fn add_portal(
    State(st): State<Shared>,
    Path(id): Path<String>,
    payload: Result<Json<AddPortal>, JsonRejection>,
) -> Reply<EditAck> {
    let req = body(payload)?;
    check_schema(req.schema.as_deref())?;
    let mut portal = Portal::new(req.kind, req.a.into(), req.b.into());
    if let Some(c) = req.cost {
        portal = portal.with_cost(c);
    }
    let ack_id = id.clone();
    let rev = blocking(move || st.store.edit(&id, |m| m.add_portal(portal))).await?;
    Ok(Json(EditAck::new(ack_id, rev)))
}

async fn remove_portal(
    State(st): State<Shared>,
    Path((id, index)): Path<(String, usize)>,
) -> Reply<EditAck> {
    let ack_id = id.clone();
    let rev = blocking(move || st.store.edit(&id, |m| m.remove_portal(index))).await?;
    Ok(Json(EditAck::new(ack_id, rev)))
}

async fn route(
    State(st): State<Shared>,
    Path(id): Path<String>,
    payload: Result<Json<RouteRequest>, JsonRejection>,
) -> Reply<RouteResponse> {
    let req = body(payload)?;
    let map = st.store.snapshot(&id)?;
    let _permit = match (req.narrate, st.narrator.lm.is_some()) {
        (NarrateChoice::Lm, true) => Some(
            st.lm_permits
                .acquire()
                .await
                .map_err(|e| ServiceError::new(ErrorCode::Internal, e.to_string()))?,
        ),
        _ => None,
    };
    let state = st.clone();
    let resp = blocking(move || plan_route(&id, &map, &req, &state.narrator)).await?;
    Ok(Json(resp))
}

async fn fallback() -> ServiceError {
    ServiceError::new(ErrorCode::NotFound, "no such endpoint")
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/v1/maps", get(list_maps))
        .route("/v1/maps/{id}", get(get_map))
        .route("/v1/maps/{id}/cells", put(set_cell))
        .route("/v1/maps/{id}/pois", post(add_poi))
        .route("/v1/maps/{id}/pois/{name}", delete(remove_poi))
        .route("/v1/maps/{id}/portals", post(add_portal))
        .route("/v1/maps/{id}/portals/{index}", delete(remove_portal))
        .route("/v1/maps/{id}/route", post(route))
        .fallback(fallback)
        .with_state(state)
}

/// Serves until Ctrl-C.
pub async fn serve(state: Arc<AppState>, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    log::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
