//! Wire format of the HTTP service, schema `floorwalk.service/1`.
//!
//! All bodies are JSON. Responses carry `"schema"`; requests may carry it
//! and are rejected with `schema_mismatch` when it names another version.
//!
//! | Method | Path                                  | Body             | Reply           |
//! |--------|---------------------------------------|------------------|-----------------|
//! | GET    | `/v1/maps`                            |                  | [`MapList`]     |
//! | GET    | `/v1/maps/{map}`                      |                  | map bundle      |
//! | PUT    | `/v1/maps/{map}/cells`                | [`SetCell`]      | [`EditAck`]     |
//! | POST   | `/v1/maps/{map}/pois`                 | [`AddPoi`]       | [`EditAck`]     |
//! | DELETE | `/v1/maps/{map}/pois/{name}`          |                  | [`EditAck`]     |
//! | POST   | `/v1/maps/{map}/portals`              | [`AddPortal`]    | [`EditAck`]     |
//! | DELETE | `/v1/maps/{map}/portals/{index}`      |                  | [`EditAck`]     |
//! | POST   | `/v1/maps/{map}/route`                | [`RouteRequest`] | [`RouteResponse`] |
//!
//! The map bundle is the on-disk bundle document (schema
//! `floorwalk.bundle/1`). Failures return [`ErrorBody`] with one of the
//! [`ErrorCode`]s and a matching HTTP status.

use std::fmt;

use floorwalk::compressor::{CompressError, ReplayError};
use floorwalk::gridmap::{BundleError, EditError, GridError};
use floorwalk::planner::PlanError;
use floorwalk::{CornerRule, NodeRef, PortalKind};
use serde::{Deserialize, Serialize};

pub const PROTOCOL_SCHEMA: &str = "floorwalk.service/1";

fn schema() -> String {
    PROTOCOL_SCHEMA.to_owned()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorCode {
    BadRequest,
    SchemaMismatch,
    UnknownMap,
    UnknownPoi,
    UnknownFloor,
    BadCoordinate,
    SameEndpoints,
    StartBlocked,
    GoalBlocked,
    NoPath,
    WouldOrphanPoiOrPortal,
    ValidationFailed,
    NotFound,
    PersistFailed,
    Internal,
}

impl ErrorCode {
    pub fn http_status(self) -> u16 {
        match self {
            ErrorCode::BadRequest
            | ErrorCode::SchemaMismatch
            | ErrorCode::BadCoordinate
            | ErrorCode::SameEndpoints => 400,
            ErrorCode::UnknownMap
            | ErrorCode::UnknownPoi
            | ErrorCode::UnknownFloor
            | ErrorCode::NotFound => 404,
            ErrorCode::WouldOrphanPoiOrPortal => 409,
            ErrorCode::StartBlocked
            | ErrorCode::GoalBlocked
            | ErrorCode::NoPath
            | ErrorCode::ValidationFailed => 422,
            ErrorCode::PersistFailed | ErrorCode::Internal => 500,
        }
    }

    /// Process exit code used by the command-line tool.
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorCode::NoPath => 3,
            ErrorCode::UnknownPoi
            | ErrorCode::UnknownFloor
            | ErrorCode::BadCoordinate
            | ErrorCode::SameEndpoints
            | ErrorCode::StartBlocked
            | ErrorCode::GoalBlocked => 4,
            _ => 1,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ErrorCode::BadRequest => "bad_request",
            ErrorCode::SchemaMismatch => "schema_mismatch",
            ErrorCode::UnknownMap => "unknown_map",
            ErrorCode::UnknownPoi => "unknown_poi",
            ErrorCode::UnknownFloor => "unknown_floor",
            ErrorCode::BadCoordinate => "bad_coordinate",
            ErrorCode::SameEndpoints => "same_endpoints",
            ErrorCode::StartBlocked => "start_blocked",
            ErrorCode::GoalBlocked => "goal_blocked",
            ErrorCode::NoPath => "no_path",
            ErrorCode::WouldOrphanPoiOrPortal => "would_orphan_poi_or_portal",
            ErrorCode::ValidationFailed => "validation_failed",
            ErrorCode::NotFound => "not_found",
            ErrorCode::PersistFailed => "persist_failed",
            ErrorCode::Internal => "internal",
        }
    }
}

impl fmt::Display for ErrorCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{code}: {message}")]
pub struct ServiceError {
    pub code: ErrorCode,
    pub message: String,
}

impl ServiceError {
    pub fn new(code: ErrorCode, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }

    pub fn body(&self) -> ErrorBody {
        ErrorBody {
            schema: schema(),
            error: ErrorDetail {
                code: self.code,
                message: self.message.clone(),
            },
        }
    }
}

impl From<PlanError> for ServiceError {
    fn from(e: PlanError) -> Self {
        let code = match e {
            PlanError::StartBlocked(_) => ErrorCode::StartBlocked,
            PlanError::GoalBlocked(_) => ErrorCode::GoalBlocked,
            PlanError::NodeBlocked(_) => ErrorCode::BadCoordinate,
            PlanError::UnknownFloor(_) => ErrorCode::UnknownFloor,
            PlanError::NoPath { .. } => ErrorCode::NoPath,
        };
        Self::new(code, e.to_string())
    }
}

impl From<EditError> for ServiceError {
    fn from(e: EditError) -> Self {
        let code = match e {
            EditError::Grid(GridError::OutOfBounds { .. }) => ErrorCode::BadCoordinate,
            EditError::Grid(_) => ErrorCode::BadRequest,
            EditError::UnknownFloor(_) => ErrorCode::UnknownFloor,
            EditError::WouldOrphanPoiOrPortal { .. } => ErrorCode::WouldOrphanPoiOrPortal,
            EditError::NotFound(_) => ErrorCode::NotFound,
            EditError::Invalid(_) => ErrorCode::ValidationFailed,
        };
        Self::new(code, e.to_string())
    }
}

impl From<BundleError> for ServiceError {
    fn from(e: BundleError) -> Self {
        let code = match e {
            BundleError::Validation(_) => ErrorCode::ValidationFailed,
            BundleError::SchemaVersionMismatch { .. } => ErrorCode::SchemaMismatch,
            _ => ErrorCode::PersistFailed,
        };
        Self::new(code, e.to_string())
    }
}

impl From<CompressError> for ServiceError {
    fn from(e: CompressError) -> Self {
        Self::new(ErrorCode::Internal, e.to_string())
    }
}

impl From<ReplayError> for ServiceError {
    fn from(e: ReplayError) -> Self {
        Self::new(ErrorCode::Internal, e.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorDetail {
    pub code: ErrorCode,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub schema: String,
    pub error: ErrorDetail,
}

/// Cell address on the wire.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NodeJson {
    pub floor: u32,
    pub i: usize,
    pub j: usize,
}

impl From<NodeRef> for NodeJson {
    fn from(n: NodeRef) -> Self {
        Self {
            floor: n.floor.0,
            i: n.cell.i,
            j: n.cell.j,
        }
    }
}

impl From<NodeJson> for NodeRef {
    fn from(n: NodeJson) -> Self {
        NodeRef::new(n.floor, n.i, n.j)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NarrateChoice {
    #[default]
    Template,
    Lm,
}

impl std::str::FromStr for NarrateChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "template" => Ok(Self::Template),
            "lm" => Ok(Self::Lm),
            other => Err(format!("unknown narration mode '{other}' (template|lm)")),
        }
    }
}

/// Origin and destination are POI names (case-insensitive) or `floor:i:j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RouteRequest {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<String>,
    pub origin: String,
    pub destination: String,
    #[serde(default)]
    pub corner_rule: CornerRule,
    #[serde(default)]
    pub narrate: NarrateChoice,
}

impl RouteRequest {
    pub fn new(origin: impl Into<String>, destination: impl Into<String>) -> Self {
        Self {
            schema: None,
            origin: origin.into(),
            destination: destination.into(),
            corner_rule: CornerRule::default(),
            narrate: NarrateChoice::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub search_ms: f64,
    pub compress_ms: f64,
    pub narrate_ms: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchCounters {
    pub expanded_nodes: usize,
    pub pushed_nodes: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RouteResponse {
    pub schema: String,
    pub map: String,
    pub origin: NodeJson,
    pub destination: NodeJson,
    pub corner_rule: CornerRule,
    pub cost: f64,
    pub path: Vec<NodeJson>,
    pub terse: Vec<String>,
    pub guide: Vec<String>,
    pub guide_source: floorwalk::narrator::GuideSource,
    /// Why language-model output was replaced by the template, if it was.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fallback: Option<String>,
    pub search: SearchCounters,
    pub timings: Timings,
}

impl RouteResponse {
    /// Everything except timings, as text. Equal for identical requests.
    pub fn route_section(&self) -> String {
        let mut out = format!("cost: {:.6}\n", self.cost);
        out.push_str("terse:\n");
        for line in &self.terse {
            out.push_str("  ");
            out.push_str(line);
            out.push('\n');
        }
        out.push_str("guide:\n");
        for line in &self.guide {
            out.push_str("  ");
            out.push_str(line);
            out.push('\n');
        }
        out
    }

    pub fn timings_line(&self) -> String {
        format!(
            "timings: search {:.3} ms, compress {:.3} ms, narrate {:.3} ms",
            self.timings.search_ms, self.timings.compress_ms, self.timings.narrate_ms
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapSummary {
    pub id: String,
    pub name: String,
    pub floors: Vec<FloorSummary>,
    pub pois: usize,
    pub portals: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FloorSummary {
    pub id: u32,
    pub label: String,
    pub rows: usize,
    pub cols: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapList {
    pub schema: String,
    pub maps: Vec<MapSummary>,
}

impl MapList {
    pub fn new(maps: Vec<MapSummary>) -> Self {
        Self {
            schema: schema(),
            maps,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetCell {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<String>,
    pub floor: u32,
    pub i: usize,
    pub j: usize,
    pub free: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AddPoi {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<String>,
    pub name: String,
    pub at: NodeJson,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AddPortal {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<String>,
    pub kind: PortalKind,
    pub a: NodeJson,
    pub b: NodeJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cost: Option<f64>,
}

/// Reply to an accepted mutation. `revision` counts accepted edits since
/// the service loaded the map.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EditAck {
    pub schema: String,
    pub map: String,
    pub revision: u64,
}

impl EditAck {
    pub fn new(map: impl Into<String>, revision: u64) -> Self {
        Self {
            schema: schema(),
            map: map.into(),
            revision,
        }
    }
}

/// Rejects request documents that name a different schema version.
pub fn check_schema(declared: Option<&str>) -> Result<(), ServiceError> {
    match declared {
        None => Ok(()),
        Some(s) if s == PROTOCOL_SCHEMA => Ok(()),
        Some(s) => Err(ServiceError::new(
            ErrorCode::SchemaMismatch,
            format!("request schema '{s}', service speaks '{PROTOCOL_SCHEMA}'"),
        )),
    }
}
