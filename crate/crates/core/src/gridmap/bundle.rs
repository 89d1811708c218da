//! Versioned JSON bundle format.
//!
//! A bundle is one pretty-printed JSON document. Field order is fixed by the
//! structs below so saved files diff cleanly. Grids are stored as one string
//! of `0`/`1` per row (`1` = walkable).
//!
//! ```json
//! {
//!   "schema": "floorwalk.bundle/1",
//!   "name": "Mall",
//!   "meters_per_cell": null,
//!   "floors": [
//!     { "id": 0, "label": "Ground Floor", "source_image": null,
//!       "rows": 2, "cols": 3, "grid": ["111", "101"] }
//!   ],
//!   "portals": [
//!     { "kind": "escalator", "a": { "floor": 0, "i": 0, "j": 0 },
//!       "b": { "floor": 1, "i": 4, "j": 2 }, "cost": 1.0 }
//!   ],
//!   "pois": [ { "name": "Gate A", "floor": 0, "i": 0, "j": 2 } ]
//! }
//! ```

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{
    BuildingMap, CellCoord, Floor, FloorId, GridError, NodeRef, OccupancyGrid, Poi, Portal,
    PortalKind,
};
use crate::gridmap::Violation;
use crate::num::Scalar;

pub const BUNDLE_SCHEMA: &str = "floorwalk.bundle/1";

#[derive(Debug, thiserror::Error)]
pub enum BundleError {
    #[error("bundle I/O failed: {0}")]
    Io(#[from] std::io::Error),
    #[error("bundle is not valid JSON: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("unsupported bundle schema {found:?}, expected \"{BUNDLE_SCHEMA}\"")]
    SchemaVersionMismatch { found: Option<String> },
    #[error("bundle grid is malformed: {0}")]
    Grid(#[from] GridError),
    #[error("bundle fails validation: {}", join_violations(.0))]
    Validation(Vec<Violation>),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

#[derive(Serialize, Deserialize)]
struct BundleDoc {
    schema: String,
    name: String,
    meters_per_cell: Option<f64>,
    floors: Vec<FloorDoc>,
    portals: Vec<PortalDoc>,
    pois: Vec<PoiDoc>,
}

#[derive(Serialize, Deserialize)]
struct FloorDoc {
    id: u32,
    label: String,
    source_image: Option<String>,
    rows: usize,
    cols: usize,
    grid: Vec<String>,
}

#[derive(Clone, Copy, Serialize, Deserialize)]
struct NodeDoc {
    floor: u32,
    i: usize,
    j: usize,
}

impl From<NodeRef> for NodeDoc {
    fn from(n: NodeRef) -> Self {
        Self {
            floor: n.floor.0,
            i: n.cell.i,
            j: n.cell.j,
        }
    }
}

impl From<NodeDoc> for NodeRef {
    fn from(n: NodeDoc) -> Self {
        NodeRef {
            floor: FloorId(n.floor),
            cell: CellCoord::new(n.i, n.j),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct PortalDoc {
    kind: PortalKind,
    a: NodeDoc,
    b: NodeDoc,
    cost: f64,
}

#[derive(Serialize, Deserialize)]
struct PoiDoc {
    name: String,
    floor: u32,
    i: usize,
    j: usize,
}

/// Serializes a map. Does not validate; see [`save_bundle`].
pub fn to_bundle_string<S: Scalar>(map: &BuildingMap<S>) -> String {
    let doc = BundleDoc {
        schema: BUNDLE_SCHEMA.to_owned(),
        name: map.name.clone(),
        meters_per_cell: map.meters_per_cell,
        floors: map
            .floors
            .iter()
            .map(|f| FloorDoc {
                id: f.id.0,
                label: f.label.clone(),
                source_image: f.source_image.clone(),
                rows: f.grid.rows(),
                cols: f.grid.cols(),
                grid: f.grid.to_row_strings(),
            })
            .collect(),
        portals: map
            .portals
            .iter()
            .map(|p| PortalDoc {
                kind: p.kind,
                a: p.a.into(),
                b: p.b.into(),
                cost: p.cost.as_f64(),
            })
            .collect(),
        pois: map
            .pois
            .iter()
            .map(|p| PoiDoc {
                name: p.name.clone(),
                floor: p.location.floor.0,
                i: p.location.cell.i,
                j: p.location.cell.j,
            })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("bundle document serializes");
    s.push('\n');
    s
}

/// Parses and validates a bundle document.
pub fn from_bundle_str<S: Scalar>(text: &str) -> Result<BuildingMap<S>, BundleError> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    let found = value.get("schema").and_then(|s| s.as_str());
    if found != Some(BUNDLE_SCHEMA) {
        return Err(BundleError::SchemaVersionMismatch {
            found: found.map(str::to_owned),
        });
    }
    let doc: BundleDoc = serde_json::from_value(value)?;

    let mut floors = Vec::with_capacity(doc.floors.len());
    for f in doc.floors {
        let grid = OccupancyGrid::from_row_strings(&f.grid)?;
        if grid.rows() != f.rows || grid.cols() != f.cols {
            return Err(GridError::DeclaredShape {
                declared: (f.rows, f.cols),
                actual: (grid.rows(), grid.cols()),
            }
            .into());
        }
        floors.push(Floor {
            id: FloorId(f.id),
            label: f.label,
            grid,
            source_image: f.source_image,
        });
    }
    let map = BuildingMap {
        name: doc.name,
        meters_per_cell: doc.meters_per_cell,
        floors,
        portals: doc
            .portals
            .into_iter()
            .map(|p| Portal {
                kind: p.kind,
                a: p.a.into(),
                b: p.b.into(),
                cost: S::lossy_from_f64(p.cost),
            })
            .collect(),
        pois: doc
            .pois
            .into_iter()
            .map(|p| Poi {
                name: p.name,
                location: NodeRef {
                    floor: FloorId(p.floor),
                    cell: CellCoord::new(p.i, p.j),
                },
            })
            .collect(),
    };
    let violations = map.validate();
    if !violations.is_empty() {
        return Err(BundleError::Validation(violations));
    }
    Ok(map)
}

/// Validates, then writes atomically: the document goes to a temporary file
/// in the destination directory which is renamed over `path`.
pub fn save_bundle<S: Scalar>(
    map: &BuildingMap<S>,
    path: impl AsRef<Path>,
) -> Result<(), BundleError> {
    let violations = map.validate();
    if !violations.is_empty() {
        return Err(BundleError::Validation(violations));
    }
    let path = path.as_ref();
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(to_bundle_string(map).as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

pub fn load_bundle<S: Scalar>(path: impl AsRef<Path>) -> Result<BuildingMap<S>, BundleError> {
    let text = fs::read_to_string(path)?;
    from_bundle_str(&text)
}
